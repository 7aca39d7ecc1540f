//! The five families of initial data and the exact one-soliton trajectory.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TodaError};
use crate::integrators::{MethodKind, Propagator};
use crate::lattice::{IndexWindow, LatticeStateAB};

/// Default decay rate of the one-soliton data.
pub const DEFAULT_KAPPA: f64 = 0.4;

/// Direction the one-soliton profile travels in: `-1` means towards `n < 0`.
///
/// Fixed by [`calibrate_soliton_direction`], which a unit test re-runs.
pub const SOLITON_DIRECTION: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDataKind {
    /// Pure radiation, empty discrete spectrum.
    NoS,
    /// Exact one-soliton profile with decay rate `kappa > 0`.
    PureS { kappa: f64 },
    /// Two solitons plus radiation.
    Double,
    /// Four solitons plus radiation.
    Quad,
    /// `b_0 = 4` on the background: one soliton and a strongly oscillating tail.
    Dirac,
}

impl InitialDataKind {
    pub const ALL: [InitialDataKind; 5] = [
        InitialDataKind::NoS,
        InitialDataKind::PureS {
            kappa: DEFAULT_KAPPA,
        },
        InitialDataKind::Double,
        InitialDataKind::Quad,
        InitialDataKind::Dirac,
    ];

    pub fn pure_soliton() -> Self {
        InitialDataKind::PureS {
            kappa: DEFAULT_KAPPA,
        }
    }

    pub fn pure_soliton_with(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(TodaError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(InitialDataKind::PureS { kappa })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialDataKind::NoS => "NoS",
            InitialDataKind::PureS { .. } => "PureS",
            InitialDataKind::Double => "double",
            InitialDataKind::Quad => "quad",
            InitialDataKind::Dirac => "dirac",
        }
    }

    /// `(a_n, b_n)` at time zero.
    pub fn value_at(&self, n: i64) -> (f64, f64) {
        let x = n as f64;
        match *self {
            InitialDataKind::NoS => (0.5 - 0.25 * (-x * x).exp(), 0.1 * sech(x)),
            InitialDataKind::PureS { kappa } => soliton_profile(kappa, x),
            InitialDataKind::Double => (0.5 + 0.8 * x * (-x * x).exp(), 0.1 * sech(x)),
            InitialDataKind::Quad => ((0.5 - x * (-x * x + x).exp()).abs(), x * sech(x)),
            InitialDataKind::Dirac => (0.5, if n == 0 { 4.0 } else { 0.0 }),
        }
    }
}

impl fmt::Display for InitialDataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDataKind::PureS { kappa } if *kappa != DEFAULT_KAPPA => {
                write!(f, "PureS:{kappa}")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for InitialDataKind {
    type Err = TodaError;

    /// Accepts the family names case-insensitively; `PureS:<kappa>` sets the
    /// soliton's decay rate.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        let kind = match name.to_ascii_lowercase().as_str() {
            "nos" => InitialDataKind::NoS,
            "pures" => match arg {
                Some(k) => {
                    let kappa = k.parse::<f64>().map_err(|_| {
                        TodaError::InvalidParameter(format!("invalid kappa '{k}'"))
                    })?;
                    return InitialDataKind::pure_soliton_with(kappa);
                }
                None => InitialDataKind::pure_soliton(),
            },
            "double" => InitialDataKind::Double,
            "quad" => InitialDataKind::Quad,
            "dirac" => InitialDataKind::Dirac,
            _ => {
                return Err(TodaError::InvalidParameter(format!(
                    "unknown initial data '{s}'"
                )))
            }
        };
        if arg.is_some() {
            return Err(TodaError::InvalidParameter(format!(
                "initial data '{name}' takes no parameter"
            )));
        }
        Ok(kind)
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `e^{-2 kappa m} / (1 + e^{-2 kappa m})`, without overflow for either sign of `m`.
fn logistic(kappa: f64, m: f64) -> f64 {
    if m >= 0.0 {
        let e = (-2.0 * kappa * m).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + (2.0 * kappa * m).exp())
    }
}

/// One-soliton profile at real position `x`:
/// `a = sqrt(tau(x-1) tau(x+1)) / (2 tau(x))`,
/// `b = (e^{-kappa} - e^{kappa})/2 * (s(x) - s(x-1))`,
/// with `tau(m) = 1 + e^{-2 kappa m}` and `s` the matching logistic function.
pub fn soliton_profile(kappa: f64, x: f64) -> (f64, f64) {
    // For x < 0 the common factor e^{-2 kappa x} is divided out of every tau,
    // which is an identity of the ratio and keeps the exponentials bounded.
    let sign = if x >= 0.0 { -1.0 } else { 1.0 };
    let tau = |m: f64| 1.0 + (sign * 2.0 * kappa * m).exp();
    let a = 0.5 * (tau(x - 1.0) * tau(x + 1.0)).sqrt() / tau(x);
    let b = 0.5 * ((-kappa).exp() - kappa.exp()) * (logistic(kappa, x) - logistic(kappa, x - 1.0));
    (a, b)
}

/// Speed `sinh(kappa) / kappa` of the soliton with decay rate `kappa`.
pub fn soliton_speed(kappa: f64) -> f64 {
    kappa.sinh() / kappa
}

/// The exact one-soliton trajectory: the time-zero profile translated to
/// `n - SOLITON_DIRECTION * speed * t`.
pub fn exact_soliton(kappa: f64, n: i64, t: f64) -> (f64, f64) {
    exact_soliton_directed(kappa, n, t, SOLITON_DIRECTION)
}

fn exact_soliton_directed(kappa: f64, n: i64, t: f64, direction: f64) -> (f64, f64) {
    soliton_profile(kappa, n as f64 - direction * soliton_speed(kappa) * t)
}

/// Evaluates the initial data on every site of `window`.
pub fn make_id(kind: &InitialDataKind, window: IndexWindow) -> LatticeStateAB {
    let (a, b) = window.sites().map(|n| kind.value_at(n)).unzip();
    LatticeStateAB {
        window,
        a,
        b,
        time: 0.0,
    }
}

/// Integrates the one-soliton data with rk4 (`dt = 1e-3`) to `t = 5` and
/// returns whichever direction, `+1` or `-1`, makes the translated profile
/// match the numerical solution better.
pub fn calibrate_soliton_direction(kappa: f64) -> Result<f64> {
    let t_final = 5.0;
    let dt = 1e-3;
    let half_width = (soliton_speed(kappa) * t_final).ceil() as u64 + 200;
    let window = IndexWindow::symmetric(half_width);
    let kind = InitialDataKind::pure_soliton_with(kappa)?;
    let mut prop = Propagator::new(MethodKind::Rk4, &make_id(&kind, window), dt)?;
    prop.advance((t_final / dt).round() as usize)?;
    let state = prop.state_ab()?;

    let discrepancy = |direction: f64| {
        window
            .sites()
            .zip(state.a.iter().zip(&state.b))
            .map(|(n, (a, b))| {
                let (ea, eb) = exact_soliton_directed(kappa, n, t_final, direction);
                (a - ea).abs().max((b - eb).abs())
            })
            .fold(0.0, f64::max)
    };
    Ok(if discrepancy(-1.0) <= discrepancy(1.0) {
        -1.0
    } else {
        1.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rhs_ab;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn nos_at_origin() {
        assert_eq!(InitialDataKind::NoS.value_at(0), (0.25, 0.1));
    }

    #[test]
    fn quad_at_origin() {
        assert_eq!(InitialDataKind::Quad.value_at(0), (0.5, 0.0));
    }

    #[test]
    fn dirac_profile() {
        let s = make_id(&InitialDataKind::Dirac, IndexWindow::symmetric(10));
        assert!(s.a.iter().all(|&a| a == 0.5));
        for n in -10..=10 {
            assert_eq!(s.at(n).1, if n == 0 { 4.0 } else { 0.0 });
        }
    }

    #[test]
    fn pure_soliton_at_origin() {
        // hand arithmetic: a_0 = sqrt(2 + 2 cosh 0.8) / 4, b_0 = sinh(0.4) (e^0.8/(1+e^0.8) - 1/2)
        let (a, b) = InitialDataKind::pure_soliton().value_at(0);
        let a_hand = (2.0 + 2.0 * 0.8f64.cosh()).sqrt() / 4.0;
        let e = 0.8f64.exp();
        let b_hand = 0.4f64.sinh() * (e / (1.0 + e) - 0.5);
        assert!(close(a, a_hand, 1e-15), "{a} vs {a_hand}");
        assert!(close(b, b_hand, 1e-15), "{b} vs {b_hand}");
        assert!(close(a, 0.540_536_185_919_227_4, 1e-15));
        assert!(close(b, 0.078_032_459_966_349_9, 1e-15));
    }

    #[test]
    fn all_families_decay_to_background() {
        for kind in InitialDataKind::ALL {
            for n in (40..=400).chain(-400..=-40) {
                let (a, b) = kind.value_at(n);
                assert!((a - 0.5).abs() + b.abs() <= 1e-13, "{kind} at {n}: ({a}, {b})");
            }
        }
    }

    #[test]
    fn all_families_have_positive_a() {
        for kind in InitialDataKind::ALL {
            let s = make_id(&kind, IndexWindow::symmetric(60));
            assert!(s.a.iter().all(|&a| a > 0.0), "{kind}");
        }
    }

    #[test]
    fn pure_soliton_shape() {
        let s = make_id(&InitialDataKind::pure_soliton(), IndexWindow::symmetric(60));
        assert!(s.a.iter().all(|&a| a >= 0.5));
        let (imax, _) = s
            .a
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc });
        assert!(s.window.site(imax).abs() <= 1);
    }

    #[test]
    fn exact_soliton_at_time_zero_is_the_initial_data() {
        let kind = InitialDataKind::pure_soliton();
        for n in -80..=80 {
            assert_eq!(exact_soliton(0.4, n, 0.0), kind.value_at(n));
        }
    }

    #[test]
    fn exact_soliton_far_field() {
        let s = soliton_speed(0.4);
        for &t in &[0.0, 3.7, 50.0, 1000.0] {
            let centre = SOLITON_DIRECTION * s * t;
            for n in -1200..=1200 {
                if (n as f64 - centre).abs() >= 40.0 {
                    let (a, b) = exact_soliton(0.4, n, t);
                    assert!((a - 0.5).abs() <= 1e-13 && b.abs() <= 1e-13, "n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn exact_soliton_solves_the_flaschka_equations() {
        // central difference in t against the vector field of the exact profile
        let kappa = 0.4;
        let w = IndexWindow::symmetric(120);
        let dt = 1e-4;
        for &t in &[0.0, 1.3, 17.0, 42.5] {
            let profile = |t: f64| {
                let (a, b): (Vec<f64>, Vec<f64>) =
                    w.sites().map(|n| exact_soliton(kappa, n, t)).unzip();
                LatticeStateAB::new(w, a, b, t).unwrap()
            };
            let (da, db) = rhs_ab(&profile(t));
            let plus = profile(t + dt);
            let minus = profile(t - dt);
            for i in 0..w.len() {
                let fa = (plus.a[i] - minus.a[i]) / (2.0 * dt);
                let fb = (plus.b[i] - minus.b[i]) / (2.0 * dt);
                assert!((fa - da[i]).abs() < 1e-8, "a at {} t={t}", w.site(i));
                assert!((fb - db[i]).abs() < 1e-8, "b at {} t={t}", w.site(i));
            }
        }
    }

    #[test]
    fn traveling_wave_identity() {
        let kappa = 0.4;
        let s = soliton_speed(kappa);
        for &t in &[0.0, 2.5, 31.0] {
            for n in -60..=60 {
                let (a1, b1) = exact_soliton(kappa, n, t + 1.0 / s);
                let (a2, b2) = exact_soliton(kappa, n - SOLITON_DIRECTION as i64, t);
                assert!(close(a1, a2, 1e-14) && close(b1, b2, 1e-14), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn direction_calibration_agrees_with_constant() {
        assert_eq!(calibrate_soliton_direction(DEFAULT_KAPPA).unwrap(), SOLITON_DIRECTION);
        assert_eq!(calibrate_soliton_direction(0.9).unwrap(), SOLITON_DIRECTION);
    }

    #[test]
    fn parse_names() {
        assert_eq!("nos".parse::<InitialDataKind>().unwrap(), InitialDataKind::NoS);
        assert_eq!("PureS".parse::<InitialDataKind>().unwrap(), InitialDataKind::pure_soliton());
        assert_eq!(
            "PureS:0.7".parse::<InitialDataKind>().unwrap(),
            InitialDataKind::PureS { kappa: 0.7 }
        );
        assert!("PureS:-1".parse::<InitialDataKind>().is_err());
        assert!("dirac:3".parse::<InitialDataKind>().is_err());
        assert!("triple".parse::<InitialDataKind>().is_err());
        for kind in InitialDataKind::ALL {
            assert_eq!(kind.to_string().parse::<InitialDataKind>().unwrap(), kind);
        }
    }
}
