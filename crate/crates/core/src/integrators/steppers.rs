//! Fixed-step explicit integrators over an abstract autonomous vector field.
//!
//! Each stepper owns its stage buffers so that a long run allocates once. The
//! free functions (`step_midpoint`, `step_rk4`, ...) are one-shot conveniences
//! that allocate a fresh stepper per call.

use super::tableau::Rkf45Tableau;
use crate::lattice::{pq_force, LatticeStatePQ};

/// Autonomous right-hand side `dy/dt = f(y)`, written into `dy`.
pub trait VectorField {
    fn eval(&self, y: &[f64], dy: &mut [f64]);
}

impl<F> VectorField for F
where
    F: Fn(&[f64], &mut [f64]),
{
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        self(y, dy)
    }
}

/// `out = y + h * k`
fn axpy_into(out: &mut [f64], y: &[f64], h: f64, k: &[f64]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        *o = y + h * k;
    }
}

/// Explicit midpoint: `y + h f(y + h/2 f(y))`.
#[derive(Debug, Clone)]
pub struct Midpoint {
    k: Vec<f64>,
    tmp: Vec<f64>,
}

impl Midpoint {
    pub fn new(dim: usize) -> Self {
        Self {
            k: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    pub fn step<F: VectorField + ?Sized>(&mut self, y: &mut [f64], h: f64, f: &F) {
        f.eval(y, &mut self.k);
        axpy_into(&mut self.tmp, y, 0.5 * h, &self.k);
        f.eval(&self.tmp, &mut self.k);
        for (y, k) in y.iter_mut().zip(&self.k) {
            *y += h * k;
        }
    }
}

/// Classical four-stage Runge-Kutta, all stages based at the current iterate.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    pub fn step<F: VectorField + ?Sized>(&mut self, y: &mut [f64], h: f64, f: &F) {
        f.eval(y, &mut self.k1);
        axpy_into(&mut self.tmp, y, 0.5 * h, &self.k1);
        f.eval(&self.tmp, &mut self.k2);
        axpy_into(&mut self.tmp, y, 0.5 * h, &self.k2);
        f.eval(&self.tmp, &mut self.k3);
        axpy_into(&mut self.tmp, y, h, &self.k3);
        f.eval(&self.tmp, &mut self.k4);
        let w = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += w * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Six-stage Fehlberg scheme propagated with its fourth-order weights only.
#[derive(Debug, Clone)]
pub struct Rkf45 {
    tableau: Rkf45Tableau,
    k: [Vec<f64>; 6],
    tmp: Vec<f64>,
}

impl Rkf45 {
    pub fn new(dim: usize, tableau: Rkf45Tableau) -> Self {
        Self {
            tableau,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    pub fn step<F: VectorField + ?Sized>(&mut self, y: &mut [f64], h: f64, f: &F) {
        f.eval(y, &mut self.k[0]);
        for stage in 1..6 {
            let row = self.tableau.stage_row(stage);
            self.tmp.copy_from_slice(y);
            for (j, &bij) in row.iter().enumerate() {
                if bij != 0.0 {
                    for (t, k) in self.tmp.iter_mut().zip(&self.k[j]) {
                        *t += h * bij * k;
                    }
                }
            }
            f.eval(&self.tmp, &mut self.k[stage]);
        }
        for (j, &cj) in self.tableau.weights().iter().enumerate() {
            if cj != 0.0 {
                for (yi, k) in y.iter_mut().zip(&self.k[j]) {
                    *yi += h * cj * k;
                }
            }
        }
    }
}

/// Four-step Adams-Bashforth with the Euler / AB2 / AB3 startup.
///
/// Keeps the last four evaluations of `f`; each call to [`step`](Self::step)
/// costs one new evaluation.
#[derive(Debug, Clone)]
pub struct AdamsBashforth4 {
    history: [Vec<f64>; 4],
    // number of evaluations stored so far, capped at 4
    filled: usize,
    // slot of the newest evaluation
    newest: usize,
}

impl AdamsBashforth4 {
    /// Coefficients (oldest first) and common denominator for each startup phase.
    const EULER: (&'static [f64], f64) = (&[1.0], 1.0);
    const AB2: (&'static [f64], f64) = (&[-1.0, 3.0], 2.0);
    const AB3: (&'static [f64], f64) = (&[5.0, -16.0, 23.0], 12.0);
    const AB4: (&'static [f64], f64) = (&[-9.0, 37.0, -59.0, 55.0], 24.0);

    pub fn new(dim: usize) -> Self {
        Self {
            history: std::array::from_fn(|_| vec![0.0; dim]),
            filled: 0,
            newest: 3,
        }
    }

    /// Forget the history; the next step restarts with Euler.
    pub fn reset(&mut self) {
        self.filled = 0;
        self.newest = 3;
    }

    pub fn step<F: VectorField + ?Sized>(&mut self, y: &mut [f64], h: f64, f: &F) {
        self.newest = (self.newest + 1) % 4;
        f.eval(y, &mut self.history[self.newest]);
        self.filled = (self.filled + 1).min(4);

        let (coeffs, denom) = match self.filled {
            1 => Self::EULER,
            2 => Self::AB2,
            3 => Self::AB3,
            _ => Self::AB4,
        };
        let depth = coeffs.len();
        let scale = h / denom;
        for (age_from_oldest, &c) in coeffs.iter().enumerate() {
            let back = depth - 1 - age_from_oldest;
            let slot = (self.newest + 4 - back) % 4;
            for (yi, fi) in y.iter_mut().zip(&self.history[slot]) {
                *yi += scale * c * fi;
            }
        }
    }
}

/// Stormer-Verlet leapfrog for the separable Toda Hamiltonian on a flat
/// `[p.., q..]` vector: half kick, drift with the half-step momentum, half kick.
#[derive(Debug, Clone)]
pub struct StormerVerlet {
    force: Vec<f64>,
}

impl StormerVerlet {
    pub fn new(sites: usize) -> Self {
        Self {
            force: vec![0.0; sites],
        }
    }

    pub fn step(&mut self, y: &mut [f64], h: f64) {
        let n = y.len() / 2;
        let (p, q) = y.split_at_mut(n);
        pq_force(q, &mut self.force);
        for (p, f) in p.iter_mut().zip(&self.force) {
            *p += 0.5 * h * f;
        }
        for (q, p) in q.iter_mut().zip(p.iter()) {
            *q += h * p;
        }
        pq_force(q, &mut self.force);
        for (p, f) in p.iter_mut().zip(&self.force) {
            *p += 0.5 * h * f;
        }
    }
}

pub fn step_midpoint<F: VectorField + ?Sized>(y: &[f64], h: f64, f: &F) -> Vec<f64> {
    let mut out = y.to_vec();
    Midpoint::new(y.len()).step(&mut out, h, f);
    out
}

pub fn step_rk4<F: VectorField + ?Sized>(y: &[f64], h: f64, f: &F) -> Vec<f64> {
    let mut out = y.to_vec();
    Rk4::new(y.len()).step(&mut out, h, f);
    out
}

pub fn step_rkf45<F: VectorField + ?Sized>(
    y: &[f64],
    h: f64,
    f: &F,
    tableau: &Rkf45Tableau,
) -> Vec<f64> {
    let mut out = y.to_vec();
    Rkf45::new(y.len(), tableau.clone()).step(&mut out, h, f);
    out
}

/// Runs `n_steps` of [`AdamsBashforth4`] from `y0`.
pub fn ab4_run<F: VectorField + ?Sized>(y0: &[f64], h: f64, n_steps: usize, f: &F) -> Vec<f64> {
    let mut y = y0.to_vec();
    let mut ab = AdamsBashforth4::new(y.len());
    for _ in 0..n_steps {
        ab.step(&mut y, h, f);
    }
    y
}

pub fn step_sv2symp(state: &LatticeStatePQ, h: f64) -> LatticeStatePQ {
    let n = state.window.len();
    let mut y = state.to_vector();
    StormerVerlet::new(n).step(&mut y, h);
    let q = y.split_off(n);
    LatticeStatePQ {
        window: state.window,
        p: y,
        q,
        time: state.time + h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IndexWindow;

    fn growth(y: &[f64], dy: &mut [f64]) {
        dy.copy_from_slice(y);
    }

    fn frozen(_: &[f64], dy: &mut [f64]) {
        dy.fill(0.0);
    }

    fn unit_drift(_: &[f64], dy: &mut [f64]) {
        dy.fill(1.0);
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(step_midpoint(&[1.0], 1.0, &growth), vec![2.5]);
        assert!((step_midpoint(&[1.0], 0.1, &growth)[0] - 1.105).abs() < 1e-15);
        assert_eq!(step_midpoint(&[3.0, -2.0], 0.7, &frozen), vec![3.0, -2.0]);
    }

    #[test]
    fn rk4_examples() {
        let y = step_rk4(&[1.0], 1.0, &growth)[0];
        assert!((y - 2.708_333_333_333_333).abs() < 1e-15);
        assert_eq!(step_rk4(&[3.0, -2.0], 0.7, &frozen), vec![3.0, -2.0]);
        let y = step_rk4(&[1.0], 0.1, &growth)[0];
        assert!((y - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn rkf45_examples() {
        let tab = Rkf45Tableau::fehlberg();
        assert_eq!(step_rkf45(&[3.0, -2.0], 0.7, &frozen, &tab), vec![3.0, -2.0]);
        let y = step_rkf45(&[1.0], 0.25, &unit_drift, &tab)[0];
        assert!((y - 1.25).abs() < 1e-15);
        let y = step_rkf45(&[1.0], 0.1, &growth, &tab)[0];
        assert!((y - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn ab4_examples() {
        assert_eq!(ab4_run(&[3.0, -2.0], 0.1, 17, &frozen), vec![3.0, -2.0]);
        let y = ab4_run(&[1.0], 0.125, 5, &unit_drift)[0];
        assert!((y - (1.0 + 5.0 * 0.125)).abs() < 1e-15);
        // the Euler start leaves a global error of about e h^2 / 2
        let y = ab4_run(&[1.0], 0.01, 100, &growth)[0];
        let err = (y - std::f64::consts::E).abs();
        assert!(err < 2e-4, "{y}");
        assert!((err - std::f64::consts::E * 0.5e-4).abs() < 0.1 * err, "{err:e}");
    }

    #[test]
    fn ab4_startup_sequence() {
        // y' = y from y0 = 1: hand-evaluate the Euler / AB2 / AB3 / AB4 iterates
        let h = 0.1;
        let y1 = 1.0 + h;
        let y2 = y1 + h / 2.0 * (-1.0 + 3.0 * y1);
        let y3 = y2 + h / 12.0 * (5.0 - 16.0 * y1 + 23.0 * y2);
        let y4 = y3 + h / 24.0 * (-9.0 + 37.0 * y1 - 59.0 * y2 + 55.0 * y3);
        let y5 = y4 + h / 24.0 * (-9.0 * y1 + 37.0 * y2 - 59.0 * y3 + 55.0 * y4);
        for (n, expected) in [y1, y2, y3, y4, y5].into_iter().enumerate() {
            let got = ab4_run(&[1.0], h, n + 1, &growth)[0];
            assert!((got - expected).abs() < 1e-15, "step {}: {got} vs {expected}", n + 1);
        }
    }

    #[test]
    fn sv2symp_examples() {
        let w = IndexWindow::symmetric(5);
        let eq = LatticeStatePQ::equilibrium(w);
        let out = step_sv2symp(&eq, 0.3);
        assert_eq!(out.p, eq.p);
        assert_eq!(out.q, eq.q);

        let mut s = LatticeStatePQ::equilibrium(w);
        let i0 = w.offset(0).unwrap();
        s.q[i0] = 0.1;
        let h = 0.01;
        let half = 0.5 * h * ((-0.1f64).exp() - 0.1f64.exp());
        assert!((half + 0.001_001_667_500_198_4).abs() < 1e-15);
        let out = step_sv2symp(&s, h);
        assert!((out.q[i0] - (0.1 + h * half)).abs() < 1e-17);
        assert!((out.q[i0] - 0.099_989_983_324_998).abs() < 1e-15);
    }

    #[test]
    fn sv2symp_time_reversible() {
        let w = IndexWindow::symmetric(8);
        let p: Vec<f64> = w.sites().map(|n| 0.3 * (-(n as f64).powi(2) / 4.0).exp()).collect();
        let q: Vec<f64> = w.sites().map(|n| 0.05 * (n as f64 * 0.7).cos()).collect();
        let s = LatticeStatePQ::new(w, p, q, 0.0).unwrap();
        let h = 0.05;
        let mut t = step_sv2symp(&s, h);
        t.p.iter_mut().for_each(|p| *p = -*p);
        let mut back = step_sv2symp(&t, h);
        back.p.iter_mut().for_each(|p| *p = -*p);
        for (x, y) in back.p.iter().zip(&s.p).chain(back.q.iter().zip(&s.q)) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
