//! Sorted-norm error measures and the soliton / dispersive index regions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TodaError};
use crate::initial_data::InitialDataKind;
use crate::integrators::MethodKind;
use crate::lattice::IndexWindow;
use crate::reference::ReferenceSource;

/// Fraction of entries kept by the sorted norm.
pub const DEFAULT_SORT_FRACTION: f64 = 0.1;

/// Sites added beyond the fastest soliton in the soliton region.
pub const SOLITON_REGION_MARGIN: u64 = 100;

/// Half-width of the dispersive region around `-T/2`.
pub const DISPERSIVE_HALF_WIDTH: i64 = 50;

/// Number of entries `ceil(d n)` retained by the sorted norm, at least one.
pub fn sorted_count(n: usize, d: f64) -> usize {
    // shave a few ulps so that e.g. 0.3 * 10 keeps 3 entries, not 4
    let k = (d * n as f64 * (1.0 - 1e-12)).ceil() as usize;
    k.clamp(1, n)
}

/// l2 norm of the `ceil(d n)` largest magnitudes of `x`.
pub fn sorted_norm(x: &[f64], d: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(TodaError::EmptyInput);
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(TodaError::InvalidParameter(format!("sort fraction must lie in (0, 1), got {d}")));
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let k = sorted_count(mags.len(), d);
    Ok(mags[..k].iter().map(|v| v * v).sum::<f64>().sqrt())
}

fn check_same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(TodaError::LengthMismatch {
            expected: y.len(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `||x - y||_sort / ||c - y||_sort`: error of `x` relative to the reference
/// `y` measured against the background `c`.
pub fn relative_error(x: &[f64], y: &[f64], c: f64, d: f64) -> Result<f64> {
    check_same_len(x, y)?;
    let num: Vec<f64> = x.iter().zip(y).map(|(x, y)| x - y).collect();
    let den: Vec<f64> = y.iter().map(|y| c - y).collect();
    let den = sorted_norm(&den, d)?;
    if den == 0.0 {
        return Err(TodaError::DegenerateReference);
    }
    Ok(sorted_norm(&num, d)? / den)
}

/// `||x - y||_sort`.
pub fn absolute_error(x: &[f64], y: &[f64], d: f64) -> Result<f64> {
    check_same_len(x, y)?;
    let diff: Vec<f64> = x.iter().zip(y).map(|(x, y)| x - y).collect();
    sorted_norm(&diff, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionKind {
    Soliton,
    Dispersive,
}

impl RegionKind {
    pub const ALL: [RegionKind; 2] = [RegionKind::Soliton, RegionKind::Dispersive];

    pub fn label(self) -> &'static str {
        match self {
            RegionKind::Soliton => "soliton",
            RegionKind::Dispersive => "dispersive",
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RegionKind {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "soliton" | "sol" => Ok(RegionKind::Soliton),
            "dispersive" | "disp" => Ok(RegionKind::Dispersive),
            _ => Err(TodaError::InvalidParameter(format!("unknown region '{s}'"))),
        }
    }
}

/// Contiguous range of sites on the left half-lattice where errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionSpec {
    pub kind: RegionKind,
    window: IndexWindow,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, lo: i64, hi: i64) -> Result<Self> {
        let window = IndexWindow::new(lo, hi)?;
        if hi > 0 {
            return Err(TodaError::InvalidParameter(format!(
                "region [{lo}, {hi}] reaches into n > 0"
            )));
        }
        Ok(Self { kind, window })
    }

    pub fn lo(&self) -> i64 {
        self.window.k_min()
    }

    pub fn hi(&self) -> i64 {
        self.window.k_max()
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn intersects(&self, other: &RegionSpec) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}, {}]", self.kind, self.lo(), self.hi())
    }
}

/// How far the soliton region extends to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonRegionRule {
    /// `[-ceil(s T) - margin, -ceil(T)]`.
    Margin(u64),
    /// `[-ceil((s + 100) T), -ceil(T)]`, about a hundred times wider.
    Literal,
}

impl Default for SolitonRegionRule {
    fn default() -> Self {
        SolitonRegionRule::Margin(SOLITON_REGION_MARGIN)
    }
}

fn check_time(t_final: f64) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(TodaError::InvalidParameter(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    Ok(())
}

/// `[-ceil(s_max T) - 100, -ceil(T)]`: every soliton moving left sits near
/// `-s T`, beyond the edge `-T` of the dispersive cone.
pub fn soliton_region(t_final: f64, s_max: f64) -> Result<RegionSpec> {
    soliton_region_with(t_final, s_max, SolitonRegionRule::default())
}

pub fn soliton_region_with(t_final: f64, s_max: f64, rule: SolitonRegionRule) -> Result<RegionSpec> {
    check_time(t_final)?;
    if !(s_max >= 1.0 && s_max.is_finite()) {
        return Err(TodaError::InvalidParameter(format!("s_max must be at least 1, got {s_max}")));
    }
    let hi = -(t_final.ceil() as i64);
    let lo = match rule {
        SolitonRegionRule::Margin(margin) => -((s_max * t_final).ceil() as i64) - margin as i64,
        SolitonRegionRule::Literal => -(((s_max + 100.0) * t_final).ceil() as i64),
    };
    RegionSpec::new(RegionKind::Soliton, lo, hi)
}

/// The 101 sites centred on `-T/2`.
pub fn dispersive_region(t_final: f64) -> Result<RegionSpec> {
    check_time(t_final)?;
    let centre = -((t_final / 2.0).round() as i64);
    RegionSpec::new(
        RegionKind::Dispersive,
        centre - DISPERSIVE_HALF_WIDTH,
        centre + DISPERSIVE_HALF_WIDTH,
    )
}

/// Whether errors in a benchmark cell are relative to the background or absolute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Relative,
    Absolute,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::Relative => "relative",
            MetricKind::Absolute => "absolute",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Diverged,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Diverged => "diverged",
        }
    }
}

/// Errors of one (method, dt, T, initial data, region) benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub method: MethodKind,
    pub id: InitialDataKind,
    pub dt: f64,
    pub t_final: f64,
    pub region: RegionSpec,
    pub err_a: f64,
    pub err_b: f64,
    pub metric: MetricKind,
    pub status: Status,
    pub source: ReferenceSource,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_norm_examples() {
        let mut x: Vec<f64> = (1..=10).map(f64::from).collect();
        x.reverse();
        x.swap(2, 7);
        assert_eq!(sorted_norm(&x, 0.1).unwrap(), 10.0);
        assert_eq!(sorted_norm(&x, 0.3).unwrap(), 245f64.sqrt());
        assert!((sorted_norm(&x, 0.3).unwrap() - 15.652_475).abs() < 1e-6);
        assert_eq!(sorted_norm(&[0.0; 7], 0.4).unwrap(), 0.0);
        assert!(matches!(sorted_norm(&[], 0.1), Err(TodaError::EmptyInput)));
        assert!(sorted_norm(&[1.0], 1.0).is_err());
        assert!(sorted_norm(&[1.0], 0.0).is_err());
    }

    #[test]
    fn sorted_count_is_ceiling() {
        assert_eq!(sorted_count(101, 0.1), 11);
        assert_eq!(sorted_count(10, 0.1), 1);
        assert_eq!(sorted_count(10, 0.3), 3);
        assert_eq!(sorted_count(100, 0.1), 10);
        assert_eq!(sorted_count(3, 0.1), 1);
    }

    #[test]
    fn relative_error_examples() {
        let y: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
        assert_eq!(relative_error(&y, &y, 0.5, 0.1).unwrap(), 0.0);
        assert_eq!(relative_error(&[0.5; 10], &y, 0.5, 0.1).unwrap(), 1.0);

        let mut y = vec![0.5; 10];
        y[0] = 0.6;
        let mut x = y.clone();
        x[0] = 0.55;
        assert!((relative_error(&x, &y, 0.5, 0.1).unwrap() - 0.5).abs() < 1e-12);

        assert!(matches!(
            relative_error(&[0.1; 4], &[0.5; 4], 0.5, 0.1),
            Err(TodaError::DegenerateReference)
        ));
        assert!(relative_error(&[0.1; 3], &[0.5; 4], 0.5, 0.1).is_err());
    }

    #[test]
    fn absolute_error_examples() {
        let y = vec![0.3; 10];
        assert_eq!(absolute_error(&y, &y, 0.1).unwrap(), 0.0);
        let x: Vec<f64> = (1..=10).map(|i| 0.3 + i as f64).collect();
        assert!((absolute_error(&x, &y, 0.1).unwrap() - 10.0).abs() < 1e-12);
        let eps = 1e-3;
        let x = vec![0.3 + eps; 100];
        let y = vec![0.3; 100];
        assert!((absolute_error(&x, &y, 0.1).unwrap() - eps * 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn soliton_region_examples() {
        let r = soliton_region(1000.0, 1.026_879_7).unwrap();
        assert_eq!((r.lo(), r.hi()), (-1127, -1000));
        let r = soliton_region(1000.0, 1.909_568_6).unwrap();
        assert_eq!((r.lo(), r.hi()), (-2010, -1000));
        let r = soliton_region(100.0, 1.0).unwrap();
        assert_eq!((r.lo(), r.hi()), (-200, -100));
        let r = soliton_region_with(10.0, 1.5, SolitonRegionRule::Literal).unwrap();
        assert_eq!((r.lo(), r.hi()), (-1015, -10));
        assert!(soliton_region(0.0, 1.0).is_err());
        assert!(soliton_region(10.0, 0.5).is_err());
    }

    #[test]
    fn dispersive_region_examples() {
        let r = dispersive_region(1000.0).unwrap();
        assert_eq!((r.lo(), r.hi()), (-550, -450));
        let r = dispersive_region(2000.0).unwrap();
        assert_eq!((r.lo(), r.hi()), (-1050, -950));
        let r = dispersive_region(100.0).unwrap();
        assert_eq!((r.lo(), r.hi()), (-100, 0));
        assert_eq!(r.len(), 101);
        assert!(dispersive_region(-1.0).is_err());
    }

    #[test]
    fn regions_are_disjoint_for_long_runs() {
        for t in (300..=6000).step_by(50) {
            for s in [1.0, 1.0269, 1.5, 1.9096, 2.5, 3.0] {
                let sol = soliton_region(t as f64, s).unwrap();
                let disp = dispersive_region(t as f64).unwrap();
                assert!(!sol.intersects(&disp), "T={t} s={s}");
            }
        }
    }

    #[test]
    fn region_rejects_positive_sites() {
        assert!(RegionSpec::new(RegionKind::Soliton, -5, 1).is_err());
        assert!(RegionSpec::new(RegionKind::Soliton, -5, -6).is_err());
    }
}
