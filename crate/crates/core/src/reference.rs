//! Reference ("true") solutions that benchmark errors are measured against.
//!
//! Three sources are supported: the exact one-soliton trajectory, fine-step
//! rk4 integration checked by step halving, and reference files on disk.
//!
//! # File format
//!
//! ```text
//! # toda-reference id=double T=100 source=fine-integration
//! -200,5e-1,0e0
//! -199,5.000000000000001e-1,-1.2e-17
//! ```
//!
//! The header is the first line. Every following line is `n,a_ref,b_ref`;
//! the `n` column must increase by exactly one per line. An optional
//! `region=soliton|dispersive` key may follow the source tag.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Result, TodaError};
use crate::initial_data::{exact_soliton, make_id, InitialDataKind};
use crate::integrators::{MethodKind, Propagator, StepperConfig};
use crate::lattice::{IndexWindow, LatticeStateAB, A_BACKGROUND, B_BACKGROUND};
use crate::metrics::{absolute_error, relative_error, RegionKind, RegionSpec, DEFAULT_SORT_FRACTION};
use crate::spectral::default_window;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceSource {
    ExactSoliton,
    ExternalFile,
    FineIntegration,
}

impl ReferenceSource {
    pub fn label(self) -> &'static str {
        match self {
            ReferenceSource::ExactSoliton => "exact-soliton",
            ReferenceSource::ExternalFile => "external-file",
            ReferenceSource::FineIntegration => "fine-integration",
        }
    }
}

impl fmt::Display for ReferenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ReferenceSource {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-soliton" => Ok(ReferenceSource::ExactSoliton),
            "external-file" => Ok(ReferenceSource::ExternalFile),
            "fine-integration" => Ok(ReferenceSource::FineIntegration),
            _ => Err(TodaError::InvalidParameter(format!("unknown reference source '{s}'"))),
        }
    }
}

/// Reference values of `(a_n, b_n)` on a contiguous range of sites at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub id: InitialDataKind,
    pub t_final: f64,
    /// Sites covered by `a_ref` / `b_ref`.
    pub sites: IndexWindow,
    /// Benchmark region the values were produced for, when known.
    pub region: Option<RegionKind>,
    pub a_ref: Vec<f64>,
    pub b_ref: Vec<f64>,
    pub source: ReferenceSource,
}

impl ReferenceSolution {
    /// Reference values on `region`, which must lie inside `self.sites`.
    pub fn restrict(&self, region: &RegionSpec) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = (region.lo(), region.hi());
        match (self.sites.offset(lo), self.sites.offset(hi)) {
            (Some(i), Some(j)) => Ok((self.a_ref[i..=j].to_vec(), self.b_ref[i..=j].to_vec())),
            _ => Err(TodaError::InvalidParameter(format!(
                "reference covers [{}, {}], region needs [{lo}, {hi}]",
                self.sites.k_min(),
                self.sites.k_max()
            ))),
        }
    }

    fn from_state(
        id: &InitialDataKind,
        state: &LatticeStateAB,
        region: &RegionSpec,
        source: ReferenceSource,
    ) -> Self {
        let (a_ref, b_ref) = state.restrict(region.window());
        Self {
            id: *id,
            t_final: state.time,
            sites: region.window(),
            region: Some(region.kind),
            a_ref,
            b_ref,
            source,
        }
    }
}

/// Exact one-soliton values on `region` at `t_final`.
pub fn pures_reference(t_final: f64, region: &RegionSpec, kappa: f64) -> Result<ReferenceSolution> {
    let id = InitialDataKind::pure_soliton_with(kappa)?;
    let (a_ref, b_ref) = region
        .window()
        .sites()
        .map(|n| exact_soliton(kappa, n, t_final))
        .unzip();
    Ok(ReferenceSolution {
        id,
        t_final,
        sites: region.window(),
        region: Some(region.kind),
        a_ref,
        b_ref,
        source: ReferenceSource::ExactSoliton,
    })
}

/// Largest of the a- and b-discrepancies between two profiles, relative to
/// the background where the reference `y` departs from it and absolute where
/// it does not.
pub fn profile_discrepancy(a_x: &[f64], b_x: &[f64], a_y: &[f64], b_y: &[f64]) -> Result<f64> {
    let one = |x: &[f64], y: &[f64], c: f64| match relative_error(x, y, c, DEFAULT_SORT_FRACTION) {
        Err(TodaError::DegenerateReference) => absolute_error(x, y, DEFAULT_SORT_FRACTION),
        other => other,
    };
    Ok(one(a_x, a_y, A_BACKGROUND)?.max(one(b_x, b_y, B_BACKGROUND)?))
}

/// Integrates `id` with rk4 at `dt` on `window` and returns the final state.
fn rk4_state(id: &InitialDataKind, t_final: f64, dt: f64, window: IndexWindow) -> Result<LatticeStateAB> {
    let config = StepperConfig::new(MethodKind::Rk4, dt, t_final)?;
    let mut prop = Propagator::new(MethodKind::Rk4, &make_id(id, window), dt)?;
    prop.advance(config.steps())?;
    let mut state = prop.state_ab()?;
    state.time = t_final;
    Ok(state)
}

/// Symmetric window covering both the default signal cone and every region.
pub fn reference_window(id: &InitialDataKind, t_final: f64, regions: &[RegionSpec]) -> Result<IndexWindow> {
    let base = default_window(id, t_final)?.k_max();
    let needed = regions.iter().map(|r| r.lo().unsigned_abs() + 10).max().unwrap_or(0);
    Ok(IndexWindow::symmetric((base as u64).max(needed)))
}

/// Fine-step rk4 references on several regions from a single pair of runs.
///
/// Integrates at `dt_ref` and at `dt_ref / 2`; on every region the two runs
/// must agree within `10 * tolerance` (see [`profile_discrepancy`]), otherwise
/// the reference is rejected. The `dt_ref` run is returned.
pub fn fine_references(
    id: &InitialDataKind,
    t_final: f64,
    regions: &[RegionSpec],
    dt_ref: f64,
    tolerance: f64,
) -> Result<Vec<ReferenceSolution>> {
    let window = reference_window(id, t_final, regions)?;
    let coarse = rk4_state(id, t_final, dt_ref, window)?;
    if t_final > 0.0 {
        let fine = rk4_state(id, t_final, 0.5 * dt_ref, window)?;
        let allowed = 10.0 * tolerance;
        for region in regions {
            let (ac, bc) = coarse.restrict(region.window());
            let (af, bf) = fine.restrict(region.window());
            let difference = profile_discrepancy(&ac, &bc, &af, &bf)?;
            if !(difference <= allowed) {
                return Err(TodaError::ReferenceNotConverged { difference, allowed });
            }
        }
    }
    Ok(regions
        .iter()
        .map(|r| ReferenceSolution::from_state(id, &coarse, r, ReferenceSource::FineIntegration))
        .collect())
}

pub fn fine_reference(
    id: &InitialDataKind,
    t_final: f64,
    region: &RegionSpec,
    dt_ref: f64,
    tolerance: f64,
) -> Result<ReferenceSolution> {
    let mut refs = fine_references(id, t_final, std::slice::from_ref(region), dt_ref, tolerance)?;
    Ok(refs.remove(0))
}

/// Serialises a reference in the file format described in the module docs.
pub fn reference_to_csv(reference: &ReferenceSolution, source_tag: &str) -> String {
    let mut out = format!(
        "# toda-reference id={} T={} source={}",
        reference.id, reference.t_final, source_tag
    );
    if let Some(kind) = reference.region {
        let _ = write!(out, " region={kind}");
    }
    out.push('\n');
    for (n, (a, b)) in reference.sites.sites().zip(reference.a_ref.iter().zip(&reference.b_ref)) {
        let _ = writeln!(out, "{n},{a:e},{b:e}");
    }
    out
}

pub fn write_reference_csv(reference: &ReferenceSolution, path: &Path) -> Result<()> {
    let text = reference_to_csv(reference, reference.source.label());
    fs::write(path, text).map_err(|source| TodaError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_reference_csv(path: &Path) -> Result<ReferenceSolution> {
    let text = fs::read_to_string(path).map_err(|source| TodaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_reference_csv(&text, path)
}

/// Parses reference-file text; `path` is only used in error messages.
pub fn parse_reference_csv(text: &str, path: &Path) -> Result<ReferenceSolution> {
    let err = |line: usize, message: String| TodaError::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields = header
        .strip_prefix("# toda-reference")
        .ok_or_else(|| err(1, "header must start with '# toda-reference'".into()))?;

    let mut id = None;
    let mut t_final = None;
    let mut tag = None;
    let mut region = None;
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("malformed header field '{field}'")))?;
        match key {
            "id" => id = Some(value.parse::<InitialDataKind>().map_err(|e| err(1, e.to_string()))?),
            "T" => {
                let t = value
                    .parse::<f64>()
                    .ok()
                    .filter(|t| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| err(1, format!("invalid final time '{value}'")))?;
                t_final = Some(t);
            }
            "source" => tag = Some(value.to_string()),
            "region" => region = Some(value.parse::<RegionKind>().map_err(|e| err(1, e.to_string()))?),
            _ => return Err(err(1, format!("unknown header key '{key}'"))),
        }
    }
    let id = id.ok_or_else(|| err(1, "header is missing id=".into()))?;
    let t_final = t_final.ok_or_else(|| err(1, "header is missing T=".into()))?;
    if tag.is_none() {
        return Err(err(1, "header is missing source=".into()));
    }

    let mut first = None;
    let mut a_ref = Vec::new();
    let mut b_ref = Vec::new();
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(err(line_no, format!("expected 3 columns n,a_ref,b_ref, found {}", cols.len())));
        }
        let n = cols[0]
            .parse::<i64>()
            .map_err(|_| err(line_no, format!("invalid site index '{}'", cols[0])))?;
        let value = |s: &str, name: &str| -> Result<f64> {
            let v = s
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("invalid {name} value '{s}'")))?;
            if !v.is_finite() {
                return Err(err(line_no, format!("non-finite {name} value '{s}'")));
            }
            Ok(v)
        };
        let a = value(cols[1], "a_ref")?;
        let b = value(cols[2], "b_ref")?;
        match first {
            None => first = Some(n),
            Some(k0) => {
                let expected = k0 + a_ref.len() as i64;
                if n != expected {
                    return Err(err(
                        line_no,
                        format!("site indices not contiguous: expected {expected}, found {n}"),
                    ));
                }
            }
        }
        a_ref.push(a);
        b_ref.push(b);
    }
    let k0 = first.ok_or_else(|| err(1, "no data rows".into()))?;
    let sites = IndexWindow::new(k0, k0 + a_ref.len() as i64 - 1)?;
    Ok(ReferenceSolution {
        id,
        t_final,
        sites,
        region,
        a_ref,
        b_ref,
        source: ReferenceSource::ExternalFile,
    })
}
