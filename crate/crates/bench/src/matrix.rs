use std::path::{Path, PathBuf};

use rayon::prelude::*;
use toda_core::metrics::{soliton_region_with, SolitonRegionRule, DEFAULT_SORT_FRACTION};
use toda_core::reference::{fine_references, load_reference_csv, pures_reference, reference_window};
use toda_core::spectral::{spectrum_of, DEFAULT_SPECTRAL_HALF_WIDTH};
use toda_core::{
    absolute_error, dispersive_region, make_id, relative_error, ErrorReport, IndexWindow,
    InitialDataKind, LatticeStateAB, MethodKind, MetricKind, Propagator, ReferenceSolution,
    ReferenceSource, RegionKind, RegionSpec, Status, StepperConfig, TodaError,
};

use crate::error::{BenchError, Result};
use crate::table::BenchTable;

/// Target accuracy of fine-integration references. The `dt_ref` and
/// `dt_ref / 2` runs must agree within ten times this value.
pub const DEFAULT_REFERENCE_TOLERANCE: f64 = 1e-9;

/// Where non-soliton references come from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ReferencePolicy {
    /// Fine rk4 integration.
    #[default]
    Auto,
    /// Files named `<id>_T<T>.csv` in this directory, falling back to fine
    /// integration for pairs without a file.
    ExternalDir(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkMatrix {
    pub methods: Vec<MethodKind>,
    pub dts: Vec<f64>,
    pub t_finals: Vec<f64>,
    pub ids: Vec<InitialDataKind>,
    pub regions: Vec<RegionKind>,
    pub reference_policy: ReferencePolicy,
    pub soliton_rule: SolitonRegionRule,
    /// Step of fine references; `min(dts) / 10` when unset.
    pub dt_ref: Option<f64>,
    pub reference_tolerance: f64,
    /// Worker threads. Output does not depend on this.
    pub jobs: usize,
}

impl BenchmarkMatrix {
    pub fn new(
        methods: Vec<MethodKind>,
        dts: Vec<f64>,
        t_finals: Vec<f64>,
        ids: Vec<InitialDataKind>,
        regions: Vec<RegionKind>,
    ) -> Self {
        Self {
            methods,
            dts,
            t_finals,
            ids,
            regions,
            reference_policy: ReferencePolicy::Auto,
            soliton_rule: SolitonRegionRule::default(),
            dt_ref: None,
            reference_tolerance: DEFAULT_REFERENCE_TOLERANCE,
            jobs: 1,
        }
    }

    /// Desk-scale matrix: every method, dt in {0.01, 0.001}, T = 100, every
    /// initial data and both regions.
    pub fn desk_scale() -> Self {
        Self::new(
            MethodKind::ALL.to_vec(),
            vec![0.01, 0.001],
            vec![100.0],
            InitialDataKind::ALL.to_vec(),
            RegionKind::ALL.to_vec(),
        )
    }

    pub fn cell_count(&self) -> usize {
        self.methods.len() * self.dts.len() * self.t_finals.len() * self.ids.len() * self.regions.len()
    }

    fn validate(&self) -> Result<()> {
        let axes = [
            ("methods", self.methods.is_empty()),
            ("time steps", self.dts.is_empty()),
            ("final times", self.t_finals.is_empty()),
            ("initial data", self.ids.is_empty()),
            ("regions", self.regions.is_empty()),
        ];
        if let Some((name, _)) = axes.iter().find(|(_, empty)| *empty) {
            return Err(BenchError::EmptyAxis(name));
        }
        for &t in &self.t_finals {
            if !(t > 0.0) {
                return Err(TodaError::InvalidParameter(format!("final time must be positive, got {t}")).into());
            }
            for &dt in &self.dts {
                StepperConfig::new(MethodKind::Rk4, dt, t)?;
            }
        }
        if self.jobs == 0 {
            return Err(TodaError::InvalidParameter("jobs must be at least 1".into()).into());
        }
        Ok(())
    }

    fn dt_ref(&self) -> f64 {
        self.dt_ref
            .unwrap_or_else(|| self.dts.iter().copied().fold(f64::INFINITY, f64::min) / 10.0)
    }
}

/// Reference data and metric for one (initial data, T, region).
#[derive(Debug, Clone)]
struct RegionReference {
    region: RegionSpec,
    a_ref: Vec<f64>,
    b_ref: Vec<f64>,
    metric: MetricKind,
    source: ReferenceSource,
}

/// Everything shared by the cells of one (initial data, T) pair.
#[derive(Debug, Clone)]
struct Case {
    id: InitialDataKind,
    t_final: f64,
    window: IndexWindow,
    references: Vec<RegionReference>,
}

fn region_specs(matrix: &BenchmarkMatrix, id: &InitialDataKind, t_final: f64) -> Result<Vec<RegionSpec>> {
    let s_max = spectrum_of(id, DEFAULT_SPECTRAL_HALF_WIDTH)?.s_max;
    matrix
        .regions
        .iter()
        .map(|kind| match kind {
            RegionKind::Soliton => soliton_region_with(t_final, s_max, matrix.soliton_rule),
            RegionKind::Dispersive => dispersive_region(t_final),
        })
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

fn external_path(dir: &Path, id: &InitialDataKind, t_final: f64) -> PathBuf {
    dir.join(format!("{id}_T{t_final}.csv"))
}

fn from_solution(solution: &ReferenceSolution, region: RegionSpec, path: Option<&Path>) -> Result<RegionReference> {
    let (a_ref, b_ref) = solution.restrict(&region).map_err(|e| match path {
        Some(p) => BenchError::ReferenceCoverage {
            path: p.to_path_buf(),
            lo: region.lo(),
            hi: region.hi(),
        },
        None => e.into(),
    })?;
    Ok(RegionReference {
        region,
        a_ref,
        b_ref,
        metric: MetricKind::Relative,
        source: solution.source,
    })
}

fn build_case(matrix: &BenchmarkMatrix, id: InitialDataKind, t_final: f64) -> Result<Case> {
    let specs = region_specs(matrix, &id, t_final)?;
    let window = reference_window(&id, t_final, &specs)?;

    let references = if let InitialDataKind::PureS { kappa } = id {
        // the exact trajectory is available; in the dispersive region it is the
        // background to machine precision, so only an absolute error is meaningful
        specs
            .iter()
            .map(|&region| {
                let mut r = from_solution(&pures_reference(t_final, &region, kappa)?, region, None)?;
                if region.kind == RegionKind::Dispersive {
                    r.metric = MetricKind::Absolute;
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let external = match &matrix.reference_policy {
            ReferencePolicy::ExternalDir(dir) => {
                let path = external_path(dir, &id, t_final);
                path.exists().then_some(path)
            }
            ReferencePolicy::Auto => None,
        };
        match external {
            Some(path) => {
                let solution = load_reference_csv(&path)?;
                specs
                    .iter()
                    .map(|&region| from_solution(&solution, region, Some(&path)))
                    .collect::<Result<Vec<_>>>()?
            }
            None => {
                let solutions =
                    fine_references(&id, t_final, &specs, matrix.dt_ref(), matrix.reference_tolerance)?;
                solutions
                    .iter()
                    .zip(&specs)
                    .map(|(s, &region)| from_solution(s, region, None))
                    .collect::<Result<Vec<_>>>()?
            }
        }
    };
    Ok(Case {
        id,
        t_final,
        window,
        references,
    })
}

/// Final state of one run, or `None` when it blew up.
fn run_cell(case: &Case, method: MethodKind, dt: f64) -> Result<Option<LatticeStateAB>> {
    let config = StepperConfig::new(method, dt, case.t_final)?;
    let mut prop = Propagator::new(method, &make_id(&case.id, case.window), dt)?;
    match prop.advance(config.steps()) {
        Ok(()) => Ok(Some(prop.state_ab()?)),
        Err(TodaError::Diverged { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn score(state: Option<&LatticeStateAB>, reference: &RegionReference) -> Result<(f64, f64, MetricKind, Status)> {
    let Some(state) = state else {
        return Ok((f64::INFINITY, f64::INFINITY, reference.metric, Status::Diverged));
    };
    let (a, b) = state.restrict(reference.region.window());
    let d = DEFAULT_SORT_FRACTION;
    let absolute = || -> Result<(f64, f64)> {
        Ok((absolute_error(&a, &reference.a_ref, d)?, absolute_error(&b, &reference.b_ref, d)?))
    };
    let (err_a, err_b, metric) = match reference.metric {
        MetricKind::Absolute => {
            let (ea, eb) = absolute()?;
            (ea, eb, MetricKind::Absolute)
        }
        MetricKind::Relative => {
            let ea = relative_error(&a, &reference.a_ref, 0.5, d);
            let eb = relative_error(&b, &reference.b_ref, 0.0, d);
            match (ea, eb) {
                (Ok(ea), Ok(eb)) => (ea, eb, MetricKind::Relative),
                (Err(TodaError::DegenerateReference), _) | (_, Err(TodaError::DegenerateReference)) => {
                    let (ea, eb) = absolute()?;
                    (ea, eb, MetricKind::Absolute)
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            }
        }
    };
    // a run can stay finite yet be meaningless; only non-finite values count as divergence
    Ok((err_a, err_b, metric, Status::Ok))
}

/// Runs every cell of `matrix`.
///
/// Rows are ordered by initial data, final time, region, method and time step,
/// following the order of the matrix lists, independently of `jobs`. A run
/// that blows up yields rows with status diverged and infinite errors; a
/// reference that cannot be built fails the whole call.
pub fn run_benchmark(matrix: &BenchmarkMatrix) -> Result<BenchTable> {
    matrix.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(matrix.jobs)
        .build()
        .map_err(|e| BenchError::ThreadPool(e.to_string()))?;

    pool.install(|| {
        let pairs: Vec<(InitialDataKind, f64)> = matrix
            .ids
            .iter()
            .flat_map(|&id| matrix.t_finals.iter().map(move |&t| (id, t)))
            .collect();
        let cases = pairs
            .par_iter()
            .map(|&(id, t)| build_case(matrix, id, t))
            .collect::<Result<Vec<_>>>()?;

        let runs: Vec<(usize, MethodKind, f64)> = (0..cases.len())
            .flat_map(|c| {
                matrix
                    .methods
                    .iter()
                    .flat_map(move |&m| matrix.dts.iter().map(move |&dt| (c, m, dt)))
            })
            .collect();
        let states = runs
            .par_iter()
            .map(|&(c, m, dt)| run_cell(&cases[c], m, dt))
            .collect::<Result<Vec<_>>>()?;

        let per_case = matrix.methods.len() * matrix.dts.len();
        let mut rows = Vec::with_capacity(matrix.cell_count());
        for (c, case) in cases.iter().enumerate() {
            for reference in &case.references {
                for (k, &(_, method, dt)) in runs[c * per_case..(c + 1) * per_case].iter().enumerate() {
                    let (err_a, err_b, metric, status) = score(states[c * per_case + k].as_ref(), reference)?;
                    rows.push(ErrorReport {
                        method,
                        id: case.id,
                        dt,
                        t_final: case.t_final,
                        region: reference.region,
                        err_a,
                        err_b,
                        metric,
                        status,
                        source: reference.source,
                    });
                }
            }
        }
        Ok(BenchTable::new(rows))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_axes_are_rejected() {
        let mut m = BenchmarkMatrix::desk_scale();
        m.ids.clear();
        assert!(matches!(run_benchmark(&m), Err(BenchError::EmptyAxis("initial data"))));
    }

    #[test]
    fn non_dividing_step_is_rejected() {
        let m = BenchmarkMatrix::new(
            vec![MethodKind::Rk4],
            vec![0.3],
            vec![10.0],
            vec![InitialDataKind::Double],
            vec![RegionKind::Soliton],
        );
        assert!(run_benchmark(&m).is_err());
    }

    #[test]
    fn desk_scale_cell_count() {
        assert_eq!(BenchmarkMatrix::desk_scale().cell_count(), 140);
    }

    #[test]
    fn external_file_name() {
        let p = external_path(Path::new("refs"), &InitialDataKind::Double, 100.0);
        assert_eq!(p, Path::new("refs/double_T100.csv"));
    }
}
