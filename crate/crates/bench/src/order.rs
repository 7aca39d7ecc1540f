use toda_core::reference::profile_discrepancy;
use toda_core::spectral::default_window;
use toda_core::{integrate, InitialDataKind, MethodKind, StepperConfig};

use crate::error::{BenchError, Result};

/// Error of one run against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub dt: f64,
    pub error: f64,
}

fn check_steps(dts: &[f64]) -> Result<()> {
    let decreasing = dts.windows(2).all(|w| w[1] < w[0]);
    if dts.len() < 3 || !decreasing || dts.iter().any(|&dt| !(dt > 0.0)) {
        return Err(BenchError::BadStepSequence(dts.to_vec()));
    }
    Ok(())
}

/// Errors of `method` at each of `dts` against rk4 at `dt_ref`, measured over
/// the whole default window as the larger of the sorted relative a- and
/// b-errors.
pub fn convergence_errors(
    method: MethodKind,
    id: &InitialDataKind,
    t_final: f64,
    dts: &[f64],
    dt_ref: f64,
) -> Result<Vec<ConvergencePoint>> {
    check_steps(dts)?;
    if !(t_final > 0.0) {
        return Err(toda_core::TodaError::InvalidParameter(format!(
            "final time must be positive, got {t_final}"
        ))
        .into());
    }
    let window = default_window(id, t_final)?;
    let reference = integrate(id, &StepperConfig::new(MethodKind::Rk4, dt_ref, t_final)?, window)?;
    dts.iter()
        .map(|&dt| {
            let state = integrate(id, &StepperConfig::new(method, dt, t_final)?, window)?;
            let error = profile_discrepancy(&state.a, &state.b, &reference.a, &reference.b)?;
            Ok(ConvergencePoint { dt, error })
        })
        .collect()
}

/// Least-squares slope of `log(error)` against `log(dt)`.
pub fn fit_order(points: &[ConvergencePoint]) -> Result<f64> {
    if let Some(p) = points.iter().find(|p| !(p.error > 0.0 && p.error.is_finite())) {
        return Err(BenchError::NoErrorSignal { dt: p.dt, error: p.error });
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.dt.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Observed order of accuracy of `method` on `id` over the step sequence `dts`.
pub fn observed_order(
    method: MethodKind,
    id: &InitialDataKind,
    t_final: f64,
    dts: &[f64],
    dt_ref: f64,
) -> Result<f64> {
    fit_order(&convergence_errors(method, id, t_final, dts, dt_ref)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let points: Vec<ConvergencePoint> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&dt| ConvergencePoint { dt, error: 3.0 * dt * dt * dt })
            .collect();
        assert!((fit_order(&points).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn step_sequence_preconditions() {
        let id = InitialDataKind::Double;
        assert!(observed_order(MethodKind::Rk4, &id, 10.0, &[0.04, 0.02], 1e-4).is_err());
        assert!(observed_order(MethodKind::Rk4, &id, 10.0, &[0.01, 0.02, 0.04], 1e-4).is_err());
        assert!(observed_order(MethodKind::Rk4, &id, 0.0, &[0.04, 0.02, 0.01], 1e-4).is_err());
    }

    #[test]
    fn zero_error_cannot_be_fitted() {
        let points = [
            ConvergencePoint { dt: 0.1, error: 1.0 },
            ConvergencePoint { dt: 0.05, error: 0.0 },
        ];
        assert!(matches!(fit_order(&points), Err(BenchError::NoErrorSignal { .. })));
    }
}
