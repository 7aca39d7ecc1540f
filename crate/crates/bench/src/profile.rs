use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use toda_core::spectral::default_window;
use toda_core::{integrate, IndexWindow, InitialDataKind, LatticeStateAB, MethodKind, StepperConfig};

use crate::error::{BenchError, Result};

/// Integrates `id` to `t_final` on `window`, or on the default window for
/// `id` when none is given.
pub fn simulate(
    id: &InitialDataKind,
    method: MethodKind,
    dt: f64,
    t_final: f64,
    window: Option<IndexWindow>,
) -> Result<LatticeStateAB> {
    let config = StepperConfig::new(method, dt, t_final)?;
    let window = match window {
        Some(w) => w,
        None => default_window(id, t_final)?,
    };
    Ok(integrate(id, &config, window)?)
}

/// `n,a_n,b_n` rows over the whole window under a `# toda-profile` header.
/// The rows use the reference-file layout.
pub fn profile_to_csv(state: &LatticeStateAB, id: &InitialDataKind, method: MethodKind, dt: f64) -> String {
    let mut out = format!(
        "# toda-profile id={id} method={method} dt={dt} T={}\n",
        state.time
    );
    for (n, (a, b)) in state.window.sites().zip(state.a.iter().zip(&state.b)) {
        let _ = writeln!(out, "{n},{a:e},{b:e}");
    }
    out
}

pub fn emit_profile(
    id: &InitialDataKind,
    method: MethodKind,
    dt: f64,
    t_final: f64,
    window: Option<IndexWindow>,
    out: &Path,
) -> Result<()> {
    let state = simulate(id, method, dt, t_final, window)?;
    fs::write(out, profile_to_csv(&state, id, method, dt)).map_err(|source| BenchError::Io {
        path: out.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use toda_core::make_id;
    use toda_core::reference::parse_reference_csv;

    #[test]
    fn zero_time_profile_is_initial_data() {
        let w = IndexWindow::symmetric(30);
        let id = InitialDataKind::Quad;
        let state = simulate(&id, MethodKind::Rk4, 0.01, 0.0, Some(w)).unwrap();
        assert_eq!(state, make_id(&id, w));
    }

    #[test]
    fn profile_reloads_as_reference() {
        let w = IndexWindow::symmetric(20);
        let id = InitialDataKind::Double;
        let state = simulate(&id, MethodKind::Sv2Symp, 0.01, 1.0, Some(w)).unwrap();
        let text = profile_to_csv(&state, &id, MethodKind::Sv2Symp, 0.01);
        let (_, rows) = text.split_once('\n').unwrap();
        let adjusted = format!("# toda-reference id=double T=1 source=fine-integration\n{rows}");
        let reloaded = parse_reference_csv(&adjusted, Path::new("profile.csv")).unwrap();
        assert_eq!(reloaded.a_ref, state.a);
        assert_eq!(reloaded.b_ref, state.b);
        assert_eq!(reloaded.sites, w);
    }
}
