use toda_core::initial_data::{soliton_speed, DEFAULT_KAPPA};
use toda_core::metrics::{soliton_region, DEFAULT_SORT_FRACTION};
use toda_core::reference::{fine_reference, fine_references, pures_reference};
use toda_core::spectral::{
    build_jacobi, default_window, eigenvalues_outside_band, measure_soliton_speed,
    DEFAULT_SPECTRAL_HALF_WIDTH,
};
use toda_core::{
    conserved_traces, dispersive_region, exact_soliton, integrate, make_id, relative_error,
    IndexWindow, InitialDataKind, MethodKind, Propagator, StepperConfig,
};

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn traces_are_conserved() {
    let id = InitialDataKind::Double;
    let w = default_window(&id, 20.0).unwrap();
    let init = make_id(&id, w);
    let (s0, e0) = conserved_traces(&init);
    let mut prop = Propagator::new(MethodKind::Rk4, &init, 1e-3).unwrap();
    for _ in 0..20 {
        prop.advance(1000).unwrap();
        let (s, e) = conserved_traces(&prop.state_ab().unwrap());
        assert!((s - s0).abs() <= 1e-8, "trace b drift {}", s - s0);
        assert!((e - e0).abs() <= 1e-8, "second trace drift {}", e - e0);
    }
}

#[test]
fn bound_states_survive_integration() {
    let m = DEFAULT_SPECTRAL_HALF_WIDTH;
    for id in [InitialDataKind::pure_soliton(), InitialDataKind::Double] {
        let w = IndexWindow::symmetric(m + 60);
        let init = make_id(&id, w);
        let before = eigenvalues_outside_band(&build_jacobi(&init, m).unwrap());
        let config = StepperConfig::new(MethodKind::Rk4, 1e-3, 10.0).unwrap();
        let after = integrate(&id, &config, w).unwrap();
        let after = eigenvalues_outside_band(&build_jacobi(&after, m + 50).unwrap());
        assert_eq!(before.len(), after.len(), "{id}");
        assert!(max_diff(&before, &after) <= 1e-8, "{id}: {before:?} vs {after:?}");
    }
}

#[test]
fn measured_speeds() {
    let pures = measure_soliton_speed(&InitialDataKind::pure_soliton(), 20.0, 60.0).unwrap();
    assert!((pures - soliton_speed(DEFAULT_KAPPA)).abs() < 0.02, "{pures}");
    let dirac = measure_soliton_speed(&InitialDataKind::Dirac, 20.0, 60.0).unwrap();
    let expected = 4.0 / 17f64.sqrt().acosh();
    assert!((dirac - expected).abs() < 0.02, "{dirac}");
}

#[test]
fn rk4_tracks_exact_soliton() {
    let id = InitialDataKind::pure_soliton();
    let t = 50.0;
    let w = default_window(&id, t).unwrap();
    let state = integrate(&id, &StepperConfig::new(MethodKind::Rk4, 1e-3, t).unwrap(), w).unwrap();
    let worst = w
        .sites()
        .zip(state.a.iter().zip(&state.b))
        .map(|(n, (a, b))| {
            let (ea, eb) = exact_soliton(DEFAULT_KAPPA, n, t);
            (a - ea).abs().max((b - eb).abs())
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-5, "{worst}");
}

#[test]
fn sv2symp_tracks_exact_soliton() {
    let id = InitialDataKind::pure_soliton();
    let t = 10.0;
    let w = default_window(&id, t).unwrap();
    let state = integrate(&id, &StepperConfig::new(MethodKind::Sv2Symp, 1e-3, t).unwrap(), w).unwrap();
    for (n, a) in w.sites().zip(&state.a) {
        assert!((a - exact_soliton(DEFAULT_KAPPA, n, t).0).abs() <= 1e-4, "site {n}");
    }
}

#[test]
fn rk4_self_convergence_ratio() {
    let id = InitialDataKind::Double;
    let w = IndexWindow::symmetric(80);
    let run = |dt: f64| integrate(&id, &StepperConfig::new(MethodKind::Rk4, dt, 5.0).unwrap(), w).unwrap();
    let (coarse, mid, fine) = (run(0.04), run(0.02), run(0.01));
    let ratio = max_diff(&coarse.a, &mid.a) / max_diff(&mid.a, &fine.a);
    assert!((ratio - 16.0).abs() < 2.0, "{ratio}");
}

#[test]
fn fine_reference_agrees_with_exact_soliton() {
    let t = 50.0;
    let id = InitialDataKind::pure_soliton();
    let region = soliton_region(t, soliton_speed(DEFAULT_KAPPA)).unwrap();
    let fine = fine_reference(&id, t, &region, 1e-4, 1e-9).unwrap();
    let exact = pures_reference(t, &region, DEFAULT_KAPPA).unwrap();
    let ea = relative_error(&fine.a_ref, &exact.a_ref, 0.5, DEFAULT_SORT_FRACTION).unwrap();
    let eb = relative_error(&fine.b_ref, &exact.b_ref, 0.0, DEFAULT_SORT_FRACTION).unwrap();
    assert!(ea <= 1e-8 && eb <= 1e-8, "{ea} {eb}");
}

#[test]
fn fine_reference_step_halving_on_double() {
    // the reference accepts only when dt_ref and dt_ref/2 agree within 10x the tolerance
    let t = 100.0;
    let regions = [dispersive_region(t).unwrap()];
    let refs = fine_references(&InitialDataKind::Double, t, &regions, 1e-4, 1e-10);
    assert!(refs.is_ok(), "{refs:?}");
}

#[test]
fn fine_reference_is_window_independent() {
    let id = InitialDataKind::Double;
    let t = 10.0;
    let w = default_window(&id, t).unwrap();
    let s_max = toda_core::spectral::spectrum_of(&id, DEFAULT_SPECTRAL_HALF_WIDTH).unwrap().s_max;
    let region = soliton_region(t, s_max).unwrap();
    let config = StepperConfig::new(MethodKind::Rk4, 1e-3, t).unwrap();
    let narrow = integrate(&id, &config, w).unwrap();
    let wide = integrate(&id, &config, IndexWindow::symmetric(w.k_max() as u64 + 100)).unwrap();
    let (an, bn) = narrow.restrict(region.window());
    let (aw, bw) = wide.restrict(region.window());
    assert!(max_diff(&an, &aw) <= 1e-13 && max_diff(&bn, &bw) <= 1e-13);
}
