//! Time steppers and the trajectory driver.
//!
//! Methods without a `qp` suffix integrate the Flaschka equations for `(a, b)`;
//! `midpointqp`, `rk4qp` and `sv2symp` integrate the physical equations for
//! `(p, q)`. Results are always handed back in Flaschka variables so errors are
//! measured uniformly.

mod steppers;
mod tableau;

use std::fmt;
use std::str::FromStr;

pub use steppers::{
    ab4_run, step_midpoint, step_rk4, step_rkf45, step_sv2symp, AdamsBashforth4, Midpoint, Rk4,
    Rkf45, StormerVerlet, VectorField,
};
pub use tableau::{Ratio, Rkf45Tableau, FEHLBERG_STAGES, FEHLBERG_WEIGHTS};

use crate::error::{Result, TodaError};
use crate::initial_data::{make_id, InitialDataKind};
use crate::lattice::{
    ab_vector_field, flaschka, inverse_flaschka, pq_vector_field, IndexWindow, LatticeStateAB,
    LatticeStatePQ,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    Midpoint,
    MidpointQp,
    Sv2Symp,
    Ab4,
    Rk4,
    Rk4Qp,
    Rkf45,
}

/// Which equations of motion a method advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableSet {
    Flaschka,
    Physical,
}

impl MethodKind {
    pub const ALL: [MethodKind; 7] = [
        MethodKind::Midpoint,
        MethodKind::MidpointQp,
        MethodKind::Sv2Symp,
        MethodKind::Ab4,
        MethodKind::Rk4,
        MethodKind::Rk4Qp,
        MethodKind::Rkf45,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MethodKind::Midpoint => "midpoint",
            MethodKind::MidpointQp => "midpointqp",
            MethodKind::Sv2Symp => "sv2symp",
            MethodKind::Ab4 => "ab4",
            MethodKind::Rk4 => "rk4",
            MethodKind::Rk4Qp => "rk4qp",
            MethodKind::Rkf45 => "rkf45",
        }
    }

    pub fn variables(self) -> VariableSet {
        match self {
            MethodKind::MidpointQp | MethodKind::Sv2Symp | MethodKind::Rk4Qp => {
                VariableSet::Physical
            }
            _ => VariableSet::Flaschka,
        }
    }

    /// Nominal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            MethodKind::Midpoint | MethodKind::MidpointQp | MethodKind::Sv2Symp => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodKind {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| TodaError::InvalidParameter(format!("unknown method '{s}'")))
    }
}

/// Method, step size and final time of one run. The step must divide the
/// final time, so every run takes a whole number of equal steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub method: MethodKind,
    pub dt: f64,
    pub t_final: f64,
}

impl StepperConfig {
    pub fn new(method: MethodKind, dt: f64, t_final: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(TodaError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(TodaError::InvalidParameter(format!(
                "final time must be non-negative, got {t_final}"
            )));
        }
        let n = (t_final / dt).round();
        if (n * dt - t_final).abs() > 1e-12 * t_final.max(dt) {
            return Err(TodaError::InvalidParameter(format!(
                "time step {dt} does not divide final time {t_final}"
            )));
        }
        Ok(Self { method, dt, t_final })
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Midpoint(Midpoint),
    Rk4(Rk4),
    Rkf45(Box<Rkf45>),
    Ab4(AdamsBashforth4),
    Verlet(StormerVerlet),
}

/// Advances one lattice trajectory with a fixed method and step.
///
/// Holds the state in the method's own variable set. Time is computed as
/// `t0 + steps * dt` rather than accumulated.
#[derive(Debug, Clone)]
pub struct Propagator {
    method: MethodKind,
    dt: f64,
    window: IndexWindow,
    t0: f64,
    steps: usize,
    y: Vec<f64>,
    engine: Engine,
}

impl Propagator {
    pub fn new(method: MethodKind, initial: &LatticeStateAB, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(TodaError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let y = match method.variables() {
            VariableSet::Flaschka => initial.to_vector(),
            VariableSet::Physical => inverse_flaschka(initial, 0.0)?.to_vector(),
        };
        let dim = y.len();
        let engine = match method {
            MethodKind::Midpoint | MethodKind::MidpointQp => Engine::Midpoint(Midpoint::new(dim)),
            MethodKind::Rk4 | MethodKind::Rk4Qp => Engine::Rk4(Rk4::new(dim)),
            MethodKind::Rkf45 => Engine::Rkf45(Box::new(Rkf45::new(dim, Rkf45Tableau::fehlberg()))),
            MethodKind::Ab4 => Engine::Ab4(AdamsBashforth4::new(dim)),
            MethodKind::Sv2Symp => Engine::Verlet(StormerVerlet::new(dim / 2)),
        };
        Ok(Self {
            method,
            dt,
            window: initial.window,
            t0: initial.time,
            steps: 0,
            y,
            engine,
        })
    }

    pub fn method(&self) -> MethodKind {
        self.method
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.dt
    }

    /// Takes `n` steps. Stops at the first step that produces a non-finite
    /// value and reports its (1-based, cumulative) index.
    pub fn advance(&mut self, n: usize) -> Result<()> {
        let field: fn(&[f64], &mut [f64]) = match self.method.variables() {
            VariableSet::Flaschka => ab_vector_field,
            VariableSet::Physical => pq_vector_field,
        };
        for _ in 0..n {
            match &mut self.engine {
                Engine::Midpoint(s) => s.step(&mut self.y, self.dt, &field),
                Engine::Rk4(s) => s.step(&mut self.y, self.dt, &field),
                Engine::Rkf45(s) => s.step(&mut self.y, self.dt, &field),
                Engine::Ab4(s) => s.step(&mut self.y, self.dt, &field),
                Engine::Verlet(s) => s.step(&mut self.y, self.dt),
            }
            self.steps += 1;
            if !self.y.iter().all(|v| v.is_finite()) {
                return Err(TodaError::Diverged {
                    step: self.steps,
                    time: self.time(),
                });
            }
        }
        Ok(())
    }

    /// Current state in Flaschka variables.
    pub fn state_ab(&self) -> Result<LatticeStateAB> {
        match self.method.variables() {
            VariableSet::Flaschka => LatticeStateAB::from_vector(self.window, &self.y, self.time()),
            VariableSet::Physical => Ok(flaschka(&self.state_pq()?)),
        }
    }

    /// Current state in physical variables (displacements anchored at
    /// `q_{k_min} = 0` for Flaschka-native methods).
    pub fn state_pq(&self) -> Result<LatticeStatePQ> {
        match self.method.variables() {
            VariableSet::Physical => LatticeStatePQ::from_vector(self.window, &self.y, self.time()),
            VariableSet::Flaschka => inverse_flaschka(&self.state_ab()?, 0.0),
        }
    }
}

/// Builds the initial data on `window`, integrates to `config.t_final` and
/// returns the final state in Flaschka variables.
pub fn integrate(
    id: &InitialDataKind,
    config: &StepperConfig,
    window: IndexWindow,
) -> Result<LatticeStateAB> {
    let initial = make_id(id, window);
    let mut prop = Propagator::new(config.method, &initial, config.dt)?;
    prop.advance(config.steps())?;
    let mut out = prop.state_ab()?;
    out.time = config.t_final;
    Ok(out)
}
