//! Numerical laboratory for the doubly-infinite Toda lattice.
//!
//! The lattice is truncated to a finite [`IndexWindow`] with the background
//! state frozen outside it. States live either in the physical variables
//! `(p, q)` ([`LatticeStatePQ`]) or in the Flaschka variables `(a, b)`
//! ([`LatticeStateAB`]); the two are related by [`flaschka`] and
//! [`inverse_flaschka`].
//!
//! On top of that the crate provides the seven time-stepping variants used in
//! the benchmark ([`integrators`]), the five families of initial data
//! ([`initial_data`]), the Jacobi-operator spectrum ([`spectral`]), the
//! sorted-norm error measures and benchmark regions ([`metrics`]) and the
//! reference solutions errors are measured against ([`reference`]).

pub mod error;
pub mod initial_data;
pub mod integrators;
pub mod lattice;
pub mod metrics;
pub mod reference;
pub mod spectral;

pub use error::{Result, TodaError};
pub use initial_data::{exact_soliton, make_id, InitialDataKind};
pub use integrators::{integrate, MethodKind, Propagator, StepperConfig};
pub use lattice::{
    conserved_traces, flaschka, hamiltonian, inverse_flaschka, rhs_ab, rhs_pq, toda_potential,
    IndexWindow, LatticeStateAB, LatticeStatePQ,
};
pub use metrics::{
    absolute_error, dispersive_region, relative_error, soliton_region, sorted_norm, ErrorReport,
    MetricKind, RegionKind, RegionSpec, Status,
};
pub use reference::{ReferenceSolution, ReferenceSource};
pub use spectral::{JacobiMatrix, SpectralSummary};
