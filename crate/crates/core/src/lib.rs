//! Entanglement dynamics of two V-type three-level atoms in a dissipative
//! cavity, with a prior weak measurement and a post-evolution measurement
//! reversal.
//!
//! The crate is organized along the computation:
//!
//! * [`dynamics`]: closed-form amplitudes in the single-excitation sector.
//! * [`measurement`]: weak measurement, density assembly, reversal.
//! * [`entanglement`]: partial transpose and negativity.
//! * [`oracle`]: independent RK4 integration of the memory-kernel equation.
//! * [`scenario`] and [`sweep`]: config parsing, presets, CSV output.

// `!(x <= bound)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod dynamics;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod measurement;
pub mod oracle;
pub mod scenario;
pub mod sweep;

pub use density::DensityMatrix9;
pub use dynamics::{
    collective_root, evolve_amplitudes, mixing_coefficients, propagator, AmplitudeSet, Branch,
    PropagatorCoefficients, SystemParams, C64,
};
pub use entanglement::{negativity, partial_transpose, Negativity};
pub use error::{Error, Result};
pub use measurement::{
    apply_reversal, apply_weak_measurement, assemble_density, success_probability,
    MeasurementStrengths, Normalization,
};
pub use scenario::{parse_scenario, preset, ScenarioConfig};
pub use sweep::{emit_csv, run, run_grid, run_preset, run_time_series, Pipeline, Table};
