//! Quantum information diode in a DMI-coupled magnonic crystal.
//!
//! [`model`] holds the nonreciprocal dispersion and Bragg mode construction,
//! [`otoc`] the left/right OTOC series and the lattice propagator OTOC,
//! [`rectify`] the rectification coefficient, and [`oracle`] an exact
//! one-magnon diagonalization that cross-checks the closed forms.

pub mod error;
pub mod model;
pub mod oracle;
pub mod otoc;
pub mod rectify;

pub use error::{Error, Result};
pub use model::{
    bragg_wavevector, build_mode_set, dispersion_1d, dispersion_2d, dmi_from_field, group_velocity_1d, left_wavevector,
    max_time, suppression_rate, Branch, Mode, ModeSet, ModelParams,
};
pub use otoc::{
    lattice_propagator_otoc, omega_sum, onset_time, otoc_series, OtocSeries, PropagatorSeries, Side, TimeGrid,
};
pub use rectify::{rectification_coefficient, sweep_rectification, QuadratureSettings, RectificationResult, SweepRow};
