//! Quantum noise budgets for optomechanical position detection through a
//! cavity that contains a degenerate parametric amplifier.
//!
//! All rates are in units of the signal-cavity linewidth `κ_s`. The
//! [`lti`] module is a generic frequency-domain engine for linear Langevin
//! systems; [`device`] builds the three device models on top of it;
//! [`metrics`] extracts imprecision, back-action and added noise; [`design`]
//! locates optimal working points; [`io`] handles configs, CSV output and run
//! manifests for the command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod device;
pub mod error;
pub mod grid;
pub mod io;
pub mod lti;
pub mod metrics;
pub mod minimize;
pub mod stability;

pub use device::{build_model, DeviceParams, DeviceSystem, ModelKind, PhotonBudget};
pub use error::{Error, Result};
pub use grid::SpectrumGrid;
pub use lti::{LinearLangevinSystem, NoisePort, OutputTap, SpectrumSeries};
pub use metrics::NoiseBudget;
