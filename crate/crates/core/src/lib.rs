//! Bloch-matrix entanglement toolkit: the modified Bloch norm (MBN) measure,
//! negativity, bound-entangled state constructors, noise dynamics, and
//! shot-noise tomography experiments.

pub mod basis;
pub mod bloch;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod state;
pub mod statefile;
pub mod tomography;

pub use basis::{gell_mann_basis, pauli_string_basis, GeneratorBasis};
pub use bloch::{
    cm_value, decompose, gcm_value, ibm_threshold, mbn, mbn_default, modified_bloch, negativity,
    violation, BlochDecomposition, IbmParams, ModifiedBlochMatrix,
};
pub use catalog::CatalogState;
pub use dynamics::{
    apply_channel, dephasing_channel, esd_time, esd_time_refined, integrate, plateau_value, sweep,
    DissipatorForm, Evolution, KrausChannel, LindbladModel, Measure, TimeSeries,
};
pub use error::{MbnError, Result};
pub use matrix::{CMatrix, CVector};
pub use state::{partial_trace, partial_transpose, Bipartition, DensityMatrix, Part};
pub use statefile::StateFile;
pub use tomography::{
    error_experiment, histogram, linear_inversion, simulate_expectation, TomoResult,
};
