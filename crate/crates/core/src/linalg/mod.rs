//! Dense complex linear algebra for small registers (dimension up to ~64).

mod eigen;
mod matrix;
mod state;

pub use eigen::{
    hermitian_eig, null_projector, numerical_rank, pinv_sqrt, psd_sqrt, spectral_sqrt,
    HermitianEigen, HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOL, PSD_CLAMP,
};
pub use matrix::{kron, DenseMatrix};
pub use num_complex::Complex64;
pub use state::{two_qubit_schmidt_coefficients, StateVector, NORM_TOL};
