//! Spectral problem on a spherical sector and the barrier `w = r^gamma psi`.
//!
//! Supported dimensions are `N = 2` and `N = 3`.

mod barrier;
mod eigen;
mod gamma;
mod mesh;
mod operator;

pub use barrier::{barrier_check, barrier_eval, interpolate, BarrierCheck};
pub use eigen::{
    extrapolated_eigenvalue, richardson_limit, sector_principal_eigenvalue, sector_principal_eigenvalue_with,
    Extrapolation, SectorEigen, SectorEigenOptions, EXTRAPOLATION_DELTAS, POSITIVITY_THRESHOLD,
};
pub use gamma::{gamma_exponent, gamma_exponent_with, gamma_root, GammaOptions, GammaResult};
pub use mesh::{
    box_margin, coefficients, coefficients_at, removed_measure, NodeCoefficients, SectorField, SectorMesh,
    MAX_SPACING,
};
pub use operator::{assemble_h, SectorOperatorParams};
