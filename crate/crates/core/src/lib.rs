//! Numerical laboratory for overdetermined problems driven by Pucci extremal
//! operators.
//!
//! * [`pucci`]: exact operator evaluation and boundary Hessians.
//! * [`radial`]: closed forms, shooting, ball eigenvalues.
//! * [`grid`]: wide-stencil monotone scheme on 2D domains.
//! * [`sector`]: the spherical-sector operator, its eigenvalue and the
//!   barrier exponent.

pub mod error;
pub mod grid;
pub mod pucci;
pub mod radial;
pub mod sector;
pub mod sparse;

pub use error::{LabError, Result};
pub use pucci::{PucciParams, SymMatrix, Variant};
