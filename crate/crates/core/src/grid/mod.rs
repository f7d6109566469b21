//! Monotone finite differences on planar domains.

pub mod checks;
pub mod domain;
pub mod eigen;
pub mod scheme;
pub mod reflect;
pub mod solve;
pub mod trace;

pub use domain::{build_domain, build_domain_with, BoundaryPoint, GridDomain, GridField, Link, Shape, StencilSet};
pub use scheme::{discretize_f, discretize_f_with, SchemeKind};
pub use solve::{solve_dirichlet, solve_dirichlet_with, BoundaryData, GridSource, SolveInfo, SolveOptions, Strategy};
pub use eigen::{principal_eigenvalue_grid, principal_eigenvalue_grid_with, GridEigen, GridEigenOptions};
pub use reflect::{critical_position, reflection_gap, reflection_gap_partial, reflection_sweep, GapSample};
pub use trace::{interpolate, neumann_trace, trace_stats, TraceSample, TraceStats};
pub use checks::{comparison_check, small_domain_check, ComparisonReport, PropertyOutcome, SmallDomainOptions, SmallDomainReport};
