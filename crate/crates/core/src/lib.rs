//! Symbolic differential geometry on the tangent bundle: horizontal lifts
//! of affine connections, cross-sections, and a seeded sampling verifier
//! for the identities relating them.
//!
//! The crate is `no_std` + `alloc`; everything that touches files or a
//! terminal lives in the companion `hlift` crate.

#![no_std]

extern crate alloc;

pub mod bundle;
pub mod expr;
pub mod faults;
pub mod geometry;
pub mod manifold;
pub mod sample;
pub mod section;
pub mod tensor;
pub mod verify;
pub mod workspace;

pub use bundle::{
    bundle_covariant_derivative, bundle_curvature, horizontal_lift_connection,
    horizontal_lift_metric, horizontal_lift_vector, vertical_lift, BundleConnection,
    TangentBundle,
};
pub use expr::{BinaryOp, EvalError, Expr, Point, UnaryOp};
pub use faults::{Faults, Mutation};
pub use geometry::{
    christoffel_from_metric, covariant_derivative, curvature, det, inverse,
    is_infinitesimal_affine, lie_derivative_connection, lie_derivative_tensor, GeometryError,
};
pub use manifold::{Chart, ChartError, Manifold, VectorField};
pub use sample::{
    equivalent, max_residual, sample_points, vanishes, EquivConfig, Residual, SamplingDomain,
    Unsampleable,
};
pub use section::{
    adapted_frame, AdaptedFrame, CurvatureDecomposition, CurvatureTangencyVerdict,
    GaussDecomposition, Section, SectionError, TotallyGeodesicVerdict,
};
pub use tensor::{Connection, Tensor, Variance};
pub use verify::{
    run_suite, Anchor, CheckResult, Diagnostic, SuiteConfig, SuiteError, VerificationReport,
};
pub use workspace::{ConnectionSource, ManifoldEntry, Workspace};
