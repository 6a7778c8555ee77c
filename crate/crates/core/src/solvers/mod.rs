//! Fixed-point theorems as hypothesis-checked Picard iterations.
//!
//! [`check_hypotheses`] re-verifies the ambient space, the side conditions on
//! the constants and the contraction inequality over every pair;
//! [`solve`] then iterates and emits a [`FixedPointCertificate`].

mod diagnostics;
mod hypotheses;
mod picard;
mod problem;
mod profile;

use thiserror::Error;

use crate::space::SpaceError;

pub use diagnostics::{
    cauchy_bound_check, cauchy_diagnostic, distinct_orbit_check, limit_set, pair_distances, rate_certificate,
    window_start, BoundMode, BoundViolation, CauchyBoundParams, CauchyDiagnostic, DiagnosticMode, LimitSet,
    OrbitDistinctness, RateVerdict, TRACE_ABS_TOL, TRACE_REL_TOL,
};
pub use hypotheses::{
    check_hypotheses, contraction_bound, estimate_constants, fit_reich, gamma2, pair_terms, reich_alpha,
    scalar_violations, ConditionViolation, Estimate, HypothesisReport, PairTerms, REICH_GRID_STEP, STRICT_MARGIN,
};
pub use picard::{
    picard_orbit, solve, FixedPointCertificate, IterOptions, IterationTrace, LagSeries, StopReason, Uniqueness,
};
pub use problem::{AffineMap, Geometry, Point, Problem, Scale, SelfMap};
pub use profile::{validate_psi, Constants, ContractionProfile, PsiFunction, Theorem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("map has {found} images but the space has {expected} points")]
    MapLength { expected: usize, found: usize },
    #[error("image {image} of point {point} is out of range for {n} points")]
    ImageOutOfRange { point: usize, image: usize, n: usize },
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("map sends {x} to {image}, outside [{lo}, {hi}]")]
    NotSelfMap { x: f64, image: f64, lo: f64, hi: f64 },
    #[error("order v must be positive")]
    BadOrder,
    #[error("coefficient s = {0} must be finite and at least 1")]
    BadScale(f64),
    #[error("theta table has {found} points, space has {expected}")]
    ThetaSize { expected: usize, found: usize },
    #[error("`{0}` is not a point of the space")]
    BadPoint(String),
    #[error("lag must be positive")]
    BadLag,
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("malformed psi `{0}`, expected t0:v0,t1:v1,...,slope:r")]
    BadPsi(String),
    #[error("unknown mode `{0}`, expected printed or corrected")]
    BadMode(String),
    #[error("constants do not match theorem {0}")]
    ConstantsMismatch(Theorem),
    #[error("invalid bound parameters c={c} k1={k1} k2={k2}")]
    BadBoundParams { c: f64, k1: f64, k2: f64 },
    #[error("{0} needs a finite space")]
    NeedsFiniteSpace(&'static str),
    #[error("hypotheses rejected:\n{0}")]
    HypothesesRejected(Box<HypothesisReport>),
    #[error(transparent)]
    Space(#[from] SpaceError),
}
