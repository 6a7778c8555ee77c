//! Exhaustive axiom verification for finite generalized metric spaces and
//! certified Picard iteration for the fixed-point theorems that hold in them.
//!
//! * [`space`]: distance tables, axiom profiles, the polygon-inequality verifier.
//! * [`classify`]: minimal coefficients, orders and class memberships.
//! * [`solvers`]: hypothesis checks, Picard orbits, certificates, diagnostics.
//! * [`search`]: seeded instance generation and separation-witness search.
//! * [`format`]: the line-oriented space and map file formats.

pub mod classify;
pub mod format;
pub mod search;
pub mod solvers;
pub mod space;

pub use space::{
    build_paper_example, combine_spaces, polygon_slack, verify_axioms, verify_axioms_with,
    zero_offdiag_check, AxiomId, AxiomProfile, Coefficient, DistanceTable, Kind, Outcome,
    SpaceError, ThetaTable, VerificationReport, VerifyOptions, ViolationWitness,
};
pub use classify::{hierarchy_profile, min_coefficient, min_order, min_theta, ClassifyError, Family, HierarchyProfile, MinOrder};
pub use format::{parse_map, parse_space, write_map, write_space, MapFile, ParseError, SpaceFile};
pub use search::{
    random_contraction, random_space, search_separation, Contraction, SearchError, SearchGoal, SearchOutcome,
    SearchTarget, Witness,
};
pub use solvers::{
    check_hypotheses, estimate_constants, picard_orbit, solve, AffineMap, ContractionProfile, Estimate,
    FixedPointCertificate, HypothesisReport, IterOptions, Point, Problem, PsiFunction, Scale, SolverError, Theorem,
};
