//! Star densities in finite graphs and step graphons.
//!
//! The crate covers four layers:
//!
//! * [`graphs`] and [`search`]: exact star counts and degree moments of
//!   threshold graphs, with exhaustive extremal searches for fixed vertex and
//!   edge counts (plus an all-graphs brute force for tiny `n`).
//! * [`graphons`] and [`function`]: step graphons, their degree functionals and
//!   the corner/complement transforms, evaluated either in `f64` or in exact
//!   rationals.
//! * [`bounds`] and [`classc`]: the clique/anticlique upper bound for
//!   `∫ F(d_W)`, goodness checks, and numerical evidence for the convexity-type
//!   conditions that make a function good for every step graphon.
//! * [`thresholds`]: the crossover densities `γ_k` where the clique and
//!   anticlique branches of the star bound coincide.

pub mod bounds;
pub mod classc;
pub mod combin;
pub mod dd;
pub mod error;
pub mod function;
pub mod graphons;
pub mod graphs;
pub mod scalar;
pub mod search;
pub mod thresholds;

pub use bounds::{f_bound, is_good, star_bound, BoundReport, BoundTarget, Goodness, Winner};
pub use classc::{
    c1_check, c1_free_value, c2_check, j_boundary_check, j_eval, membership_scan,
    weighted_power_sum, Condition, JCheck, ScanReport, TripleCheck, Verdict,
};
pub use error::{Error, Result};
pub use function::FunctionOracle;
pub use graphons::{CornerKind, ExtremalKind, StepGraphon};
pub use graphs::{
    complement, count_stars, degree_moment, extremal_witness, quasi_complete, quasi_star,
    CountReport, DegreeSequence, DenseSmallGraph, EdgeSet, Flag, ThresholdGraph,
};
pub use scalar::{Rational, Scalar};
pub use search::{
    brute_force_max, enumerate_threshold, max_over_threshold, BruteForceResult, Objective,
    SearchResult,
};
pub use thresholds::{
    alpha_constant, asymptote_check, crossover, q_eval, q_taylor_coeff, AsymptoteRow,
    CrossoverResult,
};
