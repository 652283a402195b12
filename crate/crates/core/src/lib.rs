//! Randomized max-vertex-cover interdiction under matroid constraints.
//!
//! A leader picks a probability distribution over independent sets of one matroid and
//! removes the chosen vertices; a follower then picks an independent set of a second
//! matroid and collects the weight of the surviving edges it covers. This crate
//! computes near-optimal leader strategies together with certified bounds, plus the
//! exact (exponential-time) references used to check them.

pub mod error;
pub mod follower;
pub mod graph;
pub mod leader;
pub mod lp;
pub mod matroid;
mod options;
pub mod oracle;
pub mod random;
pub mod strategy;
pub mod vertex_set;

pub use error::{Error, Result};
pub use follower::{
    approx_follower, approx_follower_with, eval_f, eval_l, pipage_round, pipage_round_traced,
    solve_follower_lp, solve_follower_lp_with, FollowerSolution, PipageStep,
};
pub use graph::{coverage_weight, Edge, WeightedGraph};
pub use leader::{
    caratheodory_decompose, eval_ltilde, evaluate_theta, solve_leader_relaxed, solve_leader_relaxed_with,
    solve_leader_uniform_dual, solve_rmvci, MarginalStrategy, SolveCertificate, ThetaEstimate,
};
pub use matroid::{Matroid, MatroidKind};
pub use options::SolveOptions;
pub use strategy::{
    effective_weights, expected_payoff, expected_payoff_closed_form, marginals_of, EdgeWeights,
    EffectiveWeights, InterdictionStrategy, PairwiseMarginals,
};
pub use vertex_set::VertexSet;
