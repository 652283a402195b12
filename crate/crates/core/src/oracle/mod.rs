//! Exponential-time references: exhaustive enumeration of independent sets, the
//! follower's exact best response, the exact leader optimum as a matrix game, the
//! complete-graph gap family and an exact rational simplex.

mod gap;
mod matrix_game;
mod rational;

pub use gap::{gap_instance, gap_values};
pub use matrix_game::{exact_rmvci_matrix_game, GameMatrix};
pub use rational::{rational_simplex_reference, RationalSolution, RATIONAL_MAX_CONSTRAINTS, RATIONAL_MAX_VARS};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matroid::{Matroid, ENUMERATION_MAX};
use crate::strategy::{effective_weights, expected_payoff, marginals_of, InterdictionStrategy};
use crate::vertex_set::VertexSet;

/// Most independent sets any enumeration will materialize.
pub const SET_LIMIT: usize = 1 << 22;

fn independent_masks(m: &Matroid) -> Result<Vec<u64>> {
    let n = m.ground_size();
    if n > ENUMERATION_MAX {
        return Err(Error::Capacity {
            what: "ground set for enumeration",
            size: n,
            limit: ENUMERATION_MAX,
        });
    }
    let mut masks = m.independent_masks(SET_LIMIT).ok_or(Error::Capacity {
        what: "independent set count",
        size: SET_LIMIT + 1,
        limit: SET_LIMIT,
    })?;
    masks.sort_unstable_by(|&a, &b| {
        a.count_ones().cmp(&b.count_ones()).then_with(|| {
            if a == b {
                std::cmp::Ordering::Equal
            } else {
                // the set owning the lowest differing id comes first
                let low = (a ^ b) & (a ^ b).wrapping_neg();
                if a & low != 0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            }
        })
    });
    Ok(masks)
}

/// Every independent set, smallest first and lexicographic within a size.
pub fn enumerate_independent_sets(m: &Matroid) -> Result<Vec<VertexSet>> {
    Ok(independent_masks(m)?.into_iter().map(VertexSet::from_mask).collect())
}

/// Exact follower best response by enumeration. Near-ties (within `1e-12` relative)
/// go to the smaller set, then the lexicographically smaller one.
pub fn solve_follower_ilp_bruteforce(
    g: &WeightedGraph,
    pi: &InterdictionStrategy,
    mf: &Matroid,
) -> Result<(VertexSet, f64)> {
    if mf.ground_size() != g.vertex_count() {
        return Err(Error::Input("follower matroid does not match the graph".into()));
    }
    let ew = effective_weights(g, &marginals_of(g, pi))?;
    let edges: Vec<(u64, u64, f64, f64, f64)> = g
        .edges()
        .iter()
        .zip(ew.edges())
        .map(|(e, w)| (1u64 << e.u, 1u64 << e.v, w.u_side, w.v_side, w.joint_coefficient()))
        .collect();
    let value = |mask: u64| -> f64 {
        let mut t = 0.0;
        for &(bu, bv, wu, wv, c) in &edges {
            let (a, b) = (mask & bu != 0, mask & bv != 0);
            if a {
                t += wu;
            }
            if b {
                t += wv;
            }
            if a && b {
                t += c;
            }
        }
        t
    };
    let mut best: Option<(u64, f64)> = None;
    for mask in independent_masks(mf)? {
        let v = value(mask);
        if best.is_none_or(|(_, b)| v > b + 1e-12 * (1.0 + b.abs())) {
            best = Some((mask, v));
        }
    }
    let set = VertexSet::from_mask(best.map_or(0, |(m, _)| m));
    let exact = expected_payoff(g, pi, &set);
    Ok((set, exact))
}
