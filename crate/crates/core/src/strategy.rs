//! Leader strategies as explicit distributions over independent sets, together with the
//! marginals and effective edge weights the follower sees.

use crate::error::{input_err, Error, Result};
use crate::graph::{coverage_weight, WeightedGraph};
use crate::matroid::Matroid;
use crate::vertex_set::VertexSet;

/// Probability mass deviations up to this are renormalized silently.
pub const RENORMALIZE_TOL: f64 = 1e-6;
/// Deviations up to this count as already normalized.
pub const SUM_TOL: f64 = 1e-9;
const BOUND_TOL: f64 = 1e-12;

/// Finite-support distribution over independent sets of the leader matroid.
#[derive(Clone, Debug, PartialEq)]
pub struct InterdictionStrategy {
    support: Vec<(f64, VertexSet)>,
}

impl InterdictionStrategy {
    /// Validates and canonicalizes a support list: zero-probability entries are dropped,
    /// repeated sets are merged, and a total within [`RENORMALIZE_TOL`] of one is rescaled.
    pub fn new(leader: &Matroid, support: Vec<(f64, VertexSet)>) -> Result<Self> {
        let mut merged: Vec<(f64, VertexSet)> = Vec::with_capacity(support.len());
        for (p, s) in support {
            if !p.is_finite() || p < 0.0 || p > 1.0 + RENORMALIZE_TOL {
                return input_err(format!("probability {p} for set {s:?} is outside [0,1]"));
            }
            if !leader.is_independent(&s)? {
                return input_err(format!("strategy set {s:?} is not independent for the leader"));
            }
            if p == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|(_, t)| *t == s) {
                Some(entry) => entry.0 += p,
                None => merged.push((p, s)),
            }
        }
        let total: f64 = merged.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > RENORMALIZE_TOL {
            return input_err(format!("strategy probabilities sum to {total}, expected 1"));
        }
        if (total - 1.0).abs() > SUM_TOL {
            for entry in &mut merged {
                entry.0 /= total;
            }
        }
        Ok(InterdictionStrategy { support: merged })
    }

    /// The strategy that never interdicts anything.
    pub fn null() -> Self {
        InterdictionStrategy {
            support: vec![(1.0, VertexSet::new())],
        }
    }

    pub fn support(&self) -> &[(f64, VertexSet)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Per-vertex interdiction probabilities `q_v`.
    pub fn vertex_marginals(&self, n: usize) -> Vec<f64> {
        let mut q = vec![0.0; n];
        for (p, s) in &self.support {
            for v in s.iter().filter(|&v| v < n) {
                q[v] += p;
            }
        }
        q
    }
}

/// Vertex marginals `q_v` and, for every graph edge `uv`, the joint marginal `q_uv`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseMarginals {
    q: Vec<f64>,
    q_pair: Vec<f64>,
}

impl PairwiseMarginals {
    /// Checks `0 <= q_v <= 1` and `max(0, q_u+q_v-1) <= q_uv <= min(q_u, q_v)`.
    pub fn new(g: &WeightedGraph, q: Vec<f64>, q_pair: Vec<f64>) -> Result<Self> {
        if q.len() != g.vertex_count() || q_pair.len() != g.edge_count() {
            return input_err("marginal vectors do not match graph dimensions");
        }
        if let Some(v) = q.iter().position(|&x| !(-BOUND_TOL..=1.0 + BOUND_TOL).contains(&x)) {
            return input_err(format!("vertex marginal q_{v} = {} outside [0,1]", q[v]));
        }
        let pm = PairwiseMarginals { q, q_pair };
        pm.check_pairs(g)?;
        Ok(pm)
    }

    fn check_pairs(&self, g: &WeightedGraph) -> Result<()> {
        for (idx, e) in g.edges().iter().enumerate() {
            let (qu, qv, quv) = (self.q[e.u], self.q[e.v], self.q_pair[idx]);
            let lo = (qu + qv - 1.0).max(0.0);
            let hi = qu.min(qv);
            if quv < lo - BOUND_TOL || quv > hi + BOUND_TOL {
                return Err(Error::InvalidMarginals {
                    edge: idx,
                    detail: format!("q_uv = {quv} outside [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Joint marginals, indexed like `g.edges()`.
    pub fn q_pair(&self) -> &[f64] {
        &self.q_pair
    }
}

pub fn marginals_of(g: &WeightedGraph, pi: &InterdictionStrategy) -> PairwiseMarginals {
    let q = pi.vertex_marginals(g.vertex_count());
    let q_pair = g
        .edges()
        .iter()
        .map(|e| {
            pi.support
                .iter()
                .filter(|(_, s)| s.contains(e.u) && s.contains(e.v))
                .map(|(p, _)| p)
                .sum()
        })
        .collect();
    PairwiseMarginals { q, q_pair }
}

/// Discounted weights of one edge `uv`: `w(1-q_u)`, `w(1-q_v)`, `w(1-q_uv)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeWeights {
    pub u_side: f64,
    pub v_side: f64,
    pub both: f64,
}

impl EdgeWeights {
    /// Coefficient of the both-endpoints term; nonpositive for weights built from a
    /// genuine distribution.
    #[inline]
    pub fn joint_coefficient(&self) -> f64 {
        self.both - self.u_side - self.v_side
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveWeights {
    edges: Vec<EdgeWeights>,
}

impl EffectiveWeights {
    /// Wraps raw per-edge weights without any validation. Meant for fault injection
    /// and tests; solver entry points expect weights from [`effective_weights`].
    pub fn from_raw(edges: Vec<EdgeWeights>) -> Self {
        EffectiveWeights { edges }
    }

    pub fn edges(&self) -> &[EdgeWeights] {
        &self.edges
    }

    /// Edges whose joint coefficient is positive beyond rounding noise.
    pub fn joint_coefficient_violations(&self) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, w)| w.joint_coefficient() > BOUND_TOL * (1.0 + w.both.abs()))
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn effective_weights(g: &WeightedGraph, pm: &PairwiseMarginals) -> Result<EffectiveWeights> {
    if pm.q.len() != g.vertex_count() || pm.q_pair.len() != g.edge_count() {
        return input_err("marginals do not match the graph");
    }
    pm.check_pairs(g)?;
    let edges: Vec<EdgeWeights> = g
        .edges()
        .iter()
        .zip(&pm.q_pair)
        .map(|(e, &quv)| EdgeWeights {
            u_side: e.w * (1.0 - pm.q[e.u]),
            v_side: e.w * (1.0 - pm.q[e.v]),
            both: e.w * (1.0 - quv),
        })
        .collect();
    let ew = EffectiveWeights { edges };
    if let Some(&idx) = ew.joint_coefficient_violations().first() {
        return Err(Error::InvalidMarginals {
            edge: idx,
            detail: format!("joint coefficient {} is positive", ew.edges[idx].joint_coefficient()),
        });
    }
    Ok(ew)
}

/// Expected weight the follower collects by attacking `x` against `pi`:
/// `sum_i p_i * coverage(x \ S_i)`.
pub fn expected_payoff(g: &WeightedGraph, pi: &InterdictionStrategy, x: &VertexSet) -> f64 {
    let direct: f64 = pi
        .support
        .iter()
        .map(|(p, s)| p * coverage_weight(g, &x.difference(s)))
        .sum();
    debug_assert!({
        let ew = effective_weights(g, &marginals_of(g, pi)).expect("valid strategy");
        let closed = expected_payoff_closed_form(g, &ew, x);
        (closed - direct).abs() <= 1e-9 * (1.0 + g.total_weight())
    });
    direct
}

/// The same payoff through effective weights:
/// `sum_e [x_u w^u + x_v w^v + x_u x_v (w^uv - w^u - w^v)]`.
pub fn expected_payoff_closed_form(g: &WeightedGraph, ew: &EffectiveWeights, x: &VertexSet) -> f64 {
    g.edges()
        .iter()
        .zip(ew.edges())
        .map(|(e, w)| {
            let (xu, xv) = (x.contains(e.u), x.contains(e.v));
            let mut t = 0.0;
            if xu {
                t += w.u_side;
            }
            if xv {
                t += w.v_side;
            }
            if xu && xv {
                t += w.joint_coefficient();
            }
            t
        })
        .sum()
}
