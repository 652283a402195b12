//! The leader's side: the marginal-based surrogate, its minimization over the leader
//! polytope, recovery of an explicit strategy from marginals, and the end-to-end solve.

use crate::error::{input_err, Error, Result};
use crate::follower::{approx_follower_with, ratio};
use crate::graph::WeightedGraph;
use crate::lp::{
    cutting_plane_maximize, face_of, ray_step, separate_matroid_polytope, solve_lp, Cut, LinearProgram,
    LpStatus, Relation, Sense, Separation,
};
use crate::matroid::{Matroid, MatroidKind};
use crate::options::SolveOptions;
use crate::oracle::solve_follower_ilp_bruteforce;
use crate::strategy::{marginals_of, InterdictionStrategy};
use crate::vertex_set::VertexSet;

/// Membership slack accepted for marginal vectors.
const MEMBERSHIP_TOL: f64 = 1e-7;
const FACE_TOL: f64 = 1e-9;
/// Largest acceptable reconstruction error of a decomposition.
pub const DECOMPOSITION_TOL: f64 = 1e-6;
/// Follower sets are enumerated exactly only on ground sets up to this size.
const EXACT_FOLLOWER_MAX_N: usize = 24;

/// Per-vertex interdiction probabilities, a point of the leader's polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalStrategy {
    q: Vec<f64>,
}

impl MarginalStrategy {
    /// Checks `q` against the leader polytope (slack `1e-7`) and clips it into `[0,1]`.
    pub fn new(ml: &Matroid, q: Vec<f64>) -> Result<Self> {
        if q.len() != ml.ground_size() {
            return input_err(format!(
                "marginals have length {}, leader ground set has {}",
                q.len(),
                ml.ground_size()
            ));
        }
        if let Some(v) = q
            .iter()
            .position(|x| !x.is_finite() || *x < -MEMBERSHIP_TOL || *x > 1.0 + MEMBERSHIP_TOL)
        {
            return input_err(format!("marginal q_{v} = {} outside [0,1]", q[v]));
        }
        let q: Vec<f64> = q.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
        if let Separation::Violated(cut) = separate_matroid_polytope(ml, &q, MEMBERSHIP_TOL)? {
            return input_err(format!(
                "marginals violate a rank inequality by {:e}",
                cut.violation(&q)
            ));
        }
        Ok(MarginalStrategy { q })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.q
    }
}

/// `sum_v x_v (1 - q_v) W_v`, the marginal-only surrogate of the follower payoff.
pub fn eval_ltilde(g: &WeightedGraph, q: &[f64], x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * (x[e.u] * (1.0 - q[e.u]) + x[e.v] * (1.0 - q[e.v])))
        .sum()
}

fn check_instance(g: &WeightedGraph, ml: &Matroid, mf: &Matroid) -> Result<()> {
    let n = g.vertex_count();
    if ml.ground_size() != n || mf.ground_size() != n {
        return input_err(format!(
            "matroid ground sets ({} leader, {} follower) must match the {n} graph vertices",
            ml.ground_size(),
            mf.ground_size()
        ));
    }
    Ok(())
}

/// Best follower response to the surrogate at `q`: greedy on `(1 - q_v) W_v`.
fn surrogate_response(mf: &Matroid, degrees: &[f64], q: &[f64]) -> Result<(VertexSet, f64)> {
    let w: Vec<f64> = degrees
        .iter()
        .zip(q)
        .map(|(d, qv)| d * (1.0 - qv.clamp(0.0, 1.0)))
        .collect();
    mf.greedy_max_weight(&w)
}

pub fn solve_leader_relaxed(g: &WeightedGraph, ml: &Matroid, mf: &Matroid) -> Result<(MarginalStrategy, f64)> {
    solve_leader_relaxed_with(g, ml, mf, &SolveOptions::default())
}

/// Minimizes the best surrogate response `max_X sum_{v in X} (1-q_v) W_v` over the
/// leader polytope by constraint generation on the epigraph variable.
pub fn solve_leader_relaxed_with(
    g: &WeightedGraph,
    ml: &Matroid,
    mf: &Matroid,
    opts: &SolveOptions,
) -> Result<(MarginalStrategy, f64)> {
    opts.validate()?;
    check_instance(g, ml, mf)?;
    let n = g.vertex_count();
    let degrees = g.weighted_degrees();
    let t = n;

    let mut objective = vec![0.0; n + 1];
    objective[t] = -1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for v in 0..n {
        lp.set_bounds(v, 0.0, 1.0);
    }
    if let Some(blocks) = ml.blocks() {
        for (block, cap) in blocks {
            if block.len() > cap {
                let mut row = vec![0.0; n + 1];
                block.iter().for_each(|&i| row[i] = 1.0);
                lp.add_constraint(row, Relation::Le, cap as f64);
            }
        }
    }
    let follower_cut = |x: &VertexSet| -> Cut {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[t] = -1.0;
        let mut rhs = 0.0;
        for v in x.iter() {
            coeffs[v] = -degrees[v];
            rhs -= degrees[v];
        }
        Cut { coeffs, rhs }
    };
    let (x0, _) = surrogate_response(mf, &degrees, &vec![0.0; n])?;
    let seed = follower_cut(&x0);
    lp.add_constraint(seed.coeffs, Relation::Le, seed.rhs);

    let cap = (10 * n * (n + g.edge_count())).max(200);
    let outcome = cutting_plane_maximize(lp, cap, |point| {
        let q = &point[..n];
        if let Separation::Violated(cut) = separate_matroid_polytope(ml, q, opts.separation_tol)? {
            let mut coeffs = cut.coeffs;
            coeffs.push(0.0);
            return Ok(vec![Cut { coeffs, rhs: cut.rhs }]);
        }
        let (x, value) = surrogate_response(mf, &degrees, q)?;
        if value - point[t] > opts.leader_tol {
            return Ok(vec![follower_cut(&x)]);
        }
        Ok(vec![])
    })?;
    let q: Vec<f64> = outcome.solution.x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let (_, value) = surrogate_response(mf, &degrees, &q)?;
    Ok((MarginalStrategy::new(ml, q)?, value))
}

/// Same optimum for two uniform matroids through one compact program: the follower's
/// inner maximization is replaced by its dual.
pub fn solve_leader_uniform_dual(g: &WeightedGraph, k_l: usize, k_f: usize) -> Result<(MarginalStrategy, f64)> {
    let n = g.vertex_count();
    if k_l > n || k_f > n {
        return input_err(format!("ranks ({k_l}, {k_f}) exceed the {n} vertices"));
    }
    let degrees = g.weighted_degrees();
    // variables: q_0..q_{n-1}, mu, nu_0..nu_{n-1}
    let mu = n;
    let nu = |v: usize| n + 1 + v;
    let mut objective = vec![0.0; 2 * n + 1];
    objective[mu] = k_f as f64;
    for v in 0..n {
        objective[nu(v)] = 1.0;
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for v in 0..n {
        lp.set_bounds(v, 0.0, 1.0);
        let mut row = vec![0.0; 2 * n + 1];
        row[mu] = 1.0;
        row[nu(v)] = 1.0;
        row[v] = degrees[v];
        lp.add_constraint(row, Relation::Ge, degrees[v]);
    }
    let mut row = vec![0.0; 2 * n + 1];
    row[..n].iter_mut().for_each(|c| *c = 1.0);
    lp.add_constraint(row, Relation::Le, k_l as f64);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::LpStatus(match sol.status {
            LpStatus::Infeasible => "infeasible",
            _ => "unbounded",
        }));
    }
    let q: Vec<f64> = sol.x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let ml = Matroid::uniform(n, k_l)?;
    Ok((MarginalStrategy::new(&ml, q)?, sol.objective))
}

/// A vertex of the smallest face containing `p`: greedy through the tight chain, then
/// the rest of the support, each group by decreasing value (ties by id).
fn face_vertex(ml: &Matroid, p: &[f64], face: &crate::lp::Face) -> VertexSet {
    let by_value = |a: &usize, b: &usize| p[*b].total_cmp(&p[*a]).then(a.cmp(b));
    let mut order: Vec<usize> = Vec::with_capacity(p.len());
    let mut placed = vec![false; p.len()];
    for set in &face.chain {
        let mut group: Vec<usize> = set.iter().copied().filter(|&i| !placed[i]).collect();
        group.sort_by(by_value);
        for &i in &group {
            placed[i] = true;
        }
        order.extend(group);
    }
    let mut rest: Vec<usize> = (0..p.len()).filter(|&i| !placed[i] && p[i] > FACE_TOL).collect();
    rest.sort_by(by_value);
    order.extend(rest);
    VertexSet::from_ids(ml.greedy_in_order(order))
}

/// Writes a point of the leader polytope as a convex combination of at most `n + 1`
/// independent sets. Each round picks a vertex `b` of the smallest face containing the
/// current point, steps from `b` through the point to the boundary, and continues
/// from the exit point, which lies on a strictly smaller face.
pub fn caratheodory_decompose(ml: &Matroid, q: &MarginalStrategy) -> Result<InterdictionStrategy> {
    let n = ml.ground_size();
    if q.q.len() != n {
        return input_err("marginals do not match the leader ground set");
    }
    let mut p = q.q.clone();
    let mut remaining = 1.0;
    let mut parts: Vec<(f64, VertexSet)> = Vec::new();
    for _ in 0..=n + 1 {
        let face = face_of(ml, &p, FACE_TOL)?;
        let b = face_vertex(ml, &p, &face);
        if face.is_integral() {
            parts.push((remaining, b));
            break;
        }
        let bvec = b.indicator(n);
        let d: Vec<f64> = p.iter().zip(&bvec).map(|(x, y)| x - y).collect();
        let t = ray_step(ml, &p, &d)?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Decomposition {
                residual: d.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
            });
        }
        let s = 1.0 + t;
        parts.push((remaining * t / s, b));
        remaining /= s;
        for (x, dx) in p.iter_mut().zip(&d) {
            *x = (*x + t * dx).clamp(0.0, 1.0);
        }
    }
    let total: f64 = parts.iter().map(|(l, _)| l).sum();
    let mut rebuilt = vec![0.0; n];
    for (l, s) in &parts {
        for v in s.iter() {
            rebuilt[v] += l;
        }
    }
    let residual = rebuilt
        .iter()
        .zip(&q.q)
        .fold((total - 1.0).abs(), |m, (a, b)| m.max((a - b).abs()));
    if residual > DECOMPOSITION_TOL || parts.len() > n + 1 {
        return Err(Error::Decomposition { residual });
    }
    InterdictionStrategy::new(ml, parts)
}

/// Follower value against the computed strategy: exact, or bracketed by the rounded
/// attack and the relaxation optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaEstimate {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    /// Best attack found.
    pub attack_set: VertexSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveCertificate {
    pub pi_prime: InterdictionStrategy,
    pub marginals: MarginalStrategy,
    pub theta: ThetaEstimate,
    /// Minimum over the leader polytope of the best surrogate response.
    pub surrogate_value: f64,
    /// `3/8` of the surrogate optimum; never exceeds the optimal leader value.
    pub lower_bound: f64,
    /// `theta.upper / lower_bound` (1 when both vanish).
    pub guaranteed_ratio: f64,
}

/// Follower best response against `pi`, exact when the follower sets can be enumerated.
pub fn evaluate_theta(
    g: &WeightedGraph,
    pi: &InterdictionStrategy,
    mf: &Matroid,
    opts: &SolveOptions,
) -> Result<ThetaEstimate> {
    let enumerable = mf.ground_size() <= EXACT_FOLLOWER_MAX_N
        && mf.count_independent_sets(opts.exact_follower_limit).is_some();
    if enumerable {
        let (attack_set, value) = solve_follower_ilp_bruteforce(g, pi, mf)?;
        return Ok(ThetaEstimate {
            lower: value,
            upper: value,
            exact: true,
            attack_set,
        });
    }
    let sol = approx_follower_with(g, pi, mf, opts)?;
    Ok(ThetaEstimate {
        lower: sol.ilp_value,
        upper: sol.lp_value.min(sol.ilp_value * 4.0 / 3.0).max(sol.ilp_value),
        exact: false,
        attack_set: sol.attack_set,
    })
}

/// Full pipeline: relaxed leader program, decomposition into an explicit strategy,
/// evaluation of the follower's best response and the certified bounds.
pub fn solve_rmvci(g: &WeightedGraph, ml: &Matroid, mf: &Matroid, opts: &SolveOptions) -> Result<SolveCertificate> {
    opts.validate()?;
    check_instance(g, ml, mf)?;
    let (marginals, surrogate_value) = match (ml.kind(), mf.kind(), opts.use_uniform_dual) {
        (MatroidKind::Uniform { rank: kl }, MatroidKind::Uniform { rank: kf }, true) => {
            solve_leader_uniform_dual(g, *kl, *kf)?
        }
        _ => solve_leader_relaxed_with(g, ml, mf, opts)?,
    };
    let pi_prime = caratheodory_decompose(ml, &marginals)?;
    let theta = evaluate_theta(g, &pi_prime, mf, opts)?;
    let lower_bound = 0.375 * surrogate_value;
    Ok(SolveCertificate {
        guaranteed_ratio: ratio(theta.upper, lower_bound),
        pi_prime,
        marginals,
        theta,
        surrogate_value,
        lower_bound,
    })
}

/// Vertex marginals of a strategy, checked against the leader polytope.
pub fn marginal_strategy_of(g: &WeightedGraph, ml: &Matroid, pi: &InterdictionStrategy) -> Result<MarginalStrategy> {
    MarginalStrategy::new(ml, marginals_of(g, pi).q().to_vec())
}
