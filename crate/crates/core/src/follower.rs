//! The follower's subproblem against a fixed leader strategy: its LP relaxation and
//! pipage rounding to an integral attack set.

use crate::error::{input_err, Error, Result};
use crate::graph::WeightedGraph;
use crate::lp::{
    cutting_plane_maximize, face_of, ray_step, separate_matroid_polytope, Cut, LinearProgram,
    Relation, Sense, Separation,
};
use crate::matroid::Matroid;
use crate::options::SolveOptions;
use crate::strategy::{effective_weights, expected_payoff, marginals_of, EffectiveWeights, InterdictionStrategy};
use crate::vertex_set::VertexSet;

/// Coordinates this close to 0 or 1 are snapped before rounding starts.
const SNAP_TOL: f64 = 1e-8;
/// Fractionality and tightness threshold used while rounding.
const FACE_TOL: f64 = 1e-9;
/// Membership slack accepted for the point handed to the rounding.
const INPUT_TOL: f64 = 1e-7;

/// Result of the follower's LP-and-round procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct FollowerSolution {
    pub attack_set: VertexSet,
    /// Exact expected payoff of `attack_set`.
    pub ilp_value: f64,
    /// Optimum of the relaxation, an upper bound on the best attack.
    pub lp_value: f64,
    /// `lp_value / ilp_value`, with `0/0` read as 1.
    pub ratio_bound: f64,
    /// The fractional optimum that was rounded.
    pub fractional: Vec<f64>,
}

/// One move of the rounding loop.
#[derive(Clone, Debug, PartialEq)]
pub struct PipageStep {
    pub i: usize,
    /// Second coordinate of the move; `None` for a single-coordinate move.
    pub j: Option<usize>,
    pub f_before: f64,
    pub f_after: f64,
    pub tight_before: usize,
    pub tight_after: usize,
}

fn check_dims(g: &WeightedGraph, ew: &EffectiveWeights, x: &[f64]) -> Result<()> {
    if ew.edges().len() != g.edge_count() {
        return input_err(format!(
            "{} effective weights for {} edges",
            ew.edges().len(),
            g.edge_count()
        ));
    }
    if x.len() != g.vertex_count() {
        return input_err(format!("point has length {}, graph has {} vertices", x.len(), g.vertex_count()));
    }
    Ok(())
}

/// `L(x) = sum_e [x_u w^u + x_v w^v + max(0, x_u+x_v-1)(w^uv - w^u - w^v)]`.
pub fn eval_l(g: &WeightedGraph, ew: &EffectiveWeights, x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .zip(ew.edges())
        .map(|(e, w)| {
            let (a, b) = (x[e.u], x[e.v]);
            a * w.u_side + b * w.v_side + (a + b - 1.0).max(0.0) * w.joint_coefficient()
        })
        .sum()
}

/// `F(x) = sum_e [x_u w^u + x_v w^v + x_u x_v (w^uv - w^u - w^v)]`.
pub fn eval_f(g: &WeightedGraph, ew: &EffectiveWeights, x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .zip(ew.edges())
        .map(|(e, w)| {
            let (a, b) = (x[e.u], x[e.v]);
            a * w.u_side + b * w.v_side + a * b * w.joint_coefficient()
        })
        .sum()
}

pub fn solve_follower_lp(g: &WeightedGraph, ew: &EffectiveWeights, mf: &Matroid) -> Result<(Vec<f64>, f64)> {
    solve_follower_lp_with(g, ew, mf, &SolveOptions::default())
}

/// Maximizes the relaxation over `x` in the follower polytope and `z_e >= x_u + x_v - 1`,
/// returning the clipped optimal `x` and the optimum.
pub fn solve_follower_lp_with(
    g: &WeightedGraph,
    ew: &EffectiveWeights,
    mf: &Matroid,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, f64)> {
    opts.validate()?;
    let n = g.vertex_count();
    let m = g.edge_count();
    check_dims(g, ew, &vec![0.0; n])?;
    if mf.ground_size() != n {
        return input_err(format!("follower matroid has {} elements, graph {n}", mf.ground_size()));
    }
    if let Some(&idx) = ew.joint_coefficient_violations().first() {
        return Err(Error::InvalidMarginals {
            edge: idx,
            detail: format!("joint coefficient {} is positive", ew.edges()[idx].joint_coefficient()),
        });
    }

    let mut objective = vec![0.0; n + m];
    for (k, (e, w)) in g.edges().iter().zip(ew.edges()).enumerate() {
        objective[e.u] += w.u_side;
        objective[e.v] += w.v_side;
        objective[n + k] = w.joint_coefficient();
    }
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for j in 0..n + m {
        lp.set_bounds(j, 0.0, 1.0);
    }
    for (k, e) in g.edges().iter().enumerate() {
        let mut row = vec![0.0; n + m];
        row[e.u] += 1.0;
        row[e.v] += 1.0;
        row[n + k] = -1.0;
        lp.add_constraint(row, Relation::Le, 1.0);
    }
    if let Some(blocks) = mf.blocks() {
        for (block, cap) in blocks {
            if block.len() > cap {
                let mut row = vec![0.0; n + m];
                block.iter().for_each(|&i| row[i] = 1.0);
                lp.add_constraint(row, Relation::Le, cap as f64);
            }
        }
    }

    let cap = (10 * n * (n + m)).max(50);
    let tol = opts.separation_tol;
    let outcome = cutting_plane_maximize(lp, cap, |point| {
        Ok(match separate_matroid_polytope(mf, &point[..n], tol)? {
            Separation::Feasible => vec![],
            Separation::Violated(cut) => {
                let mut coeffs = cut.coeffs;
                coeffs.resize(n + m, 0.0);
                vec![Cut { coeffs, rhs: cut.rhs }]
            }
        })
    })?;

    let x: Vec<f64> = outcome.solution.x[..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let value = outcome.solution.objective;
    let relaxed = eval_l(g, ew, &x);
    if (relaxed - value).abs() > 1e-6 * (1.0 + g.total_weight()) {
        return Err(Error::Structural(format!(
            "relaxation optimum {value} disagrees with L(x) = {relaxed}"
        )));
    }
    Ok((x, value))
}

pub fn pipage_round(g: &WeightedGraph, ew: &EffectiveWeights, mf: &Matroid, x: &[f64]) -> Result<VertexSet> {
    pipage_round_traced(g, ew, mf, x).map(|(s, _)| s)
}

enum Move {
    Pair(usize, usize),
    Single(usize),
}

fn choose_move(face: &crate::lp::Face) -> Result<Move> {
    let is_frac = |i: usize| face.fractional.binary_search(&i).is_ok();
    let mut candidates: Vec<(usize, usize, &Vec<usize>)> = face
        .fractional
        .iter()
        .filter_map(|&i| {
            face.minimal_tight[i]
                .as_ref()
                .map(|t| (t.iter().filter(|&&k| is_frac(k)).count(), i, t))
        })
        .collect();
    if candidates.is_empty() {
        return Ok(match face.fractional[..] {
            [i] => Move::Single(i),
            [i, j, ..] => Move::Pair(i, j),
            [] => unreachable!("called on an integral point"),
        });
    }
    candidates.sort_unstable_by_key(|&(c, i, _)| (c, i));
    for &(_, i, t) in &candidates {
        for &j in t.iter().filter(|&&j| j != i && is_frac(j)) {
            if face.minimal_tight[j].as_ref().is_some_and(|tj| tj.contains(&i)) {
                return Ok(Move::Pair(i, j));
            }
        }
    }
    Err(Error::Structural(format!(
        "no admissible coordinate pair among fractional {:?}",
        face.fractional
    )))
}

fn snap(x: &mut [f64], tol: f64) {
    for v in x.iter_mut() {
        if *v <= tol {
            *v = 0.0;
        } else if *v >= 1.0 - tol {
            *v = 1.0;
        }
    }
}

/// Rounds a point of the follower polytope to an independent set without decreasing
/// `F`, recording every move.
pub fn pipage_round_traced(
    g: &WeightedGraph,
    ew: &EffectiveWeights,
    mf: &Matroid,
    x: &[f64],
) -> Result<(VertexSet, Vec<PipageStep>)> {
    check_dims(g, ew, x)?;
    if mf.ground_size() != x.len() {
        return input_err("point length differs from the follower ground set");
    }
    if x.iter().any(|v| !v.is_finite() || *v < -INPUT_TOL || *v > 1.0 + INPUT_TOL) {
        return input_err("point must lie in [0,1]^n");
    }
    if let Separation::Violated(cut) = separate_matroid_polytope(mf, x, INPUT_TOL)? {
        return input_err(format!(
            "point violates a rank inequality by {}",
            cut.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - cut.rhs
        ));
    }

    let n = x.len();
    let mut x: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    snap(&mut x, SNAP_TOL);
    let mut trace = Vec::new();
    let mut face = face_of(mf, &x, FACE_TOL)?;
    let max_moves = 2 * n + 2;
    while !face.is_integral() {
        if trace.len() >= max_moves {
            return Err(Error::Structural(format!(
                "rounding did not finish within {max_moves} moves"
            )));
        }
        let (i, j) = match choose_move(&face)? {
            Move::Pair(i, j) => (i, Some(j)),
            Move::Single(i) => (i, None),
        };
        let mut d = vec![0.0; n];
        d[i] = 1.0;
        if let Some(j) = j {
            d[j] = -1.0;
        }
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let alpha = ray_step(mf, &x, &d)?;
        let beta = ray_step(mf, &x, &neg)?;
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Structural("unbounded rounding direction".into()));
        }
        let along = |t: f64| -> Vec<f64> {
            let mut y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            snap(&mut y, FACE_TOL);
            y
        };
        let xa = along(alpha);
        let xb = along(-beta);
        let (fa, fb) = (eval_f(g, ew, &xa), eval_f(g, ew, &xb));
        let f_before = eval_f(g, ew, &x);
        let next = match (alpha > 0.0, beta > 0.0) {
            (true, true) => {
                if fa >= fb {
                    xa
                } else {
                    xb
                }
            }
            (true, false) => xa,
            (false, true) => xb,
            (false, false) => {
                return Err(Error::Structural(format!(
                    "no room to move along coordinates {i} and {j:?}"
                )))
            }
        };
        let next_face = face_of(mf, &next, FACE_TOL)?;
        trace.push(PipageStep {
            i,
            j,
            f_before,
            f_after: eval_f(g, ew, &next),
            tight_before: face.tight_count,
            tight_after: next_face.tight_count,
        });
        x = next;
        face = next_face;
    }
    let set = VertexSet::from_ids((0..n).filter(|&v| x[v] > 0.5));
    Ok((set, trace))
}

pub fn approx_follower(g: &WeightedGraph, pi: &InterdictionStrategy, mf: &Matroid) -> Result<FollowerSolution> {
    approx_follower_with(g, pi, mf, &SolveOptions::default())
}

/// LP relaxation followed by pipage rounding; the attack set is worth at least three
/// quarters of the relaxation.
pub fn approx_follower_with(
    g: &WeightedGraph,
    pi: &InterdictionStrategy,
    mf: &Matroid,
    opts: &SolveOptions,
) -> Result<FollowerSolution> {
    let ew = effective_weights(g, &marginals_of(g, pi))?;
    let (x, lp_value) = solve_follower_lp_with(g, &ew, mf, opts)?;
    let attack_set = pipage_round(g, &ew, mf, &x)?;
    let ilp_value = expected_payoff(g, pi, &attack_set);
    Ok(FollowerSolution {
        attack_set,
        ilp_value,
        lp_value,
        ratio_bound: ratio(lp_value, ilp_value),
        fractional: x,
    })
}

/// `num / den` with `0/0 = 1` and `x/0 = inf`, where values at noise level count as 0.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 1e-12 {
        num / den
    } else if num <= 1e-12 {
        1.0
    } else {
        f64::INFINITY
    }
}
