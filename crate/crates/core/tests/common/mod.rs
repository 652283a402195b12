//! Independent reference computations for the integration suites. Everything here
//! works straight from the definitions by enumerating bitmasks, sharing no code with
//! the solver paths beyond the matroid independence test and the raw LP solver.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmvci::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use rmvci::{InterdictionStrategy, Matroid, VertexSet, WeightedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn independent(m: &Matroid, mask: u64) -> bool {
    m.is_independent(&VertexSet::from_mask(mask)).unwrap()
}

pub fn independent_masks(m: &Matroid) -> Vec<u64> {
    let n = m.ground_size();
    (0u64..1 << n).filter(|&s| independent(m, s)).collect()
}

/// Largest independent submask of `mask`.
pub fn brute_rank(m: &Matroid, mask: u64) -> usize {
    let mut best = 0;
    let mut sub = mask;
    loop {
        if sub.count_ones() as usize > best && independent(m, sub) {
            best = sub.count_ones() as usize;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    best
}

/// Rank of every subset of the ground set, by dynamic programming over
/// "largest independent submask".
pub fn rank_table(m: &Matroid) -> Vec<usize> {
    let n = m.ground_size();
    let mut r = vec![0usize; 1 << n];
    for s in 1usize..1 << n {
        r[s] = if independent(m, s as u64) {
            s.count_ones() as usize
        } else {
            (0..n).filter(|i| s >> i & 1 == 1).map(|i| r[s & !(1 << i)]).max().unwrap()
        };
    }
    r
}

/// `max_S x(S) - r(S)` over all subsets.
pub fn brute_max_violation(m: &Matroid, x: &[f64]) -> f64 {
    let ranks = rank_table(m);
    let n = x.len();
    let mut best: f64 = 0.0;
    for s in 1usize..1 << n {
        let mass: f64 = (0..n).filter(|i| s >> i & 1 == 1).map(|i| x[i]).sum();
        best = best.max(mass - ranks[s] as f64);
    }
    best
}

pub fn covered(g: &WeightedGraph, attack: u64) -> f64 {
    g.edges()
        .iter()
        .filter(|e| attack >> e.u & 1 == 1 || attack >> e.v & 1 == 1)
        .map(|e| e.w)
        .sum()
}

fn mask_of(s: &VertexSet) -> u64 {
    s.iter().fold(0, |m, v| m | 1 << v)
}

/// Expected covered weight of attack `x` against `pi`, straight from the definition.
pub fn direct_payoff(g: &WeightedGraph, pi: &InterdictionStrategy, x: u64) -> f64 {
    pi.support()
        .iter()
        .map(|(p, s)| p * covered(g, x & !mask_of(s)))
        .sum()
}

/// Best follower value by trying every subset of the ground set.
pub fn brute_follower(g: &WeightedGraph, pi: &InterdictionStrategy, mf: &Matroid) -> f64 {
    independent_masks(mf)
        .into_iter()
        .map(|x| direct_payoff(g, pi, x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Optimal leader value from the follower's side of the game: the follower mixes over
/// all its independent sets to maximize the worst case over all leader sets.
pub fn game_value_follower_side(g: &WeightedGraph, ml: &Matroid, mf: &Matroid) -> f64 {
    let rows = independent_masks(ml);
    let cols = independent_masks(mf);
    let k = cols.len();
    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    lp.set_bounds(k, f64::NEG_INFINITY, f64::INFINITY);
    let mut sum = vec![1.0; k + 1];
    sum[k] = 0.0;
    lp.add_constraint(sum, Relation::Eq, 1.0);
    for &s in &rows {
        let mut row: Vec<f64> = cols.iter().map(|&x| covered(g, x & !s)).collect();
        row.push(-1.0);
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    let sol = solve_lp(&lp).unwrap_or_else(|e| panic!("{e}: {g:?} {ml:?} {mf:?}"));
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
