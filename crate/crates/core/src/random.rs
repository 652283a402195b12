//! Random instance generators shared by the property suites and the command-line
//! checker. All of them draw from a caller-supplied generator, so seeded runs are
//! reproducible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::matroid::{Matroid, MatroidKind};
use crate::oracle::enumerate_independent_sets;
use crate::strategy::InterdictionStrategy;
use crate::vertex_set::VertexSet;

/// Graph on `n` vertices with each pair present with probability `density` and
/// weights uniform in `[0, max_weight]`, some of them rounded to integers.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64, max_weight: f64) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                let w: f64 = rng.gen_range(0.0..=max_weight);
                let w = if rng.gen_bool(0.3) { w.round() } else { w };
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// Which encodings [`random_matroid`] may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatroidFamily {
    Uniform,
    Partition,
    Graphic,
    Explicit,
}

impl MatroidFamily {
    pub const ALL: [MatroidFamily; 4] = [
        MatroidFamily::Uniform,
        MatroidFamily::Partition,
        MatroidFamily::Graphic,
        MatroidFamily::Explicit,
    ];
}

/// Random matroid of the given family on `n` elements. Explicit matroids are built
/// from the independent sets of a random graphic or partition matroid, so `n` must
/// stay small enough to enumerate them.
pub fn random_matroid<R: Rng + ?Sized>(rng: &mut R, n: usize, family: MatroidFamily) -> Result<Matroid> {
    match family {
        MatroidFamily::Uniform => Matroid::uniform(n, rng.gen_range(0..=n)),
        MatroidFamily::Partition => {
            let k = rng.gen_range(1..=n.max(1));
            let mut blocks = vec![Vec::new(); k];
            for i in 0..n {
                blocks[rng.gen_range(0..k)].push(i);
            }
            blocks.retain(|b| !b.is_empty());
            let caps = blocks.iter().map(|b| rng.gen_range(0..=b.len())).collect();
            Matroid::partition(n, blocks, caps)
        }
        MatroidFamily::Graphic => {
            let nodes = rng.gen_range(2..=n.max(2));
            let edges = (0..n)
                .map(|_| {
                    let a = rng.gen_range(0..nodes);
                    // occasional loops and parallel edges keep the encoding honest
                    let b = if rng.gen_bool(0.05) { a } else { rng.gen_range(0..nodes) };
                    (a, b)
                })
                .collect();
            Matroid::graphic(nodes, edges)
        }
        MatroidFamily::Explicit => {
            let base_family = if rng.gen_bool(0.5) {
                MatroidFamily::Graphic
            } else {
                MatroidFamily::Partition
            };
            let base = random_matroid(rng, n, base_family)?;
            let sets = enumerate_independent_sets(&base)?;
            let maximal: Vec<VertexSet> = sets.into_iter().filter(|s| s.len() == base.full_rank()).collect();
            Matroid::explicit(n, &maximal)
        }
    }
}

/// A random independent set: greedy under random weights, then a random prefix.
pub fn random_independent_set<R: Rng + ?Sized>(rng: &mut R, m: &Matroid) -> Result<VertexSet> {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen::<f64>()).collect();
    let (basis, _) = m.greedy_max_weight(&w)?;
    let mut ids = basis.to_vec();
    ids.shuffle(rng);
    let keep = rng.gen_range(0..=ids.len());
    Ok(VertexSet::from_ids(ids.into_iter().take(keep)))
}

/// A random basis: greedy under random weights.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, m: &Matroid) -> Result<VertexSet> {
    let w: Vec<f64> = (0..m.ground_size()).map(|_| rng.gen::<f64>() + 1.0).collect();
    Ok(m.greedy_max_weight(&w)?.0)
}

/// Strategy supported on up to `max_support` random independent sets.
pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R, ml: &Matroid, max_support: usize) -> Result<InterdictionStrategy> {
    let k = rng.gen_range(1..=max_support.max(1));
    let mut support = Vec::with_capacity(k);
    let mut total = 0.0;
    for _ in 0..k {
        let p: f64 = rng.gen_range(0.05..1.0);
        total += p;
        let s = if rng.gen_bool(0.5) {
            random_basis(rng, ml)?
        } else {
            random_independent_set(rng, ml)?
        };
        support.push((p, s));
    }
    for entry in &mut support {
        entry.0 /= total;
    }
    InterdictionStrategy::new(ml, support)
}

/// A random point of the independence polytope: a convex combination of random
/// vertices, scaled down by a random factor with probability one half.
pub fn random_polytope_point<R: Rng + ?Sized>(rng: &mut R, m: &Matroid, vertices: usize) -> Result<Vec<f64>> {
    let n = m.ground_size();
    let k = rng.gen_range(1..=vertices.max(1));
    let mut lambdas: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|l| *l /= total);
    let scale = if rng.gen_bool(0.5) { rng.gen::<f64>() } else { 1.0 };
    let mut x = vec![0.0; n];
    for l in lambdas {
        let s = if rng.gen_bool(0.7) {
            random_basis(rng, m)?
        } else {
            random_independent_set(rng, m)?
        };
        for v in s.iter() {
            x[v] += scale * l;
        }
    }
    for v in &mut x {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(x)
}

/// Short human-readable label of a matroid's encoding.
pub fn family_of(m: &Matroid) -> MatroidFamily {
    match m.kind() {
        MatroidKind::Uniform { .. } => MatroidFamily::Uniform,
        MatroidKind::Partition { .. } => MatroidFamily::Partition,
        MatroidKind::Graphic { .. } => MatroidFamily::Graphic,
        MatroidKind::Explicit { .. } => MatroidFamily::Explicit,
    }
}
