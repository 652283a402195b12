use crate::error::{input_err, Result};
use crate::graph::WeightedGraph;
use crate::matroid::Matroid;

/// Complete graph on `n` vertices (unit weights) with a follower allowed `n/2` attacks.
pub fn gap_instance(n: usize) -> Result<(WeightedGraph, Matroid)> {
    if n < 2 || n % 2 == 1 {
        return input_err(format!("gap instances need an even n >= 2, got {n}"));
    }
    Ok((WeightedGraph::complete(n)?, Matroid::uniform(n, n / 2)?))
}

/// Relaxation optimum `C(n,2)` and best attack value `k(n-1) - C(k,2)`, `k = n/2`.
pub fn gap_values(n: usize) -> Result<(f64, f64)> {
    if n < 2 || n % 2 == 1 {
        return input_err(format!("gap instances need an even n >= 2, got {n}"));
    }
    let k = n / 2;
    let lp = n * (n - 1) / 2;
    let ilp = k * (n - 1) - k * (k - 1) / 2;
    Ok((lp as f64, ilp as f64))
}
