//! Geometry of independence polytopes: separation, exact ray intersection and the
//! tight-set structure of a point.

use super::Cut;
use crate::error::{input_err, Result};
use crate::matroid::{Matroid, SubsetSums};

/// Outcome of separating a point from an independence polytope.
#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    Feasible,
    Violated(Cut),
}

/// Derivatives below this are treated as zero by the ray step.
const DERIVATIVE_TOL: f64 = 1e-10;
/// Coordinates at or below this count as outside the support.
const SUPPORT_TOL: f64 = 1e-12;

fn check_point(m: &Matroid, point: &[f64]) -> Result<()> {
    if point.len() != m.ground_size() {
        return input_err(format!(
            "point has length {}, matroid ground set has {}",
            point.len(),
            m.ground_size()
        ));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return input_err("point has a non-finite entry");
    }
    Ok(())
}

fn indicator_cut(n: usize, members: impl IntoIterator<Item = usize>, rhs: f64) -> Cut {
    let mut coeffs = vec![0.0; n];
    for i in members {
        coeffs[i] = 1.0;
    }
    Cut { coeffs, rhs }
}

/// Finds the rank inequality `x(S) <= r(S)` most violated by `point`, reporting it when
/// the violation exceeds `tol`. A negative coordinate yields the bound cut `-x_i <= 0`.
pub fn separate_matroid_polytope(m: &Matroid, point: &[f64], tol: f64) -> Result<Separation> {
    check_point(m, point)?;
    let n = point.len();
    if let Some((i, v)) = point
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        if -v > tol {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = -1.0;
            return Ok(Separation::Violated(Cut { coeffs, rhs: 0.0 }));
        }
    }

    if let Some(blocks) = m.blocks() {
        let mut members = Vec::new();
        let mut rank = 0usize;
        let mut violation = 0.0;
        for (block, cap) in blocks {
            let mut sorted = block.clone();
            sorted.sort_by(|&a, &b| point[b].total_cmp(&point[a]).then(a.cmp(&b)));
            let (mut best, mut best_s, mut prefix) = (0.0, 0usize, 0.0);
            for (s, &i) in sorted.iter().enumerate() {
                prefix += point[i];
                let v = prefix - (s + 1).min(cap) as f64;
                if v > best {
                    best = v;
                    best_s = s + 1;
                }
            }
            if best_s > 0 {
                violation += best;
                rank += best_s.min(cap);
                members.extend_from_slice(&sorted[..best_s]);
            }
        }
        if violation > tol {
            return Ok(Separation::Violated(indicator_cut(n, members, rank as f64)));
        }
        return Ok(Separation::Feasible);
    }

    let support: Vec<usize> = (0..n).filter(|&i| point[i] > SUPPORT_TOL).collect();
    let ranks = m.subset_ranks(&support)?;
    let sums = SubsetSums::new(&support, point);
    let (mut best, mut best_local) = (0.0, 0usize);
    for (local, &r) in ranks.iter().enumerate().skip(1) {
        let v = sums.sum(local) - r as f64;
        if v > best {
            best = v;
            best_local = local;
        }
    }
    if best > tol {
        let members = (0..support.len())
            .filter(|k| best_local >> k & 1 == 1)
            .map(|k| support[k]);
        return Ok(Separation::Violated(indicator_cut(
            n,
            members,
            ranks[best_local] as f64,
        )));
    }
    Ok(Separation::Feasible)
}

/// Largest `t >= 0` with `x + t·d` in the independence polytope, assuming `x` lies in
/// it. Constraints already violated by rounding noise are treated as tight.
pub(crate) fn ray_step(m: &Matroid, x: &[f64], d: &[f64]) -> Result<f64> {
    check_point(m, x)?;
    if d.len() != x.len() {
        return input_err("direction length differs from point length");
    }
    let n = x.len();
    let mut t = f64::INFINITY;
    let mut limit = |slack: f64, rate: f64| {
        if rate > DERIVATIVE_TOL {
            t = t.min(slack.max(0.0) / rate);
        }
    };
    for i in 0..n {
        limit(x[i], -d[i]);
    }

    if let Some(blocks) = m.blocks() {
        for (block, cap) in blocks {
            let upper = if cap == 0 { 0.0 } else { 1.0 };
            for &i in &block {
                limit(upper - x[i], d[i]);
            }
            if block.len() > cap {
                let xs: f64 = block.iter().map(|&i| x[i]).sum();
                let ds: f64 = block.iter().map(|&i| d[i]).sum();
                limit(cap as f64 - xs, ds);
            }
        }
        return Ok(t);
    }

    let elems: Vec<usize> = (0..n)
        .filter(|&i| x[i] > SUPPORT_TOL || d[i] > DERIVATIVE_TOL)
        .collect();
    let ranks = m.subset_ranks(&elems)?;
    let xs = SubsetSums::new(&elems, x);
    let ds = SubsetSums::new(&elems, d);
    for (local, &r) in ranks.iter().enumerate().skip(1) {
        limit(r as f64 - xs.sum(local), ds.sum(local));
    }
    Ok(t)
}

/// Tight-constraint structure of a point of an independence polytope.
#[derive(Clone, Debug)]
pub(crate) struct Face {
    /// Coordinates strictly between 0 and 1.
    pub fractional: Vec<usize>,
    /// For every element, the smallest tight rank set containing it, if any.
    pub minimal_tight: Vec<Option<Vec<usize>>>,
    /// A maximal nested chain of tight sets within the support, smallest first.
    pub chain: Vec<Vec<usize>>,
    /// Number of linearly independent tight constraints (zero bounds plus chain).
    pub tight_count: usize,
}

impl Face {
    pub(crate) fn is_integral(&self) -> bool {
        self.fractional.is_empty()
    }
}

pub(crate) fn face_of(m: &Matroid, x: &[f64], tol: f64) -> Result<Face> {
    check_point(m, x)?;
    let n = x.len();
    let fractional: Vec<usize> = (0..n).filter(|&i| x[i] > tol && x[i] < 1.0 - tol).collect();
    let zeros = (0..n).filter(|&i| x[i] <= tol).count();
    let mut minimal_tight = vec![None; n];
    let mut chain: Vec<Vec<usize>> = Vec::new();

    if let Some(blocks) = m.blocks() {
        let ones: Vec<usize> = (0..n).filter(|&i| x[i] >= 1.0 - tol).collect();
        let mut current: Vec<usize> = Vec::new();
        for &i in &ones {
            minimal_tight[i] = Some(vec![i]);
            current.push(i);
            chain.push(current.clone());
        }
        for (block, cap) in blocks {
            let support: Vec<usize> = block.iter().copied().filter(|&i| x[i] > tol).collect();
            let mass: f64 = support.iter().map(|&i| x[i]).sum();
            let has_fractional = support.iter().any(|&i| x[i] < 1.0 - tol);
            if cap == 0 || !has_fractional || mass < cap as f64 - tol {
                continue;
            }
            for &i in &support {
                if x[i] < 1.0 - tol {
                    minimal_tight[i] = Some(support.clone());
                }
            }
            current.extend(support.iter().copied().filter(|&i| x[i] < 1.0 - tol));
            current.sort_unstable();
            chain.push(current.clone());
        }
        let tight_count = zeros + chain.len();
        return Ok(Face {
            fractional,
            minimal_tight,
            chain,
            tight_count,
        });
    }

    let support: Vec<usize> = (0..n).filter(|&i| x[i] > tol).collect();
    let k = support.len();
    let ranks = m.subset_ranks(&support)?;
    let sums = SubsetSums::new(&support, x);
    let full = if k == 0 { 0 } else { (1usize << k) - 1 };
    let mut meet = vec![full; k];
    let mut tight: Vec<usize> = Vec::new();
    for (local, &r) in ranks.iter().enumerate().skip(1) {
        if r as f64 - sums.sum(local) <= tol {
            tight.push(local);
            let mut rest = local;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                meet[b] &= local;
                rest &= rest - 1;
            }
        }
    }
    let to_ids = |local: usize| -> Vec<usize> {
        (0..k).filter(|b| local >> b & 1 == 1).map(|b| support[b]).collect()
    };
    let mut covered = 0usize;
    for &s in &tight {
        covered |= s;
    }
    for b in 0..k {
        if covered >> b & 1 == 1 {
            minimal_tight[support[b]] = Some(to_ids(meet[b]));
        }
    }
    tight.sort_unstable_by_key(|&s| (s.count_ones(), s));
    let mut current = 0usize;
    for &s in &tight {
        if s & current == current && s != current {
            chain.push(to_ids(s));
            current = s;
        }
    }
    let tight_count = zeros + chain.len();
    Ok(Face {
        fractional,
        minimal_tight,
        chain,
        tight_count,
    })
}

impl From<Separation> for Option<Cut> {
    fn from(s: Separation) -> Self {
        match s {
            Separation::Feasible => None,
            Separation::Violated(c) => Some(c),
        }
    }
}
