//! Two-phase primal simplex on a dense tableau with bounded variables.
//!
//! Pricing starts with the largest reduced cost and falls back to Bland's smallest-index
//! rule after a run of degenerate pivots, returning to it after the next real step.
//! Every hundred pivots, and before any optimality verdict, the tableau is checked
//! against the original rows and rebuilt from an LU factorization of the basis when it
//! has drifted.

use nalgebra::DMatrix;

use super::{LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const DEGENERATE_RUN: usize = 50;
const FEASIBILITY_SLACK: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const DRIFT_TOL: f64 = 1e-9;
const DRIFT_SAMPLES: usize = 16;
const TIE_TOL: f64 = 1e-12;
const BLAND_PIVOT_FRACTION: f64 = 1e-3;

#[derive(Clone, Copy)]
enum VarMap {
    /// x = lo + y
    Shift { col: usize, lo: f64 },
    /// x = hi - y
    Flip { col: usize, hi: f64 },
    /// x = y⁺ - y⁻
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    d: Vec<f64>,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
    scratch: Vec<usize>,
    /// nonzeros of each original constraint row and the right-hand side, for reinversion
    a0: Vec<Vec<(usize, f64)>>,
    b0: Vec<f64>,
    since_refactor: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    fn value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn price(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.cols..(i + 1) * self.cols];
                for (dj, &aij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        for i in 0..self.rows {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn entering(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] {
                continue;
            }
            let dj = self.d[j];
            let eligible = if self.at_upper[j] {
                dj > COST_TOL
            } else {
                dj < -COST_TOL && self.upper[j] > 0.0
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            if best.is_none_or(|(_, b)| dj.abs() > b) {
                best = Some((j, dj.abs()));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Step length along entering column `q` and the blocking row, if any. Outside
    /// Bland mode this is a two-pass Harris test: the bound is relaxed by
    /// `FEASIBILITY_SLACK` and the largest pivot within it wins. Bland mode takes the
    /// minimum ratio; among tied rows with a pivot comparable to the largest tied one,
    /// the smallest basic index leaves.
    fn ratio_test(&self, q: usize, dir: f64) -> (f64, Option<(usize, bool)>) {
        let blocking = |i: usize, slack: f64| -> Option<(f64, f64, bool)> {
            let alpha = self.at(i, q) * dir;
            let b = self.basis[i];
            if alpha > PIVOT_TOL {
                Some(((self.beta[i] + slack).max(0.0) / alpha, alpha, false))
            } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                Some(((self.upper[b] - self.beta[i] + slack).max(0.0) / -alpha, -alpha, true))
            } else {
                None
            }
        };
        if self.bland {
            let mut min_ratio = f64::INFINITY;
            let mut largest = 0.0f64;
            for i in 0..self.rows {
                if let Some((ratio, _, _)) = blocking(i, 0.0) {
                    min_ratio = min_ratio.min(ratio);
                }
            }
            let tied = |ratio: f64| ratio <= min_ratio + TIE_TOL * (1.0 + min_ratio);
            for i in 0..self.rows {
                if let Some((ratio, alpha, _)) = blocking(i, 0.0) {
                    if tied(ratio) {
                        largest = largest.max(alpha);
                    }
                }
            }
            // smallest basic index among tied rows whose pivot is not negligible
            let mut best: Option<(usize, bool)> = None;
            for i in 0..self.rows {
                if let Some((ratio, alpha, to_upper)) = blocking(i, 0.0) {
                    if tied(ratio)
                        && alpha >= BLAND_PIVOT_FRACTION * largest
                        && best.is_none_or(|(r, _)| self.basis[i] < self.basis[r])
                    {
                        best = Some((i, to_upper));
                    }
                }
            }
            return (min_ratio, best);
        }
        let bound = (0..self.rows)
            .filter_map(|i| blocking(i, FEASIBILITY_SLACK))
            .fold(f64::INFINITY, |m, (ratio, _, _)| m.min(ratio));
        if !bound.is_finite() {
            return (f64::INFINITY, None);
        }
        let mut best: Option<(usize, f64, f64, bool)> = None;
        for i in 0..self.rows {
            let Some((exact, alpha, to_upper)) = blocking(i, 0.0) else {
                continue;
            };
            if exact <= bound && best.is_none_or(|(_, _, a, _)| alpha > a) {
                best = Some((i, exact, alpha, to_upper));
            }
        }
        let (r, theta, _, to_upper) = best.expect("a row attains the relaxed bound");
        (theta, Some((r, to_upper)))
    }

    /// Minimizes `cost` from the current basic feasible solution.
    fn optimize(&mut self, cost: &[f64], max_iterations: usize) -> Result<Phase> {
        self.price(cost);
        loop {
            self.iterations += 1;
            if self.iterations > max_iterations {
                return Err(Error::LpStatus("stalled (iteration limit)"));
            }
            if self.since_refactor >= REFACTOR_EVERY {
                if self.drift() > DRIFT_TOL {
                    self.refactor(cost)?;
                } else {
                    self.since_refactor = 1;
                }
            }
            let Some(q) = self.entering() else {
                if self.since_refactor == 0 || self.drift() <= DRIFT_TOL {
                    return Ok(Phase::Optimal);
                }
                self.refactor(cost)?;
                continue;
            };
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };

            let (theta, leave) = self.ratio_test(q, dir);
            let flip = self.upper[q];
            if flip <= theta {
                if !flip.is_finite() {
                    return Ok(Phase::Unbounded);
                }
                for i in 0..self.rows {
                    self.beta[i] -= self.at(i, q) * dir * flip;
                }
                self.at_upper[q] = !self.at_upper[q];
                self.degenerate_run = 0;
                self.bland = false;
                continue;
            }
            let Some((r, to_upper)) = leave else {
                return Ok(Phase::Unbounded);
            };

            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }

            let entering_value = self.value(q) + dir * theta;
            for i in 0..self.rows {
                let aiq = self.at(i, q);
                if aiq != 0.0 {
                    self.beta[i] -= aiq * dir * theta;
                }
            }
            let leaving = self.basis[r];
            self.beta[r] = entering_value;
            self.is_basic[leaving] = false;
            self.at_upper[leaving] = to_upper;
            self.is_basic[q] = true;
            self.at_upper[q] = false;
            self.basis[r] = q;
            self.pivot(r, q);
            self.since_refactor += 1;
        }
    }

    /// Largest discrepancy between the current basic values or a sample of tableau
    /// columns and what the original rows imply.
    fn drift(&self) -> f64 {
        let (m, n) = (self.rows, self.cols);
        let mut x: Vec<f64> = (0..n).map(|j| self.value(j)).collect();
        for i in 0..m {
            x[self.basis[i]] = self.beta[i];
        }
        let dot = |row: &[(usize, f64)], v: &[f64]| -> f64 { row.iter().map(|&(j, a)| a * v[j]).sum() };
        let mut worst = 0.0f64;
        for (row, &b) in self.a0.iter().zip(&self.b0) {
            worst = worst.max((dot(row, &x) - b).abs() / (1.0 + b.abs()));
        }
        // B times a tableau column should give back the original column
        let mut y = vec![0.0; n];
        let step = (n / DRIFT_SAMPLES).max(1);
        for j in (self.iterations % step..n).step_by(step) {
            for k in 0..m {
                y[self.basis[k]] = self.a[k * n + j];
            }
            for row in &self.a0 {
                let mut implied = 0.0;
                let mut target = 0.0;
                for &(c, a) in row {
                    if self.is_basic[c] {
                        implied += a * y[c];
                    }
                    if c == j {
                        target = a;
                    }
                }
                worst = worst.max((implied - target).abs() / (1.0 + target.abs()));
            }
        }
        worst
    }

    /// Rebuilds the tableau, the basic values and the reduced costs from the original
    /// data, discarding the rounding error accumulated by pivoting.
    fn refactor(&mut self, cost: &[f64]) -> Result<()> {
        self.since_refactor = 0;
        let (m, n) = (self.rows, self.cols);
        if m == 0 {
            self.price(cost);
            return Ok(());
        }
        let mut position = vec![usize::MAX; n];
        for (k, &b) in self.basis.iter().enumerate() {
            position[b] = k;
        }
        let mut basis = DMatrix::zeros(m, m);
        let mut rhs = DMatrix::zeros(m, n + 1);
        for (i, row) in self.a0.iter().enumerate() {
            rhs[(i, n)] = self.b0[i];
            for &(j, a) in row {
                rhs[(i, j)] = a;
                if position[j] != usize::MAX {
                    basis[(i, position[j])] = a;
                } else if self.at_upper[j] {
                    rhs[(i, n)] -= a * self.upper[j];
                }
            }
        }
        let solved = basis
            .lu()
            .solve(&rhs)
            .ok_or(Error::LpStatus("singular basis"))?;
        for i in 0..m {
            for j in 0..n {
                let v = solved[(i, j)];
                self.a[i * n + j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            self.beta[i] = solved[(i, n)];
        }
        for (k, &b) in self.basis.iter().enumerate() {
            for i in 0..m {
                self.a[i * n + b] = if i == k { 1.0 } else { 0.0 };
            }
        }
        self.price(cost);
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + q];
        let inv = 1.0 / piv;
        self.scratch.clear();
        for j in 0..cols {
            let v = &mut self.a[r * cols + j];
            if *v != 0.0 {
                *v *= inv;
                if v.abs() < DROP_TOL {
                    *v = 0.0;
                } else {
                    self.scratch.push(j);
                }
            }
        }
        self.a[r * cols + q] = 1.0;
        let (before, rest) = self.a.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        let nz = &self.scratch;
        let dense = nz.len() * 4 > cols;
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f != 0.0 {
                if dense {
                    for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                        *x -= f * p;
                    }
                } else {
                    for &j in nz {
                        row[j] -= f * pivot_row[j];
                    }
                }
                row[q] = 0.0;
            }
        };
        for row in before.chunks_exact_mut(cols) {
            eliminate(row);
        }
        for row in after.chunks_exact_mut(cols) {
            eliminate(row);
        }
        eliminate(&mut self.d);
    }
}

/// Solves a linear program. Infeasibility and unboundedness are reported through
/// [`LpStatus`]; errors are reserved for malformed programs.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;
    let nv = p.num_vars();

    let mut maps = Vec::with_capacity(nv);
    let mut upper: Vec<f64> = Vec::new();
    for &(lo, hi) in &p.bounds {
        if lo.is_finite() {
            maps.push(VarMap::Shift { col: upper.len(), lo });
            upper.push(hi - lo);
        } else if hi.is_finite() {
            maps.push(VarMap::Flip { col: upper.len(), hi });
            upper.push(f64::INFINITY);
        } else {
            maps.push(VarMap::Split {
                pos: upper.len(),
                neg: upper.len() + 1,
            });
            upper.push(f64::INFINITY);
            upper.push(f64::INFINITY);
        }
    }
    let structural = upper.len();
    let rows = p.constraints.len();
    let slacks = p.constraints.iter().filter(|c| c.relation != Relation::Eq).count();

    // rows over structural and slack columns, rhs made nonnegative
    let mut row_data: Vec<(Vec<f64>, Option<usize>, f64)> = Vec::with_capacity(rows);
    let mut slack_col = structural;
    for c in &p.constraints {
        let mut coeffs = vec![0.0; structural + slacks];
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    coeffs[col] += a;
                    rhs -= a * lo;
                }
                VarMap::Flip { col, hi } => {
                    coeffs[col] -= a;
                    rhs -= a * hi;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        let slack = match c.relation {
            Relation::Le => {
                coeffs[slack_col] = 1.0;
                slack_col += 1;
                Some(slack_col - 1)
            }
            Relation::Ge => {
                coeffs[slack_col] = -1.0;
                slack_col += 1;
                Some(slack_col - 1)
            }
            Relation::Eq => None,
        };
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        let basic_slack = slack.filter(|&s| coeffs[s] == 1.0);
        row_data.push((coeffs, basic_slack, rhs));
    }
    upper.extend(std::iter::repeat_n(f64::INFINITY, slacks));
    let artificials = row_data.iter().filter(|(_, s, _)| s.is_none()).count();
    let first_artificial = structural + slacks;
    upper.extend(std::iter::repeat_n(f64::INFINITY, artificials));
    let cols = upper.len();

    let mut t = Tableau {
        rows,
        cols,
        a: vec![0.0; rows * cols],
        beta: vec![0.0; rows],
        basis: vec![0; rows],
        is_basic: vec![false; cols],
        at_upper: vec![false; cols],
        upper,
        d: vec![0.0; cols],
        bland: false,
        degenerate_run: 0,
        iterations: 0,
        scratch: Vec::with_capacity(cols),
        a0: Vec::new(),
        b0: Vec::new(),
        since_refactor: 0,
    };
    let mut art = first_artificial;
    let mut max_rhs: f64 = 1.0;
    for (i, (coeffs, basic_slack, rhs)) in row_data.into_iter().enumerate() {
        t.a[i * cols..i * cols + coeffs.len()].copy_from_slice(&coeffs);
        let b = match basic_slack {
            Some(s) => s,
            None => {
                t.a[i * cols + art] = 1.0;
                art += 1;
                art - 1
            }
        };
        t.basis[i] = b;
        t.is_basic[b] = true;
        t.beta[i] = rhs;
        max_rhs = max_rhs.max(rhs);
    }
    let max_iterations = 50 * (rows + cols) + 10_000;
    t.a0 = t
        .a
        .chunks(cols.max(1))
        .take(rows)
        .map(|row| row.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(j, &a)| (j, a)).collect())
        .collect();
    t.b0 = t.beta.clone();

    if artificials > 0 {
        let mut cost1 = vec![0.0; cols];
        cost1[first_artificial..].iter_mut().for_each(|c| *c = 1.0);
        t.optimize(&cost1, max_iterations)?;
        let infeasibility: f64 = (0..rows)
            .filter(|&i| t.basis[i] >= first_artificial)
            .map(|i| t.beta[i])
            .sum();
        if infeasibility > 1e-7 * max_rhs {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; nv],
                objective: 0.0,
            });
        }
        for j in first_artificial..cols {
            t.upper[j] = 0.0;
            t.at_upper[j] = false;
        }
        t.bland = false;
        t.degenerate_run = 0;
    }

    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost2 = vec![0.0; cols];
    for (j, map) in maps.iter().enumerate() {
        let c = sign * p.objective[j];
        match *map {
            VarMap::Shift { col, .. } => cost2[col] = c,
            VarMap::Flip { col, .. } => cost2[col] = -c,
            VarMap::Split { pos, neg } => {
                cost2[pos] = c;
                cost2[neg] = -c;
            }
        }
    }
    if let Phase::Unbounded = t.optimize(&cost2, max_iterations)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; nv],
            objective: sign * f64::INFINITY * -1.0,
        });
    }

    let mut y: Vec<f64> = (0..cols).map(|j| t.value(j)).collect();
    for i in 0..rows {
        y[t.basis[i]] = t.beta[i];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Flip { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = p.objective_value(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
    })
}
