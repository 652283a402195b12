//! Exact two-phase simplex over arbitrary-precision rationals, with Bland's rule
//! throughout and bounds written out as explicit rows.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense};

pub const RATIONAL_MAX_VARS: usize = 12;
pub const RATIONAL_MAX_CONSTRAINTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalSolution {
    pub status: LpStatus,
    pub x: Vec<BigRational>,
    pub objective: BigRational,
}

impl RationalSolution {
    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(to_f64).collect()
    }

    pub fn objective_f64(&self) -> f64 {
        to_f64(&self.objective)
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Input(format!("{v} is not a finite number")))
}

fn zero() -> BigRational {
    BigRational::zero()
}

enum Var {
    Shift(usize, BigRational),
    Flip(usize, BigRational),
    Split(usize, usize),
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        self.rhs[r] = &self.rhs[r] / &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
            self.rhs[i] = &self.rhs[i] - &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[BigRational]) -> Vec<BigRational> {
        let mut d = cost.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                *dj = &*dj - cb * a;
            }
        }
        d
    }

    /// Minimizes `cost` over columns in `allowed`; false when unbounded.
    fn minimize(&mut self, cost: &[BigRational], allowed: &[bool]) -> bool {
        loop {
            let d = self.reduced_costs(cost);
            let Some(q) = (0..d.len()).find(|&j| allowed[j] && d[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &leave {
                        None => true,
                        Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, q),
            }
        }
    }
}

/// Solves `p` exactly. Every float coefficient is read as the rational it denotes.
pub fn rational_simplex_reference(p: &LinearProgram) -> Result<RationalSolution> {
    p.validate()?;
    let nv = p.num_vars();
    if nv > RATIONAL_MAX_VARS {
        return Err(Error::Capacity {
            what: "rational simplex variables",
            size: nv,
            limit: RATIONAL_MAX_VARS,
        });
    }
    if p.constraints.len() > RATIONAL_MAX_CONSTRAINTS {
        return Err(Error::Capacity {
            what: "rational simplex constraints",
            size: p.constraints.len(),
            limit: RATIONAL_MAX_CONSTRAINTS,
        });
    }

    // nonnegative internal variables y
    let mut vars = Vec::with_capacity(nv);
    let mut ny = 0;
    let mut rows: Vec<(Vec<BigRational>, Relation, BigRational)> = Vec::new();
    let mut bound_rows: Vec<(usize, BigRational)> = Vec::new();
    for &(lo, hi) in &p.bounds {
        if lo.is_finite() {
            let lo_q = exact(lo)?;
            if hi.is_finite() {
                bound_rows.push((ny, exact(hi)? - &lo_q));
            }
            vars.push(Var::Shift(ny, lo_q));
            ny += 1;
        } else if hi.is_finite() {
            vars.push(Var::Flip(ny, exact(hi)?));
            ny += 1;
        } else {
            vars.push(Var::Split(ny, ny + 1));
            ny += 2;
        }
    }
    for c in &p.constraints {
        let mut coeffs = vec![zero(); ny];
        let mut rhs = exact(c.rhs)?;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let a = exact(a)?;
            match &vars[j] {
                Var::Shift(k, lo) => {
                    rhs -= &a * lo;
                    coeffs[*k] += a;
                }
                Var::Flip(k, hi) => {
                    rhs -= &a * hi;
                    coeffs[*k] -= a;
                }
                Var::Split(pos, neg) => {
                    coeffs[*neg] -= &a;
                    coeffs[*pos] += a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (k, width) in bound_rows {
        let mut coeffs = vec![zero(); ny];
        coeffs[k] = BigRational::one();
        rows.push((coeffs, Relation::Le, width));
    }

    // standard form with slacks and artificials
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let first_art = ny + slack_count;
    let mut art_count = 0;
    let mut layout = Vec::with_capacity(m);
    let mut next_slack = ny;
    for (coeffs, rel, rhs) in rows {
        let flip = rhs.is_negative();
        let rel = match (rel, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        let coeffs: Vec<BigRational> = if flip { coeffs.into_iter().map(|v| -v).collect() } else { coeffs };
        let rhs = if flip { -rhs } else { rhs };
        let slack = (rel != Relation::Eq).then(|| {
            next_slack += 1;
            next_slack - 1
        });
        let needs_art = rel != Relation::Le;
        if needs_art {
            art_count += 1;
        }
        layout.push((coeffs, rel, rhs, slack, needs_art));
    }
    let cols = first_art + art_count;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };
    let mut art = first_art;
    for (coeffs, rel, rhs, slack, needs_art) in layout {
        let mut row = coeffs;
        row.resize(cols, zero());
        if let Some(s) = slack {
            row[s] = if rel == Relation::Le {
                BigRational::one()
            } else {
                -BigRational::one()
            };
        }
        let basic = if needs_art {
            row[art] = BigRational::one();
            art += 1;
            art - 1
        } else {
            slack.expect("inequality row has a slack")
        };
        t.rows.push(row);
        t.rhs.push(rhs);
        t.basis.push(basic);
    }

    let all = vec![true; cols];
    if art_count > 0 {
        let mut cost1 = vec![zero(); cols];
        cost1[first_art..].iter_mut().for_each(|c| *c = BigRational::one());
        t.minimize(&cost1, &all);
        let infeasibility: BigRational = (0..m)
            .filter(|&i| t.basis[i] >= first_art)
            .map(|i| t.rhs[i].clone())
            .fold(zero(), |a, b| a + b);
        if infeasibility.is_positive() {
            return Ok(RationalSolution {
                status: LpStatus::Infeasible,
                x: vec![zero(); nv],
                objective: zero(),
            });
        }
        // drive zero-valued artificials out of the basis where possible
        for i in 0..m {
            if t.basis[i] >= first_art {
                if let Some(c) = (0..first_art).find(|&c| !t.rows[i][c].is_zero()) {
                    t.pivot(i, c);
                }
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|c| c < first_art).collect();

    let sign = match p.sense {
        Sense::Minimize => BigRational::one(),
        Sense::Maximize => -BigRational::one(),
    };
    let mut cost2 = vec![zero(); cols];
    for (j, var) in vars.iter().enumerate() {
        let c = &sign * exact(p.objective[j])?;
        match var {
            Var::Shift(k, _) => cost2[*k] = c,
            Var::Flip(k, _) => cost2[*k] = -c,
            Var::Split(pos, neg) => {
                cost2[*neg] = -c.clone();
                cost2[*pos] = c;
            }
        }
    }
    if !t.minimize(&cost2, &allowed) {
        return Ok(RationalSolution {
            status: LpStatus::Unbounded,
            x: vec![zero(); nv],
            objective: zero(),
        });
    }
    let mut y = vec![zero(); cols];
    for i in 0..m {
        y[t.basis[i]] = t.rhs[i].clone();
    }
    let x: Vec<BigRational> = vars
        .iter()
        .map(|v| match v {
            Var::Shift(k, lo) => lo + &y[*k],
            Var::Flip(k, hi) => hi - &y[*k],
            Var::Split(pos, neg) => &y[*pos] - &y[*neg],
        })
        .collect();
    let mut objective = zero();
    for (c, xj) in p.objective.iter().zip(&x) {
        objective += exact(*c)? * xj;
    }
    Ok(RationalSolution {
        status: LpStatus::Optimal,
        x,
        objective,
    })
}
