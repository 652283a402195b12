use std::collections::HashSet;

use super::{dot, solve_lp, LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::error::{input_err, Error, Result};

/// A valid inequality `coeffs · x <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Cut {
    pub fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.coeffs, x) - self.rhs
    }

    fn key(&self) -> Vec<u64> {
        self.coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .map(|v| (v + 0.0).to_bits())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CutLoopOutcome {
    pub solution: LpSolution,
    pub iterations: usize,
    pub cuts_added: usize,
}

/// Repeatedly solves `base`, asks `separate` for inequalities violated by the current
/// optimum and appends them, until none are returned.
///
/// A round in which every returned cut is already present ends the loop when the
/// worst reported violation is below `1e-7` (solver noise) and fails otherwise.
pub fn cutting_plane_maximize<F>(
    base: LinearProgram,
    max_iterations: usize,
    mut separate: F,
) -> Result<CutLoopOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<Cut>>,
{
    if base.sense != Sense::Maximize {
        return input_err("cutting_plane_maximize needs a maximization program");
    }
    let mut lp = base;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut cuts_added = 0;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let solution = solve_lp(&lp)?;
        match solution.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::LpStatus("infeasible")),
            LpStatus::Unbounded => return Err(Error::LpStatus("unbounded")),
        }
        let cuts = separate(&solution.x)?;
        if cuts.is_empty() {
            return Ok(CutLoopOutcome {
                solution,
                iterations,
                cuts_added,
            });
        }
        let mut fresh = 0;
        let mut worst: f64 = 0.0;
        for cut in cuts {
            if cut.coeffs.len() != lp.num_vars() {
                return input_err(format!(
                    "cut has {} coefficients, expected {}",
                    cut.coeffs.len(),
                    lp.num_vars()
                ));
            }
            worst = worst.max(cut.violation(&solution.x));
            if seen.insert(cut.key()) {
                fresh += 1;
                lp.add_constraint(cut.coeffs, Relation::Le, cut.rhs);
            }
        }
        if fresh == 0 {
            if worst <= 1e-7 {
                return Ok(CutLoopOutcome {
                    solution,
                    iterations,
                    cuts_added,
                });
            }
            return Err(Error::NonConvergence {
                iterations,
                violation: worst,
                last: solution.x,
            });
        }
        cuts_added += fresh;
        if iterations >= max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                violation: worst,
                last: solution.x,
            });
        }
    }
}
