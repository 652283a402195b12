use super::enumerate_independent_sets;
use crate::error::{input_err, Error, Result};
use crate::graph::{coverage_weight, WeightedGraph};
use crate::lp::{cutting_plane_maximize, Cut, LinearProgram, Relation, Sense};
use crate::matroid::Matroid;
use crate::strategy::InterdictionStrategy;
use crate::vertex_set::VertexSet;

/// Largest `rows · cols` product the exact game will build.
pub const GAME_LIMIT: usize = 1 << 22;

/// Payoff matrix of the simultaneous game: entry `(S, X)` is the weight covered by
/// `X \ S`.
#[derive(Clone, Debug)]
pub struct GameMatrix {
    rows: Vec<VertexSet>,
    cols: Vec<VertexSet>,
    payoff: Vec<f64>,
}

impl GameMatrix {
    pub fn new(g: &WeightedGraph, rows: Vec<VertexSet>, cols: Vec<VertexSet>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return input_err("a game needs at least one row and one column");
        }
        let size = rows.len().saturating_mul(cols.len());
        if size > GAME_LIMIT {
            return Err(Error::Capacity {
                what: "game matrix entries",
                size,
                limit: GAME_LIMIT,
            });
        }
        let mut payoff = Vec::with_capacity(size);
        for s in &rows {
            for x in &cols {
                payoff.push(coverage_weight(g, &x.difference(s)));
            }
        }
        Ok(GameMatrix { rows, cols, payoff })
    }

    /// Rows and columns restricted to bases. Removing fewer vertices never helps the
    /// leader and attacking more never hurts the follower, so the game value and an
    /// optimal leader strategy survive the restriction.
    pub fn bases(g: &WeightedGraph, ml: &Matroid, mf: &Matroid) -> Result<Self> {
        let basis_only = |m: &Matroid| -> Result<Vec<VertexSet>> {
            let r = m.full_rank();
            Ok(enumerate_independent_sets(m)?
                .into_iter()
                .filter(|s| s.len() == r)
                .collect())
        };
        Self::new(g, basis_only(ml)?, basis_only(mf)?)
    }

    pub fn rows(&self) -> &[VertexSet] {
        &self.rows
    }

    pub fn cols(&self) -> &[VertexSet] {
        &self.cols
    }

    pub fn payoff(&self, row: usize, col: usize) -> f64 {
        self.payoff[row * self.cols.len() + col]
    }

    /// Expected payoff of every column under a mixed row strategy.
    pub fn column_values(&self, row_weights: &[f64]) -> Vec<f64> {
        let c = self.cols.len();
        let mut out = vec![0.0; c];
        for (r, &w) in row_weights.iter().enumerate() {
            if w != 0.0 {
                for (o, p) in out.iter_mut().zip(&self.payoff[r * c..(r + 1) * c]) {
                    *o += w * p;
                }
            }
        }
        out
    }

    /// Best column response value against a mixed row strategy.
    pub fn best_response_value(&self, row_weights: &[f64]) -> f64 {
        self.column_values(row_weights)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exact optimal leader strategy and its value, by solving the zero-sum game between
/// leader bases and follower bases. Columns enter the program lazily as best responses.
pub fn exact_rmvci_matrix_game(
    g: &WeightedGraph,
    ml: &Matroid,
    mf: &Matroid,
) -> Result<(InterdictionStrategy, f64)> {
    let n = g.vertex_count();
    if ml.ground_size() != n || mf.ground_size() != n {
        return input_err("matroid ground sets must match the graph");
    }
    let game = GameMatrix::bases(g, ml, mf)?;
    let r = game.rows.len();
    let v = r;
    let mut objective = vec![0.0; r + 1];
    objective[v] = -1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    let mut simplex_row = vec![1.0; r + 1];
    simplex_row[v] = 0.0;
    lp.add_constraint(simplex_row, Relation::Eq, 1.0);

    let column_cut = |c: usize| -> Cut {
        let mut coeffs: Vec<f64> = (0..r).map(|row| game.payoff(row, c)).collect();
        coeffs.push(-1.0);
        Cut { coeffs, rhs: 0.0 }
    };
    let cap = game.cols.len() + 10;
    let outcome = cutting_plane_maximize(lp, cap, |point| {
        let values = game.column_values(&point[..r]);
        let (best, val) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (c, x)| if x > acc.1 { (c, x) } else { acc });
        Ok(if val - point[v] > 1e-10 * (1.0 + val.abs()) {
            vec![column_cut(best)]
        } else {
            vec![]
        })
    })?;

    let weights: Vec<f64> = outcome.solution.x[..r]
        .iter()
        .map(|&p| if p > 1e-12 { p } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|p| p / total).collect();
    let support: Vec<(f64, VertexSet)> = weights
        .iter()
        .zip(&game.rows)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, s)| (*p, s.clone()))
        .collect();
    let pi = InterdictionStrategy::new(ml, support)?;
    let mut dense = vec![0.0; r];
    for (p, s) in pi.support() {
        let idx = game.rows.iter().position(|t| t == s).expect("row of the game");
        dense[idx] = *p;
    }
    let theta = game.best_response_value(&dense);
    Ok((pi, theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_game() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let u1 = Matroid::uniform(2, 1).unwrap();
        let (pi, theta) = exact_rmvci_matrix_game(&g, &u1, &u1).unwrap();
        assert!((theta - 0.5).abs() < 1e-12);
        assert_eq!(pi.len(), 2);
        assert!(pi.support().iter().all(|(p, _)| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn extreme_leaders() {
        let k4 = WeightedGraph::complete(4).unwrap();
        let mf = Matroid::uniform(4, 2).unwrap();
        let (_, theta) = exact_rmvci_matrix_game(&k4, &Matroid::uniform(4, 4).unwrap(), &mf).unwrap();
        assert_eq!(theta, 0.0);
        let (pi, theta) = exact_rmvci_matrix_game(&k4, &Matroid::uniform(4, 0).unwrap(), &mf).unwrap();
        assert_eq!(theta, 5.0);
        assert_eq!(pi, InterdictionStrategy::null());
    }

    #[test]
    fn payoff_matrix_entries() {
        let k3 = WeightedGraph::complete(3).unwrap();
        let all = |n: usize, k: usize| enumerate_independent_sets(&Matroid::uniform(n, k).unwrap()).unwrap();
        let game = GameMatrix::new(&k3, all(3, 1), all(3, 2)).unwrap();
        assert_eq!(game.rows()[0], VertexSet::new());
        for (c, x) in game.cols().iter().enumerate() {
            assert_eq!(game.payoff(0, c), coverage_weight(&k3, x));
        }
        assert!(game.payoff.iter().all(|&p| p >= 0.0));
    }
}
