/// Numerical knobs shared by the solver entry points.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Violation above which a rank inequality is added as a cut.
    pub separation_tol: f64,
    /// Violation above which a follower set is added to the leader's working program.
    pub leader_tol: f64,
    /// Use the compact dual program when both matroids are uniform.
    pub use_uniform_dual: bool,
    /// Follower best responses are computed exactly when the follower matroid has at
    /// most this many independent sets.
    pub exact_follower_limit: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            separation_tol: 1e-9,
            leader_tol: 1e-8,
            use_uniform_dual: false,
            exact_follower_limit: 1 << 20,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("separation_tol", self.separation_tol), ("leader_tol", self.leader_tol)] {
            if !(v.is_finite() && v > 0.0 && v < 1e-2) {
                return crate::error::input_err(format!("{name} must lie in (0, 0.01), got {v}"));
            }
        }
        Ok(())
    }
}
