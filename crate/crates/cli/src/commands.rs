use std::path::Path;
use std::time::Instant;

use rmvci::oracle::{exact_rmvci_matrix_game, gap_instance, solve_follower_ilp_bruteforce};
use rmvci::{
    approx_follower_with, caratheodory_decompose, solve_rmvci, Error, InterdictionStrategy, MarginalStrategy,
    SolveOptions,
};
use serde_json::{Map, Value};

use crate::instance::{self, SupportEntry};
use crate::report::{real, reals, set, strategy, Report};
use crate::{CliError, Common};

fn options(common: &Common, uniform_dual: bool) -> Result<SolveOptions, CliError> {
    let opts = SolveOptions {
        separation_tol: common.tol,
        use_uniform_dual: uniform_dual,
        ..SolveOptions::default()
    };
    opts.validate().map_err(|e| CliError::Input(format!("--tol: {e}")))?;
    Ok(opts)
}

/// Emits `report` marked with the failure, then hands the error back.
fn fail(mut report: Report, common: &Common, status: &'static str, err: CliError) -> Result<(), CliError> {
    report.status = status;
    report.error = Some(err.to_string());
    if let CliError::Solver(Error::NonConvergence { iterations, violation, last }) = &err {
        report.value("iterations", *iterations);
        report.value("max_violation", real(*violation));
        report.value("last_iterate", reals(last));
    }
    report.emit(common.out.as_deref())?;
    Err(err)
}

fn status_of(err: &CliError) -> &'static str {
    match err.exit_code() {
        1 => "invariant failure",
        3 => "nonconvergence",
        4 => "capacity exceeded",
        _ => "error",
    }
}

pub fn solve(echo: &str, path: &Path, uniform_dual: bool, common: &Common) -> Result<(), CliError> {
    let inst = instance::load(path)?;
    let opts = options(common, uniform_dual)?;
    let mut report = Report::new(echo.to_string(), Some(inst.digest.clone()));
    let start = Instant::now();
    let cert = match solve_rmvci(&inst.graph, &inst.leader, &inst.follower, &opts) {
        Ok(c) => c,
        Err(e) => {
            let err = CliError::from(e);
            let status = status_of(&err);
            return fail(report, common, status, err);
        }
    };
    report.timing(common.timings, "solve", start.elapsed());
    report
        .value("surrogate_value", real(cert.surrogate_value))
        .value("theta_lower", real(cert.theta.lower))
        .value("theta_upper", real(cert.theta.upper))
        .value("theta_exact", cert.theta.exact)
        .value("lower_bound", real(cert.lower_bound))
        .value("guaranteed_ratio", real(cert.guaranteed_ratio))
        .value("best_attack", set(&cert.theta.attack_set))
        .value("marginals", reals(cert.marginals.q()));
    report.strategy = Some(strategy(&cert.pi_prime));
    report.emit(common.out.as_deref())
}

pub fn follower(echo: &str, path: &Path, strategy_from: Option<&Path>, common: &Common) -> Result<(), CliError> {
    let inst = instance::load(path)?;
    let pi = match strategy_from {
        Some(report_path) => {
            #[derive(serde::Deserialize)]
            struct WithStrategy {
                strategy: Vec<SupportEntry>,
            }
            let parsed: WithStrategy = instance::parse(&instance::read(report_path)?)?;
            instance::strategy_from_entries("strategy", &inst.leader, parsed.strategy)?
        }
        None => inst
            .strategy
            .clone()
            .ok_or_else(|| CliError::Input("strategy: the follower command needs a leader strategy".into()))?,
    };
    let opts = options(common, false)?;
    let mut report = Report::new(echo.to_string(), Some(inst.digest.clone()));
    let start = Instant::now();
    let sol = match approx_follower_with(&inst.graph, &pi, &inst.follower, &opts) {
        Ok(s) => s,
        Err(e) => {
            let err = CliError::from(e);
            let status = status_of(&err);
            return fail(report, common, status, err);
        }
    };
    report.timing(common.timings, "approximate", start.elapsed());
    report
        .value("attack_set", set(&sol.attack_set))
        .value("ilp_value", real(sol.ilp_value))
        .value("lp_value", real(sol.lp_value))
        .value("ratio", real(sol.ratio_bound));
    let start = Instant::now();
    match solve_follower_ilp_bruteforce(&inst.graph, &pi, &inst.follower) {
        Ok((best, exact)) => {
            report.timing(common.timings, "exact", start.elapsed());
            let approx_ratio = if sol.ilp_value > 0.0 { exact / sol.ilp_value } else { 1.0 };
            report
                .value("exact_attack", set(&best))
                .value("exact_value", real(exact))
                .value("exact_over_approx", real(approx_ratio));
        }
        Err(Error::Capacity { .. }) => {
            report.value("exact_value", Value::Null);
        }
        Err(e) => return Err(e.into()),
    }
    report.strategy = Some(strategy(&pi));
    report.emit(common.out.as_deref())
}

pub fn gap_study(echo: &str, n_max: usize, step: usize, common: &Common) -> Result<(), CliError> {
    if n_max % 2 == 1 || !(4..=64).contains(&n_max) {
        return Err(CliError::Input(format!("--n-max: need an even value in [4, 64], got {n_max}")));
    }
    if step == 0 || step % 2 == 1 {
        return Err(CliError::Input(format!("--step: need a positive even value, got {step}")));
    }
    let opts = options(common, false)?;
    let mut report = Report::new(echo.to_string(), None);
    let start = Instant::now();
    for n in (4..=n_max).step_by(step) {
        let (g, mf) = gap_instance(n)?;
        let sol = approx_follower_with(&g, &InterdictionStrategy::null(), &mf, &opts)?;
        let mut row = Map::new();
        row.insert("n".into(), n.into());
        row.insert("lp".into(), real(sol.lp_value));
        row.insert("ilp".into(), real(sol.ilp_value));
        row.insert("ratio".into(), real(sol.lp_value / sol.ilp_value));
        row.insert("limit".into(), real(4.0 / 3.0));
        report.table.push(row);
    }
    report.timing(common.timings, "study", start.elapsed());
    report.emit(common.out.as_deref())
}

pub fn decompose(echo: &str, path: &Path, common: &Common) -> Result<(), CliError> {
    let inst = instance::load(path)?;
    let q = inst
        .marginals
        .clone()
        .ok_or_else(|| CliError::Input("marginals: the decompose command needs a marginal vector".into()))?;
    let ms = MarginalStrategy::new(&inst.leader, q.clone()).map_err(|e| CliError::Input(format!("marginals: {e}")))?;
    let mut report = Report::new(echo.to_string(), Some(inst.digest.clone()));
    let start = Instant::now();
    let pi = match caratheodory_decompose(&inst.leader, &ms) {
        Ok(pi) => pi,
        Err(e) => {
            let err = CliError::from(e);
            let status = status_of(&err);
            return fail(report, common, status, err);
        }
    };
    report.timing(common.timings, "decompose", start.elapsed());
    let back = pi.vertex_marginals(inst.graph.vertex_count());
    let residual = back.iter().zip(&q).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    report
        .value("support_size", pi.len())
        .value("residual", real(residual));
    report.strategy = Some(strategy(&pi));
    report.emit(common.out.as_deref())
}

pub fn exact(echo: &str, path: &Path, common: &Common) -> Result<(), CliError> {
    let inst = instance::load(path)?;
    let mut report = Report::new(echo.to_string(), Some(inst.digest.clone()));
    let start = Instant::now();
    let (pi, value) = match exact_rmvci_matrix_game(&inst.graph, &inst.leader, &inst.follower) {
        Ok(r) => r,
        Err(e) => {
            let err = CliError::from(e);
            let status = status_of(&err);
            return fail(report, common, status, err);
        }
    };
    report.timing(common.timings, "exact", start.elapsed());
    report.value("optimum", real(value));
    report.strategy = Some(strategy(&pi));
    report.emit(common.out.as_deref())
}
