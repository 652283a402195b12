//! Randomized invariant battery run against one instance. Each trial uses the
//! instance's strategy when it has one and a fresh random strategy otherwise.

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmvci::random::{random_independent_set, random_polytope_point, random_strategy};
use rmvci::{
    caratheodory_decompose, effective_weights, eval_f, eval_l, eval_ltilde, expected_payoff,
    expected_payoff_closed_form, marginals_of, EdgeWeights, EffectiveWeights, InterdictionStrategy,
    MarginalStrategy,
};
use serde_json::{Map, Value};

use crate::instance::{self, Instance};
use crate::report::{real, reals, set, strategy, Report};
use crate::{CliError, Common};

const SANDWICH_TOL: f64 = 1e-9;
const INTEGRAL_TOL: f64 = 1e-12;
const PAYOFF_TOL: f64 = 1e-9;
const ROUND_TRIP_TOL: f64 = 1e-7;

struct Invariant {
    name: &'static str,
    failures: usize,
    counterexample: Option<Map<String, Value>>,
}

impl Invariant {
    fn new(name: &'static str) -> Self {
        Invariant {
            name,
            failures: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> Map<String, Value>) {
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(example());
            }
        }
    }
}

fn entry(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn strategy_value(pi: &InterdictionStrategy) -> Value {
    serde_json::to_value(strategy(pi)).expect("strategies serialize")
}

/// Pushes the joint coefficient of the first edge above zero.
fn corrupt(ew: &EffectiveWeights) -> EffectiveWeights {
    let mut edges: Vec<EdgeWeights> = ew.edges().to_vec();
    if let Some(e) = edges.first_mut() {
        e.both = e.u_side + e.v_side + 1.0;
    }
    EffectiveWeights::from_raw(edges)
}

struct Battery {
    joint_sign: Invariant,
    concave: Invariant,
    surrogate: Invariant,
    payoff: Invariant,
    round_trip: Invariant,
}

fn trial(inst: &Instance, rng: &mut ChaCha8Rng, t: usize, inject_fault: bool, b: &mut Battery) -> Result<(), CliError> {
    let g = &inst.graph;
    let n = g.vertex_count();
    let pi = match &inst.strategy {
        Some(pi) => pi.clone(),
        None => random_strategy(rng, &inst.leader, 4)?,
    };
    let pm = marginals_of(g, &pi);
    let mut ew = effective_weights(g, &pm)?;
    if inject_fault {
        ew = corrupt(&ew);
    }

    let bad = ew.joint_coefficient_violations();
    b.joint_sign.record(bad.is_empty(), || {
        entry(vec![
            ("trial", t.into()),
            ("strategy", strategy_value(&pi)),
            ("edges", bad.clone().into()),
        ])
    });

    let x = random_polytope_point(rng, &inst.follower, 4)?;
    let (f, l) = (eval_f(g, &ew, &x), eval_l(g, &ew, &x));
    b.concave.record(f >= 0.75 * l - SANDWICH_TOL, || {
        entry(vec![
            ("trial", t.into()),
            ("strategy", strategy_value(&pi)),
            ("x", reals(&x)),
            ("f", real(f)),
            ("l", real(l)),
        ])
    });
    let s = random_independent_set(rng, &inst.follower)?;
    let xi = s.indicator(n);
    let (fi, li) = (eval_f(g, &ew, &xi), eval_l(g, &ew, &xi));
    b.concave.record((fi - li).abs() <= INTEGRAL_TOL * (1.0 + li.abs()), || {
        entry(vec![
            ("trial", t.into()),
            ("strategy", strategy_value(&pi)),
            ("integral_set", set(&s)),
            ("f", real(fi)),
            ("l", real(li)),
        ])
    });

    let lt = eval_ltilde(g, pm.q(), &x);
    b.surrogate.record(0.5 * lt - SANDWICH_TOL <= l && l <= lt + SANDWICH_TOL, || {
        entry(vec![
            ("trial", t.into()),
            ("strategy", strategy_value(&pi)),
            ("x", reals(&x)),
            ("l", real(l)),
            ("surrogate", real(lt)),
        ])
    });

    let direct = expected_payoff(g, &pi, &s);
    let closed = expected_payoff_closed_form(g, &ew, &s);
    b.payoff.record((direct - closed).abs() <= PAYOFF_TOL * (1.0 + direct.abs()), || {
        entry(vec![
            ("trial", t.into()),
            ("strategy", strategy_value(&pi)),
            ("attack", set(&s)),
            ("direct", real(direct)),
            ("closed_form", real(closed)),
        ])
    });

    let q = random_polytope_point(rng, &inst.leader, n + 1)?;
    let outcome = MarginalStrategy::new(&inst.leader, q.clone()).and_then(|ms| caratheodory_decompose(&inst.leader, &ms));
    let verdict = match &outcome {
        Ok(back) => {
            let err = back
                .vertex_marginals(n)
                .iter()
                .zip(&q)
                .fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
            let independent = back
                .support()
                .iter()
                .all(|(_, s)| inst.leader.is_independent(s).unwrap_or(false));
            if err > ROUND_TRIP_TOL {
                Some(format!("marginal error {err:e}"))
            } else if back.len() > n + 1 {
                Some(format!("support of {} sets", back.len()))
            } else if !independent {
                Some("dependent support set".to_string())
            } else {
                None
            }
        }
        Err(e) => Some(e.to_string()),
    };
    b.round_trip.record(verdict.is_none(), || {
        entry(vec![
            ("trial", t.into()),
            ("marginals", reals(&q)),
            ("problem", verdict.clone().unwrap_or_default().into()),
        ])
    });
    Ok(())
}

pub fn run(
    echo: &str,
    path: &Path,
    trials: usize,
    seed: u64,
    inject_fault: bool,
    common: &Common,
) -> Result<(), CliError> {
    let inst = instance::load(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Battery {
        joint_sign: Invariant::new("joint-coefficient-sign"),
        concave: Invariant::new("concave-lower-bound"),
        surrogate: Invariant::new("surrogate-sandwich"),
        payoff: Invariant::new("payoff-agreement"),
        round_trip: Invariant::new("decomposition-round-trip"),
    };
    let start = Instant::now();
    for t in 0..trials {
        trial(&inst, &mut rng, t, inject_fault, &mut b)?;
    }
    let mut report = Report::new(echo.to_string(), Some(inst.digest.clone()));
    report.timing(common.timings, "check", start.elapsed());
    report.value("trials", trials).value("seed", seed);
    let mut failed = Vec::new();
    for inv in [b.joint_sign, b.concave, b.surrogate, b.payoff, b.round_trip] {
        let mut row = Map::new();
        row.insert("invariant".into(), inv.name.into());
        row.insert("passed".into(), (inv.failures == 0).into());
        row.insert("failures".into(), inv.failures.into());
        if let Some(ce) = inv.counterexample {
            row.insert("counterexample".into(), Value::Object(ce));
        }
        if inv.failures > 0 {
            failed.push(inv.name);
        }
        report.checks.push(row);
    }
    if failed.is_empty() {
        return report.emit(common.out.as_deref());
    }
    report.status = "invariant failure";
    let err = CliError::Invariant(failed.join(", "));
    report.error = Some(err.to_string());
    report.emit(common.out.as_deref())?;
    Err(err)
}
