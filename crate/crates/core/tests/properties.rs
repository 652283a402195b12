//! Randomized invariants. Each case draws a seed and builds its instance from the
//! seeded generators, so a failing seed reproduces exactly.

mod common;

use proptest::prelude::*;
use rand::Rng;
use rmvci::lp::{
    cutting_plane_maximize, separate_matroid_polytope, solve_lp, LinearProgram, LpStatus, Relation, Sense,
    Separation,
};
use rmvci::oracle::{
    enumerate_independent_sets, exact_rmvci_matrix_game, gap_values, rational_simplex_reference,
    solve_follower_ilp_bruteforce, GameMatrix,
};
use rmvci::random::{
    random_graph, random_independent_set, random_matroid, random_polytope_point, random_strategy, MatroidFamily,
};
use rmvci::*;

use common::{brute_follower, brute_max_violation, direct_payoff, independent, rank_table, rng};

fn family(r: &mut impl Rng) -> MatroidFamily {
    MatroidFamily::ALL[r.gen_range(0..4)]
}

struct Instance {
    g: WeightedGraph,
    ml: Matroid,
    mf: Matroid,
    pi: InterdictionStrategy,
}

fn instance(seed: u64, n_max: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=n_max);
    let density = r.gen_range(0.1..1.0);
    let g = random_graph(&mut r, n, density, 5.0).unwrap();
    let (a, b) = (family(&mut r), family(&mut r));
    let ml = random_matroid(&mut r, n, a).unwrap();
    let mf = random_matroid(&mut r, n, b).unwrap();
    let pi = random_strategy(&mut r, &ml, 5).unwrap();
    Instance { g, ml, mf, pi }
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn matroid_axioms_hold(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        prop_assert!(independent(&m, 0));
        let ranks = rank_table(&m);
        for s in 0u64..1 << n {
            let ind = independent(&m, s);
            prop_assert_eq!(ind, ranks[s as usize] == s.count_ones() as usize);
            if ind {
                for i in 0..n {
                    if s >> i & 1 == 1 {
                        prop_assert!(independent(&m, s & !(1 << i)));
                    }
                }
            }
        }
        // exchange: a smaller independent set extends from a larger one
        for _ in 0..50 {
            let a = random_independent_set(&mut r, &m).unwrap().mask().unwrap();
            let b = random_independent_set(&mut r, &m).unwrap().mask().unwrap();
            let (small, large) = if a.count_ones() < b.count_ones() { (a, b) } else { (b, a) };
            if small.count_ones() < large.count_ones() {
                prop_assert!((0..n).any(|i| (large & !small) >> i & 1 == 1 && independent(&m, small | 1 << i)));
            }
        }
    }

    #[test]
    fn rank_is_monotone_and_submodular(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        let full = (1u64 << n) - 1;
        for _ in 0..200 {
            let b: u64 = r.gen::<u64>() & full;
            let a = b & r.gen::<u64>();
            let rank = |s: u64| m.rank(&VertexSet::from_mask(s)).unwrap();
            prop_assert!(rank(a) <= rank(b));
            let i = r.gen_range(0..n);
            if b >> i & 1 == 0 {
                prop_assert!(rank(a | 1 << i) - rank(a) >= rank(b | 1 << i) - rank(b));
            }
        }
        let ranks = rank_table(&m);
        for s in 0u64..1 << n {
            prop_assert_eq!(m.rank(&VertexSet::from_mask(s)).unwrap(), ranks[s as usize]);
        }
    }

    #[test]
    fn greedy_matches_enumeration(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..5.0)).collect();
        let best = enumerate_independent_sets(&m)
            .unwrap()
            .iter()
            .map(|s| s.iter().map(|i| w[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let (s, v) = m.greedy_max_weight(&w).unwrap();
        prop_assert!(m.is_independent(&s).unwrap());
        prop_assert!((v - best).abs() < 1e-9);
    }

    #[test]
    fn coverage_is_bounded_by_total_weight(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let g = random_graph(&mut r, n, 0.5, 3.0).unwrap();
        let s = VertexSet::from_mask(r.gen::<u64>() & ((1 << n) - 1));
        let c = coverage_weight(&g, &s);
        let covers = g.edges().iter().all(|e| e.w == 0.0 || s.contains(e.u) || s.contains(e.v));
        prop_assert!(c <= g.total_weight() + 1e-12);
        prop_assert_eq!(covers, (c - g.total_weight()).abs() <= 1e-12);
    }

    #[test]
    fn payoff_forms_agree_and_are_monotone(seed in any::<u64>()) {
        let inst = instance(seed, 12);
        let mut r = rng(seed ^ 1);
        let n = inst.g.vertex_count();
        let pm = marginals_of(&inst.g, &inst.pi);
        let ew = effective_weights(&inst.g, &pm).unwrap();
        prop_assert!(ew.joint_coefficient_violations().is_empty());
        for (e, w) in ew.edges().iter().enumerate() {
            prop_assert!(w.both <= w.u_side + w.v_side + 1e-12, "edge {}", e);
        }
        for _ in 0..20 {
            let x = r.gen::<u64>() & ((1 << n) - 1);
            let set = VertexSet::from_mask(x);
            let direct = expected_payoff(&inst.g, &inst.pi, &set);
            prop_assert!((direct - expected_payoff_closed_form(&inst.g, &ew, &set)).abs() < 1e-9);
            prop_assert!((direct - direct_payoff(&inst.g, &inst.pi, x)).abs() < 1e-9);
            let bigger = VertexSet::from_mask(x | 1 << r.gen_range(0..n));
            prop_assert!(expected_payoff(&inst.g, &inst.pi, &bigger) >= direct - 1e-12);
        }
    }

    #[test]
    fn separation_matches_enumeration(seed in any::<u64>(), n in 1usize..=12) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        let s = random_independent_set(&mut r, &m).unwrap();
        prop_assert_eq!(separate_matroid_polytope(&m, &s.indicator(n), 1e-9).unwrap(), Separation::Feasible);
        let x: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..1.0) }).collect();
        let brute = brute_max_violation(&m, &x);
        match separate_matroid_polytope(&m, &x, 1e-9).unwrap() {
            Separation::Feasible => prop_assert!(brute <= 1e-9),
            Separation::Violated(cut) => prop_assert!((cut.violation(&x) - brute).abs() < 1e-9),
        }
    }

    #[test]
    fn cutting_planes_reach_greedy_optimum(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..4.0)).collect();
        let mut lp = LinearProgram::new(Sense::Maximize, w.clone());
        for j in 0..n {
            lp.set_bounds(j, 0.0, 1.0);
        }
        let out = cutting_plane_maximize(lp, 500, |x| {
            Ok(Option::from(separate_matroid_polytope(&m, x, 1e-9)?).into_iter().collect())
        })
        .unwrap();
        let (_, greedy) = m.greedy_max_weight(&w).unwrap();
        prop_assert!((out.solution.objective - greedy).abs() < 1e-6);
    }

    #[test]
    fn float_simplex_matches_rational(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let sense = if r.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
        let mut lp = LinearProgram::new(sense, (0..n).map(|_| f64::from(r.gen_range(-5i32..=5))).collect());
        for j in 0..n {
            if r.gen_bool(0.3) {
                lp.set_bounds(j, f64::from(r.gen_range(-2i32..=0)), f64::from(r.gen_range(1i32..=4)));
            }
        }
        for _ in 0..r.gen_range(1..=6) {
            let coeffs = (0..n).map(|_| f64::from(r.gen_range(-4i32..=4)) / 2.0).collect();
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][r.gen_range(0..3)];
            lp.add_constraint(coeffs, rel, f64::from(r.gen_range(-3i32..=8)));
        }
        let float = solve_lp(&lp).unwrap();
        let exact = rational_simplex_reference(&lp).unwrap();
        prop_assert_eq!(float.status, exact.status);
        if float.status == LpStatus::Optimal {
            prop_assert!((float.objective - exact.objective_f64()).abs() < 1e-6);
            prop_assert!(lp.max_violation(&float.x) <= 1e-7);
        }
    }

    #[test]
    fn concave_lower_bound_on_polytope(seed in any::<u64>()) {
        let inst = instance(seed, 12);
        let mut r = rng(seed ^ 2);
        let ew = effective_weights(&inst.g, &marginals_of(&inst.g, &inst.pi)).unwrap();
        let n = inst.g.vertex_count();
        for _ in 0..10 {
            let x = random_polytope_point(&mut r, &inst.mf, 4).unwrap();
            prop_assert!(eval_f(&inst.g, &ew, &x) >= 0.75 * eval_l(&inst.g, &ew, &x) - 1e-9);
            let xi = random_independent_set(&mut r, &inst.mf).unwrap().indicator(n);
            prop_assert!((eval_f(&inst.g, &ew, &xi) - eval_l(&inst.g, &ew, &xi)).abs() <= 1e-12);
        }
    }

    #[test]
    fn f_is_convex_along_exchange_directions(seed in any::<u64>()) {
        let inst = instance(seed, 10);
        let mut r = rng(seed ^ 3);
        let n = inst.g.vertex_count();
        prop_assume!(n >= 2);
        let ew = effective_weights(&inst.g, &marginals_of(&inst.g, &inst.pi)).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(0.2..0.8)).collect();
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..n)) % n;
        let h = r.gen_range(0.01..0.2);
        let at = |t: f64| {
            let mut y = x.clone();
            y[i] += t;
            y[j] -= t;
            eval_f(&inst.g, &ew, &y)
        };
        prop_assert!(at(h) + at(-h) - 2.0 * at(0.0) >= -1e-12);
    }

    #[test]
    fn follower_lp_equals_concave_relaxation(seed in any::<u64>()) {
        let inst = instance(seed, 10);
        let ew = effective_weights(&inst.g, &marginals_of(&inst.g, &inst.pi)).unwrap();
        let (x, v) = solve_follower_lp(&inst.g, &ew, &inst.mf).unwrap();
        prop_assert_eq!(separate_matroid_polytope(&inst.mf, &x, 1e-7).unwrap(), Separation::Feasible);
        let w = inst.g.total_weight();
        prop_assert!((eval_l(&inst.g, &ew, &x) - v).abs() <= 1e-6 * (1.0 + w));
    }

    #[test]
    fn pipage_steps_never_lose_value(seed in any::<u64>()) {
        let inst = instance(seed, 10);
        let ew = effective_weights(&inst.g, &marginals_of(&inst.g, &inst.pi)).unwrap();
        let (x, _) = solve_follower_lp(&inst.g, &ew, &inst.mf).unwrap();
        let (s, trace) = pipage_round_traced(&inst.g, &ew, &inst.mf, &x).unwrap();
        prop_assert!(inst.mf.is_independent(&s).unwrap());
        for step in &trace {
            prop_assert!(step.f_after >= step.f_before - 1e-9);
            prop_assert!(step.tight_after > step.tight_before);
        }
    }

    #[test]
    fn relaxation_sandwiches_exact_follower(seed in any::<u64>()) {
        let inst = instance(seed, 10);
        let sol = approx_follower(&inst.g, &inst.pi, &inst.mf).unwrap();
        let exact = brute_follower(&inst.g, &inst.pi, &inst.mf);
        prop_assert!(exact <= sol.lp_value + 1e-6);
        prop_assert!(exact >= 0.75 * sol.lp_value - 1e-6);
        prop_assert!(sol.ilp_value >= 0.75 * sol.lp_value - 1e-6);
        prop_assert!(sol.ilp_value <= exact + 1e-9);
        prop_assert!(inst.mf.is_independent(&sol.attack_set).unwrap());
        let (_, oracle) = solve_follower_ilp_bruteforce(&inst.g, &inst.pi, &inst.mf).unwrap();
        prop_assert!((oracle - exact).abs() < 1e-9);
    }

    #[test]
    fn surrogate_sandwiches_payoff(seed in any::<u64>()) {
        let inst = instance(seed, 12);
        let mut r = rng(seed ^ 4);
        let pm = marginals_of(&inst.g, &inst.pi);
        let ew = effective_weights(&inst.g, &pm).unwrap();
        for _ in 0..10 {
            let x = random_polytope_point(&mut r, &inst.mf, 4).unwrap();
            let l = eval_l(&inst.g, &ew, &x);
            let lt = eval_ltilde(&inst.g, pm.q(), &x);
            prop_assert!(0.5 * lt - 1e-9 <= l && l <= lt + 1e-9);
        }
    }

    #[test]
    fn surrogate_depends_only_on_marginals(seed in any::<u64>()) {
        let inst = instance(seed, 10);
        let mut r = rng(seed ^ 5);
        let q = inst.pi.vertex_marginals(inst.g.vertex_count());
        let other = caratheodory_decompose(&inst.ml, &MarginalStrategy::new(&inst.ml, q.clone()).unwrap()).unwrap();
        let q2 = marginals_of(&inst.g, &other).q().to_vec();
        let x = random_polytope_point(&mut r, &inst.mf, 3).unwrap();
        let a = eval_ltilde(&inst.g, marginals_of(&inst.g, &inst.pi).q(), &x);
        let b = eval_ltilde(&inst.g, &q, &x);
        prop_assert_eq!(a, b);
        prop_assert!((eval_ltilde(&inst.g, &q2, &x) - a).abs() < 1e-9);
    }

    #[test]
    fn decomposition_round_trips(seed in any::<u64>(), n in 1usize..=14) {
        let mut r = rng(seed);
        let fam = family(&mut r);
        let m = random_matroid(&mut r, n, fam).unwrap();
        let q = random_polytope_point(&mut r, &m, n + 1).unwrap();
        let pi = caratheodory_decompose(&m, &MarginalStrategy::new(&m, q.clone()).unwrap()).unwrap();
        prop_assert!(pi.len() <= n + 1);
        let total: f64 = pi.support().iter().map(|(p, _)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for (_, s) in pi.support() {
            prop_assert!(m.is_independent(s).unwrap());
        }
        let g = WeightedGraph::new(n, vec![]).unwrap();
        for (a, b) in marginals_of(&g, &pi).q().iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn uniform_dual_agrees_with_constraint_generation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=12);
        let density = r.gen_range(0.1..1.0);
        let g = random_graph(&mut r, n, density, 4.0).unwrap();
        let (kl, kf) = (r.gen_range(0..=n), r.gen_range(0..=n));
        let (_, dual) = solve_leader_uniform_dual(&g, kl, kf).unwrap();
        let (q, primal) =
            solve_leader_relaxed(&g, &Matroid::uniform(n, kl).unwrap(), &Matroid::uniform(n, kf).unwrap()).unwrap();
        prop_assert!((dual - primal).abs() <= 1e-6);
        prop_assert!(q.q().iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(q.q().iter().sum::<f64>() <= kl as f64 + 1e-7);
    }

    #[test]
    fn certificate_is_sound_against_the_game(seed in any::<u64>()) {
        let inst = instance(seed, 7);
        let cert = solve_rmvci(&inst.g, &inst.ml, &inst.mf, &SolveOptions::default()).unwrap();
        let (pi_star, optimum) = exact_rmvci_matrix_game(&inst.g, &inst.ml, &inst.mf).unwrap();
        let n = inst.g.vertex_count();
        prop_assert!(cert.pi_prime.len() <= n + 1);
        prop_assert!(cert.guaranteed_ratio <= 8.0 / 3.0 + 1e-6);
        prop_assert!(cert.lower_bound <= optimum + 1e-6);
        prop_assert!(cert.theta.upper <= 8.0 / 3.0 * optimum + 1e-6);
        prop_assert!((brute_follower(&inst.g, &pi_star, &inst.mf) - optimum).abs() < 1e-9);
        // no tested strategy beats the game value
        for pi in [&inst.pi, &cert.pi_prime, &InterdictionStrategy::null()] {
            prop_assert!(brute_follower(&inst.g, pi, &inst.mf) >= optimum - 1e-9);
        }
    }

    #[test]
    fn game_payoffs_are_coverage(seed in any::<u64>()) {
        let inst = instance(seed, 6);
        let rows = enumerate_independent_sets(&inst.ml).unwrap();
        let cols = enumerate_independent_sets(&inst.mf).unwrap();
        let game = GameMatrix::new(&inst.g, rows, cols).unwrap();
        prop_assert!(game.rows()[0].is_empty());
        for (c, x) in game.cols().iter().enumerate() {
            prop_assert_eq!(game.payoff(0, c), coverage_weight(&inst.g, x));
            for r in 0..game.rows().len() {
                prop_assert!(game.payoff(r, c) >= 0.0);
            }
        }
    }
}

#[test]
fn gap_ratios_increase_toward_four_thirds() {
    let mut last = 0.0;
    for n in (2..=60).step_by(2) {
        let (lp, ilp) = gap_values(n).unwrap();
        let ratio = lp / ilp;
        assert!(ratio > last && ratio < 4.0 / 3.0, "n={n}: {ratio}");
        last = ratio;
    }
}
