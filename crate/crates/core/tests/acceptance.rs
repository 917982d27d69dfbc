//! Acceptance criteria 1 through 9. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use finegame::basis::Pair;
use finegame::equilibrium::{coalition_game, coop_best_response_solve};
use finegame::fine::{independent_marginals, xi_bounds};
use finegame::games::{factorizable_values, family_payoff_reduction, product_weight, StateFamily};
use finegame::measurement::{
    marginals_from_weights, pair_povm, pure_state_marginals_by_trace, single_povm, triple_povm,
};
use finegame::prelude::*;
use finegame::qstates::Operator;
use finegame::sampling;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn ghz_parity(t: f64) -> Result<MarginalSet> {
    let s = ghz(real(t.sqrt()), real((1.0 - t).sqrt()))?;
    extract_marginals(&density_from_pure(&s), MarginalConvention::Parity)
}

fn criterion_1() -> Check {
    let s = ghz(real(FRAC_1_SQRT_2), real(FRAC_1_SQRT_2)).map_err(e)?;
    let m = extract_marginals(&density_from_pure(&s), MarginalConvention::Parity).map_err(e)?;
    let d = max_diff(&m.values(), &[0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 0.5]);
    ensure(d <= 1e-12, format!("GHZ marginals off by {d:e}"))?;

    let pd = pd3(&PdParams::default()).map_err(e)?;
    let pay = payoff_marginal_form(&pd, &m);
    let closed = pd_payoffs_from_pure_state(&s);
    ensure(max_diff(&pay, &[3.0; 3]) <= 1e-12, format!("payoffs {pay:?}"))?;
    ensure(
        max_diff(&closed, &[3.0; 3]) <= 1e-12,
        format!("closed-form payoffs {closed:?}"),
    )?;

    let slack = bell_slacks(&m).slack;
    ensure(
        max_diff(&slack, &[2.5, -0.5, -0.5, -0.5]) <= 1e-12,
        format!("slacks {slack:?}"),
    )?;

    // Slacks are affine in t = |a|²; satisfied exactly on [1, 4/3].
    let (s0, s1) = (
        bell_slacks(&ghz_parity(0.0).map_err(e)?).slack,
        bell_slacks(&ghz_parity(1.0).map_err(e)?).slack,
    );
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..4 {
        let (b, a) = (s0[k], s1[k] - s0[k]);
        let root = -b / a;
        if a > 0.0 {
            lo = lo.max(root);
        } else {
            hi = hi.min(root);
        }
    }
    ensure(
        (lo - 1.0).abs() <= 1e-12 && (hi - 4.0 / 3.0).abs() <= 1e-12,
        format!("window [{lo}, {hi}]"),
    )?;
    let n = 1001;
    let mut inside = Vec::new();
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let m = ghz_parity(t).map_err(e)?;
        let sl = bell_slacks(&m).slack;
        let pred = [4.0 - 3.0 * t, t - 1.0, t - 1.0, t - 1.0];
        ensure(
            max_diff(&sl, &pred) <= 1e-12,
            format!("slacks at t = {t} off the affine form"),
        )?;
        if bell_slacks(&m).satisfied {
            inside.push(t);
        }
    }
    ensure(inside == vec![1.0], format!("satisfied at {inside:?}"))?;
    Ok(format!(
        "window [{lo}, {hi}], {n} samples on [0, 1] satisfied only at |a|² = 1"
    ))
}

fn criterion_2() -> Check {
    let pd = pd3(&PdParams::default()).map_err(e)?;
    let found = grid_ne_search(&pd, 11, 1e-9).map_err(e)?;
    let triples: Vec<[f64; 3]> = found.iter().map(|c| c.triple.as_array()).collect();
    ensure(triples == vec![[0.0; 3]], format!("grid equilibria {triples:?}"))?;
    let pay = payoff_factorizable(&pd, &found[0].triple);
    ensure(pay == [1.0; 3], format!("equilibrium payoffs {pay:?}"))?;
    let coop = verify_ne_factorizable(&pd, &StrategyTriple::new(1.0, 1.0, 1.0).map_err(e)?, 1e-9);
    ensure(!coop.is_ne, "(1,1,1) accepted")?;
    ensure(
        max_diff(&coop.player_slack, &[-2.0; 3]) <= 1e-12,
        format!("deviation slack {:?}", coop.player_slack),
    )?;
    ensure(
        pd.rows()[0] == [7.0; 3] && pd.rows()[4] == [9.0, 3.0, 3.0],
        "dilemma rows",
    )?;
    Ok("grid at resolution 11 gives only (0,0,0) paying 1; (1,1,1) loses 2 to a unilateral defection".into())
}

fn criterion_3() -> Check {
    let pd = pd3(&PdParams::default()).map_err(e)?;
    let mut r = sampling::rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = sampling::pd_type(&mut r);
        let m = pure_state_marginals(&s);
        let (l, mu, nu) = (m.lambda(), m.mu(), m.nu());
        ensure(
            (l + mu + nu - 1.0).abs() <= 1e-12,
            format!("singles sum {}", l + mu + nu),
        )?;
        let want = [4.0 * (mu + nu) + 1.0, 4.0 * (l + nu) + 1.0, 4.0 * (l + mu) + 1.0];
        worst = worst
            .max(max_diff(&payoff_marginal_form(&pd, &m), &want))
            .max(max_diff(&pd_payoffs_from_pure_state(&s), &want));
    }
    ensure(worst <= 1e-12, format!("payoff error {worst:e}"))?;
    let t = real(1.0 / 3f64.sqrt());
    let sym = pd_payoffs_from_pure_state(&pd_state(t, t, t).map_err(e)?);
    ensure(
        max_diff(&sym, &[11.0 / 3.0; 3]) <= 1e-12,
        format!("symmetric payoffs {sym:?}"),
    )?;
    Ok(format!("100 draws within {worst:e}; symmetric point pays 11/3"))
}

fn criterion_4() -> Check {
    let pd = pd3(&PdParams::default()).map_err(e)?;
    let sol = product_state_interior_solve(&pd).map_err(e)?;
    let x = sol.triple.ok_or("no interior root")?.lambda();
    let r2 = 2f64.sqrt();
    let want = (2.0 - r2) / 2.0;
    ensure((x - want).abs() <= 1e-12, format!("λ* = {x}"))?;
    let m = independent_marginals(x, x, x, MarginalConvention::Parity);
    ensure((m.p_ab() - (2.0 - r2)).abs() <= 1e-12, format!("P(ab) = {}", m.p_ab()))?;
    let xi = (2.0 - r2) * (3.0 - r2) / 2.0;
    ensure((m.xi() - xi).abs() <= 1e-12, format!("ξ = {}", m.xi()))?;

    let inv = weights_from_marginals(&m).map_err(e)?;
    let w = *inv.weights();
    let back = marginals_from_weights(&w, MarginalConvention::Parity);
    ensure(
        max_diff(&back, &m.values()) <= 1e-12,
        "inversion does not reproduce the marginals",
    )?;
    ensure((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12, "weights do not sum to 1")?;
    let product: Vec<f64> = (0..8).map(|i| product_weight(&[x; 3], i)).collect();
    ensure(max_diff(&w, &product) <= 1e-12, "inverse is not the product diagonal")?;
    let pattern: String = w.iter().map(|&p| if p >= -1e-12 { '+' } else { '-' }).collect();

    let report = run_scenario("pd-product", &serde_json::json!({})).map_err(e)?;
    let dev = report.paper_deviation.as_deref().unwrap_or("");
    if inv.is_feasible() {
        ensure(dev.contains("p₄"), "non-negative inversion without a deviation note")?;
    }
    Ok(format!(
        "λ* = {x}, inversion sign pattern {pattern}, deviation recorded"
    ))
}

fn criterion_5() -> Check {
    let pd = pd3(&PdParams::default()).map_err(e)?;
    let red = family_payoff_reduction(&pd, StateFamily::W);
    let want = [[-2.0, 4.0, 4.0], [4.0, -2.0, 4.0], [4.0, 4.0, -2.0]];
    for (i, ((row, got), c)) in want.iter().zip(&red.coeff).zip(red.constant).enumerate() {
        ensure(max_diff(got, row) <= 1e-12, format!("row {i}: {got:?}"))?;
        ensure((c - 1.0).abs() <= 1e-12, format!("constant {i}: {c}"))?;
    }
    let mut r = sampling::rng(5);
    for _ in 0..100 {
        let s = sampling::w_type(&mut r);
        let m = pure_state_marginals(&s);
        let v = [m.lambda(), m.mu(), m.nu()];
        ensure(
            (v.iter().sum::<f64>() - 2.0).abs() <= 1e-12,
            "W singles do not sum to 2",
        )?;
        ensure(
            max_diff(&red.eval(&v), &payoff_marginal_form(&pd, &m)) <= 1e-12,
            "reduced payoff disagrees with the marginal form",
        )?;
        let cert = verify_ne(
            |x| red.eval(x),
            &StrategyTriple::new(v[0], v[1], v[2]).map_err(e)?,
            1e-9,
        );
        // a profile with every single at 0 is the only candidate and is not W-type
        ensure(!cert.is_ne || v == [0.0; 3], "W state passed as an equilibrium")?;
    }
    let partials = red.own_partials();
    ensure(partials.iter().all(|&g| g < 0.0), format!("own partials {partials:?}"))?;
    let best = verify_ne(|x| red.eval(x), &StrategyTriple::new(0.0, 0.0, 0.0).map_err(e)?, 1e-9);
    ensure(best.is_ne, "(0,0,0) not stable under the reduced payoff")?;
    ensure((0.0f64 - StateFamily::W.singles_sum()).abs() > 1.0, "no contradiction")?;
    Ok("coefficients match; deviations push to (0,0,0), whose singles sum 0 ≠ 2".into())
}

fn criterion_6() -> Check {
    let g = coop_game();
    let values: Vec<f64> = coalition_analysis(&g).map_err(e)?.iter().map(|v| v.value).collect();
    ensure(
        values == vec![-1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
        format!("coalition values {values:?}"),
    )?;
    let cg = coalition_game(&g, Player::A).map_err(e)?;
    let sol = cg.solution;
    ensure(
        sol.value == 1.0 && sol.row_mix == [0.5, 0.5] && sol.col_mix == [0.5, 0.5],
        format!("2×2 solution {sol:?}"),
    )?;
    let (l, c) = coop_best_response_solve();
    ensure(
        (l - 0.5).abs() <= 1e-12 && (c - 0.5).abs() <= 1e-12,
        format!("best response ({l}, {c})"),
    )?;
    let mut r = sampling::rng(6);
    for _ in 0..100 {
        let s = sampling::coop_cond_state(&mut r);
        let m = pure_state_marginals(&s);
        let pay = payoff_marginal_form(&g, &m);
        ensure(max_diff(&pay, &[0.0; 3]) <= 1e-12, format!("payoffs {pay:?}"))?;
        ensure(
            (m.lambda() - m.mu()).abs() <= 1e-12 && (m.mu() - m.nu()).abs() <= 1e-12,
            "singles differ",
        )?;
    }
    Ok("values (−1,−1,−1,1,1,1), 2×2 value 1 at (½,½), 100 constrained states pay 0".into())
}

fn criterion_7() -> Check {
    const GRID: usize = 10_000;
    const BOUNDARY: f64 = 1e-9;
    let mut r = sampling::rng(7);
    let (mut feasible, mut boundary, mut bad) = (0usize, 0usize, Vec::new());
    let n = 10_000;
    for k in 0..n {
        let m = if k % 2 == 0 {
            marginals_from_joint(&sampling::joint(&mut r), MarginalConvention::Conjunction)
        } else {
            sampling::bounded_conjunction_set(&mut r)
        };
        let bell = bell_slacks(&m);
        let iv = xi_interval(&m).map_err(e)?;
        let oracle = joint_exists_oracle(&m, GRID).map_err(e)?;
        let built = reconstruct_joint(&m, XiRule::Midpoint).is_ok();
        let votes = [bell.satisfied, !iv.is_empty(), oracle, built];
        if votes.iter().all(|&v| v == votes[0]) {
            feasible += votes[0] as usize;
            continue;
        }
        let top = m.p_ab().min(m.p_bc()).min(m.p_ac());
        let step = top / (GRID - 1) as f64;
        let gap = (xi_bounds(&m).upper - xi_bounds(&m).lower).abs();
        if bell.min_slack().abs() <= BOUNDARY || gap <= 2.0 * BOUNDARY || (!iv.is_empty() && iv.width() < step) {
            boundary += 1;
        } else {
            bad.push((k, votes));
        }
    }
    ensure(
        bad.is_empty(),
        format!("{} counterexamples, first {:?}", bad.len(), bad.first()),
    )?;
    ensure(
        feasible > n / 2 && feasible < n,
        format!("feasible count {feasible} of {n}"),
    )?;
    Ok(format!(
        "{n} sets, {feasible} feasible, {boundary} boundary cases, 0 counterexamples"
    ))
}

fn criterion_8() -> Check {
    let mut r = sampling::rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let j = sampling::joint(&mut r);
        let m = marginals_from_joint(&j, MarginalConvention::Conjunction);
        let back = reconstruct_joint(&m, XiRule::UseGivenXi).map_err(e)?;
        worst = worst
            .max(marginals_from_joint(&back, MarginalConvention::Conjunction).max_abs_diff(&m))
            .max(max_diff(back.prob(), j.prob()));
    }
    ensure(worst <= 1e-12, format!("round trip error {worst:e}"))?;

    let tables = [pd3(&PdParams::default()).map_err(e)?, coop_game()];
    let mut form: f64 = 0.0;
    for _ in 0..1000 {
        let s: [f64; 3] = std::array::from_fn(|_| rand::Rng::random::<f64>(&mut r));
        let triple = StrategyTriple::new(s[0], s[1], s[2]).map_err(e)?;
        let j = JointDistribution::new(std::array::from_fn(|i| product_weight(&s, i))).map_err(e)?;
        let m = independent_marginals(s[0], s[1], s[2], MarginalConvention::Conjunction);
        for t in &tables {
            let a = payoff_factorizable(t, &triple);
            form = form
                .max(max_diff(&a, &payoff_outcome_form(t, &j)))
                .max(max_diff(&a, &payoff_marginal_form(t, &m)));
        }
    }
    ensure(form <= 1e-12, format!("payoff forms differ by {form:e}"))?;
    Ok(format!("round trip within {worst:e}; payoff forms within {form:e}"))
}

fn completeness_error(op: &Operator) -> f64 {
    (op - Operator::identity()).camax()
}

fn criterion_9() -> Check {
    let mut completeness: f64 = 0.0;
    for p in Player::ALL {
        completeness = completeness.max(completeness_error(&single_povm(p).completeness()));
    }
    for conv in [MarginalConvention::Conjunction, MarginalConvention::Parity] {
        for pair in [Pair::AB, Pair::BC, Pair::AC] {
            completeness = completeness.max(completeness_error(&pair_povm(pair, conv).completeness()));
        }
        completeness = completeness.max(completeness_error(&triple_povm(conv).completeness()));
    }
    ensure(completeness <= 1e-14, format!("completeness error {completeness:e}"))?;

    let mut r = sampling::rng(9);
    let mut trace: f64 = 0.0;
    for _ in 0..1000 {
        let s = sampling::pure_state(&mut r);
        let by_trace = pure_state_marginals_by_trace(&s, MarginalConvention::Parity).map_err(e)?;
        trace = trace.max(pure_state_marginals(&s).max_abs_diff(&by_trace));
    }
    ensure(trace <= 1e-12, format!("closed form vs trace {trace:e}"))?;

    let tables = [pd3(&PdParams::default()).map_err(e)?, coop_game()];
    let h = 1e-6;
    let mut grad: f64 = 0.0;
    for k in 0..1000 {
        let s: [f64; 3] = std::array::from_fn(|_| rand::Rng::random::<f64>(&mut r));
        let t = &tables[k % 2];
        let g = factorizable_gradient(t, &StrategyTriple::new(s[0], s[1], s[2]).map_err(e)?);
        for p in 0..3 {
            let mut up = s;
            let mut dn = s;
            up[p] += h;
            dn[p] -= h;
            let fd = (factorizable_values(t, &up)[p] - factorizable_values(t, &dn)[p]) / (2.0 * h);
            grad = grad.max((fd - g[p]).abs());
        }
    }
    ensure(grad <= 1e-6, format!("gradient error {grad:e}"))?;
    Ok(format!(
        "completeness {completeness:e}, trace path {trace:e}, gradients {grad:e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("GHZ marginals, payoffs and Bell window", criterion_1),
        ("classical dilemma equilibrium", criterion_2),
        ("PD-state continuum payoffs", criterion_3),
        ("product-state interior solve and inversion", criterion_4),
        ("W-state payoff reduction", criterion_5),
        ("cooperative game coalitions", criterion_6),
        ("four-way joint existence equivalence", criterion_7),
        ("round trip and payoff form equivalence", criterion_8),
        ("numerical hygiene", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(detail) => println!("PASS {}: {name}: {detail} ({:.2?})", k + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
