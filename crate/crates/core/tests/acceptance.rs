//! The twelve acceptance criteria. Each prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semigroup_bounds::experiment::{jordan_fine_omegas, jordan_updated_bound};
use semigroup_bounds::iteration::{apply_in_order, iterate, underline_u};
use semigroup_bounds::models::{
    diffop_r, diffop_true_norm, jordan_numrange_slope, jordan_true_norm, JordanBlockModel,
};
use semigroup_bounds::riccati::{b_star, solve, PiecewiseConstantMu};
use semigroup_bounds::{
    a_star, phi_closed_form, semigroupize, update_bound, GridBound, OmegaRPair, OmegaSet,
    PiecewiseLogAffineBound, ResolventProfile,
};

use common::*;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            ok,
            detail: detail.into(),
        }
    }
}

fn pair(omega: f64, r: f64) -> OmegaRPair {
    OmegaRPair::new(omega, r).unwrap()
}

fn one() -> PiecewiseLogAffineBound {
    PiecewiseLogAffineBound::one()
}

/// Runs `f` (best of `reps` for timing) and checks the time limit.
fn timed(limit: Duration, reps: usize, f: impl Fn() -> Outcome) -> (Outcome, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..reps {
        let start = Instant::now();
        let o = f();
        best = best.min(start.elapsed());
        out = Some(o);
    }
    let mut o = out.unwrap();
    if best >= limit {
        o.ok = false;
        o.detail.push_str(&format!("; too slow ({best:?} >= {limit:?})"));
    }
    (o, best)
}

fn c1_wei_reference() -> Outcome {
    let a = a_star(&one(), pair(0.0, 1.0));
    let u = update_bound(&one(), pair(0.0, 1.0));
    let ok = (a - FRAC_PI_4).abs() <= 1e-12
        && u.len() == 2
        && (u.breakpoints()[1] - FRAC_PI_2).abs() <= 1e-12
        && u.last_slope() == -1.0;
    Outcome::new(ok, format!("a* = {a:.15}, breakpoint {:.15}", u.breakpoints()[1]))
}

fn c2_worked_example() -> Outcome {
    let m0 = one();
    let m1 = PiecewiseLogAffineBound::wei(1.0).unwrap();
    let p = pair(-1.0, 0.05);
    let a0 = a_star(&m0, p);
    let sol = solve(&m1, p);
    let phi = sol.phi_at(FRAC_PI_2).unwrap();
    let a1 = sol.a_star;
    let u = update_bound(&m1, p);
    let tail = u.pieces().last().unwrap();
    let slope_exact = tail.slope == -1.0 - 0.05;

    let profile = ResolventProfile::tabulated([(-1.0, 0.05), (0.0, 1.0)]).unwrap();
    let omegas = OmegaSet::new(vec![0.0, -1.0]).unwrap();
    let m21 = underline_u(&m0, &omegas, &profile).unwrap();
    let start_of = |m: &PiecewiseLogAffineBound| {
        m.pieces().iter().find(|pc| pc.slope == -1.0 - 0.05).map(|pc| pc.start)
    };
    let t2 = start_of(&m21).unwrap_or(f64::NAN);
    let ordered = apply_in_order(&m0, &[pair(0.0, 1.0), p]);
    let t3 = start_of(&ordered).unwrap_or(f64::NAN);

    let ok = (a0 - 1.8464).abs() <= 5e-4
        && (phi - 0.5597).abs() <= 5e-4
        && (a1 - 7.0741).abs() <= 5e-4
        && (tail.intercept - 3.8490).abs() <= 5e-4
        && slope_exact
        && (t2 - 46.1344).abs() <= 5e-3
        && (t3 - 45.5641).abs() <= 5e-3;
    Outcome::new(
        ok,
        format!(
            "a* = {a0:.6}, phi = {phi:.6}, a1* = {a1:.6}, tail {:.2}t + {:.6}, crossings {t2:.6}, {t3:.6}",
            tail.slope, tail.intercept
        ),
    )
}

fn c3_diffop_profile() -> Outcome {
    let r0 = diffop_r(0.0).unwrap();
    let rm1 = diffop_r(-1.0).unwrap();
    let ratio = diffop_r(-20.0).unwrap() / (2.0 * 20.0 * (-20f64).exp());
    let ok = (r0 - FRAC_PI_2).abs() <= 1e-10 && (rm1 - 1.0).abs() <= 1e-10 && (ratio - 1.0).abs() <= 1e-6;
    Outcome::new(ok, format!("r(0) - pi/2 = {:.1e}, r(-1) - 1 = {:.1e}, ratio - 1 = {:.1e}", r0 - FRAC_PI_2, rm1 - 1.0, ratio - 1.0))
}

fn c4_diffop_astar() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in -20..=20 {
        let omega = k as f64;
        let a = a_star(&one(), pair(omega, diffop_r(omega).unwrap()));
        worst = worst.max((a - 0.5).abs());
    }
    Outcome::new(worst <= 1e-8, format!("max |a* - 1/2| = {worst:.2e} over 41 omegas"))
}

fn c5_rstar() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let omegas: Vec<f64> = (0..20).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let mut worst: f64 = 0.0;
    for alpha in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
        for &omega in &omegas {
            let r = diffop_r(2.0 * alpha * omega).unwrap() / (2.0 * alpha);
            worst = worst.max((a_star(&one(), pair(omega, r)) - alpha).abs());
        }
    }
    Outcome::new(worst <= 1e-8, format!("max |a* - alpha| = {worst:.2e} over 60 cases"))
}

fn c6_semigroupize_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    let mut not_idempotent = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let mut values: Vec<f64> = (0..=n).map(|_| 0.25 * rng.gen_range(-8i32..=8) as f64).collect();
        values[0] = 0.0;
        let g = GridBound::new(0.1, values.clone()).unwrap();
        let s = semigroupize(&g);
        if s.values() != brute_force_envelope(&values, n).as_slice() {
            mismatches += 1;
        }
        if semigroupize(&s) != s {
            not_idempotent += 1;
        }
    }
    Outcome::new(
        mismatches == 0 && not_idempotent == 0,
        format!("{mismatches} oracle mismatches, {not_idempotent} non-idempotent, 100 grids"),
    )
}

fn c7_stationarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let profile = ResolventProfile::diffop();
    let (h, n) = (0.05, 200);
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    for case in 0..20 {
        let m = random_concave_bound(&mut rng, 4, 5.0);
        // single frequency: step 2 equals step 1 exactly
        let omegas = OmegaSet::new(vec![rng.gen_range(-3.0..3.0)]).unwrap();
        let trace = iterate(&m, &omegas, &profile, 3, h, n).unwrap();
        let s = &trace.steps;
        let iter1 = s.len() < 3 || s[2].grid == s[1].grid;
        if !(iter1 && trace.stationary_at.is_some_and(|k| k <= 1)) {
            failures.push(format!("case {case}: single omega, stationary_at {:?}", trace.stationary_at));
        }
        // K frequencies: step K + 1 equals step K
        let k = rng.gen_range(2..=3);
        let omegas = OmegaSet::new((0..k).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let trace = iterate(&m, &omegas, &profile, k + 1, h, n).unwrap();
        nontrivial += usize::from(trace.stationary_at != Some(0));
        if !trace.stationary_at.is_some_and(|s| s <= k) {
            failures.push(format!("case {case}: {k} omegas, stationary_at {:?}", trace.stationary_at));
        }
    }
    Outcome::new(failures.is_empty(), format!("20 configurations ({nontrivial} multi-omega ones not fixed from the start); failures: {failures:?}"))
}

fn c8_closed_form_vs_integrator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let mu = match case % 10 {
            0 => 1.0,
            1 => -1.0,
            2 => 1.0 + rng.gen_range(-1e-6..1e-6),
            _ => rng.gen_range(-4.0..4.0),
        };
        let phi0 = rng.gen_range(0.0..1.0);
        let (samples, _crossing) = riccati_oracle(mu, phi0, 5.0);
        for &(b, reference) in &samples {
            let v = phi_closed_form(b, mu, phi0).unwrap();
            worst = worst.max((v - reference).abs());
        }
    }
    Outcome::new(worst <= 1e-8, format!("max deviation {worst:.2e} over 200 cases"))
}

fn c9_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = Vec::new();
    let mut compared = 0;
    // decreasing in r
    for _ in 0..100 {
        let m = random_bound(&mut rng, 4, 5.0, true);
        let omega = rng.gen_range(-2.0..2.0);
        let r1 = rng.gen_range(0.05..3.0);
        let r2 = rng.gen_range(r1..3.5);
        let (a1, a2) = (a_star(&m, pair(omega, r1)), a_star(&m, pair(omega, r2)));
        compared += usize::from(a1.is_finite() && a2.is_finite());
        if a1.is_finite() && a2.is_finite() && a1 < a2 - 1e-12 {
            violations.push(format!("r: {a1} < {a2}"));
        }
    }
    // increasing in omega
    for _ in 0..100 {
        let m = random_bound(&mut rng, 4, 5.0, true);
        let r = rng.gen_range(0.05..3.0);
        let w1 = rng.gen_range(-3.0..3.0);
        let w2 = rng.gen_range(w1..3.5);
        let (a1, a2) = (a_star(&m, pair(w1, r)), a_star(&m, pair(w2, r)));
        compared += usize::from(a1.is_finite());
        if a1 > a2 + 1e-12 {
            violations.push(format!("omega: {a1} > {a2}"));
        }
    }
    // constant shifts of mu
    for _ in 0..100 {
        let k = rng.gen_range(1..4);
        let mut starts: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
        starts.sort_by(f64::total_cmp);
        starts[0] = 0.0;
        starts.dedup();
        let values: Vec<f64> = starts.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mu = PiecewiseConstantMu::new(starts, values).unwrap();
        let t1 = rng.gen_range(-1.0..1.0);
        let t2 = rng.gen_range(t1..1.5);
        let (b1, b2) = (b_star(&mu.shifted(t1)), b_star(&mu.shifted(t2)));
        compared += usize::from(b2.is_finite());
        if b2 > b1 + 1e-12 {
            violations.push(format!("theta: {b2} > {b1}"));
        }
    }
    // ∂φ/∂r > 0 by central differences
    let dr = 1e-5;
    for _ in 0..100 {
        let m = random_bound(&mut rng, 4, 5.0, true);
        let omega = rng.gen_range(-2.0..0.5);
        let r = rng.gen_range(0.2..3.0);
        let lo = solve(&m, pair(omega, r - dr));
        let hi = solve(&m, pair(omega, r + dr));
        // φ is only propagated up to a* (or until a* = +∞ is certain)
        let covered = |s: &semigroup_bounds::RiccatiSolution| s.segments.last().unwrap().segment.t_end;
        let end = hi.a_star.min(covered(&hi)).min(covered(&lo)).min(10.0);
        for j in 1..=10 {
            let t = end * j as f64 / 10.0;
            let d = (hi.phi_at(t).unwrap() - lo.phi_at(t).unwrap()) / (2.0 * dr);
            if d < -1e-8 {
                violations.push(format!("d phi / dr = {d} at t = {t}"));
            }
        }
    }
    Outcome::new(violations.is_empty(), format!("400 instances, {compared} of the 300 a*/b* comparisons with finite values; violations: {violations:?}"))
}

fn c10_jordan_figure() -> Outcome {
    let model = JordanBlockModel::new(3).unwrap();
    let b3 = jordan_updated_bound(3, &OmegaSet::new(vec![0.5, 1.0, 2.0]).unwrap()).unwrap();
    let b101 = jordan_updated_bound(3, &jordan_fine_omegas()).unwrap();
    let slope = jordan_numrange_slope(model);
    let times: Vec<f64> = (0..=200).map(|k| 0.1 * k as f64).collect();
    let curves: [Vec<f64>; 4] = [
        times.iter().map(|&t| jordan_true_norm(model, t).unwrap().ln()).collect(),
        times.iter().map(|&t| b101.eval_log(t).unwrap()).collect(),
        times.iter().map(|&t| b3.eval_log(t).unwrap()).collect(),
        times.iter().map(|&t| slope * t).collect(),
    ];
    let names = ["true norm", "101-omega", "3-omega", "numerical range"];
    let mut parts = Vec::new();
    let mut ok = true;
    for i in 0..3 {
        let (lower, upper) = (&curves[i], &curves[i + 1]);
        let (excess, at) = lower
            .iter()
            .zip(upper)
            .zip(&times)
            .map(|((l, u), &t)| (l - u, t))
            .fold((f64::NEG_INFINITY, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
        let below = lower.iter().zip(upper).any(|(l, u)| *l < u - 1e-9);
        let holds = excess <= 1e-9 && below;
        ok &= holds;
        parts.push(format!(
            "{} <= {}: {} (max excess {excess:.3e} at t = {at:.1})",
            names[i],
            names[i + 1],
            if holds { "ok" } else { "VIOLATED" }
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn c11_wei_optimality() -> Outcome {
    let r0 = diffop_r(0.0).unwrap();
    let near_one = [0.0, 0.5, 0.9, 1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12];
    let sup = near_one
        .iter()
        .map(|&t| (r0 * t).exp() * diffop_true_norm(t).unwrap())
        .fold(0.0, f64::max);
    let below_wei = (0..=10_000).map(|k| k as f64 * 1e-3).chain(near_one).all(|t| {
        diffop_true_norm(t).unwrap() <= (FRAC_PI_2 - FRAC_PI_2 * t).exp()
    });
    let ok = sup >= FRAC_PI_2.exp() - 1e-6 && below_wei;
    Outcome::new(ok, format!("sup = {sup:.9}, e^(pi/2) = {:.9}, bound holds: {below_wei}", FRAC_PI_2.exp()))
}

fn c12_log_concavity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = 0;
    for _ in 0..200 {
        let m = random_concave_bound(&mut rng, 5, 6.0);
        let p = pair(rng.gen_range(-3.0..3.0), rng.gen_range(0.01..3.0));
        if !update_bound(&m, p).check_log_concave().is_concave {
            failures += 1;
        }
    }
    Outcome::new(failures == 0, format!("{failures} of 200 updates not log-concave"))
}

/// Criteria that fail for a reason analysed in the README; the test checks
/// that they still fail only in that way.
const KNOWN_FAILURES: &[usize] = &[10];

#[test]
fn acceptance() {
    let ms = Duration::from_millis;
    let criteria: Vec<(usize, &str, Duration, usize, fn() -> Outcome)> = vec![
        (1, "Wei reference case", ms(1), 5, c1_wei_reference),
        (2, "worked two-pair example", ms(10), 3, c2_worked_example),
        (3, "differentiation-operator profile", ms(10), 3, c3_diffop_profile),
        (4, "a* = 1/2 for the differentiation operator", ms(100), 1, c4_diffop_astar),
        (5, "explicit r*", ms(100), 1, c5_rstar),
        (6, "semigroupization oracle and idempotence", ms(1000), 1, c6_semigroupize_oracle),
        (7, "stationarity of iterations", ms(1000), 1, c7_stationarity),
        (8, "closed-form Riccati vs integrator", ms(1000), 1, c8_closed_form_vs_integrator),
        (9, "monotonicity suites", ms(1000), 1, c9_monotonicity),
        (10, "Jordan figure ordering", ms(30_000), 1, c10_jordan_figure),
        (11, "Wei optimality on the shift model", ms(10), 3, c11_wei_optimality),
        (12, "log-concavity preservation", ms(1000), 1, c12_log_concavity),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, reps, f) in criteria {
        let (outcome, elapsed) = timed(limit, reps, f);
        let known = KNOWN_FAILURES.contains(&id);
        println!(
            "criterion {id:2} {name}: {}{} [{elapsed:.2?}] {}",
            if outcome.ok { "PASS" } else { "FAIL" },
            if known && !outcome.ok { " (known)" } else { "" },
            outcome.detail
        );
        if outcome.ok == known {
            unexpected.push(id);
        }
    }
    assert!(unexpected.is_empty(), "unexpected outcome for criteria {unexpected:?}");
}

/// The one inequality of criterion 10 that fails: the 101 frequencies do not
/// contain 1/2 (nor 2), and near t ≈ 9.4 the update at ω = 1/2 is better
/// than any of theirs. Everything else in the criterion holds.
#[test]
fn jordan_figure_known_gap_is_the_only_one() {
    let model = JordanBlockModel::new(3).unwrap();
    let b3 = jordan_updated_bound(3, &OmegaSet::new(vec![0.5, 1.0, 2.0]).unwrap()).unwrap();
    let b101 = jordan_updated_bound(3, &jordan_fine_omegas()).unwrap();
    let times: Vec<f64> = (0..=200).map(|k| 0.1 * k as f64).collect();
    let slope = jordan_numrange_slope(model);
    for &t in &times {
        let truth = jordan_true_norm(model, t).unwrap().ln();
        assert!(truth <= b101.eval_log(t).unwrap() + 1e-9);
        assert!(b3.eval_log(t).unwrap() <= slope * t + 1e-9);
    }
    let excess: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| (t, b101.eval_log(t).unwrap() - b3.eval_log(t).unwrap()))
        .filter(|&(_, d)| d > 1e-9)
        .collect();
    assert!(!excess.is_empty());
    assert!(excess.iter().all(|&(t, d)| (9.0..=10.0).contains(&t) && d < 1e-3), "{excess:?}");
    // ω = 1/2 alone explains the gap
    let half = jordan_updated_bound(3, &OmegaSet::new(vec![0.5]).unwrap()).unwrap();
    assert!(excess.iter().all(|&(t, _)| half.eval_log(t).unwrap() < b101.eval_log(t).unwrap()));
    // and adding 1/2 and 2 to the 101 values closes it
    let mut extended = jordan_fine_omegas().values().to_vec();
    extended.extend([0.5, 2.0]);
    let b103 = jordan_updated_bound(3, &OmegaSet::new(extended).unwrap()).unwrap();
    assert!(times.iter().all(|&t| b103.eval_log(t).unwrap() <= b3.eval_log(t).unwrap() + 1e-9));
}
