//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use batman::brackets::{
    chebyshev_closed, chebyshev_coeffs, chebyshev_u, deligne_audit, identity_a_side,
    identity_b_side, pihol_coeff,
};
use batman::clausen::{build_trace_table, moment};
use batman::field::{primes_between, FieldContext};
use batman::hurwitz::{build_hurwitz_table, moment_rhs};
use batman::measures::{ear_parameters, mu_bat, mu_st, optimal_delta};
use batman::selberg::{
    eval_trig, indicator_coeff, proof_bound_audit, selberg_pair, simplified_chain, ChainVariant,
};
use batman::stats::{
    default_grid, discrepancy_report, empirical_a_count, random_grid, split_counts, Statistic,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn moments() -> Outcome {
    let hurwitz = build_hurwitz_table(4 * 1000);
    let mut checked = 0;
    for p in primes_between(5, 1000) {
        let table = build_trace_table(&FieldContext::new(p).unwrap());
        for n in 1..=5 {
            for twisted in [false, true] {
                let lhs = moment(&table, n, twisted);
                let rhs = moment_rhs(&hurwitz, p, n, twisted).unwrap();
                if !rhs.is_integer() || rhs.numer() != &lhs {
                    return Err(format!("p={p} n={n} twisted={twisted}: {lhs} vs {rhs}"));
                }
                checked += 1;
            }
        }
    }
    let table5 = build_trace_table(&FieldContext::new(5).unwrap());
    let anchors: Vec<_> = [(1, false), (1, true), (2, false)]
        .into_iter()
        .map(|(n, twisted)| moment(&table5, n, twisted).to_string())
        .collect();
    check(anchors == ["8", "0", "32"], format!("{checked} identities exact; p=5 anchors {anchors:?}"))
}

fn m1_vanishing() -> Outcome {
    let hurwitz = build_hurwitz_table(4 * 500);
    let primes = primes_between(5, 500);
    for &p in &primes {
        let a = pihol_coeff(1, 1, p, &hurwitz).unwrap();
        let b = pihol_coeff(1, 4, 4 * p, &hurwitz).unwrap();
        if !a.is_zero() || !b.is_zero() {
            return Err(format!("p={p}: a_1={a}, b_1={b}"));
        }
    }
    Ok(format!("a_1(p) = b_1(4p) = 0 for {} primes", primes.len()))
}

fn corrected_identities() -> Outcome {
    let hurwitz = build_hurwitz_table(4 * 200);
    let mut checked = 0;
    for p in primes_between(5, 200) {
        for m in 1..=4 {
            for (side, id) in [
                ("a", identity_a_side(p, m, &hurwitz).unwrap()),
                ("b", identity_b_side(p, m, &hurwitz).unwrap()),
            ] {
                if !id.holds() {
                    return Err(format!("{side}-side p={p} m={m}: {} vs {}", id.lhs, id.rhs));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} identities exact"))
}

fn deligne() -> Outcome {
    let hurwitz = build_hurwitz_table(4 * 500);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for p in primes_between(5, 500) {
        for m in 1..=6 {
            let r = deligne_audit(m, p, &hurwitz).unwrap();
            if !r.pass() {
                return Err(format!("m={m} p={p}: {r:?}"));
            }
            if m > 1 {
                worst = worst.max(r.a_value.abs() / r.a_bound).max(r.b_value.abs() / r.b_bound);
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (m, p) pairs, worst |coeff|/bound = {worst:.4}"))
}

fn chebyshev() -> Outcome {
    for m in 1..=50u64 {
        let u = chebyshev_coeffs(2 * m as usize);
        for l in 1..=m {
            if chebyshev_closed(l, m).unwrap() != u.b[2 * l as usize] {
                return Err(format!("b(2*{l}; 2*{m}) mismatch"));
            }
        }
    }
    for m in 0..=60usize {
        for k in 0..=4000 {
            let x = -1.0 + k as f64 / 2000.0;
            let v = chebyshev_u(m, x);
            if v.abs() > m as f64 + 1.0 + 1e-9 {
                return Err(format!("|U_{m}({x})| = {} > {}", v.abs(), m + 1));
            }
            // sin((m+1)θ)/sin θ away from the endpoints
            if k % 50 == 25 {
                let th = x.acos();
                let trig = ((m as f64 + 1.0) * th).sin() / th.sin();
                if (v - trig).abs() > 1e-8 * (m as f64 + 1.0) {
                    return Err(format!("U_{m}({x}) = {v}, trig form {trig}"));
                }
            }
        }
    }
    Ok("closed form = recurrence for 1 <= l <= m <= 50; |U_m| <= m+1 for m <= 60".into())
}

/// Batman density, written out independently of the library.
fn f_oracle(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        ((3.0 - t) / (1.0 + t)).sqrt() + ((3.0 + t) / (1.0 - t)).sqrt()
    } else if a < 3.0 {
        ((3.0 - a) / (1.0 + a)).sqrt()
    } else {
        0.0
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, fa: f64, fm: f64, fb: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * eps {
        return left + right + diff / 15.0;
    }
    simpson(g, a, m, left, fa, flm, fm, eps / 2.0, depth - 1)
        + simpson(g, m, b, right, fm, frm, fb, eps / 2.0, depth - 1)
}

/// `∫_l^r g` for `g` with at most inverse-square-root singularities at the
/// endpoints: `t = l + (r-l)(1-cos θ)/2` makes the integrand bounded.
fn integrate(g: &dyn Fn(f64) -> f64, l: f64, r: f64) -> f64 {
    if r <= l {
        return 0.0;
    }
    let h = move |th: f64| {
        let t = l + (r - l) * (1.0 - th.cos()) / 2.0;
        g(t) * (r - l) / 2.0 * th.sin()
    };
    let (a, b) = (1e-12, PI - 1e-12);
    let (fa, fm, fb) = (h(a), h(0.5 * (a + b)), h(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&h, a, b, whole, fa, fm, fb, 1e-11, 40)
}

fn bat_quadrature(a: f64, b: f64) -> f64 {
    let mut cuts = vec![a];
    cuts.extend([-1.0, 0.0, 1.0].into_iter().filter(|&c| a < c && c < b));
    cuts.push(b);
    cuts.windows(2).map(|w| integrate(&f_oracle, w[0], w[1])).sum::<f64>() / (4.0 * PI)
}

fn measures() -> Outcome {
    let full = mu_bat(-3.0, 3.0).unwrap();
    if (full - 1.0).abs() > 1e-12 {
        return Err(format!("mu_bat(-3,3) = {full}"));
    }
    let right = mu_bat(1.0, 3.0).unwrap();
    if (right - (0.25 - 1.0 / (2.0 * PI))).abs() > 1e-12 {
        return Err(format!("mu_bat(1,3) = {right}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(-3.0..2.99);
        let b: f64 = rng.gen_range(a + 0.005..=3.0);
        worst = worst.max((mu_bat(a, b).unwrap() - bat_quadrature(a, b)).abs());
        let a: f64 = rng.gen_range(0.0..0.99);
        let b: f64 = rng.gen_range(a + 0.005..=1.0);
        let st = integrate(&|x: f64| 2.0 / PI * (1.0 - x * x).max(0.0).sqrt(), a, b);
        worst = worst.max((mu_st(a, b).unwrap() - st).abs());
    }
    check(worst <= 1e-6, format!("closed forms vs quadrature: max error {worst:.2e} on 100+100 intervals"))
}

fn split_identity() -> Outcome {
    let mut checked = 0;
    for p in primes_between(5, 200) {
        let ctx = FieldContext::new(p).unwrap();
        let table = build_trace_table(&ctx);
        let values = table.a_values(&ctx);
        for iv in random_grid(p, 20, 0, 1, 997) {
            let direct = empirical_a_count(&values, &iv).unwrap();
            let (hp, hm) = split_counts(&table, &iv).unwrap();
            if direct != hp + hm {
                return Err(format!("p={p} [{}, {}]: {direct} != {hp} + {hm}", iv.lo, iv.hi));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (p, interval) cases exact"))
}

fn example_prime() -> Outcome {
    let p = 93283;
    let ctx = FieldContext::new(p).unwrap();
    let start = Instant::now();
    let table = build_trace_table(&ctx);
    let build = start.elapsed().as_secs_f64();
    let values = table.a_values(&ctx);
    let mut parts = Vec::new();
    let mut ok = true;
    let mut batman_gap = f64::NAN;
    for which in Statistic::ALL {
        let report = discrepancy_report(&table, &values, &default_grid(which, 60), which).unwrap();
        ok &= report.pass();
        if which == Statistic::Batman {
            batman_gap = report.max_gap;
        }
        parts.push(format!("{} {:.4}", which.name(), report.max_gap));
    }
    ok &= batman_gap <= 0.02;
    check(ok, format!("build {build:.1}s; max_gap: {}", parts.join(", ")))
}

fn constant_audit() -> Outcome {
    let primes = primes_between(5, 1_000_000);
    for &p in &primes {
        for r in [
            simplified_chain(p),
            proof_bound_audit(p, ChainVariant::Untwisted),
            proof_bound_audit(p, ChainVariant::Twisted),
        ] {
            if !r.pass {
                return Err(format!("p={p} {:?}: {} > {}", r.variant, r.lhs, r.rhs));
            }
        }
    }
    let ratio = simplified_chain(5).ratio();
    check(
        (0.99..=1.0).contains(&ratio),
        format!("{} primes pass all chains; simplified ratio at p=5 = {ratio:.5}", primes.len()),
    )
}

fn selberg_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..20 {
        let a: f64 = rng.gen_range(0.0..0.95);
        let b: f64 = rng.gen_range(a + 0.01..=1.0);
        let m = rng.gen_range(1..=60usize);
        let (plus, minus) = selberg_pair(a, b, m).unwrap();
        let n1 = m as f64 + 1.0;
        if (plus.coeff(0).re - (b - a + 1.0 / n1)).abs() > 1e-14
            || (minus.coeff(0).re - (b - a - 1.0 / n1)).abs() > 1e-14
        {
            return Err(format!("case {case}: constant terms off"));
        }
        for k in 0..10_000 {
            let x = k as f64 / 10_000.0;
            let chi = if (a..=b).contains(&x) { 1.0 } else { 0.0 };
            let (sp, sm) = (eval_trig(&plus, x).unwrap(), eval_trig(&minus, x).unwrap());
            if sp < chi - 1e-12 || sm > chi + 1e-12 {
                return Err(format!("case {case} [{a}, {b}] M={m} x={x}: S- {sm}, S+ {sp}"));
            }
        }
        for j in 1..=m as i64 {
            for j in [j, -j] {
                let target = indicator_coeff(a, b, j);
                let d = (plus.coeff(j) - target).norm().max((minus.coeff(j) - target).norm());
                if d > 1.0 / n1 + 1e-12 {
                    return Err(format!("case {case}: coefficient {j} off by {d}"));
                }
            }
        }
    }
    Ok("20 random (interval, M) pairs: majorization, constant terms, proximity".into())
}

fn ears() -> Outcome {
    let e = ear_parameters(10.0, None).unwrap();
    let leading = (e.x * 1e5).floor();
    let delta = optimal_delta(10.0);
    let grid_best = (1..=2000)
        .map(|k| delta * (0.2 + k as f64 * 0.0015))
        .map(|d| ear_parameters(10.0, Some(d)).unwrap().p_min)
        .fold(f64::INFINITY, f64::min);
    let ok = leading == 6.0 && e.p_min <= grid_best * (1.0 + 1e-9);
    check(
        ok,
        format!(
            "x = {:.2e}, delta* = {delta:.6} (grid-optimal); \
             FLAG p_min = {:.3e} vs quoted 3.45e14",
            e.x, e.p_min
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("moment identities", moments),
        ("m=1 vanishing", m1_vanishing),
        ("corrected coefficient identities", corrected_identities),
        ("Deligne-bound audit", deligne),
        ("Chebyshev closed form and bound", chebyshev),
        ("measures", measures),
        ("split identity", split_identity),
        ("explicit bounds at p=93283", example_prime),
        ("constant chains", constant_audit),
        ("Selberg polynomials", selberg_suite),
        ("ears", ears),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
