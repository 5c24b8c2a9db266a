//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! runtime; the test fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use omegalab::artin_hasse::{ah_exp_form, ah_product_form, check_p_integral};
use omegalab::diophantine::{
    best_approx_bruteforce, cf_expand, irrationality_diagnostics, is_convergent_or_semiconvergent,
};
use omegalab::exact::{self, int, rat, Rational};
use omegalab::lambert::{w_eval_series, w_series_coeffs};
use omegalab::omega_real::{abel_check, omega_iterate, omega_newton};
use omegalab::padic::PadicInt;
use omegalab::padic_omega::{
    fixed_point_check, omega_p_hensel, omega_p_series, run_paper_iteration, verify_defining_identity, wp_series,
    x_times_ep, Verdict,
};
use omegalab::powser::TruncSeries;
use serde_json::Value;

const OMEGA_60: &str = "0.567143290409783872999968662210355549753815787186512508135131";

type Check = Result<String, String>;
type Criterion = (&'static str, Option<u64>, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ten_pow_neg(k: usize) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_omegalab"))
        .args(args)
        .output()
        .expect("spawn omegalab");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Check) -> (Check, Duration) {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let dt = t.elapsed();
    let r = match (r, limit) {
        (Ok(_), Some(l)) if dt > l => Err(format!("took {:.2}s, limit {:.0}s", dt.as_secs_f64(), l.as_secs_f64())),
        (r, _) => r,
    };
    (r, dt)
}

fn ac1() -> Check {
    let (code, out) = cli(&["omega", "--digits", "60", "--json"]);
    ensure!(code == 0, "exit code {code}");
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let runs = v["runs"].as_array().ok_or("no runs")?;
    ensure!(runs.len() == 2, "expected two methods");
    for r in runs {
        ensure!(r["value"] == OMEGA_60, "{} printed {}", r["method"], r["value"]);
    }
    let bound = ten_pow_neg(59);
    for (name, r) in [("iterate", omega_iterate(60, None)), ("newton", omega_newton(60, None))] {
        let r = r.map_err(|e| e.to_string())?;
        ensure!(r.residual.upper() < bound, "{name} residual not below 1e-59");
    }
    Ok("both methods print the 60-digit string; residual < 1e-59".into())
}

fn ac2() -> Check {
    let a = omega_iterate(10_000, None).map_err(|e| e.to_string())?;
    let b = omega_newton(10_000, None).map_err(|e| e.to_string())?;
    ensure!(
        a.certified_digits >= 10_000 && b.certified_digits >= 10_000,
        "fewer than 10000 digits"
    );
    ensure!(a.value.overlaps(&b.value), "enclosures do not overlap");
    Ok(format!("10000 digits, iterations {} / {}", a.iterations, b.iterations))
}

fn ac3() -> Check {
    let om = omega_newton(100, None).map_err(|e| e.to_string())?.value;
    let v = abel_check(&om, 50);
    ensure!(v.len() == 51, "wrong length");
    for (n, b) in v.iter().enumerate() {
        ensure!(b.contains_rational(&int(1)), "n = {n} excludes 1");
    }
    Ok("n = 0..=50 all contain 1".into())
}

fn ac4() -> Check {
    const ORDER: usize = 30;
    let w1 = w_series_coeffs(1, ORDER).map_err(|e| e.to_string())?.to_series();
    let mut power = TruncSeries::one(ORDER);
    for k in 1..=5u32 {
        power = power.mul(&w1);
        let direct = w_series_coeffs(k, ORDER + 1 - k as usize)
            .map_err(|e| e.to_string())?
            .to_series();
        ensure!(direct == power, "k = {k} differs from the power of the k = 1 series");
    }
    let x = rat(1, 4);
    let w = w_eval_series(&x, 1, 40).map_err(|e| e.to_string())?;
    ensure!(w.certified_decimals(40).unwrap_or(0) >= 40, "fewer than 40 digits");
    let id = w.mul(&w.exp(200), 200);
    ensure!(id.contains_rational(&x), "W e^W excludes 1/4");
    Ok(format!(
        "k <= 5 coherent to order {ORDER}; W(1/4) = {}",
        w.to_decimal_string(40)
    ))
}

fn ac5() -> Check {
    const ORDER: usize = 300;
    for p in [2u64, 3, 5, 7] {
        let a = ah_exp_form(p, ORDER).map_err(|e| e.to_string())?;
        let b = ah_product_form(p, ORDER).map_err(|e| e.to_string())?;
        ensure!(a.series == b.series, "p = {p}: forms differ");
        let rep = check_p_integral(&a.series, p);
        ensure!(rep.passed, "p = {p}: not integral at {:?}", rep.first_failure);
    }
    let e = ah_product_form(1, ORDER).map_err(|e| e.to_string())?;
    for n in 0..=ORDER {
        let want = Rational::new(BigInt::one(), exact::factorial(n as u64));
        ensure!(*e.series.coeff(n) == want, "p = 1: coefficient {n} is not 1/{n}!");
    }
    Ok("p in {2,3,5,7} agree and integral; p = 1 gives 1/n!".into())
}

fn ac6() -> Check {
    const ORDER: usize = 200;
    for p in [2u64, 3, 5, 7] {
        let w = wp_series(p, ORDER).map_err(|e| e.to_string())?;
        ensure!(
            w.integrality.passed,
            "p = {p}: W_p not integral at {:?}",
            w.integrality.first_failure
        );
        let back = x_times_ep(p, ORDER)
            .map_err(|e| e.to_string())?
            .compose(&w.series)
            .map_err(|e| e.to_string())?;
        ensure!(back == TruncSeries::x(ORDER), "p = {p}: round trip is not x + O(x^201)");
    }
    Ok("p in {2,3,5,7} integral; round trip exact to order 200".into())
}

fn ac7() -> Check {
    const N: u32 = 100;
    for p in [2u64, 3, 5] {
        let s = omega_p_series(p, N).map_err(|e| e.to_string())?;
        let h = omega_p_hensel(p, N).map_err(|e| e.to_string())?;
        ensure!(s.value == h.value, "p = {p}: methods disagree mod p^{N}");
        let d = verify_defining_identity(p, &h.value).map_err(|e| e.to_string())?;
        ensure!(d >= N && s.defect >= N && h.defect >= N, "p = {p}: defect {d} < {N}");
    }
    let two = omega_p_hensel(2, N).map_err(|e| e.to_string())?.value.reduce_to(4);
    let three = omega_p_hensel(3, N).map_err(|e| e.to_string())?.value.reduce_to(3);
    ensure!(two == PadicInt::from_i64(2, 4, 6), "Omega_2 mod 16 is {two}");
    ensure!(three == PadicInt::from_i64(3, 3, 21), "Omega_3 mod 27 is {three}");
    Ok("agree mod p^100 for p in {2,3,5}; defect >= 100; 6 mod 16, 21 mod 27".into())
}

fn ac8() -> Check {
    let mut notes = Vec::new();
    for p in [3u64, 5] {
        let out = run_paper_iteration(p, 40, 50).map_err(|e| e.to_string())?;
        ensure!(!out.trace.steps.is_empty(), "p = {p}: empty trace");
        ensure!(
            fixed_point_check(p, 40).map_err(|e| e.to_string())?,
            "p = {p}: fixed-point check failed"
        );
        let ps = p.to_string();
        let (code, text) = cli(&[
            "padic-omega",
            "--p",
            &ps,
            "--prec",
            "40",
            "--method",
            "paper-iteration",
            "--json",
        ]);
        let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let expected = if out.verdict == Verdict::Converged { 0 } else { 3 };
        ensure!(code == expected, "p = {p}: exit code {code}, verdict {:?}", out.verdict);
        ensure!(
            v["fixed_point_check"] == true,
            "p = {p}: report lacks fixed-point check"
        );
        let steps = v["iteration_trace"]["steps"].as_array().ok_or("no trace in report")?;
        ensure!(steps.len() == out.trace.steps.len(), "p = {p}: trace length mismatch");
        let dv: Vec<u32> = out.trace.steps.iter().map(|s| s.distance_valuation).collect();
        notes.push(format!(
            "p={p} {} exit {code} distance {:?}",
            v["outcome"].as_str().unwrap_or("?"),
            dv
        ));
    }
    Ok(notes.join("; "))
}

fn ac9() -> Check {
    let om = omega_newton(100, None).map_err(|e| e.to_string())?.value;
    let cf = cf_expand(&om, 1000);
    let n = cf.partial_quotients.len();
    ensure!(n >= 40, "only {n} certified partial quotients");
    let fine = omega_newton(200, None).map_err(|e| e.to_string())?.value;
    let cf2 = cf_expand(&fine, 1000);
    ensure!(cf2.partial_quotients.len() > n, "doubling did not extend the expansion");
    ensure!(
        cf2.partial_quotients[..n] == cf.partial_quotients[..],
        "prefix changed under precision doubling"
    );

    let best = best_approx_bruteforce(&om, 10_000).map_err(|e| e.to_string())?;
    for (p, q) in &best {
        ensure!(
            is_convergent_or_semiconvergent(&cf, p, q),
            "{p}/{q} is not a (semi)convergent"
        );
    }

    // q_{n+1} for the last certified n comes from the doubled run
    let diag = irrationality_diagnostics(&fine, &cf).map_err(|e| e.to_string())?;
    ensure!(diag.len() == n, "diagnostics cover {} of {n} terms", diag.len());
    for d in &diag {
        let q = &cf2.convergents[d.n].1;
        let q1 = &cf2.convergents[d.n + 1].1;
        let lo = Rational::new(BigInt::one(), q * (q + q1));
        let hi = Rational::new(BigInt::one(), q * q1);
        ensure!(
            d.delta.lower() > lo && d.delta.upper() < hi,
            "sandwich fails at n = {}",
            d.n
        );
    }
    Ok(format!(
        "{n} certified terms; {} best approximations; sandwich holds",
        best.len()
    ))
}

fn ac10() -> Check {
    let (code, out) = cli(&["cf", "--digits", "100", "--json"]);
    ensure!(code == 0, "exit code {code}");
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure!(
        v["label"].as_str().is_some_and(|s| s.starts_with("empirical")),
        "report not labeled empirical"
    );
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let terms = v["certified_terms"].as_u64().ok_or("no term count")? as usize;
    ensure!(
        rows.len() == terms && terms > 0,
        "{} rows for {terms} terms",
        rows.len()
    );
    let mut running: Option<f64> = None;
    for r in rows {
        if let Some(x) = r["r_n"].as_f64() {
            running = Some(running.map_or(x, |m| m.max(x)));
        }
        ensure!(
            r["running_max_r"].as_f64() == running,
            "running max wrong at n = {}",
            r["n"]
        );
    }
    let (code, text) = cli(&["cf", "--digits", "100"]);
    ensure!(
        code == 0 && text.lines().any(|l| l.starts_with("# empirical")),
        "text output not labeled"
    );
    let last = &rows[rows.len() - 1];
    Ok(format!(
        "{terms} rows; last r_n = {}, running max = {}",
        last["r_n"], last["running_max_r"]
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("AC1", Some(1), ac1),
        ("AC2", Some(30), ac2),
        ("AC3", None, ac3),
        ("AC4", None, ac4),
        ("AC5", Some(20), ac5),
        ("AC6", None, ac6),
        ("AC7", Some(30), ac7),
        ("AC8", None, ac8),
        ("AC9", None, ac9),
        ("AC10", None, ac10),
    ];
    let mut failed = Vec::new();
    for (name, limit, f) in criteria {
        let (r, dt) = timed(limit.map(Duration::from_secs), f);
        match r {
            Ok(msg) => println!("{name} PASS ({:.2}s) {msg}", dt.as_secs_f64()),
            Err(msg) => {
                println!("{name} FAIL ({:.2}s) {msg}", dt.as_secs_f64());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
