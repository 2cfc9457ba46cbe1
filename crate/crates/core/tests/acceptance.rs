//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use emlab::cli::{format_csv, parse_config, run, Outcome, Subcommand};
use emlab::harness::{coefficient_checks, mode_slopes, propagator_conservation, transverse_check};

// serialize so the wall-clock budgets are not shared with other criteria
static LOCK: Mutex<()> = Mutex::new(());

fn report(id: u32, title: &str, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let ok = pass && elapsed < budget;
    // straight to the handle so the line survives libtest output capture
    let _ = writeln!(
        std::io::stderr(),
        "{} criterion {id} ({title}): {detail}; {:.2}s of {:.0}s",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(elapsed < budget, "criterion {id} over budget: {elapsed:?} > {budget:?}");
}

fn summarize(o: &Outcome) -> String {
    o.checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ")
}

fn run_sub(sub: Subcommand, flags: &[(&str, &str)]) -> Outcome {
    let flags: Vec<(String, String)> = flags.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let cfg = parse_config(sub, None, &flags).unwrap();
    run(&cfg).unwrap()
}

#[test]
fn criterion_1_root_structure() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let o = run_sub(Subcommand::Roots, &[]);
    let n = o.series.get("sigma").map_or(0, |s| s.len());
    report(1, "root structure", o.passed() && n == 200, t.elapsed(), Duration::from_secs(1), &summarize(&o));
}

#[test]
fn criterion_2_coefficients() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let r = coefficient_checks(1000, 0).unwrap();
    let flagged: Vec<String> = r.disagreements.iter().map(|(k, c, i, j)| format!("{c}({i},{j})@{k}")).collect();
    for f in &flagged {
        println!("NOTE closed-form disagreement {f}");
    }
    let detail = format!(
        "reconstruction {:.2e} (< 1e-13), ODE residual {:.2e} (< 1e-9), {} closed-form disagreements reported",
        r.max_reconstruction,
        r.max_ode_residual,
        flagged.len()
    );
    report(2, "coefficient correctness", r.passes(), t.elapsed(), Duration::from_secs(5), &detail);
}

#[test]
fn criterion_3_transverse_channel() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let e = transverse_check(&[0.0, 2f64.ln(), 5.0], 100, 0).unwrap();
    report(3, "transverse channel", e < 1e-10, t.elapsed(), Duration::from_secs(1), &format!("max deviation from e^-t {e:.2e}"));
}

#[test]
fn criterion_4_sum_rates() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let o = run_sub(Subcommand::LinearDecay, &[]);
    let names = ["rho2_L2_slope", "theta2_L2_slope", "u2_L2_slope", "grad_rho2_L2_slope", "grad_theta2_L2_slope"];
    let checks: Vec<_> = names.iter().map(|n| o.check(n).expect("check present")).collect();
    let detail = checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ");
    report(4, "sum-system rates", checks.iter().all(|c| c.pass), t.elapsed(), Duration::from_secs(60), &detail);
}

#[test]
fn criterion_5_difference_rates() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let o = run_sub(Subcommand::LinearDecay, &[]);
    let names = ["B_L2_slope", "E_L2_slope", "u1_L2_slope", "rho1_theta1_L2_rate", "B_L1hat_slope"];
    let checks: Vec<_> = names.iter().map(|n| o.check(n).expect("check present")).collect();
    let detail = checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | ");
    report(5, "difference-system rates", checks.iter().all(|c| c.pass), t.elapsed(), Duration::from_secs(120), &detail);
}

#[test]
fn criterion_6_mode_slopes() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let ms = mode_slopes(&[0.05, 0.1, 0.2]).unwrap();
    let detail = ms
        .iter()
        .map(|m| format!("k={} slope {:.6} sigma {:.6} rel {:.1e}", m.kmag, m.fit.slope, m.sigma, m.relative_error()))
        .collect::<Vec<_>>()
        .join(", ");
    let pass = ms.iter().all(|m| m.relative_error() < 0.01);
    report(6, "per-mode bound", pass, t.elapsed(), Duration::from_secs(5), &detail);
}

#[test]
fn criterion_7_propagator_conservation() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
    let c = propagator_conservation(100, &times, 0).unwrap();
    let detail = format!("max |gauss| {:.2e}, max |k.B| {:.2e} (< 1e-9)", c.max_gauss, c.max_div_b);
    report(7, "difference-propagator conservation", c.passes(1e-9), t.elapsed(), Duration::from_secs(10), &detail);
}

#[test]
fn criterion_8_nonlinear_run() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let o = run_sub(Subcommand::Nonlinear, &[("n", "16"), ("s", "4"), ("amplitude", "1e-2"), ("dt", "2.5e-3"), ("t_end", "20")]);
    for n in &o.notes {
        println!("NOTE {n}");
    }
    let steps = o.series.get("E_s").map_or(0, |s| s.len());
    let pass = o.passed() && steps == 8001;
    report(8, "nonlinear torus run", pass, t.elapsed(), Duration::from_secs(600), &summarize(&o));
}

#[test]
fn criterion_9_determinism() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let configs: [(Subcommand, &[(&str, &str)]); 4] = [
        (Subcommand::Roots, &[]),
        (Subcommand::GreenVerify, &[]),
        (Subcommand::LinearDecay, &[]),
        (Subcommand::Nonlinear, &[("t_end", "0.25")]),
    ];
    let mut detail = Vec::new();
    let mut pass = true;
    for (sub, flags) in configs {
        let a = format_csv(&run_sub(sub, flags).series).unwrap();
        let b = format_csv(&run_sub(sub, flags).series).unwrap();
        let same = a.as_bytes() == b.as_bytes();
        pass &= same;
        detail.push(format!("{sub:?} {} bytes {}", a.len(), if same { "identical" } else { "DIFFER" }));
    }
    report(9, "determinism", pass, t.elapsed(), Duration::from_secs(600), &detail.join(", "));
}
