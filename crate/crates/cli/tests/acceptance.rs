//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p heatbound-cli --test acceptance`.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heatbound::config::parse_config;
use heatbound::lab::{build_test_function, norm_sq, spectral_decompose, variational_green, DiscreteOperator, Grid1D, SpectralData};
use heatbound::special::gamma;
use heatbound::verify::{greens_by_laplace, random_interpolation_trials, run_campaign, sweep_about_lemma, sweep_gamma_lemma, CampaignReport, Lab};
use heatbound::{Potential, ProblemSpec, Regime};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn interpolation() -> Outcome {
    let start = Instant::now();
    let summary = match random_interpolation_trials(20_240_601, 200, 50, 20) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let pass = summary.violations == 0 && summary.checked == 200 * 400 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "{} checks, {} violations, worst relative excess {:e}, {}",
            summary.checked,
            summary.violations,
            summary.worst.unwrap_or(f64::NAN),
            secs(elapsed)
        ),
    )
}

fn gamma_lemma() -> Outcome {
    match sweep_gamma_lemma() {
        Ok(sweep) => {
            let n = sweep.points.len();
            let v = sweep.violations();
            outcome(n >= 1800 && v == 0, format!("{n} points, {v} violations"))
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn integral_lemma() -> Outcome {
    let start = Instant::now();
    match sweep_about_lemma() {
        Ok(sweep) => {
            let elapsed = start.elapsed();
            let n = sweep.points.len();
            let v = sweep.violations();
            let worst = sweep.summary(true).worst.unwrap_or(f64::NAN);
            outcome(
                v == 0 && n == 972 && elapsed < Duration::from_secs(60),
                format!("{n} points, {v} violations, max ln(lhs/rhs) {worst:.4}, {}", secs(elapsed)),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

/// A small operator with a random order, box and nonnegative potential.
fn random_operator(rng: &mut ChaCha8Rng) -> (Grid1D, DiscreteOperator, SpectralData) {
    let m = rng.random_range(1..=3u32);
    let n = rng.random_range(24..=160usize);
    let half_width = rng.random_range(2.0..12.0);
    let grid = Grid1D::new(half_width, n).expect("grid");
    let potential: Vec<f64> = if rng.random_bool(0.5) {
        let c = rng.random_range(0.0..3.0);
        let g = rng.random_range(0.0..4.0);
        grid.nodes().iter().map(|x: &f64| c * (x * x + 1.0).powf(g / 2.0)).collect()
    } else {
        let top = 10f64.powf(rng.random_range(-1.0..2.0));
        (0..n).map(|_| rng.random_range(0.0..top)).collect()
    };
    let op = DiscreteOperator::with_potential(&grid, m, potential).expect("operator");
    let sd = spectral_decompose(&op.matrix(), grid.spacing()).expect("eigensolver");
    (grid, op, sd)
}

fn random_operators(count: usize) -> Vec<(Grid1D, DiscreteOperator, SpectralData)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..count).map(|_| random_operator(&mut rng)).collect()
}

fn resolvent(ops: &[(Grid1D, DiscreteOperator, SpectralData)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (grid, _, sd) in ops {
        for _ in 0..4 {
            let node = rng.random_range(0..grid.len());
            let t = 10f64.powf(rng.random_range(-2.0..1.0));
            let exact = sd.greens_diag(t, node);
            let quad = match greens_by_laplace(sd, node, t, 1e-10) {
                Ok(v) => v,
                Err(e) => return outcome(false, format!("quadrature error: {e}")),
            };
            worst = worst.max(((quad - exact) / exact).abs());
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{} operators, {checked} (t, x) pairs, max relative error {worst:e}", ops.len()),
    )
}

fn random_test_function(rng: &mut ChaCha8Rng, grid: &Grid1D, center: usize) -> Vec<f64> {
    let n = grid.len();
    let mut g: Vec<f64> = match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        1 => (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
        _ => {
            let beta = rng.random_range(-1.0..0.5);
            match build_test_function(center, beta, grid, 1.0) {
                Ok(tf) => tf.values,
                Err(_) => (0..n).map(|i| (-((i as f64 - center as f64) / 4.0).powi(2)).exp()).collect(),
            }
        }
    };
    if g[center] == 0.0 {
        g[center] = 1.0;
    }
    g
}

fn domination(ops: &[(Grid1D, DiscreteOperator, SpectralData)], campaign: &CampaignReport) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (grid, op, sd) in ops {
        for _ in 0..100 {
            let center = rng.random_range(0..grid.len());
            let g = random_test_function(&mut rng, grid, center);
            let t = 10f64.powf(rng.random_range(-2.0..1.0));
            let v = variational_green(t, g[center], op.quadratic_form(&g).total(), norm_sq(&g, grid.spacing()))
                .expect("non-degenerate");
            let greens = sd.greens_diag(t, center);
            let excess = (v - greens) / greens;
            worst = worst.max(excess);
            checked += 1;
            if excess > 1e-10 {
                violations += 1;
            }
        }
    }
    let mut campaign_checked = 0;
    for row in &campaign.certificates {
        if let (Some(v), Some(g)) = (row.v_star, row.greens) {
            campaign_checked += 1;
            let excess = (v - g) / g;
            worst = worst.max(excess);
            if excess > 1e-10 {
                violations += 1;
            }
        }
    }
    let recorded = campaign.lemmas.as_ref().map_or(usize::MAX, |l| l.variational.violations);
    outcome(
        violations == 0 && recorded == 0 && campaign_checked > 0,
        format!(
            "{checked} random test functions on {} operators, {campaign_checked} campaign test functions, {violations} violations, max relative excess {worst:e}",
            ops.len()
        ),
    )
}

fn lab(m: u32, potential: Potential, half_width: f64, n: usize) -> Lab {
    let spec = ProblemSpec::new(1, m, 1.0, 1.0, 2.0, potential).expect("spec");
    let grid = Grid1D::new(half_width, n).expect("grid");
    Lab::build(&spec, &grid).expect("lab")
}

fn free_kernels() -> Outcome {
    use std::f64::consts::PI;
    let start = Instant::now();
    let mut errors = Vec::new();
    for (m, reference, tol) in [(1, (4.0 * PI).powf(-0.5), 1e-3), (2, gamma(1.25) / PI, 1e-2)] {
        let lab = lab(m, Potential::Zero, 40.0, 2048);
        let node = lab.grid().nearest_node(0.0);
        let k = lab.kernel(1.0, node);
        errors.push((m, k, ((k - reference) / reference).abs(), tol));
    }
    let elapsed = start.elapsed();
    let pass = errors.iter().all(|&(_, _, e, tol)| e <= tol) && elapsed < Duration::from_secs(120);
    let detail: Vec<String> = errors
        .iter()
        .map(|(m, k, e, _)| format!("m={m}: k={k:.7} rel {e:.2e}"))
        .collect();
    outcome(pass, format!("{}, {}", detail.join("; "), secs(elapsed)))
}

fn mehler() -> Outcome {
    use std::f64::consts::PI;
    let lab = lab(1, Potential::Harmonic, 12.0, 1200);
    let mut worst = 0.0f64;
    for t in [0.2f64, 0.5, 1.0] {
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let node = lab.grid().nearest_node(x);
            // The reference is taken at the node actually sampled.
            let xn = lab.grid().node(node);
            let reference = (2.0 * PI * (2.0 * t).sinh()).powf(-0.5) * (-xn * xn * t.tanh()).exp();
            worst = worst.max(((lab.kernel(t, node) - reference) / reference).abs());
        }
    }
    outcome(worst <= 1e-3, format!("15 (t, x) pairs, max relative error {worst:.2e}"))
}

fn end_to_end(report: &CampaignReport, elapsed: Duration) -> Outcome {
    let checked: Vec<_> = report.certificates.iter().filter(|r| r.is_checked()).collect();
    let bad = checked
        .iter()
        .filter(|r| !matches!((r.k_lower, r.k_numeric), (Some(lo), Some(k)) if lo > 0.0 && lo <= k))
        .count();
    let r2 = |regime| report.regression_for(regime).and_then(|r| r.r_squared);
    let (late, early) = (r2(Regime::Late), r2(Regime::Early));
    let regression_ok = [late, early].iter().all(|r| r.is_some_and(|v| v >= 0.9));
    let fmt = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    outcome(
        !checked.is_empty() && bad == 0 && regression_ok && !report.has_stage_failures(),
        format!(
            "{} rows, {} checked, {bad} outside (0, k_numeric], R^2 late {} early {}, {}",
            report.certificates.len(),
            checked.len(),
            fmt(late),
            fmt(early),
            secs(elapsed)
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = dir.path().join("small.toml");
    fs::write(
        &config,
        "[grid]\nL = 20.0\nn = 400\n\n[campaign]\nt = [0.1, 0.3, 1.0]\nx = [-1.0, 0.0, 1.0]\n",
    )
    .expect("write config");
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let out = dir.path().join(format!("out{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_heatbound"))
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", &threads.to_string(), "certify"])
            .output()
            .expect("run heatbound");
        match fs::read(out.join("campaign.csv")) {
            Ok(bytes) => outputs.push(bytes),
            Err(e) => {
                return outcome(
                    false,
                    format!("no campaign.csv with {threads} threads ({e}); exit {:?}", status.status.code()),
                )
            }
        }
    }
    let same = outputs[0] == outputs[1];
    outcome(same, format!("campaign.csv with 1 and 4 threads: {} bytes, identical = {same}", outputs[0].len()))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        println!("criterion {n} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failures += 1;
        }
    };

    report(1, "interpolation lemma", interpolation());
    report(2, "gamma lemma", gamma_lemma());
    report(3, "integral lemma", integral_lemma());

    let ops = random_operators(50);
    report(4, "resolvent consistency", resolvent(&ops));

    let start = Instant::now();
    let campaign = run_campaign(&parse_config("").expect("default config"));
    let campaign_time = start.elapsed();
    report(5, "variational domination", domination(&ops, &campaign));
    report(6, "free-kernel oracle", free_kernels());
    report(7, "Mehler oracle", mehler());
    report(8, "end-to-end certificates", end_to_end(&campaign, campaign_time));
    report(9, "determinism", determinism());

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
