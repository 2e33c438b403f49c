//! Acceptance criteria at pinned tolerances. One line per criterion; the
//! process exits non-zero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use fracspec::estimate::{empirical_spectral_function, frac_estimate, periodogram};
use fracspec::fracops::{frac_derivative, frac_integral};
use fracspec::gsim::sample_path_stream;
use fracspec::special::gamma_fn;
use fracspec::specmodel::limit_variance;
use fracspec::verify::{confidence_band, run_monte_carlo, CovEntry, McConfig, McReport};
use fracspec::{GridFunction, SpectralModel};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn white() -> SpectralModel {
    SpectralModel::constant(1.0 / (2.0 * PI)).unwrap()
}

fn mc(
    model: SpectralModel,
    n_list: Vec<usize>,
    replications: usize,
    probes: Option<Vec<f64>>,
) -> McReport {
    let mut config = McConfig::new(model, 0.25, n_list, replications);
    if let Some(p) = probes {
        config.probe_lambdas = p;
    }
    config.delta_confidence = None;
    run_monte_carlo(&config).unwrap()
}

fn entry(table: &[CovEntry], lambda: f64, mu: f64) -> (f64, f64, f64) {
    let e = table
        .iter()
        .find(|c| (c.lambda - lambda).abs() < 1e-12 && (c.mu - mu).abs() < 1e-12)
        .expect("probe pair present");
    (e.emp, e.theory, e.rel_err)
}

fn abel_inversion() -> Outcome {
    let start = Instant::now();
    let g = GridFunction::from_fn(4096, false, f64::sin).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 0.25, 0.4] {
        let back = frac_derivative(&frac_integral(&g, alpha).unwrap(), alpha).unwrap();
        let n = g.num_points();
        for i in 1..n - 1 {
            worst = worst.max((back.values()[i] - g.values()[i]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-3 && secs < 5.0,
        format!("sup error {worst:.3e} (≤ 1e-3), {secs:.2}s"),
    )
}

fn power_rule() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for mu in [0.5, 1.0, 2.0] {
        for beta in [0.25, 0.5, 0.75] {
            let g = GridFunction::from_fn(8192, false, |t| t.powf(mu)).unwrap();
            let got = frac_integral(&g, beta).unwrap().eval(PI).unwrap();
            let exact = gamma_fn(mu + 1.0).unwrap() / gamma_fn(mu + 1.0 + beta).unwrap()
                * PI.powf(mu + beta);
            worst = worst.max((got / exact - 1.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-4 && secs < 5.0,
        format!("max relative error {worst:.3e} (≤ 1e-4), {secs:.2}s"),
    )
}

fn estimator_reduction() -> Outcome {
    let start = Instant::now();
    let path = sample_path_stream(&white(), 64, 1, 0, 0.0).unwrap();
    let j = periodogram(&path, 4096).unwrap();
    let f = empirical_spectral_function(&j).unwrap();
    let e = frac_estimate(&j, 0.0).unwrap();
    let diff = e.grid.sub(&f).unwrap().sup_norm();
    let energy = path.values.iter().map(|v| v * v).sum::<f64>() / 64.0;
    let parseval = (f.values().last().unwrap() - energy).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        diff <= 1e-12 && parseval <= 1e-8 && secs < 1.0,
        format!("|F_0,n − F_n| {diff:.1e} (≤ 1e-12), Parseval {parseval:.1e} (≤ 1e-8), {secs:.2}s"),
    )
}

fn limit_variance_closed_form() -> Outcome {
    let start = Instant::now();
    let closed = 1.0 / (gamma_fn(0.75).unwrap().powi(2) * gamma_fn(1.5).unwrap());
    let got = limit_variance(&white(), 0.25, PI).unwrap();
    let rel = (got / closed - 1.0).abs();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        rel <= 1e-4 && secs < 1.0,
        format!("Θ(π,π) {got:.6} vs {closed:.6}, relative {rel:.1e} (≤ 1e-4)"),
    )
}

fn variance_convergence(report: &McReport, secs: f64) -> Outcome {
    let s = &report.sizes[0];
    let (emp, th, rel) = entry(&s.cov, PI, PI);
    let (emp2, th2, rel2) = entry(&s.cov, PI / 2.0, PI);
    outcome(
        rel <= 0.15 && rel2 <= 0.20 && secs < 600.0,
        format!(
            "n·Var(π) {emp:.4} vs Θ {th:.4} rel {rel:.3} (≤ 0.15); n·Cov(π/2,π) {emp2:.4} vs {th2:.4} rel {rel2:.3} (≤ 0.20); {secs:.1}s"
        ),
    )
}

fn zero_order_consistency(report: &McReport) -> Outcome {
    let s = &report.sizes[0];
    let (emp, th, rel) = entry(&s.tau_variance, PI, PI);
    outcome(
        rel <= 0.15,
        format!("n·Var τ_n(π) {emp:.4} vs β²(π) {th:.4} rel {rel:.3} (≤ 0.15)"),
    )
}

fn normality(report: &McReport) -> Outcome {
    let s = &report.sizes[0];
    let nm = s
        .normality
        .iter()
        .find(|x| (x.lambda - PI).abs() < 1e-12)
        .unwrap();
    outcome(
        nm.p >= 0.01,
        format!(
            "KS {:.4} p {:.2e} (≥ 0.01); studentized KS {:.4} p {:.3}",
            nm.ks, nm.p, nm.ks_studentized, nm.p_studentized
        ),
    )
}

fn bias_decay(report: &McReport) -> Outcome {
    let (a, b) = (report.sizes[0].sup_bias, report.sizes[1].sup_bias);
    let factor = a / b;
    outcome(
        factor >= 1.5,
        format!("sup bias {a:.3e} (n=512) → {b:.3e} (n=2048), factor {factor:.2} (≥ 1.5)"),
    )
}

fn holder(report: &McReport) -> Outcome {
    let s = &report.sizes[0];
    outcome(
        s.holder_spread <= 4.0,
        format!(
            "q95 ω/h^Δ spread {:.3} (≤ 4) over {} lags, Δ = {}",
            s.holder_spread,
            s.holder.len(),
            report.holder_delta
        ),
    )
}

fn tails(report: &McReport, secs: f64) -> Outcome {
    let fit = &report.sizes[0].tail_fit;
    let slope = fit.linear.map_or(f64::NAN, |(_, b)| b);
    outcome(
        fit.slope_negative && fit.envelope_holds && secs < 900.0,
        format!(
            "slope {slope:.3} over {} points, envelope {} ; {secs:.1}s",
            fit.fit_points,
            if fit.envelope_holds {
                "holds"
            } else {
                "violated"
            }
        ),
    )
}

fn coverage() -> Outcome {
    let c = confidence_band(&white(), 0.25, 2048, 0.05, 5000, 1, 400).unwrap();
    outcome(
        (0.90..=0.99).contains(&c.coverage),
        format!(
            "coverage {:.4} in [0.90, 0.99], u0 {:.4}, {}/{}",
            c.coverage, c.u0, c.covered, c.replications
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = "[model]\nkind = ar1\nrho = 0.5\n\n";
    let configs = [
        ("simulate", format!("{model}[simulate]\nn_list = 32, 64\npaths = 2\nmean = 1.5\nseed = 4\n")),
        ("truth", format!("{model}[truth]\nalpha = 0.3\ngrid_points = 1025\n")),
        (
            "mc",
            format!("{model}[mc]\nalpha = 0.25\nn_list = 64, 128\nreplications = 16\ncalibration_draws = 1000\nseed = 2\n"),
        ),
        (
            "confidence",
            format!("{model}[confidence]\nn_list = 64\ndelta_list = 0.05, 0.1\ncalibration_draws = 1000\nreplications = 16\n"),
        ),
        ("fejer", format!("{model}[fejer]\nn_list = 16, 64\ngrid_points = 1025\n")),
        (
            "estimate",
            format!("{model}[estimate]\ninputs = simulate_a/path_n32_0000.csv, simulate_a/path_n64_0001.csv\nalpha_list = 0, 0.2\ngrid_points = 513\n"),
        ),
    ];
    let mut mismatched = Vec::new();
    for (verb, body) in &configs {
        let cfg = write_config(d, &format!("{verb}.cfg"), body);
        let (a, b) = (d.join(format!("{verb}_a")), d.join(format!("{verb}_b")));
        let (ra, rb) = (run_verb(verb, &cfg, &a, &[]), run_verb(verb, &cfg, &b, &[]));
        if !(ra.status.success() && rb.status.success()) {
            mismatched.push(format!(
                "{verb} failed: {}",
                String::from_utf8_lossy(&ra.stderr).trim()
            ));
            continue;
        }
        let (sa, sb) = (snapshot(&a), snapshot(&b));
        if sa.is_empty() || sa != sb {
            mismatched.push(verb.to_string());
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} verbs byte-identical across two runs", configs.len())
        } else {
            format!("differs: {}", mismatched.join("; "))
        },
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id: u32, name: &'static str, o: Outcome| {
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            id,
            o.detail
        );
        results.push((id, name, o));
    };

    record(1, "Abel inversion", abel_inversion());
    record(2, "power rule", power_rule());
    record(3, "estimator reduction", estimator_reduction());
    record(
        4,
        "limit variance closed form",
        limit_variance_closed_form(),
    );

    let start = Instant::now();
    let variance_run = mc(white(), vec![2048], 800, Some(vec![PI / 2.0, PI]));
    let secs = start.elapsed().as_secs_f64();
    record(
        5,
        "Monte Carlo variance convergence",
        variance_convergence(&variance_run, secs),
    );
    record(
        6,
        "order-zero variance",
        zero_order_consistency(&variance_run),
    );

    let shape_run = mc(white(), vec![2048], 400, None);
    record(7, "normality", normality(&shape_run));
    record(
        8,
        "bias decay",
        bias_decay(&mc(
            SpectralModel::ar1(0.5).unwrap(),
            vec![512, 2048],
            400,
            None,
        )),
    );
    record(9, "Hölder modulus", holder(&shape_run));

    let start = Instant::now();
    let tail_run = mc(white(), vec![1024], 2000, None);
    let secs = start.elapsed().as_secs_f64();
    record(10, "exponential tails", tails(&tail_run, secs));
    record(11, "confidence coverage", coverage());
    record(12, "determinism", determinism());

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({failed:?})")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
