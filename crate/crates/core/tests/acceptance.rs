//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! on any failure. Run with `cargo test --release --test acceptance`.

use std::time::{Duration, Instant};

use ssalab_core::bdecomp::{default_grid, ProductCF};
use ssalab_core::config::ExperimentConfig;
use ssalab_core::escape::{
    audit_type_a, construct_type_a_gauge, default_r_grid, dominated_variation_test, k_w, liminf_estimate, sum_classifier, Gauge,
    SmallBallCdf, Ternary, Verdict,
};
use ssalab_core::harness::run;
use ssalab_core::levy_lil::{
    brownian_hitting, brownian_last_exit, duality_pairs, exit_time_cdf_1d, hitting_probability_bound_check, lil_hitting_experiment,
    lil_sup_experiment, stable_half_cdf, stable_small_ball, BrownianConfig, LevyKind, StepPolicy,
};
use ssalab_core::sequences::{
    build_ensemble, build_w_path, build_y_path, ergodic_average, log_growth_slope, BuildOptions, PathKind, SequenceParams,
};
use ssalab_core::stats::{ks_critical, ks_critical_two, ks_one_sample, ks_two_sample, linear_fit, median, normal_cdf, normal_sf};
use ssalab_core::{IncrementLaw, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn bernoulli() -> IncrementLaw {
    IncrementLaw::bernoulli(0.5, vec![1.0]).unwrap()
}

fn gaussian() -> IncrementLaw {
    IncrementLaw::standard_gaussian(1).unwrap()
}

fn c1_escape_constant() -> Result<Outcome> {
    let law = IncrementLaw::point_mass(vec![1.0])?;
    let w = build_w_path(SequenceParams::new(2.0, 1, 0, 900)?, &law, &BuildOptions::default(), 1)?;
    let rep = liminf_estimate(&[w], &Gauge::constant(1.0)?)?;
    let worst = rep.per_path[0].iter().map(|m| (m - 2.0).abs()).fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |liminf - 2| = {worst:.2e}"))
}

fn c2_fixed_point() -> Result<Outcome> {
    let grid = default_grid(1);
    let (mut residual, mut closed): (f64, f64) = (0.0, 0.0);
    for b in [0.3, 0.5, 0.8] {
        for law in [gaussian(), bernoulli()] {
            residual = residual.max(ProductCF::from_law(&law, b, 1e-12, 100_000)?.check_fixed_point(&grid)?);
        }
        let p = ProductCF::from_law(&gaussian(), b, 1e-12, 100_000)?;
        for z in &grid {
            let exact = (-z[0] * z[0] / (2.0 * (1.0 - b * b))).exp();
            closed = closed.max((p.mu_hat(z)?.value - exact).norm());
        }
    }
    outcome(residual <= 1e-10 && closed <= 1e-10, format!("max residual {residual:.2e}, Gaussian closed-form error {closed:.2e}"))
}

fn c3_empirical_cf() -> Result<Outcome> {
    let params = SequenceParams::new(2.0, 1, 0, 0)?;
    let mut details = Vec::new();
    let mut ok = true;
    for (name, law) in [("gaussian", gaussian()), ("bernoulli", bernoulli())] {
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::ShiftSelfsimilar, 3, 100_000)?;
        let xs: Vec<f64> = paths.iter().map(|p| p.value(0)[0]).collect();
        let m = ProductCF::from_law(&law, 0.5, 1e-12, 100_000)?.empirical_cf_match(&xs, &default_grid(1))?;
        ok &= m.passed;
        details.push(format!("{name} {:.4} <= {:.4}", m.max_deviation, m.band));
    }
    outcome(ok, details.join(", "))
}

fn c4_dichotomy() -> Result<Outcome> {
    let f = SmallBallCdf::power(1.0);
    let deltas = [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0];
    let div = sum_classifier(&f, &Gauge::power_log(1.0, 0.0)?, &deltas, 10_000)?;
    let conv = sum_classifier(&f, &Gauge::power_log(1.0, 2.0)?, &deltas, 10_000)?;
    let all_div = div.per_delta.iter().all(|d| d.verdict == Verdict::Diverges);
    let all_conv = conv.per_delta.iter().all(|d| d.verdict == Verdict::Converges);
    // brackets resolve C to the delta grid: [0, min] for C = 0 and [max, inf] for C = inf
    let brackets = div.c_low == 0.0 && div.c_high == deltas[0] && conv.c_low == deltas[deltas.len() - 1] && conv.c_high.is_infinite();
    outcome(
        all_div && all_conv && brackets,
        format!("1/n: [{}, {}], 1/(n log^2 n): [{}, {}]", div.c_low, div.c_high, conv.c_low, conv.c_high),
    )
}

fn c5_dominated_variation() -> Result<Outcome> {
    let yes = [0.5, 1.0, 2.0, 3.0].iter().all(|b| {
        let f = SmallBallCdf::power(*b);
        dominated_variation_test(&f, &default_r_grid(&f)).verdict == Ternary::Yes
    });
    let e = SmallBallCdf::exp_inverse();
    let no = dominated_variation_test(&e, &default_r_grid(&e)).verdict == Ternary::No;
    let g = construct_type_a_gauge(&e, 2.0)?;
    let audit = audit_type_a(&e, 2.0, &g.levels, &g.starts);
    outcome(
        yes && no && g.audit.passed && audit.passed,
        format!("power yes: {yes}, exp no: {no}, gauge levels {}, re-audit {}", g.levels.len(), audit.passed),
    )
}

fn c6_k_w() -> Result<Outcome> {
    let lap = |u: f64| 0.5 + 0.5 * (-u).exp();
    let (lambda, a) = (0.5, 2.0);
    // second quadrature: trapezoid on the log scale
    let r = 2f64.powi(-10);
    let adaptive = k_w(r, &lap, lambda, a)?;
    let upper = (1.0 / r).ln();
    let m = 1_000_000;
    let h = upper / m as f64;
    let f = |t: f64| (lap(t.exp()).ln() - lambda.ln()) / a.ln();
    let s = 0.5 * (f(0.0) + f(upper)) + (1..m).map(|i| f(i as f64 * h)).sum::<f64>();
    let trap = r.powf(-lambda.ln() / a.ln()) * (s * h).exp();
    let quad_rel = (adaptive / trap - 1.0).abs();

    let r = 2f64.powi(-40);
    let index = k_w(2.0 * r, &lap, lambda, a)? / k_w(r, &lap, lambda, a)?;
    let index_rel = (index / 2.0 - 1.0).abs();

    let params = SequenceParams::new(2.0, 1, 0, 0)?;
    let paths = build_ensemble(params, &bernoulli(), &BuildOptions::default(), PathKind::ShiftSelfsimilar, 6, 1_000_000)?;
    let mut xs: Vec<f64> = paths.iter().map(|p| p.value(0)[0]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lr, lp): (Vec<f64>, Vec<f64>) = (4..=12)
        .map(|k| {
            let r = 2f64.powi(-k);
            let p = xs.partition_point(|x| *x <= r) as f64 / xs.len() as f64;
            (r.log2(), p.log2())
        })
        .unzip();
    let slope = linear_fit(&lr, &lp).1;
    let expected = -lambda.ln() / a.ln();
    let slope_rel = (slope / expected - 1.0).abs();
    outcome(
        quad_rel <= 1e-6 && index_rel <= 0.02 && slope_rel <= 0.1,
        format!("quadrature rel {quad_rel:.1e}, K_W(2r)/K_W(r) = {index:.5}, small-ball slope {slope:.4}"),
    )
}

fn c7_ergodicity() -> Result<Outcome> {
    let params = SequenceParams::new(std::f64::consts::E, 1, 0, 99_999)?;
    let y = build_y_path(params, &gaussian(), &BuildOptions::default(), 7)?;
    let sd = (1.0 / (1.0 - (-2.0f64).exp())).sqrt();
    let mut worst: f64 = 0.0;
    for x in [-2.0, -1.0, 0.0, 0.5, 1.5] {
        for delta in [0.1, 0.3, 0.7, 1.5] {
            let exact = normal_cdf((x + delta) / sd) - normal_cdf((x - delta) / sd);
            worst = worst.max((ergodic_average(&y, &[x], delta)? - exact).abs());
        }
    }
    outcome(worst <= 0.02, format!("max deviation over 20 pairs {worst:.4}"))
}

fn c8_log_growth() -> Result<Outcome> {
    let law = IncrementLaw::exponential(vec![1.0])?;
    let a: f64 = 4.0;
    let params = SequenceParams::new(a, 1, 0, 59)?;
    let mut worst: f64 = 0.0;
    for s in 0..10 {
        let w = build_w_path(params, &law, &BuildOptions::default(), 800 + s)?;
        worst = worst.max((log_growth_slope(&w)? / a.ln() - 1.0).abs());
    }
    outcome(worst <= 0.05, format!("a = 4, max relative slope error {worst:.4}"))
}

fn c9_stable() -> Result<Outcome> {
    // smallest radii with at least 10 hits per 10^6 draws; larger radii carry finite-r bias
    let half = stable_small_ball(0.5, &[0.03, 0.04, 0.05, 0.07, 0.1], 1_000_000, 9)?;
    let within = half
        .radii
        .iter()
        .zip(half.probabilities.iter().zip(&half.std_errors))
        .all(|(r, (p, se))| (p - stable_half_cdf(*r)).abs() <= 3.0 * se);
    let third = stable_small_ball(1.0 / 3.0, &[0.002, 0.003, 0.005, 0.007, 0.01, 0.015, 0.02], 1_000_000, 10)?;
    let enough = [&half, &third].iter().all(|r| r.probabilities.iter().all(|p| *p * r.count as f64 >= 10.0));
    let ok = within && enough && (half.slope + 1.0).abs() <= 0.1 && (third.slope + 0.5).abs() <= 0.1;
    outcome(ok, format!("erfc within 3 SE: {within}, slope(1/2) {:.3}, slope(1/3) {:.3}", half.slope, third.slope))
}

fn c10_hitting_oracle() -> Result<Outcome> {
    let n = 100_000;
    let cfg = |bridge| BrownianConfig { bridge, ..BrownianConfig::new(1, n, 1e-2).unwrap() };
    let with = brownian_hitting(&cfg(true), &[1.0], 10)?.column(0);
    let without = brownian_hitting(&cfg(false), &[1.0], 10)?.column(0);
    let crit = ks_critical(0.01, n);
    let good = ks_one_sample(&with, exit_time_cdf_1d).statistic;
    let bad = ks_one_sample(&without, exit_time_cdf_1d).statistic;
    let one_sided = ks_one_sample(&with, |t| 2.0 * normal_sf(1.0 / t.sqrt())).statistic;
    outcome(
        good < crit && bad > crit,
        format!("KS bridge {good:.4}, no bridge {bad:.4}, critical {crit:.4}; one-sided passage law gives {one_sided:.4}"),
    )
}

fn c11_selfsimilarity() -> Result<Outcome> {
    let n = 10_000;
    let crit = ks_critical_two(0.01, n, n);
    let mut details = Vec::new();
    let mut ok = true;
    for d in [1, 3] {
        let cfg = BrownianConfig::new(d, n, 1e-2)?;
        let t1 = brownian_hitting(&cfg, &[1.0], 20)?.column(0);
        let t2 = brownian_hitting(&cfg, &[2.0], 21)?.column(0);
        let scaled: Vec<f64> = t1.iter().map(|t| 4.0 * t).collect();
        let ks = ks_two_sample(&t2, &scaled).statistic;
        ok &= ks < crit;
        details.push(format!("T d={d} {ks:.4}"));
    }
    let cfg = BrownianConfig { policy: StepPolicy::Adaptive { kappa: 0.05 }, ..BrownianConfig::new(3, n, 1e-2)? };
    let l1 = brownian_last_exit(&cfg, &[1.0], 22)?.last_exit_column(0).unwrap();
    let l2 = brownian_last_exit(&cfg, &[2.0], 23)?.last_exit_column(0).unwrap();
    let scaled: Vec<f64> = l1.iter().map(|t| 4.0 * t).collect();
    let ks = ks_two_sample(&l2, &scaled).statistic;
    ok &= ks < crit;
    details.push(format!("L d=3 {ks:.4}"));
    outcome(ok, format!("{} (critical {crit:.4})", details.join(", ")))
}

fn median_curve(raw: &[Vec<f64>]) -> Vec<f64> {
    (0..raw[0].len()).map(|k| median(&raw.iter().map(|r| r[k]).collect::<Vec<_>>())).collect()
}

fn c12_lil() -> Result<Outcome> {
    let (k, reps, steps) = (16, 50, 1000);
    let h1 = BrownianConfig::new(1, 1, 1e-2)?;
    let h2 = BrownianConfig::new(1, 2, 1e-2)?;
    let (hit1, samples) = lil_hitting_experiment(&h1, k, reps, (0.25, 1.5), 31)?;
    let (hit2, _) = lil_hitting_experiment(&h2, k, reps, (0.5, 3.0), 32)?;
    let root2 = 2f64.sqrt();
    let sup1 = lil_sup_experiment(1, 1, k, steps, reps, (0.6 * root2, 1.1 * root2), 33)?;
    let sup2 = lil_sup_experiment(1, 2, k, steps, reps, (0.6, 1.1), 34)?;
    let a = hit1.in_band_fraction >= 0.8 && sup1.in_band_fraction >= 0.8;
    let (m1, m2) = (median_curve(&hit1.raw), median_curve(&hit2.raw));
    let (s1, s2) = (median_curve(&sup1.raw), median_curve(&sup2.raw));
    let half = k / 2;
    let b = m1[half..].iter().zip(&m2[half..]).all(|(x, y)| y > x) && s1[half..].iter().zip(&s2[half..]).all(|(x, y)| y < x);
    let c = samples.iter().all(|s| {
        let pairs = duality_pairs(s);
        !pairs.is_empty() && pairs.iter().all(|(x, y)| x.to_bits() == y.to_bits())
    });
    outcome(
        a && b && c,
        format!(
            "(a) in band: hitting {:.2}, sup {:.2}; (b) ordered in N: {b}; (c) duality bit-exact: {c}",
            hit1.in_band_fraction, sup1.in_band_fraction
        ),
    )
}

fn c13_bound() -> Result<Outcome> {
    let b = hitting_probability_bound_check(LevyKind::Brownian, 1.0, 2.0, 1.0, 1.0, 100_000, 41)?;
    let s = hitting_probability_bound_check(LevyKind::StableSubordinator { alpha: 0.5 }, 1.0, 2.0, 1.0, 1.0, 100_000, 42)?;
    outcome(b.passed && s.passed, format!("Brownian {:.4} <= {:.4}, stable {:.4} <= {:.4}", b.lhs, b.rhs, s.lhs, s.rhs))
}

const REPRO_CONFIGS: [&str; 4] = [
    "schema = 1\nexperiment = \"simulate-w\"\nseed = 5\n[law]\nkind = \"exponential\"\nrates = [1.0]\n[sequence]\na = 2.0\ndim = 1\nn_min = -4\nn_max = 30\n[simulate]\npaths = 600\nlag = 1\n",
    "schema = 1\nexperiment = \"bdecomp\"\nseed = 6\n[law]\nkind = \"bernoulli-scaled\"\nlambda = 0.5\nv = [1.0]\n[bdecomp]\nb = 0.5\nsamples = 5000\n",
    "schema = 1\nexperiment = \"lil-stable\"\nseed = 7\n[stable]\nalpha = 0.5\nradii = [0.1, 0.2, 0.4]\ncount = 200000\n",
    "schema = 1\nexperiment = \"lil-hitting\"\nseed = 8\n[brownian]\nd = 1\nmotions = 2\ndt = 0.01\n[lil]\nk = 10\nreplicates = 8\n",
];

fn c14_reproducibility() -> Result<Outcome> {
    let mut ok = true;
    for text in REPRO_CONFIGS {
        let cfg = ExperimentConfig::from_toml(text)?;
        let mut digests = Vec::new();
        for workers in [1, 8, 8] {
            let dir = tempfile::tempdir()?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
            digests.push(pool.install(|| run(&cfg, dir.path(), false))?.digests);
        }
        ok &= digests.iter().all(|d| *d == digests[0]);
    }
    outcome(ok, format!("{} experiments at 1 and 8 workers", REPRO_CONFIGS.len()))
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 14] = [
        ("deterministic escape constant", secs(1), c1_escape_constant),
        ("b-decomposable fixed point", secs(5), c2_fixed_point),
        ("empirical and product characteristic functions", secs(30), c3_empirical_cf),
        ("series dichotomy", secs(10), c4_dichotomy),
        ("dominated variation and type-A gauge", secs(10), c5_dominated_variation),
        ("K_W regular variation", secs(120), c6_k_w),
        ("ergodic averages", secs(30), c7_ergodicity),
        ("log-growth rate", secs(5), c8_log_growth),
        ("stable small-ball exponent", secs(180), c9_stable),
        ("Brownian hitting oracle", secs(120), c10_hitting_oracle),
        ("hitting and last-exit selfsimilarity", secs(300), c11_selfsimilarity),
        ("LIL property checks", secs(600), c12_lil),
        ("hitting-probability bound", secs(120), c13_bound),
        ("reproducibility across workers", secs(60), c14_reproducibility),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| *x == id || name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && took <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s of {}s]",
            if passed { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
