//! Experiment runner: dispatches a validated configuration, writes CSV and
//! JSON outputs, and records SHA-256 digests for reproducibility.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bdecomp::{axis_grid, ProductCF};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::escape::{construct_type_a_gauge, default_r_grid, dominated_variation_test, sum_classifier, type_a_check, Verdict};
use crate::levy_lil::{
    brownian_last_exit, duality_pairs, hitting_probability_bound_check, lil_hitting_experiment, lil_radii, lil_sup_experiment,
    stable_half_cdf, stable_small_ball,
};
use crate::sequences::{build_ensemble, test_shift_selfsimilarity, BuildOptions, PathKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Success,
    /// Finished, but a classifier verdict was undecided.
    Undecided,
    /// Finished, but a pass/fail flag is false.
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_clock_seconds: f64,
    /// File name to hex SHA-256 digest, excluding this record.
    pub digests: BTreeMap<String, String>,
    pub flags: BTreeMap<String, bool>,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Success => 0,
            RunStatus::Failed => 3,
            RunStatus::Undecided => 4,
        }
    }
}

/// Process exit code for an error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 3,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

/// Outputs collected in memory and written only when the whole run succeeds.
#[derive(Default)]
struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
    flags: BTreeMap<String, bool>,
    undecided: bool,
}

impl Outputs {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(v)?;
        bytes.push(b'\n');
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    fn flag(&mut self, name: &str, v: bool) {
        self.flags.insert(name.to_string(), v);
    }
}

fn f(v: f64) -> String {
    format!("{v}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Resolves the output directory: explicit argument, then the config, then `out/<experiment>`.
pub fn output_dir(config: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(config.experiment.name()))
}

/// Validates, runs and persists an experiment. Existing files are only
/// replaced with `force`; nothing is left behind on failure.
pub fn run(config: &ExperimentConfig, out_dir: &Path, force: bool) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let outputs = execute(config)?;
    let mut names: Vec<&String> = outputs.files.keys().collect();
    let record_name = "run.json".to_string();
    names.push(&record_name);
    if !force {
        let clash: Vec<String> = names.iter().filter(|n| out_dir.join(n.as_str()).exists()).map(|n| n.to_string()).collect();
        if !clash.is_empty() {
            return Err(Error::Config(format!("refusing to overwrite {} in {} (use --force)", clash.join(", "), out_dir.display())));
        }
    }
    let created_dir = !out_dir.exists();
    std::fs::create_dir_all(out_dir)?;
    let digests: BTreeMap<String, String> = outputs.files.iter().map(|(k, v)| (k.clone(), sha256_hex(v))).collect();
    let status = if outputs.flags.values().any(|v| !v) {
        RunStatus::Failed
    } else if outputs.undecided {
        RunStatus::Undecided
    } else {
        RunStatus::Success
    };
    let record = RunRecord {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        digests,
        flags: outputs.flags.clone(),
        status,
    };
    let mut written = Vec::new();
    let result = (|| -> Result<()> {
        for (name, bytes) in &outputs.files {
            let p = out_dir.join(name);
            std::fs::write(&p, bytes)?;
            written.push(p);
        }
        let p = out_dir.join(&record_name);
        std::fs::write(&p, serde_json::to_vec_pretty(&record)?)?;
        written.push(p);
        Ok(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = std::fs::remove_file(p);
        }
        if created_dir {
            let _ = std::fs::remove_dir(out_dir);
        }
        return Err(e);
    }
    Ok(record)
}

fn execute(config: &ExperimentConfig) -> Result<Outputs> {
    let seed = config.seed.expect("validated");
    let mut out = Outputs::default();
    let cfg_json = serde_json::to_value(config)?;
    match config.experiment {
        ExperimentKind::SimulateW | ExperimentKind::SimulateY => {
            let law = config.law()?;
            let params = config.sequence.expect("validated");
            let sim = config.simulate.clone().unwrap_or(crate::config::SimulateSection {
                paths: 1,
                truncation_depth: None,
                tolerance: None,
                lag: None,
            });
            let opts = BuildOptions { truncation_depth: sim.truncation_depth, tolerance: sim.tolerance, ..Default::default() };
            let kind = if config.experiment == ExperimentKind::SimulateW { PathKind::ShiftSelfsimilar } else { PathKind::StationaryOu };
            let paths = build_ensemble(params, &law, &opts, kind, seed, sim.paths)?;
            let prefix = if kind == PathKind::ShiftSelfsimilar { "W" } else { "Y" };
            let mut header = vec!["path".to_string(), "n".to_string()];
            header.extend((1..=params.dim).map(|i| format!("{prefix}_{i}")));
            let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut rows = Vec::new();
            for (i, p) in paths.iter().enumerate() {
                for n in p.indices() {
                    let mut r = vec![i.to_string(), n.to_string()];
                    r.extend(p.value(n).iter().map(|v| f(*v)));
                    rows.push(r);
                }
            }
            out.csv("paths.csv", &hdr, rows)?;
            let flagged = paths.iter().filter(|p| p.truncation_flagged).count();
            let mut summary = json!({
                "config": cfg_json,
                "seed": seed,
                "paths": paths.len(),
                "truncation_depth": paths[0].truncation_depth,
                "truncation_bound": paths.iter().map(|p| p.truncation_bound).fold(0.0, f64::max),
                "increment_quantile": paths[0].increment_quantile,
                "truncation_flagged": flagged,
            });
            if let Some(lag) = sim.lag {
                let rep = test_shift_selfsimilarity(&paths, lag)?;
                out.flag("scaling_test", rep.passed);
                summary["scaling_test"] = json!({
                    "lag": rep.lag,
                    "scale": rep.scale,
                    "tests": rep.tests.len(),
                    "threshold": rep.threshold,
                    "min_p_value": rep.min_p_value,
                    "passed": rep.passed,
                });
            }
            out.json("summary.json", &summary)?;
        }
        ExperimentKind::Bdecomp => {
            let law = config.law()?;
            let s = config.bdecomp.clone().expect("validated");
            let pcf = ProductCF::from_law(&law, s.b, s.tol, s.max_terms)?;
            let grid = axis_grid(law.dim(), s.grid_points, s.half_width);
            let mut header: Vec<String> = (1..=law.dim()).map(|i| format!("z_{i}")).collect();
            header.extend(["re", "im", "bound", "residual"].map(String::from));
            let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut rows = Vec::new();
            let mut max_res: f64 = 0.0;
            for z in &grid {
                let m = pcf.mu_hat(z)?;
                let bz: Vec<f64> = z.iter().map(|x| x * s.b).collect();
                let res = (m.value - pcf.mu_hat(&bz)?.value * pcf.rho(z)).norm();
                max_res = max_res.max(res);
                let mut r: Vec<String> = z.iter().map(|v| f(*v)).collect();
                r.extend([f(m.value.re), f(m.value.im), f(m.bound), f(res)]);
                rows.push(r);
            }
            out.csv("bdecomp.csv", &hdr, rows)?;
            let ok = max_res <= 10.0 * s.tol;
            out.flag("fixed_point", ok);
            let mut summary = json!({
                "config": cfg_json,
                "seed": seed,
                "max_residual": max_res,
                "residual_limit": 10.0 * s.tol,
                "fixed_point_passed": ok,
            });
            if s.samples > 0 {
                let params = crate::sequences::SequenceParams::new(1.0 / s.b, law.dim(), 0, 0)?;
                let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::ShiftSelfsimilar, seed, s.samples)?;
                let xs: Vec<f64> = paths.iter().flat_map(|p| p.value(0).to_vec()).collect();
                let m = pcf.empirical_cf_match(&xs, &grid)?;
                out.flag("empirical_cf", m.passed);
                summary["empirical_cf"] = serde_json::to_value(m)?;
            }
            out.json("summary.json", &summary)?;
        }
        ExperimentKind::Classify => {
            let c = config.classify.clone().expect("validated");
            let cdf = c.cdf.build(seed)?;
            let rep = sum_classifier(&cdf, &c.gauge, &c.deltas, c.horizon)?;
            out.undecided = rep.any_undecided();
            let mut rows = Vec::new();
            for d in &rep.per_delta {
                for (n, s) in d.checkpoints.iter().zip(&d.partial_sums) {
                    rows.push(vec![f(d.delta), f(*n), f(*s)]);
                }
            }
            out.csv("partial_sums.csv", &["delta", "n", "partial_sum"], rows)?;
            let dv = dominated_variation_test(&cdf, &default_r_grid(&cdf));
            out.csv("ratios.csv", &["r", "log_ratio"], dv.log_ratios.iter().map(|(r, l)| vec![f(*r), f(*l)]))?;
            out.json("classify.json", &json!({ "config": cfg_json, "seed": seed, "report": rep }))?;
        }
        ExperimentKind::TypeAGauge => {
            let t = config.type_a.clone().expect("validated");
            let cdf = t.cdf.build(seed)?;
            let g = construct_type_a_gauge(&cdf, t.a)?;
            if !g.audit.passed {
                return Err(Error::Invariant(format!("type-A gauge audit failed: {}", g.audit.failures.join("; "))));
            }
            out.flag("audit", g.audit.passed);
            out.csv(
                "gauge.csv",
                &["k", "a_k", "b_k"],
                g.levels.iter().zip(&g.starts).enumerate().map(|(k, (a, b))| vec![k.to_string(), f(*a), f(*b)]),
            )?;
            let mut summary = json!({ "config": cfg_json, "seed": seed, "gauge": g });
            if !t.deltas.is_empty() {
                let rep = sum_classifier(&cdf, &g.gauge, &t.deltas, 0)?;
                out.undecided = rep.any_undecided();
                summary["classifier"] = serde_json::to_value(rep)?;
            }
            out.json("summary.json", &summary)?;
        }
        ExperimentKind::Kw => {
            let law = config.law()?;
            let k = config.kw.clone().expect("validated");
            let classify = k.gauge.as_ref().map(|g| (g, k.deltas.as_slice(), k.horizon));
            let chk = type_a_check(&law, k.a, classify)?;
            if let Some(rep) = &chk.classifier {
                out.undecided = rep.any_undecided();
            }
            out.csv("kw.csv", &["r", "k_w"], chk.k_w_curve.iter().map(|(r, v)| vec![f(*r), f(*v)]))?;
            out.json("summary.json", &json!({ "config": cfg_json, "seed": seed, "check": chk }))?;
        }
        ExperimentKind::LilHitting => {
            let b = config.brownian.expect("validated");
            let l = config.lil.clone().expect("validated");
            let band = l.band.unwrap_or((0.5 * b.motions as f64 / 2.0, 3.0 * b.motions as f64 / 2.0));
            let (curves, samples) = lil_hitting_experiment(&b, l.k, l.replicates, band, seed)?;
            let duality = samples.iter().flat_map(duality_pairs).all(|(x, y)| x.to_bits() == y.to_bits());
            out.flag("duality", duality);
            lil_outputs(&mut out, "hitting.csv", &curves)?;
            out.json(
                "summary.json",
                &json!({
                    "config": cfg_json,
                    "seed": seed,
                    "radii": lil_radii(l.k),
                    "constant": curves.constant,
                    "band": curves.band,
                    "median": curves.median,
                    "in_band_fraction": curves.in_band_fraction,
                    "estimates": curves.estimates,
                    "flagged": curves.flagged,
                    "duality_bit_exact": duality,
                }),
            )?;
        }
        ExperimentKind::LilSup => {
            let b = config.brownian.expect("validated");
            let l = config.lil.clone().expect("validated");
            let c = (2.0 / b.motions as f64).sqrt();
            let band = l.band.unwrap_or((0.6 * c, 1.1 * c));
            let curves = lil_sup_experiment(b.d, b.motions, l.k, l.steps, l.replicates, band, seed)?;
            lil_outputs(&mut out, "sup.csv", &curves)?;
            out.json(
                "summary.json",
                &json!({
                    "config": cfg_json,
                    "seed": seed,
                    "constant": curves.constant,
                    "band": curves.band,
                    "median": curves.median,
                    "in_band_fraction": curves.in_band_fraction,
                    "estimates": curves.estimates,
                }),
            )?;
        }
        ExperimentKind::LilLastExit => {
            let b = config.brownian.expect("validated");
            let l = config.lil.clone().expect("validated");
            let s = brownian_last_exit(&b, &l.radii, seed)?;
            let last = s.last_exit.as_ref().expect("last exits requested");
            let mut rows = Vec::new();
            for (j, (hit, (exit, flagged))) in s.hitting.iter().zip(last.iter().zip(&s.flagged)).enumerate() {
                for (k, r) in s.radii.iter().enumerate() {
                    rows.push(vec![j.to_string(), f(*r), f(hit[k]), f(exit[k]), flagged.to_string()]);
                }
            }
            out.csv("lastexit.csv", &["motion", "r", "hitting", "last_exit", "flagged"], rows)?;
            out.json(
                "summary.json",
                &json!({
                    "config": cfg_json,
                    "seed": seed,
                    "motions": s.hitting.len(),
                    "flagged": s.flagged.iter().filter(|f| **f).count(),
                }),
            )?;
        }
        ExperimentKind::LilStable => {
            let st = config.stable.clone().expect("validated");
            let rep = stable_small_ball(st.alpha, &st.radii, st.count, seed)?;
            let half = (st.alpha - 0.5).abs() < 1e-15;
            let rows = rep.radii.iter().zip(rep.probabilities.iter().zip(&rep.std_errors)).map(|(r, (p, se))| {
                let oracle = if half { f(stable_half_cdf(*r)) } else { String::new() };
                vec![f(*r), f(*p), f(*se), oracle]
            });
            out.csv("stable.csv", &["r", "probability", "std_error", "closed_form"], rows)?;
            let slope_ok = (rep.slope - rep.theory).abs() <= 0.1;
            out.flag("slope", slope_ok);
            out.json("summary.json", &json!({ "config": cfg_json, "seed": seed, "report": rep, "slope_within_0.1": slope_ok }))?;
        }
        ExperimentKind::BoundCheck => {
            let b = config.bound.clone().expect("validated");
            let rep = hitting_probability_bound_check(b.process, b.b, b.c, b.gamma, b.eps, b.count, seed)?;
            out.flag("bound", rep.passed);
            out.csv(
                "bound.csv",
                &["lhs", "lhs_se", "numerator", "denominator", "rhs", "margin"],
                [vec![f(rep.lhs), f(rep.lhs_se), f(rep.numerator), f(rep.denominator), f(rep.rhs), f(rep.margin)]],
            )?;
            out.json("summary.json", &json!({ "config": cfg_json, "seed": seed, "report": rep }))?;
        }
    }
    Ok(out)
}

fn lil_outputs(out: &mut Outputs, name: &str, curves: &crate::levy_lil::LilCurves) -> Result<()> {
    let mut rows = Vec::new();
    for (i, row) in curves.raw.iter().enumerate() {
        for (k, v) in curves.index.iter().zip(row) {
            rows.push(vec![i.to_string(), k.to_string(), f(*v)]);
        }
    }
    out.csv(name, &["replicate", "k", "statistic"], rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match body() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Fast invariant suite across all modules.
pub fn check_suite(seed: u64) -> Vec<CheckResult> {
    use crate::distributions::IncrementLaw;
    use crate::escape::{Gauge, SmallBallCdf, Ternary};
    use crate::sequences::{build_w_path, build_y_path, lamperti, SequenceParams};
    use crate::{labels, seeds};

    let laws = || -> Result<Vec<IncrementLaw>> {
        Ok(vec![
            IncrementLaw::point_mass(vec![1.0])?,
            IncrementLaw::bernoulli(0.5, vec![1.0])?,
            IncrementLaw::exponential(vec![1.0, 2.0])?,
            IncrementLaw::uniform(vec![-1.0], vec![1.0])?,
            IncrementLaw::standard_gaussian(2)?,
            IncrementLaw::positive_stable(0.5)?,
        ])
    };
    let mut out = Vec::new();
    out.push(check("seeds: pure and injective", || {
        let a = seeds::derive(seed, &labels!["ab"]);
        let b = seeds::derive(seed, &labels!["a", "b"]);
        Ok((a == seeds::derive(seed, &labels!["ab"]) && a != b, format!("{a:016x} vs {b:016x}")))
    }));
    out.push(check("distributions: cf(0) = 1, |cf| <= 1, Hermitian", || {
        let mut worst: f64 = 0.0;
        for law in laws()? {
            let d = law.dim();
            worst = worst.max((law.cf(&vec![0.0; d]) - 1.0).norm());
            for t in [-3.0, -0.5, 0.7, 2.0] {
                let z = vec![t; d];
                let zn: Vec<f64> = z.iter().map(|v| -v).collect();
                let (c, cn) = (law.cf(&z), law.cf(&zn));
                worst = worst.max((c - cn.conj()).norm()).max((c.norm() - 1.0).max(0.0));
            }
        }
        Ok((worst < 1e-12, format!("worst deviation {worst:e}")))
    }));
    out.push(check("sequences: increment identities and Lamperti", || {
        let law = IncrementLaw::standard_gaussian(1)?;
        let p = SequenceParams::new(2.0, 1, -3, 12)?;
        let w = build_w_path(p, &law, &BuildOptions::default(), seed)?;
        let y = build_y_path(p, &law, &BuildOptions::default(), seed)?;
        let mut worst: f64 = 0.0;
        for n in -2..=12 {
            let dw = w.value(n)[0] - w.value(n - 1)[0] - 2f64.powi(n as i32) * w.increment(n)[0];
            let dy = y.value(n)[0] - 0.5 * y.value(n - 1)[0] - y.increment(n)[0];
            worst = worst.max(dw.abs() / (1.0 + w.value(n)[0].abs())).max(dy.abs());
        }
        let back = lamperti(&lamperti(&w)?)?;
        let round = back.values.iter().zip(&w.values).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
        Ok((worst < 1e-12 && round < 1e-12, format!("increments {worst:e}, round trip {round:e}")))
    }));
    out.push(check("sequences: point-mass escape constant", || {
        let law = IncrementLaw::point_mass(vec![1.0])?;
        let w = build_w_path(SequenceParams::new(2.0, 1, 0, 50)?, &law, &BuildOptions::default(), seed)?;
        let worst = w.indices().map(|n| (w.value(n)[0] / 2f64.powi(n as i32) - 2.0).abs()).fold(0.0, f64::max);
        Ok((worst <= 1e-9, format!("max |W(n)/a^n - 2| = {worst:e}")))
    }));
    out.push(check("bdecomp: fixed point on the standard grid", || {
        let mut worst: f64 = 0.0;
        for law in laws()? {
            for b in [0.3, 0.5, 0.8] {
                let pcf = ProductCF::from_law(&law, b, 1e-12, 100_000)?;
                worst = worst.max(pcf.check_fixed_point(&crate::bdecomp::default_grid(law.dim()))?);
            }
        }
        Ok((worst <= 1e-11, format!("max residual {worst:e}")))
    }));
    out.push(check("escape: classifier and dominated variation", || {
        let f = SmallBallCdf::power(1.0);
        let harmonic = sum_classifier(&f, &Gauge::power_log(1.0, 0.0)?, &[0.1, 1.0, 10.0], 10_000)?;
        let conv = sum_classifier(&f, &Gauge::power_log(1.0, 2.0)?, &[0.1, 1.0, 10.0], 10_000)?;
        let ok1 = harmonic.per_delta.iter().all(|d| d.verdict == Verdict::Diverges);
        let ok2 = conv.per_delta.iter().all(|d| d.verdict == Verdict::Converges);
        let dv_yes = [0.5, 1.0, 2.0, 3.0].iter().all(|b| {
            let f = SmallBallCdf::power(*b);
            dominated_variation_test(&f, &default_r_grid(&f)).verdict == Ternary::Yes
        });
        let e = SmallBallCdf::exp_inverse();
        let dv_no = dominated_variation_test(&e, &default_r_grid(&e)).verdict == Ternary::No;
        Ok((ok1 && ok2 && dv_yes && dv_no, format!("harmonic {ok1}, log-squared {ok2}, power {dv_yes}, exp {dv_no}")))
    }));
    out.push(check("escape: type-A gauge audit", || {
        let g = construct_type_a_gauge(&SmallBallCdf::exp_inverse(), 2.0)?;
        Ok((g.audit.passed, format!("{} levels", g.levels.len())))
    }));
    out.push(check("escape: K_W regular variation", || {
        let lap = |u: f64| 0.5 + 0.5 * (-u).exp();
        let r = 2f64.powi(-40);
        let ratio = crate::escape::k_w(2.0 * r, &lap, 0.5, 2.0)? / crate::escape::k_w(r, &lap, 0.5, 2.0)?;
        Ok(((ratio / 2.0 - 1.0).abs() < 0.02, format!("K_W(2r)/K_W(r) = {ratio}")))
    }));
    out.push(check("levy_lil: hitting monotone, last exit after hit, duality", || {
        let cfg = crate::levy_lil::BrownianConfig::new(3, 50, 1e-2)?;
        let cfg = crate::levy_lil::BrownianConfig { policy: crate::levy_lil::StepPolicy::Adaptive { kappa: 0.05 }, ..cfg };
        let s = brownian_last_exit(&cfg, &[1.0, 2.0, 4.0], seed)?;
        s.check()?;
        let (_, samples) = lil_hitting_experiment(&crate::levy_lil::BrownianConfig::new(1, 2, 1e-2)?, 8, 2, (0.0, 1.0), seed)?;
        let dual = samples.iter().flat_map(duality_pairs).all(|(a, b)| a.to_bits() == b.to_bits());
        Ok((dual, "hitting/last-exit invariants hold".into()))
    }));
    out.push(check("harness: rerun digests are identical", || {
        let text = "schema = 1\nexperiment = \"simulate-w\"\nseed = 3\n[law]\nkind = \"exponential\"\nrates = [1.0]\n[sequence]\na = 2.0\ndim = 1\nn_min = 0\nn_max = 10\n[simulate]\npaths = 20\n";
        let mut cfg = ExperimentConfig::from_toml(text)?;
        cfg.seed = Some(seed);
        let a = execute(&cfg)?;
        let b = execute(&cfg)?;
        Ok((a.files == b.files, format!("{} files", a.files.len())))
    }));
    out
}

/// Human-readable report for a check run.
pub fn format_checks(results: &[CheckResult]) -> String {
    let mut s = String::new();
    for r in results {
        let _ = writeln!(s, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    s
}
