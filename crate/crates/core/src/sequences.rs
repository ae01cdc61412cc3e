//! Shift a-selfsimilar additive sequences `W` and stationary OU-type
//! sequences `Y` built from iid increments, and the Lamperti map between them.
//!
//! `W(n) = sum_{j <= n} a^j X_j` and `Y(n) = sum_{j <= n} a^{j-n} X_j`, with the
//! infinite past truncated at `n_min - M`.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{norm, IncrementLaw, LawSpec};
use crate::error::{invalid, Error, Result};
use crate::labels;
use crate::seeds;
use crate::stats::{ks_two_sample_tol, KsResult};

/// Largest admissible `a^n` on a `W` window.
pub const OVERFLOW_LIMIT: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceParams {
    pub a: f64,
    pub dim: usize,
    pub n_min: i64,
    pub n_max: i64,
}

impl SequenceParams {
    pub fn new(a: f64, dim: usize, n_min: i64, n_max: i64) -> Result<Self> {
        let p = Self { a, dim, n_min, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) || !self.a.is_finite() {
            return Err(invalid("a", "must be a finite real > 1"));
        }
        if self.dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if self.n_min > self.n_max {
            return Err(invalid("window", "n_min must not exceed n_max"));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        1.0 / self.a
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rejects windows where `a^n` leaves the representable range.
    pub fn check_w_window(&self) -> Result<()> {
        let ln_a = self.a.ln();
        if self.n_max as f64 * ln_a > OVERFLOW_LIMIT.ln() || (self.n_min as f64) * ln_a < -OVERFLOW_LIMIT.ln() {
            return Err(Error::WindowOverflow { n_min: self.n_min, n_max: self.n_max });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    /// Shift a-selfsimilar additive sequence `W`.
    ShiftSelfsimilar,
    /// Stationary sequence of OU type `Y`.
    StationaryOu,
}

impl PathKind {
    fn column_prefix(self) -> &'static str {
        match self {
            PathKind::ShiftSelfsimilar => "W",
            PathKind::StationaryOu => "Y",
        }
    }
}

/// Options for path construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildOptions {
    /// Number of pre-window terms; `None` picks the default depth.
    pub truncation_depth: Option<u64>,
    /// Flag the path when the truncation bound exceeds this value.
    pub tolerance: Option<f64>,
    pub pilot_count: usize,
    /// Precomputed 0.999-quantile of |X|; skips the pilot run.
    pub increment_quantile: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { truncation_depth: None, tolerance: None, pilot_count: 100_000, increment_quantile: None }
    }
}

/// A finite realization over an integer window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub params: SequenceParams,
    pub kind: PathKind,
    /// Row-major values, one row of `dim` entries per `n` in the window.
    pub values: Vec<f64>,
    /// The increments `X_n` for `n` in the window.
    pub increments: Vec<f64>,
    pub truncation_depth: u64,
    /// Bound on the dropped tail at `n_min`, in the units of `values`.
    pub truncation_bound: f64,
    /// 0.999-quantile of |X| used in the bound.
    pub increment_quantile: f64,
    pub seed: u64,
    /// Set when the bound exceeds the caller-supplied tolerance.
    pub truncation_flagged: bool,
}

impl PathSample {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.params.n_min..=self.params.n_max
    }

    fn offset(&self, n: i64) -> usize {
        assert!((self.params.n_min..=self.params.n_max).contains(&n), "index {n} outside window");
        (n - self.params.n_min) as usize * self.params.dim
    }

    pub fn value(&self, n: i64) -> &[f64] {
        let o = self.offset(n);
        &self.values[o..o + self.params.dim]
    }

    pub fn increment(&self, n: i64) -> &[f64] {
        let o = self.offset(n);
        &self.increments[o..o + self.params.dim]
    }

    /// CSV with columns `n, W_1..W_d` (or `Y_1..Y_d`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let prefix = self.kind.column_prefix();
        let mut header = vec!["n".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("{prefix}_{i}")));
        w.write_record(&header)?;
        for n in self.indices() {
            let mut row = vec![n.to_string()];
            row.extend(self.value(n).iter().map(|v| format!("{v:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sidecar(&self, law: &LawSpec) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "params": self.params,
            "law": law,
            "seed": self.seed,
            "truncation_depth": self.truncation_depth,
            "truncation_bound": self.truncation_bound,
            "increment_quantile": self.increment_quantile,
            "truncation_flagged": self.truncation_flagged,
        })
    }

    pub fn save(&self, law: &LawSpec, csv_path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(csv_path)?)?;
        let side = csv_path.with_extension("json");
        std::fs::write(side, serde_json::to_vec_pretty(&self.sidecar(law))?)?;
        Ok(())
    }
}

/// Default truncation depth: smallest `M` with `a^{-M} a/(a-1) Q < 1e-9`.
pub fn default_depth(a: f64, quantile: f64) -> u64 {
    let c = quantile * a / (a - 1.0);
    if c <= 0.0 {
        return 0;
    }
    let m = ((c / 1e-9).ln() / a.ln()).floor() + 1.0;
    m.max(0.0) as u64
}

fn pilot_quantile(law: &IncrementLaw, opts: &BuildOptions, seed: u64) -> f64 {
    law.norm_quantile(0.999, opts.pilot_count.max(1), seeds::derive(seed, &labels!["pilot"]))
}

struct Draws {
    depth: u64,
    quantile: f64,
    bound_y: f64,
    /// increments for j = n_min - depth ..= n_max
    xs: Vec<f64>,
}

fn draw_increments(params: &SequenceParams, law: &IncrementLaw, opts: &BuildOptions, seed: u64) -> Result<Draws> {
    params.validate()?;
    if law.dim() != params.dim {
        return Err(Error::DimensionMismatch { expected: params.dim, got: law.dim() });
    }
    let quantile = match opts.increment_quantile {
        Some(q) => q,
        None => pilot_quantile(law, opts, seed),
    };
    let a = params.a;
    let depth = opts.truncation_depth.unwrap_or_else(|| default_depth(a, quantile));
    let bound_y = a.powf(-(depth as f64)) * a / (a - 1.0) * quantile;
    let count = depth as usize + params.len();
    let mut rng = seeds::stream(seed, &labels!["increments"]);
    let xs = law.sample_with(&mut rng, count).data;
    Ok(Draws { depth, quantile, bound_y, xs })
}

fn y_values(params: &SequenceParams, draws: &Draws) -> Vec<f64> {
    let d = params.dim;
    let b = params.b();
    let mut state = vec![0.0; d];
    let pre = draws.depth as usize;
    for row in draws.xs[..pre * d].chunks_exact(d) {
        for (s, x) in state.iter_mut().zip(row) {
            *s = *s * b + x;
        }
    }
    let mut out = Vec::with_capacity(params.len() * d);
    for row in draws.xs[pre * d..].chunks_exact(d) {
        for (s, x) in state.iter_mut().zip(row) {
            *s = *s * b + x;
        }
        out.extend_from_slice(&state);
    }
    out
}

fn finish(
    params: SequenceParams,
    kind: PathKind,
    values: Vec<f64>,
    draws: Draws,
    bound: f64,
    opts: &BuildOptions,
    seed: u64,
) -> PathSample {
    let pre = draws.depth as usize * params.dim;
    PathSample {
        params,
        kind,
        values,
        increments: draws.xs[pre..].to_vec(),
        truncation_depth: draws.depth,
        truncation_bound: bound,
        increment_quantile: draws.quantile,
        seed,
        truncation_flagged: opts.tolerance.is_some_and(|t| bound > t),
    }
}

/// Builds `W(n)` over the window.
pub fn build_w_path(params: SequenceParams, law: &IncrementLaw, opts: &BuildOptions, seed: u64) -> Result<PathSample> {
    params.check_w_window()?;
    let draws = draw_increments(&params, law, opts, seed)?;
    let d = params.dim;
    let a = params.a;
    // W(n_min) = a^{n_min} Y(n_min); afterwards W(n) = W(n-1) + a^n X_n.
    let pre = draws.depth as usize;
    let b = params.b();
    let mut y0 = vec![0.0; d];
    for row in draws.xs[..(pre + 1) * d].chunks_exact(d) {
        for (s, x) in y0.iter_mut().zip(row) {
            *s = *s * b + x;
        }
    }
    let scale0 = a.powf(params.n_min as f64);
    let mut state: Vec<f64> = y0.iter().map(|v| v * scale0).collect();
    let mut values = Vec::with_capacity(params.len() * d);
    values.extend_from_slice(&state);
    for (k, row) in draws.xs[(pre + 1) * d..].chunks_exact(d).enumerate() {
        let an = a.powf((params.n_min + 1 + k as i64) as f64);
        for (s, x) in state.iter_mut().zip(row) {
            *s += an * x;
        }
        values.extend_from_slice(&state);
    }
    let bound = draws.bound_y * scale0;
    Ok(finish(params, PathKind::ShiftSelfsimilar, values, draws, bound, opts, seed))
}

/// Builds `Y(n)` over the window. Uses the same increments as
/// [`build_w_path`] for the same seed.
pub fn build_y_path(params: SequenceParams, law: &IncrementLaw, opts: &BuildOptions, seed: u64) -> Result<PathSample> {
    let draws = draw_increments(&params, law, opts, seed)?;
    let values = y_values(&params, &draws);
    let bound = draws.bound_y;
    Ok(finish(params, PathKind::StationaryOu, values, draws, bound, opts, seed))
}

/// `W(n) <-> Y(n) = a^{-n} W(n)`.
pub fn lamperti(path: &PathSample) -> Result<PathSample> {
    let p = path.params;
    let (kind, sign) = match path.kind {
        PathKind::ShiftSelfsimilar => (PathKind::StationaryOu, -1.0),
        PathKind::StationaryOu => {
            p.check_w_window()?;
            (PathKind::ShiftSelfsimilar, 1.0)
        }
    };
    let mut out = path.clone();
    out.kind = kind;
    for (i, row) in out.values.chunks_exact_mut(p.dim).enumerate() {
        let f = p.a.powf(sign * (p.n_min + i as i64) as f64);
        row.iter_mut().for_each(|v| *v *= f);
    }
    out.truncation_bound = path.truncation_bound * p.a.powf(sign * p.n_min as f64);
    Ok(out)
}

/// Builds `count` paths on derived seeds, in index order.
pub fn build_ensemble(
    params: SequenceParams,
    law: &IncrementLaw,
    opts: &BuildOptions,
    kind: PathKind,
    seed: u64,
    count: usize,
) -> Result<Vec<PathSample>> {
    let mut opts = *opts;
    if opts.increment_quantile.is_none() {
        opts.increment_quantile = Some(pilot_quantile(law, &opts, seed));
    }
    let opts = &opts;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let s = seeds::derive(seed, &labels!["path", i]);
            match kind {
                PathKind::ShiftSelfsimilar => build_w_path(params, law, opts, s),
                PathKind::StationaryOu => build_y_path(params, law, opts, s),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTest {
    /// `"marginal"` or `"pair"`.
    pub label: String,
    pub n: i64,
    /// Coordinate index for marginal tests, direction index for pair tests.
    pub component: usize,
    pub ks: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lag: i64,
    pub scale: f64,
    pub tests: Vec<ScalingTest>,
    /// Bonferroni threshold `0.01 / tests.len()`.
    pub threshold: f64,
    pub min_p_value: f64,
    pub passed: bool,
}

pub const MIN_ENSEMBLE: usize = 500;
const PAIR_DIRECTIONS: usize = 8;

/// Compares `{W(n + lag)}` against `{a^lag W(n)}` (for `W` ensembles) or
/// `{Y(n + lag)}` against `{Y(n)}` (for `Y` ensembles).
pub fn test_shift_selfsimilarity(paths: &[PathSample], lag: i64) -> Result<ScalingReport> {
    let first = paths.first().ok_or_else(|| invalid("paths", "empty ensemble"))?;
    let scale = match first.kind {
        PathKind::ShiftSelfsimilar => first.params.a.powf(lag as f64),
        PathKind::StationaryOu => 1.0,
    };
    test_scaling_law(paths, lag, scale)
}

/// Two-sample comparison of `{V(n + lag)}` against `{scale * V(n)}`.
///
/// The ensemble is split in halves so the two samples are independent. Pairs
/// `(V(n), V(n+1))` are projected on fixed random directions of R^{2d}.
pub fn test_scaling_law(paths: &[PathSample], lag: i64, scale: f64) -> Result<ScalingReport> {
    if paths.len() < MIN_ENSEMBLE {
        return Err(invalid("paths", format!("need at least {MIN_ENSEMBLE} paths, got {}", paths.len())));
    }
    if lag < 1 {
        return Err(invalid("lag", "must be positive"));
    }
    let p = paths[0].params;
    if p.n_max - p.n_min < lag {
        return Err(Error::WindowTooShort(format!("window [{}, {}] cannot hold lag {lag}", p.n_min, p.n_max)));
    }
    let d = p.dim;
    let half = paths.len() / 2;
    let (left, right) = paths.split_at(half);
    let right = &right[..half];
    let tol = 4.0 * scale.abs().max(1.0) * paths.iter().map(|q| q.truncation_bound).fold(0.0, f64::max);

    let mut tests = Vec::new();
    for n in p.n_min..=p.n_max - lag {
        for c in 0..d {
            let xa: Vec<f64> = left.iter().map(|q| q.value(n + lag)[c]).collect();
            let xb: Vec<f64> = right.iter().map(|q| scale * q.value(n)[c]).collect();
            tests.push(ScalingTest { label: "marginal".into(), n, component: c, ks: ks_two_sample_tol(&xa, &xb, tol) });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(0, &labels!["pair-directions", d]));
    let dirs: Vec<Vec<f64>> = (0..PAIR_DIRECTIONS)
        .map(|_| {
            let v: Vec<f64> = (0..2 * d).map(|_| rng.sample(StandardNormal)).collect();
            let nv = norm(&v);
            v.into_iter().map(|x| x / nv).collect()
        })
        .collect();
    // W(n+1) is a times the size of W(n); rescale so both halves carry equal weight
    let w1 = match paths[0].kind {
        PathKind::ShiftSelfsimilar => 1.0 / p.a,
        PathKind::StationaryOu => 1.0,
    };
    let project = |q: &PathSample, n: i64, f: f64, u: &[f64]| -> f64 {
        let (x0, x1) = (q.value(n), q.value(n + 1));
        f * (x0.iter().zip(&u[..d]).map(|(a, b)| a * b).sum::<f64>() + w1 * x1.iter().zip(&u[d..]).map(|(a, b)| a * b).sum::<f64>())
    };
    for n in p.n_min..p.n_max - lag {
        for (k, u) in dirs.iter().enumerate() {
            let xa: Vec<f64> = left.iter().map(|q| project(q, n + lag, 1.0, u)).collect();
            let xb: Vec<f64> = right.iter().map(|q| project(q, n, scale, u)).collect();
            tests.push(ScalingTest { label: "pair".into(), n, component: k, ks: ks_two_sample_tol(&xa, &xb, 2.0 * tol) });
        }
    }
    let threshold = 0.01 / tests.len() as f64;
    let min_p_value = tests.iter().map(|t| t.ks.p_value).fold(1.0, f64::min);
    Ok(ScalingReport { lag, scale, threshold, min_p_value, passed: min_p_value > threshold, tests })
}

/// Fraction of window points with `|Y(n) - x| <= delta`.
pub fn ergodic_average(path: &PathSample, x: &[f64], delta: f64) -> Result<f64> {
    if path.kind != PathKind::StationaryOu {
        return Err(invalid("path", "ergodic averages need a stationary Y path"));
    }
    if x.len() != path.dim() {
        return Err(Error::DimensionMismatch { expected: path.dim(), got: x.len() });
    }
    let hits = path
        .values
        .chunks_exact(path.dim())
        .filter(|y| {
            let d2: f64 = y.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
            d2.sqrt() <= delta
        })
        .count();
    Ok(hits as f64 / path.len() as f64)
}

/// Effective sample size for averages of a sequence with geometric memory
/// `1/a`: `N (1 - 1/a) / (1 + 1/a)`.
pub fn effective_sample_size(n: usize, a: f64) -> f64 {
    let r = 1.0 / a;
    n as f64 * (1.0 - r) / (1.0 + r)
}

/// Least-squares slope of `log |W(n)|` against `n` over the upper half-window.
pub fn log_growth_slope(path: &PathSample) -> Result<f64> {
    if path.kind != PathKind::ShiftSelfsimilar {
        return Err(invalid("path", "log-growth needs a W path"));
    }
    let mid = path.params.n_min + (path.params.n_max - path.params.n_min) / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (mid..=path.params.n_max).map(|n| (n as f64, norm(path.value(n)).ln())).filter(|(_, y)| y.is_finite()).unzip();
    if xs.len() < 2 {
        return Err(Error::WindowTooShort("need two finite points in the upper half".into()));
    }
    Ok(crate::stats::linear_fit(&xs, &ys).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean_se, normal_cdf};

    fn point_mass() -> IncrementLaw {
        IncrementLaw::point_mass(vec![1.0]).unwrap()
    }

    #[test]
    fn geometric_series_with_fixed_depth() {
        let params = SequenceParams::new(2.0, 1, 0, 3).unwrap();
        let opts = BuildOptions { truncation_depth: Some(30), ..Default::default() };
        let w = build_w_path(params, &point_mass(), &opts, 1).unwrap();
        for n in 0..=3 {
            let exact = 2f64.powi(n as i32 + 1) - 2f64.powi(-30);
            assert_eq!(w.value(n)[0], exact, "n={n}");
        }
    }

    #[test]
    fn increment_identities_hold() {
        let law = IncrementLaw::standard_gaussian(2).unwrap();
        let params = SequenceParams::new(2.0, 2, 0, 5).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), 7).unwrap();
        let y = build_y_path(params, &law, &BuildOptions::default(), 7).unwrap();
        assert_eq!(w.increments, y.increments);
        for n in 1..=5 {
            for c in 0..2 {
                let dw = w.value(n)[c] - w.value(n - 1)[c];
                let want = 2f64.powi(n as i32) * w.increment(n)[c];
                assert!((dw - want).abs() <= 1e-12 * (1.0 + w.value(n)[c].abs()));
                let dy = y.value(n)[c] - y.value(n - 1)[c] / 2.0;
                assert!((dy - y.increment(n)[c]).abs() <= 1e-12 * (1.0 + y.value(n)[c].abs()));
            }
        }
    }

    #[test]
    fn default_depth_meets_target() {
        let law = point_mass();
        let params = SequenceParams::new(2.0, 1, 0, 3).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), 1).unwrap();
        assert!(w.truncation_bound < 1e-9);
        assert!((w.value(0)[0] - 2.0).abs() < 1e-9);
        // Y stays at a/(a-1) = 2
        let y = build_y_path(SequenceParams::new(2.0, 1, -5, 40).unwrap(), &law, &BuildOptions::default(), 1).unwrap();
        for n in y.indices() {
            assert!((y.value(n)[0] - 2.0).abs() <= y.truncation_bound);
        }
    }

    #[test]
    fn truncation_flag() {
        let params = SequenceParams::new(2.0, 1, 0, 3).unwrap();
        let opts = BuildOptions { truncation_depth: Some(2), tolerance: Some(1e-6), ..Default::default() };
        assert!(build_w_path(params, &point_mass(), &opts, 1).unwrap().truncation_flagged);
    }

    #[test]
    fn overflow_guard() {
        let params = SequenceParams::new(2.0, 1, 0, 1100).unwrap();
        assert!(matches!(build_w_path(params, &point_mass(), &BuildOptions::default(), 1), Err(Error::WindowOverflow { .. })));
        // the stationary sequence has no such limit
        assert!(build_y_path(params, &point_mass(), &BuildOptions::default(), 1).is_ok());
    }

    #[test]
    fn lamperti_links_w_and_y() {
        let law = IncrementLaw::exponential(vec![1.0]).unwrap();
        let params = SequenceParams::new(1.7, 1, -10, 30).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), 3).unwrap();
        let y = build_y_path(params, &law, &BuildOptions::default(), 3).unwrap();
        let ly = lamperti(&w).unwrap();
        for n in params.n_min..=params.n_max {
            let (a, b) = (ly.value(n)[0], y.value(n)[0]);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "n={n}: {a} vs {b}");
        }
        let back = lamperti(&ly).unwrap();
        for (a, b) in back.values.iter().zip(&w.values) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn lamperti_of_scaled_constant_is_constant() {
        let params = SequenceParams::new(3.0, 1, 0, 10).unwrap();
        let mut w = build_w_path(params, &point_mass(), &BuildOptions::default(), 0).unwrap();
        for (i, v) in w.values.iter_mut().enumerate() {
            *v = 3f64.powi(i as i32) * 0.25;
        }
        let y = lamperti(&w).unwrap();
        assert!(y.values.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn tail_vanishes_at_window_start() {
        let law = IncrementLaw::exponential(vec![2.0]).unwrap();
        let params = SequenceParams::new(2.0, 1, -20, 0).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), 11).unwrap();
        let max_x = w.increments.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = w.truncation_bound + 2f64.powi(-20) * 2.0 * max_x.max(w.increment_quantile) * 2.0;
        assert!(w.value(-20)[0].abs() <= bound);
    }

    #[test]
    fn bernoulli_mean_of_w0() {
        let law = IncrementLaw::bernoulli(0.5, vec![1.0]).unwrap();
        let params = SequenceParams::new(2.0, 1, 0, 0).unwrap();
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::ShiftSelfsimilar, 5, 10_000).unwrap();
        let v: Vec<f64> = paths.iter().map(|p| p.value(0)[0]).collect();
        let (m, se) = mean_se(&v);
        assert!((m - 1.0).abs() <= 3.0 * se, "{m} +- {se}");
    }

    #[test]
    fn gaussian_stationary_covariance() {
        let law = IncrementLaw::standard_gaussian(1).unwrap();
        let e = std::f64::consts::E;
        let params = SequenceParams::new(e, 1, 0, 0).unwrap();
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::StationaryOu, 8, 10_000).unwrap();
        let v: Vec<f64> = paths.iter().map(|p| p.value(0)[0].powi(2)).collect();
        let var = crate::stats::mean(&v);
        let exact = 1.0 / (1.0 - (-2.0f64).exp());
        assert!((var / exact - 1.0).abs() < 0.05, "{var} vs {exact}");
    }

    #[test]
    fn shift_selfsimilarity_accepts_and_rejects() {
        let law = IncrementLaw::exponential(vec![1.0]).unwrap();
        let params = SequenceParams::new(2.0, 1, 0, 4).unwrap();
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::ShiftSelfsimilar, 21, 1000).unwrap();
        let rep = test_shift_selfsimilarity(&paths, 1).unwrap();
        assert!(rep.passed, "min p {}", rep.min_p_value);
        let bad = test_scaling_law(&paths, 1, 2.5).unwrap();
        assert!(!bad.passed);
        // the same statistic on the Lamperti image tests stationarity
        let ys: Vec<PathSample> = paths.iter().map(|p| lamperti(p).unwrap()).collect();
        let rep_y = test_shift_selfsimilarity(&ys, 1).unwrap();
        assert_eq!(rep.passed, rep_y.passed);
        for (a, b) in rep.tests.iter().zip(&rep_y.tests) {
            assert!((a.ks.statistic - b.ks.statistic).abs() < 1e-9);
        }
    }

    #[test]
    fn point_mass_scaling_statistic_is_zero() {
        let params = SequenceParams::new(2.0, 1, 0, 3).unwrap();
        let paths = build_ensemble(params, &point_mass(), &BuildOptions::default(), PathKind::ShiftSelfsimilar, 2, 500).unwrap();
        let rep = test_shift_selfsimilarity(&paths, 1).unwrap();
        assert!(rep.tests.iter().all(|t| t.ks.statistic == 0.0));
        assert!(rep.passed);
    }

    #[test]
    fn scaling_test_preconditions() {
        let params = SequenceParams::new(2.0, 1, 0, 1).unwrap();
        let paths = build_ensemble(params, &point_mass(), &BuildOptions::default(), PathKind::ShiftSelfsimilar, 2, 500).unwrap();
        assert!(matches!(test_shift_selfsimilarity(&paths, 2), Err(Error::WindowTooShort(_))));
        assert!(test_shift_selfsimilarity(&paths[..100], 1).is_err());
    }

    #[test]
    fn ergodic_average_trivial_cases() {
        let params = SequenceParams::new(2.0, 1, 1, 200).unwrap();
        let y = build_y_path(params, &point_mass(), &BuildOptions::default(), 4).unwrap();
        assert_eq!(ergodic_average(&y, &[2.0], 1e-6).unwrap(), 1.0);
        assert_eq!(ergodic_average(&y, &[50.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ergodic_average_gaussian() {
        let law = IncrementLaw::standard_gaussian(1).unwrap();
        let params = SequenceParams::new(std::f64::consts::E, 1, 1, 100_000).unwrap();
        let y = build_y_path(params, &law, &BuildOptions::default(), 12).unwrap();
        let sd = (1.0 / (1.0 - (-2.0f64).exp())).sqrt();
        let exact = 2.0 * normal_cdf(1.0 / sd) - 1.0;
        let avg = ergodic_average(&y, &[0.0], 1.0).unwrap();
        assert!((avg - exact).abs() <= 0.02, "{avg} vs {exact}");
    }

    #[test]
    fn csv_layout() {
        let params = SequenceParams::new(2.0, 2, 0, 1).unwrap();
        let law = IncrementLaw::standard_gaussian(2).unwrap();
        let y = build_y_path(params, &law, &BuildOptions::default(), 1).unwrap();
        let mut buf = Vec::new();
        y.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,Y_1,Y_2\n0,"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn growth_rate_is_log_a() {
        let law = IncrementLaw::exponential(vec![1.0]).unwrap();
        let params = SequenceParams::new(4.0, 1, 0, 59).unwrap();
        for s in 0..10 {
            let w = build_w_path(params, &law, &BuildOptions::default(), 100 + s).unwrap();
            let slope = log_growth_slope(&w).unwrap();
            assert!((slope / 4f64.ln() - 1.0).abs() < 0.05, "seed {s}: {slope}");
        }
    }
}
