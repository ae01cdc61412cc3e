//! Continuous-time experiments. Positive stable subordinators supply the
//! small-ball and hitting-bound checks; independent Brownian motions supply
//! hitting times, last exits and their iterated-logarithm statistics.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::distributions::positive_stable_draw;
use crate::error::{invalid, Error, Result};
use crate::escape::{sum_classifier, ClassifierReport, Gauge, GaugeForm, SmallBallCdf, Verdict};
use crate::labels;
use crate::quadrature::integrate;
use crate::seeds;
use crate::stats::{linear_fit, median, normal_sf};

const CHUNK: usize = 1 << 16;

/// `count` draws of `S(1)` for the positive `alpha`-stable law, chunked on
/// derived seeds so the result does not depend on the thread count.
pub fn stable_samples(alpha: f64, count: usize, seed: u64) -> Vec<f64> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = seeds::stream(seed, &labels!["stable", c]);
            let n = CHUNK.min(count - c * CHUNK);
            (0..n).map(move |_| positive_stable_draw(alpha, &mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `P(S(1) <= r)` for `alpha = 1/2` with `E exp(-u S) = exp(-sqrt(u))`.
pub fn stable_half_cdf(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        erfc(1.0 / (2.0 * r.sqrt()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableSmallBall {
    pub alpha: f64,
    pub count: usize,
    pub radii: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Radii excluded for lack of hits.
    pub excluded: Vec<f64>,
    /// Fitted exponent of `-log P(S(1) <= r)` in `r`.
    pub slope: f64,
    /// `alpha / (alpha - 1)`.
    pub theory: f64,
}

/// Estimates `P(S(1) <= r)` on a grid and fits the small-ball exponent.
///
/// `-log P = c r^{alpha/(alpha-1)} - (alpha / (2(1-alpha))) log r + O(1)`; the
/// log term is added back before the log-log fit.
pub fn stable_small_ball(alpha: f64, radii: &[f64], count: usize, seed: u64) -> Result<StableSmallBall> {
    if !(alpha > 0.2 && alpha < 0.8) {
        return Err(invalid("alpha", "sampler accuracy range is (0.2, 0.8)"));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid("radii", "must be positive"));
    }
    let mut s = stable_samples(alpha, count, seed);
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = count as f64;
    let mut out = StableSmallBall {
        alpha,
        count,
        radii: Vec::new(),
        probabilities: Vec::new(),
        std_errors: Vec::new(),
        excluded: Vec::new(),
        slope: f64::NAN,
        theory: alpha / (alpha - 1.0),
    };
    let corr = alpha / (2.0 * (1.0 - alpha));
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &r in radii {
        let hits = s.partition_point(|x| *x <= r);
        if hits == 0 {
            out.excluded.push(r);
            continue;
        }
        let p = hits as f64 / n;
        out.radii.push(r);
        out.probabilities.push(p);
        out.std_errors.push((p * (1.0 - p) / n).sqrt());
        let y = -p.ln() + corr * r.ln();
        if y > 0.0 {
            xs.push(r.ln());
            ys.push(y.ln());
        }
    }
    if xs.len() >= 2 {
        out.slope = linear_fit(&xs, &ys).1;
    }
    Ok(out)
}

/// `P(sup_{s <= t} |B(s)| >= 1)` for a one-dimensional Brownian motion.
pub fn exit_time_cdf_1d(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t < 1.0 {
        // method of images
        let mut s = 0.0;
        for k in 0..50 {
            let term = normal_sf((2 * k + 1) as f64 / t.sqrt());
            s += if k % 2 == 0 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        4.0 * s
    } else {
        let pi = std::f64::consts::PI;
        let mut s = 0.0;
        for k in 0..200 {
            let m = (2 * k + 1) as f64;
            let term = (-(m * m) * pi * pi * t / 8.0).exp() / m;
            s += if k % 2 == 0 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        1.0 - 4.0 / pi * s
    }
}

/// `2(1 - Phi(r / sqrt(t)))`, the first-passage law of a single level.
pub fn one_sided_passage_cdf(r: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        2.0 * normal_sf(r / t.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepPolicy {
    /// Step `dt * r^2`, with `r` the next radius to be reached.
    Scaled,
    /// Step `max(dt * r_min^2, kappa * dist^2)` with `dist` the distance to the nearest active sphere.
    Adaptive { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianConfig {
    pub d: usize,
    pub motions: usize,
    pub dt: f64,
    /// Apply the Brownian-bridge crossing correction with sub-step refinement.
    #[serde(default = "yes")]
    pub bridge: bool,
    #[serde(default = "default_policy")]
    pub policy: StepPolicy,
    /// Time cap as a multiple of `r_max^2`.
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Escape probability below which a last exit counts as certified.
    #[serde(default = "default_certify")]
    pub certify: f64,
}

fn yes() -> bool {
    true
}

fn default_policy() -> StepPolicy {
    StepPolicy::Scaled
}

fn default_horizon() -> f64 {
    1e9
}

fn default_certify() -> f64 {
    1e-4
}

impl BrownianConfig {
    pub fn new(d: usize, motions: usize, dt: f64) -> Result<Self> {
        let c = Self { d, motions, dt, bridge: true, policy: StepPolicy::Scaled, horizon: default_horizon(), certify: default_certify() };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "must be positive"));
        }
        if self.motions == 0 {
            return Err(invalid("motions", "must be positive"));
        }
        if !(self.dt > 0.0 && self.dt < 1.0) {
            return Err(invalid("dt", "must lie in (0, 1)"));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        if !(self.certify > 0.0 && self.certify < 1.0) {
            return Err(invalid("certify", "must lie in (0, 1)"));
        }
        if let StepPolicy::Adaptive { kappa } = self.policy {
            if !(kappa > 0.0 && kappa <= 1.0) {
                return Err(invalid("kappa", "must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// First-hitting (and optionally last-exit) times of one motion per row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingSample {
    pub radii: Vec<f64>,
    /// `hitting[j][k] = T_j(r_k)`.
    pub hitting: Vec<Vec<f64>>,
    pub last_exit: Option<Vec<Vec<f64>>>,
    /// Motions stopped by the time cap before finishing.
    pub flagged: Vec<bool>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct Walker<'a> {
    rng: &'a mut ChaCha8Rng,
    d: usize,
    h_min: f64,
}

impl Walker<'_> {
    fn gauss_step(&mut self, x: &[f64], h: f64) -> Vec<f64> {
        let s = h.sqrt();
        x.iter().map(|v| v + s * self.rng.sample::<f64, _>(StandardNormal)).collect()
    }

    fn bridge_mid(&mut self, x0: &[f64], x1: &[f64], h: f64) -> Vec<f64> {
        let s = (h / 4.0).sqrt();
        x0.iter().zip(x1).map(|(a, b)| 0.5 * (a + b) + s * self.rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// Probability that the bridge leaves the ball of radius `r` (both ends inside).
    fn exit_prob(&self, x0: &[f64], x1: &[f64], h: f64, r: f64) -> f64 {
        if self.d == 1 {
            let (a, b) = (x0[0], x1[0]);
            let up = (-2.0 * (r - a) * (r - b) / h).exp();
            let down = (-2.0 * (r + a) * (r + b) / h).exp();
            (up + down).min(1.0)
        } else {
            (-2.0 * (r - norm(x0)) * (r - norm(x1)) / h).exp()
        }
    }

    /// First time in `(t, t + h]` the bridge from `x0` to `x1` reaches radius `r`.
    fn first_hit(&mut self, t: f64, h: f64, x0: &[f64], x1: &[f64], r: f64) -> Option<(f64, Vec<f64>)> {
        let outside = norm(x1) >= r;
        let p = if outside { 1.0 } else { self.exit_prob(x0, x1, h, r) };
        if p < 1e-12 {
            return None;
        }
        if h <= self.h_min {
            if outside || self.rng.random::<f64>() < p {
                let m: Vec<f64> = if outside { x1.to_vec() } else { x0.iter().zip(x1).map(|(a, b)| 0.5 * (a + b)).collect() };
                return Some((t + 0.5 * h, project(&m, r)));
            }
            return None;
        }
        let xm = self.bridge_mid(x0, x1, h);
        if norm(&xm) >= r {
            return self.first_hit(t, 0.5 * h, x0, &xm, r);
        }
        self.first_hit(t, 0.5 * h, x0, &xm, r).or_else(|| self.first_hit(t + 0.5 * h, 0.5 * h, &xm, x1, r))
    }

    /// Last time in `[t, t + h]` the bridge is within radius `r`; `x1` lies outside.
    fn last_inside(&mut self, t: f64, h: f64, x0: &[f64], x1: &[f64], r: f64) -> Option<f64> {
        let inside0 = norm(x0) <= r;
        let p = if inside0 { 1.0 } else { (-2.0 * (norm(x0) - r) * (norm(x1) - r) / h).exp() };
        if p < 1e-12 {
            return None;
        }
        if h <= self.h_min {
            return (inside0 || self.rng.random::<f64>() < p).then_some(t + 0.5 * h);
        }
        let xm = self.bridge_mid(x0, x1, h);
        if let Some(s) = self.last_inside(t + 0.5 * h, 0.5 * h, &xm, x1, r) {
            return Some(s);
        }
        if norm(&xm) <= r {
            return Some(t + 0.5 * h);
        }
        self.last_inside(t, 0.5 * h, x0, &xm, r)
    }
}

fn project(x: &[f64], r: f64) -> Vec<f64> {
    let n = norm(x);
    if n == 0.0 {
        let mut e = vec![0.0; x.len()];
        e[0] = r;
        return e;
    }
    x.iter().map(|v| v * r / n).collect()
}

struct MotionResult {
    hitting: Vec<f64>,
    last_exit: Option<Vec<f64>>,
    flagged: bool,
}

fn simulate_motion(cfg: &BrownianConfig, radii: &[f64], want_last: bool, rng: &mut ChaCha8Rng) -> MotionResult {
    let d = cfg.d;
    let k_max = radii.len();
    let r_min = radii[0];
    let r_max = radii[k_max - 1];
    let cap = cfg.horizon * r_max * r_max;
    let mut hitting = vec![f64::NAN; k_max];
    let mut last = vec![0.0; k_max];
    let mut certified = vec![!want_last; k_max];
    let mut next = 0;
    let mut x = vec![0.0; d];
    let mut t = 0.0;
    let mut flagged = false;
    let escape_radius: Vec<f64> =
        if want_last { radii.iter().map(|r| r * cfg.certify.powf(-1.0 / (d as f64 - 2.0))).collect() } else { Vec::new() };
    loop {
        if next == k_max && certified.iter().all(|c| *c) {
            break;
        }
        let base = if next < k_max { radii[next] } else { r_min };
        let h = match cfg.policy {
            StepPolicy::Scaled => cfg.dt * base * base,
            StepPolicy::Adaptive { kappa } => {
                let nx = norm(&x);
                let dist = radii
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k >= next || !certified[*k])
                    .map(|(_, r)| (nx - r).abs())
                    .fold(f64::INFINITY, f64::min);
                let floor = cfg.dt * if next < k_max { base * base } else { r_min * r_min };
                (kappa * dist * dist).max(floor)
            }
        };
        if t + h > cap {
            flagged = true;
            break;
        }
        let h_min = if cfg.bridge { h / 64.0 } else { h };
        let x1 = {
            let mut w = Walker { rng: &mut *rng, d, h_min };
            w.gauss_step(&x, h)
        };
        if next < k_max {
            let hit = if cfg.bridge {
                let mut w = Walker { rng: &mut *rng, d, h_min };
                w.first_hit(t, h, &x, &x1, radii[next])
            } else if norm(&x1) >= radii[next] {
                Some((t + h, x1.clone()))
            } else {
                None
            };
            if let Some((th, xh)) = hit {
                hitting[next] = th;
                if want_last {
                    update_last(cfg, rng, &mut last, radii, t, th - t, &x, &xh);
                }
                next += 1;
                // restart from the hitting point; crossings of further radii are resolved by new steps
                let r_hit = radii[next - 1];
                x = if norm(&xh) >= r_hit { xh } else { project(&xh, r_hit) };
                t = th;
                continue;
            }
        }
        if want_last {
            update_last(cfg, rng, &mut last, radii, t, h, &x, &x1);
        }
        x = x1;
        t += h;
        if want_last {
            let nx = norm(&x);
            for k in 0..next {
                if !certified[k] && nx >= escape_radius[k] {
                    certified[k] = true;
                }
            }
        }
    }
    MotionResult { hitting, last_exit: want_last.then_some(last), flagged }
}

#[allow(clippy::too_many_arguments)]
fn update_last(cfg: &BrownianConfig, rng: &mut ChaCha8Rng, last: &mut [f64], radii: &[f64], t: f64, h: f64, x0: &[f64], x1: &[f64]) {
    if h <= 0.0 {
        return;
    }
    let n1 = norm(x1);
    for (k, &r) in radii.iter().enumerate() {
        if n1 <= r {
            last[k] = t + h;
        } else if cfg.bridge {
            let mut w = Walker { rng: &mut *rng, d: cfg.d, h_min: h / 64.0 };
            if let Some(s) = w.last_inside(t, h, x0, x1, r) {
                last[k] = last[k].max(s);
            }
        } else if norm(x0) <= r {
            last[k] = t;
        }
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("radii", "must be positive and strictly increasing"));
    }
    Ok(())
}

fn run_motions(cfg: &BrownianConfig, radii: &[f64], want_last: bool, seed: u64) -> Result<HittingSample> {
    cfg.validate()?;
    check_radii(radii)?;
    let rows: Vec<MotionResult> = (0..cfg.motions)
        .into_par_iter()
        .map(|j| {
            let mut rng = seeds::stream(seed, &labels!["motion", j]);
            simulate_motion(cfg, radii, want_last, &mut rng)
        })
        .collect();
    let sample = HittingSample {
        radii: radii.to_vec(),
        flagged: rows.iter().map(|r| r.flagged).collect(),
        last_exit: want_last.then(|| rows.iter().map(|r| r.last_exit.clone().unwrap()).collect()),
        hitting: rows.into_iter().map(|r| r.hitting).collect(),
    };
    sample.check()?;
    Ok(sample)
}

impl HittingSample {
    /// Hitting times strictly increase in `r`; last exits dominate hitting times.
    pub fn check(&self) -> Result<()> {
        for (j, row) in self.hitting.iter().enumerate() {
            if self.flagged[j] {
                continue;
            }
            if row.iter().any(|t| !t.is_finite() || *t <= 0.0) || row.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Invariant(format!("hitting times of motion {j} are not strictly increasing")));
            }
            if let Some(l) = &self.last_exit {
                if l[j].iter().zip(row).any(|(l, t)| l < t) {
                    return Err(Error::Invariant(format!("motion {j} exits before it hits")));
                }
            }
        }
        Ok(())
    }

    /// `T(r_k)` across unflagged motions.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.hitting.iter().zip(&self.flagged).filter(|(_, f)| !**f).map(|(r, _)| r[k]).collect()
    }

    pub fn last_exit_column(&self, k: usize) -> Option<Vec<f64>> {
        self.last_exit.as_ref().map(|l| l.iter().zip(&self.flagged).filter(|(_, f)| !**f).map(|(r, _)| r[k]).collect())
    }
}

/// First-hitting times of the spheres `|x| = r_k` by `cfg.motions` independent motions.
pub fn brownian_hitting(cfg: &BrownianConfig, radii: &[f64], seed: u64) -> Result<HittingSample> {
    run_motions(cfg, radii, false, seed)
}

/// Hitting and last-exit times; a last exit is final once the escape
/// probability `(r/|B|)^{d-2}` drops below `cfg.certify`.
pub fn brownian_last_exit(cfg: &BrownianConfig, radii: &[f64], seed: u64) -> Result<HittingSample> {
    if cfg.d < 3 {
        return Err(invalid("d", "last exits need a transient motion, d >= 3"));
    }
    run_motions(cfg, radii, true, seed)
}

/// `P(L(1) <= s) = E (1 - |B(s)|^{2-d})^+`, averaged over `count` Gaussian draws.
pub fn last_exit_small_ball(d: usize, s: f64, count: usize, seed: u64) -> Result<(f64, f64)> {
    if d < 3 {
        return Err(invalid("d", "last exits need d >= 3"));
    }
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeds::stream(seed, &labels!["last-exit-ball", c]);
            let n = CHUNK.min(count - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let r2: f64 = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum::<f64>() * s;
                let v = (1.0 - r2.powf(1.0 - d as f64 / 2.0)).max(0.0);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = count as f64;
    let m = s1 / n;
    Ok((m, ((s2 / n - m * m).max(0.0) / n).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilCurves {
    pub index: Vec<usize>,
    /// Per replicate, the statistic at each index.
    pub raw: Vec<Vec<f64>>,
    /// Per replicate, the tail extremum over `k` in `[K/2, K]`.
    pub estimates: Vec<f64>,
    pub median: f64,
    pub constant: f64,
    pub band: (f64, f64),
    pub in_band_fraction: f64,
    pub flagged: usize,
}

/// `r_k = e^{k/2}`, `k = 0..=K`.
pub fn lil_radii(k: usize) -> Vec<f64> {
    (0..=k).map(|i| (i as f64 / 2.0).exp()).collect()
}

/// Hitting-time statistic `sup_j T_j(r_k) log log r_k / r_k^2` per replicate
/// with the running minimum over the upper half of radii.
pub fn lil_hitting_experiment(
    cfg: &BrownianConfig,
    k: usize,
    replicates: usize,
    band: (f64, f64),
    seed: u64,
) -> Result<(LilCurves, Vec<HittingSample>)> {
    if k < 8 {
        return Err(invalid("K", "need at least 8 radii"));
    }
    let radii = lil_radii(k);
    let samples: Vec<HittingSample> = (0..replicates)
        .into_par_iter()
        .map(|i| brownian_hitting(cfg, &radii, seeds::derive(seed, &labels!["replicate", i])))
        .collect::<Result<_>>()?;
    let index: Vec<usize> = (3..=k).collect();
    let mut raw = Vec::new();
    let mut estimates = Vec::new();
    let mut flagged = 0;
    for s in &samples {
        if s.flagged.iter().any(|f| *f) {
            flagged += 1;
            continue;
        }
        let row: Vec<f64> = index
            .iter()
            .map(|&i| {
                let r = radii[i];
                let sup = s.hitting.iter().map(|h| h[i]).fold(f64::NEG_INFINITY, f64::max);
                sup / (r * r / r.ln().ln())
            })
            .collect();
        let tail = row[index.iter().position(|&i| i >= k / 2).unwrap()..].iter().copied().fold(f64::INFINITY, f64::min);
        raw.push(row);
        estimates.push(tail);
    }
    let constant = cfg.motions as f64 / 2.0;
    Ok((summarize(index, raw, estimates, constant, band, flagged), samples))
}

fn summarize(index: Vec<usize>, raw: Vec<Vec<f64>>, estimates: Vec<f64>, constant: f64, band: (f64, f64), flagged: usize) -> LilCurves {
    let inside = estimates.iter().filter(|e| **e >= band.0 && **e <= band.1).count();
    LilCurves {
        index,
        median: if estimates.is_empty() { f64::NAN } else { median(&estimates) },
        in_band_fraction: inside as f64 / estimates.len().max(1) as f64,
        raw,
        estimates,
        constant,
        band,
        flagged,
    }
}

/// Running maximum of `|B|` per motion at `t_k = e^k`, `k = 1..=K`.
fn sup_path(d: usize, k: usize, steps: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; d];
    let mut t = 0.0;
    let mut m: f64 = 0.0;
    let mut out = Vec::with_capacity(k);
    for i in 1..=k {
        let tk = (i as f64).exp();
        let h = (tk - t) / steps as f64;
        let s = h.sqrt();
        for _ in 0..steps {
            let x1: Vec<f64> = x.iter().map(|v| v + s * rng.sample::<f64, _>(StandardNormal)).collect();
            let peak = if d == 1 {
                // maxima of the bridge above and below, on the side it sits
                let (a, b) = (x[0], x1[0]);
                let u: f64 = rng.random::<f64>();
                let e = ((b - a).powi(2) - 2.0 * h * (1.0 - u).ln()).sqrt();
                let hi = 0.5 * (a + b + e);
                let lo = 0.5 * (a + b - e);
                if a + b >= 0.0 {
                    hi.abs()
                } else {
                    lo.abs()
                }
            } else {
                norm(&x1)
            };
            m = m.max(peak).max(norm(&x1));
            x = x1;
        }
        t = tk;
        out.push(m);
    }
    out
}

/// Statistic `inf_j sup_{s <= t_k} |B_j(s)| / sqrt(t_k log log t_k)` with the
/// running maximum over the upper half of times.
pub fn lil_sup_experiment(
    d: usize,
    motions: usize,
    k: usize,
    steps: usize,
    replicates: usize,
    band: (f64, f64),
    seed: u64,
) -> Result<LilCurves> {
    if k < 8 {
        return Err(invalid("K", "need at least 8 times"));
    }
    if d == 0 || motions == 0 || steps == 0 {
        return Err(invalid("config", "d, motions and steps must be positive"));
    }
    let index: Vec<usize> = (2..=k).collect();
    let rows: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let per: Vec<Vec<f64>> = (0..motions)
                .map(|j| {
                    let mut rng = seeds::stream(seed, &labels!["sup", i, j]);
                    sup_path(d, k, steps, &mut rng)
                })
                .collect();
            index
                .iter()
                .map(|&kk| {
                    let tk = (kk as f64).exp();
                    let inf = per.iter().map(|p| p[kk - 1]).fold(f64::INFINITY, f64::min);
                    inf / (tk * tk.ln().ln()).sqrt()
                })
                .collect()
        })
        .collect();
    let start = index.iter().position(|&i| i >= k / 2).unwrap();
    let estimates = rows.iter().map(|r| r[start..].iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    Ok(summarize(index, rows, estimates, (2.0 / motions as f64).sqrt(), band, 0))
}

/// `sup_{s <= t} |B_j(s)|` read off the radius grid: the largest `r_k` with `T_j(r_k) <= t`.
pub fn grid_sup(sample: &HittingSample, j: usize, t: f64) -> f64 {
    sample.hitting[j].iter().zip(&sample.radii).filter(|(h, _)| **h <= t).map(|(_, r)| *r).fold(0.0, f64::max)
}

/// Both sides of the hitting/sup duality at `t_n = sup_j T_j(r_n)`: the sup
/// statistic evaluated from the grid, and `r_n / sqrt(t_n log log t_n)`.
pub fn duality_pairs(sample: &HittingSample) -> Vec<(f64, f64)> {
    (0..sample.radii.len())
        .filter_map(|n| {
            let tn = sample.hitting.iter().map(|h| h[n]).fold(f64::NEG_INFINITY, f64::max);
            let ll = tn.ln().ln();
            if !(ll > 0.0) {
                return None;
            }
            let inf = (0..sample.hitting.len()).map(|j| grid_sup(sample, j, tn)).fold(f64::INFINITY, f64::min);
            let denom = (tn * ll).sqrt();
            Some((inf / denom, sample.radii[n] / denom))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LevyKind {
    /// One-dimensional standard Brownian motion.
    Brownian,
    /// Positive stable subordinator with `E exp(-u S(t)) = exp(-t u^alpha)`.
    StableSubordinator { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub margin: f64,
    pub passed: bool,
}

/// `P(|Z(t)| <= gamma for some b <= t <= c)` against
/// `int_b^{2c-b} P(|Z(t)| <= (1+eps) gamma) dt / int_0^{c-b} P(|Z(t)| <= eps gamma) dt`.
pub fn hitting_probability_bound_check(
    kind: LevyKind,
    b: f64,
    c: f64,
    gamma: f64,
    eps: f64,
    count: usize,
    seed: u64,
) -> Result<BoundCheck> {
    if !(b > 0.0 && c > b) {
        return Err(invalid("b, c", "need 0 < b < c"));
    }
    if !(gamma > 0.0 && eps > 0.0) {
        return Err(invalid("gamma, eps", "must be positive"));
    }
    if count < 2 {
        return Err(invalid("count", "need at least two samples"));
    }
    type BallProb = Box<dyn Fn(f64, f64) -> f64 + Sync>;
    let (lhs, lhs_se, ball): (f64, f64, BallProb) = match kind {
        LevyKind::Brownian => {
            let span = c - b;
            let vals: Vec<f64> = (0..count.div_ceil(CHUNK))
                .into_par_iter()
                .flat_map_iter(|ch| {
                    let mut rng = seeds::stream(seed, &labels!["bound", ch]);
                    let n = CHUNK.min(count - ch * CHUNK);
                    (0..n)
                        .map(move |_| {
                            let x: f64 = b.sqrt() * rng.sample::<f64, _>(StandardNormal);
                            let gap = x.abs() - gamma;
                            if gap <= 0.0 {
                                1.0
                            } else {
                                one_sided_passage_cdf(gap, span)
                            }
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            let (m, se) = crate::stats::mean_se(&vals);
            let ball = |t: f64, a: f64| if t <= 0.0 { 1.0 } else { erf(a / (2.0 * t).sqrt()) };
            (m, se, Box::new(ball))
        }
        LevyKind::StableSubordinator { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(invalid("alpha", "must lie in (0, 1)"));
            }
            let mut s = stable_samples(alpha, count, seed);
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = count as f64;
            // the subordinator is increasing, so the event is S(b) <= gamma
            let p = s.partition_point(|x| *x <= gamma * b.powf(-1.0 / alpha)) as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            let ball: Box<dyn Fn(f64, f64) -> f64 + Sync> = if (alpha - 0.5).abs() < 1e-15 {
                Box::new(|t: f64, a: f64| if t <= 0.0 { 1.0 } else { erfc(t / (2.0 * a.sqrt())) })
            } else {
                Box::new(
                    move |t: f64, a: f64| {
                        if t <= 0.0 {
                            1.0
                        } else {
                            s.partition_point(|x| *x <= a * t.powf(-1.0 / alpha)) as f64 / n
                        }
                    },
                )
            };
            (p, se, ball)
        }
    };
    let num = integrate(|t| ball(t, (1.0 + eps) * gamma), b, 2.0 * c - b, 1e-9, 1e-12);
    let den = integrate(|t| ball(t, eps * gamma), 0.0, c - b, 1e-9, 1e-12);
    if !(den.value > 0.0) {
        return Err(Error::Invariant("degenerate denominator in the hitting bound".into()));
    }
    let rhs = num.value / den.value;
    Ok(BoundCheck { lhs, lhs_se, rhs, numerator: num.value, denominator: den.value, margin: rhs - lhs, passed: lhs <= rhs + 3.0 * lhs_se })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiminfVerdict {
    Zero,
    Infinite,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeIRow {
    pub gauge: Gauge,
    pub series: Verdict,
    pub liminf: LiminfVerdict,
    /// True when decided symbolically rather than numerically.
    pub symbolic: bool,
}

/// For a type-I process on `R^d` (Brownian or rotation-invariant stable with
/// `d > alpha`), `liminf |X(t)| / g` is 0 or infinite as `sum g(n)^d` diverges or converges.
pub fn type_i_integral_test(alpha: f64, d: usize, gauges: &[Gauge]) -> Result<Vec<TypeIRow>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid("alpha", "must lie in (0, 2]"));
    }
    if !(d as f64 > alpha) {
        return Err(invalid("d", "need d > alpha"));
    }
    let dd = d as f64;
    gauges
        .iter()
        .map(|g| {
            let (series, symbolic) = match g.form {
                GaugeForm::PowerLog { p, q } => {
                    let (pd, qd) = (p * dd, q * dd);
                    let conv = pd > 1.0 + 1e-12 || ((pd - 1.0).abs() <= 1e-12 && qd > 1.0 + 1e-12);
                    (if conv { Verdict::Converges } else { Verdict::Diverges }, true)
                }
                _ => {
                    let f = SmallBallCdf::power(dd);
                    let rep = sum_classifier(&f, g, &[1.0], crate::escape::MIN_HORIZON)?;
                    (rep.per_delta[0].verdict, false)
                }
            };
            let liminf = match series {
                Verdict::Diverges => LiminfVerdict::Zero,
                Verdict::Converges => LiminfVerdict::Infinite,
                Verdict::Undecided => LiminfVerdict::Undecided,
            };
            Ok(TypeIRow { gauge: g.clone(), series, liminf, symbolic })
        })
        .collect()
}

/// Brackets the escape constant of `W(n) = S(e^n)` on the gauge `(log n)^{(alpha-1)/alpha}`.
pub fn stable_escape_bracket(alpha: f64, deltas: &[f64], horizon: u64, count: usize, seed: u64) -> Result<ClassifierReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", "must lie in (0, 1)"));
    }
    let f = if (alpha - 0.5).abs() < 1e-15 {
        SmallBallCdf::analytic("erfc(1/(2 sqrt r))", stable_half_cdf)
    } else {
        SmallBallCdf::empirical(stable_samples(alpha, count, seed))?
    };
    let g = Gauge::log_power((alpha - 1.0) / alpha)?;
    sum_classifier(&f, &g, deltas, horizon)
}
