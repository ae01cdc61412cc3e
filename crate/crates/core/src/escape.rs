//! Escape-rate machinery: gauges, small-ball distribution functions, the
//! series classifier for the escape constant, dominated variation, type-A
//! gauge construction, `K_W` and empirical liminf curves.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::distributions::{norm, IncrementLaw};
use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate;
use crate::sequences::{PathKind, PathSample};
use crate::stats::{linear_fit, median};

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GaugeForm {
    /// `n^{-p} (log n)^{-q}`.
    PowerLog { p: f64, q: f64 },
    /// `(log n)^s`.
    LogPower { s: f64 },
    /// `values[n - n0]`, held at the last value beyond the table.
    Tabulated { values: Vec<f64> },
    /// `levels[k]` on `[starts[k], starts[k + 1])`, the last level held forever.
    Staircase { levels: Vec<f64>, starts: Vec<f64> },
}

/// A positive nonincreasing sequence on `n >= n0`, times a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gauge {
    pub form: GaugeForm,
    #[serde(default = "default_n0")]
    pub n0: u64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn default_n0() -> u64 {
    2
}

fn one() -> f64 {
    1.0
}

impl Gauge {
    pub fn new(form: GaugeForm, n0: u64) -> Result<Self> {
        let g = Self { form, n0, scale: 1.0 };
        g.validate()?;
        Ok(g)
    }

    pub fn power_log(p: f64, q: f64) -> Result<Self> {
        Self::new(GaugeForm::PowerLog { p, q }, 2)
    }

    pub fn log_power(s: f64) -> Result<Self> {
        Self::new(GaugeForm::LogPower { s }, 2)
    }

    pub fn tabulated(values: Vec<f64>, n0: u64) -> Result<Self> {
        Self::new(GaugeForm::Tabulated { values }, n0)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Ok(Self::log_power(0.0)?.scaled(c))
    }

    /// `c * g`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut g = self.clone();
        g.scale *= c;
        g
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(invalid("gauge.scale", "must be positive and finite"));
        }
        match &self.form {
            GaugeForm::PowerLog { p, q } => {
                if !p.is_finite() || !q.is_finite() {
                    return Err(invalid("gauge", "exponents must be finite"));
                }
                if self.n0 < 2 {
                    return Err(invalid("gauge.n0", "log-type gauges start at n >= 2"));
                }
                // d/dn log g = -(p + q / log n) / n
                let worst = p + q / (self.n0 as f64).ln();
                if *p < 0.0 || worst < 0.0 {
                    return Err(invalid("gauge", "power-log gauge is not nonincreasing on its domain"));
                }
            }
            GaugeForm::LogPower { s } => {
                if self.n0 < 2 {
                    return Err(invalid("gauge.n0", "log-type gauges start at n >= 2"));
                }
                if !(*s <= 0.0) {
                    return Err(invalid("gauge.s", "must be <= 0 for a nonincreasing gauge"));
                }
            }
            GaugeForm::Tabulated { values } => check_table(values)?,
            GaugeForm::Staircase { levels, starts } => {
                check_table(levels)?;
                if starts.len() != levels.len() {
                    return Err(invalid("gauge.starts", "needs one start per level"));
                }
                if starts.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("gauge.starts", "must be strictly increasing"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, n: f64) -> f64 {
        let n = n.max(self.n0 as f64);
        let v = match &self.form {
            GaugeForm::PowerLog { p, q } => n.powf(-p) * n.ln().powf(-q),
            GaugeForm::LogPower { s } => n.ln().powf(*s),
            GaugeForm::Tabulated { values } => {
                let i = ((n - self.n0 as f64) as usize).min(values.len() - 1);
                values[i]
            }
            GaugeForm::Staircase { levels, starts } => {
                let k = starts.partition_point(|s| *s <= n).saturating_sub(1);
                levels[k]
            }
        };
        self.scale * v
    }

    pub fn is_staircase(&self) -> bool {
        matches!(self.form, GaugeForm::Staircase { .. })
    }
}

fn check_table(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid("gauge", "empty table"));
    }
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("gauge", "values must be positive and finite"));
    }
    if values.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("gauge", "values must be nonincreasing"));
    }
    Ok(())
}

pub type LnCdf = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `F(r) = P(|W(0)| <= r)`, either analytic (held as `log F`) or empirical.
#[derive(Clone)]
pub enum SmallBallCdf {
    Analytic { label: String, ln_f: LnCdf },
    Empirical { sorted: Arc<Vec<f64>> },
}

impl std::fmt::Debug for SmallBallCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Analytic { label, .. } => write!(f, "Analytic({label})"),
            Self::Empirical { sorted } => write!(f, "Empirical(count={})", sorted.len()),
        }
    }
}

impl SmallBallCdf {
    pub fn analytic_log(label: impl Into<String>, ln_f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Analytic { label: label.into(), ln_f: Arc::new(ln_f) }
    }

    pub fn analytic(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::analytic_log(label, move |r| f(r).min(1.0).ln())
    }

    /// `min(r^beta, 1)`.
    pub fn power(beta: f64) -> Self {
        Self::analytic_log(format!("r^{beta}"), move |r| (beta * r.ln()).min(0.0))
    }

    /// `exp(-1/r)`.
    pub fn exp_inverse() -> Self {
        Self::analytic_log("exp(-1/r)", |r| -1.0 / r)
    }

    /// `min(exp(-1/(2r)) r^{1 - d/2}, 1)`, the small-ball form of Brownian hitting times.
    pub fn hitting_form(d: usize) -> Self {
        let e = 1.0 - d as f64 / 2.0;
        Self::analytic_log(format!("hitting(d={d})"), move |r| (-0.5 / r + e * r.ln()).min(0.0))
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.iter().any(|x| !(*x >= 0.0)) {
            return Err(invalid("samples", "need nonnegative, non-NaN values"));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self::Empirical { sorted: Arc::new(samples) })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Analytic { .. } => self.ln_eval(r).exp(),
            Self::Empirical { sorted } => sorted.partition_point(|x| *x <= r) as f64 / sorted.len() as f64,
        }
    }

    pub fn ln_eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            Self::Analytic { ln_f, .. } => ln_f(r),
            Self::Empirical { .. } => self.eval(r).ln(),
        }
    }

    /// Smallest radius at which an empirical `F` is informative.
    pub fn resolution(&self) -> Option<f64> {
        match self {
            Self::Analytic { .. } => None,
            Self::Empirical { sorted } => sorted.first().copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converges,
    Diverges,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ternary {
    Yes,
    No,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    #[serde(rename = "undecided")]
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaVerdict {
    pub delta: f64,
    pub verdict: Verdict,
    /// Checkpoints `n` at which partial sums were taken.
    pub checkpoints: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Decay exponent of block increments in `log log n`; `None` for staircase gauges.
    pub decay_exponent: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierReport {
    pub c_low: f64,
    #[serde(serialize_with = "ser_extended")]
    pub c_high: f64,
    pub per_delta: Vec<DeltaVerdict>,
    pub dominated_variation: Ternary,
    pub type_label: TypeLabel,
    pub horizon: f64,
}

impl ClassifierReport {
    pub fn any_undecided(&self) -> bool {
        self.per_delta.iter().any(|d| d.verdict == Verdict::Undecided)
    }
}

pub const MIN_HORIZON: u64 = 10_000;
const DOUBLINGS: u32 = 4;

fn clipped_f(f: &SmallBallCdf, r: f64) -> f64 {
    f.eval(r).clamp(0.0, 1.0)
}

/// `sum_{lo < n <= hi} F(delta g(n))` for a non-staircase gauge.
fn range_sum(f: &SmallBallCdf, g: &Gauge, delta: f64, lo: u64, hi: u64) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for n in lo + 1..=hi {
        // Kahan summation keeps long harmonic-type sums accurate
        let y = clipped_f(f, delta * g.eval(n as f64)) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

fn classify_doubling(f: &SmallBallCdf, g: &Gauge, delta: f64, horizon: u64) -> DeltaVerdict {
    let start = g.n0.saturating_sub(1);
    let checkpoints: Vec<u64> = (0..=DOUBLINGS).map(|k| horizon << k).collect();
    let mut partial_sums = Vec::with_capacity(checkpoints.len());
    let mut acc = range_sum(f, g, delta, start, checkpoints[0]);
    partial_sums.push(acc);
    let mut increments = Vec::new();
    for w in checkpoints.windows(2) {
        let inc = range_sum(f, g, delta, w[0], w[1]);
        acc += inc;
        partial_sums.push(acc);
        increments.push(inc);
    }
    let cps: Vec<f64> = checkpoints.iter().map(|&n| n as f64).collect();
    let last = *checkpoints.last().unwrap() as f64;
    let mut out = DeltaVerdict { delta, verdict: Verdict::Undecided, checkpoints: cps, partial_sums, decay_exponent: None, note: None };
    if let Some(res) = f.resolution() {
        if delta * g.eval(last) < res {
            out.note = Some(format!("delta*g({last}) = {:e} lies below the empirical resolution {res:e}", delta * g.eval(last)));
            return out;
        }
    }
    if increments.iter().all(|&i| i == 0.0) {
        out.verdict = Verdict::Converges;
        return out;
    }
    if increments.contains(&0.0) {
        out.note = Some("block increments vanish only partially".into());
        return out;
    }
    let xs: Vec<f64> = checkpoints.windows(2).map(|w| ((w[0] as f64 * w[1] as f64).sqrt()).ln().ln()).collect();
    let ys: Vec<f64> = increments.iter().map(|i| i.ln()).collect();
    let s = -linear_fit(&xs, &ys).1;
    out.decay_exponent = Some(s);
    out.verdict = if s < 0.5 {
        Verdict::Diverges
    } else if s > 1.5 {
        Verdict::Converges
    } else {
        Verdict::Undecided
    };
    out
}

fn classify_staircase(f: &SmallBallCdf, g: &Gauge, delta: f64) -> DeltaVerdict {
    let GaugeForm::Staircase { levels, starts } = &g.form else { unreachable!() };
    let k = levels.len();
    let mut partial_sums = Vec::with_capacity(k);
    let mut increments = Vec::with_capacity(k - 1);
    let mut acc = 0.0;
    for i in 0..k - 1 {
        let inc = (starts[i + 1] - starts[i]) * clipped_f(f, delta * g.scale * levels[i]);
        acc += inc;
        increments.push(inc);
        partial_sums.push(acc);
    }
    let tail = &increments[increments.len() / 2..];
    let verdict = if tail.is_empty() {
        Verdict::Undecided
    } else if tail.iter().all(|&i| i >= 0.1) {
        Verdict::Diverges
    } else if *tail.last().unwrap() < 1e-6 && tail.windows(2).all(|w| w[1] <= w[0]) {
        Verdict::Converges
    } else {
        Verdict::Undecided
    };
    DeltaVerdict { delta, verdict, checkpoints: starts[1..].to_vec(), partial_sums, decay_exponent: None, note: None }
}

/// Brackets the escape constant `C` by classifying `sum F(delta g(n))` on a
/// grid of `delta`.
pub fn sum_classifier(f: &SmallBallCdf, g: &Gauge, deltas: &[f64], horizon: u64) -> Result<ClassifierReport> {
    g.validate()?;
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("deltas", "must be positive and strictly increasing"));
    }
    if horizon < MIN_HORIZON && !g.is_staircase() {
        return Err(invalid("horizon", format!("must be at least {MIN_HORIZON}")));
    }
    let per_delta: Vec<DeltaVerdict> = deltas
        .par_iter()
        .map(|&d| if g.is_staircase() { classify_staircase(f, g, d) } else { classify_doubling(f, g, d, horizon) })
        .collect();
    let c_low = per_delta.iter().filter(|v| v.verdict == Verdict::Converges).map(|v| v.delta).fold(0.0, f64::max);
    let c_high = per_delta.iter().filter(|v| v.verdict == Verdict::Diverges).map(|v| v.delta).fold(f64::INFINITY, f64::min);
    if c_low > c_high {
        return Err(Error::Invariant(format!("classifier verdicts not monotone in delta: converges at {c_low}, diverges at {c_high}")));
    }
    let dv = dominated_variation_test(f, &default_r_grid(f)).verdict;
    let type_label = match dv {
        Ternary::Yes => TypeLabel::B,
        Ternary::No => TypeLabel::A,
        Ternary::Undecided => TypeLabel::Undecided,
    };
    let horizon = if g.is_staircase() { per_delta[0].checkpoints.last().copied().unwrap_or(0.0) } else { (horizon << DOUBLINGS) as f64 };
    Ok(ClassifierReport { c_low, c_high, per_delta, dominated_variation: dv, type_label, horizon })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DvReport {
    pub verdict: Ternary,
    /// `(r, log(F(2r)/F(r)))` along the grid.
    pub log_ratios: Vec<(f64, f64)>,
    pub note: Option<String>,
}

/// `2^{-k}` for `k = 1..=40`, cut at the empirical resolution.
pub fn default_r_grid(f: &SmallBallCdf) -> Vec<f64> {
    let floor = f.resolution().unwrap_or(0.0);
    (1..=40).map(|k| 0.5f64.powi(k)).filter(|r| *r >= floor).collect()
}

/// Tests whether `F(2r)/F(r)` stays bounded as `r` decreases along `grid`.
pub fn dominated_variation_test(f: &SmallBallCdf, grid: &[f64]) -> DvReport {
    let mut log_ratios = Vec::new();
    let mut note = None;
    for &r in grid {
        let (l2, l1) = (f.ln_eval(2.0 * r), f.ln_eval(r));
        if l1 == f64::NEG_INFINITY {
            note = Some(format!("F vanishes at r = {r:e}; resolution exhausted"));
            break;
        }
        log_ratios.push((r, l2 - l1));
    }
    let undecided = |note| DvReport { verdict: Ternary::Undecided, log_ratios: log_ratios.clone(), note };
    if log_ratios.len() < 3 {
        return undecided(note.or(Some("grid too short".into())));
    }
    if f.resolution().is_some() && note.is_some() {
        return undecided(note);
    }
    let r_min = log_ratios.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let all: Vec<f64> = log_ratios.iter().map(|p| p.1).collect();
    let med = median(&all);
    let small_max = log_ratios.iter().filter(|p| p.0 <= 10.0 * r_min).map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if small_max <= med + 1.5f64.ln() {
        Ternary::Yes
    } else if small_max > med + 10f64.ln() {
        Ternary::No
    } else {
        Ternary::Undecided
    };
    DvReport { verdict, log_ratios, note }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeAGauge {
    pub gauge: Gauge,
    pub a: f64,
    pub levels: Vec<f64>,
    pub starts: Vec<f64>,
    pub audit: GaugeAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeAudit {
    pub passed: bool,
    pub failures: Vec<String>,
}

const MAX_LEVELS: usize = 64;
const MAX_SCAN: usize = 4000;

/// Builds the staircase `g(n) = a_k` on `[b_k, b_{k+1})` with
/// `a_{k+1} < a_k / a`, `F(a_k / a) <= 2^{-k} F(a_k)` and
/// `1/2 <= F(a_k)(b_{k+1} - b_k) <= 1`.
pub fn construct_type_a_gauge(f: &SmallBallCdf, a: f64) -> Result<TypeAGauge> {
    if !(a > 1.0) {
        return Err(invalid("a", "must exceed 1"));
    }
    let dv = dominated_variation_test(f, &default_r_grid(f));
    if dv.verdict == Ternary::Yes {
        return Err(Error::GaugeConstruction("F has dominated variation; no type-A gauge exists".into()));
    }
    let ln2 = 2f64.ln();
    let grid = |j: usize| a.powi(-(j as i32));
    let usable = |r: f64| {
        let l = f.ln_eval(r / a);
        l > f64::NEG_INFINITY && f.resolution().is_none_or(|res| r / a >= res)
    };
    // first grid point with F(r) > 0 where F(r/a) is also resolved
    let mut j = (0..MAX_SCAN).find(|&j| usable(grid(j))).ok_or_else(|| Error::GaugeConstruction("F vanishes on the whole grid".into()))?;
    let mut levels = vec![grid(j)];
    let mut ln_fs = vec![f.ln_eval(grid(j))];
    'outer: while levels.len() < MAX_LEVELS {
        let k = levels.len() as f64;
        for jj in j + 2..j + 2 + MAX_SCAN {
            let r = grid(jj);
            if !usable(r) {
                break 'outer;
            }
            let (lf, lf_small) = (f.ln_eval(r), f.ln_eval(r / a));
            if lf_small <= lf - k * ln2 {
                if -lf > 700.0 {
                    break 'outer;
                }
                levels.push(r);
                ln_fs.push(lf);
                j = jj;
                continue 'outer;
            }
        }
        break;
    }
    if levels.len() < 3 {
        return Err(Error::GaugeConstruction(format!(
            "only {} admissible levels within resolution; F behaves as dominated-varying here",
            levels.len()
        )));
    }
    let mut starts = vec![2.0];
    for lf in &ln_fs[..ln_fs.len() - 1] {
        let gap = (-lf).exp().floor().max(1.0);
        starts.push(starts.last().unwrap() + gap);
    }
    let gauge = Gauge::new(GaugeForm::Staircase { levels: levels.clone(), starts: starts.clone() }, 2)?;
    let audit = audit_type_a(f, a, &levels, &starts);
    Ok(TypeAGauge { gauge, a, levels, starts, audit })
}

/// Re-evaluates the defining inequalities of a staircase gauge.
pub fn audit_type_a(f: &SmallBallCdf, a: f64, levels: &[f64], starts: &[f64]) -> GaugeAudit {
    let mut failures = Vec::new();
    for k in 0..levels.len() {
        let ak = levels[k];
        let lhs = f.ln_eval(ak / a);
        let rhs = f.ln_eval(ak) - k as f64 * 2f64.ln();
        if !(lhs <= rhs + 1e-12 * rhs.abs()) {
            failures.push(format!("k={k}: F(a_k/a) > 2^-k F(a_k)"));
        }
        if k + 1 < levels.len() {
            if !(levels[k + 1] < ak / a) {
                failures.push(format!("k={k}: a_(k+1) >= a_k/a"));
            }
            let mass = f.eval(ak) * (starts[k + 1] - starts[k]);
            if !(0.5..=1.0 + 1e-12).contains(&mass) {
                failures.push(format!("k={k}: F(a_k)(b_(k+1)-b_k) = {mass} outside [1/2, 1]"));
            }
        }
    }
    GaugeAudit { passed: failures.is_empty(), failures }
}

/// `K_W(r) = r^{-log lambda / log a} exp(int_1^{1/r} (log L(u) - log lambda) / (u log a) du)`.
pub fn k_w(r: f64, laplace: &dyn Fn(f64) -> f64, lambda: f64, a: f64) -> Result<f64> {
    Ok(k_w_log(r, laplace, lambda, a)?.exp())
}

pub fn k_w_log(r: f64, laplace: &dyn Fn(f64) -> f64, lambda: f64, a: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda", "must lie in (0, 1)"));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(invalid("r", "must lie in (0, 1]"));
    }
    if !(a > 1.0) {
        return Err(invalid("a", "must exceed 1"));
    }
    let (ll, la) = (lambda.ln(), a.ln());
    let upper = (1.0 / r).ln();
    let q = integrate(|t| (laplace(t.exp()).ln() - ll) / la, 0.0, upper, 1e-12, 1e-14);
    if !q.converged {
        return Err(Error::Invariant(format!("K_W quadrature did not converge (error {})", q.error)));
    }
    Ok(-ll / la * r.ln() + q.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfReport {
    pub checkpoints: Vec<i64>,
    /// Running minima per path at each checkpoint.
    pub per_path: Vec<Vec<f64>>,
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Running minima of `|W(n)| / (a^n g(n))` on a dyadic schedule.
///
/// `Y` paths are accepted directly, since `|W(n)| / a^n = |Y(n)|`.
pub fn liminf_estimate(paths: &[PathSample], g: &Gauge) -> Result<LiminfReport> {
    let first = paths.first().ok_or_else(|| invalid("paths", "empty ensemble"))?;
    let p = first.params;
    let start = p.n_min.max(g.n0 as i64);
    if start > p.n_max {
        return Err(Error::WindowTooShort("window ends before the gauge domain".into()));
    }
    let mut checkpoints: Vec<i64> = (0..63).map(|k| 1i64 << k).filter(|&n| n >= start && n <= p.n_max).collect();
    if checkpoints.last() != Some(&p.n_max) {
        checkpoints.push(p.n_max);
    }
    let per_path: Vec<Vec<f64>> = paths
        .par_iter()
        .map(|path| {
            let mut m = f64::INFINITY;
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut ci = 0;
            for n in start..=p.n_max {
                let v = path.value(n);
                let scaled = match path.kind {
                    PathKind::StationaryOu => norm(v),
                    PathKind::ShiftSelfsimilar => norm(v) / p.a.powf(n as f64),
                };
                m = m.min(scaled / g.eval(n as f64));
                while ci < checkpoints.len() && checkpoints[ci] == n {
                    out.push(m);
                    ci += 1;
                }
            }
            out
        })
        .collect();
    let col = |i: usize| -> Vec<f64> { per_path.iter().map(|r| r[i]).collect() };
    let median_curve: Vec<f64> = (0..checkpoints.len()).map(|i| median(&col(i))).collect();
    let lower = (0..checkpoints.len()).map(|i| col(i).into_iter().fold(f64::INFINITY, f64::min)).collect();
    let upper = (0..checkpoints.len()).map(|i| col(i).into_iter().fold(f64::NEG_INFINITY, f64::max)).collect();
    Ok(LiminfReport { checkpoints, per_path, median: median_curve, lower, upper })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeACheck {
    /// `P(|W(0) - W(-1)| = 0)`.
    pub lambda: f64,
    pub type_a_gauge_exists: bool,
    /// True when `D = inf |W(0)| > 0`, where the escape constant is trivial.
    pub d_positive: bool,
    pub d_constant: Option<f64>,
    /// `(r, K_W(r))` on `r = 2^{-k}` when `lambda > 0`.
    pub k_w_curve: Vec<(f64, f64)>,
    pub classifier: Option<ClassifierReport>,
}

/// Existence of a type-A gauge for a law on the nonnegative orthant. When the
/// increment has an atom at 0, also classifies `sum K_W(delta g(n) ^ 1)`.
pub fn type_a_check(law: &IncrementLaw, a: f64, classify: Option<(&Gauge, &[f64], u64)>) -> Result<TypeACheck> {
    if !law.is_nonnegative() {
        return Err(Error::NotNonnegative);
    }
    if !(a > 1.0) {
        return Err(invalid("a", "must exceed 1"));
    }
    let lambda = law.atom_at_zero();
    let min_norm = law.support_min_norm();
    let d_positive = min_norm > 0.0;
    let d_constant = match (d_positive, law.support_min_1d()) {
        (true, Some(m)) => Some(m * a / (a - 1.0)),
        _ => None,
    };
    let mut k_w_curve = Vec::new();
    let mut classifier = None;
    if lambda > 0.0 && lambda < 1.0 {
        let desc = law.descriptor();
        let lap = desc.laplace.clone().ok_or_else(|| Error::NoClosedForm("Laplace transform of |X|".into()))?;
        for k in 0..=40 {
            let r = 0.5f64.powi(k);
            k_w_curve.push((r, k_w(r, &*lap, lambda, a)?));
        }
        if let Some((g, deltas, horizon)) = classify {
            let lap2 = lap.clone();
            let f =
                SmallBallCdf::analytic_log(
                    "K_W",
                    move |r| {
                        if r >= 1.0 {
                            0.0
                        } else {
                            k_w_log(r, &*lap2, lambda, a).unwrap_or(f64::NAN).min(0.0)
                        }
                    },
                );
            classifier = Some(sum_classifier(&f, g, deltas, horizon)?);
        }
    }
    Ok(TypeACheck { lambda, type_a_gauge_exists: lambda == 0.0, d_positive, d_constant, k_w_curve, classifier })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{build_ensemble, build_w_path, BuildOptions, SequenceParams};

    fn deltas() -> Vec<f64> {
        vec![1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0]
    }

    #[test]
    fn harmonic_diverges_everywhere() {
        let rep = sum_classifier(&SmallBallCdf::power(1.0), &Gauge::power_log(1.0, 0.0).unwrap(), &deltas(), 10_000).unwrap();
        assert!(rep.per_delta.iter().all(|d| d.verdict == Verdict::Diverges), "{rep:#?}");
        assert_eq!(rep.c_low, 0.0);
        assert_eq!(rep.dominated_variation, Ternary::Yes);
        assert_eq!(rep.type_label, TypeLabel::B);
    }

    #[test]
    fn log_squared_converges_everywhere() {
        let rep = sum_classifier(&SmallBallCdf::power(1.0), &Gauge::power_log(1.0, 2.0).unwrap(), &deltas(), 10_000).unwrap();
        assert!(rep.per_delta.iter().all(|d| d.verdict == Verdict::Converges), "{rep:#?}");
        assert_eq!(rep.c_high, f64::INFINITY);
    }

    #[test]
    fn boundary_case_is_undecided() {
        let rep = sum_classifier(&SmallBallCdf::power(1.0), &Gauge::power_log(1.0, 1.0).unwrap(), &[1.0], 10_000).unwrap();
        assert_eq!(rep.per_delta[0].verdict, Verdict::Undecided);
    }

    #[test]
    fn finite_threshold_is_bracketed() {
        // F(r) = r^2 on g = n^{-1/2}: sum delta^2 / n diverges for every delta;
        // with the stretched form F = exp(-1/r), g = 1/log n gives sum n^{-1/delta}
        let g = Gauge::log_power(-1.0).unwrap();
        let rep = sum_classifier(&SmallBallCdf::exp_inverse(), &g, &[0.25, 0.5, 2.0, 4.0], 10_000).unwrap();
        let v: Vec<Verdict> = rep.per_delta.iter().map(|d| d.verdict).collect();
        assert_eq!(v[0], Verdict::Converges);
        assert_eq!(v[3], Verdict::Diverges);
        assert!(rep.c_low <= 1.0 && rep.c_high >= 1.0);
        assert_eq!(rep.type_label, TypeLabel::A);
    }

    #[test]
    fn empirical_below_resolution_is_undecided() {
        let f = SmallBallCdf::empirical((1..=1000).map(|i| i as f64 / 1000.0).collect()).unwrap();
        let rep = sum_classifier(&f, &Gauge::power_log(1.0, 2.0).unwrap(), &[1.0], 10_000).unwrap();
        assert_eq!(rep.per_delta[0].verdict, Verdict::Undecided);
        assert!(rep.per_delta[0].note.is_some());
    }

    #[test]
    fn classifier_rejects_bad_input() {
        let g = Gauge::power_log(1.0, 0.0).unwrap();
        let f = SmallBallCdf::power(1.0);
        assert!(sum_classifier(&f, &g, &[1.0], 100).is_err());
        assert!(sum_classifier(&f, &g, &[1.0, 0.5], 10_000).is_err());
    }

    #[test]
    fn dominated_variation_verdicts() {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let f = SmallBallCdf::power(beta);
            let rep = dominated_variation_test(&f, &default_r_grid(&f));
            assert_eq!(rep.verdict, Ternary::Yes, "beta={beta}");
            assert!(rep.log_ratios.iter().all(|p| (p.1 - beta * 2f64.ln()).abs() < 1e-12));
        }
        for f in [SmallBallCdf::exp_inverse(), SmallBallCdf::hitting_form(1), SmallBallCdf::hitting_form(3)] {
            assert_eq!(dominated_variation_test(&f, &default_r_grid(&f)).verdict, Ternary::No, "{f:?}");
        }
    }

    #[test]
    fn type_a_gauge_for_exp_inverse() {
        let f = SmallBallCdf::exp_inverse();
        let t = construct_type_a_gauge(&f, 2.0).unwrap();
        assert!(t.audit.passed, "{:?}", t.audit.failures);
        assert!(t.levels.len() >= 3);
        // independent recheck of both chains
        for k in 0..t.levels.len() {
            let ak = t.levels[k];
            assert!((-2.0 / ak) <= -1.0 / ak - k as f64 * 2f64.ln());
            if k + 1 < t.levels.len() {
                assert!(t.levels[k + 1] < ak / 2.0);
                let mass = (-1.0 / ak).exp() * (t.starts[k + 1] - t.starts[k]);
                assert!((0.5..=1.0).contains(&mass), "k={k}: {mass}");
            }
        }
        let rep = sum_classifier(&f, &t.gauge, &[0.25, 0.4, 1.0, 2.0], 0).unwrap();
        assert_eq!(rep.per_delta[0].verdict, Verdict::Converges);
        assert_eq!(rep.per_delta[3].verdict, Verdict::Diverges);
    }

    #[test]
    fn type_a_gauge_fails_on_power_law() {
        assert!(matches!(construct_type_a_gauge(&SmallBallCdf::power(2.0), 2.0), Err(Error::GaugeConstruction(_))));
    }

    fn bernoulli_laplace(u: f64) -> f64 {
        0.5 + 0.5 * (-u).exp()
    }

    #[test]
    fn k_w_unit_at_one() {
        assert_eq!(k_w(1.0, &bernoulli_laplace, 0.5, 2.0).unwrap(), 1.0);
        assert!(k_w(0.5, &bernoulli_laplace, 1.0, 2.0).is_err());
        assert!(k_w(0.5, &bernoulli_laplace, 0.0, 2.0).is_err());
    }

    #[test]
    fn k_w_matches_trapezoid() {
        let r = 2f64.powi(-10);
        let adaptive = k_w(r, &bernoulli_laplace, 0.5, 2.0).unwrap();
        let upper = (1.0 / r).ln();
        let m = 1_000_000;
        let h = upper / m as f64;
        let f = |t: f64| (bernoulli_laplace(t.exp()).ln() - 0.5f64.ln()) / 2f64.ln();
        let mut s = 0.5 * (f(0.0) + f(upper));
        for i in 1..m {
            s += f(i as f64 * h);
        }
        let trap = r.powf(-(0.5f64.ln()) / 2f64.ln()) * (s * h).exp();
        assert!((adaptive / trap - 1.0).abs() < 1e-6, "{adaptive} vs {trap}");
    }

    #[test]
    fn k_w_regular_variation() {
        let r = 2f64.powi(-40);
        let k = |r| k_w(r, &bernoulli_laplace, 0.5, 2.0).unwrap();
        for c in [2.0f64, 10.0] {
            assert!((k(c * r) / k(r) / c - 1.0).abs() < 0.02);
        }
        let lk = k_w_log(r, &bernoulli_laplace, 0.5, 2.0).unwrap();
        assert!((lk / r.ln() - 1.0).abs() < 0.02);
    }

    #[test]
    fn point_mass_liminf_is_d() {
        let law = IncrementLaw::point_mass(vec![1.0]).unwrap();
        let params = SequenceParams::new(2.0, 1, 0, 1000).unwrap();
        assert!(build_w_path(params, &law, &BuildOptions::default(), 3).is_err());
        let params = SequenceParams::new(2.0, 1, 0, 900).unwrap();
        let w = build_w_path(params, &law, &BuildOptions::default(), 3).unwrap();
        let rep = liminf_estimate(&[w], &Gauge::constant(1.0).unwrap()).unwrap();
        for m in &rep.per_path[0] {
            assert!((m - 2.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn liminf_scale_equivariance_is_exact() {
        let law = IncrementLaw::exponential(vec![1.0]).unwrap();
        let params = SequenceParams::new(2.0, 1, 0, 2048).unwrap();
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::StationaryOu, 4, 8).unwrap();
        let g = Gauge::power_log(1.0, 0.0).unwrap();
        let base = liminf_estimate(&paths, &g).unwrap();
        for c in [0.25, 2.0, 8.0] {
            let scaled = liminf_estimate(&paths, &g.scaled(c)).unwrap();
            for (a, b) in base.per_path.iter().flatten().zip(scaled.per_path.iter().flatten()) {
                assert_eq!((a / c).to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn liminf_trends() {
        // Gaussian increments: F(r) ~ r; g = 1/n gives a divergent sum and a
        // running minimum that keeps falling; g = n^{-2} stabilizes early
        let law = IncrementLaw::standard_gaussian(1).unwrap();
        let params = SequenceParams::new(2.0, 1, 0, 10_000).unwrap();
        let paths = build_ensemble(params, &law, &BuildOptions::default(), PathKind::StationaryOu, 6, 100).unwrap();
        let div = liminf_estimate(&paths, &Gauge::power_log(1.0, 0.0).unwrap()).unwrap();
        assert!(div.median.windows(2).all(|w| w[1] <= w[0]));
        assert!(div.median.last().unwrap() < &(div.median[2] * 0.5));
        let conv = liminf_estimate(&paths, &Gauge::power_log(2.0, 0.0).unwrap()).unwrap();
        let i100 = conv.checkpoints.iter().position(|&n| n >= 100).unwrap();
        let i1000 = conv.checkpoints.iter().position(|&n| n >= 1000).unwrap();
        let early = conv.per_path.iter().filter(|row| row[i1000] == *row.last().unwrap() && row[i100] >= row[i1000]).count();
        assert!(early >= 90, "{early}");
    }

    #[test]
    fn type_a_check_cases() {
        let c = type_a_check(&IncrementLaw::exponential(vec![1.0]).unwrap(), 2.0, None).unwrap();
        assert!(c.type_a_gauge_exists && !c.d_positive);
        let b = IncrementLaw::bernoulli(0.5, vec![1.0]).unwrap();
        let g = Gauge::power_log(1.0, 0.0).unwrap();
        let c = type_a_check(&b, 2.0, Some((&g, &[0.5, 1.0, 2.0], 10_000))).unwrap();
        assert!(!c.type_a_gauge_exists);
        assert_eq!(c.lambda, 0.5);
        assert!(c.classifier.is_some());
        let p = type_a_check(&IncrementLaw::point_mass(vec![1.0]).unwrap(), 2.0, None).unwrap();
        assert!(p.type_a_gauge_exists && p.d_positive);
        assert_eq!(p.d_constant, Some(2.0));
        assert!(type_a_check(&IncrementLaw::standard_gaussian(1).unwrap(), 2.0, None).is_err());
    }

    #[test]
    fn gauge_validation() {
        assert!(Gauge::power_log(-1.0, 0.0).is_err());
        assert!(Gauge::log_power(0.5).is_err());
        assert!(Gauge::tabulated(vec![1.0, 2.0], 1).is_err());
        let g = Gauge::tabulated(vec![3.0, 2.0, 1.0], 5).unwrap();
        assert_eq!(g.eval(5.0), 3.0);
        assert_eq!(g.eval(100.0), 1.0);
        let s: Gauge = toml::from_str("n0 = 2\nform = { kind = \"power-log\", p = 1.0, q = 2.0 }").unwrap();
        assert_eq!(s.eval(10.0), 0.1 * 10f64.ln().powi(-2));
    }
}
