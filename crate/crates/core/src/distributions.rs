//! Validated increment laws with exact transforms and samplers.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::labels;
use crate::seeds;

/// Serializable description of an increment law. The `kind` field is the
/// discriminator in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawSpec {
    PointMass {
        c: Vec<f64>,
    },
    /// Zero with probability `lambda`, `v` otherwise.
    BernoulliScaled {
        lambda: f64,
        v: Vec<f64>,
    },
    /// Independent exponential coordinates with the given rates.
    Exponential {
        rates: Vec<f64>,
    },
    Uniform {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
    },
    /// One-sided strictly stable law on R_+ with `E exp(-uX) = exp(-u^alpha)`.
    PositiveStable {
        alpha: f64,
    },
    FiniteMixture {
        weights: Vec<f64>,
        components: Vec<LawSpec>,
    },
}

#[derive(Debug, Clone)]
enum Kind {
    PointMass(Vec<f64>),
    Bernoulli { lambda: f64, v: Vec<f64> },
    Exponential(Vec<f64>),
    Uniform { lo: Vec<f64>, hi: Vec<f64> },
    Gaussian { mean: Vec<f64>, cov: Vec<f64>, chol: Vec<f64> },
    PositiveStable(f64),
    Mixture { weights: Vec<f64>, parts: Vec<IncrementLaw> },
}

/// A validated iid increment law on R^d.
#[derive(Debug, Clone)]
pub struct IncrementLaw {
    spec: LawSpec,
    kind: Kind,
    dim: usize,
}

/// Flat row-major storage for `count` points of R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Points {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn cholesky(cov: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = cov[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Dimension of the affine hull of a point set.
fn affine_rank(points: &[Vec<f64>], d: usize) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let mut rows: Vec<Vec<f64>> = points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut rank = 0;
    for col in 0..d {
        let pivot = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= 1e-12 * scale {
            continue;
        }
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank {
                let f = row[col] / pivot_row[col];
                for (x, p) in row[col..d].iter_mut().zip(&pivot_row[col..d]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl IncrementLaw {
    pub fn new(spec: LawSpec) -> Result<Self> {
        let law = Self::build(spec)?;
        if law.dim >= 2 && !law.is_full() {
            return Err(Error::NotFull { dim: law.dim, reason: "support lies in an affine hyperplane".into() });
        }
        Ok(law)
    }

    pub fn point_mass(c: Vec<f64>) -> Result<Self> {
        Self::new(LawSpec::PointMass { c })
    }

    pub fn bernoulli(lambda: f64, v: Vec<f64>) -> Result<Self> {
        Self::new(LawSpec::BernoulliScaled { lambda, v })
    }

    pub fn exponential(rates: Vec<f64>) -> Result<Self> {
        Self::new(LawSpec::Exponential { rates })
    }

    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::new(LawSpec::Uniform { lo, hi })
    }

    pub fn gaussian(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(LawSpec::Gaussian { mean, cov })
    }

    /// Standard normal on R^d.
    pub fn standard_gaussian(d: usize) -> Result<Self> {
        let cov = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::gaussian(vec![0.0; d], cov)
    }

    pub fn positive_stable(alpha: f64) -> Result<Self> {
        Self::new(LawSpec::PositiveStable { alpha })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<LawSpec>) -> Result<Self> {
        Self::new(LawSpec::FiniteMixture { weights, components })
    }

    fn build(spec: LawSpec) -> Result<Self> {
        let finite = |field: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() {
                return Err(invalid(field, "must be nonempty"));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(field, "entries must be finite"));
            }
            Ok(())
        };
        let (kind, dim) = match &spec {
            LawSpec::PointMass { c } => {
                finite("c", c)?;
                (Kind::PointMass(c.clone()), c.len())
            }
            LawSpec::BernoulliScaled { lambda, v } => {
                finite("v", v)?;
                if !(0.0..=1.0).contains(lambda) {
                    return Err(invalid("lambda", "must lie in [0, 1]"));
                }
                (Kind::Bernoulli { lambda: *lambda, v: v.clone() }, v.len())
            }
            LawSpec::Exponential { rates } => {
                finite("rates", rates)?;
                if rates.iter().any(|r| *r <= 0.0) {
                    return Err(invalid("rates", "must be positive"));
                }
                (Kind::Exponential(rates.clone()), rates.len())
            }
            LawSpec::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if lo.len() != hi.len() {
                    return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
                }
                if lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(invalid("hi", "every axis needs lo < hi"));
                }
                (Kind::Uniform { lo: lo.clone(), hi: hi.clone() }, lo.len())
            }
            LawSpec::Gaussian { mean, cov } => {
                finite("mean", mean)?;
                let d = mean.len();
                if cov.len() != d || cov.iter().any(|r| r.len() != d) {
                    return Err(invalid("cov", format!("must be {d}x{d}")));
                }
                let flat: Vec<f64> = cov.iter().flatten().copied().collect();
                for i in 0..d {
                    for j in 0..i {
                        let (a, b) = (flat[i * d + j], flat[j * d + i]);
                        if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                            return Err(invalid("cov", "must be symmetric"));
                        }
                    }
                }
                let chol =
                    cholesky(&flat, d).ok_or_else(|| Error::NotFull { dim: d, reason: "covariance is not positive definite".into() })?;
                (Kind::Gaussian { mean: mean.clone(), cov: flat, chol }, d)
            }
            LawSpec::PositiveStable { alpha } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(invalid("alpha", "must lie strictly inside (0, 1)"));
                }
                (Kind::PositiveStable(*alpha), 1)
            }
            LawSpec::FiniteMixture { weights, components } => {
                if weights.is_empty() || weights.len() != components.len() {
                    return Err(invalid("weights", "need one weight per component"));
                }
                if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
                    return Err(invalid("weights", "must be nonnegative"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid("weights", format!("must sum to 1, got {total}")));
                }
                let parts = components.iter().cloned().map(Self::build).collect::<Result<Vec<_>>>()?;
                let d = parts[0].dim;
                if let Some(p) = parts.iter().find(|p| p.dim != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: p.dim });
                }
                (Kind::Mixture { weights: weights.clone(), parts }, d)
            }
        };
        Ok(Self { spec, kind, dim })
    }

    /// Atoms of the purely atomic part, or `None` if some component is
    /// absolutely continuous (and hence full).
    fn atoms(&self) -> Option<Vec<Vec<f64>>> {
        match &self.kind {
            Kind::PointMass(c) => Some(vec![c.clone()]),
            Kind::Bernoulli { lambda, v } => {
                let mut pts = Vec::new();
                if *lambda > 0.0 {
                    pts.push(vec![0.0; v.len()]);
                }
                if *lambda < 1.0 {
                    pts.push(v.clone());
                }
                Some(pts)
            }
            Kind::Mixture { weights, parts } => {
                let mut pts = Vec::new();
                for (w, p) in weights.iter().zip(parts) {
                    if *w > 0.0 {
                        pts.extend(p.atoms()?);
                    }
                }
                Some(pts)
            }
            _ => None,
        }
    }

    fn is_full(&self) -> bool {
        match self.atoms() {
            None => true,
            Some(pts) => affine_rank(&pts, self.dim) == self.dim,
        }
    }

    pub fn spec(&self) -> &LawSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the law is supported on the nonnegative orthant.
    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            Kind::PointMass(c) => c.iter().all(|x| *x >= 0.0),
            Kind::Bernoulli { lambda, v } => *lambda == 1.0 || v.iter().all(|x| *x >= 0.0),
            Kind::Exponential(_) | Kind::PositiveStable(_) => true,
            Kind::Uniform { lo, .. } => lo.iter().all(|x| *x >= 0.0),
            Kind::Gaussian { .. } => false,
            Kind::Mixture { weights, parts } => weights.iter().zip(parts).all(|(w, p)| *w == 0.0 || p.is_nonnegative()),
        }
    }

    /// P(X = 0).
    pub fn atom_at_zero(&self) -> f64 {
        match &self.kind {
            Kind::PointMass(c) => {
                if c.iter().all(|x| *x == 0.0) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Bernoulli { lambda, v } => {
                if v.iter().all(|x| *x == 0.0) {
                    1.0
                } else {
                    *lambda
                }
            }
            Kind::Mixture { weights, parts } => weights.iter().zip(parts).map(|(w, p)| w * p.atom_at_zero()).sum(),
            _ => 0.0,
        }
    }

    /// inf { |x| : x in supp X }.
    pub fn support_min_norm(&self) -> f64 {
        match &self.kind {
            Kind::PointMass(c) => norm(c),
            Kind::Bernoulli { lambda, v } => {
                if *lambda > 0.0 {
                    0.0
                } else {
                    norm(v)
                }
            }
            Kind::Exponential(_) | Kind::Gaussian { .. } | Kind::PositiveStable(_) => 0.0,
            Kind::Uniform { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| {
                    if *a > 0.0 {
                        a * a
                    } else if *b < 0.0 {
                        b * b
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                .sqrt(),
            Kind::Mixture { weights, parts } => {
                weights.iter().zip(parts).filter(|(w, _)| **w > 0.0).map(|(_, p)| p.support_min_norm()).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Smallest point of the support for one-dimensional laws.
    pub fn support_min_1d(&self) -> Option<f64> {
        if self.dim != 1 {
            return None;
        }
        Some(match &self.kind {
            Kind::PointMass(c) => c[0],
            Kind::Bernoulli { lambda, v } => {
                if *lambda == 0.0 {
                    v[0]
                } else if *lambda == 1.0 {
                    0.0
                } else {
                    v[0].min(0.0)
                }
            }
            Kind::Exponential(_) | Kind::PositiveStable(_) => 0.0,
            Kind::Uniform { lo, .. } => lo[0],
            Kind::Gaussian { .. } => f64::NEG_INFINITY,
            Kind::Mixture { weights, parts } => {
                weights.iter().zip(parts).filter(|(w, _)| **w > 0.0).map(|(_, p)| p.support_min_1d().unwrap()).fold(f64::INFINITY, f64::min)
            }
        })
    }

    /// Writes one draw into `out` (length `dim`).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.kind {
            Kind::PointMass(c) => out.copy_from_slice(c),
            Kind::Bernoulli { lambda, v } => {
                let u: f64 = rng.random();
                if u < *lambda {
                    out.fill(0.0);
                } else {
                    out.copy_from_slice(v);
                }
            }
            Kind::Exponential(rates) => {
                for (o, r) in out.iter_mut().zip(rates) {
                    let e: f64 = Exp1.sample(rng);
                    *o = e / r;
                }
            }
            Kind::Uniform { lo, hi } => {
                for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
                    let u: f64 = rng.random();
                    *o = a + (b - a) * u;
                }
            }
            Kind::Gaussian { mean, chol, .. } => {
                let d = self.dim;
                let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                for i in 0..d {
                    let mut s = mean[i];
                    for k in 0..=i {
                        s += chol[i * d + k] * z[k];
                    }
                    out[i] = s;
                }
            }
            Kind::PositiveStable(alpha) => out[0] = positive_stable_draw(*alpha, rng),
            Kind::Mixture { weights, parts } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = parts.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                parts[pick].draw(rng, out);
            }
        }
    }

    /// `count` iid draws from the stream derived from `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Points {
        let mut rng = seeds::stream(seed, &labels!["sample"]);
        self.sample_with(&mut rng, count)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Points {
        let mut data = vec![0.0; count * self.dim];
        for row in data.chunks_exact_mut(self.dim) {
            self.draw(rng, row);
        }
        Points { dim: self.dim, data }
    }

    /// Exact characteristic function at `z`.
    pub fn cf(&self, z: &[f64]) -> Complex64 {
        let i = Complex64::i();
        match &self.kind {
            Kind::PointMass(c) => (i * dot(z, c)).exp(),
            Kind::Bernoulli { lambda, v } => *lambda + (1.0 - lambda) * (i * dot(z, v)).exp(),
            Kind::Exponential(rates) => z.iter().zip(rates).map(|(zk, r)| Complex64::new(*r, 0.0) / Complex64::new(*r, -zk)).product(),
            Kind::Uniform { lo, hi } => z
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(zk, (a, b))| {
                    let half = 0.5 * zk * (b - a);
                    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
                    (i * zk * 0.5 * (a + b)).exp() * sinc
                })
                .product(),
            Kind::Gaussian { mean, cov, .. } => {
                let d = self.dim;
                let mut q = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        q += z[a] * cov[a * d + b] * z[b];
                    }
                }
                (i * dot(z, mean) - 0.5 * q).exp()
            }
            Kind::PositiveStable(alpha) => {
                let x = z[0];
                if x == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let phase = -x.signum() * PI * alpha / 2.0;
                (-x.abs().powf(*alpha) * Complex64::from_polar(1.0, phase)).exp()
            }
            Kind::Mixture { weights, parts } => weights.iter().zip(parts).map(|(w, p)| *w * p.cf(z)).sum(),
        }
    }

    /// Exponent `beta` with `|log cf(w)| = O(|w|^beta)` as `w -> 0`.
    pub fn small_argument_exponent(&self) -> f64 {
        match &self.kind {
            Kind::PositiveStable(alpha) => *alpha,
            Kind::Mixture { parts, .. } => parts.iter().map(|p| p.small_argument_exponent()).fold(1.0, f64::min),
            _ => 1.0,
        }
    }

    /// Exact `E exp(-u |X|)` for laws on the nonnegative orthant.
    pub fn laplace(&self, u: f64) -> Result<f64> {
        if !self.is_nonnegative() {
            return Err(Error::NotNonnegative);
        }
        if u < 0.0 {
            return Err(invalid("u", "must be nonnegative"));
        }
        match &self.kind {
            Kind::PointMass(c) => Ok((-u * norm(c)).exp()),
            Kind::Bernoulli { lambda, v } => Ok(lambda + (1.0 - lambda) * (-u * norm(v)).exp()),
            Kind::Exponential(rates) if rates.len() == 1 => Ok(rates[0] / (rates[0] + u)),
            Kind::Uniform { lo, hi } if lo.len() == 1 => {
                let (a, b) = (lo[0], hi[0]);
                let w = u * (b - a);
                if w < 1e-8 {
                    Ok((-u * 0.5 * (a + b)).exp())
                } else {
                    Ok((-u * a).exp() * (-(-w).exp_m1()) / w)
                }
            }
            Kind::PositiveStable(alpha) => Ok((-u.powf(*alpha)).exp()),
            Kind::Mixture { weights, parts } => {
                let mut s = 0.0;
                for (w, p) in weights.iter().zip(parts) {
                    if *w > 0.0 {
                        s += w * p.laplace(u)?;
                    }
                }
                Ok(s)
            }
            _ => Err(Error::NoClosedForm(format!(
                "Laplace transform of |X| for {}-dimensional {:?}",
                self.dim,
                std::mem::discriminant(&self.kind)
            ))),
        }
    }

    /// The transform bundle used downstream.
    pub fn descriptor(&self) -> LawDescriptor {
        let law = Arc::new(self.clone());
        let cf_law = law.clone();
        let laplace = if self.laplace(1.0).is_ok() {
            let l = law.clone();
            Some(Arc::new(move |u: f64| l.laplace(u).unwrap()) as LaplaceFn)
        } else {
            None
        };
        LawDescriptor { cf: Arc::new(move |z: &[f64]| cf_law.cf(z)), laplace, atom_at_zero: self.atom_at_zero() }
    }

    /// `E log(2 + |X|)` either as a closed form / certified upper bound or by
    /// Monte Carlo.
    pub fn log_moment(&self, mode: LogMomentMode) -> LogMoment {
        match mode {
            LogMomentMode::AnalyticBound => self.log_moment_analytic(),
            LogMomentMode::MonteCarlo { count, seed } => {
                let mut rng = seeds::stream(seed, &labels!["log-moment"]);
                let mut buf = vec![0.0; self.dim];
                let vals: Vec<f64> = (0..count)
                    .map(|_| {
                        self.draw(&mut rng, &mut buf);
                        (2.0 + norm(&buf)).ln()
                    })
                    .collect();
                let (m, se) = crate::stats::mean_se(&vals);
                LogMoment { value: m, std_error: Some(se), kind: LogMomentKind::MonteCarlo }
            }
        }
    }

    fn log_moment_analytic(&self) -> LogMoment {
        let exact = |value| LogMoment { value, std_error: None, kind: LogMomentKind::Exact };
        let bound = |value| LogMoment { value, std_error: None, kind: LogMomentKind::UpperBound };
        match &self.kind {
            Kind::PointMass(c) => exact((2.0 + norm(c)).ln()),
            Kind::Bernoulli { lambda, v } => exact(lambda * 2f64.ln() + (1.0 - lambda) * (2.0 + norm(v)).ln()),
            // Jensen: E log(2+|X|) <= log(2 + E|X|), with E|X| <= sqrt(E|X|^2).
            Kind::Exponential(rates) => bound((2.0 + rates.iter().map(|r| 1.0 / r).sum::<f64>()).ln()),
            Kind::Uniform { lo, hi } => {
                let m2: f64 = lo.iter().zip(hi).map(|(a, b)| (a * a + a * b + b * b) / 3.0).sum();
                bound((2.0 + m2.sqrt()).ln())
            }
            Kind::Gaussian { mean, cov, .. } => {
                let d = self.dim;
                let tr: f64 = (0..d).map(|i| cov[i * d + i]).sum();
                bound((2.0 + (dot(mean, mean) + tr).sqrt()).ln())
            }
            Kind::PositiveStable(alpha) => {
                // log(1+y) <= y^p/p on y >= 0 for p in (0,1], and
                // E X^p = Gamma(1-p/alpha)/Gamma(1-p) for p < alpha.
                let p = alpha / 2.0;
                let moment = gamma(1.0 - p / alpha) / gamma(1.0 - p);
                bound(2f64.ln() + 2f64.powf(-p) * moment / p)
            }
            Kind::Mixture { weights, parts } => {
                let mut v = 0.0;
                let mut all_exact = true;
                for (w, p) in weights.iter().zip(parts) {
                    let lm = p.log_moment_analytic();
                    all_exact &= lm.kind == LogMomentKind::Exact;
                    v += w * lm.value;
                }
                if all_exact {
                    exact(v)
                } else {
                    bound(v)
                }
            }
        }
    }

    /// Empirical `q`-quantile of |X| from `count` pilot draws.
    pub fn norm_quantile(&self, q: f64, count: usize, seed: u64) -> f64 {
        let mut rng = seeds::stream(seed, &labels!["pilot-quantile"]);
        let mut buf = vec![0.0; self.dim];
        let mut v: Vec<f64> = (0..count)
            .map(|_| {
                self.draw(&mut rng, &mut buf);
                norm(&buf)
            })
            .collect();
        v.sort_by(f64::total_cmp);
        crate::stats::quantile_sorted(&v, q)
    }
}

/// Kanter's representation of the one-sided stable law with
/// `E exp(-uX) = exp(-u^alpha)`.
pub fn positive_stable_draw<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() * PI;
        if u <= 0.0 {
            continue;
        }
        let e: f64 = Exp1.sample(rng);
        let a = (alpha * u).sin().powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * u).sin() / u.sin().powf(1.0 / (1.0 - alpha));
        let x = (a / e).powf((1.0 - alpha) / alpha);
        if x.is_finite() {
            return x;
        }
    }
}

pub type CfFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type LaplaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Transform bundle attached to a law.
#[derive(Clone)]
pub struct LawDescriptor {
    pub cf: CfFn,
    pub laplace: Option<LaplaceFn>,
    pub atom_at_zero: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMomentMode {
    AnalyticBound,
    MonteCarlo { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMomentKind {
    Exact,
    UpperBound,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMoment {
    pub value: f64,
    pub std_error: Option<f64>,
    pub kind: LogMomentKind,
}
