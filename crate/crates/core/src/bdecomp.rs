//! Characteristic functions of b-decomposable laws as infinite products
//! `mu(z) = prod_{n >= 0} rho(b^n z)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{norm, IncrementLaw};
use crate::error::{invalid, Error, Result};
use crate::labels;
use crate::seeds;

pub use crate::distributions::CfFn;

/// Radius of the ball on which the small-argument constant is estimated.
const SMALL_BALL: f64 = 1e-2;
const SAFETY: f64 = 2.0;

#[derive(Clone)]
pub struct ProductCF {
    rho_cf: CfFn,
    dim: usize,
    b: f64,
    tol: f64,
    max_terms: usize,
    /// `|log rho(w)| <= c_rho |w|^beta` for `|w| <= SMALL_BALL`.
    beta: f64,
    c_rho: f64,
}

impl std::fmt::Debug for ProductCF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductCF")
            .field("dim", &self.dim)
            .field("b", &self.b)
            .field("tol", &self.tol)
            .field("max_terms", &self.max_terms)
            .field("beta", &self.beta)
            .field("c_rho", &self.c_rho)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuHat {
    pub value: Complex64,
    /// Bound on `|mu(z) - value|`.
    pub bound: f64,
    pub terms: usize,
}

impl ProductCF {
    pub fn from_law(law: &IncrementLaw, b: f64, tol: f64, max_terms: usize) -> Result<Self> {
        let l = law.clone();
        Self::from_fn(law.dim(), Arc::new(move |z: &[f64]| l.cf(z)), law.small_argument_exponent(), b, tol, max_terms)
    }

    /// `beta` is the small-argument exponent of `1 - rho`.
    pub fn from_fn(dim: usize, rho_cf: CfFn, beta: f64, b: f64, tol: f64, max_terms: usize) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(invalid("b", "must lie in (0, 1)"));
        }
        if !(tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if max_terms == 0 {
            return Err(invalid("max_terms", "must be positive"));
        }
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(invalid("beta", "must lie in (0, 2]"));
        }
        let c_rho = SAFETY * small_ball_constant(&*rho_cf, dim, beta);
        Ok(Self { rho_cf, dim, b, tol, max_terms, beta, c_rho })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::from_fn(self.dim, self.rho_cf.clone(), self.beta, b, self.tol, self.max_terms)
    }

    pub fn rho(&self, z: &[f64]) -> Complex64 {
        (self.rho_cf)(z)
    }

    /// Bound on `sum_{n >= k} |log rho(b^n z)|`, valid once `b^k |z|` is in the small ball.
    fn tail_bound(&self, zn: f64, k: usize) -> f64 {
        let w = self.b.powi(k as i32) * zn;
        if w > SMALL_BALL {
            return f64::INFINITY;
        }
        let q = self.b.powf(self.beta);
        self.c_rho * w.powf(self.beta) / (1.0 - q)
    }

    pub fn mu_hat(&self, z: &[f64]) -> Result<MuHat> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.len() });
        }
        let zn = norm(z);
        if zn == 0.0 {
            return Ok(MuHat { value: Complex64::new(1.0, 0.0), bound: 0.0, terms: 0 });
        }
        let mut log_sum = Complex64::new(0.0, 0.0);
        let mut w = z.to_vec();
        for k in 0..self.max_terms {
            let t = self.tail_bound(zn, k);
            if t < self.tol {
                let value = log_sum.exp();
                return Ok(MuHat { value, bound: value.norm() * t.exp_m1(), terms: k });
            }
            let f = self.rho(&w);
            if f.norm() == 0.0 {
                return Ok(MuHat { value: Complex64::new(0.0, 0.0), bound: 0.0, terms: k + 1 });
            }
            log_sum += f.ln();
            w.iter_mut().for_each(|x| *x *= self.b);
        }
        let value = log_sum.exp();
        Err(Error::ProductNotConverged { terms: self.max_terms, re: value.re, im: value.im, bound: self.tail_bound(zn, self.max_terms) })
    }

    /// Maximum of `|mu(z) - mu(b' z) rho(z)|` over the grid; `b' = b` unless overridden.
    pub fn fixed_point_residual(&self, grid: &[Vec<f64>], b_rhs: Option<f64>) -> Result<f64> {
        let br = b_rhs.unwrap_or(self.b);
        let res: Result<Vec<f64>> = grid
            .par_iter()
            .map(|z| {
                let lhs = self.mu_hat(z)?.value;
                let bz: Vec<f64> = z.iter().map(|x| x * br).collect();
                let rhs = self.mu_hat(&bz)?.value * self.rho(z);
                Ok((lhs - rhs).norm())
            })
            .collect();
        Ok(res?.into_iter().fold(0.0, f64::max))
    }

    pub fn check_fixed_point(&self, grid: &[Vec<f64>]) -> Result<f64> {
        self.fixed_point_residual(grid, None)
    }

    /// Maximum deviation between the empirical cf of `samples` (row-major,
    /// `dim` per row) and the product over the grid.
    pub fn empirical_cf_match(&self, samples: &[f64], grid: &[Vec<f64>]) -> Result<CfMatch> {
        let d = self.dim;
        if samples.is_empty() || !samples.len().is_multiple_of(d) {
            return Err(invalid("samples", "expected a non-empty row-major array"));
        }
        let count = samples.len() / d;
        let devs: Result<Vec<f64>> = grid
            .par_iter()
            .map(|z| {
                let mut acc = Complex64::new(0.0, 0.0);
                for x in samples.chunks_exact(d) {
                    let t: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
                    acc += Complex64::new(t.cos(), t.sin());
                }
                Ok((acc / count as f64 - self.mu_hat(z)?.value).norm())
            })
            .collect();
        let max_deviation = devs?.into_iter().fold(0.0, f64::max);
        let band = 5.0 / (count as f64).sqrt();
        Ok(CfMatch { max_deviation, band, count, passed: max_deviation <= band })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfMatch {
    pub max_deviation: f64,
    pub band: f64,
    pub count: usize,
    pub passed: bool,
}

fn small_ball_constant(cf: &(dyn Fn(&[f64]) -> Complex64 + Send + Sync), dim: usize, beta: f64) -> f64 {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            dirs.push(e);
        }
    }
    if dim >= 2 {
        dirs.extend(random_directions(dim, 16, 0));
    }
    let mut c: f64 = 0.0;
    for u in &dirs {
        for k in 0..=12 {
            let r = SMALL_BALL * 0.5f64.powi(k);
            let w: Vec<f64> = u.iter().map(|x| x * r).collect();
            let v = cf(&w);
            let l = if v.norm() > 0.0 { v.ln().norm() } else { f64::INFINITY };
            c = c.max(l / r.powf(beta));
        }
    }
    c
}

fn random_directions(dim: usize, count: usize, salt: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(salt, &labels!["directions", dim]));
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = norm(&v);
            v.into_iter().map(|x| x / n).collect()
        })
        .collect()
}

/// `points` values per axis in `[-half_width, half_width]`, plus the same
/// magnitudes along 8 fixed random directions when `dim >= 2`.
pub fn axis_grid(dim: usize, points: usize, half_width: f64) -> Vec<Vec<f64>> {
    let ts: Vec<f64> = if points == 1 {
        vec![0.0]
    } else {
        (0..points).map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64).collect()
    };
    let mut grid = Vec::new();
    let mut dirs: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    if dim >= 2 {
        dirs.extend(random_directions(dim, 8, 1));
    }
    for u in &dirs {
        for &t in &ts {
            grid.push(u.iter().map(|x| x * t).collect());
        }
    }
    grid
}

pub fn default_grid(dim: usize) -> Vec<Vec<f64>> {
    axis_grid(dim, 41, 5.0)
}
