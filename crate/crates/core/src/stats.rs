//! Statistical helpers: Kolmogorov–Smirnov tests and summaries.

use statrs::function::erf::erfc;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail of the standard normal, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges fast for small lambda.
        let pi2 = std::f64::consts::PI.powi(2);
        let y = -pi2 / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 0..50 {
            let j = (2 * k + 1) as f64;
            cdf += (y * j * j).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for k in 1..101 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic coefficient c(alpha) with P(sqrt(n) D > c) = alpha.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample critical value at level `alpha`.
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    ks_coefficient(alpha) / (n as f64).sqrt()
}

/// Two-sample critical value at level `alpha`.
pub fn ks_critical_two(alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_eff: f64,
}

fn p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    KsResult { statistic: d, p_value: p_value(d, n), n_eff: n }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    ks_two_sample_tol(a, b, 0.0)
}

/// Two-sample KS statistic where values within `tol` of each other count as
/// tied: `sup_x max(F_a(x) - F_b(x + tol), F_b(x) - F_a(x + tol))`.
/// With `tol = 0` this is the ordinary statistic.
pub fn ks_two_sample_tol(a: &[f64], b: &[f64], tol: f64) -> KsResult {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let ecdf = |xs: &[f64], x: f64| xs.partition_point(|&v| v <= x) as f64 / xs.len() as f64;
    let mut d: f64 = 0.0;
    for &x in xa.iter().chain(xb.iter()) {
        d = d.max(ecdf(&xa, x) - ecdf(&xb, x + tol));
        d = d.max(ecdf(&xb, x) - ecdf(&xa, x + tol));
    }
    let d = d.max(0.0);
    let n_eff = na * nb / (na + nb);
    KsResult { statistic: d, p_value: p_value(d, n_eff), n_eff }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Linear-interpolated quantile of unsorted data, `q` in [0, 1].
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[hi] * w
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_branches_agree() {
        // both series are valid near the switch point
        let lam = 1.18;
        let pi2 = std::f64::consts::PI.powi(2);
        let mut cdf = 0.0;
        for k in 0..50 {
            let j = (2 * k + 1) as f64;
            cdf += (-pi2 * j * j / (8.0 * lam * lam)).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lam;
        assert!((1.0 - cdf - kolmogorov_sf(lam)).abs() < 1e-12);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 2e-4);
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 2e-4);
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_tolerance_absorbs_tiny_offsets() {
        let a = vec![1.0; 50];
        let b = vec![1.0 + 1e-12; 50];
        assert_eq!(ks_two_sample(&a, &b).statistic, 1.0);
        assert_eq!(ks_two_sample_tol(&a, &b, 1e-9).statistic, 0.0);
    }

    #[test]
    fn uniform_grid_one_sample() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!((r.statistic - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (c, s) = linear_fit(&x, &y);
        assert!((c - 1.0).abs() < 1e-14 && (s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn normal_tails() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        let v = normal_cdf(1.959963984540054);
        assert!((v - 0.975).abs() < 1e-10, "{v}");
        assert!(normal_sf(30.0) > 0.0);
    }
}
