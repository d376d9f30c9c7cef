//! Statistical checks used by the law-level verification suites and the CLI
//! self-tests. Not a general hypothesis-testing toolkit; just the few
//! statistics the experiments need.

/// Asymptotic 1% critical point of the Kolmogorov-Smirnov statistic,
/// i.e. the `x` with `K(x) = 0.99`. Frozen from standard tables so the
/// checks stay independent of this crate's own CDF code.
pub const KS_CRITICAL_1PCT: f64 = 1.6276;

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - F|`.
///
/// Sorts a copy of the sample internally.
pub fn ks_statistic_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("sample contains NaN"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_n - G_m|`.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("sample contains NaN"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("sample contains NaN"));
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        // step past all observations tied at the current value before
        // comparing the empirical CDFs
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Two-sample KS rejection threshold at the given critical constant:
/// `c * sqrt((n + m) / (n m))`.
pub fn ks_two_sample_threshold(c: f64, n: usize, m: usize) -> f64 {
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz confidence band:
/// `sqrt(ln(2 / alpha) / (2 n))`.
pub fn dkw_band(alpha: f64, n: usize) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Sample Pearson correlation coefficient.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Sample mean and unbiased variance in one pass.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 rational
/// approximation of erf; absolute error below 1.5e-7, plenty for
/// KS-style comparisons.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_one_sample_detects_exact_fit_and_shift() {
        // Sample equal to uniform quantiles fits U(0,1) closely.
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 1.0 / n as f64);
        // Against a shifted CDF the statistic is large.
        let d_shift = ks_statistic_one_sample(&xs, |x| (x - 0.2).clamp(0.0, 1.0));
        assert!(d_shift > 0.19);
    }

    #[test]
    fn ks_two_sample_zero_for_identical_samples() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_statistic_two_sample(&xs, &xs), 0.0);
    }

    #[test]
    fn dkw_band_shrinks() {
        assert!(dkw_band(0.01, 100_000) < dkw_band(0.01, 1000));
        // n = 1e5 at 99%: sqrt(ln(200)/2e5).
        assert!((dkw_band(0.01, 100_000) - (200.0f64.ln() / 2e5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn correlation_of_identical_series_is_one() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert!((pearson_correlation(&xs, &xs) - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson_correlation(&xs, &neg) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-7);
        assert!((normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        assert!((normal_cdf(-1.0) - 0.158655).abs() < 1e-6);
    }
}
