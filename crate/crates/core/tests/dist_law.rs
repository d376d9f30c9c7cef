//! Law-level checks of the stopping-time sampler: moments against the
//! closed-form mean, and the empirical CDF against the exact CDF.

use freeknot::dist::{tau11_mean, Tau11Dist};
use freeknot::rng::stream_rng;
use freeknot::stats::{
    dkw_band, ks_statistic_one_sample, mean_and_variance, KS_CRITICAL_1PCT,
};

#[test]
fn sample_mean_matches_closed_form() {
    let d = Tau11Dist::default();
    let mut rng = stream_rng(1001, 0);
    let n = 1_000_000usize;
    let samples: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    assert!(samples.iter().all(|&x| x > 0.0));
    let (mean, var) = mean_and_variance(&samples);
    let se = (var / n as f64).sqrt();
    let target = tau11_mean();
    assert!(
        (mean - target).abs() < 3.0 * se,
        "sample mean {mean} vs {target} (se {se})"
    );
}

#[test]
fn sample_distribution_passes_ks_at_one_percent() {
    let d = Tau11Dist::default();
    let mut rng = stream_rng(1002, 0);
    let n = 100_000usize;
    let samples: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    let stat = ks_statistic_one_sample(&samples, |x| d.cdf(x));
    let critical = KS_CRITICAL_1PCT / (n as f64).sqrt();
    assert!(stat < critical, "KS statistic {stat} vs critical {critical}");
}

#[test]
fn empirical_cdf_stays_in_dkw_band() {
    let d = Tau11Dist::default();
    let mut rng = stream_rng(1003, 0);
    let n = 100_000usize;
    let samples: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    // sup |F_n - F| is exactly the one-sample KS statistic.
    let stat = ks_statistic_one_sample(&samples, |x| d.cdf(x));
    let band = dkw_band(0.01, n);
    assert!(stat < band, "empirical CDF leaves the 99% DKW band: {stat} vs {band}");
}
