//! Monte Carlo harness: q-averaged sup-norm errors, knot-count statistics,
//! and convergence tables.
//!
//! Per-path work runs in parallel, but every reduction happens in path-index
//! order with compensated summation, so results are bitwise identical for
//! any thread count. Each path draws its random stream from
//! `(master seed, path index)`.

use rayon::prelude::*;

use crate::dist::{tau11_mean, Tau11Dist};
use crate::error::Error;
use crate::path::{detect_knots_on_grid, sample_knot_sequence, GridPath};
use crate::rng::{stream_rng, STREAM_PATHS, STREAM_REFERENCE};
use crate::sde::{interpolated_euler, milstein_spline, SdeSpec};
use crate::spline::SplinePath;
use crate::Result;

/// Compensated (Kahan) accumulator; used everywhere sums must not depend on
/// how work was scheduled.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Monte Carlo estimate of `e_q = (E ||error||^q)^(1/q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub q: f64,
    pub e_q: f64,
    /// Mean of `error^q`.
    pub raw_mean: f64,
    /// Standard error of `raw_mean`.
    pub std_error: f64,
    pub reps: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ErrorEstimate {
    /// Aggregate per-path sup-norm errors, in the given (path) order.
    ///
    /// The 95% confidence interval comes from the delta method: the standard
    /// error of the mean of `error^q`, pushed through the `1/q` power.
    pub fn from_errors(errors: &[f64], q: f64) -> Result<Self> {
        if errors.len() < 2 {
            return Err(Error::config(format!(
                "at least 2 repetitions required, got {}",
                errors.len()
            )));
        }
        if !(q >= 1.0) {
            return Err(Error::config(format!("moment order q must be >= 1, got {q}")));
        }
        if let Some(i) = errors.iter().position(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::non_finite(format!(
                "path {i} produced error {}",
                errors[i]
            )));
        }
        let reps = errors.len();
        let mut acc = KahanSum::default();
        for &e in errors {
            acc.add(e.powf(q));
        }
        let raw_mean = acc.value() / reps as f64;
        let mut var_acc = KahanSum::default();
        for &e in errors {
            let d = e.powf(q) - raw_mean;
            var_acc.add(d * d);
        }
        let variance = var_acc.value() / (reps as f64 - 1.0);
        let std_error = (variance / reps as f64).sqrt();
        let e_q = raw_mean.powf(1.0 / q);
        let (ci_low, ci_high) = if raw_mean > 0.0 {
            let slope = raw_mean.powf(1.0 / q - 1.0) / q;
            let half = 1.96 * slope * std_error;
            ((e_q - half).max(0.0), e_q + half)
        } else {
            (0.0, 0.0)
        };
        Ok(ErrorEstimate {
            q,
            e_q,
            raw_mean,
            std_error,
            reps,
            ci_low,
            ci_high,
        })
    }
}

/// Ladder of approximation parameters for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Ladder {
    /// Accuracies for the free-knot method, positive and decreasing.
    Eps(Vec<f64>),
    /// Step counts for the Euler baseline; each must divide the grid size.
    StepCount(Vec<usize>),
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sde: SdeSpec,
    pub ladder: Ladder,
    pub reps: usize,
    pub grid_n: usize,
    pub q: f64,
    pub master_seed: u64,
    /// Worker threads; 0 picks the rayon default. Never affects results.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(Error::config(format!("reps must be >= 2, got {}", self.reps)));
        }
        if !(self.q >= 1.0) {
            return Err(Error::config(format!("q must be >= 1, got {}", self.q)));
        }
        if self.grid_n == 0 {
            return Err(Error::config("grid size must be positive"));
        }
        let h = 1.0 / self.grid_n as f64;
        match &self.ladder {
            Ladder::Eps(eps) => {
                if eps.is_empty() {
                    return Err(Error::config("eps ladder is empty"));
                }
                if eps.iter().any(|&e| !(e > 0.0)) {
                    return Err(Error::config("eps values must be positive"));
                }
                if eps.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(Error::config("eps ladder must be strictly decreasing"));
                }
                for &e in eps {
                    if h > e * e / crate::path::RESOLUTION_GUARD {
                        return Err(Error::config(format!(
                            "grid size {} too coarse for eps = {e}; need n >= {}",
                            self.grid_n,
                            (crate::path::RESOLUTION_GUARD / (e * e)).ceil()
                        )));
                    }
                }
            }
            Ladder::StepCount(ks) => {
                if ks.is_empty() {
                    return Err(Error::config("step-count ladder is empty"));
                }
                for &k in ks {
                    if k == 0 {
                        return Err(Error::config("step counts must be >= 1"));
                    }
                    if self.grid_n % k != 0 {
                        return Err(Error::config(format!(
                            "step count {k} does not divide the grid size {}",
                            self.grid_n
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parameter-set line placed in CSV comment headers; enough to
    /// reproduce the file (threads are omitted because they never change
    /// the output).
    pub fn comment_header(&self) -> String {
        let ladder = match &self.ladder {
            Ladder::Eps(eps) => format!(
                "eps={}",
                eps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            ),
            Ladder::StepCount(ks) => format!(
                "k={}",
                ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            ),
        };
        format!(
            "# seed={} {} {ladder} reps={} grid_n={} q={}",
            self.master_seed, self.sde, self.reps, self.grid_n, self.q
        )
    }
}

/// One approximation run: the free-knot method at a given accuracy or the
/// Euler baseline at a given step count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    FreeKnot { eps: f64 },
    Euler { k: usize },
}

/// Sup distance between a grid-sampled reference and a spline, probed at
/// every grid point plus both one-sided limits at each knot time, so jumps
/// at knots are captured.
pub fn sup_norm_error(
    reference: &[f64],
    approx: &SplinePath,
    grid: &GridPath,
    knot_times: &[f64],
) -> Result<f64> {
    if reference.len() != grid.values().len() {
        return Err(Error::config(format!(
            "reference has {} values for a grid of {}",
            reference.len(),
            grid.values().len()
        )));
    }
    let n = grid.n();
    let mut sup = 0.0f64;
    for i in 0..=n {
        let t = grid.time(i);
        sup = sup.max((reference[i] - approx.eval(t)?).abs());
    }
    let reference_at = |t: f64| -> f64 {
        let pos = t * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        reference[i] + (reference[i + 1] - reference[i]) * frac
    };
    for &tau in knot_times {
        if tau <= 0.0 || tau >= 1.0 {
            continue;
        }
        let r = reference_at(tau);
        sup = sup.max((r - approx.eval(tau)?).abs());
        sup = sup.max((r - approx.right_limit(tau)?).abs());
    }
    Ok(sup)
}

/// Estimate `e_q` for one method over independent paths.
///
/// Per path: simulate the grid path, build the approximation (grid-oracle
/// knots for the free-knot method, node times for Euler), and measure the
/// sup-norm distance to the reference solution. A non-finite per-path error
/// aborts the whole estimate with the offending path index.
pub fn estimate_eq(config: &ExperimentConfig, method: Method) -> Result<ErrorEstimate> {
    config.validate()?;
    match method {
        Method::FreeKnot { eps } => {
            let h = 1.0 / config.grid_n as f64;
            if h > eps * eps / crate::path::RESOLUTION_GUARD {
                return Err(Error::config(format!(
                    "grid size {} too coarse for eps = {eps}",
                    config.grid_n
                )));
            }
        }
        Method::Euler { k } => {
            if k == 0 || config.grid_n % k != 0 {
                return Err(Error::config(format!(
                    "step count {k} does not divide the grid size {}",
                    config.grid_n
                )));
            }
        }
    }
    let errors = run_paths(config, |i| per_path_error(config, method, i))?;
    ErrorEstimate::from_errors(&errors, config.q)
}

fn per_path_error(config: &ExperimentConfig, method: Method, path_index: usize) -> Result<f64> {
    let mut rng = stream_rng(config.master_seed, STREAM_PATHS + path_index as u64);
    let grid = GridPath::sample(config.grid_n, &mut rng)?;
    let reference = config.sde.reference_on_grid(&grid)?;
    let sde = config.sde.build();
    let err = match method {
        Method::FreeKnot { eps } => {
            let knots = detect_knots_on_grid(&grid, eps)?;
            let spline = milstein_spline(&sde, &knots)?;
            sup_norm_error(&reference, &spline, &grid, knots.knot_times())?
        }
        Method::Euler { k } => {
            let spline = interpolated_euler(&sde, k, &grid)?;
            let nodes: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
            sup_norm_error(&reference, &spline, &grid, &nodes)?
        }
    };
    if !err.is_finite() {
        return Err(Error::non_finite(format!(
            "path {path_index} produced a non-finite sup-norm error"
        )));
    }
    Ok(err)
}

/// Run per-path closures on a local thread pool and hand the results back
/// in path order. The first failing path (by index) wins error reporting.
fn run_paths<F>(config: &ExperimentConfig, work: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config(format!("could not build thread pool: {e}")))?;
    let results: Vec<Result<f64>> =
        pool.install(|| (0..config.reps).into_par_iter().map(|i| work(i)).collect());
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// Per-path normalized errors `(error / eps) / ||sigma||_sup`, in path
/// order, with `||sigma||_sup` taken along the same path's reference
/// solution. The pathwise limit law says these concentrate at 1 as `eps`
/// shrinks, so their spread must decay along an accuracy ladder.
pub fn pathwise_normalized_ratios(config: &ExperimentConfig, eps: f64) -> Result<Vec<f64>> {
    config.validate()?;
    let sde = config.sde.build();
    run_paths(config, |i| {
        let mut rng = stream_rng(config.master_seed, STREAM_PATHS + i as u64);
        let grid = GridPath::sample(config.grid_n, &mut rng)?;
        let reference = config.sde.reference_on_grid(&grid)?;
        let knots = detect_knots_on_grid(&grid, eps)?;
        let spline = milstein_spline(&sde, &knots)?;
        let err = sup_norm_error(&reference, &spline, &grid, knots.knot_times())?;
        let sigma_sup = reference
            .iter()
            .enumerate()
            .map(|(j, &x)| sde.diffusion(grid.time(j), x).abs())
            .fold(0.0f64, f64::max);
        if sigma_sup == 0.0 {
            return Err(Error::non_finite(format!(
                "path {i} has vanishing diffusion supremum"
            )));
        }
        Ok(err / eps / sigma_sup)
    })
}

/// Independent estimate of the diffusion-supremum constant
/// `(E ||sigma||_sup^q)^(1/q)` over exact reference paths, seeded from a
/// reserved stream block so it never shares randomness with the method
/// under test.
pub fn sigma_sup_constant(config: &ExperimentConfig) -> Result<f64> {
    config.validate()?;
    let sde = config.sde.build();
    let sups = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::config(format!("could not build thread pool: {e}")))?;
        let results: Vec<Result<f64>> = pool.install(|| {
            (0..config.reps)
                .into_par_iter()
                .map(|i| {
                    let mut rng =
                        stream_rng(config.master_seed, STREAM_REFERENCE + i as u64);
                    let grid = GridPath::sample(config.grid_n, &mut rng)?;
                    let x = config.sde.reference_on_grid(&grid)?;
                    let sup = x
                        .iter()
                        .enumerate()
                        .map(|(i, &xi)| sde.diffusion(grid.time(i), xi).abs())
                        .fold(0.0f64, f64::max);
                    Ok(sup)
                })
                .collect()
        });
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            out.push(r?);
        }
        out
    };
    let mut acc = KahanSum::default();
    for &s in &sups {
        acc.add(s.powf(config.q));
    }
    Ok((acc.value() / sups.len() as f64).powf(1.0 / config.q))
}

/// Summary of the interior-knot count over repeated distributional draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotCountStats {
    pub eps: f64,
    pub reps: usize,
    pub mean: f64,
    pub variance: f64,
    /// `eps^2 * mean`, the quantity with the parameter-free limit.
    pub scaled_mean: f64,
    /// Variance of `eps^2 * N`.
    pub scaled_variance: f64,
    /// The limit constant `1 / E(tau)`.
    pub reference_constant: f64,
}

/// Sample `N` (the interior knot count) `reps` times with the
/// distributional sampler and summarize.
pub fn knot_count_stats<R: rand::Rng + ?Sized>(
    eps: f64,
    reps: usize,
    rng: &mut R,
) -> Result<KnotCountStats> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    if reps < 2 {
        return Err(Error::config(format!("reps must be >= 2, got {reps}")));
    }
    let dist = Tau11Dist::default();
    let mut counts = Vec::with_capacity(reps);
    for _ in 0..reps {
        let k = sample_knot_sequence(eps, &dist, rng)?;
        counts.push(k.n_knots() as f64);
    }
    let mut acc = KahanSum::default();
    for &c in &counts {
        acc.add(c);
    }
    let mean = acc.value() / reps as f64;
    let mut var_acc = KahanSum::default();
    for &c in &counts {
        var_acc.add((c - mean) * (c - mean));
    }
    let variance = var_acc.value() / (reps as f64 - 1.0);
    let e2 = eps * eps;
    Ok(KnotCountStats {
        eps,
        reps,
        mean,
        variance,
        scaled_mean: e2 * mean,
        scaled_variance: e2 * e2 * variance,
        reference_constant: 1.0 / tau11_mean(),
    })
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    /// `eps` or `k`, depending on the ladder.
    pub parameter: f64,
    pub e_q: f64,
    pub std_error: f64,
    /// Free-knot rows: `(e_q / eps) / sigma_constant`, expected to drift
    /// toward 1. Euler rows: `e_q * sqrt(k / ln k)`, expected to level off.
    pub normalized: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Run the configured ladder and normalize each row by its limit law.
pub fn convergence_table(config: &ExperimentConfig) -> Result<Vec<TableRow>> {
    config.validate()?;
    match config.ladder.clone() {
        Ladder::Eps(ladder) => {
            let sigma_const = sigma_sup_constant(config)?;
            ladder
                .iter()
                .map(|&eps| {
                    let est = estimate_eq(config, Method::FreeKnot { eps })?;
                    let normalized = if est.e_q == 0.0 || sigma_const == 0.0 {
                        0.0
                    } else {
                        est.e_q / eps / sigma_const
                    };
                    Ok(TableRow {
                        parameter: eps,
                        e_q: est.e_q,
                        std_error: est.std_error,
                        normalized,
                        ci_low: est.ci_low,
                        ci_high: est.ci_high,
                    })
                })
                .collect()
        }
        Ladder::StepCount(ladder) => ladder
            .iter()
            .map(|&k| {
                let est = estimate_eq(config, Method::Euler { k })?;
                // the rate normalization is meaningful from k = 2 on
                let normalized = if k >= 2 {
                    est.e_q * (k as f64 / (k as f64).ln()).sqrt()
                } else {
                    0.0
                };
                Ok(TableRow {
                    parameter: k as f64,
                    e_q: est.e_q,
                    std_error: est.std_error,
                    normalized,
                    ci_low: est.ci_low,
                    ci_high: est.ci_high,
                })
            })
            .collect(),
    }
}

/// Floats in CSV artifacts carry 17 significant digits, enough to survive a
/// parse/print round trip bit-exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV for a convergence table; `ratio` is the free-knot normalization,
/// `normalized` the Euler one, per the header row.
pub fn convergence_csv(config: &ExperimentConfig, rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(&config.comment_header());
    out.push('\n');
    let (param, norm) = match config.ladder {
        Ladder::Eps(_) => ("eps", "ratio"),
        Ladder::StepCount(_) => ("k", "normalized"),
    };
    out.push_str(&format!(
        "{param},e_q,stderr,{norm},ci_low,ci_high,reps,seed\n"
    ));
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_float(r.parameter),
            format_float(r.e_q),
            format_float(r.std_error),
            format_float(r.normalized),
            format_float(r.ci_low),
            format_float(r.ci_high),
            config.reps,
            config.master_seed
        ));
    }
    out
}

/// CSV for knot-count statistics, one row per accuracy.
pub fn knot_stats_csv(stats: &[KnotCountStats], master_seed: u64) -> String {
    let mut out = String::new();
    let eps_list = stats
        .iter()
        .map(|s| s.eps.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let reps = stats.first().map(|s| s.reps).unwrap_or(0);
    out.push_str(&format!("# seed={master_seed} eps={eps_list} reps={reps}\n"));
    out.push_str("eps,reps,mean_n,var_n,eps2_mean_n,var_eps2_n,ref_constant,seed\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_float(s.eps),
            s.reps,
            format_float(s.mean),
            format_float(s.variance),
            format_float(s.scaled_mean),
            format_float(s.scaled_variance),
            format_float(s.reference_constant),
            master_seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::spline::Segment;

    #[test]
    fn kahan_sum_handles_small_terms() {
        let mut acc = KahanSum::default();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        assert!(acc.value() > 1.0);
    }

    #[test]
    fn estimate_from_constant_sample() {
        let c = 0.37;
        let est = ErrorEstimate::from_errors(&[c; 50], 2.0).unwrap();
        assert!((est.e_q - c).abs() < 1e-15);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.ci_low, est.e_q);
        assert_eq!(est.ci_high, est.e_q);
        assert_eq!(est.reps, 50);
    }

    #[test]
    fn estimate_rejects_degenerate_input() {
        assert!(ErrorEstimate::from_errors(&[1.0], 2.0).is_err());
        assert!(ErrorEstimate::from_errors(&[1.0, f64::NAN], 2.0).is_err());
        assert!(ErrorEstimate::from_errors(&[1.0, -1.0], 2.0).is_err());
        assert!(ErrorEstimate::from_errors(&[1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn estimate_zero_errors_gives_zero() {
        let est = ErrorEstimate::from_errors(&[0.0; 10], 2.0).unwrap();
        assert_eq!(est.e_q, 0.0);
        assert_eq!(est.ci_low, 0.0);
        assert_eq!(est.ci_high, 0.0);
    }

    #[test]
    fn moment_ordering_on_fixed_sample() {
        let errors: Vec<f64> = (1..=100).map(|i| 0.01 * i as f64).collect();
        let e1 = ErrorEstimate::from_errors(&errors, 1.0).unwrap().e_q;
        let e2 = ErrorEstimate::from_errors(&errors, 2.0).unwrap().e_q;
        let e4 = ErrorEstimate::from_errors(&errors, 4.0).unwrap().e_q;
        assert!(e1 <= e2 && e2 <= e4, "e1 {e1}, e2 {e2}, e4 {e4}");
    }

    #[test]
    fn ci_brackets_estimate() {
        let mut rng = stream_rng(40, 0);
        let errors: Vec<f64> = (0..200)
            .map(|_| rand::Rng::gen_range(&mut rng, 0.1..0.3))
            .collect();
        let est = ErrorEstimate::from_errors(&errors, 2.0).unwrap();
        assert!(est.ci_low <= est.e_q && est.e_q <= est.ci_high);
        assert!(est.ci_low > 0.0);
    }

    fn flat_grid(n: usize) -> GridPath {
        GridPath::from_values(vec![0.0; n + 1]).unwrap()
    }

    #[test]
    fn sup_norm_zero_when_spline_matches_reference() {
        let grid = flat_grid(10);
        let reference = vec![0.0; 11];
        let spline = SplinePath::new(
            0.0,
            vec![Segment { t_start: 0.0, t_end: 1.0, y_start: 0.0, y_end: 0.0 }],
        )
        .unwrap();
        assert_eq!(sup_norm_error(&reference, &spline, &grid, &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn sup_norm_constant_offset() {
        let grid = flat_grid(10);
        let reference = vec![0.0; 11];
        let c = -0.42;
        let spline = SplinePath::new(
            c,
            vec![Segment { t_start: 0.0, t_end: 1.0, y_start: c, y_end: c }],
        )
        .unwrap();
        assert_eq!(
            sup_norm_error(&reference, &spline, &grid, &[0.0, 1.0]).unwrap(),
            c.abs()
        );
    }

    #[test]
    fn sup_norm_sees_jump_right_limit() {
        // Two segments (0 -> 1], (-2 -> 0]: the sup against the zero
        // reference is 2, visible only through the right limit at the jump.
        let grid = flat_grid(10);
        let reference = vec![0.0; 11];
        let spline = SplinePath::new(
            0.0,
            vec![
                Segment { t_start: 0.0, t_end: 0.5, y_start: 0.0, y_end: 1.0 },
                Segment { t_start: 0.5, t_end: 1.0, y_start: -2.0, y_end: 0.0 },
            ],
        )
        .unwrap();
        let sup = sup_norm_error(&reference, &spline, &grid, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(sup, 2.0);
    }

    #[test]
    fn sup_norm_rejects_misaligned_reference() {
        let grid = flat_grid(10);
        let spline = SplinePath::new(
            0.0,
            vec![Segment { t_start: 0.0, t_end: 1.0, y_start: 0.0, y_end: 0.0 }],
        )
        .unwrap();
        assert!(matches!(
            sup_norm_error(&[0.0; 5], &spline, &grid, &[]),
            Err(Error::Config(_))
        ));
    }

    fn small_config(sde: SdeSpec) -> ExperimentConfig {
        ExperimentConfig {
            sde,
            ladder: Ladder::Eps(vec![0.2]),
            reps: 20,
            grid_n: 2000,
            q: 2.0,
            master_seed: 5,
            threads: 1,
        }
    }

    #[test]
    fn estimate_eq_zero_for_degenerate_sde() {
        // sigma == 0 and constant drift: every scheme is exact at nodes and
        // the reference is linear, so e_q is 0 up to roundoff for Euler and
        // exactly 0 for the zero equation.
        let config = small_config(SdeSpec::Gbm { mu: 0.0, sigma0: 0.0, x0: 1.0 });
        let est = estimate_eq(&config, Method::FreeKnot { eps: 0.2 }).unwrap();
        assert_eq!(est.e_q, 0.0);
        let est = estimate_eq(&config, Method::Euler { k: 10 }).unwrap();
        assert_eq!(est.e_q, 0.0);
    }

    #[test]
    fn estimate_eq_is_thread_count_invariant() {
        let mut config = small_config(SdeSpec::Gbm { mu: 0.1, sigma0: 0.5, x0: 1.0 });
        let a = estimate_eq(&config, Method::FreeKnot { eps: 0.2 }).unwrap();
        config.threads = 4;
        let b = estimate_eq(&config, Method::FreeKnot { eps: 0.2 }).unwrap();
        assert_eq!(a.e_q.to_bits(), b.e_q.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn estimate_eq_guards_parameters() {
        let config = small_config(SdeSpec::Gbm { mu: 0.1, sigma0: 0.5, x0: 1.0 });
        assert!(estimate_eq(&config, Method::FreeKnot { eps: 0.01 }).is_err());
        assert!(estimate_eq(&config, Method::Euler { k: 7 }).is_err());
    }

    #[test]
    fn knot_count_stats_basics() {
        let mut rng = stream_rng(41, 0);
        let s = knot_count_stats(1.0, 2000, &mut rng).unwrap();
        // Most paths have no interior knot at eps = 1 (P = K(1) ~ 0.73).
        assert!(s.mean < 1.0);
        assert!((s.reference_constant - 0.586_471_19).abs() < 1e-7);
        assert!(knot_count_stats(0.0, 10, &mut rng).is_err());
        assert!(knot_count_stats(0.5, 1, &mut rng).is_err());
    }

    #[test]
    fn config_validation_catches_bad_ladders() {
        let base = small_config(SdeSpec::Gbm { mu: 0.1, sigma0: 0.5, x0: 1.0 });
        let mut c = base.clone();
        c.ladder = Ladder::Eps(vec![]);
        assert!(c.validate().is_err());
        c.ladder = Ladder::Eps(vec![0.1, 0.2]);
        assert!(c.validate().is_err());
        c.ladder = Ladder::Eps(vec![0.2, 0.05]); // 0.05 needs n >= 20000
        assert!(c.validate().is_err());
        c.ladder = Ladder::StepCount(vec![3]);
        assert!(c.validate().is_err());
        c.ladder = Ladder::StepCount(vec![10, 100]);
        assert!(c.validate().is_ok());
        c.reps = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_floats_have_17_significant_digits() {
        let s = format_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        let parsed: f64 = s.parse().unwrap();
        assert_eq!(parsed.to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn csv_layout_and_header() {
        let config = small_config(SdeSpec::Gbm { mu: 0.1, sigma0: 0.5, x0: 1.0 });
        let rows = vec![TableRow {
            parameter: 0.2,
            e_q: 0.1,
            std_error: 0.01,
            normalized: 0.9,
            ci_low: 0.08,
            ci_high: 0.12,
        }];
        let csv = convergence_csv(&config, &rows);
        let mut lines = csv.lines();
        let comment = lines.next().unwrap();
        assert!(comment.starts_with("# seed=5"));
        assert!(comment.contains("sde=gbm"));
        assert!(comment.contains("eps=0.2"));
        assert_eq!(
            lines.next().unwrap(),
            "eps,e_q,stderr,ratio,ci_low,ci_high,reps,seed"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 8);
    }
}
