//! Brownian paths on a uniform grid and free-knot sequences.
//!
//! Knots are placed at the stopping times where the path's deviation from
//! the chord to its running endpoint first exceeds the accuracy `eps`; the
//! piecewise-linear interpolant through those knots then misses the path by
//! exactly `eps` on every completed subinterval. Two regimes produce knot
//! sequences:
//!
//! * *grid oracle* — exact detection on a simulated grid path, walking the
//!   grid and testing the sup deviation from the moving chord;
//! * *distributional* — direct sampling of the interval lengths from the
//!   scaled first-passage law (`xi = eps^2 * tau`) together with standard
//!   Gaussian increments, with no underlying grid path at all.
//!
//! Grid detection comes in two implementations: a quadratic scan that serves
//! as the trusted reference, and an amortized monotone-hull version used for
//! experiments (the sup deviation from a chord is always attained at a
//! vertex of the convex hull of the points seen so far).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dist::Tau11Dist;
use crate::error::Error;
use crate::Result;

/// Ratio required between `eps^2` and the grid step before grid detection
/// is considered trustworthy. The mean knot spacing is about
/// `1.705 * eps^2`, so this gives ~85 grid points per typical interval.
pub const RESOLUTION_GUARD: f64 = 50.0;

/// Brownian path sampled on the uniform grid `i/n`, `i = 0..=n`, of `[0,1]`.
#[derive(Debug, Clone)]
pub struct GridPath {
    step: f64,
    values: Vec<f64>,
}

impl GridPath {
    /// Sample a path of `n` i.i.d. Gaussian increments with variance `1/n`.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid size must be at least 1"));
        }
        let h = 1.0 / n as f64;
        let scale = h.sqrt();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut w = 0.0;
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            w += scale * z;
            values.push(w);
        }
        Ok(GridPath { step: h, values })
    }

    /// Wrap explicit grid values (for synthetic paths in tests and tools).
    /// `values[0]` must be 0 and there must be at least one step.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("a grid path needs at least two points"));
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("a Brownian path starts at 0"));
        }
        let n = values.len() - 1;
        Ok(GridPath {
            step: 1.0 / n as f64,
            values,
        })
    }

    /// Number of grid steps.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid spacing `1/n`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Time of grid index `i`, exactly 1.0 at `i = n`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.n() as f64
    }

    /// Largest one-step increment magnitude over steps `i0+1 ..= i1`.
    pub fn max_step(&self, i0: usize, i1: usize) -> f64 {
        (i0 + 1..=i1)
            .map(|i| (self.values[i] - self.values[i - 1]).abs())
            .fold(0.0, f64::max)
    }

    /// Sup deviation of interior grid points from the chord through
    /// `(t_{i0}, W_{i0})` and `(t_{i1}, W_{i1})`; zero for adjacent indices.
    ///
    /// Straightforward scan over the interior; this is the reference the
    /// hull-based detection is tested against.
    pub fn max_chord_deviation(&self, i0: usize, i1: usize) -> Result<f64> {
        if i0 >= i1 || i1 > self.n() {
            return Err(Error::invalid(format!(
                "chord indices must satisfy i0 < i1 <= n, got ({i0}, {i1}) with n = {}",
                self.n()
            )));
        }
        let mut max = 0.0f64;
        for p in i0 + 1..i1 {
            max = max.max(self.chord_deviation(i0, i1, p).abs());
        }
        Ok(max)
    }

    /// Signed deviation of point `p` from the chord `i0 -> i1`.
    fn chord_deviation(&self, i0: usize, i1: usize, p: usize) -> f64 {
        let (t0, t1, tp) = (self.time(i0), self.time(i1), self.time(p));
        let (v0, v1) = (self.values[i0], self.values[i1]);
        self.values[p] - (v0 + (v1 - v0) * ((tp - t0) / (t1 - t0)))
    }
}

/// How a knot sequence was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Interval lengths drawn from the scaled first-passage law.
    Distributional,
    /// Stopping times detected on a simulated grid path.
    GridOracle,
}

/// Free-knot skeleton of a Brownian path: the knot times
/// `0 = tau_0 < tau_1 < ... < tau_N < tau_{N+1} = 1`, the path values at
/// those times, and the accuracy `eps` they were built for. `N` (the number
/// of interior knots, strictly before time 1) is `n_knots`.
#[derive(Debug, Clone)]
pub struct KnotPath {
    eps: f64,
    knot_times: Vec<f64>,
    knot_values: Vec<f64>,
    regime: Regime,
    grid_indices: Option<Vec<usize>>,
}

impl KnotPath {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn knot_times(&self) -> &[f64] {
        &self.knot_times
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Number of interior knots.
    pub fn n_knots(&self) -> usize {
        self.knot_times.len() - 2
    }

    /// Grid indices of all knots (including both endpoints), present only
    /// in the grid-oracle regime.
    pub fn grid_indices(&self) -> Option<&[usize]> {
        self.grid_indices.as_deref()
    }

    /// Piecewise-linear interpolation of the path values at the knots,
    /// exact at knot times. Defined on `[0, 1]`.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!(
                "interpolation time must lie in [0, 1], got {t}"
            )));
        }
        let idx = self.knot_times.partition_point(|&tau| tau < t);
        if idx < self.knot_times.len() && self.knot_times[idx] == t {
            return Ok(self.knot_values[idx]);
        }
        let (t0, t1) = (self.knot_times[idx - 1], self.knot_times[idx]);
        let (v0, v1) = (self.knot_values[idx - 1], self.knot_values[idx]);
        Ok(v0 + (v1 - v0) * ((t - t0) / (t1 - t0)))
    }
}

/// Detect the knot sequence of a grid path at accuracy `eps`.
///
/// Starting from the previous knot, the next knot is the first grid index
/// whose chord deviation strictly exceeds `eps` (ties at exactly `eps` do
/// not stop). A final knot at time 1 closes the sequence; an exceedance
/// first seen exactly at the horizon is folded into that final knot, since
/// interior knots lie strictly before 1.
///
/// Requires the grid to resolve the knot scale: `h <= eps^2 / 50`.
pub fn detect_knots_on_grid(path: &GridPath, eps: f64) -> Result<KnotPath> {
    check_eps(eps)?;
    if path.step() > eps * eps / RESOLUTION_GUARD {
        return Err(Error::config(format!(
            "grid step {} too coarse for eps = {eps}; need h <= eps^2/{RESOLUTION_GUARD}",
            path.step()
        )));
    }
    Ok(detect_hull(path, eps))
}

/// Hull-based detection without the resolution guard, for synthetic paths.
pub fn detect_knots_on_grid_unchecked(path: &GridPath, eps: f64) -> Result<KnotPath> {
    check_eps(eps)?;
    Ok(detect_hull(path, eps))
}

/// Reference detection using the quadratic chord scan, without the guard.
/// Slow; used to validate the hull implementation.
pub fn detect_knots_on_grid_naive(path: &GridPath, eps: f64) -> Result<KnotPath> {
    check_eps(eps)?;
    let mut indices = vec![0usize];
    let mut start = 0usize;
    let n = path.n();
    let mut j = start + 1;
    while j <= n {
        let dev = path.max_chord_deviation(start, j)?;
        if dev > eps && j < n {
            indices.push(j);
            start = j;
            j = start + 1;
        } else {
            j += 1;
        }
    }
    indices.push(n);
    Ok(knot_path_from_indices(path, eps, indices))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

fn knot_path_from_indices(path: &GridPath, eps: f64, indices: Vec<usize>) -> KnotPath {
    let knot_times = indices.iter().map(|&i| path.time(i)).collect();
    let knot_values = indices.iter().map(|&i| path.values()[i]).collect();
    KnotPath {
        eps,
        knot_times,
        knot_values,
        regime: Regime::GridOracle,
        grid_indices: Some(indices),
    }
}

fn detect_hull(path: &GridPath, eps: f64) -> KnotPath {
    let n = path.n();
    let mut indices = vec![0usize];
    let mut tracker = ChordTracker::new(path);
    let mut start = 0usize;
    tracker.reset(start);
    let mut j = start + 1;
    while j <= n {
        let dev = tracker.max_deviation(j);
        if dev > eps && j < n {
            indices.push(j);
            start = j;
            tracker.reset(start);
            j = start + 1;
        } else {
            tracker.push_interior(j);
            j += 1;
        }
    }
    indices.push(n);
    knot_path_from_indices(path, eps, indices)
}

/// Incremental chord-deviation maximizer for one detection interval.
///
/// Maintains the upper and lower monotone hulls of the interior points seen
/// so far; for a query endpoint the extreme signed deviations are attained
/// at hull vertices, located by binary search on the (concave resp. convex)
/// deviation sequence along each hull. Candidate deviations are evaluated
/// with the same formula as the quadratic scan, so both implementations
/// return identical values on identical inputs.
struct ChordTracker<'a> {
    path: &'a GridPath,
    start: usize,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

impl<'a> ChordTracker<'a> {
    fn new(path: &'a GridPath) -> Self {
        ChordTracker {
            path,
            start: 0,
            upper: Vec::new(),
            lower: Vec::new(),
        }
    }

    fn reset(&mut self, start: usize) {
        self.start = start;
        self.upper.clear();
        self.lower.clear();
    }

    /// Cross product of `o -> a` with `o -> b`; positive for a left turn.
    fn cross(&self, o: usize, a: usize, b: usize) -> f64 {
        let v = self.path.values();
        let (to, ta, tb) = (self.path.time(o), self.path.time(a), self.path.time(b));
        (ta - to) * (v[b] - v[o]) - (v[a] - v[o]) * (tb - to)
    }

    /// Add a point that has become interior (the previous query endpoint).
    /// Collinear vertices are kept so no extreme-value candidate is lost.
    fn push_interior(&mut self, p: usize) {
        while self.upper.len() >= 2 {
            let a = self.upper[self.upper.len() - 2];
            let b = self.upper[self.upper.len() - 1];
            if self.cross(a, b, p) > 0.0 {
                self.upper.pop();
            } else {
                break;
            }
        }
        self.upper.push(p);
        while self.lower.len() >= 2 {
            let a = self.lower[self.lower.len() - 2];
            let b = self.lower[self.lower.len() - 1];
            if self.cross(a, b, p) < 0.0 {
                self.lower.pop();
            } else {
                break;
            }
        }
        self.lower.push(p);
    }

    /// Max absolute deviation of the interior points from the chord
    /// `start -> end`.
    fn max_deviation(&self, end: usize) -> f64 {
        if self.upper.is_empty() {
            return 0.0;
        }
        let f = |p: usize| self.path.chord_deviation(self.start, end, p);
        let up = Self::search_extremum(&self.upper, |p| f(p));
        let lo = Self::search_extremum(&self.lower, |p| -f(p));
        up.abs().max(lo.abs())
    }

    /// Max of `g` over the hull vertices. `g` along a hull is concave up to
    /// roundoff; binary search on neighbor differences, then a small window
    /// around the landing index absorbs any ulp-scale non-concavity.
    fn search_extremum(hull: &[usize], g: impl Fn(usize) -> f64) -> f64 {
        let m = hull.len();
        let mut lo = 0usize;
        let mut hi = m - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if g(hull[mid]) < g(hull[mid + 1]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let from = lo.saturating_sub(2);
        let to = (lo + 2).min(m - 1);
        (from..=to).map(|k| g(hull[k])).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Draw a free-knot sequence directly from the law of the stopping times.
///
/// Interval lengths are `eps^2` times i.i.d. first-passage draws; interior
/// increments are `Lambda * sqrt(xi)` with `Lambda` standard Gaussian,
/// independent of all lengths. Knots accumulate while the running sum stays
/// strictly below 1. The final increment over `[tau_N, 1]` is drawn
/// `N(0, 1 - tau_N)`, ignoring the conditioning on non-exceedance before
/// time 1 (the conditional law is not available in closed form); law-level
/// tests therefore look at the first interval only.
pub fn sample_knot_sequence<R: Rng + ?Sized>(
    eps: f64,
    dist: &Tau11Dist,
    rng: &mut R,
) -> Result<KnotPath> {
    check_eps(eps)?;
    let mut knot_times = vec![0.0];
    let mut knot_values = vec![0.0];
    let mut sum = 0.0;
    loop {
        let xi = eps * eps * dist.sample(rng);
        if sum + xi >= 1.0 {
            break;
        }
        sum += xi;
        let lambda: f64 = rng.sample(StandardNormal);
        let w = knot_values.last().unwrap() + lambda * xi.sqrt();
        knot_times.push(sum);
        knot_values.push(w);
    }
    let z: f64 = rng.sample(StandardNormal);
    let w_end = knot_values.last().unwrap() + z * (1.0 - sum).sqrt();
    knot_times.push(1.0);
    knot_values.push(w_end);
    Ok(KnotPath {
        eps,
        knot_times,
        knot_values,
        regime: Regime::Distributional,
        grid_indices: None,
    })
}
