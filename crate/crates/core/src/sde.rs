//! Scalar SDEs and the numerical schemes built on the free-knot skeleton.
//!
//! An equation `dX = a(t, X) dt + sigma(t, X) dW` is described by three
//! coefficient functions (drift, diffusion, and the state derivative of the
//! diffusion) plus an initial value. Coefficients are expected to satisfy
//! the usual Lipschitz/differentiability conditions for a unique strong
//! solution; that contract is documented, not enforced, but
//! [`max_diffusion_derivative_mismatch`] spot-checks the supplied derivative
//! against finite differences.
//!
//! Schemes:
//!
//! * [`milstein_step`] / [`milstein_at_knots`] — the Milstein recursion over
//!   the (random) knot intervals;
//! * [`milstein_spline`] — the implementable piecewise-linear method that
//!   freezes the coefficients at the left knot and follows the interpolated
//!   Brownian path across each interval (jumps at knots are expected);
//! * [`milstein_dense`] — the continuous Milstein variant evaluated on the
//!   full grid, coinciding with the knot recursion at knot times; used for
//!   validation only;
//! * [`interpolated_euler`] — the classical fixed-step baseline;
//! * closed-form references for geometric Brownian motion and the
//!   Ornstein-Uhlenbeck process, plus a full-grid Milstein reference for
//!   equations without a closed form.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::path::{GridPath, KnotPath, Regime};
use crate::spline::{Segment, SplinePath};
use crate::Result;

type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type InitialSampler = Arc<dyn Fn(&mut dyn rand::RngCore) -> f64 + Send + Sync>;

/// A scalar SDE given by drift, diffusion, and the diffusion's state
/// derivative. Coefficient functions must be re-entrant; schemes may
/// evaluate many paths concurrently.
#[derive(Clone)]
pub struct ScalarSde {
    drift: Coefficient,
    diffusion: Coefficient,
    diffusion_dx: Coefficient,
    x0: f64,
    x0_sampler: Option<InitialSampler>,
}

impl fmt::Debug for ScalarSde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarSde").field("x0", &self.x0).finish()
    }
}

impl ScalarSde {
    pub fn new(
        drift: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        diffusion_dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        x0: f64,
    ) -> Self {
        ScalarSde {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            diffusion_dx: Arc::new(diffusion_dx),
            x0,
            x0_sampler: None,
        }
    }

    /// Replace the deterministic initial value by a sampler (random initial
    /// conditions are allowed as long as all moments are finite).
    pub fn with_initial_sampler(
        mut self,
        sampler: impl Fn(&mut dyn rand::RngCore) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.x0_sampler = Some(Arc::new(sampler));
        self
    }

    /// dX = mu X dt + sigma0 X dW.
    pub fn gbm(mu: f64, sigma0: f64, x0: f64) -> Self {
        ScalarSde::new(
            move |_t, x| mu * x,
            move |_t, x| sigma0 * x,
            move |_t, _x| sigma0,
            x0,
        )
    }

    /// dX = theta (level - X) dt + sigma0 dW (additive noise).
    pub fn ornstein_uhlenbeck(theta: f64, level: f64, sigma0: f64, x0: f64) -> Self {
        ScalarSde::new(
            move |_t, x| theta * (level - x),
            move |_t, _x| sigma0,
            move |_t, _x| 0.0,
            x0,
        )
    }

    /// dX = rate X dt + (c1 + c2 sin X) dW: bounded, genuinely nonlinear
    /// diffusion with no closed-form solution.
    pub fn sin_diffusion(rate: f64, c1: f64, c2: f64, x0: f64) -> Self {
        ScalarSde::new(
            move |_t, x| rate * x,
            move |_t, x| c1 + c2 * x.sin(),
            move |_t, x| c2 * x.cos(),
            x0,
        )
    }

    pub fn drift(&self, t: f64, x: f64) -> f64 {
        (self.drift)(t, x)
    }

    pub fn diffusion(&self, t: f64, x: f64) -> f64 {
        (self.diffusion)(t, x)
    }

    pub fn diffusion_dx(&self, t: f64, x: f64) -> f64 {
        (self.diffusion_dx)(t, x)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Initial state: the sampler if one was installed, otherwise `x0`.
    pub fn initial_value<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.x0_sampler {
            Some(s) => s(rng),
            None => self.x0,
        }
    }
}

/// Largest relative mismatch between the supplied diffusion derivative and
/// a central finite difference of the diffusion, over a uniform sample of
/// the given `(t, x)` box. A guard against inconsistently supplied
/// coefficients; bundled equations stay below 1e-6.
pub fn max_diffusion_derivative_mismatch(
    sde: &ScalarSde,
    t_range: (f64, f64),
    x_range: (f64, f64),
    samples: usize,
) -> f64 {
    let fd_step = 1e-6;
    let mut worst = 0.0f64;
    for it in 0..samples {
        let t = t_range.0 + (t_range.1 - t_range.0) * it as f64 / (samples - 1) as f64;
        for ix in 0..samples {
            let x = x_range.0 + (x_range.1 - x_range.0) * ix as f64 / (samples - 1) as f64;
            let fd = (sde.diffusion(t, x + fd_step) - sde.diffusion(t, x - fd_step)) / (2.0 * fd_step);
            let exact = sde.diffusion_dx(t, x);
            let scale = exact.abs().max(1.0);
            worst = worst.max((fd - exact).abs() / scale);
        }
    }
    worst
}

/// One Milstein step from `(t_prev, x_prev)` over `(dt, dw)`:
/// `x + a dt + sigma dw + (sigma sigma')/2 (dw^2 - dt)`.
pub fn milstein_step(sde: &ScalarSde, t_prev: f64, x_prev: f64, dt: f64, dw: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("step size must be positive, got {dt}")));
    }
    if !x_prev.is_finite() || !dw.is_finite() || !t_prev.is_finite() {
        return Err(Error::non_finite(format!(
            "non-finite step inputs: t = {t_prev}, x = {x_prev}, dw = {dw}"
        )));
    }
    let a = sde.drift(t_prev, x_prev);
    let s = sde.diffusion(t_prev, x_prev);
    let s_dx = sde.diffusion_dx(t_prev, x_prev);
    Ok(x_prev + a * dt + s * dw + 0.5 * s * s_dx * (dw * dw - dt))
}

/// Milstein values at all knots, starting from the SDE's initial value.
pub fn milstein_at_knots(sde: &ScalarSde, knots: &KnotPath) -> Result<Vec<f64>> {
    let times = knots.knot_times();
    let values = knots.knot_values();
    let mut states = Vec::with_capacity(times.len());
    states.push(sde.x0());
    for j in 1..times.len() {
        let dt = times[j] - times[j - 1];
        let dw = values[j] - values[j - 1];
        let x = milstein_step(sde, times[j - 1], states[j - 1], dt, dw)?;
        if !x.is_finite() {
            return Err(Error::non_finite(format!(
                "trajectory left the finite range at knot {j} (t = {})",
                times[j]
            )));
        }
        states.push(x);
    }
    Ok(states)
}

/// The piecewise-linear free-knot method.
///
/// On each knot interval the coefficients are frozen at the left knot's
/// Milstein value and the interpolated Brownian path is followed, so every
/// segment is affine in `t`:
///
/// ```text
/// y(t) = X_{j-1} + a(tau_{j-1}, X_{j-1}) (t - tau_{j-1})
///               + sigma(tau_{j-1}, X_{j-1}) (Wtilde(t) - W(tau_{j-1}))
/// ```
///
/// The right end of a segment is the plain Euler value, which generally
/// differs from the next Milstein knot value: the spline jumps at knots.
pub fn milstein_spline(sde: &ScalarSde, knots: &KnotPath) -> Result<SplinePath> {
    let states = milstein_at_knots(sde, knots)?;
    let times = knots.knot_times();
    let values = knots.knot_values();
    let mut segments = Vec::with_capacity(times.len() - 1);
    for j in 1..times.len() {
        let dt = times[j] - times[j - 1];
        let dw = values[j] - values[j - 1];
        let x = states[j - 1];
        let a = sde.drift(times[j - 1], x);
        let s = sde.diffusion(times[j - 1], x);
        let y_end = x + a * dt + s * dw;
        if !y_end.is_finite() {
            return Err(Error::non_finite(format!(
                "segment endpoint not finite at t = {}",
                times[j]
            )));
        }
        segments.push(Segment {
            t_start: times[j - 1],
            t_end: times[j],
            y_start: x,
            y_end,
        });
    }
    SplinePath::new(sde.x0(), segments)
}

/// Continuous Milstein variant sampled on the full grid.
///
/// Within each knot interval the scheme keeps the complete Milstein
/// correction with the actual Brownian values, so at knot times it
/// coincides exactly with [`milstein_at_knots`]. Validation tool; the
/// implementable method is [`milstein_spline`].
pub fn milstein_dense(sde: &ScalarSde, knots: &KnotPath, path: &GridPath) -> Result<Vec<f64>> {
    if knots.regime() != Regime::GridOracle {
        return Err(Error::config(
            "dense Milstein needs grid-oracle knots from the same path",
        ));
    }
    let indices = knots
        .grid_indices()
        .ok_or_else(|| Error::config("grid-oracle knots are missing grid indices"))?;
    if *indices.last().unwrap() != path.n() {
        return Err(Error::config(format!(
            "knots end at grid index {} but the path has {} steps",
            indices.last().unwrap(),
            path.n()
        )));
    }
    for (&idx, &v) in indices.iter().zip(knots.knot_values()) {
        if path.values()[idx].to_bits() != v.to_bits() {
            return Err(Error::config(
                "knot values do not match the grid path; wrong path for these knots",
            ));
        }
    }

    let w = path.values();
    let mut out = vec![0.0; path.n() + 1];
    out[0] = sde.x0();
    let mut x_knot = sde.x0();
    for win in indices.windows(2) {
        let (a_idx, b_idx) = (win[0], win[1]);
        let t_a = path.time(a_idx);
        let drift = sde.drift(t_a, x_knot);
        let sigma = sde.diffusion(t_a, x_knot);
        let corr = 0.5 * sigma * sde.diffusion_dx(t_a, x_knot);
        for g in a_idx + 1..b_idx {
            let dt = path.time(g) - t_a;
            let dw = w[g] - w[a_idx];
            out[g] = x_knot + drift * dt + sigma * dw + corr * (dw * dw - dt);
        }
        // the knot itself goes through the step function, so the dense
        // values coincide bitwise with the knot recursion
        let dt = path.time(b_idx) - t_a;
        let dw = w[b_idx] - w[a_idx];
        x_knot = milstein_step(sde, t_a, x_knot, dt, dw)?;
        if !x_knot.is_finite() {
            return Err(Error::non_finite(format!(
                "dense trajectory left the finite range at grid index {b_idx}"
            )));
        }
        out[b_idx] = x_knot;
    }
    Ok(out)
}

/// Milstein over every grid cell; the fine-grid reference for equations
/// without a closed-form solution.
pub fn milstein_full_grid(sde: &ScalarSde, path: &GridPath) -> Result<Vec<f64>> {
    let w = path.values();
    let h = path.step();
    let mut out = Vec::with_capacity(w.len());
    out.push(sde.x0());
    for i in 1..w.len() {
        let x = milstein_step(sde, path.time(i - 1), out[i - 1], h, w[i] - w[i - 1])?;
        if !x.is_finite() {
            return Err(Error::non_finite(format!(
                "reference trajectory left the finite range at grid index {i}"
            )));
        }
        out.push(x);
    }
    Ok(out)
}

/// Piecewise-interpolated Euler scheme with constant step `1/k`.
///
/// Euler nodes must lie on the grid, i.e. `k` must divide the grid size.
/// The result is continuous: consecutive segments share endpoint values.
pub fn interpolated_euler(sde: &ScalarSde, k: usize, path: &GridPath) -> Result<SplinePath> {
    if k == 0 {
        return Err(Error::invalid("step count k must be at least 1"));
    }
    if path.n() % k != 0 {
        return Err(Error::config(format!(
            "step count {k} does not divide the grid size {}",
            path.n()
        )));
    }
    let stride = path.n() / k;
    let dt = 1.0 / k as f64;
    let w = path.values();
    let mut segments = Vec::with_capacity(k);
    let mut x = sde.x0();
    for i in 0..k {
        let t_i = path.time(i * stride);
        let t_next = path.time((i + 1) * stride);
        let dw = w[(i + 1) * stride] - w[i * stride];
        let x_next = x + sde.drift(t_i, x) * dt + sde.diffusion(t_i, x) * dw;
        if !x_next.is_finite() {
            return Err(Error::non_finite(format!(
                "Euler trajectory left the finite range at node {}",
                i + 1
            )));
        }
        segments.push(Segment {
            t_start: t_i,
            t_end: t_next,
            y_start: x,
            y_end: x_next,
        });
        x = x_next;
    }
    SplinePath::new(sde.x0(), segments)
}

/// Exact GBM value `x0 exp((mu - sigma0^2/2) t + sigma0 w)` at one point.
pub fn gbm_exact_at(mu: f64, sigma0: f64, x0: f64, t: f64, w: f64) -> f64 {
    x0 * ((mu - 0.5 * sigma0 * sigma0) * t + sigma0 * w).exp()
}

/// Exact GBM solution along a grid path.
pub fn gbm_exact_grid(mu: f64, sigma0: f64, x0: f64, path: &GridPath) -> Vec<f64> {
    path.values()
        .iter()
        .enumerate()
        .map(|(i, &w)| gbm_exact_at(mu, sigma0, x0, path.time(i), w))
        .collect()
}

/// Ornstein-Uhlenbeck solution along a grid path by variation of constants,
/// with the stochastic integral discretized at the grid resolution (the
/// integrand is smooth and deterministic, so the discretization error is
/// O(h), far below the scales compared against it).
pub fn ou_exact_grid(theta: f64, level: f64, sigma0: f64, x0: f64, path: &GridPath) -> Vec<f64> {
    let w = path.values();
    let mut out = Vec::with_capacity(w.len());
    out.push(x0);
    let mut ito = 0.0;
    for i in 1..w.len() {
        let t_prev = path.time(i - 1);
        ito += (theta * t_prev).exp() * (w[i] - w[i - 1]);
        let t = path.time(i);
        let decay = (-theta * t).exp();
        out.push(level + (x0 - level) * decay + sigma0 * decay * ito);
    }
    out
}

/// Named SDE registry entry with parameters, addressable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SdeSpec {
    Gbm { mu: f64, sigma0: f64, x0: f64 },
    OrnsteinUhlenbeck { theta: f64, level: f64, sigma0: f64, x0: f64 },
    SinDiffusion { rate: f64, c1: f64, c2: f64, x0: f64 },
}

impl SdeSpec {
    /// Look up a bundled equation by name. Recognized names: `gbm`, `ou`,
    /// `sin-diffusion`. Missing parameters fall back to the listed defaults.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        match name {
            "gbm" => Ok(SdeSpec::Gbm {
                mu: get("mu", 0.1),
                sigma0: get("sigma0", 0.5),
                x0: get("x0", 1.0),
            }),
            "ou" => Ok(SdeSpec::OrnsteinUhlenbeck {
                theta: get("theta", 1.0),
                level: get("level", 0.0),
                sigma0: get("sigma0", 0.5),
                x0: get("x0", 1.0),
            }),
            "sin-diffusion" => Ok(SdeSpec::SinDiffusion {
                rate: get("rate", -0.5),
                c1: get("c1", 1.0),
                c2: get("c2", 0.5),
                x0: get("x0", 1.0),
            }),
            other => Err(Error::config(format!(
                "unknown SDE '{other}'; available: gbm, ou, sin-diffusion"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SdeSpec::Gbm { .. } => "gbm",
            SdeSpec::OrnsteinUhlenbeck { .. } => "ou",
            SdeSpec::SinDiffusion { .. } => "sin-diffusion",
        }
    }

    pub fn build(&self) -> ScalarSde {
        match *self {
            SdeSpec::Gbm { mu, sigma0, x0 } => ScalarSde::gbm(mu, sigma0, x0),
            SdeSpec::OrnsteinUhlenbeck { theta, level, sigma0, x0 } => {
                ScalarSde::ornstein_uhlenbeck(theta, level, sigma0, x0)
            }
            SdeSpec::SinDiffusion { rate, c1, c2, x0 } => {
                ScalarSde::sin_diffusion(rate, c1, c2, x0)
            }
        }
    }

    /// Reference solution on the grid: closed form where available,
    /// otherwise full-grid Milstein on the same path.
    pub fn reference_on_grid(&self, path: &GridPath) -> Result<Vec<f64>> {
        match *self {
            SdeSpec::Gbm { mu, sigma0, x0 } => Ok(gbm_exact_grid(mu, sigma0, x0, path)),
            SdeSpec::OrnsteinUhlenbeck { theta, level, sigma0, x0 } => {
                Ok(ou_exact_grid(theta, level, sigma0, x0, path))
            }
            SdeSpec::SinDiffusion { .. } => milstein_full_grid(&self.build(), path),
        }
    }
}

impl fmt::Display for SdeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SdeSpec::Gbm { mu, sigma0, x0 } => {
                write!(f, "sde=gbm mu={mu} sigma0={sigma0} x0={x0}")
            }
            SdeSpec::OrnsteinUhlenbeck { theta, level, sigma0, x0 } => {
                write!(f, "sde=ou theta={theta} level={level} sigma0={sigma0} x0={x0}")
            }
            SdeSpec::SinDiffusion { rate, c1, c2, x0 } => {
                write!(f, "sde=sin-diffusion rate={rate} c1={c1} c2={c2} x0={x0}")
            }
        }
    }
}
