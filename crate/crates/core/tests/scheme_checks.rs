//! Monte Carlo checks of the schemes' convergence behaviour at desk scale.

use freeknot::path::{detect_knots_on_grid, GridPath};
use freeknot::rng::stream_rng;
use freeknot::sde::{gbm_exact_at, gbm_exact_grid, milstein_at_knots, milstein_dense, ScalarSde};

const MU: f64 = 0.1;
const SIGMA0: f64 = 0.5;

/// Mean over paths of the largest knot error of the Milstein recursion
/// against the exact GBM solution at the same knots.
fn mean_max_knot_error(eps: f64, n: usize, reps: usize, seed: u64) -> f64 {
    let sde = ScalarSde::gbm(MU, SIGMA0, 1.0);
    let mut total = 0.0;
    for i in 0..reps {
        let mut rng = stream_rng(seed, i as u64);
        let path = GridPath::sample(n, &mut rng).unwrap();
        let knots = detect_knots_on_grid(&path, eps).unwrap();
        let states = milstein_at_knots(&sde, &knots).unwrap();
        let mut worst = 0.0f64;
        for (j, &x) in states.iter().enumerate() {
            let exact = gbm_exact_at(MU, SIGMA0, 1.0, knots.knot_times()[j], knots.knot_values()[j]);
            worst = worst.max((x - exact).abs());
        }
        total += worst;
    }
    total / reps as f64
}

#[test]
fn milstein_knot_error_drops_fast_when_eps_halves() {
    // The knot error is second order in eps (up to logs), so halving eps
    // shrinks it by roughly 4; well clear of the first-order factor 2.
    let n = 20_000;
    let reps = 300;
    let coarse = mean_max_knot_error(0.1, n, reps, 3001);
    let fine = mean_max_knot_error(0.05, n, reps, 3002);
    let factor = coarse / fine;
    assert!(
        (3.0..=5.5).contains(&factor),
        "halving factor {factor} (coarse {coarse}, fine {fine})"
    );
}

#[test]
fn dense_milstein_error_is_far_below_the_accuracy() {
    // Sup-grid error of the dense Milstein variant against exact GBM is a
    // second-order quantity; at eps = 0.05 it stays below eps/2 on average.
    let eps = 0.05;
    let n = 100_000;
    let reps = 40;
    let sde = ScalarSde::gbm(MU, SIGMA0, 1.0);
    let mut total = 0.0;
    for i in 0..reps {
        let mut rng = stream_rng(3003, i as u64);
        let path = GridPath::sample(n, &mut rng).unwrap();
        let knots = detect_knots_on_grid(&path, eps).unwrap();
        let dense = milstein_dense(&sde, &knots, &path).unwrap();
        let exact = gbm_exact_grid(MU, SIGMA0, 1.0, &path);
        let sup = dense
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        total += sup;
    }
    let mean = total / reps as f64;
    assert!(mean < eps / 2.0, "mean sup error {mean} vs eps/2 = {}", eps / 2.0);
}
