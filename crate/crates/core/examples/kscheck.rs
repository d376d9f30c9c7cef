// scratch: resolution trend of the detected first-interval mean, hull vs naive
use freeknot::path::{detect_knots_on_grid, detect_knots_on_grid_naive, GridPath};
use freeknot::rng::stream_rng;

fn main() {
    let eps = 0.1f64;
    for (n, paths) in [(20_000usize, 1000usize), (100_000, 1000), (400_000, 600), (1_600_000, 300)] {
        let mut sum = 0.0;
        for i in 0..paths {
            let mut rng = stream_rng(7001, i as u64);
            let path = GridPath::sample(n, &mut rng).unwrap();
            let knots = detect_knots_on_grid(&path, eps).unwrap();
            sum += knots.knot_times()[1] / (eps * eps);
        }
        println!("n={n:>8}: scaled mean xi1 = {:.5} ({paths} paths)", sum / paths as f64);
    }
    // cross-check hull against the quadratic oracle on a handful of paths
    for i in 0..5u64 {
        let mut rng = stream_rng(7002, i);
        let path = GridPath::sample(50_000, &mut rng).unwrap();
        let a = detect_knots_on_grid(&path, eps).unwrap();
        let b = detect_knots_on_grid_naive(&path, eps).unwrap();
        assert_eq!(a.grid_indices(), b.grid_indices());
        println!("path {i}: hull == naive, first knot at index {}", a.grid_indices().unwrap()[1]);
    }
}
