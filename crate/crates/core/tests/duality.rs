//! Duality checks on parametrized window families.

use gabor_frames::gabor::wexler_raz_residual_separable;
use gabor_frames::grid::sample_gaussian_with_width;
use gabor_frames::{BoundsMethod, Complex64, DualWindowOptions, GaborSystem, GridSignal, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_signal(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
    GridSignal::from_node_fn(grid, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn family() -> Vec<(f64, f64, f64)> {
    // (width, a, b)
    vec![(0.8, 1.0, 0.5), (1.0, 1.0, 0.5), (1.25, 1.0, 0.5), (1.0, 0.5, 1.0), (1.0, 0.5, 0.5)]
}

#[test]
fn small_residual_implies_reconstruction() {
    let g = PeriodicGrid::new(1, 16.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (width, a, b) in family() {
        let psi = sample_gaussian_with_width(g, &[0.0], width, false).unwrap();
        let sys = GaborSystem::separable(psi, a, b).unwrap();
        let dual = sys.dual_window(DualWindowOptions::default()).unwrap();
        let wr = sys.wexler_raz_residual(&dual.window).unwrap();
        assert!(wr <= 1e-10, "width {width}, a {a}, b {b}: residual {wr}");
        for _ in 0..50 {
            let f = random_signal(g, &mut rng);
            let e = sys.reconstruction_error(&dual.window, &f).unwrap();
            assert!(e <= 1e-8, "width {width}: reconstruction {e}");
        }
    }
}

#[test]
fn poor_reconstruction_implies_large_residual() {
    let g = PeriodicGrid::new(1, 16.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (width, a, b) in family() {
        let psi = sample_gaussian_with_width(g, &[0.0], width, false).unwrap();
        let sys = GaborSystem::separable(psi.clone(), a, b).unwrap();
        let dual = sys.dual_window(DualWindowOptions::default()).unwrap();
        for eps in [1e-2, 1e-1, 1.0] {
            let noise = random_signal(g, &mut rng);
            let gamma = dual
                .window
                .add(&noise.scale(Complex64::new(eps * dual.window.l2_norm() / noise.l2_norm(), 0.0)))
                .unwrap();
            let f = random_signal(g, &mut rng);
            let e = sys.reconstruction_error(&gamma, &f).unwrap();
            let wr = wexler_raz_residual_separable(&psi, &gamma, a, b).unwrap();
            if e >= 1e-3 {
                assert!(wr >= 1e-6, "width {width}, eps {eps}: error {e} but residual {wr}");
            }
        }
    }
}

#[test]
fn non_frame_cannot_reconstruct() {
    let g = PeriodicGrid::new(1, 16.0, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let psi = sample_gaussian_with_width(g, &[0.0], 1.0, false).unwrap();
    // ab = 2
    let sys = GaborSystem::separable(psi.clone(), 2.0, 1.0).unwrap();
    let cert = sys.frame_bounds(BoundsMethod::Auto);
    assert!(!cert.is_frame());
    // the best available guess: the canonical-dual formula with S replaced by its upper bound
    let gamma = psi.scale(Complex64::new(1.0 / cert.upper, 0.0));
    for _ in 0..10 {
        let f = random_signal(g, &mut rng);
        assert!(sys.reconstruction_error(&gamma, &f).unwrap() > 0.1);
    }
}
