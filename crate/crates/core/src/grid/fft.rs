//! FFTs over the grid's node layout.
//!
//! Forward transforms carry no prefactor; [`inverse`] divides by `L^n` so that
//! `inverse(forward(x)) == x`. Plans are cached process-wide.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::PeriodicGrid;

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut guard = planner.lock().unwrap_or_else(|e| e.into_inner());
    guard.plan_fft(len, direction)
}

fn transform(grid: &PeriodicGrid, data: &mut [Complex64], direction: FftDirection) {
    let l = grid.points_per_axis();
    assert_eq!(data.len(), grid.len(), "buffer length must match the grid");
    let fft = plan(l, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // rows (last axis is contiguous)
    fft.process_with_scratch(data, &mut scratch);
    if grid.dim() == 2 {
        let mut column = vec![Complex64::default(); l];
        for c in 0..l {
            for r in 0..l {
                column[r] = data[r * l + c];
            }
            fft.process_with_scratch(&mut column, &mut scratch);
            for r in 0..l {
                data[r * l + c] = column[r];
            }
        }
    }
}

/// `X[m] = Σ_k x[k] e^{-2πi m·k/L}`.
pub fn forward(grid: &PeriodicGrid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Forward);
}

/// `x[k] = Σ_m X[m] e^{+2πi m·k/L}` without the `1/L^n` factor.
pub fn inverse_unnormalized(grid: &PeriodicGrid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Inverse);
}

/// Exact inverse of [`forward`].
pub fn inverse(grid: &PeriodicGrid, data: &mut [Complex64]) {
    inverse_unnormalized(grid, data);
    let s = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|v| *v *= s);
}
