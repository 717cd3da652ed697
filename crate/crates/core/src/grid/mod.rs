//! Periodic grids as the computational stand-in for `R^n`.
//!
//! A grid has `L` nodes per axis on the torus `[0, P)^n` with spacing
//! `Δ = P / L`. Node `k` sits at `x_k = kΔ` (identified modulo `P`); frequency
//! bin `m` is `ξ_m = m / P` with `m` taken in the symmetric range
//! `{-⌊L/2⌋, …, ⌈L/2⌉ - 1}`. Values are stored lexicographically, last axis
//! fastest. Only `n ∈ {1, 2}` is supported.

mod aligned;
pub mod fft;
pub mod io;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use aligned::{Domain, GridLattice};

/// Tolerance (in grid steps) used when deciding whether a real offset is aligned.
pub(crate) const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    dim: usize,
    period: f64,
    points: usize,
}

impl PeriodicGrid {
    pub fn new(dim: usize, period: f64, points: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidParameter(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidParameter(format!("grid period must be positive, got {period}")));
        }
        if points == 0 {
            return Err(Error::InvalidParameter("grid needs at least one node".into()));
        }
        Ok(Self { dim, period, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    /// Grid spacing `Δ`.
    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    /// Quadrature weight `Δ^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes `L^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.points, flat % self.points]
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.points + idx[1]
        }
    }

    /// Maps an axis index in `0..L` to the symmetric range.
    pub fn signed_index(&self, j: usize) -> i64 {
        let l = self.points as i64;
        let j = j as i64;
        if j < (l + 1) / 2 {
            j
        } else {
            j - l
        }
    }

    /// Reduces a signed axis index modulo `L`.
    pub fn wrap(&self, j: i64) -> usize {
        j.rem_euclid(self.points as i64) as usize
    }

    /// Node offset `(s - t) mod L` per axis, flattened.
    pub fn sub_nodes(&self, s: usize, t: usize) -> usize {
        let (a, b) = (self.unflatten(s), self.unflatten(t));
        let l = self.points;
        self.flatten([(a[0] + l - b[0]) % l, (a[1] + l - b[1]) % l])
    }

    /// Node sum `(s + t) mod L` per axis, flattened.
    pub fn add_nodes(&self, s: usize, t: usize) -> usize {
        let (a, b) = (self.unflatten(s), self.unflatten(t));
        let l = self.points;
        self.flatten([(a[0] + b[0]) % l, (a[1] + b[1]) % l])
    }

    /// Position `kΔ ∈ [0, P)` per axis (unused axes are 0).
    pub fn node_position(&self, flat: usize) -> [f64; 2] {
        let k = self.unflatten(flat);
        let d = self.spacing();
        let mut out = [k[0] as f64 * d, k[1] as f64 * d];
        if self.dim == 1 {
            out[1] = 0.0;
        }
        out
    }

    /// Representative of node `flat` in the centered box (symmetric index range).
    /// Weights are evaluated here.
    pub fn centered_position(&self, flat: usize) -> [f64; 2] {
        let k = self.unflatten(flat);
        let d = self.spacing();
        let mut out = [self.signed_index(k[0]) as f64 * d, self.signed_index(k[1]) as f64 * d];
        if self.dim == 1 {
            out[1] = 0.0;
        }
        out
    }

    /// Frequency `ξ_m = m / P` of bin `flat` (symmetric range).
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let m = self.unflatten(flat);
        let mut out = [self.signed_index(m[0]) as f64 / self.period, self.signed_index(m[1]) as f64 / self.period];
        if self.dim == 1 {
            out[1] = 0.0;
        }
        out
    }

    pub(crate) fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    /// Converts a real offset to integer steps of size `step`, if aligned.
    pub(crate) fn to_steps(v: f64, step: f64) -> Option<i64> {
        let s = v / step;
        let r = s.round();
        ((s - r).abs() <= ALIGN_TOL * r.abs().max(1.0)).then_some(r as i64)
    }
}

/// Complex samples on a [`PeriodicGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    grid: PeriodicGrid,
    values: Vec<Complex64>,
}

impl GridSignal {
    pub fn new(grid: PeriodicGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::IndexMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, values: vec![Complex64::default(); grid.len()] }
    }

    /// Samples `f` at the centered node positions.
    pub fn from_fn(grid: PeriodicGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.centered_position(k)[..grid.dim()])).collect();
        Self { grid, values }
    }

    /// Builds a signal from a function of the flat node index.
    pub fn from_node_fn(grid: PeriodicGrid, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { grid, values: (0..grid.len()).map(f).collect() }
    }

    /// Unit impulse at node `flat`.
    pub fn delta(grid: PeriodicGrid, flat: usize) -> Self {
        let mut s = Self::zeros(grid);
        s.values[flat] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn same_grid(&self, other: &GridSignal) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Quadrature inner product `Δ^n Σ f conj(g)`.
    pub fn inner(&self, other: &GridSignal) -> Result<Complex64> {
        self.same_grid(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Quadrature `L²` norm `(Δ^n Σ |f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Plain Euclidean norm of the sample vector.
    pub fn euclidean_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> GridSignal {
        GridSignal { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn conj(&self) -> GridSignal {
        GridSignal { grid: self.grid, values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// `t ↦ f(-t)`.
    pub fn reflect(&self) -> GridSignal {
        let values = (0..self.grid.len()).map(|k| self.values[self.grid.sub_nodes(0, k)]).collect();
        GridSignal { grid: self.grid, values }
    }

    pub fn add(&self, other: &GridSignal) -> Result<GridSignal> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridSignal) -> Result<GridSignal> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridSignal) -> Result<GridSignal> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &GridSignal, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GridSignal> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect();
        Ok(GridSignal { grid: self.grid, values })
    }

    /// Unnormalized forward DFT (bins in FFT order).
    pub fn fft(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        fft::forward(&self.grid, &mut buf);
        buf
    }

    /// Inverse of [`GridSignal::fft`].
    pub fn from_spectrum(grid: PeriodicGrid, mut spectrum: Vec<Complex64>) -> Result<GridSignal> {
        if spectrum.len() != grid.len() {
            return Err(Error::IndexMismatch { expected: grid.len(), got: spectrum.len() });
        }
        fft::inverse(&grid, &mut spectrum);
        Ok(GridSignal { grid, values: spectrum })
    }

    /// `T_x f(t) = f(t - x)` for an integer node shift.
    pub fn translate_nodes(&self, shift: [i64; 2]) -> GridSignal {
        let g = &self.grid;
        let s = g.flatten([g.wrap(shift[0]), if g.dim() == 2 { g.wrap(shift[1]) } else { 0 }]);
        let values = (0..g.len()).map(|k| self.values[g.sub_nodes(k, s)]).collect();
        GridSignal { grid: self.grid, values }
    }

    /// Translation by a flat node offset.
    pub fn translate_flat(&self, s: usize) -> GridSignal {
        let g = &self.grid;
        let values = (0..g.len()).map(|k| self.values[g.sub_nodes(k, s)]).collect();
        GridSignal { grid: self.grid, values }
    }

    /// `M_ξ f(t) = e^{2πi ξ·t} f(t)` for `ξ = m / P` with integer `m`.
    pub fn modulate_bins(&self, bins: [i64; 2]) -> GridSignal {
        let g = &self.grid;
        let l = g.points_per_axis() as i64;
        let values = (0..g.len())
            .map(|k| {
                let idx = g.unflatten(k);
                let mut phase = bins[0] * idx[0] as i64;
                if g.dim() == 2 {
                    phase += bins[1] * idx[1] as i64;
                }
                self.values[k] * unit_root(phase.rem_euclid(l) as usize, l as usize)
            })
            .collect();
        GridSignal { grid: self.grid, values }
    }
}

/// `e^{2πi j / l}`.
pub(crate) fn unit_root(j: usize, l: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / l as f64)
}

/// Translation by a real, grid-aligned shift.
pub fn translate(f: &GridSignal, shift: &[f64]) -> Result<GridSignal> {
    let g = f.grid();
    g.check_vector(shift)?;
    let mut steps = [0i64; 2];
    for (i, &x) in shift.iter().enumerate() {
        steps[i] = PeriodicGrid::to_steps(x, g.spacing())
            .ok_or_else(|| Error::NonAlignedShift(format!("{x} is not a multiple of {}", g.spacing())))?;
    }
    Ok(f.translate_nodes(steps))
}

/// Modulation by a frequency `ξ` that is a multiple of `1/P`.
pub fn modulate(f: &GridSignal, freq: &[f64]) -> Result<GridSignal> {
    let g = f.grid();
    g.check_vector(freq)?;
    let mut bins = [0i64; 2];
    for (i, &xi) in freq.iter().enumerate() {
        bins[i] = PeriodicGrid::to_steps(xi, 1.0 / g.period())
            .ok_or_else(|| Error::NonAlignedFrequency(format!("{xi} is not a multiple of 1/{}", g.period())))?;
    }
    Ok(f.modulate_bins(bins))
}

/// `f^{(α)}` computed as the inverse FFT of `(2πiξ)^α · fft(f)`.
pub fn spectral_derivative(f: &GridSignal, order: &[u32]) -> Result<GridSignal> {
    let g = f.grid();
    if order.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: order.len() });
    }
    if order.iter().all(|&a| a == 0) {
        return Ok(f.clone());
    }
    let mut spec = f.fft();
    for (m, v) in spec.iter_mut().enumerate() {
        *v *= derivative_symbol(g, m, order);
    }
    GridSignal::from_spectrum(*g, spec)
}

/// `(2πiξ_m)^α`.
pub(crate) fn derivative_symbol(g: &PeriodicGrid, bin: usize, order: &[u32]) -> Complex64 {
    let xi = g.frequency(bin);
    let mut s = Complex64::new(1.0, 0.0);
    for (axis, &a) in order.iter().enumerate() {
        if a > 0 {
            s *= Complex64::new(0.0, 2.0 * PI * xi[axis]).powu(a);
        }
    }
    s
}

/// `e^{-π|x - c|²}` periodized over the ±1 neighbouring periods.
///
/// With `normalize` the result has unit quadrature `L²` norm. Requires `P ≥ 10`
/// for the truncated periodization to be accurate to machine precision.
pub fn sample_gaussian(grid: PeriodicGrid, center: &[f64], normalize: bool) -> Result<GridSignal> {
    sample_gaussian_with_width(grid, center, 1.0, normalize)
}

/// `e^{-π|x - c|² / s²}` periodized over the ±1 neighbouring periods.
pub fn sample_gaussian_with_width(
    grid: PeriodicGrid,
    center: &[f64],
    width: f64,
    normalize: bool,
) -> Result<GridSignal> {
    grid.check_vector(center)?;
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter(format!("gaussian width must be positive, got {width}")));
    }
    let p = grid.period();
    let images: &[f64] = &[-1.0, 0.0, 1.0];
    let values = (0..grid.len())
        .map(|k| {
            let x = grid.node_position(k);
            let mut acc = 0.0;
            if grid.dim() == 1 {
                for &j in images {
                    let d = x[0] - center[0] + j * p;
                    acc += (-PI * d * d / (width * width)).exp();
                }
            } else {
                for &j0 in images {
                    for &j1 in images {
                        let d0 = x[0] - center[0] + j0 * p;
                        let d1 = x[1] - center[1] + j1 * p;
                        acc += (-PI * (d0 * d0 + d1 * d1) / (width * width)).exp();
                    }
                }
            }
            Complex64::new(acc, 0.0)
        })
        .collect();
    let mut s = GridSignal { grid, values };
    if normalize {
        let n = s.l2_norm();
        s = s.scale(Complex64::new(1.0 / n, 0.0));
    }
    Ok(s)
}

/// Minimal-image distance vector from `c` to node `k` on the torus.
pub(crate) fn torus_offset(grid: &PeriodicGrid, k: usize, c: &[f64]) -> [f64; 2] {
    let x = grid.node_position(k);
    let p = grid.period();
    let mut out = [0.0; 2];
    for axis in 0..grid.dim() {
        let d = x[axis] - c[axis];
        out[axis] = d - p * (d / p).round();
    }
    out
}

/// Standard bump `e^{-1/(1 - |x-c|²/r²)}` inside the ball of radius `r`, zero outside.
pub fn sample_bump(grid: PeriodicGrid, center: &[f64], radius: f64) -> Result<GridSignal> {
    grid.check_vector(center)?;
    if !(radius > 0.0 && radius < grid.period() / 2.0) {
        return Err(Error::InvalidParameter(format!("bump radius must lie in (0, P/2), got {radius}")));
    }
    let values = (0..grid.len())
        .map(|k| {
            let d = torus_offset(&grid, k, center);
            let t = (d[0] * d[0] + d[1] * d[1]) / (radius * radius);
            if t < 1.0 {
                Complex64::new((-1.0 / (1.0 - t)).exp(), 0.0)
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(GridSignal { grid, values })
}
