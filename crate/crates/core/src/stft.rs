//! Short-time Fourier transform on grid signals.
//!
//! `V_ψ f(x, ξ) = ∫ f(t) conj(ψ(t - x)) e^{-2πiξ·t} dt`, discretized as
//! `Δ^n Σ_t f(t) conj(ψ(t - x_k)) e^{-2πiξ_m·t}`. This is the bilinear pairing
//! of `f` with `π(x, -ξ) conj(ψ)`, equivalently `(M_{-ξ} f) * conj(ψ)ˇ (x)`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeffs::CoeffArray;
use crate::error::{Error, Result};
use crate::grid::io::{fmt_f64, read_header, read_values, write_header, write_values};
use crate::grid::{self, fft, Domain, GridLattice, GridSignal, PeriodicGrid};

/// Largest full STFT we are willing to materialize.
pub const MAX_TF_ENTRIES: usize = 1 << 26;

/// Full STFT: row `k` is the time node, column `m` the frequency bin in FFT
/// order (use [`PeriodicGrid::frequency`] for the value of `ξ_m`).
#[derive(Debug, Clone, PartialEq)]
pub struct TFArray {
    grid: PeriodicGrid,
    values: Vec<Complex64>,
}

impl TFArray {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.values[k * self.grid.len() + m]
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[k * n..(k + 1) * n]
    }

    /// Largest entrywise deviation.
    pub fn max_abs_diff(&self, other: &TFArray) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// CSV rows `k,m,re,im` with flat node/bin indices.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "m", "re", "im"])?;
        let n = self.grid.len();
        for k in 0..n {
            for m in 0..n {
                let v = self.get(k, m);
                w.write_record([k.to_string(), m.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut writer: W) -> Result<()> {
        write_header(&mut writer, &self.grid, 2)?;
        write_values(&mut writer, &self.values)?;
        writer.flush()?;
        Ok(())
    }

    pub fn read_binary<R: std::io::Read>(mut reader: R, period: f64) -> Result<TFArray> {
        let grid = read_header(&mut reader, period, 2)?;
        let n = grid.len();
        let values = read_values(&mut reader, n * n)?;
        Ok(TFArray { grid, values })
    }
}

/// `u(t) = f(t) conj(ψ(t - x))` for the node `x`, transformed and scaled by `Δ^n`.
fn windowed_spectrum(f: &GridSignal, window: &GridSignal, node: usize) -> Vec<Complex64> {
    let g = f.grid();
    let mut buf: Vec<Complex64> =
        (0..g.len()).map(|t| f.values()[t] * window.values()[g.sub_nodes(t, node)].conj()).collect();
    fft::forward(g, &mut buf);
    let dv = g.cell_volume();
    buf.iter_mut().for_each(|v| *v *= dv);
    buf
}

/// Full STFT on all time nodes and frequency bins.
pub fn stft(f: &GridSignal, window: &GridSignal) -> Result<TFArray> {
    f.same_grid(window)?;
    let g = *f.grid();
    let n = g.len();
    let entries = n.saturating_mul(n);
    if entries > MAX_TF_ENTRIES {
        return Err(Error::ResourceLimit { entries, limit: MAX_TF_ENTRIES });
    }
    let rows: Vec<Vec<Complex64>> = (0..n).into_par_iter().map(|k| windowed_spectrum(f, window, k)).collect();
    Ok(TFArray { grid: g, values: rows.concat() })
}

pub(crate) fn check_pair(time: &GridLattice, freq: &GridLattice, grid: &PeriodicGrid) -> Result<()> {
    if time.grid() != grid || freq.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if time.domain() != Domain::Time || freq.domain() != Domain::Frequency {
        return Err(Error::NonAlignedLattice("expected a time lattice and a frequency lattice".into()));
    }
    Ok(())
}

/// STFT restricted to `Λ₀ × Λ₁`.
pub fn stft_on_lattice(
    f: &GridSignal,
    window: &GridSignal,
    time: &GridLattice,
    freq: &GridLattice,
) -> Result<CoeffArray> {
    f.same_grid(window)?;
    check_pair(time, freq, f.grid())?;
    let mut out = CoeffArray::zeros(time.len(), freq.len());
    for (i, &node) in time.nodes().iter().enumerate() {
        let spec = windowed_spectrum(f, window, node);
        for (j, &bin) in freq.nodes().iter().enumerate() {
            out.set(i, j, spec[bin]);
        }
    }
    Ok(out)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Maximum deviation between `(2πiξ)^α V_ψ f` and
/// `Σ_{β≤α} C(α,β) V_{ψ^{(α-β)}} f^{(β)}` over the full time-frequency grid.
///
/// The identity follows from integrating by parts in `t`; every term carries
/// a plus sign for this STFT convention.
pub fn derivative_identity_defect(f: &GridSignal, window: &GridSignal, order: &[u32]) -> Result<f64> {
    f.same_grid(window)?;
    let g = *f.grid();
    if order.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: order.len() });
    }
    if order.iter().any(|&a| a > 4) {
        return Err(Error::InvalidParameter("derivative order per axis must be at most 4".into()));
    }
    let base = stft(f, window)?;
    let n = g.len();
    let lhs: Vec<Complex64> =
        base.values.iter().enumerate().map(|(idx, v)| v * grid::derivative_symbol(&g, idx % n, order)).collect();

    let betas: Vec<[u32; 2]> = (0..=order[0])
        .flat_map(|b0| {
            let max1 = if g.dim() == 2 { order[1] } else { 0 };
            (0..=max1).map(move |b1| [b0, b1])
        })
        .collect();
    let mut rhs = vec![Complex64::default(); n * n];
    for beta in betas {
        let b = &beta[..g.dim()];
        let rest: Vec<u32> = order.iter().zip(b).map(|(a, b)| a - b).collect();
        let coeff: f64 = order.iter().zip(b).map(|(&a, &bb)| binomial(a, bb)).product();
        let fb = grid::spectral_derivative(f, b)?;
        let wb = grid::spectral_derivative(window, &rest)?;
        let term = stft(&fb, &wb)?;
        for (acc, v) in rhs.iter_mut().zip(term.values()) {
            *acc += v * coeff;
        }
    }
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}
