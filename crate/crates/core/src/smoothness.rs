//! Test-function seminorms, the lattice sum `S_φ` and sampled convolution
//! `R_φ`, and decay/growth profiles of Gabor coefficients across frequency.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::CoeffArray;
use crate::error::{Error, Result};
use crate::grid::io::fmt_f64;
use crate::grid::{fft, spectral_derivative, Domain, GridLattice, GridSignal};
use crate::spaces::{continuous_norm, solid_discrete_norm, SpaceSpec};
use crate::stft::stft_on_lattice;

/// Highest derivative order used by the seminorms.
pub const MAX_ORDER: u32 = 6;

/// Number of weighted suprema in a profile (`N = 0..=6`).
pub const PROFILE_ORDERS: usize = 7;

/// All multi-indices `α ∈ N^dim` with `|α| ≤ max_order`, by increasing order.
pub fn multi_indices(dim: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        if dim == 1 {
            out.push(vec![total]);
        } else {
            for a in (0..=total).rev() {
                out.push(vec![a, total - a]);
            }
        }
    }
    out
}

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("order {order} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// `‖f‖_{E,N} = max_{|α|≤N} ‖f^{(α)}‖_E`.
pub fn de_seminorm(f: &GridSignal, space: &SpaceSpec, order: u32) -> Result<f64> {
    check_order(order)?;
    let mut best = 0.0f64;
    for alpha in multi_indices(f.grid().dim(), order) {
        let d = spectral_derivative(f, &alpha)?;
        best = best.max(continuous_norm(&d, space)?);
    }
    Ok(best)
}

/// `‖φ‖_{S^N} = max_{|α|≤N} max_x |φ^{(α)}(x)| (1 + |x|)^N`.
pub fn schwartz_seminorm(phi: &GridSignal, order: u32) -> Result<f64> {
    check_order(order)?;
    let g = *phi.grid();
    let weights: Vec<f64> = (0..g.len())
        .map(|k| {
            let x = g.centered_position(k);
            (1.0 + (x[0] * x[0] + x[1] * x[1]).sqrt()).powi(order as i32)
        })
        .collect();
    let mut best = 0.0f64;
    for alpha in multi_indices(g.dim(), order) {
        let d = spectral_derivative(phi, &alpha)?;
        for (v, w) in d.values().iter().zip(&weights) {
            best = best.max(v.norm() * w);
        }
    }
    Ok(best)
}

fn require_time(lattice: &GridLattice) -> Result<()> {
    if lattice.domain() != Domain::Time {
        return Err(Error::NonAlignedLattice("expected a time lattice".into()));
    }
    Ok(())
}

/// `S_φ(c) = Σ_λ c_λ T_λ φ`.
pub fn s_phi(c: &[Complex64], lattice: &GridLattice, phi: &GridSignal) -> Result<GridSignal> {
    require_time(lattice)?;
    if lattice.grid() != phi.grid() {
        return Err(Error::GridMismatch);
    }
    if c.len() != lattice.len() {
        return Err(Error::IndexMismatch { expected: lattice.len(), got: c.len() });
    }
    let g = *phi.grid();
    let mut out = vec![Complex64::default(); g.len()];
    for (&s, &coef) in lattice.nodes().iter().zip(c) {
        if coef == Complex64::default() {
            continue;
        }
        for (t, o) in out.iter_mut().enumerate() {
            *o += coef * phi.values()[g.sub_nodes(t, s)];
        }
    }
    GridSignal::new(g, out)
}

/// Periodic convolution `(e ∗ φ)(x) = Δ^n Σ_t e(t) φ(x - t)`.
pub fn convolve(e: &GridSignal, phi: &GridSignal) -> Result<GridSignal> {
    if e.grid() != phi.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *e.grid();
    let mut a = e.fft();
    let b = phi.fft();
    let dv = g.cell_volume();
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y * dv;
    }
    fft::inverse(&g, &mut a);
    GridSignal::new(g, a)
}

/// `R_φ(e) = ((e ∗ φ)(λ))_λ`.
pub fn r_phi(e: &GridSignal, phi: &GridSignal, lattice: &GridLattice) -> Result<Vec<Complex64>> {
    require_time(lattice)?;
    if lattice.grid() != e.grid() {
        return Err(Error::GridMismatch);
    }
    let conv = convolve(e, phi)?;
    Ok(lattice.nodes().iter().map(|&k| conv.values()[k]).collect())
}

/// Per-frequency slice norms of Gabor coefficients with their weighted suprema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProfile {
    /// `|λ₁|` for each frequency lattice point.
    pub frequencies: Vec<f64>,
    /// `‖(V_ψ f(λ₀, λ₁))_{λ₀}‖_{E_d(Λ₀)}` for each `λ₁`.
    pub values: Vec<f64>,
    /// `sup_{λ₁} value (1 + |λ₁|)^N`, `N = 0..=6`.
    pub decay_suprema: [f64; PROFILE_ORDERS],
    /// `sup_{λ₁} value (1 + |λ₁|)^{-N}`, `N = 0..=6`.
    pub growth_suprema: [f64; PROFILE_ORDERS],
}

/// Ratio used by [`DecayProfile::is_super_polynomial`] and [`DecayProfile::growth_order`].
pub const PLATEAU_FACTOR: f64 = 10.0;

impl DecayProfile {
    pub fn from_values(frequencies: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::IndexMismatch { expected: frequencies.len(), got: values.len() });
        }
        let sup = |s: f64| frequencies.iter().zip(&values).map(|(r, v)| v * (1.0 + r).powf(s)).fold(0.0, f64::max);
        let mut decay = [0.0; PROFILE_ORDERS];
        let mut growth = [0.0; PROFILE_ORDERS];
        for n in 0..PROFILE_ORDERS {
            decay[n] = sup(n as f64);
            growth[n] = sup(-(n as f64));
        }
        Ok(Self { frequencies, values, decay_suprema: decay, growth_suprema: growth })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// All weighted suprema finite and the `N = 6` one within a factor
    /// [`PLATEAU_FACTOR`] of the `N = 0` one.
    pub fn is_super_polynomial(&self) -> bool {
        self.decay_suprema.iter().all(|v| v.is_finite())
            && self.decay_suprema[PROFILE_ORDERS - 1] <= PLATEAU_FACTOR * self.decay_suprema[0]
    }

    /// Smallest `N ≤ 6` whose negatively weighted supremum is within
    /// [`PLATEAU_FACTOR`] of the `N = 6` one, i.e. where heavier damping no
    /// longer changes the picture.
    pub fn growth_order(&self) -> u32 {
        let last = self.growth_suprema[PROFILE_ORDERS - 1];
        (0..PROFILE_ORDERS).find(|&n| self.growth_suprema[n] <= PLATEAU_FACTOR * last).unwrap_or(PROFILE_ORDERS - 1)
            as u32
    }

    /// CSV rows `index,abs_lambda,value,w0..w6` with `wN = value (1 + |λ₁|)^N`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["index".to_string(), "abs_lambda".into(), "value".into()];
        header.extend((0..PROFILE_ORDERS).map(|n| format!("w{n}")));
        w.write_record(&header)?;
        for (i, (r, v)) in self.frequencies.iter().zip(&self.values).enumerate() {
            let mut rec = vec![i.to_string(), fmt_f64(*r), fmt_f64(*v)];
            rec.extend((0..PROFILE_ORDERS).map(|n| fmt_f64(v * (1.0 + r).powi(n as i32))));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            length: self.len(),
            decay_suprema: self.decay_suprema,
            growth_suprema: self.growth_suprema,
            super_polynomial: self.is_super_polynomial(),
            growth_order: self.growth_order(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub length: usize,
    pub decay_suprema: [f64; PROFILE_ORDERS],
    pub growth_suprema: [f64; PROFILE_ORDERS],
    pub super_polynomial: bool,
    pub growth_order: u32,
}

/// Slice norms of `C_ψ f` over `Λ₁`, measured in the solid space `E` on `Λ₀`.
pub fn decay_profile(
    f: &GridSignal,
    window: &GridSignal,
    time: &GridLattice,
    freq: &GridLattice,
    space: &SpaceSpec,
) -> Result<DecayProfile> {
    let c = stft_on_lattice(f, window, time, freq)?;
    if !space.is_solid() {
        return Err(Error::NotSolid("slice norms need a solid space".into()));
    }
    let values = (0..freq.len())
        .into_par_iter()
        .map(|j| solid_discrete_norm(&c.freq_slice(j), time, space))
        .collect::<Result<Vec<_>>>()?;
    let frequencies = (0..freq.len()).map(|j| freq.norm(j)).collect();
    DecayProfile::from_values(frequencies, values)
}

/// Same computation as [`decay_profile`]; read through
/// [`DecayProfile::growth_suprema`] and [`DecayProfile::growth_order`].
pub fn growth_profile(
    f: &GridSignal,
    window: &GridSignal,
    time: &GridLattice,
    freq: &GridLattice,
    space: &SpaceSpec,
) -> Result<DecayProfile> {
    decay_profile(f, window, time, freq, space)
}

/// Least-squares fit `log lhs ≈ slope · log bound + intercept` plus the
/// envelope constant `C = max lhs / bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityFit {
    pub samples: usize,
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub envelope: f64,
}

impl ContinuityFit {
    pub fn fit(lhs: &[f64], bound: &[f64]) -> Result<Self> {
        if lhs.len() != bound.len() {
            return Err(Error::IndexMismatch { expected: lhs.len(), got: bound.len() });
        }
        if lhs.len() < 2 || lhs.iter().chain(bound).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("need at least two positive samples".into()));
        }
        let n = lhs.len() as f64;
        let xs: Vec<f64> = bound.iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = lhs.iter().map(|v| v.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = my - slope * mx;
        let rms_residual =
            (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / n).sqrt();
        let envelope = lhs.iter().zip(bound).map(|(a, b)| a / b).fold(0.0, f64::max);
        Ok(Self { samples: lhs.len(), slope, intercept, rms_residual, envelope })
    }

    /// Samples with `lhs > envelope · bound · (1 + slack)`.
    pub fn violations(&self, lhs: &[f64], bound: &[f64], slack: f64) -> usize {
        lhs.iter().zip(bound).filter(|(a, b)| **a > self.envelope * **b * (1.0 + slack)).count()
    }
}

/// `Σ_{λ₁} M_{λ₁} S_φ((c_{λ₀,λ₁})_{λ₀})` with `φ = ψ^{(α-β)}` weighted by
/// `(2πiλ₁)^β`, summed over `β ≤ α` with binomial coefficients; for `α = 0`
/// this is plain synthesis.
pub fn synthesis_derivative_expansion(
    c: &CoeffArray,
    window: &GridSignal,
    time: &GridLattice,
    freq: &GridLattice,
    order: &[u32],
) -> Result<GridSignal> {
    let g = *window.grid();
    if order.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: order.len() });
    }
    let mut out = GridSignal::zeros(g);
    let max1 = if g.dim() == 2 { order[1] } else { 0 };
    for b0 in 0..=order[0] {
        for b1 in 0..=max1 {
            let beta = [b0, b1];
            let beta = &beta[..g.dim()];
            let rest: Vec<u32> = order.iter().zip(beta).map(|(a, b)| a - b).collect();
            let binom: f64 = order.iter().zip(beta).map(|(&a, &b)| binomial(a, b)).product();
            let phi = spectral_derivative(window, &rest)?;
            for j in 0..freq.len() {
                let symbol = crate::grid::derivative_symbol(&g, freq.node(j), beta);
                let piece = s_phi(&c.freq_slice(j), time, &phi)?.modulate_bins(freq.signed_steps(j));
                out = out.add(&piece.scale(symbol * binom))?;
            }
        }
    }
    Ok(out)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
