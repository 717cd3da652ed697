//! Gabor systems `G(Λ₀ × Λ₁, ψ) = {M_{λ₁} T_{λ₀} ψ}` on a periodic grid.
//!
//! * analysis `C_ψ f = (V_ψ f(λ))_λ` (quadrature weighted, see [`crate::stft`]),
//! * synthesis `D_ψ c = Σ_λ c_λ M_{λ₁} T_{λ₀} ψ` (no weight),
//! * frame operator `S_{ψ,γ} = D_γ ∘ C_ψ`.
//!
//! With these weights the dense matrices of `C_ψ` and `D_ψ` are conjugate
//! transposes of each other up to the factor `Δ^n`, and a pair `(ψ, γ)` is dual
//! exactly when the Wexler–Raz relations hold with constant `vol(Λ₀)·vol(Λ₁)`
//! (`(ab)^n` for `aZ^n × bZ^n`), the same constant as on `R^n`.
//!
//! Frame bounds are reported as the extreme eigenvalues of `S = S_{ψ,ψ}`, i.e.
//! the squares of the constants in `A‖f‖ ≤ ‖C_ψ f‖ ≤ B‖f‖`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffArray;
use crate::error::{Error, Result};
use crate::grid::{fft, unit_root, GridLattice, GridSignal, PeriodicGrid};
use crate::stft::{check_pair, stft_on_lattice};

/// Lower/upper eigenvalue ratio below which a system is reported as not a frame.
pub const NON_FRAME_RATIO: f64 = 1e-10;

/// Largest signal dimension for which [`BoundsMethod::Auto`] uses a dense eigensolver.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundsMethod {
    /// Dense eigensolver up to [`DENSE_LIMIT`] nodes, Lanczos beyond.
    #[default]
    Auto,
    DenseEigen,
    /// Power iteration for the maximum, shifted power iteration for the minimum.
    /// Slow when the spectrum clusters at either end.
    PowerIteration,
    /// Restarted Lanczos with full reorthogonalization.
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    DenseEigen,
    PowerIteration,
    Lanczos,
}

/// Extreme eigenvalues of the frame operator `S_{ψ,ψ}`.
///
/// `lower`/`upper` are eigenvalues of `S`, hence the squares of the norm
/// constants in `A‖f‖ ≤ ‖C_ψ f‖_{ℓ²} ≤ B‖f‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCertificate {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub method: CertificateMethod,
    /// Wexler–Raz residual of the canonical dual pair, once one is computed.
    #[serde(rename = "residual")]
    pub wexler_raz_residual: Option<f64>,
    pub redundancy: f64,
}

impl FrameCertificate {
    pub fn is_frame(&self) -> bool {
        self.upper > 0.0 && self.lower > NON_FRAME_RATIO * self.upper
    }

    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualWindowOptions {
    /// Relative residual `‖Sγ - ψ‖ / ‖ψ‖` at which CG stops.
    pub tol: f64,
    /// Defaults to [`default_max_iter`].
    pub max_iter: Option<usize>,
}

impl Default for DualWindowOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: None }
    }
}

#[derive(Debug, Clone)]
pub struct DualWindow {
    pub window: GridSignal,
    pub iterations: usize,
    /// Final relative residual `‖Sγ - ψ‖ / ‖ψ‖`, recomputed from scratch.
    pub residual: f64,
    pub certificate: FrameCertificate,
}

#[derive(Debug, Clone)]
pub struct GaborSystem {
    window: GridSignal,
    time: GridLattice,
    freq: GridLattice,
}

impl GaborSystem {
    pub fn new(window: GridSignal, time: GridLattice, freq: GridLattice) -> Result<Self> {
        check_pair(&time, &freq, window.grid())?;
        Ok(Self { window, time, freq })
    }

    /// `G(aZ^n × bZ^n, ψ)`.
    pub fn separable(window: GridSignal, a: f64, b: f64) -> Result<Self> {
        let g = *window.grid();
        let time = GridLattice::time_step(g, a)?;
        let freq = GridLattice::frequency_step(g, b)?;
        Self::new(window, time, freq)
    }

    pub fn window(&self) -> &GridSignal {
        &self.window
    }

    pub fn time(&self) -> &GridLattice {
        &self.time
    }

    pub fn freq(&self) -> &GridLattice {
        &self.freq
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.window.grid()
    }

    pub fn coefficient_count(&self) -> usize {
        self.time.len() * self.freq.len()
    }

    /// `|Λ₀|·|Λ₁| / L^n`.
    pub fn redundancy(&self) -> f64 {
        self.coefficient_count() as f64 / self.grid().len() as f64
    }

    /// `vol(Λ₀)·vol(Λ₁)`, the Wexler–Raz constant.
    pub fn lattice_volume(&self) -> f64 {
        self.time.lattice().volume() * self.freq.lattice().volume()
    }

    /// Same lattices, different window.
    pub fn with_window(&self, window: GridSignal) -> Result<Self> {
        Self::new(window, self.time.clone(), self.freq.clone())
    }

    /// The system on the adjoint lattice `Λ₁⊥ × Λ₀⊥`.
    pub fn adjoint(&self) -> Result<Self> {
        let g = *self.grid();
        let wrap = |e: Error| match e {
            Error::NonAlignedLattice(msg) => Error::NonAlignedAdjointLattice(msg),
            other => other,
        };
        let time = GridLattice::time(self.freq.lattice().dual()?, g).map_err(wrap)?;
        let freq = GridLattice::frequency(self.time.lattice().dual()?, g).map_err(wrap)?;
        Self::new(self.window.clone(), time, freq)
    }

    /// `C_ψ f`.
    pub fn analyze(&self, f: &GridSignal) -> Result<CoeffArray> {
        stft_on_lattice(f, &self.window, &self.time, &self.freq)
    }

    /// `D_ψ c`.
    pub fn synthesize(&self, c: &CoeffArray) -> Result<GridSignal> {
        synthesize_with(&self.window, &self.time, &self.freq, c)
    }

    /// `S_{ψ,γ} f = D_γ C_ψ f`, with `γ = ψ` by default.
    pub fn frame_apply(&self, f: &GridSignal, dual: Option<&GridSignal>) -> Result<GridSignal> {
        let c = self.analyze(f)?;
        let gamma = dual.unwrap_or(&self.window);
        self.window.same_grid(gamma)?;
        synthesize_with(gamma, &self.time, &self.freq, &c)
    }

    fn apply_frame_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        let f = GridSignal::new(*self.grid(), v.to_vec()).expect("length checked by caller");
        self.frame_apply(&f, None).expect("system is self-consistent").into_values()
    }

    /// Extreme eigenvalues of `S_{ψ,ψ}`. Never fails: a non-frame shows up as
    /// a lower bound near zero.
    pub fn frame_bounds(&self, method: BoundsMethod) -> FrameCertificate {
        let n = self.grid().len();
        let method = match method {
            BoundsMethod::Auto if n <= DENSE_LIMIT => BoundsMethod::DenseEigen,
            BoundsMethod::Auto => BoundsMethod::Lanczos,
            m => m,
        };
        let (lower, upper, method) = match method {
            BoundsMethod::PowerIteration => {
                let (a, b) = self.power_bounds();
                (a, b, CertificateMethod::PowerIteration)
            }
            BoundsMethod::Lanczos => {
                let (a, b) = self.lanczos_bounds();
                (a, b, CertificateMethod::Lanczos)
            }
            _ => {
                let (a, b) = self.dense_bounds();
                (a, b, CertificateMethod::DenseEigen)
            }
        };
        FrameCertificate {
            lower: lower.max(0.0),
            upper,
            method,
            wexler_raz_residual: None,
            redundancy: self.redundancy(),
        }
    }

    /// Dense matrix of `S_{ψ,ψ}` built column by column.
    pub fn frame_matrix(&self) -> DMatrix<Complex64> {
        let n = self.grid().len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let mut e = vec![Complex64::default(); n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.apply_frame_raw(&e);
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
            e[j] = Complex64::default();
        }
        m
    }

    fn dense_bounds(&self) -> (f64, f64) {
        let m = self.frame_matrix();
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn power_bounds(&self) -> (f64, f64) {
        let n = self.grid().len();
        let start = seeded_vector(n, 0x9e37_79b9_7f4a_7c15);
        let apply = |v: &[Complex64]| self.apply_frame_raw(v);
        let (upper, _) = power_iteration(&apply, &start);
        if upper <= 0.0 {
            return (0.0, 0.0);
        }
        let shift = upper;
        let shifted = |v: &[Complex64]| {
            let sv = self.apply_frame_raw(v);
            v.iter().zip(sv).map(|(x, y)| x * shift - y).collect::<Vec<_>>()
        };
        let (_, v) = power_iteration(&shifted, &seeded_vector(n, 0x2545_f491_4f6c_dd1d));
        // Rayleigh quotient of S itself is more accurate than shift - μ
        let sv = self.apply_frame_raw(&v);
        let lower = dot(&v, &sv).re / dot(&v, &v).re;
        (lower, upper)
    }

    fn lanczos_bounds(&self) -> (f64, f64) {
        let n = self.grid().len();
        let apply = |v: &[Complex64]| self.apply_frame_raw(v);
        let start = seeded_vector(n, 0x9e37_79b9_7f4a_7c15);
        let upper = lanczos_extreme(&apply, &start, Extreme::Max, None);
        if upper <= 0.0 {
            return (0.0, 0.0);
        }
        let lower = lanczos_extreme(&apply, &seeded_vector(n, 0x2545_f491_4f6c_dd1d), Extreme::Min, Some(upper));
        (lower, upper)
    }

    /// Canonical dual window `γ° = S^{-1} ψ` by conjugate gradients.
    pub fn dual_window(&self, opts: DualWindowOptions) -> Result<DualWindow> {
        let cert = self.frame_bounds(BoundsMethod::Auto);
        self.dual_window_with(cert, opts)
    }

    /// Like [`GaborSystem::dual_window`] with precomputed frame bounds.
    pub fn dual_window_with(&self, cert: FrameCertificate, opts: DualWindowOptions) -> Result<DualWindow> {
        if !(cert.upper > 0.0 && cert.lower > opts.tol * cert.upper) {
            return Err(Error::NotAFrame { lower: cert.lower, tol: opts.tol * cert.upper });
        }
        let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(cert.condition(), opts.tol));
        let rhs = self.window.values();
        let apply = |v: &[Complex64]| self.apply_frame_raw(v);
        let (x, iterations) = conjugate_gradient(&apply, rhs, opts.tol, max_iter)?;
        let sx = apply(&x);
        let residual = norm(&sub(&sx, rhs)) / norm(rhs);
        let window = GridSignal::new(*self.grid(), x)?;
        Ok(DualWindow { window, iterations, residual, certificate: cert })
    }

    /// Wexler–Raz residual of `(ψ, γ)`; see [`wexler_raz_residual`].
    pub fn wexler_raz_residual(&self, dual: &GridSignal) -> Result<f64> {
        wexler_raz_residual(&self.window, dual, &self.time, &self.freq)
    }

    /// `‖D_γ C_ψ f - f‖ / ‖f‖`.
    pub fn reconstruction_error(&self, dual: &GridSignal, f: &GridSignal) -> Result<f64> {
        let nf = f.l2_norm();
        if nf == 0.0 {
            return Err(Error::ZeroSignal);
        }
        let r = self.frame_apply(f, Some(dual))?;
        Ok(r.sub(f)?.l2_norm() / nf)
    }
}

/// `Σ_{λ} c_λ M_{λ₁} T_{λ₀} γ`.
fn synthesize_with(window: &GridSignal, time: &GridLattice, freq: &GridLattice, c: &CoeffArray) -> Result<GridSignal> {
    if c.shape() != (time.len(), freq.len()) {
        return Err(Error::IndexMismatch { expected: time.len() * freq.len(), got: c.values().len() });
    }
    let g = *window.grid();
    let n = g.len();
    let mut out = vec![Complex64::default(); n];
    let mut buf = vec![Complex64::default(); n];
    for (i, &s) in time.nodes().iter().enumerate() {
        let row = c.time_row(i);
        if row.iter().all(|v| *v == Complex64::default()) {
            continue;
        }
        buf.iter_mut().for_each(|v| *v = Complex64::default());
        for (j, &bin) in freq.nodes().iter().enumerate() {
            buf[bin] += row[j];
        }
        fft::inverse_unnormalized(&g, &mut buf);
        for t in 0..n {
            out[t] += buf[t] * window.values()[g.sub_nodes(t, s)];
        }
    }
    GridSignal::new(g, out)
}

/// Maximum over the adjoint lattice `Λ° = Λ₁⊥ × Λ₀⊥` (one period) of
/// `|(π(μ)ψ, γ)_{L²} - vol(Λ₀)vol(Λ₁) δ_{μ,0}|`.
///
/// By covariance of the Gram entries only the differences `μ - μ'` matter, so
/// the second index is pinned at the origin. Computed by direct quadrature,
/// independently of any FFT path.
pub fn wexler_raz_residual(
    window: &GridSignal,
    dual: &GridSignal,
    time: &GridLattice,
    freq: &GridLattice,
) -> Result<f64> {
    window.same_grid(dual)?;
    check_pair(time, freq, window.grid())?;
    let g = *window.grid();
    let wrap = |e: Error| match e {
        Error::NonAlignedLattice(msg) => Error::NonAlignedAdjointLattice(msg),
        other => other,
    };
    let adj_time = GridLattice::time(freq.lattice().dual()?, g).map_err(wrap)?;
    let adj_freq = GridLattice::frequency(time.lattice().dual()?, g).map_err(wrap)?;
    let constant = time.lattice().volume() * freq.lattice().volume();
    let l = g.points_per_axis();
    let roots: Vec<Complex64> = (0..l).map(|j| unit_root(j, l)).collect();
    let dv = g.cell_volume();
    let mut worst = 0.0f64;
    for &mu0 in adj_time.nodes() {
        // ψ(t - μ₀) conj(γ(t))
        let prod: Vec<Complex64> =
            (0..g.len()).map(|t| window.values()[g.sub_nodes(t, mu0)] * dual.values()[t].conj()).collect();
        for &mu1 in adj_freq.nodes() {
            let m = g.unflatten(mu1);
            let mut acc = Complex64::default();
            for (t, p) in prod.iter().enumerate() {
                let k = g.unflatten(t);
                let phase = (m[0] * k[0] + m[1] * k[1]) % l;
                acc += roots[phase] * p;
            }
            let target = if mu0 == 0 && mu1 == 0 { constant } else { 0.0 };
            worst = worst.max((acc * dv - target).norm());
        }
    }
    Ok(worst)
}

/// Convenience form for `aZ^n × bZ^n`.
pub fn wexler_raz_residual_separable(window: &GridSignal, dual: &GridSignal, a: f64, b: f64) -> Result<f64> {
    let g = *window.grid();
    let time = GridLattice::time_step(g, a)?;
    let freq = GridLattice::frequency_step(g, b)?;
    wexler_raz_residual(window, dual, &time, &freq)
}

/// `max(⌈10 √κ⌉, ⌈√κ ln(2/tol)⌉)`: the second term is twice the classical CG
/// bound `½ √κ ln(2/tol)` on the iterations needed to reach `tol`.
pub fn default_max_iter(condition: f64, tol: f64) -> usize {
    let root = condition.sqrt();
    (10.0 * root).max(root * (2.0 / tol).ln()).ceil() as usize
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Deterministic start vector (splitmix64).
fn seeded_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n).map(|_| Complex64::new(next(), next())).collect()
}

const POWER_TOL: f64 = 1e-11;
const POWER_MAX_ITER: usize = 200_000;

/// Largest eigenvalue of a Hermitian positive semidefinite operator and its
/// eigenvector. Stops on a small eigen-residual or when the Rayleigh quotient
/// stagnates.
fn power_iteration(apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>, start: &[Complex64]) -> (f64, Vec<Complex64>) {
    let mut v = start.to_vec();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut mu = 0.0;
    let mut history = f64::NAN;
    for it in 0..POWER_MAX_ITER {
        let w = apply(&v);
        mu = dot(&v, &w).re;
        let nw = norm(&w);
        if nw == 0.0 {
            return (0.0, v);
        }
        let resid = w.iter().zip(&v).map(|(a, b)| (a - b * mu).norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|x| x / nw).collect();
        if resid <= POWER_TOL * mu.abs() {
            break;
        }
        if it % 100 == 99 {
            if (mu - history).abs() <= 1e-15 * mu.abs() {
                break;
            }
            history = mu;
        }
    }
    (mu, v)
}

#[derive(Clone, Copy, PartialEq)]
enum Extreme {
    Min,
    Max,
}

const LANCZOS_TOL: f64 = 1e-12;
const LANCZOS_RESTARTS: usize = 30;
/// Cap on stored Krylov vectors, in complex entries.
const LANCZOS_STORAGE: usize = 1 << 23;

/// One extreme eigenvalue of a Hermitian positive semidefinite operator.
///
/// Each cycle builds a Krylov basis with full reorthogonalization and stops
/// when the Ritz residual bound `β_m |y_m|` drops below `tol · scale`;
/// otherwise it restarts from the current Ritz vector.
fn lanczos_extreme(
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    start: &[Complex64],
    which: Extreme,
    scale: Option<f64>,
) -> f64 {
    let n = start.len();
    let max_dim = n.min(200).min((LANCZOS_STORAGE / n).max(20));
    let mut v0 = start.to_vec();
    let mut theta = 0.0;
    for _ in 0..LANCZOS_RESTARTS {
        let nv = norm(&v0);
        let mut basis: Vec<Vec<Complex64>> = vec![v0.iter().map(|x| x / nv).collect()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut ritz = (0.0, vec![1.0]);
        let mut done = false;
        for j in 0..max_dim {
            let mut w = apply(&basis[j]);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= qi * c;
                    }
                }
            }
            let b = norm(&w);
            let k = alpha.len();
            let check = k.is_multiple_of(10) || k == max_dim || b <= 1e-14 * a.abs().max(1e-300);
            if check {
                let (t, y) = tridiagonal_extreme(&alpha, &beta, which);
                let bound = b * y[k - 1].abs();
                let s = scale.unwrap_or(t.abs()).max(f64::MIN_POSITIVE);
                ritz = (t, y);
                if bound <= LANCZOS_TOL * s || b <= 1e-14 * s {
                    done = true;
                    break;
                }
            }
            if j + 1 < max_dim {
                beta.push(b);
                basis.push(w.into_iter().map(|x| x / b).collect());
            }
        }
        theta = ritz.0;
        if done {
            break;
        }
        // restart from the Ritz vector
        v0 = vec![Complex64::default(); n];
        for (coef, q) in ritz.1.iter().zip(&basis) {
            for (vi, qi) in v0.iter_mut().zip(q) {
                *vi += qi * *coef;
            }
        }
    }
    theta
}

/// Extreme eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn tridiagonal_extreme(alpha: &[f64], beta: &[f64], which: Extreme) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        let better = match which {
            Extreme::Max => eig.eigenvalues[i] > eig.eigenvalues[best],
            Extreme::Min => eig.eigenvalues[i] < eig.eigenvalues[best],
        };
        if better {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}

/// Conjugate gradients for a Hermitian positive definite operator.
fn conjugate_gradient(
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    rhs: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let nb = norm(rhs);
    let mut x = vec![Complex64::default(); rhs.len()];
    if nb == 0.0 {
        return Ok((x, 0));
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for it in 0..max_iter {
        if rr.sqrt() <= tol * nb {
            return Ok((x, it));
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap).re;
        for i in 0..x.len() {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_next = dot(&r, &r).re;
        let beta = rr_next / rr;
        for i in 0..p.len() {
            p[i] = r[i] + p[i] * beta;
        }
        rr = rr_next;
    }
    if rr.sqrt() <= tol * nb {
        return Ok((x, max_iter));
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: rr.sqrt() / nb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_gaussian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_signal(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
        GridSignal::from_node_fn(grid, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    /// Row `(i, j)` holds `Δ^n conj(π(λ)ψ)(t)` for every node `t`.
    fn analysis_matrix(sys: &GaborSystem) -> DMatrix<Complex64> {
        let g = *sys.grid();
        let (t, f) = (sys.time(), sys.freq());
        let mut m = DMatrix::zeros(sys.coefficient_count(), g.len());
        for i in 0..t.len() {
            for j in 0..f.len() {
                let atom =
                    sys.window().translate_flat(t.node(i)).modulate_bins([f.signed_steps(j)[0], f.signed_steps(j)[1]]);
                for (k, v) in atom.values().iter().enumerate() {
                    m[(i * f.len() + j, k)] = v.conj() * g.cell_volume();
                }
            }
        }
        m
    }

    fn to_vec(s: &GridSignal) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(s.values())
    }

    fn gaussian_system(p: f64, l: usize, a: f64, b: f64) -> GaborSystem {
        let g = PeriodicGrid::new(1, p, l).unwrap();
        GaborSystem::separable(sample_gaussian(g, &[0.0], false).unwrap(), a, b).unwrap()
    }

    #[test]
    fn analysis_matches_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = PeriodicGrid::new(1, 8.0, 32).unwrap();
        let w = sample_gaussian(g, &[0.0], false).unwrap();
        // a = 4 samples, 8 modulations
        let sys = GaborSystem::separable(w, 4.0 * g.spacing(), 4.0 / g.period()).unwrap();
        assert_eq!(sys.coefficient_count(), 64);
        let f = random_signal(g, &mut rng);
        let c = sys.analyze(&f).unwrap();
        let m = analysis_matrix(&sys);
        let want = &m * to_vec(&f);
        for (a, b) in c.values().iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(sys.analyze(&GridSignal::zeros(g)).unwrap().l2_norm() == 0.0);
    }

    #[test]
    fn synthesis_is_scaled_adjoint_of_analysis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = PeriodicGrid::new(1, 8.0, 32).unwrap();
        let w = random_signal(g, &mut rng);
        let sys = GaborSystem::separable(w, 4.0 * g.spacing(), 4.0 / g.period()).unwrap();
        let m = analysis_matrix(&sys);
        let synth_oracle = m.adjoint() / Complex64::new(g.cell_volume(), 0.0);
        let vals = (0..sys.coefficient_count())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let c = CoeffArray::from_values(sys.time().len(), sys.freq().len(), vals).unwrap();
        let got = sys.synthesize(&c).unwrap();
        let want = &synth_oracle * nalgebra::DVector::from_column_slice(c.values());
        for (a, b) in got.values().iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // columns of the synthesis matrix entrywise
        let mut synth = DMatrix::<Complex64>::zeros(g.len(), sys.coefficient_count());
        for idx in 0..sys.coefficient_count() {
            let e =
                CoeffArray::delta(sys.time().len(), sys.freq().len(), idx / sys.freq().len(), idx % sys.freq().len());
            let col = sys.synthesize(&e).unwrap();
            for (k, v) in col.values().iter().enumerate() {
                synth[(k, idx)] = *v;
            }
        }
        let diff =
            (&synth * Complex64::new(g.cell_volume(), 0.0) - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn synthesis_of_deltas_gives_atoms() {
        let sys = gaussian_system(8.0, 64, 1.0, 0.5);
        let w = sys.window().clone();
        let (nt, nf) = (sys.time().len(), sys.freq().len());
        assert_eq!(sys.synthesize(&CoeffArray::delta(nt, nf, 0, 0)).unwrap(), w);
        let (i, j) = (3, 5);
        let atom = crate::grid::modulate(
            &crate::grid::translate(&w, &[sys.time().position(i)[0]]).unwrap(),
            &[sys.freq().position(j)[0]],
        )
        .unwrap();
        let got = sys.synthesize(&CoeffArray::delta(nt, nf, i, j)).unwrap();
        let d = got.sub(&atom).unwrap().max_abs();
        assert!(d < 1e-13);
        // analysis of an atom at its own lattice point returns ‖ψ‖²
        let c = sys.analyze(&atom).unwrap();
        assert!((c.get(i, j).norm() - w.l2_norm().powi(2)).abs() < 1e-12);
        assert!(sys.synthesize(&CoeffArray::zeros(nt + 1, nf)).is_err());
    }

    #[test]
    fn frame_operator_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sys = gaussian_system(8.0, 64, 1.0, 0.5);
        let g = *sys.grid();
        assert_eq!(sys.frame_apply(&GridSignal::zeros(g), None).unwrap().max_abs(), 0.0);
        for _ in 0..5 {
            let f = random_signal(g, &mut rng);
            let sf = sys.frame_apply(&f, None).unwrap();
            let q = sf.inner(&f).unwrap();
            assert!(q.re >= -1e-10 && q.im.abs() <= 1e-10 * q.re.abs().max(1.0));
        }
    }

    #[test]
    fn frame_operator_commutes_with_lattice_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sys = gaussian_system(8.0, 64, 1.0, 0.5);
        let f = random_signal(*sys.grid(), &mut rng);
        for (i, j) in [(1, 0), (2, 3), (5, 11)] {
            let shift = |s: &GridSignal| s.translate_flat(sys.time().node(i)).modulate_bins(sys.freq().signed_steps(j));
            let lhs = sys.frame_apply(&shift(&f), None).unwrap();
            let rhs = shift(&sys.frame_apply(&f, None).unwrap());
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-11);
        }
    }

    /// Painless configuration: `M = L` modulations make `S` diagonal.
    #[test]
    fn painless_frame_operator_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = PeriodicGrid::new(1, 8.0, 64).unwrap();
        let w = sample_gaussian(g, &[0.0], false).unwrap();
        let a_nodes = 8usize;
        let sys = GaborSystem::separable(w.clone(), a_nodes as f64 * g.spacing(), 1.0 / g.period()).unwrap();
        let profile: Vec<f64> = (0..64)
            .map(|t| (0..64 / a_nodes).map(|k| w.values()[(t + 64 - k * a_nodes) % 64].norm_sqr()).sum())
            .collect();
        // M Δ Σ_k |ψ(t - ka)|² with M = L
        let diag: Vec<f64> = profile.iter().map(|p| 64.0 * g.spacing() * p).collect();
        let f = random_signal(g, &mut rng);
        let sf = sys.frame_apply(&f, None).unwrap();
        for t in 0..64 {
            assert!((sf.values()[t] - f.values()[t] * diag[t]).norm() < 1e-12);
        }
        let cert = sys.frame_bounds(BoundsMethod::DenseEigen);
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(0.0, f64::max);
        assert!((cert.lower - lo).abs() < 1e-10 * hi && (cert.upper - hi).abs() < 1e-10 * hi);
        let dual = sys.dual_window_with(cert, DualWindowOptions::default()).unwrap();
        for t in 0..64 {
            let want = w.values()[t] / diag[t];
            assert!((dual.window.values()[t] - want).norm() <= 1e-10 * want.norm().max(1e-300) + 1e-12);
        }
    }

    #[test]
    fn tight_rectangular_frame() {
        let g = PeriodicGrid::new(1, 4.0, 32).unwrap();
        let a_nodes = 4usize;
        let w = GridSignal::from_node_fn(g, |k| Complex64::new(if k < a_nodes { 1.0 } else { 0.0 }, 0.0));
        let sys = GaborSystem::separable(w.clone(), a_nodes as f64 * g.spacing(), 1.0 / g.period()).unwrap();
        for method in [BoundsMethod::DenseEigen, BoundsMethod::PowerIteration, BoundsMethod::Lanczos] {
            let cert = sys.frame_bounds(method);
            assert!((cert.upper - cert.lower).abs() <= 1e-12 * cert.upper, "{cert:?}");
            // M Δ = P
            assert!((cert.upper - g.period()).abs() < 1e-12);
        }
        let dual = sys.dual_window(DualWindowOptions::default()).unwrap();
        let want = w.scale(Complex64::new(1.0 / g.period(), 0.0));
        assert!(dual.window.sub(&want).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn undersampled_system_is_not_a_frame() {
        let sys = gaussian_system(8.0, 64, 2.0, 1.0);
        assert!(sys.redundancy() < 1.0);
        for method in [BoundsMethod::DenseEigen, BoundsMethod::PowerIteration, BoundsMethod::Lanczos] {
            let cert = sys.frame_bounds(method);
            assert!(cert.lower <= 1e-10 * cert.upper, "{cert:?}");
            assert!(!cert.is_frame());
        }
        assert!(matches!(sys.dual_window(DualWindowOptions::default()), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        for (p, l, a, b) in [(16.0, 48, 1.0, 0.5), (16.0, 128, 1.0, 0.5), (8.0, 64, 0.5, 1.0)] {
            let sys = gaussian_system(p, l, a, b);
            let d = sys.frame_bounds(BoundsMethod::DenseEigen);
            let k = sys.frame_bounds(BoundsMethod::Lanczos);
            assert_eq!(k.method, CertificateMethod::Lanczos);
            assert!((d.lower - k.lower).abs() <= 1e-9 * d.upper, "{d:?} {k:?}");
            assert!((d.upper - k.upper).abs() <= 1e-9 * d.upper, "{d:?} {k:?}");
        }
        let sys = gaussian_system(16.0, 128, 1.0, 0.5);
        assert_eq!(sys.frame_bounds(BoundsMethod::Auto).method, CertificateMethod::Lanczos);
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        let sys = gaussian_system(16.0, 48, 1.0, 0.5);
        let d = sys.frame_bounds(BoundsMethod::DenseEigen);
        let p = sys.frame_bounds(BoundsMethod::PowerIteration);
        assert_eq!(d.method, CertificateMethod::DenseEigen);
        assert_eq!(p.method, CertificateMethod::PowerIteration);
        assert!((d.lower - p.lower).abs() <= 1e-6 * d.lower, "{d:?} {p:?}");
        assert!((d.upper - p.upper).abs() <= 1e-6 * d.upper, "{d:?} {p:?}");
    }

    #[test]
    fn canonical_dual_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sys = gaussian_system(16.0, 128, 1.0, 0.5);
        let dual = sys.dual_window(DualWindowOptions::default()).unwrap();
        assert!(dual.residual <= 1e-12, "{}", dual.residual);
        let wr = sys.wexler_raz_residual(&dual.window).unwrap();
        assert!(wr <= 1e-8, "{wr}");
        for _ in 0..5 {
            let f = random_signal(*sys.grid(), &mut rng);
            assert!(sys.reconstruction_error(&dual.window, &f).unwrap() <= 1e-8);
        }
        let f = random_signal(*sys.grid(), &mut rng);
        let doubled = dual.window.scale(Complex64::new(2.0, 0.0));
        let e = sys.reconstruction_error(&doubled, &f).unwrap();
        assert!((e - 1.0).abs() < 1e-8);
        assert!(matches!(
            sys.reconstruction_error(&dual.window, &GridSignal::zeros(*sys.grid())),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn wexler_raz_orthonormal_basis() {
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let width = (1.0 / g.spacing()) as usize;
        let w = GridSignal::from_node_fn(g, |k| Complex64::new(if k < width { 1.0 } else { 0.0 }, 0.0));
        let w = w.scale(Complex64::new(1.0 / w.l2_norm(), 0.0));
        let r = wexler_raz_residual_separable(&w, &w, 1.0, 1.0).unwrap();
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn wexler_raz_detects_unmatched_delta() {
        let sys = gaussian_system(16.0, 128, 1.0, 0.5);
        let zero = GridSignal::zeros(*sys.grid());
        let r = sys.wexler_raz_residual(&zero).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        // orthogonal pair: γ = ψ·e^{2πi t/Δ...} supported away from ψ in time is
        // still hit by the δ term at the origin
        let g = *sys.grid();
        let far = GridSignal::from_fn(g, |x| Complex64::new((-PI * (x[0] - 8.0).powi(2)).exp(), 0.0));
        assert!(sys.wexler_raz_residual(&far).unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn adjoint_of_sheared_lattice_is_aligned() {
        // entries of Λ are multiples of the step exactly when Λ⊥ contains the
        // dual period, so the adjoint of an aligned system is always aligned
        let g = PeriodicGrid::new(2, 4.0, 16).unwrap();
        let w = sample_gaussian(g, &[0.0, 0.0], false).unwrap();
        let time = GridLattice::time(crate::Lattice::from_rows(2, &[2.0, 1.0, 0.0, 2.0]).unwrap(), g).unwrap();
        let freq = GridLattice::frequency(crate::Lattice::from_rows(2, &[1.0, 0.25, 0.0, 1.0]).unwrap(), g).unwrap();
        let sys = GaborSystem::new(w, time, freq).unwrap();
        let adj = sys.adjoint().unwrap();
        assert_eq!(adj.time().len() * sys.freq().len(), g.len());
        assert_eq!(adj.freq().len() * sys.time().len(), g.len());
    }

    #[test]
    fn adjoint_composition_is_scaled_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = gaussian_system(16.0, 128, 1.0, 0.5);
        let dual = sys.dual_window(DualWindowOptions::default()).unwrap();
        let adj = sys.adjoint().unwrap();
        let adj_dual = adj.with_window(dual.window.clone()).unwrap();
        let (nt, nf) = (adj.time().len(), adj.freq().len());
        for _ in 0..3 {
            let vals = (0..nt * nf)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let c = CoeffArray::from_values(nt, nf, vals).unwrap();
            let back = adj.analyze(&adj_dual.synthesize(&c).unwrap()).unwrap();
            let scale = 1.0 / sys.lattice_volume();
            let err = back.values().iter().zip(c.values()).map(|(a, b)| (a * scale - b).norm()).fold(0.0, f64::max);
            assert!(err <= 1e-8, "{err}");
        }
    }

    #[test]
    fn certificate_json_shape() {
        let sys = gaussian_system(8.0, 32, 1.0, 0.5);
        let cert = sys.frame_bounds(BoundsMethod::Auto);
        let v = serde_json::to_value(&cert).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["A", "B", "method", "redundancy", "residual"]);
        assert_eq!(obj["method"], "dense-eigen");
    }
}
