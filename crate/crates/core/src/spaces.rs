//! Weighted Lebesgue-type norms on grid signals and their discrete
//! counterparts `E_d(Λ)` on lattice coefficients.
//!
//! Continuous norms are quadrature sums over the grid. Weights
//! `(1 + |x|)^τ` are evaluated at the centered node positions (or frequencies,
//! or lattice points), never interpolated.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeffs::CoeffArray;
use crate::error::{Error, Result};
use crate::grid::{fft, Domain, GridLattice, GridSignal};
use crate::lattice::PowerWeight;
use crate::smoothness::s_phi;

/// Integrability exponent `p ∈ [1, ∞]`. Serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("exponent must lie in [1, inf], got {p}")))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `(Σ m·|v|^p)^{1/p}` or `max |v|`.
    fn sum(&self, values: impl Iterator<Item = f64>, measure: f64) -> f64 {
        match *self {
            Exponent::Infinity => values.fold(0.0, f64::max),
            Exponent::Finite(1.0) => values.sum::<f64>() * measure,
            Exponent::Finite(2.0) => (values.map(|v| v * v).sum::<f64>() * measure).sqrt(),
            Exponent::Finite(p) => (values.map(|v| v.powf(p)).sum::<f64>() * measure).powf(1.0 / p),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(t) if matches!(t.as_str(), "inf" | "Infinity" | "infinity") => f64::INFINITY,
            Raw::Text(t) => return Err(serde::de::Error::custom(format!("bad exponent {t:?}"))),
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

fn zero() -> f64 {
    0.0
}

/// A function space `E`, e.g. `{"kind":"Lp_w","p":2.0,"tau":1.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SpaceSpec {
    /// `‖f w‖_{L^p}`.
    #[serde(rename = "Lp_w")]
    LpW {
        p: Exponent,
        #[serde(default = "zero")]
        tau: f64,
    },
    /// Same norm as `L^∞_w`; on a finite grid the vanishing condition is vacuous.
    #[serde(rename = "C0_w")]
    C0W {
        #[serde(default = "zero")]
        tau: f64,
    },
    /// `L^{p1}(L^{p2})` on 2-D grids: `p2` over the second axis, then `p1` over the first.
    #[serde(rename = "MixedLp")]
    MixedLp {
        p1: Exponent,
        p2: Exponent,
        #[serde(default = "zero")]
        tau: f64,
    },
    /// `‖F^{-1} f‖_{L^p_w}` with the weight on the frequency side.
    #[serde(rename = "FourierLp_w")]
    FourierLpW {
        p: Exponent,
        #[serde(default = "zero")]
        tau: f64,
    },
}

impl SpaceSpec {
    pub fn lp(p: f64, tau: f64) -> Result<Self> {
        Ok(SpaceSpec::LpW { p: Exponent::new(p)?, tau })
    }

    pub fn l2() -> Self {
        SpaceSpec::LpW { p: Exponent::Finite(2.0), tau: 0.0 }
    }

    pub fn weight(&self) -> PowerWeight {
        match *self {
            SpaceSpec::LpW { tau, .. }
            | SpaceSpec::C0W { tau }
            | SpaceSpec::MixedLp { tau, .. }
            | SpaceSpec::FourierLpW { tau, .. } => PowerWeight::new(tau),
        }
    }

    pub fn is_solid(&self) -> bool {
        !matches!(self, SpaceSpec::FourierLpW { .. })
    }

    /// Metadata only: marks `C_{0,w}`.
    pub fn vanishes_at_infinity(&self) -> bool {
        matches!(self, SpaceSpec::C0W { .. })
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if let SpaceSpec::MixedLp { .. } = self {
            if dim != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: dim });
            }
        }
        if !self.weight().exponent.is_finite() {
            return Err(Error::InvalidParameter("weight exponent must be finite".into()));
        }
        Ok(())
    }
}

/// Quadrature norm `‖f‖_E`.
pub fn continuous_norm(f: &GridSignal, space: &SpaceSpec) -> Result<f64> {
    let g = *f.grid();
    space.validate(g.dim())?;
    let w = space.weight();
    let dv = g.cell_volume();
    let weighted = |k: usize, v: Complex64| v.norm() * w.eval(&g.centered_position(k)[..g.dim()]);
    Ok(match *space {
        SpaceSpec::LpW { p, .. } => p.sum(f.values().iter().enumerate().map(|(k, v)| weighted(k, *v)), dv),
        SpaceSpec::C0W { .. } => {
            Exponent::Infinity.sum(f.values().iter().enumerate().map(|(k, v)| weighted(k, *v)), dv)
        }
        SpaceSpec::MixedLp { p1, p2, .. } => {
            let l = g.points_per_axis();
            let d = g.spacing();
            let inner: Vec<f64> =
                (0..l).map(|i| p2.sum((0..l).map(|j| weighted(i * l + j, f.values()[i * l + j])), d)).collect();
            p1.sum(inner.into_iter(), d)
        }
        SpaceSpec::FourierLpW { p, .. } => {
            let mut spec = f.values().to_vec();
            fft::inverse_unnormalized(&g, &mut spec);
            let freq_cell = g.period().powi(-(g.dim() as i32));
            p.sum(spec.iter().enumerate().map(|(m, v)| v.norm() * dv * w.eval(&g.frequency(m)[..g.dim()])), freq_cell)
        }
    })
}

/// Weighted sequence norm of lattice coefficients for a solid space:
/// `ℓ^p_w(Λ)`, `ℓ^∞_w(Λ)` or `ℓ^{p1}(ℓ^{p2})` on a product lattice.
pub fn solid_discrete_norm(c: &[Complex64], lattice: &GridLattice, space: &SpaceSpec) -> Result<f64> {
    if c.len() != lattice.len() {
        return Err(Error::IndexMismatch { expected: lattice.len(), got: c.len() });
    }
    let dim = lattice.grid().dim();
    space.validate(dim)?;
    let w = space.weight();
    let weighted = |i: usize| c[i].norm() * w.eval(&lattice.position(i)[..dim]);
    match *space {
        SpaceSpec::LpW { p, .. } => Ok(p.sum((0..c.len()).map(weighted), 1.0)),
        SpaceSpec::C0W { .. } => Ok(Exponent::Infinity.sum((0..c.len()).map(weighted), 1.0)),
        SpaceSpec::MixedLp { p1, p2, .. } => {
            let a = lattice.lattice().generator();
            if a[(0, 1)] != 0.0 || a[(1, 0)] != 0.0 {
                return Err(Error::NotProductLattice);
            }
            // group by first coordinate; keys are exact grid indices
            let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for i in 0..c.len() {
                let idx = lattice.grid().unflatten(lattice.node(i));
                rows.entry(idx[0]).or_default().push(weighted(i));
            }
            Ok(p1.sum(rows.into_values().map(|r| p2.sum(r.into_iter(), 1.0)), 1.0))
        }
        SpaceSpec::FourierLpW { .. } => {
            Err(Error::NotSolid("Fourier-side spaces have no pointwise sequence norm".into()))
        }
    }
}

/// `E_d(Λ)` realized through a window `χ` with pairwise disjoint translates:
/// `‖c‖ = ‖Σ_λ c_λ T_λ χ‖_E`.
#[derive(Debug, Clone)]
pub struct DiscreteSpace {
    space: SpaceSpec,
    lattice: GridLattice,
    window: GridSignal,
}

impl DiscreteSpace {
    pub fn new(space: SpaceSpec, lattice: GridLattice, window: GridSignal) -> Result<Self> {
        if lattice.grid() != window.grid() {
            return Err(Error::GridMismatch);
        }
        if lattice.domain() != Domain::Time {
            return Err(Error::NonAlignedLattice("expected a time lattice".into()));
        }
        space.validate(window.grid().dim())?;
        let g = *window.grid();
        let support: Vec<usize> = (0..g.len()).filter(|&k| window.values()[k] != Complex64::default()).collect();
        let mut covered = vec![false; g.len()];
        for &s in lattice.nodes() {
            for &k in &support {
                let node = g.add_nodes(k, s);
                if covered[node] {
                    return Err(Error::OverlappingSupports { node });
                }
                covered[node] = true;
            }
        }
        Ok(Self { space, lattice, window })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    pub fn window(&self) -> &GridSignal {
        &self.window
    }

    pub fn norm(&self, c: &[Complex64]) -> Result<f64> {
        let s = s_phi(c, &self.lattice, &self.window)?;
        continuous_norm(&s, &self.space)
    }
}

/// One-shot form of [`DiscreteSpace::norm`].
pub fn discrete_norm(c: &[Complex64], lattice: &GridLattice, window: &GridSignal, space: &SpaceSpec) -> Result<f64> {
    DiscreteSpace::new(*space, lattice.clone(), window.clone())?.norm(c)
}

/// Grid nodes (or frequency bins) of the half-open fundamental domain
/// `A[0,1)^n` of a grid lattice, as flat indices together with their true
/// (unreduced) positions.
pub fn fundamental_domain_nodes(lattice: &GridLattice) -> Result<Vec<(usize, [f64; 2])>> {
    let g = *lattice.grid();
    let n = g.dim();
    let step = match lattice.domain() {
        Domain::Time => g.spacing(),
        Domain::Frequency => 1.0 / g.period(),
    };
    let a = lattice.lattice().generator();
    let inv = a.clone().try_inverse().ok_or_else(|| Error::InvalidLattice("singular".into()))?;
    let mut seen = BTreeMap::new();
    for k in 0..g.len() {
        let idx = g.unflatten(k);
        let x: Vec<f64> = (0..n).map(|i| idx[i] as f64 * step).collect();
        let y = &inv * nalgebra::DVector::from_column_slice(&x);
        let frac = y.map(|v| {
            let r = v.round();
            let v = if (v - r).abs() < 1e-9 { r } else { v };
            v - v.floor()
        });
        let p = a * frac;
        let mut pos = [0.0; 2];
        let mut steps = [0i64; 2];
        for i in 0..n {
            steps[i] = (p[i] / step).round() as i64;
            pos[i] = steps[i] as f64 * step;
        }
        seen.entry(steps).or_insert((g.flatten([g.wrap(steps[0]), g.wrap(steps[1])]), pos));
    }
    Ok(seen.into_values().collect())
}

/// Norm in `(FE)_d(Λ)` for a time lattice `Λ`: the `Λ⊥`-periodic
/// `g(ξ) = Σ c_λ e^{2πiλ·ξ}` measured by `‖g 1_I‖_{L^p_w}` over the
/// fundamental domain `I` of `Λ⊥` on the frequency bins.
pub fn fourier_side_norm(c: &[Complex64], lattice: &GridLattice, space: &SpaceSpec) -> Result<f64> {
    let (p, tau) = match *space {
        SpaceSpec::FourierLpW { p, tau } | SpaceSpec::LpW { p, tau } => (p, tau),
        _ => return Err(Error::InvalidParameter("expected an Lp-type space".into())),
    };
    if lattice.domain() != Domain::Time {
        return Err(Error::NonAlignedLattice("expected a time lattice".into()));
    }
    if c.len() != lattice.len() {
        return Err(Error::IndexMismatch { expected: lattice.len(), got: c.len() });
    }
    let g = *lattice.grid();
    let mut buf = vec![Complex64::default(); g.len()];
    for (i, &node) in lattice.nodes().iter().enumerate() {
        buf[node] += c[i];
    }
    // buf[m] = Σ_λ c_λ e^{2πi λ·ξ_m}
    fft::inverse_unnormalized(&g, &mut buf);
    let dual = GridLattice::frequency(lattice.lattice().dual()?, g)?;
    let w = PowerWeight::new(tau);
    let nodes = fundamental_domain_nodes(&dual)?;
    Ok(p.sum(nodes.iter().map(|(k, pos)| buf[*k].norm() * w.eval(&pos[..g.dim()])), g.period().powi(-(g.dim() as i32))))
}

/// `sup_λ values_λ (1 + |λ|)^s`.
pub fn weighted_sup(values: &[f64], lattice: &GridLattice, exponent: f64) -> Result<f64> {
    if values.len() != lattice.len() {
        return Err(Error::IndexMismatch { expected: lattice.len(), got: values.len() });
    }
    Ok(values.iter().enumerate().map(|(i, v)| v * (1.0 + lattice.norm(i)).powf(exponent)).fold(0.0, f64::max))
}

/// `sup_λ |c_λ| (1 + |λ|)^N`.
pub fn s_seminorm(c: &[Complex64], lattice: &GridLattice, order: u32) -> Result<f64> {
    let v: Vec<f64> = c.iter().map(|z| z.norm()).collect();
    weighted_sup(&v, lattice, order as f64)
}

/// `sup_λ |c_λ| (1 + |λ|)^{-N}`.
pub fn s_prime_norm(c: &[Complex64], lattice: &GridLattice, order: u32) -> Result<f64> {
    let v: Vec<f64> = c.iter().map(|z| z.norm()).collect();
    weighted_sup(&v, lattice, -(order as f64))
}

/// Norms `‖(c_{λ₀,λ₁})_{λ₀}‖_{E_d(Λ₀)}` of every frequency slice.
pub fn slice_norms(c: &CoeffArray, time: &GridLattice, space: &SpaceSpec) -> Result<Vec<f64>> {
    if c.time_len() != time.len() {
        return Err(Error::IndexMismatch { expected: time.len(), got: c.time_len() });
    }
    (0..c.freq_len()).map(|j| solid_discrete_norm(&c.freq_slice(j), time, space)).collect()
}

/// `s(Λ₁; E_d(Λ₀))` seminorm of order `N`.
pub fn nested_s_seminorm(
    c: &CoeffArray,
    time: &GridLattice,
    freq: &GridLattice,
    space: &SpaceSpec,
    order: u32,
) -> Result<f64> {
    weighted_sup(&slice_norms(c, time, space)?, freq, order as f64)
}

/// `s′(Λ₁; E_d(Λ₀))` norm of order `N`.
pub fn nested_s_prime_norm(
    c: &CoeffArray,
    time: &GridLattice,
    freq: &GridLattice,
    space: &SpaceSpec,
    order: u32,
) -> Result<f64> {
    weighted_sup(&slice_norms(c, time, space)?, freq, -(order as f64))
}

/// Empirical equivalence constant from a family of norm ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceEstimate {
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max(max_ratio, 1/min_ratio)`.
    pub constant: f64,
}

impl EquivalenceEstimate {
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        if ratios.is_empty() || ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("ratios must be positive and finite".into()));
        }
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        Ok(Self { samples: ratios.len(), min_ratio, max_ratio, constant: max_ratio.max(1.0 / min_ratio) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{modulate, sample_bump, PeriodicGrid};
    use crate::lattice::Lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> GridSignal {
        GridSignal::from_node_fn(grid, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_coeffs(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn spec_json_roundtrip() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"Lp_w","p":2.0,"tau":1.5}"#).unwrap();
        assert_eq!(s, SpaceSpec::LpW { p: Exponent::Finite(2.0), tau: 1.5 });
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"MixedLp","p1":1,"p2":"inf"}"#).unwrap();
        assert_eq!(s, SpaceSpec::MixedLp { p1: Exponent::Finite(1.0), p2: Exponent::Infinity, tau: 0.0 });
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"Lp_w","p":0.5}"#).is_err());
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"Sobolev","p":2}"#).is_err());
    }

    #[test]
    fn elementary_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = PeriodicGrid::new(1, 4.0, 64).unwrap();
        assert_eq!(continuous_norm(&GridSignal::zeros(g), &SpaceSpec::l2()).unwrap(), 0.0);
        let spike = GridSignal::delta(g, 5).scale(Complex64::new(3.0, 0.0));
        let l1 = continuous_norm(&spike, &SpaceSpec::lp(1.0, 0.0).unwrap()).unwrap();
        assert!((l1 - 3.0 * g.spacing()).abs() < 1e-15);
        let f = random_signal(g, &mut rng);
        let direct = (g.spacing() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
        assert!((continuous_norm(&f, &SpaceSpec::l2()).unwrap() - direct).abs() < 1e-12);
        let fourier = SpaceSpec::FourierLpW { p: Exponent::Finite(2.0), tau: 0.0 };
        assert!((continuous_norm(&f, &fourier).unwrap() - direct).abs() < 1e-10);
        let sup = continuous_norm(&f, &SpaceSpec::C0W { tau: 0.0 }).unwrap();
        assert_eq!(sup, f.max_abs());
        let mixed = SpaceSpec::MixedLp { p1: Exponent::Finite(2.0), p2: Exponent::Finite(2.0), tau: 0.0 };
        assert!(matches!(continuous_norm(&f, &mixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mixed_norm_orders_axes() {
        let g = PeriodicGrid::new(2, 2.0, 4).unwrap();
        // row 0 holds (1, 1, 0, 0), other rows zero
        let f = GridSignal::from_node_fn(g, |k| Complex64::new(if k < 2 { 1.0 } else { 0.0 }, 0.0));
        let d = g.spacing();
        let s = SpaceSpec::MixedLp { p1: Exponent::Finite(1.0), p2: Exponent::Infinity, tau: 0.0 };
        assert!((continuous_norm(&f, &s).unwrap() - d).abs() < 1e-15);
        let s = SpaceSpec::MixedLp { p1: Exponent::Infinity, p2: Exponent::Finite(1.0), tau: 0.0 };
        assert!((continuous_norm(&f, &s).unwrap() - 2.0 * d).abs() < 1e-15);
        let s = SpaceSpec::MixedLp { p1: Exponent::Finite(2.0), p2: Exponent::Finite(2.0), tau: 0.0 };
        assert!((continuous_norm(&f, &s).unwrap() - continuous_norm(&f, &SpaceSpec::l2()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn weighted_norm_uses_centered_positions() {
        let g = PeriodicGrid::new(1, 8.0, 16).unwrap();
        let last = GridSignal::delta(g, 15);
        let s = SpaceSpec::C0W { tau: 2.0 };
        // node 15 sits at x = -0.5
        assert!((continuous_norm(&last, &s).unwrap() - 2.25).abs() < 1e-14);
    }

    #[test]
    fn solid_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let lat = GridLattice::time_step(g, 1.0).unwrap();
        let c = CoeffArray::delta(1, 16, 0, 3);
        let s = SpaceSpec::LpW { p: Exponent::Finite(3.0), tau: 2.0 };
        assert!((solid_discrete_norm(c.values(), &lat, &s).unwrap() - 16.0).abs() < 1e-12);
        let c = random_coeffs(16, &mut rng);
        let eu = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!((solid_discrete_norm(&c, &lat, &SpaceSpec::l2()).unwrap() - eu).abs() < 1e-12);
        let fourier = SpaceSpec::FourierLpW { p: Exponent::Finite(2.0), tau: 0.0 };
        assert!(matches!(solid_discrete_norm(&c, &lat, &fourier), Err(Error::NotSolid(_))));
        assert!(matches!(solid_discrete_norm(&c[..3], &lat, &SpaceSpec::l2()), Err(Error::IndexMismatch { .. })));
    }

    #[test]
    fn mixed_sequence_norm_needs_product_lattice() {
        let g = PeriodicGrid::new(2, 4.0, 16).unwrap();
        let mixed = SpaceSpec::MixedLp { p1: Exponent::Finite(1.0), p2: Exponent::Infinity, tau: 0.0 };
        let diag = GridLattice::time_step(g, 1.0).unwrap();
        // c = 1 on the lattice row with first coordinate 0, else 0
        let c: Vec<Complex64> =
            (0..diag.len()).map(|i| Complex64::new(if diag.position(i)[0] == 0.0 { 1.0 } else { 0.0 }, 0.0)).collect();
        assert_eq!(solid_discrete_norm(&c, &diag, &mixed).unwrap(), 1.0);
        let swapped = SpaceSpec::MixedLp { p1: Exponent::Infinity, p2: Exponent::Finite(1.0), tau: 0.0 };
        assert_eq!(solid_discrete_norm(&c, &diag, &swapped).unwrap(), 4.0);
        let shear = GridLattice::time(Lattice::from_rows(2, &[1.0, 1.0, 0.0, 1.0]).unwrap(), g).unwrap();
        let c = vec![Complex64::new(1.0, 0.0); shear.len()];
        assert!(matches!(solid_discrete_norm(&c, &shear, &mixed), Err(Error::NotProductLattice)));
    }

    #[test]
    fn discrete_norm_with_bump() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let lat = GridLattice::time_step(g, 1.0).unwrap();
        let chi = sample_bump(g, &[0.0], 0.45).unwrap();
        let space = DiscreteSpace::new(SpaceSpec::lp(3.0, 0.0).unwrap(), lat.clone(), chi.clone()).unwrap();
        assert_eq!(space.norm(&vec![Complex64::default(); 16]).unwrap(), 0.0);
        let mut c = vec![Complex64::default(); 16];
        c[5] = Complex64::new(1.0, 0.0);
        let chi_norm = continuous_norm(&chi, &SpaceSpec::lp(3.0, 0.0).unwrap()).unwrap();
        assert!((space.norm(&c).unwrap() - chi_norm).abs() < 1e-14);
        // weighted closed form from disjointness
        let spec = SpaceSpec::lp(1.5, 1.0).unwrap();
        let c = random_coeffs(16, &mut rng);
        let pieces: Vec<f64> = (0..16)
            .map(|i| {
                let t = chi.translate_flat(lat.node(i));
                continuous_norm(&t, &spec).unwrap().powf(1.5)
            })
            .collect();
        let closed = (0..16).map(|i| c[i].norm().powf(1.5) * pieces[i]).sum::<f64>().powf(1.0 / 1.5);
        let got = discrete_norm(&c, &lat, &chi, &spec).unwrap();
        assert!((got - closed).abs() <= 1e-12 * closed);
        let wide = sample_bump(g, &[0.0], 0.7).unwrap();
        assert!(matches!(discrete_norm(&c, &lat, &wide, &spec), Err(Error::OverlappingSupports { .. })));
    }

    #[test]
    fn fourier_side_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let lat = GridLattice::time_step(g, 0.5).unwrap();
        let vol_dual = 2.0;
        let mut c = vec![Complex64::default(); lat.len()];
        c[0] = Complex64::new(1.0, 0.0);
        let l1 = SpaceSpec::FourierLpW { p: Exponent::Finite(1.0), tau: 0.0 };
        assert!((fourier_side_norm(&c, &lat, &l1).unwrap() - vol_dual).abs() < 1e-12);
        let c = random_coeffs(lat.len(), &mut rng);
        let l2 = SpaceSpec::FourierLpW { p: Exponent::Finite(2.0), tau: 0.0 };
        let eu = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let got = fourier_side_norm(&c, &lat, &l2).unwrap();
        assert!((got - vol_dual.sqrt() * eu).abs() < 1e-10);
        assert!(matches!(
            fourier_side_norm(&c, &GridLattice::frequency_step(g, 1.0).unwrap(), &l2),
            Err(Error::NonAlignedLattice(_))
        ));
    }

    #[test]
    fn fourier_side_conjugate_pair_is_real() {
        let g = PeriodicGrid::new(1, 8.0, 64).unwrap();
        let lat = GridLattice::time_step(g, 0.25).unwrap();
        let j = lat.index_of(g.wrap(2)).unwrap();
        let jm = lat.index_of(g.wrap(-2)).unwrap();
        let mut c = vec![Complex64::default(); lat.len()];
        c[j] = Complex64::new(0.3, 0.7);
        c[jm] = c[j].conj();
        let mut buf = vec![Complex64::default(); g.len()];
        for (i, &bin) in lat.nodes().iter().enumerate() {
            buf[bin] += c[i];
        }
        fft::inverse_unnormalized(&g, &mut buf);
        assert!(buf.iter().all(|v| v.im.abs() < 1e-13));
    }

    #[test]
    fn fundamental_domain_of_sheared_lattice() {
        let g = PeriodicGrid::new(2, 4.0, 8).unwrap();
        let lat = GridLattice::time(Lattice::from_rows(2, &[1.0, 0.5, 0.0, 1.0]).unwrap(), g).unwrap();
        let nodes = fundamental_domain_nodes(&lat).unwrap();
        let vol = lat.lattice().volume();
        assert_eq!(nodes.len() as f64 * g.cell_volume(), vol);
        for (_, pos) in nodes {
            let y = lat.lattice().generator().clone().try_inverse().unwrap()
                * nalgebra::DVector::from_column_slice(&pos[..2]);
            assert!(y.iter().all(|v| *v >= -1e-12 && *v < 1.0));
        }
    }

    #[test]
    fn fundamental_domain_of_frequency_lattice() {
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let lat = GridLattice::frequency_step(g, 0.5).unwrap();
        let nodes = fundamental_domain_nodes(&lat).unwrap();
        assert_eq!(nodes.len(), 8);
        for (k, (flat, pos)) in nodes.iter().enumerate() {
            assert_eq!(*flat, k);
            assert!((pos[0] - k as f64 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn s_scales() {
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let lat = GridLattice::frequency_step(g, 0.5).unwrap();
        let mut c = vec![Complex64::default(); lat.len()];
        c[0] = Complex64::new(1.0, 0.0);
        for n in 0..5 {
            assert_eq!(s_seminorm(&c, &lat, n).unwrap(), 1.0);
            assert_eq!(s_prime_norm(&c, &lat, n).unwrap(), 1.0);
        }
        let c: Vec<Complex64> = (0..lat.len()).map(|i| Complex64::new((1.0 + lat.norm(i)).powi(-3), 0.0)).collect();
        assert!((s_seminorm(&c, &lat, 3).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nested_scales_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = PeriodicGrid::new(1, 16.0, 256).unwrap();
        let time = GridLattice::time_step(g, 1.0).unwrap();
        let freq = GridLattice::frequency_step(g, 0.5).unwrap();
        let c = CoeffArray::from_values(16, 32, random_coeffs(16 * 32, &mut rng)).unwrap();
        let space = SpaceSpec::lp(2.0, 1.0).unwrap();
        for n in [0u32, 2, 4] {
            let mut want_s = 0.0f64;
            let mut want_sp = 0.0f64;
            for j in 0..32 {
                let inner = solid_discrete_norm(&c.freq_slice(j), &time, &space).unwrap();
                let w = 1.0 + freq.position(j)[0].abs();
                want_s = want_s.max(inner * w.powi(n as i32));
                want_sp = want_sp.max(inner * w.powi(-(n as i32)));
            }
            let got_s = nested_s_seminorm(&c, &time, &freq, &space, n).unwrap();
            let got_sp = nested_s_prime_norm(&c, &time, &freq, &space, n).unwrap();
            assert!((got_s - want_s).abs() <= 1e-12 * want_s);
            assert!((got_sp - want_sp).abs() <= 1e-12 * want_sp);
        }
    }

    #[test]
    fn modulation_is_isometric_for_solid_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = PeriodicGrid::new(1, 8.0, 64).unwrap();
        let f = random_signal(g, &mut rng);
        for s in [SpaceSpec::lp(1.0, 1.0).unwrap(), SpaceSpec::lp(2.5, -1.0).unwrap(), SpaceSpec::C0W { tau: 2.0 }] {
            let m = modulate(&f, &[0.375]).unwrap();
            let (a, b) = (continuous_norm(&f, &s).unwrap(), continuous_norm(&m, &s).unwrap());
            assert!((a - b).abs() <= 1e-13 * a);
        }
    }

    #[test]
    fn equivalence_estimate() {
        let e = EquivalenceEstimate::from_ratios(&[0.5, 1.0, 3.0]).unwrap();
        assert_eq!(e.constant, 3.0);
        let e = EquivalenceEstimate::from_ratios(&[0.2, 1.0]).unwrap();
        assert_eq!(e.constant, 5.0);
        assert!(EquivalenceEstimate::from_ratios(&[]).is_err());
    }
}
