//! Lattices `Λ = A Z^n` and power weights `(1 + |x|)^τ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A full-rank lattice `Λ = A Z^n`, stored by its generator matrix `A`
/// (columns are the basis vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    generator: DMatrix<f64>,
}

impl Lattice {
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        let n = generator.nrows();
        if n == 0 || generator.ncols() != n {
            return Err(Error::InvalidLattice(format!(
                "generator must be square and non-empty, got {}x{}",
                generator.nrows(),
                generator.ncols()
            )));
        }
        if generator.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice("non-finite generator entry".into()));
        }
        let det = generator.determinant();
        let scale: f64 = generator.column_iter().map(|c| c.norm()).product();
        if det == 0.0 || det.abs() <= 1e-12 * scale {
            return Err(Error::InvalidLattice(format!("singular generator (det = {det:e})")));
        }
        Ok(Self { generator })
    }

    /// Builds a lattice from a row-major `dim x dim` generator.
    pub fn from_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::InvalidLattice(format!("expected {} generator entries, got {}", dim * dim, rows.len())));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, rows))
    }

    /// `a Z^n`.
    pub fn scaled_integer(dim: usize, a: f64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal_element(dim, dim, a))
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Generator in row-major order, the layout used by JSON configs.
    pub fn to_rows(&self) -> Vec<f64> {
        self.generator.transpose().iter().copied().collect()
    }

    pub fn volume(&self) -> f64 {
        self.generator.determinant().abs()
    }

    /// `Λ⊥ = (A^t)^{-1} Z^n`.
    pub fn dual(&self) -> Result<Lattice> {
        let inv = self
            .generator
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::InvalidLattice("singular generator".into()))?;
        Lattice::new(inv)
    }

    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        assert_eq!(coords.len(), self.dim(), "integer coordinate length");
        let z = nalgebra::DVector::from_iterator(coords.len(), coords.iter().map(|&c| c as f64));
        (&self.generator * z).iter().copied().collect()
    }

    /// All points `A z` with every `z_i` in `lo..=hi`.
    pub fn points_in_box(&self, lo: i64, hi: i64) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut z = vec![lo; n];
        if lo > hi {
            return out;
        }
        loop {
            out.push(self.point(&z));
            let mut axis = 0;
            loop {
                if axis == n {
                    return out;
                }
                z[axis] += 1;
                if z[axis] <= hi {
                    break;
                }
                z[axis] = lo;
                axis += 1;
            }
        }
    }

    /// Integer coordinates of `x` in this lattice, if `x ∈ Λ` within `tol`.
    pub fn coordinates_of(&self, x: &[f64], tol: f64) -> Option<Vec<i64>> {
        let inv = self.generator.clone().try_inverse()?;
        let v = nalgebra::DVector::from_column_slice(x);
        let z = inv * v;
        let mut out = Vec::with_capacity(z.len());
        for zi in z.iter() {
            let r = zi.round();
            if (zi - r).abs() > tol * r.abs().max(1.0) {
                return None;
            }
            out.push(r as i64);
        }
        Some(out)
    }

    /// True when both generators span the same lattice, i.e. they differ by a
    /// unimodular integer matrix.
    pub fn same_lattice(&self, other: &Lattice, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let Some(inv) = self.generator.clone().try_inverse() else {
            return false;
        };
        let u = inv * &other.generator;
        let integral = u.iter().all(|v| (v - v.round()).abs() <= tol);
        integral && (u.map(f64::round).determinant().abs() - 1.0).abs() <= tol
    }
}

/// `w(x) = (1 + |x|)^τ` with the Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub exponent: f64,
}

impl PowerWeight {
    pub const UNIT: PowerWeight = PowerWeight { exponent: 0.0 };

    pub fn new(exponent: f64) -> Self {
        Self { exponent }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.exponent == 0.0 {
            return 1.0;
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        (1.0 + r).powf(self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dual_of_scalar_lattice() {
        let l = Lattice::from_rows(1, &[2.0]).unwrap();
        let d = l.dual().unwrap();
        assert!(close(d.generator()[(0, 0)], 0.5, 1e-15));
        assert_eq!(l.volume(), 2.0);
    }

    #[test]
    fn integer_lattice_is_self_dual() {
        let l = Lattice::from_rows(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let d = l.dual().unwrap();
        assert_eq!(d.to_rows(), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(l.volume(), 1.0);
    }

    #[test]
    fn shear_dual_and_integrality() {
        let l = Lattice::from_rows(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let d = l.dual().unwrap();
        let expect = [1.0, 0.0, -1.0, 1.0];
        for (got, want) in d.to_rows().iter().zip(expect) {
            assert!(close(*got, want, 1e-14));
        }
        // brute-force integrality over the index box [-3, 3]^2
        for p in l.points_in_box(-3, 3) {
            for q in d.points_in_box(-3, 3) {
                let dot: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
                assert!(close(dot, dot.round(), 1e-12), "{p:?}·{q:?} = {dot}");
            }
        }
        // cofactor expansion
        let a = l.generator();
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        assert!(close(l.volume(), det.abs(), 1e-15));
        assert!(close(l.volume(), 1.0, 1e-15));
    }

    #[test]
    fn singular_generator_rejected() {
        assert!(matches!(Lattice::from_rows(2, &[1.0, 2.0, 2.0, 4.0]), Err(Error::InvalidLattice(_))));
        assert!(Lattice::from_rows(1, &[0.0]).is_err());
        assert!(Lattice::from_rows(2, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn double_dual_is_same_lattice() {
        let l = Lattice::from_rows(2, &[0.5, 0.25, -0.125, 2.0]).unwrap();
        let dd = l.dual().unwrap().dual().unwrap();
        assert!(l.same_lattice(&dd, 1e-10));
        let other = Lattice::from_rows(2, &[1.0, 0.0, 0.0, 2.0]).unwrap();
        assert!(!l.same_lattice(&other, 1e-10));
    }

    #[test]
    fn weight_values() {
        assert_eq!(PowerWeight::new(0.0).eval(&[7.0, -3.0]), 1.0);
        assert!(close(PowerWeight::new(2.0).eval(&[3.0, 4.0]), 36.0, 1e-12));
        assert!(close(PowerWeight::new(-1.0).eval(&[1.0, 0.0, 0.0]), 0.5, 1e-15));
    }
}
