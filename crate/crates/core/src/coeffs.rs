//! Coefficient arrays indexed by a product lattice `Λ₀ × Λ₁`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::io::fmt_f64;

/// Coefficients `c[λ₀, λ₁]`, row-major with the frequency index fastest.
///
/// Row `i` corresponds to the `i`-th point of the time lattice and column `j`
/// to the `j`-th point of the frequency lattice (both in the lattices' own
/// point order).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffArray {
    time_len: usize,
    freq_len: usize,
    values: Vec<Complex64>,
}

impl CoeffArray {
    pub fn zeros(time_len: usize, freq_len: usize) -> Self {
        Self { time_len, freq_len, values: vec![Complex64::default(); time_len * freq_len] }
    }

    pub fn from_values(time_len: usize, freq_len: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != time_len * freq_len {
            return Err(Error::IndexMismatch { expected: time_len * freq_len, got: values.len() });
        }
        Ok(Self { time_len, freq_len, values })
    }

    /// Single entry equal to one at `(i, j)`.
    pub fn delta(time_len: usize, freq_len: usize, i: usize, j: usize) -> Self {
        let mut c = Self::zeros(time_len, freq_len);
        c.set(i, j, Complex64::new(1.0, 0.0));
        c
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.time_len, self.freq_len)
    }

    pub fn time_len(&self) -> usize {
        self.time_len
    }

    pub fn freq_len(&self) -> usize {
        self.freq_len
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.freq_len + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.values[i * self.freq_len + j] = v;
    }

    /// Coefficients for time point `i`, indexed by the frequency lattice.
    pub fn time_row(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.freq_len..(i + 1) * self.freq_len]
    }

    /// The slice `(c[λ₀, λ₁])_{λ₀}` at frequency point `j`.
    pub fn freq_slice(&self, j: usize) -> Vec<Complex64> {
        (0..self.time_len).map(|i| self.get(i, j)).collect()
    }

    /// Plain `ℓ²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CoeffArray) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// CSV rows `t_index,f_index,re,im`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_index", "f_index", "re", "im"])?;
        for i in 0..self.time_len {
            for j in 0..self.freq_len {
                let v = self.get(i, j);
                w.write_record([i.to_string(), j.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
