use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::PeriodicGrid;
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Which copy of the grid a lattice lives on.
///
/// Time lattices use spacing `Δ` and period `P`; frequency lattices use
/// spacing `1/P` and period `L/P` (the frequency bins).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Time,
    Frequency,
}

/// A lattice whose points all fall on grid nodes and which is periodic with
/// the grid period, so that `Λ mod period` is a finite set of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLattice {
    lattice: Lattice,
    grid: PeriodicGrid,
    domain: Domain,
    /// flat node (or bin) indices, sorted
    nodes: Vec<usize>,
}

impl GridLattice {
    pub fn time(lattice: Lattice, grid: PeriodicGrid) -> Result<Self> {
        Self::build(lattice, grid, Domain::Time)
    }

    pub fn frequency(lattice: Lattice, grid: PeriodicGrid) -> Result<Self> {
        Self::build(lattice, grid, Domain::Frequency)
    }

    /// `a Z^n` on the time axis.
    pub fn time_step(grid: PeriodicGrid, a: f64) -> Result<Self> {
        Self::time(Lattice::scaled_integer(grid.dim(), a)?, grid)
    }

    /// `b Z^n` on the frequency axis.
    pub fn frequency_step(grid: PeriodicGrid, b: f64) -> Result<Self> {
        Self::frequency(Lattice::scaled_integer(grid.dim(), b)?, grid)
    }

    fn build(lattice: Lattice, grid: PeriodicGrid, domain: Domain) -> Result<Self> {
        let n = grid.dim();
        if lattice.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: lattice.dim() });
        }
        let (step, period) = match domain {
            Domain::Time => (grid.spacing(), grid.period()),
            Domain::Frequency => (1.0 / grid.period(), grid.points_per_axis() as f64 / grid.period()),
        };
        let a = lattice.generator();
        let mut steps = DMatrix::<i64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                steps[(i, j)] = PeriodicGrid::to_steps(a[(i, j)], step).ok_or_else(|| {
                    Error::NonAlignedLattice(format!(
                        "generator entry {} is not a multiple of the {:?} step {step}",
                        a[(i, j)],
                        domain
                    ))
                })?;
            }
        }
        // the lattice must contain period * Z^n
        for axis in 0..n {
            let mut e = vec![0.0; n];
            e[axis] = period;
            if lattice.coordinates_of(&e, 1e-9).is_none() {
                return Err(Error::NonAlignedLattice(format!(
                    "lattice does not tile the {:?} period {period}",
                    domain
                )));
            }
        }
        let l = grid.points_per_axis() as i64;
        let columns: Vec<[i64; 2]> = (0..n)
            .map(|j| {
                let mut c = [0i64; 2];
                for i in 0..n {
                    c[i] = steps[(i, j)];
                }
                c
            })
            .collect();
        // closure of {0} under the generator steps modulo L
        let mut seen = BTreeSet::new();
        let mut stack = vec![0usize];
        seen.insert(0usize);
        while let Some(node) = stack.pop() {
            let idx = grid.unflatten(node);
            for c in &columns {
                for sign in [1i64, -1] {
                    let mut next = [0usize; 2];
                    for i in 0..n {
                        next[i] = (idx[i] as i64 + sign * c[i]).rem_euclid(l) as usize;
                    }
                    let flat = grid.flatten(next);
                    if seen.insert(flat) {
                        stack.push(flat);
                    }
                }
            }
        }
        Ok(Self { lattice, grid, domain, nodes: seen.into_iter().collect() })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of lattice points per period.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Flat grid index (node or bin) of each lattice point.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> usize {
        self.nodes[i]
    }

    pub fn index_of(&self, flat: usize) -> Option<usize> {
        self.nodes.binary_search(&flat).ok()
    }

    /// Centered coordinate of point `i` (time position or frequency).
    pub fn position(&self, i: usize) -> [f64; 2] {
        match self.domain {
            Domain::Time => self.grid.centered_position(self.nodes[i]),
            Domain::Frequency => self.grid.frequency(self.nodes[i]),
        }
    }

    /// Euclidean norm `|λ|` of point `i`.
    pub fn norm(&self, i: usize) -> f64 {
        let p = self.position(i);
        (p[0] * p[0] + p[1] * p[1]).sqrt()
    }

    /// Signed integer offset (in grid steps) of point `i`.
    pub fn signed_steps(&self, i: usize) -> [i64; 2] {
        let idx = self.grid.unflatten(self.nodes[i]);
        let mut out = [self.grid.signed_index(idx[0]), self.grid.signed_index(idx[1])];
        if self.grid.dim() == 1 {
            out[1] = 0;
        }
        out
    }
}
