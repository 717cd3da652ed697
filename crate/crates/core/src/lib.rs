//! Gabor frames and translation-modulation invariant norms on finite periodic grids.
//!
//! The crate models `R^n` (n = 1, 2) by a periodic grid and provides:
//!
//! * [`lattice`]: lattices `A Z^n`, dual lattices, volumes and power weights.
//! * [`grid`]: grid signals, FFTs, time-frequency shifts, spectral derivatives,
//!   grid-aligned lattices and signal I/O.
//! * [`stft`]: the short-time Fourier transform and its lattice samples.
//! * [`gabor`]: analysis/synthesis/frame operators, frame bounds, canonical dual
//!   windows and Wexler–Raz certificates.
//! * [`spaces`]: continuous norms of concrete TMIB spaces and their discrete
//!   sequence-space counterparts, including the `s` / `s'` scales.
//! * [`smoothness`]: `D_E` seminorms, the lattice operators `S_phi` / `R_phi`
//!   and coefficient decay/growth profiles.

pub mod coeffs;
pub mod error;
pub mod gabor;
pub mod grid;
pub mod lattice;
pub mod smoothness;
pub mod spaces;
pub mod stft;

pub use coeffs::CoeffArray;
pub use error::{Error, Result};
pub use gabor::{BoundsMethod, DualWindow, DualWindowOptions, FrameCertificate, GaborSystem};
pub use grid::{Domain, GridLattice, GridSignal, PeriodicGrid};
pub use lattice::{Lattice, PowerWeight};
pub use num_complex::Complex64;
pub use spaces::{Exponent, SpaceSpec};
pub use stft::TFArray;
