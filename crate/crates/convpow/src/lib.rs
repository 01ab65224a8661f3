//! Numerical laboratory for convolution powers of probability measures on Z.
//!
//! The crate builds finitely supported (signed) measures on the integer
//! lattice, sweeps their convolution powers with certified l1 trimming,
//! and measures the quantities that decide whether a measure is Ritt,
//! has bounded angular ratio (BAR), satisfies the Fourier-side domination
//! hypothesis (H)/(H~), or obeys empirical weak-type (1,1) maximal
//! inequalities.
//!
//! Modules follow the pipeline:
//!
//! * [`lattice`] - dense measures on Z, convolution, power and Ritt sweeps;
//! * [`families`] - CM / CCM / SCM measures built from representative
//!   measures on `[0,1)`, plus the `1-(1-t)^gamma` and iterated-log families;
//! * [`spectral`] - Fourier transforms (coefficient path and nu-integral
//!   path), BAR/sector ratios, psi gauges, hypothesis (H) checks, chi
//!   sector analysis, proof-side integral diagnostics;
//! * [`monotone`] - complete monotonicity checks and the discrete/integral
//!   inequality characterizations with growth verdicts;
//! * [`maximal`] - maximal fields, empirical weak-type constants, the
//!   truncated square function and the spatial regularity scan.

pub mod error;
pub mod families;
pub mod lattice;
pub mod maximal;
pub mod monotone;
pub mod spectral;

mod util;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
