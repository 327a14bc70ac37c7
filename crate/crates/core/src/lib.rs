//! Numerical toolkit for the fermion-antifermion Two-Body Dirac equations:
//! gamma algebra, constraint operators on spectral grids, tensor currents
//! and their conserved completions, interacting norm kernels, positivity
//! scans and an indefinite-metric toy model.

pub mod currents;
pub mod error;
pub mod grid;
pub mod kinematics;
pub mod operators;
pub mod positivity;
pub mod potentials;
pub mod registry;
pub mod scalar_product;
pub mod spinor;
pub mod toy_model;

pub use error::{Error, Result};
pub use grid::{Grid3, SpinorGrid};
pub use kinematics::{FourVector, MassPair};
pub use potentials::Potential;
pub use spinor::{GammaSet, Spinor16, TwoBodySpinOp};
