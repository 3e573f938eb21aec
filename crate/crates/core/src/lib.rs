//! Polynomial (Ince) solutions of the Dirac and Klein-Gordon equations for a
//! charged particle in a monochromatic plane wave propagating through a plasma.
//!
//! The pipeline is: physical inputs ([`physparams`]) give the coupling `a` and
//! the refractive index; [`inceop`] builds the finite three-term recurrence of
//! a solution family; [`eigensolve`] returns its real spectrum and coefficient
//! vectors; [`wavefn`] turns those into modulation functions and densities;
//! [`spinalg`] handles the Majorana gamma algebra; [`verify`] checks everything
//! against independent oracles.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod constants;
pub mod eigensolve;
pub mod error;
pub mod inceop;
pub mod physparams;
pub mod scalar;
pub mod spinalg;
pub mod verify;
pub mod wavefn;

pub use eigensolve::{solve_spectrum, SpectralDecomposition, SymmetricTridiagonal};
pub use error::{Error, Result};
pub use inceop::{
    build_operator, Basis, SolutionFamily, SolutionKind, SpinSign, TridiagonalOperator,
};
pub use physparams::{DeBroglieMomentum, DerivedQuantities, LaserInput, PlasmaInput, WaveConfig};
pub use scalar::Real;
pub use wavefn::{DensityProfile, ModulationFunction, Normalization};

pub type Operator = TridiagonalOperator<f64>;
pub type Spectrum = SpectralDecomposition<f64>;
pub type Modulation = ModulationFunction<f64>;
pub type Density = DensityProfile<f64>;
pub type OperatorF32 = TridiagonalOperator<f32>;
pub type SpectrumF32 = SpectralDecomposition<f32>;
