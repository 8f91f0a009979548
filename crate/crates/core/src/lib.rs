//! Structural invariants of finite-dimensional complex evolution algebras.
//!
//! An evolution algebra has a natural basis `e_1, …, e_n` with `e_i e_j = 0`
//! for `i ≠ j`; its whole multiplication is the structure matrix whose row
//! `i` holds the coordinates of `e_i²`. This crate computes idempotents,
//! one-dimensional subalgebras, derived series, right-nilpotency and
//! completeness obstructions, solving the underlying quadratic systems with
//! total-degree homotopy continuation.
//!
//! Linear algebra and the algebra data model are generic over [`Scalar`]:
//! use [`C64`] for floating complex work and [`ExactComplex`] for exact
//! Gaussian rationals. The continuation solver always runs on [`C64`].

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod json;
pub mod linalg;
pub mod quadratic;
pub mod scalar;
pub mod solver;

use num_complex::Complex;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use evolution::{ClassificationKind, Element, EvolutionAlgebra, Subspace};
pub use json::AnyAlgebra;
pub use linalg::Matrix;
pub use quadratic::{QuadraticSystem, SystemKind};
pub use scalar::{FloatReal, Scalar};
pub use solver::{Solution, SolveOutcome, SolverConfig};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
/// Exact Gaussian rational.
pub type ExactComplex = Complex<BigRational>;

pub type FloatMatrix = Matrix<C64>;
pub type ExactMatrix = Matrix<ExactComplex>;
pub type FloatAlgebra = EvolutionAlgebra<C64>;
pub type ExactAlgebra = EvolutionAlgebra<ExactComplex>;
pub type FloatElement = Element<C64>;
