//! Cut-and-project schemes with internal group `ℝ^m × ℤ/N`, weighted model
//! sets, and numerical checks of their harmonic-analysis identities
//! (Poisson summation, density, autocorrelation and diffraction).
//!
//! Everything is generic over the floating-point type through [`Real`];
//! the aliases at the crate root fix `f64`, with `f32` variants for
//! memory-bound experiments.

// `!(x > 0)` is how parameters reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod grid;
pub mod harmonic;
pub mod lattice;
pub mod linalg;
pub mod pointset;
pub mod scalar;
pub mod scheme;
pub mod verify;
pub mod windows;

pub use error::{Error, Result};
pub use harmonic::{GaussianTest, PointMass, PurePointMeasure, Reflection, Side};
pub use lattice::Aabb;
pub use linalg::SquareMatrix;
pub use pointset::{VanHoveBox, WeightedPointSet};
pub use scalar::Real;
pub use scheme::{CutProjectScheme, DualLattice, DualPoint, SchemePoint, ValidationReport};

pub use verify::CheckReport;
pub use windows::{Boundary, Interval, WeightClass, WeightFunction, WeightKind};

pub type Complex64 = num_complex::Complex<f64>;

pub type Scheme = CutProjectScheme<f64>;
pub type Dual = DualLattice<f64>;
pub type Weight = WeightFunction<f64>;
pub type Region = VanHoveBox<f64>;
pub type Measure = PurePointMeasure<f64>;
pub type Gaussian = GaussianTest<f64>;

pub type Scheme32 = CutProjectScheme<f32>;
pub type Weight32 = WeightFunction<f32>;
pub type Region32 = VanHoveBox<f32>;
pub type Measure32 = PurePointMeasure<f32>;
