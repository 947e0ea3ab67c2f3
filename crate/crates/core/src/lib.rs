//! Weighted Young inequalities for nondecreasing functions.
//!
//! The crate evaluates both sides of Young-type inequalities where area is
//! replaced by the measure `rho(A) = int_A K(x, y) dx dy` of a nonnegative
//! kernel, for monotone functions with jumps and plateaus. Around that core
//! sit Legendre duality, gap bounds, quantile functions and c-convexity.

pub mod cconvex;
pub mod cli;
pub mod error;
pub mod legendre;
pub mod monotone;
pub mod numeric;
pub mod precision;
pub mod probability;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod young;

pub use error::{Error, Result};
pub use monotone::{Flavor, MonotoneFn, Piece, PseudoInverse, Side};
pub use quadrature::{IntegralResult, Kernel, KernelSpec, QuadConfig};
pub use young::{check_young, InequalityReport, YoungInstance};
