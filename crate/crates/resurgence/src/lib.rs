//! Computational machinery for resurgent functions: truncated series and
//! their Borel transforms, analytic continuation of convolution products to
//! non-principal sheets by a flow-deformed simplex integral, nonlinear
//! operations on series (substitution, implicit functions, composition,
//! inversion), and Borel-Laplace summation.

pub mod convolution;
pub mod error;
pub mod flow;
pub mod germ;
pub mod io;
pub mod laplace;
pub mod nonlinear;
pub mod omega;
pub mod quad;
pub mod scalar;
pub mod selftest;
pub mod series;
pub mod simplex;

pub use error::{Error, Result};
pub use germ::Germ;
pub use omega::{OmegaSet, SurfacePath};
pub use scalar::{ExactComplex, Scalar, ScalarMode};
pub use series::{BorelSeries, TruncatedSeries};
