//! Numerical toolkit for locally uniformly elliptic fully nonlinear equations:
//! operator evaluation and ellipticity probing, monotone Dirichlet solvers,
//! minimax polynomial fits and pointwise regularity measurement.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod polyfit;
pub mod polynomial;
pub mod regularity;
pub mod simplex;
pub mod solver;

pub use error::{Error, Result};
pub use grid::GridFunction;
pub use linalg::SymMatrix;
pub use operators::{Family, Jet, OperatorSpec};
pub use polynomial::Polynomial;
