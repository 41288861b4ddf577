//! Certified generation and equidistribution analysis of sequences
//! `alpha beta^n g(beta) prod_j (beta^{h_j} - 1) + Q(n)` modulo one.
//!
//! The [`precision`] layer provides exact quadratic-field reals and ball
//! arithmetic; [`sequences`] builds certified samples; [`analysis`] measures
//! them; [`mobius`] supplies the Möbius comparison sequence and [`harness`]
//! runs parameter scans and named experiments.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod mobius;
pub mod precision;
pub mod scalar;
pub mod sequences;

pub use error::{Error, Result};

pub use analysis::Tabular;
pub use precision::{Ball, ExactReal, GExpr};
pub use sequences::{ModOneSample, SequenceSpec};

pub type Complex64 = num_complex::Complex<f64>;
pub type Jet = precision::Jet2<Ball>;
pub type RationalPolynomial = sequences::Polynomial<num_rational::BigRational>;
pub type ExactPolynomial = sequences::Polynomial<ExactReal>;
pub type ComplexSequence64 = sequences::ComplexSequence<f64>;
