//! Truncated Dirichlet-series arithmetic, composition symbols on vertical
//! half-planes, Koenigs conjugacy solvers, commutant criteria, a disc-side
//! Taylor toolkit, and weighted-shift commutant models.
//!
//! Everything works on finite truncations: a Dirichlet series is its
//! coefficient vector a_1..a_N, a Taylor series its coefficients b_0..b_M.
//! The truncated object is treated as exact. Operations that are exact on
//! the truncation (convolution, composition, triangular solves) carry no
//! tolerance; iterative schemes take a tolerance and report residuals.

mod concurrency;

pub mod config;
pub mod criteria;
pub mod disc;
pub mod error;
pub mod koenigs;
pub mod linalg;
pub mod selftest;
pub mod series;
pub mod shifts;
pub mod symbols;
pub mod verdict;

pub use config::RunConfig;
pub use error::Error;
pub use series::DirichletSeries;
pub use symbols::Symbol;
pub use verdict::{Status, Verdict};

/// Complex scalar used throughout.
pub type Cplx = num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

/// Coefficients with modulus at or below this are treated as absent
/// (leading-term detection, support checks, serialization of zeros).
pub const ZERO_TOL: f64 = 1e-12;
