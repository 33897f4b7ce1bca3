//! Biunitary matrices built from pairs of complex Hadamard matrices.
//!
//! Every matrix is a [`LeggedMatrix`] over a real scalar `T` (`f32` or `f64`)
//! with complex entries. The modules build on each other:
//! [`tensor`] (legged matrices and conditional expectations) →
//! [`hadamard`] → [`tower`] (the recursive unitaries, Jones projections and
//! `BU(u,w;ℓ)`) → [`algebra`] (span closure, commutants) → [`squares`]
//! (biunitarity and commuting squares) → [`scenarios`] (end-to-end reports).
//!
//! ```
//! use biunitary::hadamard::fourier;
//! use biunitary::squares::is_biunitary_both;
//! use biunitary::tower::{biunitary_bu, TowerCache};
//! use biunitary::Tolerance64;
//!
//! let tol = Tolerance64::default();
//! let f = TowerCache::new(&fourier(3).unwrap(), &tol).unwrap();
//! let bu = biunitary_bu(&f, &f, 0).unwrap();
//! assert!(is_biunitary_both(&bu, (3, 3), &tol).unwrap().overall);
//! ```

pub mod algebra;
pub mod error;
pub mod hadamard;
pub mod lemmas;
pub mod linalg;
pub mod matrix_file;
pub mod props;
pub mod random;
pub mod report;
pub mod scalar;
pub mod scenarios;
pub mod squares;
pub mod tensor;
pub mod tower;

pub use error::{Error, Result};
pub use report::VerificationReport;
pub use scalar::Real;
pub use tensor::{LeggedMatrix, Tolerance, Verdict};

pub type LeggedMatrix64 = LeggedMatrix<f64>;
pub type LeggedMatrix32 = LeggedMatrix<f32>;
pub type Tolerance64 = Tolerance<f64>;
pub type Tolerance32 = Tolerance<f32>;
pub type AlgebraBasis64 = algebra::AlgebraBasis<f64>;
pub type AlgebraBasis32 = algebra::AlgebraBasis<f32>;
pub type TowerCache64 = tower::TowerCache<f64>;
pub type TowerCache32 = tower::TowerCache<f32>;
pub type SquareReport64 = squares::SquareReport<f64>;
