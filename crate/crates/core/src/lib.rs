//! Exact arithmetic for the mirror map, instanton numbers and p-adic
//! Frobenius structures of MUM-type theta operators.
//!
//! The crate is organised around a small number of exact coefficient rings
//! (arbitrary-precision rationals, capped-precision p-adic numbers, and
//! fixed-modulus residue rings) and generic series/operator types over them:
//!
//! * [`padic`]: p-adic scalars with explicit relative precision, and the
//!   residue-ring scalar used by modular kernels.
//! * [`series`]: truncated power series, series with log-powers, and dense
//!   polynomials, generic over the coefficient ring.
//! * [`diffop`]: theta operators `sum a_i(t) theta^i`, the MUM condition,
//!   self-duality, and the Frobenius solution basis.
//! * [`mirror`]: canonical coordinate, Yukawa coupling, Lambert inversion,
//!   instanton numbers, and the p-integrality checks.
//! * [`geometry`]: Laurent polynomials, reflexive polytope data for the
//!   built-in families, lattice-point enumeration, and the period map.
//! * [`hassewitt`]: Hasse-Witt matrices, their unit-root conditions, and the
//!   face-block factorisation of their determinants at t = 0.
//! * [`reduce`]: pole-order reduction of admissible forms and the derivation
//!   of Picard-Fuchs operators from the built-in families.
//! * [`cartier`]: the Cartier operator and the p-adic Frobenius structure.
//!
//! Concrete type aliases for the common instantiations are exported at the
//! crate root.

pub mod cartier;
pub mod diffop;
pub mod error;
pub mod geometry;
pub mod hassewitt;
pub mod linalg;
pub mod mirror;
pub mod padic;
pub mod reduce;
pub mod scalar;
pub mod series;
pub mod normlaurent;

pub use error::Error;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Truncated series with exact rational coefficients.
pub type QSeries = series::TruncatedSeries<BigRational>;
/// Truncated series with exact integer coefficients.
pub type ZSeries = series::TruncatedSeries<BigInt>;
/// Truncated series with p-adic coefficients of capped relative precision.
pub type PadicSeries = series::TruncatedSeries<padic::PadicScalar>;
/// Truncated series with coefficients in a fixed residue ring Z/p^w.
pub type ResidueSeries = series::TruncatedSeries<scalar::Residue>;
/// Series with log-powers and exact rational coefficients.
pub type QLogSeries = series::LogSeries<BigRational>;
/// Dense polynomial with exact rational coefficients.
pub type QPoly = series::Poly<BigRational>;
/// Sparse Laurent polynomial with exact integer coefficients.
pub type ZLaurent = geometry::LaurentPoly<BigInt>;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
