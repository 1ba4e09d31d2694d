//! Numerics for divisor sums over integers with a missing digit.
//!
//! The crate is organised around the circle-method decomposition of
//! `Σ d₂(n)` over `(X, X+H]*`, the integers in a short interval whose base-`g`
//! expansion avoids one digit `b`:
//!
//! * [`ntheory`]: interval divisor sieve, Möbius/totient sieves, Ramanujan sums.
//! * [`digitset`]: membership, digit-DFS enumeration and interval sizing.
//! * [`expsum`]: divisor-weighted and digit-set exponential sums.
//! * [`circle`]: Farey dissection, major-arc integrals and the main-term assembler.
//! * [`voronoi`]: twisted Voronoi main terms, `Δ(a/q; x)` and the second moment.
//! * [`explab`]: experiment diagnostics plus CSV/manifest reporting.
//!
//! Supporting numerics live in [`phase`], [`sum`] and [`quad`].

pub mod circle;
pub mod digitset;
pub mod error;
pub mod explab;
pub mod expsum;
pub mod ntheory;
pub mod phase;
pub mod quad;
pub mod sum;
pub mod voronoi;

pub use circle::{Arc, ArcParams, Classification, MainTermForm};
pub use digitset::{DigitSet, IntervalSpec};
pub use error::{Error, Result};
pub use ntheory::{CumulativeDivisor, SieveKind, SieveTable};
pub use num_complex::Complex64;
pub use voronoi::VoronoiConstants;
