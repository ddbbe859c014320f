//! Desk-scale toolkit for stochastic 2-CSPs and the machinery around them:
//! Boolean circuits with brute-force witness search, systematic linear codes,
//! enumerative proximity-proof backends, the circuit-to-stochastic-CSP
//! reduction with its decoding and smoothed provers, explicit expander graphs
//! with walk-Chernoff experiments, block generators, and Arthur-Merlin
//! protocol amplification.
//!
//! Everything is sized for exhaustive verification: values are exact
//! rationals, search spaces are bounded by explicit [`Limits`], and every
//! randomized experiment is reproducible from a 64-bit seed.

pub mod bits;
pub mod circuits;
pub mod codes;
pub mod csp;
pub mod error;
pub mod expander;
pub mod formats;
pub mod generator;
pub mod hamming;
pub mod pcpp;
pub mod protocol;
pub mod reduction;

pub use bits::Bits;
pub use circuits::{Circuit, Limits};
pub use error::{Error, Result};

/// Exact rational used for CSP values, parameters, and measured fractions.
///
/// Desk-scale instances keep numerators and denominators far below `i64`
/// range; debug builds flag an overflow if a configuration ever violates
/// that.
pub type Rational = num_rational::Ratio<i64>;

/// Shorthand for a `Rational` from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}
