//! Exact computation of traces of singular moduli.
//!
//! The crate computes the level-1 traces t(d) from Zagier's weight-3/2 form
//! g(z), and the level-p traces t^(p)(d) for the fifteen primes p with
//! Gamma_0(p)* of genus 0, from the weight-2 index-p Jacobi forms phi_p.
//! A high-precision Heegner-point evaluator provides an independent check of
//! every trace, and Hecke operators on the coefficient tables drive the
//! congruence sweeps t(l^2 d) = 0 mod l (split l).
//!
//! Modules:
//! - [`series`]: truncated Laurent/Puiseux series over exact rationals
//! - [`forms`]: eta quotients, Eisenstein series, Delta, j, theta, Zagier's g
//! - [`jacobi`]: two-variable expansions of the weak Jacobi generators a, b
//! - [`phi`]: construction of phi_p and its coefficient table B(d)
//! - [`linalg`]: exact rational linear solving
//! - [`bqf`]: binary quadratic forms, reduction, class lists, Heegner points
//! - [`oracle`]: high-precision complex evaluation of j and the Hauptmoduls
//! - [`hecke`]: Hecke operators on plus-space tables and congruence verifiers

pub mod bqf;
pub mod error;
pub mod forms;
pub mod hecke;
pub mod jacobi;
pub mod linalg;
pub mod oracle;
pub mod phi;
pub mod series;

mod bigfloat;
mod symdense;
mod zetapoly;

pub use error::{Error, Result};
pub use series::{FourierSeries, Rational};

/// The fifteen primes p for which Gamma_0(p)* has genus 0.
pub const GENUS_ZERO_PRIMES: [i64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 47, 59, 71];

/// True if p admits a level-p trace construction here.
pub fn is_genus_zero_prime(p: i64) -> bool {
    GENUS_ZERO_PRIMES.contains(&p)
}

