//! Exact q-expansions of the classical level-1 objects: eta quotients, the
//! theta series, E4, E6, Delta and its inverse, j, and Zagier's g whose
//! coefficients are the traces t(d).
//!
//! All constructors take a window `qmax` and deliver the expansion exactly
//! through q^(qmax-1).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{rat, ratio, FourierSeries, Rational};

/// A product of eta factors: prod over (m, e) of eta(m z)^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(i64, i64)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(i64, i64)>) -> Self {
        assert!(factors.iter().all(|&(m, _)| m >= 1));
        EtaQuotientSpec { factors }
    }

    /// The exact leading exponent times 24: sum of m*e over all factors.
    pub fn prefactor_24(&self) -> i64 {
        self.factors.iter().map(|&(m, e)| m * e).sum()
    }
}

/// prod_{n >= 1, mn < qmax} (1 - q^(mn)), the unit part of eta(m z).
pub(crate) fn euler_product(m: i64, qmax: i64) -> FourierSeries {
    let mut acc = FourierSeries::one(qmax);
    let mut e = m;
    while e < qmax {
        let factor = FourierSeries::from_terms(1, [(0, rat(1)), (e, rat(-1))], qmax);
        acc = acc.mul(&factor);
        e += m;
    }
    acc
}

/// Exact expansion of an eta quotient through q^(qmax-1), including the
/// fractional prefactor q^(sum m*e / 24).
pub fn eta_quotient(spec: &EtaQuotientSpec, qmax: i64) -> Result<FourierSeries> {
    assert!(qmax >= 1, "qmax must be at least 1");
    let pre24 = spec.prefactor_24();
    // Negative prefactors shift the window down; compute enough unit terms.
    let cushion = if pre24 < 0 { (-pre24 + 23) / 24 + 1 } else { 0 };
    let window = qmax + cushion;
    let mut acc = FourierSeries::one(window);
    let mut units: BTreeMap<i64, FourierSeries> = BTreeMap::new();
    for &(m, e) in &spec.factors {
        let base = units
            .entry(m)
            .or_insert_with(|| euler_product(m, window))
            .clone();
        acc = acc.mul(&base.pow(e)?);
    }
    Ok(acc.shift(pre24, 24).restrict(qmax, 1))
}

/// theta_1(z) = sum over n of (-1)^n q^(n^2) = 1 - 2q + 2q^4 - 2q^9 + ...
pub fn theta_series(qmax: i64) -> FourierSeries {
    assert!(qmax >= 1);
    let mut terms = vec![(0, rat(1))];
    let mut n = 1;
    while n * n < qmax {
        let sign = if n % 2 == 0 { 2 } else { -2 };
        terms.push((n * n, rat(sign)));
        n += 1;
    }
    FourierSeries::from_terms(1, terms, qmax)
}

/// sigma_k(n) by direct divisor enumeration.
fn sigma(k: u32, n: i64) -> BigInt {
    debug_assert!(n >= 1);
    let mut acc = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
            let q = n / d;
            if q != d {
                acc += BigInt::from(q).pow(k);
            }
        }
        d += 1;
    }
    acc
}

/// E4 = 1 + 240 sum sigma_3(n) q^n.
pub fn eisenstein_e4(qmax: i64) -> FourierSeries {
    eisenstein(qmax, 3, 240)
}

/// E6 = 1 - 504 sum sigma_5(n) q^n.
pub fn eisenstein_e6(qmax: i64) -> FourierSeries {
    eisenstein(qmax, 5, -504)
}

fn eisenstein(qmax: i64, k: u32, mult: i64) -> FourierSeries {
    assert!(qmax >= 1);
    let m = BigInt::from(mult);
    let terms = std::iter::once((0, Rational::one()))
        .chain((1..qmax).map(|n| (n, Rational::from(&m * sigma(k, n)))));
    FourierSeries::from_terms(1, terms, qmax)
}

/// Delta = (E4^3 - E6^2) / 1728, the normalized cusp form of weight 12.
pub fn delta(qmax: i64) -> FourierSeries {
    assert!(qmax >= 1);
    let e4 = eisenstein_e4(qmax);
    let e6 = eisenstein_e6(qmax);
    e4.pow(3)
        .expect("positive power")
        .sub(&e6.mul(&e6))
        .scale(&ratio(1, 1728))
}

/// The Laurent inverse of Delta, with lowest term q^-1.
pub fn delta_inv(qmax: i64) -> FourierSeries {
    delta(qmax + 2).inv().expect("Delta has lowest term q")
}

/// j = E4^3 * Delta^-1 = q^-1 + 744 + 196884 q + ...
pub fn j_series(qmax: i64) -> FourierSeries {
    assert!(qmax >= 1);
    let e4cube = eisenstein_e4(qmax + 1).pow(3).expect("positive power");
    e4cube.mul(&delta_inv(qmax))
}

/// Zagier's g = -theta_1(z) E4(4z) / eta^6(4z)
///            = -q^-1 + 2 + sum over d = 0, 3 mod 4 of t(d) q^d.
pub fn zagier_g(qmax: i64) -> FourierSeries {
    assert!(qmax >= 1);
    let window = qmax + 2;
    let theta = theta_series(window);
    let e4_4z = eisenstein_e4(window / 4 + 2).dilate(4).restrict(window, 1);
    let eta6_4z =
        eta_quotient(&EtaQuotientSpec::new(vec![(4, 6)]), window).expect("positive eta power");
    let inv_eta6 = eta6_4z.inv().expect("eta^6(4z) has lowest term q");
    theta.mul(&e4_4z).mul(&inv_eta6).neg()
}

/// The primes p for which Gamma_0(p) itself has genus 0, where the Hauptmodul
/// of Gamma_0(p)* is the eta quotient f_p + 24/(p-1) + p^(12/(p-1))/f_p with
/// f_p = (eta(z)/eta(pz))^(24/(p-1)).
pub const ETA_HAUPTMODUL_PRIMES: [i64; 5] = [2, 3, 5, 7, 13];

/// Exact q-expansion of the Hauptmodul j_p^* for p in {2, 3, 5, 7, 13},
/// normalized q^-1 + 0 + O(q).
pub fn hauptmodul_series(p: i64, qmax: i64) -> Result<FourierSeries> {
    if !ETA_HAUPTMODUL_PRIMES.contains(&p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "no eta-quotient Hauptmodul formula is pinned for this level".into(),
        });
    }
    let s = 24 / (p - 1);
    let f = eta_quotient(&EtaQuotientSpec::new(vec![(1, s), (p, -s)]), qmax)?;
    let c = BigInt::from(p).pow(s as u32 / 2);
    let inv_f = f.inv()?;
    Ok(f
        .add(&FourierSeries::monomial(rat(s), 0, qmax))
        .add(&inv_f.scale(&Rational::from(c))))
}

/// True if -d is the discriminant of an order in an imaginary quadratic field.
pub fn is_level1_discriminant(d: i64) -> bool {
    d > 0 && (d % 4 == 0 || d % 4 == 3)
}

/// Table of the level-1 traces t(d), read off Zagier's g.
///
/// Holds the conventional entries t(-1) = -1 and t(0) = 2 alongside the
/// traces proper; integrality of every coefficient is asserted on
/// construction, not assumed.
#[derive(Clone, Debug)]
pub struct TraceTableLevel1 {
    entries: BTreeMap<i64, BigInt>,
    dmax: i64,
}

impl TraceTableLevel1 {
    /// Compute the table for all valid d <= dmax.
    pub fn new(dmax: i64) -> Result<Self> {
        assert!(dmax >= 0);
        Self::from_series(&zagier_g(dmax + 1))
    }

    /// Read a table off a precomputed expansion of g.
    pub fn from_series(g: &FourierSeries) -> Result<Self> {
        let dmax = g.trunc_scaled() / g.lattice() - 1;
        let mut entries = BTreeMap::new();
        for (m, c) in g.terms() {
            if !c.is_integer() {
                return Err(Error::NonIntegralResult {
                    what: format!("coefficient of q^{m} in g"),
                });
            }
            entries.insert(m, c.to_integer());
        }
        let table = TraceTableLevel1 { entries, dmax };
        if table.get(-1) != BigInt::from(-1) || table.get(0) != BigInt::from(2) {
            return Err(Error::NonIntegralResult {
                what: "principal part of g is not -q^-1 + 2".into(),
            });
        }
        Ok(table)
    }

    /// Largest d covered by the table.
    pub fn dmax(&self) -> i64 {
        self.dmax
    }

    /// Raw coefficient access including the t(-1) and t(0) conventions;
    /// absent entries inside the window are zero.
    pub fn get(&self, d: i64) -> BigInt {
        debug_assert!(d <= self.dmax);
        self.entries.get(&d).cloned().unwrap_or_else(BigInt::zero)
    }

    /// The trace t(d) for a positive discriminant argument.
    pub fn trace(&self, d: i64) -> Result<BigInt> {
        if !is_level1_discriminant(d) {
            return Err(Error::UnsupportedDiscriminant {
                d,
                why: "t(d) requires d = 0, 3 mod 4".into(),
            });
        }
        if d > self.dmax {
            return Err(Error::OutOfWindow {
                what: format!("t({d}) beyond table bound {}", self.dmax),
            });
        }
        Ok(self.get(d))
    }

    /// Iterate (d, t(d)) pairs including the conventional d = -1, 0 entries.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.entries.iter().map(|(&d, t)| (d, t))
    }
}
