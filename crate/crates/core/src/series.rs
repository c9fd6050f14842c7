//! Truncated Laurent/Puiseux series over exact rationals.
//!
//! A `FourierSeries` represents f(q) = sum_m c_m * q^(m/L) + O(q^(trunc/L))
//! with only nonzero coefficients stored (`BTreeMap<i64, BigRational>` keyed
//! by the scaled exponent m).
//!
//! Invariants:
//! - No stored coefficient is zero; all stored keys are `< trunc`.
//! - The truncation bound is a window, never silent zero-extension: reading a
//!   coefficient at or past `trunc/L` is an error, not 0.
//! - Every series is kept on its coarsest lattice: after each operation the
//!   lattice is relabeled so that gcd(keys, L) = 1. A series whose exponents
//!   are all integral therefore always ends on lattice 1.
//! - All arithmetic is exact; coefficients stay in lowest terms with positive
//!   denominator (maintained by `BigRational`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient type used throughout the crate.
pub type Rational = BigRational;

/// Build a rational from an integer pair. Panics on zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from(BigInt::from(n))
}

/// Truncated Laurent series on a fractional exponent lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSeries {
    /// Exponents live in (1/lattice) * Z.
    lattice: i64,
    /// Scaled exponent m (meaning q^(m/lattice)) -> nonzero coefficient.
    coeffs: BTreeMap<i64, Rational>,
    /// Scaled window bound: coefficients with m >= trunc are unknown, not zero.
    trunc: i64,
}

impl FourierSeries {
    /// The zero series 0 + O(q^qmax) on lattice 1.
    pub fn zero(qmax: i64) -> Self {
        FourierSeries {
            lattice: 1,
            coeffs: BTreeMap::new(),
            trunc: qmax,
        }
    }

    /// The constant 1 + O(q^qmax).
    pub fn one(qmax: i64) -> Self {
        Self::monomial(Rational::one(), 0, qmax)
    }

    /// c * q^exp + O(q^qmax) with integral exponent.
    pub fn monomial(c: Rational, exp: i64, qmax: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() && exp < qmax {
            coeffs.insert(exp, c);
        }
        FourierSeries {
            lattice: 1,
            coeffs,
            trunc: qmax,
        }
    }

    /// Build from scaled (exponent, coefficient) terms on an explicit lattice.
    /// Zero coefficients and terms at or past the bound are dropped.
    pub fn from_terms<I>(lattice: i64, terms: I, trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        assert!(lattice >= 1, "lattice must be positive");
        let mut coeffs: BTreeMap<i64, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() || m >= trunc {
                continue;
            }
            let entry = coeffs.entry(m).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&m);
            }
        }
        let mut f = FourierSeries {
            lattice,
            coeffs,
            trunc,
        };
        f.relabel();
        f
    }

    /// Exponent lattice denominator L.
    pub fn lattice(&self) -> i64 {
        self.lattice
    }

    /// Scaled truncation bound (in units of 1/lattice).
    pub fn trunc_scaled(&self) -> i64 {
        self.trunc
    }

    /// The window bound as an exact rational exponent.
    pub fn bound(&self) -> Rational {
        ratio(self.trunc, self.lattice)
    }

    /// True if no nonzero coefficient is stored.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored scaled exponent, if any.
    pub fn order_scaled(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Iterate stored (scaled exponent, coefficient) pairs in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of q^n for integral n. `OutOfWindow` at or past the bound.
    pub fn coeff_int(&self, n: i64) -> Result<Rational> {
        self.coeff_frac(n, 1)
    }

    /// Coefficient of q^(num/den). Exponents off the lattice but inside the
    /// window are genuinely zero.
    pub fn coeff_frac(&self, num: i64, den: i64) -> Result<Rational> {
        assert!(den >= 1, "exponent denominator must be positive");
        // num/den >= trunc/lattice <=> num * lattice >= trunc * den
        if (num as i128) * (self.lattice as i128) >= (self.trunc as i128) * (den as i128) {
            return Err(Error::OutOfWindow {
                what: format!("q^({num}/{den})"),
            });
        }
        let scaled = (num as i128) * (self.lattice as i128);
        if scaled % (den as i128) != 0 {
            return Ok(Rational::zero());
        }
        let key = (scaled / den as i128) as i64;
        Ok(self.coeffs.get(&key).cloned().unwrap_or_else(Rational::zero))
    }

    /// Relabel to the coarsest lattice expressing every stored exponent and
    /// the window bound itself, so the meaning is preserved exactly.
    fn relabel(&mut self) {
        if self.lattice == 1 {
            return;
        }
        let mut g = self.lattice.gcd(&self.trunc);
        for &m in self.coeffs.keys() {
            g = g.gcd(&m);
            if g == 1 {
                return;
            }
        }
        self.coeffs = std::mem::take(&mut self.coeffs)
            .into_iter()
            .map(|(m, c)| (m / g, c))
            .collect();
        self.trunc /= g;
        self.lattice /= g;
    }

    /// Refine to a finer lattice (new_lattice must be a multiple of lattice).
    fn refined(&self, new_lattice: i64) -> Self {
        debug_assert_eq!(new_lattice % self.lattice, 0);
        let k = new_lattice / self.lattice;
        if k == 1 {
            return self.clone();
        }
        FourierSeries {
            lattice: new_lattice,
            coeffs: self.coeffs.iter().map(|(&m, c)| (m * k, c.clone())).collect(),
            trunc: self.trunc * k,
        }
    }

    fn common_lattice(&self, other: &Self) -> i64 {
        self.lattice.lcm(&other.lattice)
    }

    /// Coefficientwise sum; bound = min of the operand bounds.
    pub fn add(&self, other: &Self) -> Self {
        let lat = self.common_lattice(other);
        let a = self.refined(lat);
        let b = other.refined(lat);
        let trunc = a.trunc.min(b.trunc);
        let mut coeffs = a.coeffs;
        coeffs.retain(|&m, _| m < trunc);
        for (m, c) in b.coeffs {
            if m >= trunc {
                continue;
            }
            let entry = coeffs.entry(m).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&m);
            }
        }
        let mut f = FourierSeries {
            lattice: lat,
            coeffs,
            trunc,
        };
        f.relabel();
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FourierSeries {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, -c.clone())).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiply by an exact scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        let mut f = if c.is_zero() {
            FourierSeries {
                lattice: self.lattice,
                coeffs: BTreeMap::new(),
                trunc: self.trunc,
            }
        } else {
            FourierSeries {
                lattice: self.lattice,
                coeffs: self.coeffs.iter().map(|(&m, v)| (m, c * v)).collect(),
                trunc: self.trunc,
            }
        };
        f.relabel();
        f
    }

    /// Multiply by q^(num/den) exactly; the window shifts with the exponents.
    pub fn shift(&self, num: i64, den: i64) -> Self {
        assert!(den >= 1);
        let lat = self.lattice.lcm(&den);
        let a = self.refined(lat);
        let delta = num * (lat / den);
        let mut f = FourierSeries {
            lattice: lat,
            coeffs: a.coeffs.into_iter().map(|(m, c)| (m + delta, c)).collect(),
            trunc: a.trunc + delta,
        };
        f.relabel();
        f
    }

    /// Cauchy product. The bound accounts for the order of vanishing of each
    /// operand: trunc = min(f.trunc + ord g, g.trunc + ord f).
    pub fn mul(&self, other: &Self) -> Self {
        let lat = self.common_lattice(other);
        let a = self.refined(lat);
        let b = other.refined(lat);
        let ord_a = a.order_scaled().unwrap_or(a.trunc);
        let ord_b = b.order_scaled().unwrap_or(b.trunc);
        let trunc = (a.trunc + ord_b).min(b.trunc + ord_a);
        let mut coeffs: BTreeMap<i64, Rational> = BTreeMap::new();
        for (&ma, ca) in &a.coeffs {
            if ma + ord_b >= trunc {
                break;
            }
            for (&mb, cb) in &b.coeffs {
                let m = ma + mb;
                if m >= trunc {
                    break;
                }
                let prod = ca * cb;
                let entry = coeffs.entry(m).or_insert_with(Rational::zero);
                *entry += prod;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        let mut f = FourierSeries {
            lattice: lat,
            coeffs,
            trunc,
        };
        f.relabel();
        f
    }

    /// Laurent inverse: f * inv(f) = 1 up to the implied truncation.
    pub fn inv(&self) -> Result<Self> {
        let ord = self.order_scaled().ok_or(Error::ZeroLeadingTerm)?;
        let lead = self.coeffs[&ord].clone();
        // Relative window: u = f / (lead * q^ord) = 1 + u_1 x + ... known
        // through x^(w-1) where x = q^(1/L).
        let w = self.trunc - ord;
        let u: Vec<(i64, Rational)> = self
            .coeffs
            .iter()
            .filter(|(&m, _)| m > ord)
            .map(|(&m, c)| (m - ord, c / &lead))
            .collect();
        let mut v: Vec<Rational> = Vec::with_capacity(w.max(0) as usize);
        v.push(Rational::one());
        for n in 1..w {
            let mut acc = Rational::zero();
            for (k, uk) in &u {
                if *k > n {
                    break;
                }
                let prev = &v[(n - k) as usize];
                if !prev.is_zero() {
                    acc += uk * prev;
                }
            }
            v.push(-acc);
        }
        let inv_lead = Rational::one() / lead;
        let mut f = FourierSeries {
            lattice: self.lattice,
            coeffs: v
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as i64 - ord, &c * &inv_lead))
                .collect(),
            trunc: self.trunc - 2 * ord,
        };
        f.relabel();
        Ok(f)
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            let mut f = FourierSeries {
                lattice: self.lattice,
                coeffs: BTreeMap::new(),
                trunc: self.trunc,
            };
            if 0 < f.trunc {
                f.coeffs.insert(0, Rational::one());
            }
            f.relabel();
            return Ok(f);
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Option<FourierSeries> = None;
        let mut power = base;
        loop {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => power.clone(),
                    Some(r) => r.mul(&power),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            power = power.mul(&power);
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Substitute q -> q^m: every exponent is multiplied by m.
    pub fn dilate(&self, m: i64) -> Self {
        assert!(m >= 1, "dilation factor must be positive");
        let mut f = FourierSeries {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k * m, c.clone())).collect(),
            trunc: self.trunc * m,
        };
        f.relabel();
        f
    }

    /// Tighten the window to q^(num/den); widening is not possible.
    pub fn restrict(&self, num: i64, den: i64) -> Self {
        assert!(den >= 1);
        let lat = self.lattice.lcm(&den);
        let a = self.refined(lat);
        let trunc = (num * (lat / den)).min(a.trunc);
        let mut f = FourierSeries {
            lattice: lat,
            coeffs: a.coeffs.into_iter().filter(|&(m, _)| m < trunc).collect(),
            trunc,
        };
        f.relabel();
        f
    }

    /// True if the series lives on lattice 1 (all exponents integral).
    pub fn is_integral_lattice(&self) -> bool {
        self.lattice == 1
    }

    /// True if every stored coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }
}

impl std::fmt::Display for FourierSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (&m, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m == 0 {
                write!(f, "{c}")?;
            } else if self.lattice == 1 {
                write!(f, "{c}*q^{m}")?;
            } else {
                write!(f, "{c}*q^({m}/{})", self.lattice)?;
            }
        }
        write!(f, " + O(q^({}/{}))", self.trunc, self.lattice)
    }
}
