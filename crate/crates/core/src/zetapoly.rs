//! Laurent polynomials in zeta, the elliptic variable of a Jacobi form.
//!
//! Exponents are stored scaled: an entry at key r on a declared lattice Z
//! means zeta^(r/Z). Zero coefficients are never stored.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::series::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaPolynomial {
    coeffs: BTreeMap<i64, Rational>,
}

impl ZetaPolynomial {
    pub fn zero() -> Self {
        ZetaPolynomial::default()
    }

    pub fn monomial(r: i64, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(r, c);
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut p = Self::zero();
        for (r, c) in terms {
            p.add_term(r, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of zeta^(r/Z); absent means zero.
    pub fn get(&self, r: i64) -> Rational {
        self.coeffs.get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, r: i64) -> Option<&Rational> {
        self.coeffs.get(&r)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(&r, c)| (r, c))
    }

    pub fn add_term(&mut self, r: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(r).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&r);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (r, c) in other.terms() {
            self.add_term(r, c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        ZetaPolynomial {
            coeffs: self.coeffs.iter().map(|(&r, c)| (r, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ZetaPolynomial {
            coeffs: self.coeffs.iter().map(|(&r, v)| (r, c * v)).collect(),
        }
    }

    /// self += a * b, the inner loop of the two-variable product.
    pub fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        for (ra, ca) in a.terms() {
            for (rb, cb) in b.terms() {
                self.add_term(ra + rb, ca * cb);
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        out.add_mul_assign(self, other);
        out
    }

    /// Refine the exponent lattice by a factor k.
    pub fn scale_exponents(&self, k: i64) -> Self {
        ZetaPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&r, c)| (r * k, c.clone()))
                .collect(),
        }
    }

    /// Divide every exponent by k; requires exact divisibility.
    pub fn unscale_exponents(&self, k: i64) -> Option<Self> {
        let mut coeffs = BTreeMap::new();
        for (&r, c) in &self.coeffs {
            if r % k != 0 {
                return None;
            }
            coeffs.insert(r / k, c.clone());
        }
        Some(ZetaPolynomial { coeffs })
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// r <-> -r invariance, the symmetry of even-weight Jacobi coefficients.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&r, c)| self.get(-r) == *c)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn mul_and_symmetry() {
        // (zeta - 2 + zeta^-1)^2 = zeta^2 - 4 zeta + 6 - 4 zeta^-1 + zeta^-2
        let a = ZetaPolynomial::from_terms([(1, rat(1)), (0, rat(-2)), (-1, rat(1))]);
        let sq = a.mul(&a);
        assert_eq!(sq.get(2), rat(1));
        assert_eq!(sq.get(1), rat(-4));
        assert_eq!(sq.get(0), rat(6));
        assert_eq!(sq.get(-1), rat(-4));
        assert_eq!(sq.get(-2), rat(1));
        assert!(sq.is_symmetric());
    }

    #[test]
    fn cancellation_removes_entries() {
        let mut p = ZetaPolynomial::monomial(3, rat(5));
        p.add_term(3, rat(-5));
        assert!(p.is_zero());
    }
}
