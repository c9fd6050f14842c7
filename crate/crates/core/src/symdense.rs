//! Dense internal representation for products of symmetric Jacobi
//! expansions.
//!
//! Every expansion in the phi_p pipeline has even weight, so its rows are
//! symmetric under r -> -r, and all coefficients are integers. Storing only
//! r >= 0 as dense `Vec<BigInt>` rows quarters the multiplication count of
//! the two-variable product: for stored exponents i, j >= 0 the symmetric
//! convolution is
//!
//!   out[i + j] += a_i b_j, and for i, j > 0 additionally
//!   out[|i - j|] += a_i b_j   (twice when i = j).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jacobi::JacobiExpansion;
use crate::series::Rational;
use crate::zetapoly::ZetaPolynomial;

#[derive(Clone, Debug)]
pub(crate) struct SymDense {
    qmax: i64,
    /// rows[n][r] = c(n, r) for r >= 0; c(n, -r) = c(n, r) implied.
    rows: Vec<Vec<BigInt>>,
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

impl SymDense {
    pub fn coeff_ref(&self, n: i64, r: i64) -> Option<&BigInt> {
        self.rows
            .get(n as usize)
            .and_then(|row| row.get(r.unsigned_abs() as usize))
    }

    /// Fold a symmetric, integral, integer-coefficient expansion.
    pub fn from_expansion(e: &JacobiExpansion) -> Result<SymDense> {
        let qmax = e.qmax();
        let mut rows = vec![Vec::new(); qmax.max(0) as usize];
        for (n, poly) in e.rows() {
            let top = poly.max_exp().unwrap_or(0).max(0) as usize;
            let mut row = vec![BigInt::zero(); top + 1];
            for (r, c) in poly.terms() {
                if !c.is_integer() {
                    return Err(Error::NonIntegralResult {
                        what: format!("dense fold at q^{n} zeta^{r}"),
                    });
                }
                if poly.get(-r) != *c {
                    return Err(Error::InconsistentRepresentations {
                        d: n,
                        details: format!("row q^{n} not symmetric at r = {r}"),
                    });
                }
                if r >= 0 {
                    row[r as usize] = c.to_integer();
                }
            }
            trim(&mut row);
            rows[n as usize] = row;
        }
        Ok(SymDense { qmax, rows })
    }

    /// Unfold to a full expansion, dividing every coefficient by `denom`.
    pub fn to_expansion(&self, weight: i64, index: i64, denom: &BigInt) -> JacobiExpansion {
        let mut out = JacobiExpansion::zero(weight, index, self.qmax);
        for (n, row) in self.rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let mut poly = ZetaPolynomial::zero();
            for (r, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let v = Rational::new(c.clone(), denom.clone());
                poly.add_term(r as i64, v.clone());
                if r > 0 {
                    poly.add_term(-(r as i64), v);
                }
            }
            out = out.add(&JacobiExpansion::from_poly(
                weight, index, n as i64, poly, self.qmax,
            ));
        }
        out
    }

    /// Symmetric two-variable product.
    pub fn mul(&self, other: &Self) -> Self {
        let qmax = self.qmax.min(other.qmax);
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); qmax.max(0) as usize];
        for (n1, r1) in self.rows.iter().enumerate() {
            if r1.is_empty() || n1 as i64 >= qmax {
                continue;
            }
            let nmax2 = (qmax as usize - n1).min(other.rows.len());
            for (n2, r2) in other.rows.iter().enumerate().take(nmax2) {
                if r2.is_empty() {
                    continue;
                }
                let out = &mut rows[n1 + n2];
                if out.len() < r1.len() + r2.len() - 1 {
                    out.resize(r1.len() + r2.len() - 1, BigInt::zero());
                }
                for (i, ai) in r1.iter().enumerate() {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in r2.iter().enumerate() {
                        if bj.is_zero() {
                            continue;
                        }
                        let p = ai * bj;
                        if i > 0 && j > 0 {
                            if i == j {
                                out[0] += &p;
                                out[0] += &p;
                            } else {
                                out[i.abs_diff(j)] += &p;
                            }
                        }
                        out[i + j] += p;
                    }
                }
            }
        }
        for row in &mut rows {
            trim(row);
        }
        SymDense { qmax, rows }
    }

    /// Multiply by a one-variable integer series given as coefficients
    /// c[0], c[1], ... (window at least self.qmax).
    pub fn mul_series_int(&self, coeffs: &[BigInt]) -> Self {
        let qmax = self.qmax.min(coeffs.len() as i64);
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); qmax.max(0) as usize];
        for (n1, row) in self.rows.iter().enumerate() {
            if row.is_empty() || n1 as i64 >= qmax {
                continue;
            }
            for (m, c) in coeffs.iter().enumerate().take(qmax as usize - n1) {
                if c.is_zero() {
                    continue;
                }
                let out = &mut rows[n1 + m];
                if out.len() < row.len() {
                    out.resize(row.len(), BigInt::zero());
                }
                for (i, ai) in row.iter().enumerate() {
                    if !ai.is_zero() {
                        out[i] += ai * c;
                    }
                }
            }
        }
        for row in &mut rows {
            trim(row);
        }
        SymDense { qmax, rows }
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.qmax, other.qmax);
        for (n, row) in other.rows.iter().enumerate() {
            let out = &mut self.rows[n];
            if out.len() < row.len() {
                out.resize(row.len(), BigInt::zero());
            }
            for (i, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out[i] += c;
                }
            }
            trim(out);
        }
    }

    pub fn zero(qmax: i64) -> Self {
        SymDense {
            qmax,
            rows: vec![Vec::new(); qmax.max(0) as usize],
        }
    }
}
