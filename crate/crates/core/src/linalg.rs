//! Exact linear algebra over the rationals.
//!
//! One entry point, `solve_affine`: reduced row echelon solving of A x = rhs
//! returning an exact particular solution together with a kernel basis. An
//! empty kernel basis certifies uniqueness. Pivots are chosen by bit length
//! to limit coefficient blowup during elimination.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::Rational;

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols));
        RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    /// Matrix-vector product, exact.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                let mut acc = Rational::zero();
                for (a, xv) in row.iter().zip(x) {
                    if !a.is_zero() && !xv.is_zero() {
                        acc += a * xv;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Outcome of `solve_affine`.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    /// One exact solution of A x = rhs.
    pub particular: Vec<Rational>,
    /// Basis of the homogeneous solution space; empty certifies uniqueness.
    pub kernel_basis: Vec<Vec<Rational>>,
}

fn entry_size(v: &Rational) -> u64 {
    v.numer().bits() + v.denom().bits()
}

/// Solve A x = rhs exactly. Returns `Error::Inconsistent` when no solution
/// exists.
pub fn solve_affine(a: &RationalMatrix, rhs: &[Rational]) -> Result<AffineSolution> {
    assert_eq!(rhs.len(), a.rows(), "dimension mismatch");
    let rows = a.rows();
    let cols = a.cols();

    // Work rows carry the augmented column at index `cols`.
    let mut work: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = (0..cols).map(|c| a.get(r, c).clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        // Smallest nonzero candidate by bit length.
        let mut best: Option<(usize, u64)> = None;
        for (r, row) in work.iter().enumerate().skip(pivot_row) {
            if !row[col].is_zero() {
                let size = entry_size(&row[col]);
                if best.is_none_or(|(_, s)| size < s) {
                    best = Some((r, size));
                }
            }
        }
        let Some((r, _)) = best else { continue };
        work.swap(pivot_row, r);

        // Normalize the pivot row and clear the column below.
        let inv = {
            let p = work[pivot_row][col].clone();
            Rational::one() / p
        };
        for v in work[pivot_row].iter_mut().skip(col) {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let (pivot_slice, rest) = work.split_at_mut(pivot_row + 1);
        let prow = &pivot_slice[pivot_row];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = std::mem::replace(&mut row[col], Rational::zero());
            for c in (col + 1)..=cols {
                if !prow[c].is_zero() {
                    let delta = &factor * &prow[c];
                    row[c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }

    // Any zero row with a nonzero augmented entry is a contradiction.
    for row in work.iter().skip(pivot_row) {
        if !row[cols].is_zero() {
            return Err(Error::Inconsistent);
        }
    }

    // Back-substitute to reduced echelon form.
    for i in (0..pivot_cols.len()).rev() {
        let col = pivot_cols[i];
        for r in 0..i {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = std::mem::replace(&mut work[r][col], Rational::zero());
            let (upper, lower) = work.split_at_mut(i);
            let prow = &lower[0];
            let row = &mut upper[r];
            for c in (col + 1)..=cols {
                if !prow[c].is_zero() {
                    let delta = &factor * &prow[c];
                    row[c] -= delta;
                }
            }
        }
    }

    let mut particular = vec![Rational::zero(); cols];
    for (i, &col) in pivot_cols.iter().enumerate() {
        particular[col] = work[i][cols].clone();
    }

    let pivot_set: Vec<bool> = {
        let mut s = vec![false; cols];
        for &c in &pivot_cols {
            s[c] = true;
        }
        s
    };
    let mut kernel_basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (i, &col) in pivot_cols.iter().enumerate() {
            v[col] = -work[i][free].clone();
        }
        kernel_basis.push(v);
    }

    Ok(AffineSolution {
        particular,
        kernel_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, ratio};

    #[test]
    fn identity_system() {
        let a = RationalMatrix::identity(2);
        let sol = solve_affine(&a, &[rat(1), rat(-2)]).unwrap();
        assert_eq!(sol.particular, vec![rat(1), rat(-2)]);
        assert!(sol.kernel_basis.is_empty());
    }

    #[test]
    fn underdetermined_has_kernel() {
        let a = RationalMatrix::from_rows(vec![vec![rat(1), rat(1)]]);
        let sol = solve_affine(&a, &[rat(0)]).unwrap();
        assert_eq!(sol.kernel_basis.len(), 1);
        assert_eq!(a.mul_vec(&sol.kernel_basis[0]), vec![rat(0)]);
    }

    #[test]
    fn phi2_system() {
        // Singular conditions for phi_2 on the monomials E4*a*b and E6*a^2:
        // rows are the classes (0,0), (0,1), (0,2).
        let a = RationalMatrix::from_rows(vec![
            vec![rat(-18), rat(6)],
            vec![rat(8), rat(-4)],
            vec![rat(1), rat(1)],
        ]);
        let sol = solve_affine(&a, &[rat(-2), rat(1), rat(0)]).unwrap();
        assert_eq!(sol.particular, vec![ratio(1, 12), ratio(-1, 12)]);
        assert!(sol.kernel_basis.is_empty());
    }

    #[test]
    fn inconsistent_detected() {
        let a = RationalMatrix::from_rows(vec![vec![rat(1)], vec![rat(1)]]);
        assert!(matches!(
            solve_affine(&a, &[rat(0), rat(1)]),
            Err(Error::Inconsistent)
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn random_systems_round_trip(
                entries in prop::collection::vec(-9i64..10, 20 * 20),
                x in prop::collection::vec(-9i64..10, 20),
            ) {
                let rows: Vec<Vec<Rational>> = entries
                    .chunks(20)
                    .map(|ch| ch.iter().map(|&v| rat(v)).collect())
                    .collect();
                let a = RationalMatrix::from_rows(rows);
                let xs: Vec<Rational> = x.into_iter().map(rat).collect();
                let rhs = a.mul_vec(&xs);
                let sol = solve_affine(&a, &rhs).unwrap();
                prop_assert_eq!(a.mul_vec(&sol.particular), rhs);
                for k in &sol.kernel_basis {
                    for v in a.mul_vec(k) {
                        prop_assert!(v.is_zero());
                    }
                }
            }
        }
    }
}
