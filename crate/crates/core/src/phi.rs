//! Construction of the weight-2 index-p forms phi_p and their coefficient
//! tables B(d), for the fifteen primes p with Gamma_0(p)* of genus 0.
//!
//! phi_p is pinned down inside the weak space
//! sum over i = 1..p of M_{2+2i} * a^i b^(p-i)
//! by its singular part: B(-1) = 1, B(0) = -2, B(d) = 0 for every other
//! d = 4pn - r^2 < 0. The exact linear system is solved on just enough rows
//! to cover every singular class and the solution is evaluated at the full
//! window. Existence and a trivial kernel are asserted at runtime rather
//! than assumed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{eisenstein_e4, eisenstein_e6};
use crate::is_genus_zero_prime;
use crate::jacobi::{gen_a, gen_b, JacobiExpansion};
use crate::linalg::{solve_affine, RationalMatrix};
use crate::series::{FourierSeries, Rational};
use crate::symdense::SymDense;

/// All reduced singular classes of index p: (0,0) together with every (n, r),
/// 1 <= r <= p, 0 <= n, 4pn - r^2 < 0, sorted by (n, r). These index the
/// linear conditions pinning down phi_p.
pub fn singular_classes(p: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 0)];
    for r in 1..=p {
        let mut n = 0;
        while 4 * p * n - r * r < 0 {
            out.push((n, r));
            n += 1;
        }
    }
    out.sort_unstable();
    out
}

/// Smallest admissible construction window for level p.
pub fn min_window(p: i64) -> i64 {
    (p + 3) / 4 + 2
}

/// Window needed to verify t^(p)(l^2 d) for all valid d <= dmax, plus guard.
pub fn auto_window(p: i64, l: i64, dmax: i64) -> i64 {
    let num = l * l * dmax + p * p;
    let need = num.div_euclid(4 * p) + i64::from(num % (4 * p) != 0) + 4;
    need.max(min_window(p))
}

/// Monomials E4^alpha E6^beta spanning M_k, ordered by beta.
fn eisenstein_monomials(k: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for beta in 0..=(k / 6) {
        let rem = k - 6 * beta;
        if rem % 4 == 0 {
            v.push((rem / 4, beta));
        }
    }
    v
}

/// Map d -> B(d) on the support -d = square mod 4p, for -1 <= d <= dmax.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    p: i64,
    entries: BTreeMap<i64, BigInt>,
    dmax: i64,
}

impl CoefficientTable {
    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn dmax(&self) -> i64 {
        self.dmax
    }

    /// True when -d is a square mod 4p (d in the support of g_p).
    pub fn is_valid(&self, d: i64) -> bool {
        !crate::bqf::sqrt_classes(self.p, d).is_empty()
    }

    /// B(d). Zero below d = -1 and off the support; `OutOfWindow` past dmax.
    pub fn get(&self, d: i64) -> Result<BigInt> {
        if d < -1 {
            return Ok(BigInt::zero());
        }
        if d > self.dmax {
            return Err(Error::OutOfWindow {
                what: format!("B({d}) beyond table bound {}", self.dmax),
            });
        }
        Ok(self.entries.get(&d).cloned().unwrap_or_else(BigInt::zero))
    }

    /// Iterate the stored nonzero (d, B(d)) entries in increasing d.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.entries.iter().map(|(&d, v)| (d, v))
    }
}

/// phi_p together with its derived coefficient table.
#[derive(Clone, Debug)]
pub struct PhiP {
    p: i64,
    expansion: JacobiExpansion,
    btable: CoefficientTable,
}

/// Representations d = 4pn - r^2 with r >= 0 and n inside the window,
/// ascending in r, at most `limit` of them.
fn representations(p: i64, d: i64, window: i64, limit: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut r = 0;
    while out.len() < limit {
        let num = d + r * r;
        if num >= 0 {
            if num % (4 * p) == 0 {
                let n = num / (4 * p);
                if n < window {
                    out.push((n, r));
                } else if r > p {
                    break;
                }
            } else if r > p && num / (4 * p) >= window {
                break;
            }
        }
        r += 1;
    }
    out
}

impl PhiP {
    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn expansion(&self) -> &JacobiExpansion {
        &self.expansion
    }

    pub fn btable(&self) -> &CoefficientTable {
        &self.btable
    }

    pub fn qmax(&self) -> i64 {
        self.expansion.qmax()
    }

    /// B(d), read off the expansion and cross-checked across at least two
    /// representations of d = 4pn - r^2 when the window offers them.
    pub fn extract_b(&self, d: i64) -> Result<BigInt> {
        if crate::bqf::sqrt_classes(self.p, d).is_empty() {
            return Err(Error::UnsupportedDiscriminant {
                d,
                why: format!("-d is not a square mod {}", 4 * self.p),
            });
        }
        let reps = representations(self.p, d, self.expansion.qmax(), 2);
        if reps.is_empty() {
            return Err(Error::OutOfWindow {
                what: format!("no representation of d = {d} inside the window"),
            });
        }
        let mut value: Option<Rational> = None;
        for &(n, r) in &reps {
            let c = self.expansion.coefficient(n, r)?;
            match &value {
                None => value = Some(c),
                Some(v) => {
                    if *v != c {
                        return Err(Error::InconsistentRepresentations {
                            d,
                            details: format!("{reps:?} give different coefficients"),
                        });
                    }
                }
            }
        }
        let v = value.expect("nonempty reps");
        if !v.is_integer() {
            return Err(Error::NonIntegralResult {
                what: format!("B({d}) = {v}"),
            });
        }
        Ok(v.to_integer())
    }

    /// t^(p)(d) = -B(d), with t^(p)(-1) = -1 and t^(p)(d) = 0 for d < -1.
    pub fn trace_star(&self, d: i64) -> Result<BigInt> {
        if d < -1 {
            return Ok(BigInt::zero());
        }
        Ok(-self.extract_b(d)?)
    }

    /// Re-check every structural invariant of the stored expansion: even
    /// weight symmetry, weak support, elliptic shifts, D-dependence, the
    /// singular part, and B-integrality.
    pub fn validate(&self) -> Result<()> {
        let e = &self.expansion;
        if e.weight() != 2 || e.index() != self.p {
            return Err(Error::InvalidCache(format!(
                "expansion tagged weight {} index {}, expected 2 and {}",
                e.weight(),
                e.index(),
                self.p
            )));
        }
        e.check_symmetry()?;
        e.check_weak_support()?;
        e.check_elliptic_shift(&[-2, -1, 1, 2])?;
        e.check_d_dependence()?;
        audit_singular_part(self.p, e)?;
        for (d, _) in self.btable.entries() {
            self.extract_b(d)?;
        }
        Ok(())
    }

    /// Versioned JSON document for the expansion cache.
    pub fn to_cache_json(&self) -> String {
        let terms: Vec<Value> = self
            .expansion
            .rows()
            .map(|(n, poly)| {
                let row: Vec<Value> = poly
                    .terms()
                    .map(|(r, c)| {
                        debug_assert!(c.is_integer());
                        json!([r, c.to_integer().to_string()])
                    })
                    .collect();
                json!([n, row])
            })
            .collect();
        json!({
            "p": self.p,
            "weight": 2,
            "index": self.p,
            "qmax": self.expansion.qmax(),
            "generator": "phi_p/v1",
            "terms": terms,
        })
        .to_string()
    }

    /// Load and fully revalidate a cached expansion.
    pub fn from_cache_json(text: &str) -> Result<PhiP> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidCache(e.to_string()))?;
        let gen = v["generator"].as_str().unwrap_or_default();
        if gen != "phi_p/v1" {
            return Err(Error::InvalidCache(format!("unknown generator id {gen:?}")));
        }
        let p = v["p"]
            .as_i64()
            .ok_or_else(|| Error::InvalidCache("missing p".into()))?;
        let qmax = v["qmax"]
            .as_i64()
            .ok_or_else(|| Error::InvalidCache("missing qmax".into()))?;
        if v["weight"].as_i64() != Some(2) || v["index"].as_i64() != Some(p) {
            return Err(Error::InvalidCache("weight/index tags do not match".into()));
        }
        if !is_genus_zero_prime(p) {
            return Err(Error::UnsupportedLevel {
                p,
                why: "cached level is not a genus-zero prime".into(),
            });
        }
        let mut expansion = JacobiExpansion::zero(2, p, qmax);
        let rows = v["terms"]
            .as_array()
            .ok_or_else(|| Error::InvalidCache("terms must be an array".into()))?;
        for row in rows {
            let n = row[0]
                .as_i64()
                .ok_or_else(|| Error::InvalidCache("bad q exponent".into()))?;
            let entries = row[1]
                .as_array()
                .ok_or_else(|| Error::InvalidCache("bad row".into()))?;
            let mut poly = crate::zetapoly::ZetaPolynomial::zero();
            for e in entries {
                let r = e[0]
                    .as_i64()
                    .ok_or_else(|| Error::InvalidCache("bad zeta exponent".into()))?;
                let c: BigInt = e[1]
                    .as_str()
                    .ok_or_else(|| Error::InvalidCache("coefficient must be a string".into()))?
                    .parse()
                    .map_err(|_| Error::InvalidCache("unparsable coefficient".into()))?;
                poly.add_term(r, Rational::from(c));
            }
            expansion = expansion.add(&JacobiExpansion::from_poly(2, p, n, poly, qmax));
        }
        let btable = table_from_expansion(p, &expansion)?;
        let phi = PhiP {
            p,
            expansion,
            btable,
        };
        phi.validate()?;
        Ok(phi)
    }
}

/// Check the singular part over the whole window: every in-support class with
/// D = 4pn - r^2 < 0 vanishes except D = -1 (value 1), and c(0, 0) = -2.
fn audit_singular_part(p: i64, e: &JacobiExpansion) -> Result<()> {
    for n in 0..e.qmax() {
        let rmax = (((4 * p * n + p * p) as f64).sqrt() as i64) + 1;
        for r in 0..=rmax {
            let d = 4 * p * n - r * r;
            if d >= 0 {
                continue;
            }
            let want = Rational::from(BigInt::from(if d == -1 { 1 } else { 0 }));
            for s in [r, -r] {
                let got = e.coefficient(n, s)?;
                if got != want {
                    return Err(Error::InconsistentRepresentations {
                        d,
                        details: format!("singular audit: c({n},{s}) = {got}, want {want}"),
                    });
                }
                if r == 0 {
                    break;
                }
            }
        }
    }
    let c00 = e.coefficient(0, 0)?;
    if c00 != Rational::from(BigInt::from(-2)) {
        return Err(Error::InconsistentRepresentations {
            d: 0,
            details: format!("B(0) = {c00}, want -2"),
        });
    }
    Ok(())
}

/// Read the full coefficient table off a validated expansion.
fn table_from_expansion(p: i64, e: &JacobiExpansion) -> Result<CoefficientTable> {
    let window = e.qmax();
    let dmax = (4 * p * (window - 1) - p * p).max(-1);
    let mut entries = BTreeMap::new();
    for d in -1..=dmax {
        if crate::bqf::sqrt_classes(p, d).is_empty() {
            continue;
        }
        let reps = representations(p, d, window, 2);
        debug_assert!(!reps.is_empty(), "no representation for valid d = {d}");
        let mut value: Option<Rational> = None;
        for &(n, r) in &reps {
            let c = e.coefficient(n, r)?;
            match &value {
                None => value = Some(c),
                Some(v) if *v != c => {
                    return Err(Error::InconsistentRepresentations {
                        d,
                        details: format!("representations {reps:?} disagree"),
                    })
                }
                _ => {}
            }
        }
        let v = value.expect("nonempty");
        if !v.is_integer() {
            return Err(Error::NonIntegralResult {
                what: format!("B({d}) = {v}"),
            });
        }
        let b = v.to_integer();
        if !b.is_zero() {
            entries.insert(d, b);
        }
    }
    Ok(CoefficientTable { p, entries, dmax })
}

/// Build phi_p at the given window by solving its singular-part conditions
/// inside the weak space spanned by E4^alpha E6^beta a^i b^(p-i).
pub fn construct_phi_p(p: i64, qmax: i64) -> Result<PhiP> {
    if !is_genus_zero_prime(p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "Gamma_0(p)* has positive genus or p is not prime".into(),
        });
    }
    if qmax < min_window(p) {
        return Err(Error::InvalidArgument(format!(
            "qmax = {qmax} below the minimal window {} for p = {p}",
            min_window(p)
        )));
    }

    let a = SymDense::from_expansion(&gen_a(qmax))?;
    let b = SymDense::from_expansion(&gen_b(qmax)?)?;

    // a^i b^(p-i) for i = 1..p, shared between the solve and the final
    // evaluation.
    let mut apow: Vec<SymDense> = vec![a.clone()];
    for _ in 2..=p {
        apow.push(apow.last().unwrap().mul(&a));
    }
    let mut bpow: Vec<SymDense> = vec![b.clone()];
    for _ in 2..p {
        bpow.push(bpow.last().unwrap().mul(&b));
    }
    let products: Vec<SymDense> = (1..=p)
        .map(|i| {
            if i == p {
                apow[(p - 1) as usize].clone()
            } else {
                apow[(i - 1) as usize].mul(&bpow[(p - i - 1) as usize])
            }
        })
        .collect();
    drop(apow);
    drop(bpow);

    // Eisenstein monomial series at the full window.
    let alpha_max = (2 + 2 * p) / 4;
    let beta_max = (2 + 2 * p) / 6;
    let e4 = eisenstein_e4(qmax);
    let e6 = eisenstein_e6(qmax);
    let mut e4pow: Vec<FourierSeries> = vec![FourierSeries::one(qmax)];
    for _ in 1..=alpha_max {
        e4pow.push(e4pow.last().unwrap().mul(&e4));
    }
    let mut e6pow: Vec<FourierSeries> = vec![FourierSeries::one(qmax)];
    for _ in 1..=beta_max {
        e6pow.push(e6pow.last().unwrap().mul(&e6));
    }
    let columns: Vec<(i64, i64, i64)> = (1..=p)
        .flat_map(|i| {
            eisenstein_monomials(2 + 2 * i)
                .into_iter()
                .map(move |(al, be)| (i, al, be))
        })
        .collect();
    let mono_series: Vec<FourierSeries> = columns
        .iter()
        .map(|&(_, al, be)| e4pow[al as usize].mul(&e6pow[be as usize]))
        .collect();
    let mono_ints: Vec<Vec<BigInt>> = mono_series
        .iter()
        .map(|s| {
            (0..qmax)
                .map(|n| s.coeff_int(n).expect("inside window").to_integer())
                .collect()
        })
        .collect();

    // The exact system: one row per singular class.
    let classes = singular_classes(p);
    let rows = classes
        .iter()
        .map(|&(n, r)| {
            columns
                .iter()
                .zip(&mono_ints)
                .map(|(&(i, _, _), mono)| {
                    let prod = &products[(i - 1) as usize];
                    let mut acc = BigInt::zero();
                    for (m, c) in mono.iter().enumerate().take(n as usize + 1) {
                        if c.is_zero() {
                            continue;
                        }
                        if let Some(v) = prod.coeff_ref(n - m as i64, r) {
                            acc += c * v;
                        }
                    }
                    Rational::from(acc)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    let rhs: Vec<Rational> = classes
        .iter()
        .map(|&(n, r)| match 4 * p * n - r * r {
            -1 => Rational::from(BigInt::from(1)),
            0 => Rational::from(BigInt::from(-2)),
            _ => Rational::zero(),
        })
        .collect();
    let matrix = RationalMatrix::from_rows(rows);
    let solution = solve_affine(&matrix, &rhs).map_err(|e| match e {
        Error::Inconsistent => Error::NoSolution {
            what: format!("singular-part system for phi_{p}"),
        },
        other => other,
    })?;
    if !solution.kernel_basis.is_empty() {
        return Err(Error::NonTrivialKernel {
            dim: solution.kernel_basis.len(),
            what: format!("phi_{p} system; J_{{2,{p}}} should vanish"),
        });
    }

    // Evaluate the solution at the full window: phi = sum_i f_i a^i b^(p-i)
    // with f_i the solved modular-form coefficient of weight 2 + 2i. The
    // solution is cleared to a common denominator so the combination stays
    // in integer arithmetic.
    let denom: BigInt = solution
        .particular
        .iter()
        .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = solution
        .particular
        .iter()
        .map(|x| (x * Rational::from(denom.clone())).to_integer())
        .collect();
    let mut acc = SymDense::zero(qmax);
    for i in 1..=p {
        let mut f_i = vec![BigInt::zero(); qmax as usize];
        let mut used = false;
        for (idx, &(ci, _, _)) in columns.iter().enumerate() {
            if ci != i || scaled[idx].is_zero() {
                continue;
            }
            used = true;
            for (m, c) in mono_ints[idx].iter().enumerate() {
                if !c.is_zero() {
                    f_i[m] += c * &scaled[idx];
                }
            }
        }
        if !used {
            continue;
        }
        acc.add_assign(&products[(i - 1) as usize].mul_series_int(&f_i));
    }
    let phi = acc.to_expansion(2, p, &denom);

    audit_singular_part(p, &phi)?;
    let btable = table_from_expansion(p, &phi)?;
    Ok(PhiP {
        p,
        expansion: phi,
        btable,
    })
}
