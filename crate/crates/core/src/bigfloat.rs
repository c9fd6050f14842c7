//! Fixed-point big-number arithmetic for the Heegner-point oracle.
//!
//! A `Real` is a mantissa over an implicit binary shift: value = mant / 2^shift.
//! Each arithmetic operation rounds once (floor), so every result is within
//! an ulp or two of the exact value; the oracle layer carries explicit error
//! bounds and works with a generous guard, so ulp-level slop never matters.

use num_bigint::BigInt;
use num_traits::{Euclid, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    mant: BigInt,
    shift: u32,
}

/// Shift right rounding toward zero. A plain `>>` floors, which would keep
/// tiny negative values pinned at -1 ulp instead of letting iterations
/// converge to exact zero.
fn tshr(v: BigInt, k: u32) -> BigInt {
    if v.is_negative() {
        -((-v) >> k)
    } else {
        v >> k
    }
}

impl Real {
    pub fn zero(shift: u32) -> Real {
        Real {
            mant: BigInt::zero(),
            shift,
        }
    }

    pub fn one(shift: u32) -> Real {
        Real::from_int(1, shift)
    }

    pub fn from_int(v: i64, shift: u32) -> Real {
        Real {
            mant: BigInt::from(v) << shift,
            shift,
        }
    }

    pub fn from_bigint(v: &BigInt, shift: u32) -> Real {
        Real {
            mant: v << shift,
            shift,
        }
    }

    /// num / den * 2^shift rounded toward zero; den > 0.
    pub fn from_ratio(num: i64, den: i64, shift: u32) -> Real {
        assert!(den > 0);
        Real {
            mant: (BigInt::from(num) << shift) / BigInt::from(den),
            shift,
        }
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn chk(&self, o: &Real) {
        debug_assert_eq!(self.shift, o.shift, "mixed shifts");
    }

    pub fn add(&self, o: &Real) -> Real {
        self.chk(o);
        Real {
            mant: &self.mant + &o.mant,
            shift: self.shift,
        }
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.chk(o);
        Real {
            mant: &self.mant - &o.mant,
            shift: self.shift,
        }
    }

    pub fn neg(&self) -> Real {
        Real {
            mant: -&self.mant,
            shift: self.shift,
        }
    }

    pub fn abs(&self) -> Real {
        Real {
            mant: self.mant.abs(),
            shift: self.shift,
        }
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.chk(o);
        Real {
            mant: tshr(&self.mant * &o.mant, self.shift),
            shift: self.shift,
        }
    }

    pub fn mul_int(&self, k: i64) -> Real {
        Real {
            mant: &self.mant * k,
            shift: self.shift,
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Real {
        Real {
            mant: &self.mant * k,
            shift: self.shift,
        }
    }

    pub fn div(&self, o: &Real) -> Real {
        self.chk(o);
        assert!(!o.mant.is_zero(), "division by zero");
        Real {
            mant: (&self.mant << self.shift) / &o.mant,
            shift: self.shift,
        }
    }

    pub fn div_int(&self, k: i64) -> Real {
        assert!(k != 0);
        Real {
            mant: &self.mant / BigInt::from(k),
            shift: self.shift,
        }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self) -> Real {
        assert!(!self.mant.is_negative(), "sqrt of a negative value");
        Real {
            mant: (&self.mant << self.shift).sqrt(),
            shift: self.shift,
        }
    }

    pub fn shr(&self, k: u32) -> Real {
        Real {
            mant: tshr(self.mant.clone(), k),
            shift: self.shift,
        }
    }

    /// Approximate log2 of |value|; i64::MIN for zero.
    pub fn log2_magnitude(&self) -> i64 {
        if self.mant.is_zero() {
            return i64::MIN;
        }
        self.mant.bits() as i64 - self.shift as i64
    }

    pub fn to_f64(&self) -> f64 {
        // split the exponent to stay inside f64 range for large mantissas
        let bits = self.mant.bits() as i64;
        if bits <= 900 {
            let m = self.mant.to_string().parse::<f64>().unwrap_or(0.0);
            return m * 2f64.powi(-(self.shift as i32));
        }
        let excess = (bits - 900) as u32;
        let m: BigInt = &self.mant >> excess;
        let v = m.to_string().parse::<f64>().unwrap_or(0.0);
        v * 2f64.powi(excess as i32 - self.shift as i32)
    }

    /// Nearest integer together with the absolute distance to it.
    pub fn round_to_int(&self) -> (BigInt, Real) {
        let half = BigInt::from(1) << (self.shift - 1);
        let rounded = (&self.mant + &half) >> self.shift;
        let frac = &self.mant - (&rounded << self.shift);
        (
            rounded,
            Real {
                mant: frac.abs(),
                shift: self.shift,
            },
        )
    }

    pub fn less_than(&self, o: &Real) -> bool {
        self.chk(o);
        self.mant < o.mant
    }
}

/// pi at the given shift, by Machin's formula.
pub fn pi(shift: u32) -> Real {
    // work with extra guard bits so the ulp drift stays below the target
    let s = shift + 16;
    let p = atan_inv(5, s).mul_int(16).sub(&atan_inv(239, s).mul_int(4));
    Real {
        mant: p.mant >> 16,
        shift,
    }
}

/// arctan(1/k) at the given shift.
fn atan_inv(k: i64, shift: u32) -> Real {
    let k2 = BigInt::from(k) * k;
    let mut pow = (BigInt::from(1) << shift).div_euclid(&BigInt::from(k));
    let mut acc = BigInt::zero();
    let mut j = 0i64;
    while !pow.is_zero() {
        let term = pow.clone().div_euclid(&BigInt::from(2 * j + 1));
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        pow = pow.div_euclid(&k2);
        j += 1;
    }
    Real { mant: acc, shift }
}

/// ln 2 at the given shift, from 2 atanh(1/3).
pub fn ln2(shift: u32) -> Real {
    let s = shift + 16;
    let mut pow = (BigInt::from(1) << s).div_euclid(&BigInt::from(3));
    let mut acc = BigInt::zero();
    let mut j = 0i64;
    while !pow.is_zero() {
        acc += pow.clone().div_euclid(&BigInt::from(2 * j + 1));
        pow = pow.div_euclid(&BigInt::from(9));
        j += 1;
    }
    Real {
        mant: (acc << 1) >> 16,
        shift,
    }
}

/// e^(-t) for t >= 0: split off multiples of ln 2, Taylor on the remainder.
pub fn exp_neg(t: &Real, ln2: &Real) -> Real {
    assert!(!t.is_negative(), "exp_neg expects a nonnegative argument");
    let shift = t.shift;
    if t.log2_magnitude() > 40 {
        // e^(-t) underflows the fixed-point grid long before this
        return Real::zero(shift);
    }
    let n = t.div(ln2).mant >> shift;
    let n_u32 = u32::try_from(&n).unwrap_or(u32::MAX);
    if n_u32 >= shift + 2 {
        return Real::zero(shift);
    }
    let r = t.sub(&ln2.mul_bigint(&n));
    // e^(-r), 0 <= r < ln 2, alternating Taylor series
    let mut term = Real::one(shift);
    let mut acc = Real::one(shift);
    let mut j = 1i64;
    loop {
        term = term.mul(&r).div_int(j);
        if term.is_zero() {
            break;
        }
        if j % 2 == 1 {
            acc = acc.sub(&term);
        } else {
            acc = acc.add(&term);
        }
        j += 1;
    }
    acc.shr(n_u32)
}

/// (cos x, sin x) for |x| up to about pi, by Taylor series.
fn cos_sin_small(x: &Real) -> (Real, Real) {
    let shift = x.shift;
    let x2 = x.mul(x);
    let mut cos = Real::one(shift);
    let mut term = Real::one(shift);
    let mut j = 1i64;
    loop {
        term = term.mul(&x2).div_int((2 * j - 1) * (2 * j));
        if term.is_zero() {
            break;
        }
        if j % 2 == 1 {
            cos = cos.sub(&term);
        } else {
            cos = cos.add(&term);
        }
        j += 1;
    }
    let mut sin = x.clone();
    let mut sterm = x.clone();
    let mut j = 1i64;
    loop {
        sterm = sterm.mul(&x2).div_int((2 * j) * (2 * j + 1));
        if sterm.is_zero() {
            break;
        }
        if j % 2 == 1 {
            sin = sin.sub(&sterm);
        } else {
            sin = sin.add(&sterm);
        }
        j += 1;
    }
    (cos, sin)
}

/// (cos 2 pi x, sin 2 pi x): the integer part of x is removed exactly before
/// any rounding can amplify it.
pub fn cos_sin_two_pi(x: &Real, two_pi: &Real) -> (Real, Real) {
    let shift = x.shift;
    let half = BigInt::from(1) << (shift - 1);
    let k = (&x.mant + &half) >> shift;
    let frac = Real {
        mant: &x.mant - (k << shift),
        shift,
    };
    // |frac| <= 1/2, so the Taylor argument is at most pi
    cos_sin_small(&frac.mul(two_pi))
}

/// Complex fixed-point value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn zero(shift: u32) -> Complex {
        Complex {
            re: Real::zero(shift),
            im: Real::zero(shift),
        }
    }

    pub fn one(shift: u32) -> Complex {
        Complex {
            re: Real::one(shift),
            im: Real::zero(shift),
        }
    }

    pub fn from_real(re: Real) -> Complex {
        let shift = re.shift();
        Complex {
            re,
            im: Real::zero(shift),
        }
    }

    pub fn shift(&self) -> u32 {
        self.re.shift()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn neg(&self) -> Complex {
        Complex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_int(&self, k: i64) -> Complex {
        Complex {
            re: self.re.mul_int(k),
            im: self.im.mul_int(k),
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Complex {
        Complex {
            re: self.re.mul_bigint(k),
            im: self.im.mul_bigint(k),
        }
    }

    pub fn div_int(&self, k: i64) -> Complex {
        Complex {
            re: self.re.div_int(k),
            im: self.im.div_int(k),
        }
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm_sqr();
        Complex {
            re: self.re.div(&n),
            im: self.im.neg().div(&n),
        }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        self.mul(&o.recip())
    }

    pub fn powi(&self, e: u32) -> Complex {
        let mut acc = Complex::one(self.shift());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: u32 = 192;

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn constants() {
        assert!(close(&pi(S), std::f64::consts::PI, 1e-14));
        assert!(close(&ln2(S), std::f64::consts::LN_2, 1e-14));
    }

    #[test]
    fn arithmetic_and_sqrt() {
        let two = Real::from_int(2, S);
        let r = two.sqrt();
        assert!(close(&r.mul(&r), 2.0, 1e-40));
        let third = Real::from_ratio(1, 3, S);
        assert!(close(&third.mul_int(3), 1.0, 1e-40));
    }

    #[test]
    fn exponential_and_trig() {
        let l2 = ln2(S);
        let one = Real::one(S);
        assert!(close(&exp_neg(&one, &l2), (-1f64).exp(), 1e-30));
        let tp = pi(S).mul_int(2);
        let (c, s) = cos_sin_two_pi(&Real::from_ratio(1, 6, S), &tp);
        assert!(close(&c, 0.5, 1e-30));
        assert!(close(&s, (3f64).sqrt() / 2.0, 1e-30));
        let (c2, s2) = cos_sin_two_pi(&Real::from_ratio(5, 8, S), &tp);
        assert!(close(&c2, -(0.5f64).sqrt(), 1e-30));
        assert!(close(&s2, -(0.5f64).sqrt(), 1e-30));
        // exact zero for huge arguments
        assert!(exp_neg(&Real::from_int(1 << 20, S), &l2).is_zero());
    }

    #[test]
    fn rounding() {
        let x = Real::from_ratio(2999999, 1000000, S);
        let (n, dist) = x.round_to_int();
        assert_eq!(n, num_bigint::BigInt::from(3));
        assert!(close(&dist, 1e-6, 1e-12));
    }

    #[test]
    fn complex_ops() {
        let i = Complex {
            re: Real::zero(S),
            im: Real::one(S),
        };
        let m = i.powi(4);
        assert!(close(&m.re, 1.0, 1e-40));
        assert!(close(&m.im, 0.0, 1e-40));
        let r = i.recip();
        assert!(close(&r.im, -1.0, 1e-40));
    }
}
