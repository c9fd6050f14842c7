//! Independent high-precision evaluation of j and the Hauptmoduls j_p^* at
//! Heegner points, summed into trace values that cross-check the exact
//! series routes.
//!
//! Every evaluation carries a conservative absolute error bound combining
//! the rigorous series tail with an ulp allowance for rounding; a trace is
//! accepted only when the bound is far below the nearest-integer tolerance.

use num_bigint::BigInt;

use crate::bigfloat;
pub use crate::bigfloat::{Complex, Real};
use crate::bqf::{class_representatives, lift_to_level, sqrt_classes, HeegnerPoint, QuadForm};
use crate::error::{Error, Result};
use crate::forms::ETA_HAUPTMODUL_PRIMES;

/// Working precision for the oracle: mantissa bits plus guard bits, a term
/// cap, and the shared transcendental constants at that precision.
#[derive(Clone, Debug)]
pub struct PrecisionContext {
    bits: u32,
    guard: u32,
    term_cap: usize,
    two_pi: Real,
    ln2: Real,
}

/// Nearest-integer acceptance tolerance for trace rounding.
const ROUND_TOL: f64 = 1e-6;

impl PrecisionContext {
    pub fn new(bits: u32) -> Self {
        Self::with(bits, 32, 200_000)
    }

    pub fn with(bits: u32, guard: u32, term_cap: usize) -> Self {
        let shift = bits + guard;
        PrecisionContext {
            bits,
            guard,
            term_cap,
            two_pi: bigfloat::pi(shift).mul_int(2),
            ln2: bigfloat::ln2(shift),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn shift(&self) -> u32 {
        self.bits + self.guard
    }

    /// The same context at twice the mantissa precision.
    pub fn doubled(&self) -> Self {
        Self::with(self.bits * 2, self.guard, self.term_cap)
    }

    fn ulp(&self) -> f64 {
        2f64.powi(-(self.shift() as i32))
    }
}

/// An evaluated complex value with a conservative absolute error bound.
#[derive(Clone, Debug)]
pub struct Approx {
    pub value: Complex,
    pub bound: f64,
}

/// tau as an exact fixed-point complex number from a Heegner point triple.
pub fn heegner_tau(h: &HeegnerPoint, ctx: &PrecisionContext) -> Complex {
    let shift = ctx.shift();
    Complex {
        re: Real::from_ratio(-h.b, 2 * h.a, shift),
        im: Real::from_int(h.d, shift).sqrt().div_int(2 * h.a),
    }
}

/// e^(2 pi i tau) for Im tau > 0.
fn exp_2pi_i(tau: &Complex, ctx: &PrecisionContext) -> Complex {
    let decay = bigfloat::exp_neg(&tau.im.mul(&ctx.two_pi), &ctx.ln2);
    let (c, s) = bigfloat::cos_sin_two_pi(&tau.re, &ctx.two_pi);
    Complex {
        re: c.mul(&decay),
        im: s.mul(&decay),
    }
}

fn require_upper_half(tau: &Complex) -> Result<()> {
    if tau.im.is_negative() || tau.im.is_zero() {
        return Err(Error::InvalidArgument(
            "evaluation point must lie in the upper half plane".into(),
        ));
    }
    Ok(())
}

/// eta(tau) = q^(1/24) prod (1 - q^n), adaptively truncated.
pub fn eval_eta(tau: &Complex, ctx: &PrecisionContext) -> Result<Approx> {
    require_upper_half(tau)?;
    let q24 = exp_2pi_i(&tau.div_int(24), ctx);
    let q = q24.powi(24);
    let qabs = q.abs_f64();
    if qabs > 1.0 - 1e-9 {
        return Err(Error::PrecisionExceeded {
            what: format!("|q| = {qabs} too close to 1 for the eta product"),
        });
    }
    let mut acc = Complex::one(ctx.shift());
    let mut qn = Complex::one(ctx.shift());
    let mut n = 0usize;
    loop {
        n += 1;
        if n > ctx.term_cap {
            return Err(Error::PrecisionExceeded {
                what: format!("eta product did not close within {} terms", ctx.term_cap),
            });
        }
        qn = qn.mul(&q);
        if qn.is_zero() {
            break;
        }
        acc = acc.mul(&Complex::one(ctx.shift()).sub(&qn));
    }
    let value = q24.mul(&acc);
    let mag = value.abs_f64();
    let bound = (8.0 * n as f64 + 4.0 / (1.0 - qabs) + 8.0) * ctx.ulp() * (mag + 1.0);
    Ok(Approx { value, bound })
}

/// sigma_k(n) for the numeric Eisenstein sums.
fn sigma_u128(k: u32, n: u64) -> u128 {
    let mut acc: u128 = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += (d as u128).pow(k);
            let q = n / d;
            if q != d {
                acc += (q as u128).pow(k);
            }
        }
        d += 1;
    }
    acc
}

/// 1 + mult * sum sigma_k(n) q^n, adaptively truncated.
fn eisenstein_numeric(
    q: &Complex,
    k: u32,
    mult: i64,
    ctx: &PrecisionContext,
) -> Result<Approx> {
    let qabs = q.abs_f64();
    let mut acc = Complex::one(ctx.shift());
    let mut qn = Complex::one(ctx.shift());
    let mut n = 0u64;
    loop {
        n += 1;
        if n as usize > ctx.term_cap {
            return Err(Error::PrecisionExceeded {
                what: format!("Eisenstein sum did not close within {} terms", ctx.term_cap),
            });
        }
        qn = qn.mul(q);
        if qn.is_zero() {
            break;
        }
        let c = BigInt::from(mult) * BigInt::from(sigma_u128(k, n));
        acc = acc.add(&qn.mul_bigint(&c));
    }
    let mag = acc.abs_f64();
    // the polynomial growth of sigma_k is absorbed by a crude 2^60 factor on
    // the geometric tail, still hundreds of bits below the guard
    let bound =
        (8.0 * n as f64 + 2f64.powi(60) / (1.0 - qabs)) * ctx.ulp() * (mag + 1.0);
    Ok(Approx { value: acc, bound })
}

/// j(tau) = E4(tau)^3 / Delta(tau), with Delta evaluated as eta(tau)^24.
pub fn eval_j(tau: &Complex, ctx: &PrecisionContext) -> Result<Approx> {
    require_upper_half(tau)?;
    let eta = eval_eta(tau, ctx)?;
    let eta_mag = eta.value.abs_f64();
    let delta = eta.value.powi(24);
    let delta_mag = delta.abs_f64();
    let delta_bound = 24.0 * eta_mag.powi(23) * eta.bound + 64.0 * ctx.ulp() * delta_mag;
    let q = exp_2pi_i(tau, ctx);
    let e4 = eisenstein_numeric(&q, 3, 240, ctx)?;
    let e4_mag = e4.value.abs_f64();
    let num = e4.value.powi(3);
    let num_mag = num.abs_f64();
    let num_bound = 3.0 * e4_mag.powi(2) * e4.bound + 16.0 * ctx.ulp() * num_mag;
    let value = num.div(&delta);
    let mag = value.abs_f64();
    let bound = (num_bound + mag * delta_bound) / delta_mag + 16.0 * ctx.ulp() * (mag + 1.0);
    Ok(Approx { value, bound })
}

/// j_p^*(tau) = f_p + 24/(p-1) + p^(12/(p-1)) / f_p for p in {2,3,5,7,13},
/// with f_p = (eta(tau)/eta(p tau))^(24/(p-1)).
pub fn eval_hauptmodul(p: i64, tau: &Complex, ctx: &PrecisionContext) -> Result<Approx> {
    if !ETA_HAUPTMODUL_PRIMES.contains(&p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "the oracle only evaluates the five eta-quotient Hauptmoduls".into(),
        });
    }
    require_upper_half(tau)?;
    let s = 24 / (p - 1);
    let e1 = eval_eta(tau, ctx)?;
    let ep = eval_eta(&tau.mul_int(p), ctx)?;
    let ratio = e1.value.div(&ep.value);
    let ratio_mag = ratio.abs_f64();
    let ratio_rel = e1.bound / e1.value.abs_f64() + ep.bound / ep.value.abs_f64();
    let _ = ratio_mag;
    let f = ratio.powi(s as u32);
    let f_mag = f.abs_f64();
    let f_bound = s as f64 * ratio_rel * f_mag + 16.0 * ctx.ulp() * (f_mag + 1.0);
    let c = BigInt::from(p).pow(s as u32 / 2);
    let c_f64 = (p as f64).powi((s / 2) as i32);
    let inv = f.recip();
    let value = f
        .add(&Complex::from_real(Real::from_int(s, ctx.shift())))
        .add(&inv.mul_bigint(&c));
    let mag = value.abs_f64();
    let bound = f_bound * (1.0 + c_f64 / (f_mag * f_mag)) + 16.0 * ctx.ulp() * (mag + 1.0);
    Ok(Approx { value, bound })
}

/// Round an evaluated trace to the nearest integer under the acceptance
/// rule: error bound far below the tolerance, imaginary part and distance to
/// the integer within it.
fn round_trace(sum: &Complex, bound: f64, ctx: &PrecisionContext) -> Result<BigInt> {
    // NaN bounds must also be rejected
    if bound.is_nan() || bound >= ROUND_TOL * 2f64.powi(-32) {
        return Err(Error::PrecisionExceeded {
            what: format!("error bound {bound:.3e} exceeds the acceptance threshold"),
        });
    }
    let tol = Real::from_ratio(1, 1_000_000, ctx.shift());
    let (int, dist) = sum.re.round_to_int();
    if !dist.less_than(&tol) || tol.less_than(&sum.im.abs()) {
        return Err(Error::NotNearInteger {
            value: format!("{} + {} i", sum.re.to_f64(), sum.im.to_f64()),
            tol: ROUND_TOL,
        });
    }
    Ok(int)
}

/// t(d) = sum over classes of (j(alpha_Q) - 744) / omega_Q, rounded under
/// the acceptance rule.
pub fn trace_oracle_level1(d: i64, ctx: &PrecisionContext) -> Result<BigInt> {
    let classes = class_representatives(d)?;
    let mut sum6 = Complex::zero(ctx.shift());
    let mut bound = 0.0;
    let c744 = Complex::from_real(Real::from_int(744, ctx.shift()));
    for q in &classes {
        let tau = heegner_tau(&q.heegner_point(), ctx);
        let j = eval_j(&tau, ctx)?;
        let w = 6 / q.omega();
        sum6 = sum6.add(&j.value.sub(&c744).mul_int(w));
        bound += w as f64 * j.bound;
    }
    round_trace(&sum6.div_int(6), bound / 6.0, ctx)
}

/// t^(p)(d) via lifted Heegner points, for a chosen square root beta of -d
/// mod 4p.
pub fn trace_oracle_star_with_beta(
    p: i64,
    d: i64,
    beta: i64,
    ctx: &PrecisionContext,
) -> Result<BigInt> {
    if !ETA_HAUPTMODUL_PRIMES.contains(&p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "the oracle only evaluates the five eta-quotient Hauptmoduls".into(),
        });
    }
    if sqrt_classes(p, d).is_empty() {
        return Err(Error::UnsupportedDiscriminant {
            d,
            why: format!("-d is not a square mod {}", 4 * p),
        });
    }
    if d % (p * p) == 0 {
        return Err(Error::UnsupportedDiscriminant {
            d,
            why: format!(
                "p^2 = {} divides d: the class bijection behind the lifted trace fails",
                p * p
            ),
        });
    }
    let classes = class_representatives(d)?;
    let mut sum6 = Complex::zero(ctx.shift());
    let mut bound = 0.0;
    for q in &classes {
        let lifted = lift_to_level(q, p, beta)?;
        let tau = heegner_tau(&lifted.heegner_point(), ctx);
        let h = eval_hauptmodul(p, &tau, ctx)?;
        let w = 6 / q.omega();
        sum6 = sum6.add(&h.value.mul_int(w));
        bound += w as f64 * h.bound;
    }
    round_trace(&sum6.div_int(6), bound / 6.0, ctx)
}

/// t^(p)(d) with the smallest square root of -d mod 4p.
pub fn trace_oracle_star(p: i64, d: i64, ctx: &PrecisionContext) -> Result<BigInt> {
    let beta = *sqrt_classes(p, d)
        .first()
        .ok_or(Error::UnsupportedDiscriminant {
            d,
            why: format!("-d is not a square mod {}", 4 * p),
        })?;
    trace_oracle_star_with_beta(p, d, beta, ctx)
}

/// Evaluate j_p^* at the Heegner point of an explicit form, weighted by its
/// stabilizer, and round. This is the route for the handful of printed point
/// values, including discriminants where the lifted-trace bijection fails.
pub fn point_value(p: i64, form: &QuadForm, ctx: &PrecisionContext) -> Result<BigInt> {
    let tau = heegner_tau(&form.heegner_point(), ctx);
    let h = eval_hauptmodul(p, &tau, ctx)?;
    let w = 6 / form.omega();
    round_trace(&h.value.mul_int(w).div_int(6), h.bound, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    fn tau_of(b: i64, a: i64, d: i64) -> Complex {
        heegner_tau(&HeegnerPoint { b, a, d }, &ctx())
    }

    #[test]
    fn eta_at_i_matches_agm_closed_form() {
        // eta(i)^2 = 1 / (sqrt(2) agm(1, sqrt 2)), an independent oracle
        let c = ctx();
        let shift = c.shift();
        let i = tau_of(0, 1, 4);
        let eta = eval_eta(&i, &c).unwrap().value;
        assert!(eta.im.abs().log2_magnitude() < -250);
        let mut x = Real::one(shift);
        let mut y = Real::from_int(2, shift).sqrt();
        for _ in 0..64 {
            let m = x.add(&y).div_int(2);
            let g = x.mul(&y).sqrt();
            x = m;
            y = g;
        }
        let closed = Real::one(shift).div(&Real::from_int(2, shift).sqrt().mul(&x)).sqrt();
        let diff = eta.re.sub(&closed).abs();
        assert!(diff.log2_magnitude() < -200, "difference {}", diff.to_f64());
        assert!((eta.re.to_f64() - 0.768225).abs() < 1e-6);
    }

    #[test]
    fn eta_translation_phase() {
        // eta(tau + 1) = e^(i pi / 12) eta(tau) at tau = i/2
        let c = ctx();
        let shift = c.shift();
        let half_i = Complex {
            re: Real::zero(shift),
            im: Real::from_ratio(1, 2, shift),
        };
        let shifted = Complex {
            re: Real::one(shift),
            im: Real::from_ratio(1, 2, shift),
        };
        let lhs = eval_eta(&shifted, &c).unwrap().value;
        let (cos, sin) = bigfloat::cos_sin_two_pi(&Real::from_ratio(1, 24, shift), &c.two_pi);
        let rhs = eval_eta(&half_i, &c).unwrap().value.mul(&Complex { re: cos, im: sin });
        let diff = lhs.sub(&rhs);
        assert!(diff.re.abs().log2_magnitude() < -200);
        assert!(diff.im.abs().log2_magnitude() < -200);
    }

    #[test]
    fn delta_routes_agree_at_i() {
        // eta(i)^24 equals (E4(i)^3 - E6(i)^2)/1728 summed as series
        let c = ctx();
        let i = tau_of(0, 1, 4);
        let delta_eta = eval_eta(&i, &c).unwrap().value.powi(24);
        let q = exp_2pi_i(&i, &c);
        let e4 = eisenstein_numeric(&q, 3, 240, &c).unwrap().value;
        let e6 = eisenstein_numeric(&q, 5, -504, &c).unwrap().value;
        let delta_eis = e4.powi(3).sub(&e6.powi(2)).div_int(1728);
        let diff = delta_eta.sub(&delta_eis);
        assert!(diff.re.abs().log2_magnitude() < -200);
        assert!(diff.im.abs().log2_magnitude() < -200);
    }

    #[test]
    fn classical_j_values() {
        let c = ctx();
        // j(i) = 1728 checked through the trace: t(4) = (1728 - 744)/2
        assert_eq!(trace_oracle_level1(4, &c).unwrap(), BigInt::from(492));
        // j((-1 + sqrt(-3))/2) = 0: t(3) = -744/3
        assert_eq!(trace_oracle_level1(3, &c).unwrap(), BigInt::from(-248));
        assert_eq!(trace_oracle_level1(7, &c).unwrap(), BigInt::from(-4119));
        // j(sqrt(-2)) = 8000
        assert_eq!(trace_oracle_level1(8, &c).unwrap(), BigInt::from(7256));
        // j((-1 + sqrt(-11))/2) = -32768
        assert_eq!(trace_oracle_level1(11, &c).unwrap(), BigInt::from(-33512));
    }

    #[test]
    fn hauptmodul_point_values() {
        let c = ctx();
        // j_2^*((1 + i)/2) = -104, so t^(2)(4) = -52; the point is the root
        // of [2,-2,1]
        let h = eval_hauptmodul(2, &tau_of(-2, 2, 4), &c).unwrap();
        let (v, dist) = h.value.re.round_to_int();
        assert_eq!(v, BigInt::from(-104));
        assert!(dist.log2_magnitude() < -200);
        // j_2^*(sqrt(-2)/2) = 152
        let h8 = eval_hauptmodul(2, &tau_of(0, 2, 8), &c).unwrap();
        assert_eq!(h8.value.re.round_to_int().0, BigInt::from(152));
        // j_3^*((1 + sqrt(-11))/6) = 22
        let h11 = eval_hauptmodul(3, &tau_of(-1, 3, 11), &c).unwrap();
        assert_eq!(h11.value.re.round_to_int().0, BigInt::from(22));
        assert!(matches!(
            eval_hauptmodul(11, &tau_of(0, 1, 4), &c),
            Err(Error::UnsupportedLevel { .. })
        ));
    }

    #[test]
    fn star_traces_via_lifts() {
        let c = ctx();
        assert_eq!(trace_oracle_star(2, 7, &c).unwrap(), BigInt::from(-23));
        assert_eq!(trace_oracle_star(3, 11, &c).unwrap(), BigInt::from(22));
        assert_eq!(trace_oracle_star(5, 11, &c).unwrap(), BigInt::from(-12));
        // p^2 | d rejected
        assert!(matches!(
            trace_oracle_star(2, 4, &c),
            Err(Error::UnsupportedDiscriminant { .. })
        ));
    }

    #[test]
    fn beta_independence_and_doubling() {
        let c = ctx();
        let roots = sqrt_classes(2, 7);
        assert_eq!(roots, vec![1]);
        // both square roots mod 2p (1 and 3) and shifted representatives
        let mut values = Vec::new();
        for beta in [1, 3, -3, 5] {
            values.push(trace_oracle_star_with_beta(2, 7, beta, &c).unwrap());
        }
        assert!(values.windows(2).all(|w| w[0] == w[1]));
        // both roots agree across small discriminants and levels
        for p in [2i64, 3, 5] {
            for d in 1..=21 {
                if d % (p * p) == 0 {
                    continue;
                }
                let roots = sqrt_classes(p, d);
                let Some(&b0) = roots.first() else { continue };
                let first = trace_oracle_star_with_beta(p, d, b0, &c).unwrap();
                for b in roots.into_iter().chain([2 * p - b0]) {
                    assert_eq!(
                        trace_oracle_star_with_beta(p, d, b, &c).unwrap(),
                        first,
                        "p = {p}, d = {d}, beta = {b}"
                    );
                }
            }
        }
        // recomputing at doubled precision returns the same integer
        let doubled = c.doubled();
        assert_eq!(
            trace_oracle_star(2, 7, &doubled).unwrap(),
            values[0].clone()
        );
        assert_eq!(
            trace_oracle_level1(8, &doubled).unwrap(),
            BigInt::from(7256)
        );
    }

    #[test]
    fn explicit_point_route() {
        let c = ctx();
        // (1/2) j_2^*((1+i)/2) = -52 even though p^2 | 4
        let form = QuadForm::new(2, -2, 1);
        assert_eq!(point_value(2, &form, &c).unwrap(), BigInt::from(-52));
    }
}
