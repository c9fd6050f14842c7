//! Positive definite integral binary quadratic forms.
//!
//! Gauss reduction, enumeration of class representatives (imprimitive forms
//! included), stabilizer weights omega, exact Heegner points, and the scan
//! that lifts a class to level p with p | a and b = beta mod 2p.

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::is_genus_zero_prime;

/// [a, b, c] with a > 0 and b^2 - 4ac < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        let q = QuadForm { a, b, c };
        assert!(
            a > 0 && q.discriminant() < 0,
            "form [{a},{b},{c}] is not positive definite"
        );
        q
    }

    /// b^2 - 4ac, always negative.
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Bring b into (-a, a] by a translation, keeping the discriminant.
    fn normalized(&self) -> QuadForm {
        let (a, b) = (self.a, self.b);
        let k = (b + a - 1).div_euclid(2 * a);
        let b2 = b - 2 * a * k;
        let c2 = (b2 * b2 - self.discriminant()) / (4 * a);
        QuadForm { a, b: b2, c: c2 }
    }

    /// The unique reduced representative of this form's class:
    /// |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
    pub fn reduce(&self) -> QuadForm {
        let mut q = self.normalized();
        while q.a > q.c {
            q = QuadForm {
                a: q.c,
                b: -q.b,
                c: q.a,
            }
            .normalized();
        }
        if q.a == q.c && q.b < 0 {
            q.b = -q.b;
        }
        q
    }

    pub fn is_reduced(&self) -> bool {
        *self == self.reduce()
    }

    /// Stabilizer weight: 2 for the class of [a,0,a], 3 for [a,a,a], else 1.
    pub fn omega(&self) -> i64 {
        let r = self.reduce();
        if r.b == 0 && r.a == r.c {
            2
        } else if r.b == r.a && r.a == r.c {
            3
        } else {
            1
        }
    }

    /// The root of Q(x, 1) in the upper half plane, exactly.
    pub fn heegner_point(&self) -> HeegnerPoint {
        HeegnerPoint {
            b: self.b,
            a: self.a,
            d: -self.discriminant(),
        }
    }
}

/// alpha_Q = (-b + i sqrt(d)) / (2a) as an exact integer triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeegnerPoint {
    pub b: i64,
    pub a: i64,
    pub d: i64,
}

/// All reduced forms of discriminant -d, imprimitive forms included.
pub fn class_representatives(d: i64) -> Result<Vec<QuadForm>> {
    if d <= 0 || (d % 4 != 0 && d % 4 != 3) {
        return Err(Error::UnsupportedDiscriminant {
            d,
            why: "class enumeration requires d > 0 with d = 0, 3 mod 4".into(),
        });
    }
    let mut out = Vec::new();
    let amax = (d / 3).sqrt();
    for a in 1..=amax {
        for b in -a..=a {
            if (b * b + d) % 2 != 0 {
                continue;
            }
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            out.push(QuadForm { a, b, c });
        }
    }
    Ok(out)
}

/// Six times the Hurwitz class number sum over classes of 1/omega; kept in
/// sixths so the value stays integral.
pub fn hurwitz_sixths(d: i64) -> Result<i64> {
    Ok(class_representatives(d)?
        .iter()
        .map(|q| 6 / q.omega())
        .sum())
}

/// Square roots of -d mod 4p, represented in 0..=p (every square class mod
/// 4p has a root there).
pub fn sqrt_classes(p: i64, d: i64) -> Vec<i64> {
    (0..=p)
        .filter(|r| (r * r + d).rem_euclid(4 * p) == 0)
        .collect()
}

/// All 0 < d <= dmax with -d congruent to a square mod 4p.
pub fn valid_discriminants(p: i64, dmax: i64) -> Vec<i64> {
    (1..=dmax)
        .filter(|&d| !sqrt_classes(p, d).is_empty())
        .collect()
}

const LIFT_CAP: i64 = 1 << 13;

/// Find a form Gamma-equivalent to `q` with p | a and b = beta mod 2p.
///
/// Scans b' = beta mod 2p outward, factors (b'^2 + d)/4 over divisors
/// divisible by p, and tests reduce-equality with reduce(q); the scan bound
/// grows geometrically up to a hard cap so a failure is loud. Existence is
/// guaranteed only when p^2 does not divide d as a discriminant; callers
/// summing traces over a full class list must enforce that themselves.
pub fn lift_to_level(q: &QuadForm, p: i64, beta: i64) -> Result<QuadForm> {
    if !is_genus_zero_prime(p) {
        return Err(Error::UnsupportedLevel {
            p,
            why: "level must be one of the fifteen genus-zero primes".into(),
        });
    }
    let d = -q.discriminant();
    if (beta * beta + d).rem_euclid(4 * p) != 0 {
        return Err(Error::InvalidArgument(format!(
            "beta = {beta} is not a square root of -{d} mod {}",
            4 * p
        )));
    }
    if q.a % p == 0 && (q.b - beta).rem_euclid(2 * p) == 0 {
        return Ok(*q);
    }
    let target = q.reduce();
    let mut bound = 2 * p;
    loop {
        // k = 0, 1, -1, 2, -2, ... keeps the scan order deterministic.
        let kmax = (bound - beta) / (2 * p) + 1;
        for step in 0..=(2 * kmax) {
            let k = if step % 2 == 0 { step / 2 } else { -(step / 2 + 1) };
            let bp = beta + 2 * p * k;
            if bp.abs() > bound {
                continue;
            }
            let m = (bp * bp + d) / 4;
            debug_assert_eq!((bp * bp + d) % 4, 0);
            for ap in divisors_with_factor(m, p) {
                let cand = QuadForm {
                    a: ap,
                    b: bp,
                    c: m / ap,
                };
                if cand.reduce() == target {
                    return Ok(cand);
                }
            }
        }
        bound *= 2;
        if bound > LIFT_CAP {
            return Err(Error::LiftNotFound {
                a: q.a,
                b: q.b,
                c: q.c,
                p,
                beta,
                m: 2 * p,
            });
        }
    }
}

/// Divisors of m divisible by p, ascending.
fn divisors_with_factor(m: i64, p: i64) -> Vec<i64> {
    if m <= 0 || m % p != 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut t = 1;
    while t * t <= m {
        if m % t == 0 {
            if t % p == 0 {
                small.push(t);
            }
            let u = m / t;
            if u != t && u % p == 0 {
                large.push(u);
            }
        }
        t += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(QuadForm::new(2, 2, 1).reduce(), QuadForm::new(1, 0, 1));
        assert_eq!(QuadForm::new(1, 0, 1).reduce(), QuadForm::new(1, 0, 1));
        assert_eq!(QuadForm::new(2, -1, 3).reduce(), QuadForm::new(2, -1, 3));
        assert_eq!(QuadForm::new(2, 1, 3).reduce(), QuadForm::new(2, 1, 3));
    }

    /// Apply a unimodular substitution (x, y) -> (ax + by, cx + dy).
    fn transform(q: &QuadForm, m: [[i64; 2]; 2]) -> QuadForm {
        let [[al, be], [ga, de]] = m;
        debug_assert_eq!(al * de - be * ga, 1);
        QuadForm {
            a: q.a * al * al + q.b * al * ga + q.c * ga * ga,
            b: 2 * q.a * al * be + q.b * (al * de + be * ga) + 2 * q.c * ga * de,
            c: q.a * be * be + q.b * be * de + q.c * de * de,
        }
    }

    #[test]
    fn distinct_classes_at_23_by_orbit_scan() {
        // brute-force orbit of [2,-1,3] under words in S, T of length <= 6
        // never reaches [2,1,3]
        let s = [[0, -1], [1, 0]];
        let t = [[1, 1], [0, 1]];
        let tinv = [[1, -1], [0, 1]];
        let mut orbit = std::collections::HashSet::new();
        orbit.insert(QuadForm::new(2, -1, 3));
        for _ in 0..6 {
            let current: Vec<QuadForm> = orbit.iter().copied().collect();
            for q in current {
                for m in [s, t, tinv] {
                    orbit.insert(transform(&q, m));
                }
            }
        }
        assert!(!orbit.contains(&QuadForm::new(2, 1, 3)));
        assert!(orbit.iter().all(|q| q.reduce() == QuadForm::new(2, -1, 3)));
    }

    #[test]
    fn class_lists() {
        assert_eq!(
            class_representatives(3).unwrap(),
            vec![QuadForm::new(1, 1, 1)]
        );
        assert_eq!(
            class_representatives(23).unwrap(),
            vec![
                QuadForm::new(1, 1, 6),
                QuadForm::new(2, -1, 3),
                QuadForm::new(2, 1, 3)
            ]
        );
        // d = 12 needs the imprimitive form [2,2,2]
        assert_eq!(
            class_representatives(12).unwrap(),
            vec![QuadForm::new(1, 0, 3), QuadForm::new(2, 2, 2)]
        );
        assert!(class_representatives(5).is_err());
    }

    #[test]
    fn class_counts_match_brute_force() {
        for d in 3..=200i64 {
            if d % 4 != 0 && d % 4 != 3 {
                continue;
            }
            let listed = class_representatives(d).unwrap().len();
            // independent scan: test the reduced predicate directly on every
            // candidate triple in the box
            let bound = (d / 3).sqrt() + 1;
            let mut count = 0;
            for a in 1..=bound {
                for b in -bound..=bound {
                    let num = b * b + d;
                    if num % (4 * a) != 0 {
                        continue;
                    }
                    let c = num / (4 * a);
                    let reduced =
                        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c));
                    if reduced {
                        count += 1;
                    }
                }
            }
            assert_eq!(listed, count, "class count mismatch at d = {d}");
        }
    }

    #[test]
    fn omega_examples() {
        assert_eq!(QuadForm::new(1, 0, 1).omega(), 2);
        assert_eq!(QuadForm::new(2, 2, 2).omega(), 3);
        assert_eq!(QuadForm::new(1, 1, 6).omega(), 1);
    }

    #[test]
    fn hurwitz_class_numbers() {
        assert_eq!(hurwitz_sixths(3).unwrap(), 2); // H(3) = 1/3
        assert_eq!(hurwitz_sixths(4).unwrap(), 3); // H(4) = 1/2
        assert_eq!(hurwitz_sixths(23).unwrap(), 18); // H(23) = 3
    }

    #[test]
    fn heegner_point_examples() {
        assert_eq!(
            QuadForm::new(1, 0, 1).heegner_point(),
            HeegnerPoint { b: 0, a: 1, d: 4 }
        );
        assert_eq!(
            QuadForm::new(1, 1, 1).heegner_point(),
            HeegnerPoint { b: 1, a: 1, d: 3 }
        );
        // (1 + sqrt(-7))/4
        assert_eq!(
            QuadForm::new(2, -1, 1).heegner_point(),
            HeegnerPoint { b: -1, a: 2, d: 7 }
        );
    }

    #[test]
    fn lift_examples() {
        // d = 4: reduce([2,2,1]) = [1,0,1], so the scan returns [2,2,1]
        let q4 = QuadForm::new(1, 0, 1);
        assert_eq!(lift_to_level(&q4, 2, 2).unwrap(), QuadForm::new(2, 2, 1));
        let q = QuadForm::new(1, 1, 2); // d = 7
        let l7 = lift_to_level(&q, 2, 1).unwrap();
        assert_eq!(l7.a % 2, 0);
        assert_eq!((l7.b - 1).rem_euclid(4), 0);
        assert_eq!(l7.reduce(), q.reduce());
        assert_eq!(l7, QuadForm::new(2, 1, 1));
        // a form already satisfying the conditions is returned unchanged
        let ok = QuadForm::new(2, 1, 1);
        assert_eq!(lift_to_level(&ok, 2, 1).unwrap(), ok);
        // d = 8: [1,0,2] lifts to a form with a = 0 mod 2, b = 0 mod 4
        let q8 = QuadForm::new(1, 0, 2);
        let l8 = lift_to_level(&q8, 2, 0).unwrap();
        assert_eq!(l8.a % 2, 0);
        assert_eq!(l8.b.rem_euclid(4), 0);
        assert_eq!(l8.reduce(), q8.reduce());
    }

    #[test]
    fn lift_rejects_bad_beta() {
        let q = QuadForm::new(1, 1, 2); // d = 7, -7 = 1 mod 8
        assert!(matches!(
            lift_to_level(&q, 2, 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn valid_discriminant_lists() {
        assert_eq!(valid_discriminants(2, 8), vec![4, 7, 8]);
        assert_eq!(valid_discriminants(3, 12), vec![3, 8, 11, 12]);
        assert_eq!(valid_discriminants(5, 11), vec![4, 11]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_form() -> impl Strategy<Value = QuadForm> {
            (1i64..20, -19i64..20, 1i64..20).prop_filter_map(
                "positive definite",
                |(a, b, c)| {
                    if b * b - 4 * a * c < 0 {
                        Some(QuadForm { a, b, c })
                    } else {
                        None
                    }
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn reduce_idempotent_and_invariant(q in arb_form(),
                                               word in prop::collection::vec(0u8..3, 0..8)) {
                let r = q.reduce();
                prop_assert_eq!(r.reduce(), r);
                prop_assert_eq!(r.discriminant(), q.discriminant());
                prop_assert!(r.is_reduced());
                // random unimodular transform of q reduces to the same form
                let gens = [[[0i64, -1], [1, 0]], [[1, 1], [0, 1]], [[1, -1], [0, 1]]];
                let mut t = q;
                for g in word {
                    t = transform(&t, gens[g as usize]);
                }
                prop_assert_eq!(t.reduce(), r);
            }
        }
    }
}
