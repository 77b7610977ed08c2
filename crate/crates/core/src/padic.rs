//! Capped relative-precision p-adic scalars.
//!
//! An element of Q_p is stored as p^val * unit with the unit residue known
//! modulo p^N (N = relative precision), so the value itself is known modulo
//! p^(val+N). Exact rationals (infinite precision) and exact zero are
//! separate states, as is the precision-exhausted zero produced when a
//! cancellation eats every known digit: `O(p^a)` records only that the
//! valuation is at least `a`. The model is relative-precision rather than
//! fixed-modulus because the Frobenius pipeline repeatedly divides by powers
//! of p and must keep "provably zero mod p^N" distinct from "nonintegral".
//!
//! Integrality checks on exhausted values answer "inconclusive", never
//! "integral".

use crate::scalar::Scalar;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Three-way answer of a p-integrality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegralityVerdict {
    Integral,
    NonIntegral,
    /// The value is precision-exhausted (or carries no prime context), so
    /// integrality cannot be decided at the stated precision.
    Inconclusive,
}

/// p-adic valuation of a scalar, as far as it is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    /// Exact zero.
    PlusInfinity,
    /// Precision-exhausted: only a lower bound is known.
    AtLeast(i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// Exactly known rational value (infinite precision).
    Exact(BigRational),
    /// Exact zero carrying a display precision.
    Zero { prec: u32 },
    /// p^val * unit with unit < p^prec coprime to p; known mod p^(val+prec).
    Unit { val: i64, prec: u32, unit: BigUint },
    /// Precision-exhausted zero: valuation >= abs, nothing else known.
    Exhausted { abs: i64 },
}

/// An element of Q_p at capped relative precision.
///
/// Values produced by `Scalar::from_i64` carry no prime yet (`p = 0`) and
/// adopt the prime of the first context-carrying operand they meet; mixing
/// two distinct primes is a programming error and panics.
#[derive(Clone, Debug)]
pub struct PadicScalar {
    p: u64,
    kind: Kind,
}

fn pow_p(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Splits a nonzero rational as p^v * (prime-to-p part).
fn split_valuation(r: &BigRational, p: u64) -> (i64, BigRational) {
    assert!(!r.is_zero());
    let pb = BigInt::from(p);
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    let mut v: i64 = 0;
    loop {
        let (q, rem) = num.div_rem(&pb);
        if rem.is_zero() {
            num = q;
            v += 1;
        } else {
            break;
        }
    }
    loop {
        let (q, rem) = den.div_rem(&pb);
        if rem.is_zero() {
            den = q;
            v -= 1;
        } else {
            break;
        }
    }
    (v, BigRational::new(num, den))
}

/// p-adic valuation of an exact rational; `None` for zero (+infinity).
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(split_valuation(r, p).0)
    }
}

/// Residue of a rational with p-free denominator modulo p^e.
fn unit_residue(r: &BigRational, p: u64, e: u32) -> BigUint {
    let m = BigInt::from(pow_p(p, e));
    let num = r.numer().mod_floor(&m);
    let den = r.denom().mod_floor(&m);
    let g = den.extended_gcd(&m);
    assert!(g.gcd.is_one(), "denominator not coprime to p");
    let inv = g.x.mod_floor(&m);
    (num * inv)
        .mod_floor(&m)
        .to_biguint()
        .expect("mod_floor is nonnegative")
}

impl PadicScalar {
    /// Reduction of an exact rational into Q_p at relative precision `n`.
    pub fn from_rational(r: &BigRational, p: u64, n: u32) -> Self {
        assert!(p >= 3 && n >= 1, "need an odd prime and precision >= 1");
        if r.is_zero() {
            return PadicScalar {
                p,
                kind: Kind::Zero { prec: n },
            };
        }
        let (val, u) = split_valuation(r, p);
        PadicScalar {
            p,
            kind: Kind::Unit {
                val,
                prec: n,
                unit: unit_residue(&u, p, n),
            },
        }
    }

    /// Directly assembles p^val * unit at relative precision `prec`.
    pub fn from_unit(p: u64, val: i64, prec: u32, unit: u64) -> Self {
        assert!(unit % p != 0, "unit part must be coprime to p");
        let m = pow_p(p, prec);
        PadicScalar {
            p,
            kind: Kind::Unit {
                val,
                prec,
                unit: BigUint::from(unit) % m,
            },
        }
    }

    /// Interprets a residue `v` modulo p^w. A zero residue means only that
    /// the value vanishes mod p^w, so it becomes the exhausted state.
    pub fn from_residue_mod_p_pow(v: u64, p: u64, w: u32) -> Self {
        if v % pow_p(p, w).to_u64().expect("modulus fits u64") == 0 {
            return PadicScalar {
                p,
                kind: Kind::Exhausted { abs: w as i64 },
            };
        }
        let mut val = 0i64;
        let mut u = v;
        while u % p == 0 {
            u /= p;
            val += 1;
        }
        PadicScalar {
            p,
            kind: Kind::Unit {
                val,
                prec: w as u32 - val as u32,
                unit: BigUint::from(u),
            },
        }
    }

    pub fn exhausted(p: u64, abs: i64) -> Self {
        PadicScalar {
            p,
            kind: Kind::Exhausted { abs },
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.kind, Kind::Exhausted { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.kind {
            Kind::Zero { .. } => true,
            Kind::Exact(r) => r.is_zero(),
            _ => false,
        }
    }

    pub fn valuation(&self) -> Valuation {
        match &self.kind {
            Kind::Exact(r) => {
                if r.is_zero() {
                    Valuation::PlusInfinity
                } else if self.p == 0 {
                    panic!("valuation of a context-free value");
                } else {
                    Valuation::Finite(split_valuation(r, self.p).0)
                }
            }
            Kind::Zero { .. } => Valuation::PlusInfinity,
            Kind::Unit { val, .. } => Valuation::Finite(*val),
            Kind::Exhausted { abs } => Valuation::AtLeast(*abs),
        }
    }

    /// Relative precision, if the value is in unit form; exact values answer
    /// `None` (infinite precision).
    pub fn precision(&self) -> Option<u32> {
        match &self.kind {
            Kind::Unit { prec, .. } => Some(*prec),
            Kind::Zero { prec } => Some(*prec),
            _ => None,
        }
    }

    /// The unit residue, reduced mod p^prec, for unit-form values.
    pub fn unit_part(&self) -> Option<BigUint> {
        match &self.kind {
            Kind::Unit { unit, .. } => Some(unit.clone()),
            _ => None,
        }
    }

    pub fn is_p_integral(&self) -> IntegralityVerdict {
        match self.valuation() {
            Valuation::PlusInfinity => IntegralityVerdict::Integral,
            Valuation::Finite(v) => {
                if self.p == 0 {
                    // Context-free nonzero rational: integrality is
                    // undecidable without a prime.
                    IntegralityVerdict::Inconclusive
                } else if v >= 0 {
                    IntegralityVerdict::Integral
                } else {
                    IntegralityVerdict::NonIntegral
                }
            }
            Valuation::AtLeast(_) => IntegralityVerdict::Inconclusive,
        }
    }

    /// The value reduced mod p^prec, for p-integral values determined to at
    /// least that absolute precision. This inverts [`from_residue_mod_p_pow`]
    /// on its image. Errors: precision exhausted below p^prec, negative
    /// valuation, or a context-free nonzero value.
    ///
    /// [`from_residue_mod_p_pow`]: PadicScalar::from_residue_mod_p_pow
    pub fn residue_mod_p_pow(&self, prec: u32) -> crate::Result<u64> {
        use crate::error::Error;
        if self.is_exact_zero() {
            return Ok(0);
        }
        let p = self.p;
        if p == 0 {
            return Err(Error::InvalidInput(
                "a context-free value has no p-adic residue".into(),
            ));
        }
        if let Some(a) = self.abs_prec() {
            if a < prec as i64 {
                return Err(Error::InsufficientTruncation(format!(
                    "value is known only mod p^{}, below the requested mod p^{}",
                    a.max(0),
                    prec
                )));
            }
        }
        match self.capped(p, prec as i64) {
            None => Ok(0),
            Some((v, u)) => {
                if v < 0 {
                    return Err(Error::DivisibilityFailure(format!(
                        "valuation {} is negative where a p-integral residue is required",
                        v
                    )));
                }
                let m = pow_p(p, prec);
                let val = (u * pow_p(p, v as u32)) % &m;
                Ok(val.to_u64().expect("residue below a u64 modulus"))
            }
        }
    }

    /// Absolute precision val+prec; `None` means exact (infinite).
    fn abs_prec(&self) -> Option<i64> {
        match &self.kind {
            Kind::Exact(_) | Kind::Zero { .. } => None,
            Kind::Unit { val, prec, .. } => Some(val + *prec as i64),
            Kind::Exhausted { abs } => Some(*abs),
        }
    }

    fn unify_prime(&self, other: &Self) -> u64 {
        match (self.p, other.p) {
            (0, q) => q,
            (q, 0) => q,
            (q, r) => {
                assert_eq!(q, r, "mixed p-adic contexts: p={} vs p={}", q, r);
                q
            }
        }
    }

    /// Exact value as (val, unit numerator residue) capped at absolute
    /// precision `a`, or `None` if the value is 0 mod p^a (or exactly 0).
    fn capped(&self, p: u64, a: i64) -> Option<(i64, BigUint)> {
        match &self.kind {
            Kind::Zero { .. } => None,
            Kind::Exact(r) => {
                if r.is_zero() {
                    return None;
                }
                let (v, u) = split_valuation(r, p);
                if v >= a {
                    return None;
                }
                Some((v, unit_residue(&u, p, (a - v) as u32)))
            }
            Kind::Unit { val, unit, .. } => {
                if *val >= a {
                    return None;
                }
                let u = unit % pow_p(p, (a - val) as u32);
                if u.is_zero() {
                    // Stored unit is coprime to p, so reducing it mod a
                    // positive power of p cannot vanish.
                    unreachable!("unit residue vanished under reduction");
                }
                Some((*val, u))
            }
            Kind::Exhausted { .. } => None,
        }
    }

    fn add_impl(self, other: Self) -> Self {
        let p = self.unify_prime(&other);
        // Exact + exact stays exact (covers the context-free case p == 0).
        if let (Kind::Exact(a), Kind::Exact(b)) = (&self.kind, &other.kind) {
            return PadicScalar {
                p,
                kind: Kind::Exact(a + b),
            };
        }
        if self.is_exact_zero() {
            return PadicScalar { p, ..other };
        }
        if other.is_exact_zero() {
            return PadicScalar { p, ..self };
        }
        // Result is known modulo p^A, the intersection of absolute precisions.
        let a = match (self.abs_prec(), other.abs_prec()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("both exact handled above"),
        };
        let (x, y) = (self.capped(p, a), other.capped(p, a));
        let (v1, u1, v2, u2) = match (x, y) {
            (None, None) => return PadicScalar::exhausted(p, a),
            (Some((v, u)), None) | (None, Some((v, u))) => {
                return PadicScalar {
                    p,
                    kind: Kind::Unit {
                        val: v,
                        prec: (a - v) as u32,
                        unit: u,
                    },
                }
            }
            (Some((v1, u1)), Some((v2, u2))) => (v1, u1, v2, u2),
        };
        let m = v1.min(v2);
        let modulus = pow_p(p, (a - m) as u32);
        let s = (u1 * pow_p(p, (v1 - m) as u32) + u2 * pow_p(p, (v2 - m) as u32)) % &modulus;
        if s.is_zero() {
            return PadicScalar::exhausted(p, a);
        }
        let pb = BigUint::from(p);
        let mut u = s;
        let mut v = m;
        while (&u % &pb).is_zero() {
            u /= &pb;
            v += 1;
        }
        PadicScalar {
            p,
            kind: Kind::Unit {
                val: v,
                prec: (a - v) as u32,
                unit: u,
            },
        }
    }

    fn mul_impl(self, other: Self) -> Self {
        let p = self.unify_prime(&other);
        if self.is_exact_zero() || other.is_exact_zero() {
            let prec = self
                .precision()
                .or(other.precision())
                .unwrap_or(1)
                .max(1);
            return PadicScalar {
                p,
                kind: if p == 0 {
                    Kind::Exact(BigRational::zero())
                } else {
                    Kind::Zero { prec }
                },
            };
        }
        match (self.kind, other.kind) {
            (Kind::Exact(a), Kind::Exact(b)) => PadicScalar {
                p,
                kind: Kind::Exact(a * b),
            },
            (Kind::Exhausted { abs }, k) | (k, Kind::Exhausted { abs }) => {
                let shift = match k {
                    Kind::Exact(ref r) => split_valuation(r, p).0,
                    Kind::Unit { val, .. } => val,
                    Kind::Exhausted { abs: b } => b,
                    Kind::Zero { .. } => unreachable!("exact zero handled above"),
                };
                PadicScalar::exhausted(p, abs + shift)
            }
            (
                Kind::Unit {
                    val: v1,
                    prec: p1,
                    unit: u1,
                },
                Kind::Unit {
                    val: v2,
                    prec: p2,
                    unit: u2,
                },
            ) => {
                let prec = p1.min(p2);
                PadicScalar {
                    p,
                    kind: Kind::Unit {
                        val: v1 + v2,
                        prec,
                        unit: (u1 * u2) % pow_p(p, prec),
                    },
                }
            }
            (Kind::Unit { val, prec, unit }, Kind::Exact(r))
            | (Kind::Exact(r), Kind::Unit { val, prec, unit }) => {
                let (vr, ur) = split_valuation(&r, p);
                PadicScalar {
                    p,
                    kind: Kind::Unit {
                        val: val + vr,
                        prec,
                        unit: (unit * unit_residue(&ur, p, prec)) % pow_p(p, prec),
                    },
                }
            }
            (Kind::Zero { .. }, _) | (_, Kind::Zero { .. }) => {
                unreachable!("exact zero handled above")
            }
        }
    }
}

impl PartialEq for PadicScalar {
    /// Equality at the finer value's stated precision; exhausted values only
    /// equal other exhausted values with the same bound.
    fn eq(&self, other: &Self) -> bool {
        if self.p != 0 && other.p != 0 && self.p != other.p {
            return false;
        }
        match (&self.kind, &other.kind) {
            (Kind::Exact(a), Kind::Exact(b)) => a == b,
            (Kind::Exhausted { abs: a }, Kind::Exhausted { abs: b }) => a == b,
            (Kind::Exhausted { .. }, _) | (_, Kind::Exhausted { .. }) => false,
            _ => {
                if self.is_exact_zero() || other.is_exact_zero() {
                    return self.is_exact_zero() && other.is_exact_zero();
                }
                let p = if self.p != 0 { self.p } else { other.p };
                let a = match (self.abs_prec(), other.abs_prec()) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("both exact handled above"),
                };
                self.capped(p, a) == other.capped(p, a)
            }
        }
    }
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, other: PadicScalar) -> PadicScalar {
        self.add_impl(other)
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, other: PadicScalar) -> PadicScalar {
        self.add_impl(-other)
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        let kind = match self.kind {
            Kind::Exact(r) => Kind::Exact(-r),
            z @ Kind::Zero { .. } => z,
            Kind::Unit { val, prec, unit } => Kind::Unit {
                val,
                prec,
                unit: pow_p(self.p, prec) - unit,
            },
            e @ Kind::Exhausted { .. } => e,
        };
        PadicScalar { p: self.p, kind }
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, other: PadicScalar) -> PadicScalar {
        self.mul_impl(other)
    }
}

impl Div for PadicScalar {
    type Output = PadicScalar;
    fn div(self, other: PadicScalar) -> PadicScalar {
        let inv = other
            .try_inv()
            .expect("division by zero or exhausted p-adic value");
        self.mul_impl(inv)
    }
}

impl Zero for PadicScalar {
    fn zero() -> Self {
        PadicScalar {
            p: 0,
            kind: Kind::Exact(BigRational::zero()),
        }
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
}

impl One for PadicScalar {
    fn one() -> Self {
        PadicScalar {
            p: 0,
            kind: Kind::Exact(BigRational::one()),
        }
    }
}

impl Scalar for PadicScalar {
    fn from_i64(n: i64) -> Self {
        PadicScalar {
            p: 0,
            kind: Kind::Exact(BigRational::from_integer(BigInt::from(n))),
        }
    }

    fn try_inv(&self) -> Option<Self> {
        let kind = match &self.kind {
            Kind::Exact(r) => {
                if r.is_zero() {
                    return None;
                }
                Kind::Exact(r.recip())
            }
            Kind::Zero { .. } | Kind::Exhausted { .. } => return None,
            Kind::Unit { val, prec, unit } => {
                let m = BigInt::from(pow_p(self.p, *prec));
                let g = BigInt::from(unit.clone()).extended_gcd(&m);
                Kind::Unit {
                    val: -val,
                    prec: *prec,
                    unit: g.x.mod_floor(&m).to_biguint().expect("nonnegative"),
                }
            }
        };
        Some(PadicScalar { p: self.p, kind })
    }

    fn exact_div_i64(&self, k: i64) -> Option<Self> {
        if k == 0 {
            return None;
        }
        let inv = PadicScalar {
            p: 0,
            kind: Kind::Exact(BigRational::new(BigInt::one(), BigInt::from(k))),
        };
        Some(self.clone().mul_impl(inv))
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Exact(r) => write!(f, "{}", r),
            Kind::Zero { prec } => write!(f, "0 (mod {}^{})", self.p, prec),
            Kind::Unit { val, prec, unit } => write!(
                f,
                "{}^{} * {} (mod {}^{})",
                self.p,
                val,
                unit,
                self.p,
                val + *prec as i64
            ),
            Kind::Exhausted { abs } => write!(f, "O({}^{})", self.p, abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn reduce_rational() {
        // 49/3 = 7^2 * (1/3), and 1/3 = 229 mod 343.
        let x = PadicScalar::from_rational(&q(49, 3), 7, 3);
        assert_eq!(x.valuation(), Valuation::Finite(2));
        assert_eq!(x.unit_part(), Some(BigUint::from(229u32)));
        assert_eq!(x.to_string(), "7^2 * 229 (mod 7^5)");

        let z = PadicScalar::from_rational(&q(0, 1), 7, 3);
        assert_eq!(z.valuation(), Valuation::PlusInfinity);
        assert_eq!(z.to_string(), "0 (mod 7^3)");

        let one = PadicScalar::from_rational(&q(1, 1), 5, 4);
        assert_eq!(one.valuation(), Valuation::Finite(0));
        assert_eq!(one.unit_part(), Some(BigUint::from(1u32)));
    }

    #[test]
    fn add_renormalizes() {
        // 7 + 7 = 2 * 7 at p = 7.
        let s = PadicScalar::from_rational(&q(7, 1), 7, 3)
            + PadicScalar::from_rational(&q(7, 1), 7, 3);
        assert_eq!(s.valuation(), Valuation::Finite(1));
        assert_eq!(s.unit_part(), Some(BigUint::from(2u32)));
        assert_eq!(s.precision(), Some(3));
    }

    #[test]
    fn inverse_pair() {
        let x = PadicScalar::from_rational(&q(1, 7), 7, 3);
        let y = PadicScalar::from_rational(&q(7, 1), 7, 3);
        let prod = x * y;
        assert_eq!(prod.valuation(), Valuation::Finite(0));
        assert_eq!(prod.unit_part(), Some(BigUint::from(1u32)));
    }

    #[test]
    fn cancellation_exhausts() {
        // (1 + 5^2) - 1 at N = 2 is indistinguishable from zero.
        let x = PadicScalar::from_rational(&q(26, 1), 5, 2);
        let y = PadicScalar::from_rational(&q(1, 1), 5, 2);
        let d = x - y;
        assert!(d.is_exhausted());
        assert_eq!(d.valuation(), Valuation::AtLeast(2));
        assert_eq!(d.is_p_integral(), IntegralityVerdict::Inconclusive);
        assert_eq!(d.to_string(), "O(5^2)");
    }

    #[test]
    fn integrality_verdicts() {
        assert_eq!(
            PadicScalar::from_rational(&q(49, 3), 7, 3).is_p_integral(),
            IntegralityVerdict::Integral
        );
        assert_eq!(
            PadicScalar::from_rational(&q(1, 7), 7, 3).is_p_integral(),
            IntegralityVerdict::NonIntegral
        );
        assert_eq!(
            PadicScalar::from_rational(&q(0, 1), 7, 3).is_p_integral(),
            IntegralityVerdict::Integral
        );
    }

    #[test]
    fn wildcard_adoption() {
        // Context-free integers adopt the prime on contact.
        let x = PadicScalar::from_rational(&q(3, 1), 7, 4);
        let y = PadicScalar::from_i64(4);
        let s = y.clone() + x.clone();
        assert_eq!(s.unit_part(), Some(BigUint::from(1u32)));
        assert_eq!(s.prime(), 7);
        let m = x * y;
        assert_eq!(m.unit_part(), Some(BigUint::from(12u32)));
    }

    #[test]
    fn division_by_integer_tracks_valuation() {
        let x = PadicScalar::from_rational(&q(1, 1), 7, 3);
        let d = x.exact_div_i64(14).unwrap();
        assert_eq!(d.valuation(), Valuation::Finite(-1));
        assert_eq!(d.precision(), Some(3));
    }

    #[test]
    fn residue_import() {
        let x = PadicScalar::from_residue_mod_p_pow(98, 7, 3);
        assert_eq!(x.valuation(), Valuation::Finite(2));
        assert_eq!(x.precision(), Some(1));
        let z = PadicScalar::from_residue_mod_p_pow(0, 7, 3);
        assert!(z.is_exhausted());
    }

    #[test]
    fn mixed_precision_add() {
        // abs precisions 5 and 3 intersect to 3.
        let x = PadicScalar::from_unit(7, 2, 3, 3); // known mod 7^5
        let y = PadicScalar::from_unit(7, 0, 3, 2); // known mod 7^3
        let s = x + y;
        assert_eq!(s.valuation(), Valuation::Finite(0));
        assert_eq!(s.precision(), Some(3));
        assert_eq!(s.unit_part(), Some(BigUint::from(2u32 + 3 * 49)));
    }
}
