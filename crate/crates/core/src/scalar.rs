//! Coefficient-ring abstraction shared by the series and reduction machinery.
//!
//! Every exact coefficient ring used by the crate implements [`Scalar`]:
//! arbitrary-precision rationals, arbitrary-precision integers, the
//! fixed-modulus residue ring [`Residue`], and the capped-precision p-adic
//! scalar in [`crate::padic`]. The trait deliberately embeds the integers
//! context-free (`from_i64`), while division goes through the element itself
//! (`exact_div_i64`, `try_inv`) so that context-carrying rings can resolve
//! their modulus from the receiver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::num::NonZeroU64;
use std::ops::{Add, Mul, Neg, Sub};

/// An exact commutative coefficient ring.
///
/// `from_i64` embeds small integers without any ring context; binary
/// operations unify such context-free values with context-carrying operands.
/// `try_inv` returns `None` for non-units, and `exact_div_i64` divides by an
/// integer when the division is exact (or the integer is invertible).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
{
    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse, if the element is a unit.
    fn try_inv(&self) -> Option<Self>;

    /// `self / k`, when that quotient exists in the ring.
    fn exact_div_i64(&self, k: i64) -> Option<Self>;

    fn mul_i64(&self, n: i64) -> Self {
        self.clone() * Self::from_i64(n)
    }

    fn is_unit(&self) -> bool {
        self.try_inv().is_some()
    }

    /// Embeds an arbitrary-precision integer through `from_i64` by a base-2^32
    /// Horner scheme. Context-free residues overflow beyond i128 magnitude;
    /// every ring in this crate embeds the coefficient sizes that occur.
    fn embed_bigint(x: &BigInt) -> Self {
        let (sign, digits) = x.to_u64_digits();
        let shift = Self::from_i64(1i64 << 32);
        let mut acc = Self::zero();
        for d in digits.iter().rev() {
            let hi = (d >> 32) as i64;
            let lo = (d & 0xffff_ffff) as i64;
            acc = (acc * shift.clone() + Self::from_i64(hi)) * shift.clone() + Self::from_i64(lo);
        }
        if sign == num_bigint::Sign::Minus {
            -acc
        } else {
            acc
        }
    }

    /// Embeds a rational number; `None` when the denominator is not a unit.
    fn embed_ratio(x: &BigRational) -> Option<Self> {
        let num = Self::embed_bigint(x.numer());
        let den = Self::embed_bigint(x.denom());
        den.try_inv().map(|d| num * d)
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn exact_div_i64(&self, k: i64) -> Option<Self> {
        if k == 0 {
            None
        } else {
            Some(self / BigRational::from_integer(BigInt::from(k)))
        }
    }
}

impl Scalar for BigInt {
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }

    fn try_inv(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }

    fn exact_div_i64(&self, k: i64) -> Option<Self> {
        if k == 0 {
            return None;
        }
        let k = BigInt::from(k);
        let (q, r) = self.div_rem(&k);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

/// An element of `Z/m` for a fixed `u64` modulus, with a context-free integer
/// variant so that `Zero::zero()` and `One::one()` exist without a modulus.
///
/// `Int` values unify with `Res` values on contact: `Int(k) + Res{v, m}`
/// first reduces `k` modulo `m`. Operations between `Res` values with
/// distinct moduli panic; the crate only ever mixes a residue with residues
/// of the same modulus or with context-free integers.
#[derive(Clone, Copy, Debug)]
pub enum Residue {
    /// Context-free exact integer, not yet attached to a modulus.
    Int(i128),
    /// A reduced value `v < m` in `Z/m`.
    Res { v: u64, m: NonZeroU64 },
}

impl Residue {
    pub fn res(v: i128, m: u64) -> Self {
        let m = NonZeroU64::new(m).expect("zero modulus");
        Residue::Res {
            v: reduce_i128(v, m.get()),
            m,
        }
    }

    pub fn from_bigint(x: &BigInt, m: u64) -> Self {
        let mm = BigInt::from(m);
        let r = x.mod_floor(&mm);
        let (_, digits) = r.to_u64_digits();
        let v = if digits.is_empty() { 0 } else { digits[0] };
        Residue::Res {
            v,
            m: NonZeroU64::new(m).expect("zero modulus"),
        }
    }

    /// The reduced value in `[0, m)`; reduces an `Int` with the given modulus.
    pub fn value_mod(&self, m: u64) -> u64 {
        match *self {
            Residue::Int(k) => reduce_i128(k, m),
            Residue::Res { v, m: mm } => {
                assert_eq!(mm.get(), m, "modulus mismatch");
                v
            }
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Residue::Int(_) => None,
            Residue::Res { m, .. } => Some(m.get()),
        }
    }

    /// Attach a modulus to a context-free value; no-op on `Res`.
    pub fn reduced(self, m: u64) -> Self {
        match self {
            Residue::Int(k) => Residue::res(k, m),
            r @ Residue::Res { .. } => {
                assert_eq!(r.modulus(), Some(m), "modulus mismatch");
                r
            }
        }
    }

    /// Exact division by `p^j` in `Z/p^w`, reducing the modulus to `p^(w-j)`.
    ///
    /// Returns `None` if `p^j` does not divide the value, or if the modulus
    /// is not divisible by `p^j` (so no precision would remain).
    pub fn exact_div_p_pow(&self, p: u64, j: u32) -> Option<Residue> {
        if j == 0 {
            return Some(*self);
        }
        let pj = p.checked_pow(j)?;
        match *self {
            Residue::Int(k) => {
                if k % (pj as i128) == 0 {
                    Some(Residue::Int(k / pj as i128))
                } else {
                    None
                }
            }
            Residue::Res { v, m } => {
                if m.get() % pj != 0 || v % pj != 0 {
                    return None;
                }
                let nm = m.get() / pj;
                if nm == 1 {
                    return None;
                }
                Some(Residue::Res {
                    v: v / pj,
                    m: NonZeroU64::new(nm).unwrap(),
                })
            }
        }
    }

    fn unify(self, other: Residue) -> (u64, u64, Option<NonZeroU64>) {
        match (self, other) {
            (Residue::Int(_), Residue::Int(_)) => unreachable!("handled by caller"),
            (Residue::Int(k), Residue::Res { v, m }) => (reduce_i128(k, m.get()), v, Some(m)),
            (Residue::Res { v, m }, Residue::Int(k)) => (v, reduce_i128(k, m.get()), Some(m)),
            (Residue::Res { v: v1, m: m1 }, Residue::Res { v: v2, m: m2 }) => {
                assert_eq!(m1, m2, "modulus mismatch: {} vs {}", m1, m2);
                (v1, v2, Some(m1))
            }
        }
    }
}

fn reduce_i128(k: i128, m: u64) -> u64 {
    let m = m as i128;
    (((k % m) + m) % m) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(reduce_i128(s0, m))
}

impl PartialEq for Residue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Residue::Int(a), Residue::Int(b)) => a == b,
            _ => {
                let (a, b, _) = self.unify(*other);
                a == b
            }
        }
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, other: Residue) -> Residue {
        if let (Residue::Int(a), Residue::Int(b)) = (self, other) {
            return Residue::Int(a.checked_add(b).expect("context-free overflow"));
        }
        let (a, b, m) = self.unify(other);
        let m = m.unwrap();
        Residue::Res {
            v: ((a as u128 + b as u128) % m.get() as u128) as u64,
            m,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, other: Residue) -> Residue {
        self + (-other)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        match self {
            Residue::Int(k) => Residue::Int(-k),
            Residue::Res { v, m } => Residue::Res {
                v: if v == 0 { 0 } else { m.get() - v },
                m,
            },
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, other: Residue) -> Residue {
        if let (Residue::Int(a), Residue::Int(b)) = (self, other) {
            return Residue::Int(a.checked_mul(b).expect("context-free overflow"));
        }
        let (a, b, m) = self.unify(other);
        let m = m.unwrap();
        Residue::Res {
            v: mul_mod(a, b, m.get()),
            m,
        }
    }
}

impl Zero for Residue {
    fn zero() -> Self {
        Residue::Int(0)
    }
    fn is_zero(&self) -> bool {
        match self {
            Residue::Int(k) => *k == 0,
            Residue::Res { v, .. } => *v == 0,
        }
    }
}

impl One for Residue {
    fn one() -> Self {
        Residue::Int(1)
    }
}

impl Scalar for Residue {
    fn from_i64(n: i64) -> Self {
        Residue::Int(n as i128)
    }

    fn try_inv(&self) -> Option<Self> {
        match *self {
            Residue::Int(1) => Some(Residue::Int(1)),
            Residue::Int(-1) => Some(Residue::Int(-1)),
            Residue::Int(_) => None,
            Residue::Res { v, m } => inv_mod(v, m.get()).map(|v| Residue::Res { v, m }),
        }
    }

    fn exact_div_i64(&self, k: i64) -> Option<Self> {
        match *self {
            Residue::Int(v) => {
                if k != 0 && v % k as i128 == 0 {
                    Some(Residue::Int(v / k as i128))
                } else {
                    None
                }
            }
            Residue::Res { v, m } => {
                let ki = reduce_i128(k as i128, m.get());
                inv_mod(ki, m.get()).map(|kinv| Residue::Res {
                    v: mul_mod(v, kinv, m.get()),
                    m,
                })
            }
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residue::Int(k) => write!(f, "{}", k),
            Residue::Res { v, m } => write!(f, "{} (mod {})", v, m),
        }
    }
}
