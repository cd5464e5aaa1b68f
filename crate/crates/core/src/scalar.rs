//! Exact coefficient arithmetic: arbitrary-precision rationals or a prime
//! field `F_p`, selectable per session.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::AlgebraError;

/// The coefficient field a session computes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    /// Arbitrary-precision rationals.
    Rational,
    /// The prime field `F_p`, `p` a prime below 2^31.
    Fp(u32),
}

impl FieldSpec {
    /// Validates the modulus for the `Fp` variant.
    pub fn fp(p: u32) -> Result<FieldSpec, AlgebraError> {
        if p < (1 << 31) && is_prime(p) {
            Ok(FieldSpec::Fp(p))
        } else {
            Err(AlgebraError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::zero()),
            FieldSpec::Fp(p) => Scalar::Fp { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::one()),
            FieldSpec::Fp(p) => Scalar::Fp { value: 1 % u64::from(*p), modulus: *p },
        }
    }

    /// The scalar `n` (image of the integer in the field).
    pub fn integer(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Fp(p) => {
                let p64 = i64::from(*p);
                Scalar::Fp { value: n.rem_euclid(p64) as u64, modulus: *p }
            }
        }
    }

    /// The scalar `num/den`; fails on zero denominators (including `den ≡ 0 mod p`).
    pub fn ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        match self {
            FieldSpec::Rational => Ok(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            FieldSpec::Fp(p) => {
                let pv = BigInt::from(*p);
                let n = ((num % &pv) + &pv) % &pv;
                let d = ((den % &pv) + &pv) % &pv;
                let n: u64 = n.try_into().expect("reduced residue fits u64");
                let d: u64 = d.try_into().expect("reduced residue fits u64");
                if d == 0 {
                    return Err(AlgebraError::ZeroDenominator);
                }
                let inv = mod_inverse(d, u64::from(*p));
                Ok(Scalar::Fp { value: mod_mul(n, inv, u64::from(*p)), modulus: *p })
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "rational"),
            FieldSpec::Fp(p) => write!(f, "fp:{p}"),
        }
    }
}

/// An element of the session field. `Fp` values are canonical residues in
/// `[0, p)`; all arithmetic is exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Fp { value: u64, modulus: u32 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rational,
            Scalar::Fp { modulus, .. } => FieldSpec::Fp(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Fp { value, modulus } => *value == 1 % u64::from(*modulus),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Fp { value: a, modulus: p }, Scalar::Fp { value: b, modulus: q }) if p == q => {
                Scalar::Fp { value: (a + b) % u64::from(*p), modulus: *p }
            }
            _ => panic!("scalar field mismatch: {} vs {}", self.field(), other.field()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Fp { value, modulus } => {
                let p = u64::from(*modulus);
                Scalar::Fp { value: (p - value) % p, modulus: *modulus }
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Fp { value: a, modulus: p }, Scalar::Fp { value: b, modulus: q }) if p == q => {
                Scalar::Fp { value: mod_mul(*a, *b, u64::from(*p)), modulus: *p }
            }
            _ => panic!("scalar field mismatch: {} vs {}", self.field(), other.field()),
        }
    }

    /// Multiplicative inverse; panics on zero (callers pivot on nonzero entries).
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => {
                assert!(!a.is_zero(), "inverse of zero");
                Scalar::Rational(a.recip())
            }
            Scalar::Fp { value, modulus } => {
                assert!(*value != 0, "inverse of zero");
                Scalar::Fp { value: mod_inverse(*value, u64::from(*modulus)), modulus: *modulus }
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    /// `"num/den"` for rationals, the canonical residue for `F_p`.
    pub fn coeff_string(&self) -> String {
        match self {
            Scalar::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Fp { value, .. } => format!("{value}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

/// True if the displayed form should be prefixed with a minus sign when used
/// as a leading term (rationals only; `F_p` residues are non-negative).
pub fn display_is_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(r) => r.is_negative(),
        Scalar::Fp { .. } => false,
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    // p < 2^31 so the product fits in u64
    (a * b) % p
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}
