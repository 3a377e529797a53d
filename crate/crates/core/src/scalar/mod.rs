//! Exact scalar tower: big rationals, real quadratic field elements, linear
//! forms in the blow-up parameter `b`, and integer lattice vectors.
//!
//! Every predicate in the crate is decided exactly. Floating point only
//! appears in [`QuadExt::to_f64`] and friends, for rendering.

mod lattice;
mod linform;
mod quad;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use lattice::{affine_length, same_direction, vadd, vsub, IMat2, IVec2, Vec2};
pub use linform::{BInterval, LinFormB, QuadraticB};
pub use quad::QuadExt;

/// Arbitrary-precision integer used for every class coordinate.
pub type Int = BigInt;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cannot combine elements of Q(sqrt({0})) and Q(sqrt({1}))")]
    MixedField(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand must be a positive integer, got {0}")]
    NonPositiveRadicand(BigInt),
    #[error("vector components are not commensurable with an integer direction")]
    NotCommensurable,
    #[error("zero vector has no affine length")]
    ZeroVector,
    #[error("sign of {0} cannot be decided on the given domain")]
    IndeterminateSign(String),
    #[error("{0} is not a square in its field")]
    NotASquare(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Exact sign of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn of_int(n: &BigInt) -> Sign {
        if n.is_zero() {
            Sign::Zero
        } else if n.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of_rational(r: &Rational) -> Sign {
        Sign::of_int(r.numer())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

/// The contract the geometric engine is written against.
///
/// A scalar is a vector space over the rationals that can recognise when two
/// of its elements are rationally proportional. Multiplication is only
/// needed for areas, so it lands in a separate `Square` type: for linear
/// forms in `b` the square of a length is a quadratic polynomial.
pub trait AffineScalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    type Square: Clone + PartialEq + fmt::Debug + Zero + Add<Output = Self::Square> + Sub<Output = Self::Square>;

    fn from_rational(r: Rational) -> Self;

    fn scale(&self, r: &Rational) -> Self;

    fn scale_int(&self, n: &BigInt) -> Self {
        self.scale(&Rational::from_integer(n.clone()))
    }

    /// `Some(r)` when `self == r * other`; `None` if `other` is zero or the two
    /// are not rationally proportional.
    fn ratio(&self, other: &Self) -> Option<Rational>;

    fn mul_wide(&self, other: &Self) -> Self::Square;
}

/// Scalars whose sign is decidable without extra context.
pub trait ExactSign {
    fn sign(&self) -> Sign;
}

/// Decides signs of scalars, possibly relative to a domain (for linear forms
/// in `b`, an interval of admissible `b`). `None` means "not constant".
pub trait SignOracle<S> {
    fn sign_of(&self, x: &S) -> Option<Sign>;

    fn is_positive(&self, x: &S) -> bool {
        self.sign_of(x) == Some(Sign::Positive)
    }
}

/// Sign oracle for scalars that are plain numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl<S: ExactSign> SignOracle<S> for Exact {
    fn sign_of(&self, x: &S) -> Option<Sign> {
        Some(x.sign())
    }
}

impl ExactSign for Rational {
    fn sign(&self) -> Sign {
        Sign::of_rational(self)
    }
}

impl AffineScalar for Rational {
    type Square = Rational;

    fn from_rational(r: Rational) -> Self {
        r
    }

    fn scale(&self, r: &Rational) -> Self {
        self * r
    }

    fn ratio(&self, other: &Self) -> Option<Rational> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }

    fn mul_wide(&self, other: &Self) -> Rational {
        self * other
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"a"`, `"a/b"` or a decimal such as `"0.65"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let err = |reason: &str| ScalarError::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(err("bad decimal"));
        }
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| err("bad decimal"))?
        };
        let f: BigInt = frac.parse().map_err(|_| err("bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = t.parse().map_err(|_| err("not a number"))?;
    Ok(Rational::from_integer(n))
}

/// Exact square root of a non-negative integer, if it is a perfect square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

pub fn exact_rational_sqrt(r: &Rational) -> Option<Rational> {
    let n = exact_isqrt(r.numer())?;
    let d = exact_isqrt(r.denom())?;
    Some(Rational::new(n, d))
}

/// Writes `n = s^2 * D` with `D` square-free and returns `(s, D)`.
///
/// Trial division runs up to the cube root of the remaining cofactor; what is
/// left after that has at most two prime factors, so it is either a perfect
/// square or square-free. For cofactors beyond `TRIAL_LIMIT^3` trial division
/// stops at `TRIAL_LIMIT` and the leftover is only checked for being a
/// perfect square, so `D` may then carry a square factor above the limit.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(small) = n.to_u128() {
        let (s, d) = squarefree_split_u128(small);
        return (BigUint::from(s), BigUint::from(d));
    }
    let mut rest = n.clone();
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    let mut f = BigUint::from(2u32);
    let limit = BigUint::from(TRIAL_LIMIT);
    while &f * &f * &f <= rest && f <= limit {
        let mut e = 0u32;
        while (&rest % &f).is_zero() {
            rest /= &f;
            e += 1;
        }
        if e > 0 {
            s *= f.pow(e / 2);
            if e % 2 == 1 {
                d *= &f;
            }
        }
        f += if f == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        s *= r;
    } else {
        d *= rest;
    }
    (s, d)
}

const TRIAL_LIMIT: u64 = 1 << 22;

fn squarefree_split_u128(mut rest: u128) -> (u128, u128) {
    let mut s = 1u128;
    let mut d = 1u128;
    let mut f = 2u128;
    while f.saturating_mul(f).saturating_mul(f) <= rest && f <= TRIAL_LIMIT as u128 {
        let mut e = 0u32;
        while rest % f == 0 {
            rest /= f;
            e += 1;
        }
        if e > 0 {
            s *= f.pow(e / 2);
            if e % 2 == 1 {
                d *= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if r * r == rest {
        s *= r;
    } else {
        d *= rest;
    }
    (s, d)
}

/// Square-free decomposition of a product, factoring each factor on its own.
/// Used for discriminants `t^2 - 4 = (t - 2)(t + 2)`.
pub fn squarefree_split_product(factors: &[BigUint]) -> (BigUint, BigUint) {
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    for f in factors {
        let (sf, df) = squarefree_split(f);
        s *= sf;
        let g = d.gcd(&df);
        s *= &g;
        d = (&d / &g) * (&df / &g);
    }
    (s, d)
}
