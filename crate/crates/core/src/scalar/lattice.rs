use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AffineScalar, Rational, ScalarError, Sign, SignOracle};

/// A pair of scalars; positions and edge vectors of a quadrilateral.
pub type Vec2<S> = [S; 2];

/// Integer 2-vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "Pair", into = "Pair")]
pub struct IVec2 {
    pub x: BigInt,
    pub y: BigInt,
}

/// Wire form `[x, y]`.
#[derive(Serialize, Deserialize)]
struct Pair(#[serde(with = "crate::json::bigint")] BigInt, #[serde(with = "crate::json::bigint")] BigInt);

impl From<Pair> for IVec2 {
    fn from(p: Pair) -> Self {
        IVec2 { x: p.0, y: p.1 }
    }
}

impl From<IVec2> for Pair {
    fn from(v: IVec2) -> Self {
        Pair(v.x, v.y)
    }
}

impl IVec2 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        IVec2 { x: x.into(), y: y.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y).is_one()
    }

    pub fn dot(&self, other: &IVec2) -> BigInt {
        &self.x * &other.x + &self.y * &other.y
    }

    /// `self.x * other.y - self.y * other.x`.
    pub fn cross(&self, other: &IVec2) -> BigInt {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn scale_int(&self, k: &BigInt) -> IVec2 {
        IVec2 { x: &self.x * k, y: &self.y * k }
    }

    /// `s * self` as a scalar vector.
    pub fn times<S: AffineScalar>(&self, s: &S) -> Vec2<S> {
        [s.scale_int(&self.x), s.scale_int(&self.y)]
    }

    pub fn to_scalar<S: AffineScalar>(&self) -> Vec2<S> {
        [
            S::from_rational(Rational::from_integer(self.x.clone())),
            S::from_rational(Rational::from_integer(self.y.clone())),
        ]
    }
}

impl fmt::Display for IVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Add for &IVec2 {
    type Output = IVec2;
    fn add(self, rhs: &IVec2) -> IVec2 {
        IVec2 { x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl Sub for &IVec2 {
    type Output = IVec2;
    fn sub(self, rhs: &IVec2) -> IVec2 {
        IVec2 { x: &self.x - &rhs.x, y: &self.y - &rhs.y }
    }
}

impl Neg for IVec2 {
    type Output = IVec2;
    fn neg(self) -> IVec2 {
        IVec2 { x: -self.x, y: -self.y }
    }
}

impl Neg for &IVec2 {
    type Output = IVec2;
    fn neg(self) -> IVec2 {
        -(self.clone())
    }
}

/// Integer 2x2 matrix, row-major `((a, b), (c, d))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct IMat2 {
    #[serde(with = "crate::json::bigint")]
    pub a: BigInt,
    #[serde(with = "crate::json::bigint")]
    pub b: BigInt,
    #[serde(with = "crate::json::bigint")]
    pub c: BigInt,
    #[serde(with = "crate::json::bigint")]
    pub d: BigInt,
}

impl IMat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        IMat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        IMat2::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// `I + sign * n n^T J` with `J = ((0,-1),(1,0))`; determinant 1 and
    /// fixes `n`.
    pub fn shear(n: &IVec2, sign: i8) -> Self {
        let s = BigInt::from(sign);
        let xy = &n.x * &n.y;
        IMat2 {
            a: BigInt::one() + &s * &xy,
            b: -(&s * &n.x * &n.x),
            c: &s * &n.y * &n.y,
            d: BigInt::one() - &s * &xy,
        }
    }

    pub fn apply(&self, v: &IVec2) -> IVec2 {
        IVec2 {
            x: &self.a * &v.x + &self.b * &v.y,
            y: &self.c * &v.x + &self.d * &v.y,
        }
    }

    pub fn apply_scalar<S: AffineScalar>(&self, v: &Vec2<S>) -> Vec2<S> {
        [
            v[0].scale_int(&self.a) + v[1].scale_int(&self.b),
            v[0].scale_int(&self.c) + v[1].scale_int(&self.d),
        ]
    }
}

impl Mul for &IMat2 {
    type Output = IMat2;
    fn mul(self, r: &IMat2) -> IMat2 {
        IMat2 {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl fmt::Display for IMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.a, self.b, self.c, self.d)
    }
}

pub fn vadd<S: AffineScalar>(u: &Vec2<S>, v: &Vec2<S>) -> Vec2<S> {
    [u[0].clone() + v[0].clone(), u[1].clone() + v[1].clone()]
}

pub fn vsub<S: AffineScalar>(u: &Vec2<S>, v: &Vec2<S>) -> Vec2<S> {
    [u[0].clone() - v[0].clone(), u[1].clone() - v[1].clone()]
}

/// Writes `v = len * w` with `w` a primitive integer vector and `len > 0`.
///
/// Positivity of `len` is decided by `oracle`; for linear forms this is
/// relative to the oracle's interval of `b`.
pub fn affine_length<S, O>(v: &Vec2<S>, oracle: &O) -> Result<(S, IVec2), ScalarError>
where
    S: AffineScalar,
    O: SignOracle<S>,
{
    let (len, dir) = if v[0].is_zero() && v[1].is_zero() {
        return Err(ScalarError::ZeroVector);
    } else if v[0].is_zero() {
        (v[1].clone(), IVec2::new(0, 1))
    } else if v[1].is_zero() {
        (v[0].clone(), IVec2::new(1, 0))
    } else {
        let r = v[1].ratio(&v[0]).ok_or(ScalarError::NotCommensurable)?;
        // v = v0 * (1, r) = (v0 / den) * (den, num)
        let dir = IVec2::new(r.denom().clone(), r.numer().clone());
        let len = v[0].scale(&Rational::new(BigInt::one(), r.denom().clone()));
        (len, dir)
    };
    match oracle.sign_of(&len) {
        Some(Sign::Positive) => Ok((len, dir)),
        Some(Sign::Negative) => Ok((-len, -dir)),
        Some(Sign::Zero) => Err(ScalarError::ZeroVector),
        None => Err(ScalarError::IndeterminateSign(len.to_string())),
    }
}

/// Sign of a rational-coefficient integer vector's orientation relative to
/// another: `+1` when `u` is a positive multiple of `w`.
pub fn same_direction(u: &IVec2, w: &IVec2) -> bool {
    u.cross(w).is_zero() && u.dot(w).is_positive()
}
