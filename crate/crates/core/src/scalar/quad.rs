use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{
    exact_rational_sqrt, parse_rational, squarefree_split, AffineScalar, ExactSign, Rational,
    ScalarError, Sign,
};

/// An element `rat + coef * sqrt(disc)` of a real quadratic field.
///
/// `disc` is square-free. Rational values are stored with `coef = 0` and
/// `disc = 1`, which lets them combine with elements of any field; two
/// irrational values combine only when their discriminants agree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadExt {
    rat: Rational,
    coef: Rational,
    disc: BigInt,
}

impl QuadExt {
    /// `rat + coef * sqrt(radicand)`; the radicand is reduced to its
    /// square-free part.
    pub fn new(rat: Rational, coef: Rational, radicand: BigInt) -> Result<Self, ScalarError> {
        if !radicand.is_positive() {
            return Err(ScalarError::NonPositiveRadicand(radicand));
        }
        let (s, d) = squarefree_split(radicand.magnitude());
        let coef = coef * Rational::from_integer(BigInt::from(s));
        Ok(Self::normalized(rat, coef, BigInt::from(d)))
    }

    fn normalized(rat: Rational, coef: Rational, disc: BigInt) -> Self {
        if coef.is_zero() {
            QuadExt {
                rat,
                coef,
                disc: BigInt::one(),
            }
        } else if disc.is_one() {
            QuadExt {
                rat: rat + coef,
                coef: Rational::zero(),
                disc,
            }
        } else {
            QuadExt { rat, coef, disc }
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadExt {
            rat: r,
            coef: Rational::zero(),
            disc: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `sqrt(r)` for a non-negative rational `r`.
    pub fn sqrt_rational(r: &Rational) -> Result<Self, ScalarError> {
        if r.is_negative() {
            return Err(ScalarError::NotASquare(r.to_string()));
        }
        if r.is_zero() {
            return Ok(Self::from_rational(Rational::zero()));
        }
        // sqrt(n/d) = sqrt(n d) / d
        let radicand = r.numer() * r.denom();
        let coef = Rational::new(BigInt::one(), r.denom().clone());
        QuadExt::new(Rational::zero(), coef, radicand)
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn is_rational(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    fn common_disc(&self, other: &Self) -> Result<BigInt, ScalarError> {
        if self.is_rational() {
            Ok(other.disc.clone())
        } else if other.is_rational() || self.disc == other.disc {
            Ok(self.disc.clone())
        } else {
            Err(ScalarError::MixedField(self.disc.clone(), other.disc.clone()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.common_disc(other)?;
        Ok(Self::normalized(&self.rat + &other.rat, &self.coef + &other.coef, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.common_disc(other)?;
        Ok(Self::normalized(&self.rat - &other.rat, &self.coef - &other.coef, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.common_disc(other)?;
        let dr = Rational::from_integer(d.clone());
        let rat = &self.rat * &other.rat + &self.coef * &other.coef * dr;
        let coef = &self.rat * &other.coef + &self.coef * &other.rat;
        Ok(Self::normalized(rat, coef, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::normalized(
            &self.rat / &n,
            -(&self.coef / &n),
            self.disc.clone(),
        ))
    }

    /// Galois conjugate `rat - coef * sqrt(disc)`.
    pub fn conj(&self) -> Self {
        Self::normalized(self.rat.clone(), -self.coef.clone(), self.disc.clone())
    }

    /// Field norm `rat^2 - coef^2 * disc`.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat
            - &self.coef * &self.coef * Rational::from_integer(self.disc.clone())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::normalized(&self.rat * r, &self.coef * r, self.disc.clone())
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self::normalized(&self.rat + r, self.coef.clone(), self.disc.clone())
    }

    pub fn square(&self) -> Self {
        self.checked_mul(self).expect("same field")
    }

    /// The non-negative square root of `self` inside its own field, or of a
    /// rational `self` in the field it generates. `None` when no such root
    /// exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.sign() == Sign::Negative {
            return None;
        }
        if self.is_rational() {
            return Self::sqrt_rational(&self.rat).ok();
        }
        // (x + y sqrt D)^2 = a + c sqrt D  =>  x^2 + D y^2 = a, 2xy = c,
        // so x^2 is a root of X^2 - aX + c^2 D / 4.
        let n = exact_rational_sqrt(&self.norm())?;
        let two = Rational::from_integer(BigInt::from(2));
        for cand in [(&self.rat + &n) / &two, (&self.rat - &n) / &two] {
            if !cand.is_positive() {
                continue;
            }
            if let Some(x) = exact_rational_sqrt(&cand) {
                let y = &self.coef / (&x * &two);
                let root = Self::normalized(x, y, self.disc.clone());
                if root.square() == *self {
                    return Some(if root.sign() == Sign::Negative { -root } else { root });
                }
            }
        }
        None
    }

    /// Exact three-way comparison; errors on mismatched fields.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering, ScalarError> {
        Ok(match self.checked_sub(other)?.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    /// Nearest-ish `f64`. Computed from a 2^-256-accurate rational
    /// approximation of `sqrt(disc)`; when `rat` and `coef sqrt(disc)` have
    /// opposite signs the conjugate form `norm / (rat - coef sqrt(disc))` is
    /// used so that no cancellation happens in the approximation.
    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return super::rational_to_f64(&self.rat);
        }
        let root = sqrt_approx(&self.disc, 256);
        let same_sign = self.rat.is_zero() || (self.rat.is_positive() == self.coef.is_positive());
        let value = if same_sign {
            &self.rat + &self.coef * root
        } else {
            self.norm() / (&self.rat - &self.coef * root)
        };
        super::rational_to_f64(&value)
    }
}

/// Rational `s` with `|s - sqrt(n)| < 2^-bits`, for `n > 0`.
fn sqrt_approx(n: &BigInt, bits: usize) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = n * &scale * &scale;
    Rational::new(scaled.sqrt(), scale)
}

impl ExactSign for QuadExt {
    fn sign(&self) -> Sign {
        let sa = Sign::of_rational(&self.rat);
        let sc = Sign::of_rational(&self.coef);
        match (sa, sc) {
            (Sign::Zero, s) | (s, Sign::Zero) => s,
            (Sign::Positive, Sign::Positive) => Sign::Positive,
            (Sign::Negative, Sign::Negative) => Sign::Negative,
            // opposite signs: compare rat^2 with coef^2 * disc
            (sa, _) => {
                let n = self.norm();
                match Sign::of_rational(&n) {
                    Sign::Zero => Sign::Zero,
                    Sign::Positive => sa,
                    Sign::Negative => sa.negate(),
                }
            }
        }
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.coef.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                self.$checked(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a> $tr<&'a QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &'a QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            rat: -self.rat,
            coef: -self.coef,
            disc: self.disc,
        }
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl AffineScalar for QuadExt {
    type Square = QuadExt;

    fn from_rational(r: Rational) -> Self {
        QuadExt::from_rational(r)
    }

    fn scale(&self, r: &Rational) -> Self {
        QuadExt::scale(self, r)
    }

    fn ratio(&self, other: &Self) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let q = self.checked_div(other).ok()?;
        q.as_rational().cloned()
    }

    fn mul_wide(&self, other: &Self) -> QuadExt {
        self * other
    }
}

impl fmt::Display for QuadExt {
    /// Canonical text: `"a/b"` for rationals, `"a/b + c/d*sqrt(D)"` (or
    /// `" - c/d*sqrt(D)"`) otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        let (op, mag) = if self.coef.is_negative() {
            ('-', -self.coef.clone())
        } else {
            ('+', self.coef.clone())
        };
        write!(f, "{} {} {}*sqrt({})", self.rat, op, mag, self.disc)
    }
}

impl FromStr for QuadExt {
    type Err = ScalarError;

    /// Accepts sums of rational terms and `c*sqrt(D)` terms, e.g.
    /// `"7/2 + 3/2*sqrt(5)"`, `"3 - 2*sqrt(2)"`, `"sqrt(21)"`, `"-1/4"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ScalarError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        // split into signed terms at top-level '+' / '-' (not inside parens,
        // not a leading sign)
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        let mut depth = 0i32;
        for (i, ch) in compact.chars().enumerate() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 && (i == 0 || !cur.is_empty()) => {
                    if !cur.is_empty() {
                        terms.push((negative, std::mem::take(&mut cur)));
                    }
                    negative = ch == '-';
                }
                _ => cur.push(ch),
            }
        }
        if cur.is_empty() {
            return Err(err("dangling sign"));
        }
        terms.push((negative, cur));

        let mut acc = QuadExt::zero();
        for (neg, term) in terms {
            let value = if let Some(idx) = term.find("sqrt(") {
                if !term.ends_with(')') {
                    return Err(err("unclosed sqrt"));
                }
                let radicand: BigInt = term[idx + 5..term.len() - 1]
                    .parse()
                    .map_err(|_| err("bad radicand"))?;
                let prefix = &term[..idx];
                let coef = match prefix {
                    "" => Rational::one(),
                    p if p.ends_with('*') => parse_rational(&p[..p.len() - 1])?,
                    _ => return Err(err("expected '*' before sqrt")),
                };
                QuadExt::new(Rational::zero(), coef, radicand)?
            } else {
                QuadExt::from_rational(parse_rational(&term)?)
            };
            let value = if neg { -value } else { value };
            acc = acc.checked_add(&value)?;
        }
        Ok(acc)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ToPrimitive for QuadExt {
    fn to_i64(&self) -> Option<i64> {
        self.as_rational().and_then(|r| r.to_integer().to_i64())
    }

    fn to_u64(&self) -> Option<u64> {
        self.as_rational().and_then(|r| r.to_integer().to_u64())
    }

    fn to_f64(&self) -> Option<f64> {
        Some(QuadExt::to_f64(self))
    }
}
