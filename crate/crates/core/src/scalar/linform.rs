use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_rational, AffineScalar, ExactSign, QuadExt, Rational, ScalarError, Sign, SignOracle};

/// `const_term + b_coef * b` for a symbolic blow-up size `b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinFormB {
    pub const_term: Rational,
    pub b_coef: Rational,
}

impl LinFormB {
    pub fn new(const_term: Rational, b_coef: Rational) -> Self {
        LinFormB { const_term, b_coef }
    }

    pub fn constant(c: Rational) -> Self {
        LinFormB::new(c, Rational::zero())
    }

    /// The form `b`.
    pub fn b() -> Self {
        LinFormB::new(Rational::zero(), Rational::one())
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        &self.const_term + &self.b_coef * b
    }

    pub fn eval_quad(&self, b: &QuadExt) -> QuadExt {
        b.scale(&self.b_coef).add_rational(&self.const_term)
    }

    /// The unique root, if the form is not constant.
    pub fn root(&self) -> Option<Rational> {
        if self.b_coef.is_zero() {
            None
        } else {
            Some(-&self.const_term / &self.b_coef)
        }
    }

    pub fn square(&self) -> QuadraticB {
        self.mul_wide(self)
    }
}

impl Zero for LinFormB {
    fn zero() -> Self {
        LinFormB::constant(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.const_term.is_zero() && self.b_coef.is_zero()
    }
}

impl Add for LinFormB {
    type Output = LinFormB;
    fn add(self, rhs: LinFormB) -> LinFormB {
        LinFormB::new(self.const_term + rhs.const_term, self.b_coef + rhs.b_coef)
    }
}

impl Sub for LinFormB {
    type Output = LinFormB;
    fn sub(self, rhs: LinFormB) -> LinFormB {
        LinFormB::new(self.const_term - rhs.const_term, self.b_coef - rhs.b_coef)
    }
}

impl Neg for LinFormB {
    type Output = LinFormB;
    fn neg(self) -> LinFormB {
        LinFormB::new(-self.const_term, -self.b_coef)
    }
}

impl AffineScalar for LinFormB {
    type Square = QuadraticB;

    fn from_rational(r: Rational) -> Self {
        LinFormB::constant(r)
    }

    fn scale(&self, r: &Rational) -> Self {
        LinFormB::new(&self.const_term * r, &self.b_coef * r)
    }

    fn ratio(&self, other: &Self) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        if &self.const_term * &other.b_coef != &self.b_coef * &other.const_term {
            return None;
        }
        Some(if other.const_term.is_zero() {
            &self.b_coef / &other.b_coef
        } else {
            &self.const_term / &other.const_term
        })
    }

    fn mul_wide(&self, other: &Self) -> QuadraticB {
        QuadraticB {
            c0: &self.const_term * &other.const_term,
            c1: &self.const_term * &other.b_coef + &self.b_coef * &other.const_term,
            c2: &self.b_coef * &other.b_coef,
        }
    }
}

impl fmt::Display for LinFormB {
    /// `"c"`, `"k*b"`, or `"c + k*b"` / `"c - k*b"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b_coef.is_zero() {
            return write!(f, "{}", self.const_term);
        }
        if self.const_term.is_zero() {
            return write!(f, "{}*b", self.b_coef);
        }
        if self.b_coef.is_negative() {
            write!(f, "{} - {}*b", self.const_term, -self.b_coef.clone())
        } else {
            write!(f, "{} + {}*b", self.const_term, self.b_coef)
        }
    }
}

impl FromStr for LinFormB {
    type Err = ScalarError;

    /// Accepts sums of rational terms and `k*b` / `b` terms.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ScalarError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut acc = LinFormB::zero();
        let mut cur = String::new();
        let mut negative = false;
        let flush = |cur: &mut String, negative: bool, acc: &mut LinFormB| -> Result<(), ScalarError> {
            if cur.is_empty() {
                return Err(err("dangling sign"));
            }
            let term = if let Some(prefix) = cur.strip_suffix('b') {
                let k = match prefix {
                    "" => Rational::one(),
                    p => parse_rational(p.strip_suffix('*').ok_or_else(|| err("expected '*b'"))?)?,
                };
                LinFormB::new(Rational::zero(), k)
            } else {
                LinFormB::constant(parse_rational(cur)?)
            };
            *acc = acc.clone() + if negative { -term } else { term };
            cur.clear();
            Ok(())
        };
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && !cur.ends_with('/') {
                if i > 0 {
                    flush(&mut cur, negative, &mut acc)?;
                }
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        flush(&mut cur, negative, &mut acc)?;
        Ok(acc)
    }
}

impl Serialize for LinFormB {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LinFormB {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `c0 + c1 * b + c2 * b^2`; products of two lengths, used for areas.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadraticB {
    pub c0: Rational,
    pub c1: Rational,
    pub c2: Rational,
}

impl QuadraticB {
    pub fn new(c0: Rational, c1: Rational, c2: Rational) -> Self {
        QuadraticB { c0, c1, c2 }
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        &self.c0 + &self.c1 * b + &self.c2 * b * b
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadraticB::new(&self.c0 * r, &self.c1 * r, &self.c2 * r)
    }
}

impl Zero for QuadraticB {
    fn zero() -> Self {
        QuadraticB::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero() && self.c2.is_zero()
    }
}

impl Add for QuadraticB {
    type Output = QuadraticB;
    fn add(self, rhs: QuadraticB) -> QuadraticB {
        QuadraticB::new(self.c0 + rhs.c0, self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl Sub for QuadraticB {
    type Output = QuadraticB;
    fn sub(self, rhs: QuadraticB) -> QuadraticB {
        QuadraticB::new(self.c0 - rhs.c0, self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl Mul<&Rational> for QuadraticB {
    type Output = QuadraticB;
    fn mul(self, r: &Rational) -> QuadraticB {
        self.scale(r)
    }
}

impl fmt::Display for QuadraticB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*b + {}*b^2", self.c0, self.c1, self.c2)
    }
}

/// Open interval `(lo, hi)` of admissible `b`, with `lo < hi`.
///
/// As a sign oracle it decides the sign of a linear form that keeps one
/// sign on the whole interval; forms that change sign inside get `None`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BInterval {
    #[serde(with = "crate::json::rational")]
    pub lo: Rational,
    #[serde(with = "crate::json::rational")]
    pub hi: Rational,
}

impl BInterval {
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo < hi).then_some(BInterval { lo, hi })
    }

    /// `(0, 1)`.
    pub fn unit() -> Self {
        BInterval {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn contains(&self, b: &Rational) -> bool {
        &self.lo < b && b < &self.hi
    }

    pub fn contains_quad(&self, b: &QuadExt) -> bool {
        let lo = QuadExt::from_rational(self.lo.clone());
        let hi = QuadExt::from_rational(self.hi.clone());
        (b - &lo).sign() == Sign::Positive && (&hi - b).sign() == Sign::Positive
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn intersect(&self, other: &BInterval) -> Option<BInterval> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        BInterval::new(lo.clone(), hi.clone())
    }

    /// Largest open subinterval of `self` on which every form is positive.
    pub fn positivity_region<'a, I>(&self, forms: I) -> Option<BInterval>
    where
        I: IntoIterator<Item = &'a LinFormB>,
    {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for f in forms {
            match f.root() {
                None => {
                    if !f.const_term.is_positive() {
                        return None;
                    }
                }
                Some(r) => {
                    if f.b_coef.is_positive() {
                        if r > lo {
                            lo = r;
                        }
                    } else if r < hi {
                        hi = r;
                    }
                }
            }
        }
        BInterval::new(lo, hi)
    }
}

impl fmt::Display for BInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl SignOracle<LinFormB> for BInterval {
    fn sign_of(&self, x: &LinFormB) -> Option<Sign> {
        let a = x.eval(&self.lo).sign();
        let c = x.eval(&self.hi).sign();
        match (a, c) {
            (Sign::Zero, Sign::Zero) => Some(Sign::Zero),
            (Sign::Positive | Sign::Zero, Sign::Positive | Sign::Zero) => Some(Sign::Positive),
            (Sign::Negative | Sign::Zero, Sign::Negative | Sign::Zero) => Some(Sign::Negative),
            _ => None,
        }
    }
}
