//! Quasi-perfect classes `(d, m, p, q, t, eps)` and the numerical
//! predicates on them: adjacency, compatibility, accumulation points,
//! volume, obstruction functions and blocking.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{exact_isqrt, ExactSign, QuadExt, Rational, ScalarError, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("continued fraction is empty")]
    EmptyContinuedFraction,
    #[error("continued fraction entries must be positive, got {0}")]
    NonPositiveEntry(BigInt),
    #[error("center {0}/{1} is not in lowest terms")]
    NotCoprime(BigInt, BigInt),
    #[error("center {0}/{1} must satisfy p >= q >= 1")]
    BadCenter(BigInt, BigInt),
    #[error("no quasi-perfect class has center {p}/{q}: p^2-6pq+q^2+8 = {value} is not a perfect square")]
    NotAPerfectSquare { p: BigInt, q: BigInt, value: BigInt },
    #[error("no sign eps gives integral degree coordinates for center {0}/{1}")]
    NoIntegralEpsilon(BigInt, BigInt),
    #[error("both signs eps give integral degree coordinates for center {0}/{1}")]
    AmbiguousEpsilon(BigInt, BigInt),
    #[error("classes have different eps")]
    EpsilonMismatch,
    #[error("blow-up size must lie in [0, 1), got {0}")]
    BOutOfRange(String),
    #[error("B(b)^2 - 4 is not a square in the field of b = {0}")]
    DiscriminantNotSquare(String),
    #[error("d - m b = {0} is not positive")]
    NonPositiveDenominator(String),
    #[error("P - 5Q + T = {0} is odd")]
    Parity(BigInt),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A quasi-perfect class. Every value of this type satisfies the
/// Diophantine identities; construct with [`QuasiPerfect::new`] or
/// [`QuasiPerfect::from_center`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawClass", into = "RawClass")]
pub struct QuasiPerfect {
    d: BigInt,
    m: BigInt,
    p: BigInt,
    q: BigInt,
    t: BigInt,
    eps: i8,
}

#[derive(Serialize, Deserialize)]
struct RawClass {
    #[serde(with = "crate::json::bigint")]
    d: BigInt,
    #[serde(with = "crate::json::bigint")]
    m: BigInt,
    #[serde(with = "crate::json::bigint")]
    p: BigInt,
    #[serde(with = "crate::json::bigint")]
    q: BigInt,
    #[serde(with = "crate::json::bigint")]
    t: BigInt,
    eps: i8,
}

impl TryFrom<RawClass> for QuasiPerfect {
    type Error = ClassError;
    fn try_from(r: RawClass) -> Result<Self, ClassError> {
        QuasiPerfect::new(r.d, r.m, r.p, r.q, r.t, r.eps)
    }
}

impl From<QuasiPerfect> for RawClass {
    fn from(c: QuasiPerfect) -> Self {
        RawClass { d: c.d, m: c.m, p: c.p, q: c.q, t: c.t, eps: c.eps }
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `p^2 - 6pq + q^2 + 8`, the square of `t`.
pub fn t_squared(p: &BigInt, q: &BigInt) -> BigInt {
    p * p - big(6) * p * q + q * q + big(8)
}

impl QuasiPerfect {
    /// Validating constructor.
    pub fn new(
        d: impl Into<BigInt>,
        m: impl Into<BigInt>,
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        t: impl Into<BigInt>,
        eps: i8,
    ) -> Result<Self, ClassError> {
        let c = QuasiPerfect { d: d.into(), m: m.into(), p: p.into(), q: q.into(), t: t.into(), eps };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ClassError> {
        let bad = |what: &str| Err(ClassError::InvariantViolation(format!("{what} for {self}")));
        if self.eps != 1 && self.eps != -1 {
            return bad("eps must be +1 or -1");
        }
        if !self.q.is_positive() || self.p < self.q {
            return Err(ClassError::BadCenter(self.p.clone(), self.q.clone()));
        }
        if !self.p.gcd(&self.q).is_one() {
            return Err(ClassError::NotCoprime(self.p.clone(), self.q.clone()));
        }
        if self.t.is_negative() {
            return bad("t must be non-negative");
        }
        if &self.t * &self.t != t_squared(&self.p, &self.q) {
            return bad("t^2 != p^2 - 6pq + q^2 + 8");
        }
        let s = &self.p + &self.q;
        let et = &self.t * big(self.eps as i64);
        if big(8) * &self.d != big(3) * &s + &et || big(8) * &self.m != &s + big(3) * &et {
            return bad("degree coordinates do not match (p, q, t, eps)");
        }
        if big(3) * &self.d - &self.m != s {
            return bad("3d - m != p + q");
        }
        if &self.d * &self.d - &self.m * &self.m != &self.p * &self.q - 1 {
            return bad("d^2 - m^2 != pq - 1");
        }
        if (big(3) * &self.m > self.d) != (self.eps == 1) {
            return bad("eps = +1 must hold exactly when 3m > d");
        }
        Ok(())
    }

    /// The unique quasi-perfect class with center `p/q`.
    pub fn from_center(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, ClassError> {
        let (p, q) = (p.into(), q.into());
        if !q.is_positive() || p < q {
            return Err(ClassError::BadCenter(p, q));
        }
        if !p.gcd(&q).is_one() {
            return Err(ClassError::NotCoprime(p, q));
        }
        let t2 = t_squared(&p, &q);
        let t = exact_isqrt(&t2).ok_or_else(|| ClassError::NotAPerfectSquare {
            p: p.clone(),
            q: q.clone(),
            value: t2.clone(),
        })?;
        let s = &p + &q;
        let mut found = Vec::new();
        for eps in [1i8, -1] {
            let et = &t * big(eps as i64);
            let (d, rd) = (big(3) * &s + &et).div_rem(&big(8));
            let (m, rm) = (&s + big(3) * &et).div_rem(&big(8));
            if rd.is_zero() && rm.is_zero() {
                found.push((d, m, eps));
            }
        }
        // with t = 0 both signs give the same (d, m); the class has eps = -1
        if t.is_zero() {
            found.retain(|f| f.2 == -1);
        }
        match found.len() {
            0 => Err(ClassError::NoIntegralEpsilon(p, q)),
            1 => {
                let (d, m, eps) = found.pop().expect("one candidate");
                QuasiPerfect::new(d, m, p, q, t, eps)
            }
            _ => Err(ClassError::AmbiguousEpsilon(p, q)),
        }
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn m(&self) -> &BigInt {
        &self.m
    }
    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn t(&self) -> &BigInt {
        &self.t
    }
    pub fn eps(&self) -> i8 {
        self.eps
    }

    /// `m - q`.
    pub fn m_prime(&self) -> BigInt {
        &self.m - &self.q
    }

    /// `d - 3q`.
    pub fn d_prime(&self) -> BigInt {
        &self.d - big(3) * &self.q
    }

    pub fn center(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    /// `m / d`, the blow-up size the class is centered on.
    pub fn md_ratio(&self) -> Rational {
        Rational::new(self.m.clone(), self.d.clone())
    }

    pub fn weight_expansion(&self) -> WeightExpansion {
        weight_expansion(&self.p, &self.q).expect("center is coprime")
    }

    /// The integer tuple `(d, m, p, q)`.
    pub fn dmpq(&self) -> [BigInt; 4] {
        [self.d.clone(), self.m.clone(), self.p.clone(), self.q.clone()]
    }

    pub fn cmp_center(&self, other: &QuasiPerfect) -> Ordering {
        (&self.p * &other.q).cmp(&(&other.p * &self.q))
    }
}

impl fmt::Display for QuasiPerfect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.d, self.m, self.p, self.q, self.t)
    }
}

/// Lowest-terms `(p, q)` of `a0 + 1/(a1 + 1/(...))`.
pub fn cf_to_fraction<T: Clone + Into<BigInt>>(cf: &[T]) -> Result<(BigInt, BigInt), ClassError> {
    if cf.is_empty() {
        return Err(ClassError::EmptyContinuedFraction);
    }
    let mut p = BigInt::one();
    let mut q = BigInt::zero();
    for a in cf.iter().rev() {
        let a: BigInt = a.clone().into();
        if !a.is_positive() {
            return Err(ClassError::NonPositiveEntry(a));
        }
        let np = &a * &p + &q;
        q = p;
        p = np;
    }
    Ok((p, q))
}

/// Parses a center given as `"[a0;a1,...]"` (commas or semicolons), `"p/q"`
/// or an integer `"p"`.
pub fn parse_center(s: &str) -> Result<(BigInt, BigInt), ClassError> {
    let s = s.trim();
    let bad = |reason: &str| {
        ClassError::Scalar(ScalarError::Parse { input: s.to_string(), reason: reason.to_string() })
    };
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let entries = inner
            .split([';', ','])
            .map(|a| a.trim().parse::<BigInt>().map_err(|_| bad("continued fraction entries must be integers")))
            .collect::<Result<Vec<_>, _>>()?;
        return cf_to_fraction(&entries);
    }
    let r = crate::scalar::parse_rational(s)?;
    if !r.is_positive() {
        return Err(bad("center must be positive"));
    }
    Ok((r.numer().clone(), r.denom().clone()))
}

/// Continued fraction of `p/q` for `p, q >= 1`; the last entry is at least 2
/// unless the fraction is 1.
pub fn fraction_to_cf(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut out = Vec::new();
    while !b.is_zero() {
        let (k, r) = a.div_rem(&b);
        out.push(k);
        a = b;
        b = r;
    }
    out
}

/// Multiplicities of the Euclidean weight expansion of `p/q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightExpansion {
    /// `(weight, multiplicity)` blocks in order.
    blocks: Vec<(BigInt, BigInt)>,
}

impl WeightExpansion {
    pub fn blocks(&self) -> &[(BigInt, BigInt)] {
        &self.blocks
    }

    /// The full list; only sensible when the multiplicities are small.
    pub fn weights(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for (w, k) in &self.blocks {
            let mut i = BigInt::zero();
            while &i < k {
                out.push(w.clone());
                i += 1;
            }
        }
        out
    }

    pub fn sum(&self) -> BigInt {
        self.blocks.iter().map(|(w, k)| w * k).sum()
    }

    pub fn sum_of_squares(&self) -> BigInt {
        self.blocks.iter().map(|(w, k)| w * w * k).sum()
    }
}

/// `q` repeated `floor(p/q)` times, then the expansion of `q / (p mod q)`.
pub fn weight_expansion(p: &BigInt, q: &BigInt) -> Result<WeightExpansion, ClassError> {
    if !q.is_positive() || p < q {
        return Err(ClassError::BadCenter(p.clone(), q.clone()));
    }
    if !p.gcd(q).is_one() {
        return Err(ClassError::NotCoprime(p.clone(), q.clone()));
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut blocks = Vec::new();
    while !b.is_zero() {
        let (k, r) = a.div_rem(&b);
        blocks.push((b.clone(), k));
        a = b;
        b = r;
    }
    Ok(WeightExpansion { blocks })
}

fn check_eps(e: &QuasiPerfect, f: &QuasiPerfect) -> Result<(), ClassError> {
    if e.eps != f.eps {
        Err(ClassError::EpsilonMismatch)
    } else {
        Ok(())
    }
}

/// `(p+q)(p'+q') - t t' = 8 p q'` after ordering so that `p/q < p'/q'`.
pub fn adjacent(e: &QuasiPerfect, f: &QuasiPerfect) -> Result<bool, ClassError> {
    check_eps(e, f)?;
    let (lo, hi) = if e.cmp_center(f) == Ordering::Greater { (f, e) } else { (e, f) };
    let lhs = (&lo.p + &lo.q) * (&hi.p + &hi.q) - &lo.t * &hi.t;
    Ok(lhs == big(8) * &lo.p * &hi.q)
}

/// `t t' - 4 t'' = p p' - 3(p q' + q p') + q q'`.
///
/// When the classes are also adjacent this must agree with
/// `|p' q - p q'| = t''`; a disagreement is reported as an invariant
/// violation.
pub fn t_compatible(e: &QuasiPerfect, f: &QuasiPerfect, t2: &BigInt) -> Result<bool, ClassError> {
    check_eps(e, f)?;
    let lhs = &e.t * &f.t - big(4) * t2;
    let rhs = &e.p * &f.p - big(3) * (&e.p * &f.q + &e.q * &f.p) + &e.q * &f.q;
    let compatible = lhs == rhs;
    if adjacent(e, f)? {
        let cross = (&f.p * &e.q - &e.p * &f.q).abs();
        if (cross == *t2) != compatible {
            return Err(ClassError::InvariantViolation(format!(
                "adjacent classes {e} and {f}: |p'q - pq'| = {cross} disagrees with compatibility for t'' = {t2}"
            )));
        }
    }
    Ok(compatible)
}

/// Accumulation point data: `z` is the larger root of `z^2 - B z + 1`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct AccPoint {
    pub b: QuadExt,
    pub z: QuadExt,
    pub coef_b: QuadExt,
}

/// `B(b) = (3-b)^2 / (1-b^2) - 2`.
pub fn coef_b(b: &QuadExt) -> Result<QuadExt, ClassError> {
    let one = QuadExt::one();
    let three = QuadExt::from_int(3);
    let num = (&three - b).square();
    let den = one.checked_sub(&b.square())?;
    Ok(num.checked_div(&den)?.add_rational(&Rational::from_integer(big(-2))))
}

fn check_b_range(b: &QuadExt) -> Result<(), ClassError> {
    if b.sign() == Sign::Negative || (b - &QuadExt::one()).sign() != Sign::Negative {
        return Err(ClassError::BOutOfRange(b.to_string()));
    }
    Ok(())
}

/// `acc(b)`: the larger root of `z^2 - B(b) z + 1 = 0`.
pub fn acc_of_b(b: &QuadExt) -> Result<AccPoint, ClassError> {
    check_b_range(b)?;
    let cb = coef_b(b)?;
    let disc = cb.square().add_rational(&Rational::from_integer(big(-4)));
    let root = disc.sqrt().ok_or_else(|| ClassError::DiscriminantNotSquare(b.to_string()))?;
    let half = Rational::new(BigInt::one(), big(2));
    let z = cb
        .checked_add(&root)
        .map_err(|_| ClassError::DiscriminantNotSquare(b.to_string()))?
        .scale(&half);
    let acc = AccPoint { b: b.clone(), z, coef_b: cb };
    debug_assert!(acc.is_valid());
    Ok(acc)
}

pub fn acc_of_rational(b: &Rational) -> Result<AccPoint, ClassError> {
    acc_of_b(&QuadExt::from_rational(b.clone()))
}

impl AccPoint {
    /// `z^2 - B z + 1 = 0` and `z >= 1`.
    pub fn is_valid(&self) -> bool {
        let lhs = self.z.square() - &self.coef_b * &self.z + QuadExt::one();
        lhs.is_zero() && (&self.z - &QuadExt::one()).sign() != Sign::Negative
    }

    pub fn volume(&self) -> QuadExt {
        volume_at_acc(&self.b, &self.z)
    }
}

/// `(1 + z) / (3 - b)`, the volume constraint at an accumulation point.
pub fn volume_at_acc(b: &QuadExt, z: &QuadExt) -> QuadExt {
    (z + &QuadExt::one()) / (&QuadExt::from_int(3) - b)
}

/// `sqrt(z / (1 - b^2))`; exact when `z / (1 - b^2)` is rational.
pub fn volume_curve(b: &Rational, z: &Rational) -> Result<QuadExt, ClassError> {
    let den = Rational::one() - b * b;
    if !den.is_positive() {
        return Err(ClassError::BOutOfRange(b.to_string()));
    }
    Ok(QuadExt::sqrt_rational(&(z / den))?)
}

/// Obstruction `qz/(d - mb)` left of the center and `p/(d - mb)` right of it.
///
/// The two-branch formula is applied for every `z`; it describes the
/// obstruction only near the center `p/q`.
pub fn obstruction_mu(e: &QuasiPerfect, b: &QuadExt, z: &QuadExt) -> Result<QuadExt, ClassError> {
    let den = QuadExt::from_rational(Rational::from_integer(e.d.clone()))
        .checked_sub(&b.scale(&Rational::from_integer(e.m.clone())))?;
    if den.sign() != Sign::Positive {
        return Err(ClassError::NonPositiveDenominator(den.to_string()));
    }
    let zq_minus_p = z.scale(&Rational::from_integer(e.q.clone())).add_rational(&Rational::from_integer(-e.p.clone()));
    let num = if zq_minus_p.sign() == Sign::Negative {
        z.scale(&Rational::from_integer(e.q.clone()))
    } else {
        QuadExt::from_rational(Rational::from_integer(e.p.clone()))
    };
    Ok(num.checked_div(&den)?)
}

/// Whether `mu_{E,b}(acc(b)) > V_b(acc(b))`.
pub fn is_blocked(e: &QuasiPerfect, b: &QuadExt) -> Result<bool, ClassError> {
    let acc = acc_of_b(b)?;
    let mu = obstruction_mu(e, b, &acc.z)?;
    Ok(mu.cmp_exact(&acc.volume())? == Ordering::Greater)
}

/// Center beyond `3 + 2 sqrt 2`: `p^2 - 6pq + q^2 > 0` and `p > 3q`.
pub fn is_blocking_candidate(e: &QuasiPerfect) -> bool {
    (&e.p * &e.p - big(6) * &e.p * &e.q + &e.q * &e.q).is_positive() && e.p > big(3) * &e.q
}

/// `(D,M,P,Q,T) -> (M-Q, D-3Q, (P-5Q+T)/2, (-P+5Q+T)/2, P-7Q)`, re-validated.
pub fn symmetry_b(e: &QuasiPerfect) -> Result<QuasiPerfect, ClassError> {
    let s = &e.p - big(5) * &e.q + &e.t;
    if s.is_odd() {
        return Err(ClassError::Parity(s));
    }
    let d = e.m_prime();
    let m = e.d_prime();
    let p = &s / big(2);
    let q = (-&e.p + big(5) * &e.q + &e.t) / big(2);
    let t = &e.p - big(7) * &e.q;
    if t.is_negative() {
        return Err(ClassError::InvariantViolation(format!("image of {e} has t = {t} < 0")));
    }
    let diff = big(3) * &m - &d;
    let eps = if diff.is_positive() { 1 } else { -1 };
    QuasiPerfect::new(d, m, p, q, t, eps)
}

/// Compares `acc(b1)` with `acc(b2)` for rationals in `(1/3, 1)`.
///
/// On that range `B(b)` is strictly increasing and `acc` is increasing in
/// `B`, so comparing `B(b1)` with `B(b2)` decides the order.
pub fn compare_acc_above_third(b1: &Rational, b2: &Rational) -> Result<Ordering, ClassError> {
    let third = Rational::new(BigInt::one(), big(3));
    for b in [b1, b2] {
        if b <= &third || b >= &Rational::one() {
            return Err(ClassError::BOutOfRange(b.to_string()));
        }
    }
    let f = |b: &Rational| {
        let three = Rational::from_integer(big(3));
        (&three - b) * (&three - b) / (Rational::one() - b * b)
    };
    Ok(f(b1).cmp(&f(b2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn qe(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    fn class(p: i64, q: i64) -> QuasiPerfect {
        QuasiPerfect::from_center(p, q).unwrap()
    }

    #[test]
    fn center_strings() {
        assert_eq!(parse_center("[7;4]").unwrap(), (big(29), big(4)));
        assert_eq!(parse_center("[7, 4]").unwrap(), (big(29), big(4)));
        assert_eq!(parse_center("[8]").unwrap(), (big(8), big(1)));
        assert_eq!(parse_center("29/4").unwrap(), (big(29), big(4)));
        assert_eq!(parse_center("58/8").unwrap(), (big(29), big(4)));
        assert_eq!(parse_center(" 6 ").unwrap(), (big(6), big(1)));
        for bad in ["[]", "[7;x]", "[0]", "-3/2", "0", "abc", "[7;4"] {
            assert!(parse_center(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(cf_to_fraction(&[6]).unwrap(), (big(6), big(1)));
        assert_eq!(cf_to_fraction(&[7, 4]).unwrap(), (big(29), big(4)));
        assert_eq!(cf_to_fraction(&[1]).unwrap(), (big(1), big(1)));
        assert_eq!(cf_to_fraction(&[7, 3, 6]).unwrap(), (big(139), big(19)));
        assert_eq!(cf_to_fraction::<i64>(&[]), Err(ClassError::EmptyContinuedFraction));
        assert!(cf_to_fraction(&[3, 0]).is_err());
        assert_eq!(fraction_to_cf(&big(139), &big(19)), vec![big(7), big(3), big(6)]);
    }

    #[test]
    fn mutated_center_matches_cf() {
        // 5 * (14,9,29,4) - (3,2,6,1)
        let mid = class(29, 4);
        let left = class(6, 1);
        let p = big(5) * mid.p() - left.p();
        let q = big(5) * mid.q() - left.q();
        assert_eq!(cf_to_fraction(&[7, 3, 6]).unwrap(), (p, q));
    }

    #[test]
    fn weight_expansions() {
        let w = weight_expansion(&big(6), &big(1)).unwrap();
        assert_eq!(w.weights(), vec![big(1); 6]);
        let w = weight_expansion(&big(29), &big(4)).unwrap();
        let mut expect = vec![big(4); 7];
        expect.extend(vec![big(1); 4]);
        assert_eq!(w.weights(), expect);
        assert_eq!((w.sum(), w.sum_of_squares()), (big(32), big(116)));
        assert_eq!(weight_expansion(&big(1), &big(1)).unwrap().weights(), vec![big(1)]);
        assert!(weight_expansion(&big(6), &big(4)).is_err());
    }

    #[test]
    fn classes_from_centers() {
        assert_eq!(class(6, 1), QuasiPerfect::new(3, 2, 6, 1, 3, 1).unwrap());
        assert_eq!(class(8, 1), QuasiPerfect::new(4, 3, 8, 1, 5, 1).unwrap());
        assert_eq!(class(29, 4), QuasiPerfect::new(14, 9, 29, 4, 13, 1).unwrap());
        assert_eq!(class(1, 1), QuasiPerfect::new(1, 1, 1, 1, 2, 1).unwrap());
        assert_eq!(class(5, 1), QuasiPerfect::new(2, 0, 5, 1, 2, -1).unwrap());
        for n in 1..=10i64 {
            assert_eq!(class(2 * n + 8, 1), QuasiPerfect::new(n + 4, n + 3, 2 * n + 8, 1, 2 * n + 5, 1).unwrap());
        }
        assert!(matches!(QuasiPerfect::from_center(7, 2), Err(ClassError::NotAPerfectSquare { .. })));
        assert!(matches!(QuasiPerfect::from_center(6, 2), Err(ClassError::NotCoprime(..))));
        assert!(QuasiPerfect::new(4, 3, 8, 1, 5, -1).is_err());
    }

    #[test]
    fn adjacency_and_compatibility() {
        let (e6, e8, e74) = (class(6, 1), class(8, 1), class(29, 4));
        assert!(adjacent(&e6, &e8).unwrap());
        assert!(adjacent(&e8, &e6).unwrap());
        assert!(adjacent(&e6, &e74).unwrap());
        assert!(!adjacent(&e6, &e6).unwrap());
        assert!(t_compatible(&e6, &e74, &big(5)).unwrap());
        assert!(t_compatible(&e74, &e8, &big(3)).unwrap());
        assert!(!t_compatible(&e6, &e74, &big(4)).unwrap());
        let odd = class(5, 1);
        assert_eq!(adjacent(&e6, &odd), Err(ClassError::EpsilonMismatch));
    }

    #[test]
    fn accumulation_points() {
        let a = acc_of_rational(&rat(1, 5)).unwrap();
        assert_eq!(a.z, QuadExt::from_int(6));
        assert_eq!(a.volume(), QuadExt::from_rational(rat(5, 2)));
        let a = acc_of_rational(&rat(1, 3)).unwrap();
        assert_eq!(a.z, qe("3 + 2*sqrt(2)"));
        assert_eq!(a.volume(), qe("3/2 + 3/4*sqrt(2)"));
        let a = acc_of_rational(&rat(0, 1)).unwrap();
        assert_eq!(a.z, qe("7/2 + 3/2*sqrt(5)"));
        assert_eq!(a.volume(), qe("3/2 + 1/2*sqrt(5)"));
        // tau^4 and tau^2 for the golden ratio
        let tau = qe("1/2 + 1/2*sqrt(5)");
        assert_eq!(a.z, tau.square().square());
        assert_eq!(a.volume(), tau.square());
        assert!(acc_of_rational(&rat(1, 1)).is_err());
        assert!(acc_of_rational(&rat(-1, 4)).is_err());
    }

    #[test]
    fn obstruction_and_blocking() {
        let e8 = class(8, 1);
        assert_eq!(
            obstruction_mu(&e8, &QuadExt::zero(), &QuadExt::from_int(8)).unwrap(),
            QuadExt::from_int(2)
        );
        assert_eq!(
            obstruction_mu(&class(6, 1), &QuadExt::zero(), &QuadExt::from_int(6)).unwrap(),
            QuadExt::from_int(2)
        );
        let b = QuadExt::from_rational(rat(2, 3));
        let z = acc_of_b(&b).unwrap().z;
        assert_eq!(obstruction_mu(&e8, &b, &z).unwrap(), z.scale(&rat(1, 2)));
        assert!(is_blocked(&e8, &b).unwrap());
        assert!(!is_blocked(&e8, &QuadExt::from_rational(rat(1, 2))).unwrap());
        assert!(!is_blocked(&e8, &QuadExt::zero()).unwrap());
        assert!(obstruction_mu(&e8, &QuadExt::from_int(2), &z).is_err());
    }

    #[test]
    fn blocking_candidates() {
        assert!(is_blocking_candidate(&class(6, 1)));
        assert!(!is_blocking_candidate(&class(5, 1)));
        assert!(is_blocking_candidate(&class(29, 4)));
    }

    #[test]
    fn symmetry() {
        let img = symmetry_b(&class(8, 1)).unwrap();
        assert_eq!(img, QuasiPerfect::new(2, 1, 4, 1, 1, 1).unwrap());
        assert_eq!(img.d(), &class(8, 1).m_prime());
        assert_eq!(img.m(), &class(8, 1).d_prime());
        assert!(matches!(symmetry_b(&class(6, 1)), Err(ClassError::InvariantViolation(_))));
        assert_eq!(symmetry_b(&class(29, 4)).unwrap(), QuasiPerfect::new(5, 2, 11, 2, 1, 1).unwrap());
    }

    #[test]
    fn acc_comparator() {
        assert_eq!(compare_acc_above_third(&rat(2, 3), &rat(9, 14)), Ok(Ordering::Greater));
        assert!(compare_acc_above_third(&rat(1, 3), &rat(1, 2)).is_err());
        // agrees with the exact accumulation points
        let (a, b) = (rat(3, 4), rat(5, 7));
        let za = acc_of_rational(&a).unwrap().z;
        let zb = acc_of_rational(&b).unwrap().z;
        if let Ok(o) = za.cmp_exact(&zb) {
            assert_eq!(compare_acc_above_third(&a, &b).unwrap(), o);
        }
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&class(8, 1)).unwrap();
        assert_eq!(s, r#"{"d":4,"m":3,"p":8,"q":1,"t":5,"eps":1}"#);
        assert_eq!(serde_json::from_str::<QuasiPerfect>(&s).unwrap(), class(8, 1));
        assert!(serde_json::from_str::<QuasiPerfect>(r#"{"d":4,"m":3,"p":8,"q":1,"t":5,"eps":-1}"#).is_err());
    }

    proptest! {
        #[test]
        fn classes_satisfy_weight_identities(p in 1i64..4000, q in 1i64..400) {
            if let Ok(e) = QuasiPerfect::from_center(p, q) {
                let w = e.weight_expansion();
                prop_assert_eq!(w.sum(), big(3) * e.d() - e.m() - 1);
                prop_assert_eq!(w.sum_of_squares(), e.d() * e.d() - e.m() * e.m() + 1);
            }
        }

        #[test]
        fn weight_expansion_invariants(p in 1i64..5000, q in 1i64..500) {
            prop_assume!(p >= q && big(p).gcd(&big(q)).is_one());
            let w = weight_expansion(&big(p), &big(q)).unwrap();
            prop_assert_eq!(w.sum(), big(p + q - 1));
            prop_assert_eq!(w.sum_of_squares(), big(p * q));
        }

        #[test]
        fn rational_acc_points_are_roots(n in 0i64..97, d in 2i64..98) {
            prop_assume!(n < d);
            if let Ok(a) = acc_of_rational(&rat(n, d)) {
                prop_assert!(a.is_valid());
                // the volume curve meets the accumulation point
                let v = a.volume();
                let lhs = v.square() * QuadExt::from_rational(Rational::one() - rat(n, d) * rat(n, d));
                prop_assert_eq!(lhs, a.z.clone());
            }
        }
    }
}
