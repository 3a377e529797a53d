//! Generating triples, their x/y mutations, the mutation tree, and the
//! staircase limits that bound blocked intervals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{
    acc_of_b, adjacent, cf_to_fraction, compare_acc_above_third, ClassError, QuasiPerfect,
};
use crate::scalar::{squarefree_split_product, ExactSign, QuadExt, Rational, ScalarError, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("malformed mutation word {0:?}: only 'x' and 'y' are allowed")]
    BadWord(String),
    #[error("the base triple has no predecessor")]
    NoPredecessor,
    #[error("there is no seed quasi-triple below level 0")]
    NoLowerSeed,
    #[error("triple {word:?} at level {n} fails verification: {failures}")]
    Verification { n: u32, word: String, failures: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Mutation letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Letter {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A word over `{x, y}`, stored in application order: the first letter is
/// the first mutation applied to the base triple.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct MutationWord(String);

impl MutationWord {
    pub fn empty() -> Self {
        MutationWord(String::new())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.chars().map(|c| if c == 'x' { Letter::X } else { Letter::Y })
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters().last()
    }

    pub fn push(&self, l: Letter) -> Self {
        let mut s = self.0.clone();
        s.push(l.as_char());
        MutationWord(s)
    }

    pub fn pop(&self) -> Option<(MutationWord, Letter)> {
        let l = self.last()?;
        Some((MutationWord(self.0[..self.0.len() - 1].to_string()), l))
    }
}

impl FromStr for MutationWord {
    type Err = TripleError;
    fn from_str(s: &str) -> Result<Self, TripleError> {
        if s.chars().all(|c| c == 'x' || c == 'y') {
            Ok(MutationWord(s.to_string()))
        } else {
            Err(TripleError::BadWord(s.to_string()))
        }
    }
}

impl fmt::Display for MutationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for MutationWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for MutationWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered triple `(left, mid, right)` of classes reached from the base
/// triple of level `n` by `word`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GeneratingTriple {
    pub n: u32,
    pub word: MutationWord,
    pub left: QuasiPerfect,
    pub mid: QuasiPerfect,
    pub right: QuasiPerfect,
}

/// A seed quasi-triple `((1,1,1,1,2), E[2n+6], E[2n+8])`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QuasiTriple {
    pub n: u32,
    pub left: QuasiPerfect,
    pub mid: QuasiPerfect,
    pub right: QuasiPerfect,
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// `k * e - f` on `(d, m, p, q)`; the result must be a quasi-perfect class
/// whose `t` equals `expected_t`.
fn combine(k: &BigInt, e: &QuasiPerfect, f: &QuasiPerfect, expected_t: &BigInt) -> Result<QuasiPerfect, TripleError> {
    let p = k * e.p() - f.p();
    let q = k * e.q() - f.q();
    let c = QuasiPerfect::from_center(p, q)?;
    let d = k * e.d() - f.d();
    let m = k * e.m() - f.m();
    if c.d() != &d || c.m() != &m {
        return Err(TripleError::InvariantViolation(format!(
            "{k}*{e} - {f} has degree coordinates ({d},{m}) but its center gives {c}"
        )));
    }
    if c.t() != expected_t {
        return Err(TripleError::InvariantViolation(format!(
            "{k}*{e} - {f}: t from center is {} but the mutation rule gives {expected_t}",
            c.t()
        )));
    }
    Ok(c)
}

/// New classes after mutating `(l, m, r)` by `letter`.
fn mutate_classes(
    l: &QuasiPerfect,
    m: &QuasiPerfect,
    r: &QuasiPerfect,
    letter: Letter,
) -> Result<(QuasiPerfect, QuasiPerfect, QuasiPerfect), TripleError> {
    match letter {
        Letter::X => {
            let t = l.t() * m.t() - r.t();
            let xm = combine(l.t(), m, r, &t)?;
            Ok((l.clone(), xm, m.clone()))
        }
        Letter::Y => {
            let t = r.t() * m.t() - l.t();
            let ym = combine(r.t(), m, l, &t)?;
            Ok((m.clone(), ym, r.clone()))
        }
    }
}

fn class_of_cf(cf: &[BigInt]) -> Result<QuasiPerfect, TripleError> {
    let (p, q) = cf_to_fraction(cf)?;
    Ok(QuasiPerfect::from_center(p, q)?)
}

/// `E[2n+6]`.
pub fn left_base_class(n: u32) -> QuasiPerfect {
    class_of_cf(&[big(2 * n as i64 + 6)]).expect("E[2n+6] exists")
}

/// `E[2n+8]`.
pub fn right_base_class(n: u32) -> QuasiPerfect {
    class_of_cf(&[big(2 * n as i64 + 8)]).expect("E[2n+8] exists")
}

/// The base triple `(E[2n+6], E[2n+7, 2n+4], E[2n+8])`.
pub fn base_triple(n: u32) -> Result<GeneratingTriple, TripleError> {
    let k = big(n as i64);
    let mid = class_of_cf(&[&k * 2 + 7, &k * 2 + 4])?;
    let t = GeneratingTriple {
        n,
        word: MutationWord::empty(),
        left: left_base_class(n),
        mid,
        right: right_base_class(n),
    };
    t.check()?;
    Ok(t)
}

/// The triple reached from `base_triple(n)` by `word`.
pub fn triple_at(n: u32, word: &MutationWord) -> Result<GeneratingTriple, TripleError> {
    let mut t = base_triple(n)?;
    for l in word.letters() {
        t = t.mutate(l)?;
    }
    Ok(t)
}

/// The seed quasi-triple of level `n`.
pub fn seed_quasi_triple(n: u32) -> QuasiTriple {
    QuasiTriple {
        n,
        left: QuasiPerfect::new(1, 1, 1, 1, 2, 1).expect("seed class"),
        mid: left_base_class(n),
        right: right_base_class(n),
    }
}

impl QuasiTriple {
    /// The `y` mutation gives the base triple of the same level.
    pub fn mutate_y(&self) -> Result<GeneratingTriple, TripleError> {
        let (left, mid, right) = mutate_classes(&self.left, &self.mid, &self.right, Letter::Y)?;
        let t = GeneratingTriple { n: self.n, word: MutationWord::empty(), left, mid, right };
        t.check()?;
        Ok(t)
    }

    /// The `x` mutation gives the seed quasi-triple one level down.
    pub fn mutate_x(&self) -> Result<QuasiTriple, TripleError> {
        if self.n == 0 {
            return Err(TripleError::NoLowerSeed);
        }
        let (left, mid, right) = mutate_classes(&self.left, &self.mid, &self.right, Letter::X)?;
        Ok(QuasiTriple { n: self.n - 1, left, mid, right })
    }

    /// Conditions (a)-(d); (e) and `t >= 3` do not apply to quasi-triples.
    pub fn verify(&self) -> TripleReport {
        TripleReport::evaluate(&self.left, &self.mid, &self.right, false)
    }
}

/// Per-condition outcome of checking the generating-triple axioms.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TripleReport {
    /// Centers strictly increasing.
    pub ordered: bool,
    /// All `t >= 3`; `None` when exempt.
    pub t_at_least_3: Option<bool>,
    pub same_eps: bool,
    /// (a) left and right adjacent.
    pub a: bool,
    /// (b) left and mid adjacent and `t_right = q_l p_m - p_l q_m`.
    pub b: bool,
    /// (c) right and mid adjacent and `t_left = q_m p_r - p_m q_r`.
    pub c: bool,
    /// (d) `t_l t_r - t_m = q_l p_r - p_l q_r`.
    pub d: bool,
    /// (e) `acc(m_r/d_r), acc(m_l/d_l) > acc(m_m/d_m)`; `None` when exempt.
    pub e: Option<bool>,
}

impl TripleReport {
    fn evaluate(l: &QuasiPerfect, m: &QuasiPerfect, r: &QuasiPerfect, full: bool) -> Self {
        let ordered = l.cmp_center(m) == Ordering::Less && m.cmp_center(r) == Ordering::Less;
        let same_eps = l.eps() == m.eps() && m.eps() == r.eps();
        let adj = |a: &QuasiPerfect, b: &QuasiPerfect| adjacent(a, b).unwrap_or(false);
        let a = adj(l, r);
        let b = adj(l, m) && r.t() == &(l.q() * m.p() - l.p() * m.q());
        let c = adj(r, m) && l.t() == &(m.q() * r.p() - m.p() * r.q());
        let d = l.t() * r.t() - m.t() == l.q() * r.p() - l.p() * r.q();
        let (t_at_least_3, e) = if full {
            let t3 = [l, m, r].iter().all(|c| c.t() >= &big(3));
            let (br, bl, bm) = (r.md_ratio(), l.md_ratio(), m.md_ratio());
            let e = matches!(compare_acc_above_third(&br, &bm), Ok(Ordering::Greater))
                && matches!(compare_acc_above_third(&bl, &bm), Ok(Ordering::Greater));
            (Some(t3), Some(e))
        } else {
            (None, None)
        };
        TripleReport { ordered, t_at_least_3, same_eps, a, b, c, d, e }
    }

    pub fn all_pass(&self) -> bool {
        self.ordered
            && self.same_eps
            && self.a
            && self.b
            && self.c
            && self.d
            && self.t_at_least_3.unwrap_or(true)
            && self.e.unwrap_or(true)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let checks = [
            (self.ordered, "ordering"),
            (self.t_at_least_3.unwrap_or(true), "t>=3"),
            (self.same_eps, "eps"),
            (self.a, "(a)"),
            (self.b, "(b)"),
            (self.c, "(c)"),
            (self.d, "(d)"),
            (self.e.unwrap_or(true), "(e)"),
        ];
        for (ok, name) in checks {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// Checks conditions (a)-(e) on an arbitrary triple of classes.
pub fn verify_classes(l: &QuasiPerfect, m: &QuasiPerfect, r: &QuasiPerfect) -> TripleReport {
    TripleReport::evaluate(l, m, r, true)
}

/// Outcome of the identity suite on one triple. Items with several parts
/// pass only when every part holds.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
    pub iv: bool,
    pub v: bool,
    pub vi: bool,
    pub vii: bool,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.i && self.ii && self.iii && self.iv && self.v && self.vi && self.vii
    }
}

impl GeneratingTriple {
    pub fn verify(&self) -> TripleReport {
        verify_classes(&self.left, &self.mid, &self.right)
    }

    fn check(&self) -> Result<(), TripleError> {
        let r = self.verify();
        if r.all_pass() {
            Ok(())
        } else {
            Err(TripleError::Verification {
                n: self.n,
                word: self.word.to_string(),
                failures: r.failures().join(", "),
            })
        }
    }

    /// `(left, t_left * mid - right, mid)`.
    pub fn mutate_x(&self) -> Result<GeneratingTriple, TripleError> {
        self.mutate(Letter::X)
    }

    /// `(mid, t_right * mid - left, right)`.
    pub fn mutate_y(&self) -> Result<GeneratingTriple, TripleError> {
        self.mutate(Letter::Y)
    }

    pub fn mutate(&self, letter: Letter) -> Result<GeneratingTriple, TripleError> {
        let (left, mid, right) = mutate_classes(&self.left, &self.mid, &self.right, letter)?;
        let t = GeneratingTriple { n: self.n, word: self.word.push(letter), left, mid, right };
        t.check()?;
        Ok(t)
    }

    /// The triple this one was mutated from, and the letter used.
    pub fn predecessor(&self) -> Result<(Letter, GeneratingTriple), TripleError> {
        let (word, letter) = self.word.pop().ok_or(TripleError::NoPredecessor)?;
        let (l, m, r) = (&self.left, &self.mid, &self.right);
        let (left, mid, right) = match letter {
            // self = (L, M, R) came from (L, R, t_L R - M)
            Letter::X => {
                let t = l.t() * r.t() - m.t();
                (l.clone(), r.clone(), combine(l.t(), r, m, &t)?)
            }
            // self = (L, M, R) came from (t_R L - M, L, R)
            Letter::Y => {
                let t = r.t() * l.t() - m.t();
                (combine(r.t(), l, m, &t)?, l.clone(), r.clone())
            }
        };
        let prev = GeneratingTriple { n: self.n, word, left, mid, right };
        prev.check()?;
        if prev.mutate(letter)? != *self {
            return Err(TripleError::InvariantViolation(format!(
                "predecessor of {:?} does not mutate back",
                self.word.as_str()
            )));
        }
        Ok((letter, prev))
    }

    /// `q` of the middle entry of `x T`.
    pub fn q_x_mid(&self) -> BigInt {
        self.left.t() * self.mid.q() - self.right.q()
    }

    /// `q` of the middle entry of `y T`.
    pub fn q_y_mid(&self) -> BigInt {
        self.right.t() * self.mid.q() - self.left.q()
    }

    /// Evaluates the seven linear identities satisfied by generating triples.
    pub fn identity_suite(&self) -> IdentityReport {
        let (pl, ql, tl) = (self.left.p(), self.left.q(), self.left.t());
        let (pm, qm, tm) = (self.mid.p(), self.mid.q(), self.mid.t());
        let (pr, qr, tr) = (self.right.p(), self.right.q(), self.right.t());
        let six = big(6);
        let seven = big(7);
        let i = pl + ql == qm * tr - qr * tm && &seven * pl - ql == pm * tr - tm * pr;
        let ii = pr + qr == pm * tl - pl * tm && pr - &seven * qr == ql * tm - qm * tl;
        let iii = pm + qm == qr * tl + pl * tr
            && &seven * pm - qm == &six * pl * tr + pr * tl - ql * tr
            && &seven * qm - pm == &six * qr * tl + ql * tr - pr * tl;
        let iv = pl * (pr - &six * qr) + ql * qr == *tm;
        let v = ql * tl + qr * tr + qm * tm == qm * tl * tr;
        let qx = self.q_x_mid();
        let qy = self.q_y_mid();
        let vi = tl * (BigInt::one() + pm * qm - &six * qm * qm) == &qx * (pm - &six * qm) + qm * (pr - &six * qr)
            && tl * (qm * qm) == &qx * qm + qm * qr;
        let vii = tr * (qm * qm) == &qy * qm + qm * ql
            && -(tr * (qm * pm - BigInt::one())) == -(&qy * pm) - qm * pl;
        IdentityReport { i, ii, iii, iv, v, vi, vii }
    }

    /// The ascending pre-staircase: seeds `(left, mid)`, recursion `t_right`,
    /// blocking class `right`.
    pub fn ascending_staircase(&self) -> Result<PreStaircase, TripleError> {
        PreStaircase::new([self.left.clone(), self.mid.clone()], self.right.clone())
    }

    /// The descending pre-staircase: seeds `(right, mid)`, recursion
    /// `t_left`, blocking class `left`.
    pub fn descending_staircase(&self) -> Result<PreStaircase, TripleError> {
        PreStaircase::new([self.right.clone(), self.mid.clone()], self.left.clone())
    }

    /// `(b_inf, z_inf)` of the ascending pre-staircase.
    pub fn staircase_limits(&self) -> Result<(QuadExt, QuadExt), TripleError> {
        let s = self.ascending_staircase()?;
        Ok((s.b_inf, s.z_inf))
    }

    /// Left endpoint of the interval blocked by `right`.
    pub fn lower_endpoint(&self) -> Result<QuadExt, TripleError> {
        Ok(self.ascending_staircase()?.b_inf)
    }

    /// Right endpoint of the interval blocked by `left`, from the descending
    /// pre-staircase.
    pub fn upper_endpoint(&self) -> Result<QuadExt, TripleError> {
        Ok(self.descending_staircase()?.b_inf)
    }

    /// A triple of the same tree whose left entry is `self.right`.
    pub fn right_owner_triple(&self) -> Result<GeneratingTriple, TripleError> {
        let mut w = self.word.clone();
        while w.last() == Some(Letter::Y) {
            w = w.pop().expect("nonempty").0;
        }
        match w.pop() {
            // right is E[2n+8], the left entry of the next base triple
            None => base_triple(self.n + 1),
            // w = u x y^k: right is the middle entry of the triple at u
            Some((u, _)) => triple_at(self.n, &u.push(Letter::Y)),
        }
    }

    /// The interval of `b` blocked by `right`.
    pub fn blocked_interval(&self) -> Result<BlockedInterval, TripleError> {
        let lower = self.lower_endpoint()?;
        let other = self.right_owner_triple()?;
        if other.left != self.right {
            return Err(TripleError::InvariantViolation(format!(
                "triple {:?} at level {} does not have {} on the left",
                other.word.as_str(),
                other.n,
                self.right
            )));
        }
        let upper = other.upper_endpoint()?;
        let owner = self.right.clone();
        // d'/m' < lower < m_left/d_left
        let lo_bound = QuadExt::from_rational(Rational::new(owner.d_prime(), owner.m_prime()));
        let hi_bound = QuadExt::from_rational(self.left.md_ratio());
        if lower.cmp_exact(&lo_bound)? != Ordering::Greater || lower.cmp_exact(&hi_bound)? != Ordering::Less {
            return Err(TripleError::InvariantViolation(format!(
                "lower endpoint {lower} of the interval blocked by {owner} is outside ({lo_bound}, {hi_bound})"
            )));
        }
        if lower.cmp_exact(&upper)? != Ordering::Less {
            return Err(TripleError::InvariantViolation(format!(
                "blocked interval of {owner} is empty: [{lower}, {upper}]"
            )));
        }
        Ok(BlockedInterval {
            disc_lower: lower.disc().clone(),
            disc_upper: upper.disc().clone(),
            owner,
            lower,
            upper,
        })
    }
}

/// Recursively generated classes `E_{k+1} = t E_k - E_{k-1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct PreStaircase {
    pub seeds: [QuasiPerfect; 2],
    pub t_param: BigInt,
    pub blocking: QuasiPerfect,
    /// `(t + sqrt(t^2 - 4)) / 2`.
    pub lambda: QuadExt,
    pub b_inf: QuadExt,
    pub z_inf: QuadExt,
}

/// `(t + sqrt(t^2 - 4)) / 2` with the radicand reduced via `(t-2)(t+2)`.
pub fn dominant_root(t: &BigInt) -> Result<QuadExt, TripleError> {
    if t <= &big(2) {
        return Err(TripleError::InvariantViolation(format!("recursion parameter {t} must exceed 2")));
    }
    let lo = (t - big(2)).to_biguint().expect("positive");
    let hi = (t + big(2)).to_biguint().expect("positive");
    let (s, d) = squarefree_split_product(&[lo, hi]);
    let half = Rational::new(BigInt::one(), big(2));
    let coef = Rational::from_integer(BigInt::from(s)) * &half;
    let rat = Rational::from_integer(t.clone()) * &half;
    Ok(QuadExt::new(rat, coef, BigInt::from(d))?)
}

/// `lim x_k / y_k` for two sequences with the recursion root `lambda`:
/// `(x1 lambda - x0) / (y1 lambda - y0)`.
fn limit_ratio(x0: &BigInt, x1: &BigInt, y0: &BigInt, y1: &BigInt, lambda: &QuadExt) -> Result<QuadExt, TripleError> {
    let num = lambda.scale(&Rational::from_integer(x1.clone())).add_rational(&Rational::from_integer(-x0.clone()));
    let den = lambda.scale(&Rational::from_integer(y1.clone())).add_rational(&Rational::from_integer(-y0.clone()));
    Ok(num.checked_div(&den)?)
}

impl PreStaircase {
    pub fn new(seeds: [QuasiPerfect; 2], blocking: QuasiPerfect) -> Result<Self, TripleError> {
        let t_param = blocking.t().clone();
        let lambda = dominant_root(&t_param)?;
        let [e0, e1] = &seeds;
        let b_inf = limit_ratio(e0.m(), e1.m(), e0.d(), e1.d(), &lambda)?;
        let z_inf = limit_ratio(e0.p(), e1.p(), e0.q(), e1.q(), &lambda)?;
        if b_inf.is_rational() || z_inf.is_rational() {
            return Err(TripleError::InvariantViolation(format!("staircase limits {b_inf}, {z_inf} are rational")));
        }
        let acc = acc_of_b(&b_inf)?;
        if acc.z != z_inf {
            return Err(TripleError::InvariantViolation(format!(
                "z_inf = {z_inf} is not acc(b_inf) = {}",
                acc.z
            )));
        }
        Ok(PreStaircase { seeds, t_param, blocking, lambda, b_inf, z_inf })
    }

    /// Infinite iterator over the steps, starting with the two seeds.
    pub fn steps(&self) -> StaircaseSteps {
        StaircaseSteps {
            prev: None,
            cur: None,
            seeds: self.seeds.clone(),
            t: self.t_param.clone(),
            idx: 0,
        }
    }

    /// Whether the step centers increase.
    pub fn ascends(&self) -> bool {
        self.seeds[0].cmp_center(&self.seeds[1]) == Ordering::Less
    }
}

/// Steps of a pre-staircase; each is re-derived from its center and checked
/// against the recursion, `t` included.
pub struct StaircaseSteps {
    prev: Option<QuasiPerfect>,
    cur: Option<QuasiPerfect>,
    seeds: [QuasiPerfect; 2],
    t: BigInt,
    idx: usize,
}

impl Iterator for StaircaseSteps {
    type Item = Result<QuasiPerfect, TripleError>;

    fn next(&mut self) -> Option<Self::Item> {
        let next = match self.idx {
            0 | 1 => Ok(self.seeds[self.idx].clone()),
            _ => {
                let (p, c) = (self.prev.as_ref().expect("seeded"), self.cur.as_ref().expect("seeded"));
                let expected_t = &self.t * c.t() - p.t();
                combine(&self.t, c, p, &expected_t)
            }
        };
        self.idx += 1;
        match next {
            Ok(e) => {
                self.prev = self.cur.take();
                self.cur = Some(e.clone());
                Some(Ok(e))
            }
            Err(err) => Some(Err(err)),
        }
    }
}

/// Open interval `(lower, upper)` of `b` blocked by `owner`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BlockedInterval {
    pub owner: QuasiPerfect,
    pub lower: QuadExt,
    pub upper: QuadExt,
    #[serde(with = "crate::json::bigint")]
    pub disc_lower: BigInt,
    #[serde(with = "crate::json::bigint")]
    pub disc_upper: BigInt,
}

impl BlockedInterval {
    /// `q / (m' b - d')` at the lower endpoint.
    pub fn volume_at_lower(&self) -> Result<QuadExt, TripleError> {
        let o = &self.owner;
        let den = self
            .lower
            .scale(&Rational::from_integer(o.m_prime()))
            .add_rational(&Rational::from_integer(-o.d_prime()));
        if den.sign() != Sign::Positive {
            return Err(TripleError::InvariantViolation(format!("m'b - d' = {den} is not positive")));
        }
        Ok(QuadExt::from_rational(Rational::from_integer(o.q().clone())).checked_div(&den)?)
    }

    pub fn contains(&self, b: &QuadExt) -> bool {
        matches!(self.lower.cmp_exact(b), Ok(Ordering::Less)) && matches!(b.cmp_exact(&self.upper), Ok(Ordering::Less))
    }
}

/// All triples with words of length at most `depth`, in in-order
/// (x-subtree, node, y-subtree). Subtrees are built in parallel.
pub fn tree_enumerate(n: u32, depth: u32) -> Result<Vec<GeneratingTriple>, TripleError> {
    fn walk(t: GeneratingTriple, depth: u32) -> Result<Vec<GeneratingTriple>, TripleError> {
        if depth == 0 {
            return Ok(vec![t]);
        }
        let (x, y) = (t.mutate_x()?, t.mutate_y()?);
        let (left, right) = rayon::join(|| walk(x, depth - 1), || walk(y, depth - 1));
        let mut out = left?;
        out.push(t);
        out.extend(right?);
        Ok(out)
    }
    walk(base_triple(n)?, depth)
}

/// Whether the middle centers strictly increase along `ts`.
pub fn centers_increase(ts: &[GeneratingTriple]) -> bool {
    ts.windows(2).all(|w| w[0].mid.cmp_center(&w[1].mid) == Ordering::Less)
}

/// Whether every middle center lies in `(2n+6, 2n+8)`.
pub fn centers_in_family_range(ts: &[GeneratingTriple]) -> bool {
    ts.iter().all(|t| {
        let c = t.mid.center();
        let lo = Rational::from_integer(big(2 * t.n as i64 + 6));
        let hi = Rational::from_integer(big(2 * t.n as i64 + 8));
        c > lo && c < hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::is_blocked;
    use crate::scalar::rat;

    fn qp(d: i64, m: i64, p: i64, q: i64, t: i64) -> QuasiPerfect {
        QuasiPerfect::new(d, m, p, q, t, 1).unwrap()
    }

    fn w(s: &str) -> MutationWord {
        s.parse().unwrap()
    }

    #[test]
    fn base_triples() {
        let t = base_triple(0).unwrap();
        assert_eq!((t.left.clone(), t.mid.clone(), t.right.clone()), (qp(3, 2, 6, 1, 3), qp(14, 9, 29, 4, 13), qp(4, 3, 8, 1, 5)));
        let t = base_triple(1).unwrap();
        assert_eq!((t.left, t.mid, t.right), (qp(4, 3, 8, 1, 5), qp(27, 20, 55, 6, 33), qp(5, 4, 10, 1, 7)));
        assert_eq!(base_triple(2).unwrap().left, qp(5, 4, 10, 1, 7));
    }

    #[test]
    fn mutations() {
        let t = base_triple(0).unwrap();
        assert_eq!(t.mutate_x().unwrap().mid, qp(38, 24, 79, 11, 34));
        assert_eq!(t.mutate_y().unwrap().mid, qp(67, 43, 139, 19, 62));
        assert_eq!(t.mutate_x().unwrap().mid.center(), {
            let (p, q) = cf_to_fraction(&[7, 5, 2]).unwrap();
            Rational::new(p, q)
        });
    }

    #[test]
    fn seeds() {
        let s = seed_quasi_triple(0);
        assert!(s.verify().all_pass());
        assert_eq!(s.mutate_y().unwrap(), base_triple(0).unwrap());
        assert_eq!(seed_quasi_triple(1).mutate_x().unwrap(), s);
        assert_eq!(s.mutate_x(), Err(TripleError::NoLowerSeed));
    }

    #[test]
    fn verification_failures() {
        let t = base_triple(0).unwrap();
        let r = verify_classes(&t.left, &t.mid, &t.left);
        assert!(!r.ordered && !r.all_pass());
        assert!(t.verify().all_pass());
        assert!(t.mutate_x().unwrap().verify().all_pass());
    }

    #[test]
    fn predecessors() {
        let t = base_triple(0).unwrap();
        let x = t.mutate_x().unwrap();
        assert_eq!(x.predecessor().unwrap(), (Letter::X, t.clone()));
        let xy = x.mutate_y().unwrap();
        assert_eq!(xy.predecessor().unwrap(), (Letter::Y, x));
        assert_eq!(t.predecessor(), Err(TripleError::NoPredecessor));
    }

    #[test]
    fn words() {
        assert!("xyz".parse::<MutationWord>().is_err());
        assert_eq!(w("xy").push(Letter::X).as_str(), "xyx");
        assert_eq!(w("xy").pop(), Some((w("x"), Letter::Y)));
    }

    #[test]
    fn small_trees() {
        let ts = tree_enumerate(0, 1).unwrap();
        let centers: Vec<_> = ts.iter().map(|t| t.mid.center()).collect();
        assert_eq!(centers, vec![rat(79, 11), rat(29, 4), rat(139, 19)]);
        assert_eq!(tree_enumerate(0, 0).unwrap(), vec![base_triple(0).unwrap()]);
    }

    #[test]
    fn identities_on_base() {
        let t = base_triple(0).unwrap();
        assert_eq!(t.q_x_mid(), big(11));
        assert_eq!(t.q_y_mid(), big(19));
        assert!(t.identity_suite().all_pass());
    }

    #[test]
    fn limits_of_base_triple() {
        let t = base_triple(0).unwrap();
        let (b, z) = t.staircase_limits().unwrap();
        let lam: QuadExt = "5/2 + 1/2*sqrt(21)".parse().unwrap();
        let expect_b = (lam.scale(&rat(9, 1)).add_rational(&rat(-2, 1))) / (lam.scale(&rat(14, 1)).add_rational(&rat(-3, 1)));
        assert_eq!(b, expect_b);
        assert_eq!(z, "7/2 + 5/6*sqrt(21)".parse().unwrap());
        assert!((b.to_f64() - 0.6417424).abs() < 1e-7);
        assert!((z.to_f64() - 7.3188130).abs() < 1e-7);
    }

    #[test]
    fn blocked_interval_of_e8() {
        let j = base_triple(0).unwrap().blocked_interval().unwrap();
        assert_eq!(j.owner, qp(4, 3, 8, 1, 5));
        assert!((j.lower.to_f64() - 0.6417424).abs() < 1e-7);
        assert!(j.upper.to_f64() > 0.7 && j.upper.to_f64() < 0.75);
        let v = j.volume_at_lower().unwrap();
        let acc = acc_of_b(&j.lower).unwrap();
        assert_eq!(v, acc.volume());
        assert!((v.to_f64() - 3.527525).abs() < 1e-6);
        let b = QuadExt::from_rational(rat(13, 20));
        assert!(j.contains(&b));
        assert!(is_blocked(&j.owner, &b).unwrap());
    }

    #[test]
    fn descending_staircase_is_x_tower() {
        let t = base_triple(0).unwrap();
        let s = t.descending_staircase().unwrap();
        let steps: Vec<_> = s.steps().take(5).map(|e| e.unwrap()).collect();
        let mut x = t.clone();
        for k in 1..4 {
            assert_eq!(steps[k], x.mid);
            x = x.mutate_x().unwrap();
        }
        assert!(!s.ascends());
    }
}
