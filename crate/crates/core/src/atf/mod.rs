//! Decorated quadrilaterals, nodal-ray mutations, and the quadrilateral
//! attached to a generating triple.

mod quad;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{acc_of_b, ClassError, QuasiPerfect};
use crate::scalar::{rat, BInterval, Exact, IMat2, IVec2, LinFormB, QuadExt, Rational, ScalarError};
use crate::triples::{base_triple, GeneratingTriple, Letter, TripleError};

pub use quad::{DecoratedQuad, DecoratedQuadF64, MutationMatrix, Vertex};

#[cfg(test)]
mod tests;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtfError {
    #[error("nodal ray at {vertex} does not cross its opposite side internally: {detail}")]
    RayMissesSide { vertex: Vertex, detail: String },
    #[error("expected exactly one shear sign at {vertex} to close the quadrilateral, found {count}")]
    ShearSign { vertex: Vertex, count: usize },
    #[error("closure violated: defect {0}")]
    ClosureViolation(String),
    #[error("area is not (1-b^2)/2: twice the area is {0}")]
    AreaViolation(String),
    #[error("side {side} has non-positive length {value}")]
    NonPositiveLength { side: String, value: String },
    #[error("{0} is not primitive")]
    NotPrimitive(String),
    #[error("no value of b makes every length positive")]
    EmptyDomain,
    #[error("{0} is outside the admissible interval of b")]
    OutsideDomain(String),
    #[error("singular system decomposing {0}")]
    Singular(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Scalar(ScalarError),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// A quadrilateral with linear forms in `b` as lengths.
pub type SymbolicQuad = DecoratedQuad<LinFormB>;
/// A quadrilateral specialized at an algebraic value of `b`.
pub type SpecializedQuad = DecoratedQuad<QuadExt>;
/// A quadrilateral specialized at a rational value of `b`.
pub type RationalQuad = DecoratedQuad<Rational>;

fn r(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// `(p - 6q, q)`.
fn x_ray(e: &QuasiPerfect) -> IVec2 {
    IVec2::new(e.p() - BigInt::from(6) * e.q(), e.q().clone())
}

/// `(q, -p)`.
fn y_ray(e: &QuasiPerfect) -> IVec2 {
    IVec2::new(e.q().clone(), -e.p())
}

/// The nodal ray at `V`, fixed by the last mutation that produced `t`.
fn v_ray(t: &GeneratingTriple) -> Result<IVec2, AtfError> {
    if t.word.is_empty() {
        return Ok(IVec2::new(-1, 1));
    }
    let (letter, pred) = t.predecessor()?;
    Ok(match letter {
        Letter::Y => -y_ray(&pred.left),
        Letter::X => -x_ray(&pred.right),
    })
}

/// The quadrilateral attached to a generating triple `(l, m, r)`.
pub fn associate(t: &GeneratingTriple) -> Result<SymbolicQuad, AtfError> {
    let (l, m, rho) = (&t.left, &t.mid, &t.right);
    let lin = |c: &BigInt, k: &BigInt, den: &BigInt| {
        let inv = Rational::new(BigInt::one(), den.clone());
        LinFormB::new(r(c) * &inv, r(k) * &inv)
    };
    let qr_qm = rho.q() * m.q();
    let ql_qm = l.q() * m.q();
    let quad = DecoratedQuad {
        len_oy: lin(l.d(), &-l.m(), l.q()),
        len_ox: lin(&-rho.d_prime(), &rho.m_prime(), rho.q()),
        len_vy: lin(&rho.m_prime(), &-rho.d_prime(), &ql_qm),
        len_xv: lin(l.m(), &-l.d(), &qr_qm),
        ray_y: y_ray(l),
        ray_x: x_ray(rho),
        ray_v: v_ray(t)?,
        dir_vy: IVec2::new(-(l.q() * l.q()), l.q() * l.p() - 1),
        dir_xv: IVec2::new(
            BigInt::one() + rho.p() * rho.q() - BigInt::from(6) * rho.q() * rho.q(),
            rho.q() * rho.q(),
        ),
        b: LinFormB::b(),
    };
    let domain = quad.positivity_region().ok_or(AtfError::EmptyDomain)?;
    quad.check_invariants(&domain)?;
    Ok(quad)
}

/// `d'_r/m'_r < b < min(m_l/d_l, m'_r/d'_r)`, intersected with `(0, 1)`.
pub fn bsize(t: &GeneratingTriple) -> Option<BInterval> {
    let (l, rho) = (&t.left, &t.right);
    if rho.m_prime() <= BigInt::zero() || l.d().is_zero() {
        return None;
    }
    let lo = Rational::new(rho.d_prime(), rho.m_prime());
    let mut hi = l.md_ratio();
    if rho.d_prime() > BigInt::zero() {
        hi = hi.min(Rational::new(rho.m_prime(), rho.d_prime()));
    }
    BInterval::new(lo, hi)?.intersect(&BInterval::unit())
}

/// `((1 - pq + 6q^2, (p - 6q)^2), (-q^2, 1 + pq - 6q^2))` for the right class.
pub fn x_matrix(rho: &QuasiPerfect) -> IMat2 {
    let (p, q) = (rho.p(), rho.q());
    let six_qq = BigInt::from(6) * q * q;
    let pq = p * q;
    let a = p - BigInt::from(6) * q;
    IMat2::new(BigInt::one() - &pq + &six_qq, &a * &a, -(q * q), BigInt::one() + &pq - &six_qq)
}

/// `((1 - pq, -q^2), (p^2, 1 + pq))` for the left class.
pub fn y_matrix(lambda: &QuasiPerfect) -> IMat2 {
    let (p, q) = (lambda.p(), lambda.q());
    let pq = p * q;
    IMat2::new(BigInt::one() - &pq, -(q * q), p * p, BigInt::one() + &pq)
}

/// `((1 + 2k, -4k^2), (1, 1 - 2k))`: the shear of the `(k+1)`-th v-mutation of `q0`.
pub fn v_matrix(k: u32) -> IMat2 {
    let k = BigInt::from(k);
    IMat2::new(BigInt::one() + 2 * &k, -(BigInt::from(4) * &k * &k), 1, BigInt::one() - 2 * &k)
}

/// Outcome of one checked mutation.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct StepReport {
    pub lengths: bool,
    pub rays: bool,
    pub dirs: bool,
    pub matrix: bool,
    pub fixed_side: bool,
    pub domain: BInterval,
    pub quad: SymbolicQuad,
    pub shear: MutationMatrix,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.lengths && self.rays && self.dirs && self.matrix && self.fixed_side
    }

    fn compare(got: &SymbolicQuad, want: &SymbolicQuad) -> (bool, bool, bool) {
        (
            got.lengths() == want.lengths(),
            got.ray_x == want.ray_x && got.ray_v == want.ray_v && got.ray_y == want.ray_y,
            got.dir_xv == want.dir_xv && got.dir_vy == want.dir_vy,
        )
    }
}

/// Mutates `associate(t)` at the vertex named by `letter` and compares with
/// `associate` of the mutated triple, on the interval where both are positive.
pub fn verify_association_step(t: &GeneratingTriple, letter: Letter) -> Result<StepReport, AtfError> {
    let src = associate(t)?;
    let next = t.mutate(letter)?;
    let want = associate(&next)?;
    let domain = src
        .positivity_region()
        .and_then(|d| want.positivity_region().and_then(|w| d.intersect(&w)))
        .ok_or(AtfError::EmptyDomain)?;
    let vertex = match letter {
        Letter::X => Vertex::X,
        Letter::Y => Vertex::Y,
    };
    let (got, shear) = src.mutate(vertex, &domain)?;
    let (lengths, rays, dirs) = StepReport::compare(&got, &want);
    let (matrix, fixed_side) = match letter {
        Letter::X => (shear.mat == x_matrix(&t.right), got.len_oy == src.len_oy && got.ray_y == src.ray_y),
        Letter::Y => (shear.mat == y_matrix(&t.left), got.len_ox == src.len_ox && got.ray_x == src.ray_x),
    };
    Ok(StepReport { lengths, rays, dirs, matrix, fixed_side, domain, quad: got, shear })
}

/// The run `q0 -> v q0 -> ... -> v^{n+2} q0 -> y v^{n+2} q0`.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct BaseRun {
    pub domain: BInterval,
    /// `v^k q0` for `k = 0..=n+2`.
    pub v_quads: Vec<SymbolicQuad>,
    pub v_shears: Vec<MutationMatrix>,
    pub final_quad: SymbolicQuad,
    pub y_shear: MutationMatrix,
    pub matches_associate: bool,
    pub v_matrices_ok: bool,
    pub y_matrix_ok: bool,
}

impl BaseRun {
    pub fn passed(&self) -> bool {
        self.matches_associate && self.v_matrices_ok && self.y_matrix_ok
    }

    /// Every quadrilateral of the run.
    pub fn quads(&self) -> impl Iterator<Item = &SymbolicQuad> {
        self.v_quads.iter().chain(std::iter::once(&self.final_quad))
    }
}

/// Runs `y v^{n+2}` on `q0` for `(n+1)/(n+2) < b < (n+2)/(n+3)`.
pub fn base_run(n: u32) -> Result<BaseRun, AtfError> {
    let k = n as i64 + 2;
    let domain = BInterval::new(rat(k - 1, k), rat(k, k + 1)).ok_or(AtfError::EmptyDomain)?;
    let target = associate(&base_triple(n)?)?;
    let domain = target
        .positivity_region()
        .and_then(|d| d.intersect(&domain))
        .ok_or(AtfError::EmptyDomain)?;
    let mut q = DecoratedQuad::q0();
    let mut v_quads = vec![q.clone()];
    let mut v_shears = Vec::new();
    for _ in 0..k {
        let (next, m) = q.mutate(Vertex::V, &domain)?;
        v_shears.push(m);
        v_quads.push(next.clone());
        q = next;
    }
    let (final_quad, y_shear) = q.mutate(Vertex::Y, &domain)?;
    let v_matrices_ok = v_shears.iter().enumerate().all(|(j, m)| m.mat == v_matrix(j as u32));
    // the seed class (1,1,1,1,2) sits on the left before the base triple
    let seed = QuasiPerfect::new(1, 1, 1, 1, 2, 1)?;
    let y_matrix_ok = y_shear.mat == y_matrix(&seed);
    let matches_associate = final_quad.same_data(&target);
    Ok(BaseRun { domain, v_quads, v_shears, final_quad, y_shear, matches_associate, v_matrices_ok, y_matrix_ok })
}

pub fn verify_association_base(n: u32) -> Result<bool, AtfError> {
    Ok(base_run(n)?.passed())
}

/// Solves `a = c1 u + c2 w` over the rationals.
fn decompose(a: &IVec2, u: &IVec2, w: &IVec2) -> Result<(Rational, Rational), AtfError> {
    let det = u.cross(w);
    if det.is_zero() {
        return Err(AtfError::Singular(format!("{a} in the basis {u}, {w}")));
    }
    Ok((Rational::new(a.cross(w), det.clone()), Rational::new(u.cross(a), det)))
}

/// `dir_VY = c1 n_V + c2 n_X`; must equal `(q_{x mid}/t_l, q_mid/t_l)`.
pub fn vy_decomposition(t: &GeneratingTriple) -> Result<(Rational, Rational), AtfError> {
    let q = associate(t)?;
    let (c1, c2) = decompose(&q.dir_vy, &q.ray_v, &q.ray_x)?;
    let tl = t.left.t();
    let want = (Rational::new(t.q_x_mid(), tl.clone()), Rational::new(t.mid.q().clone(), tl.clone()));
    if (c1.clone(), c2.clone()) != want {
        return Err(AtfError::InvariantViolation(format!(
            "dir_VY = {c1} n_V + {c2} n_X, expected {} n_V + {} n_X",
            want.0, want.1
        )));
    }
    Ok((c1, c2))
}

/// `dir_XV = c1 n_V + c2 n_Y`; must equal `-(q_{y mid}/t_r, q_mid/t_r)`.
pub fn xv_decomposition(t: &GeneratingTriple) -> Result<(Rational, Rational), AtfError> {
    let q = associate(t)?;
    let (c1, c2) = decompose(&q.dir_xv, &q.ray_v, &q.ray_y)?;
    let tr = t.right.t();
    let want = (-Rational::new(t.q_y_mid(), tr.clone()), -Rational::new(t.mid.q().clone(), tr.clone()));
    if (c1.clone(), c2.clone()) != want {
        return Err(AtfError::InvariantViolation(format!(
            "dir_XV = {c1} n_V + {c2} n_Y, expected {} n_V + {} n_Y",
            want.0, want.1
        )));
    }
    Ok((c1, c2))
}

/// One quadrilateral of a limit run, in the trace format.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TraceStep {
    pub k: usize,
    pub lengths: TraceLengths,
    pub rays: TraceRays,
    pub dirs: TraceDirs,
    pub ellipsoid: (QuadExt, QuadExt),
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TraceLengths {
    pub OX: QuadExt,
    pub OY: QuadExt,
    pub XV: QuadExt,
    pub VY: QuadExt,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TraceRays {
    pub X: IVec2,
    pub V: IVec2,
    pub Y: IVec2,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TraceDirs {
    pub XV: IVec2,
    pub VY: IVec2,
}

impl TraceStep {
    pub fn new(k: usize, q: &SpecializedQuad) -> Self {
        TraceStep {
            k,
            lengths: TraceLengths {
                OX: q.len_ox.clone(),
                OY: q.len_oy.clone(),
                XV: q.len_xv.clone(),
                VY: q.len_vy.clone(),
            },
            rays: TraceRays { X: q.ray_x.clone(), V: q.ray_v.clone(), Y: q.ray_y.clone() },
            dirs: TraceDirs { XV: q.dir_xv.clone(), VY: q.dir_vy.clone() },
            ellipsoid: q.embedded_ellipsoid(),
        }
    }
}

/// Repeated `y` mutations of the quadrilateral of a triple at the lower end
/// of the interval blocked by its right class.
#[derive(Clone, PartialEq, Debug)]
pub struct LimitRun {
    pub b: QuadExt,
    pub z: QuadExt,
    /// Volume at the accumulation point, `1/(|OX|)` in the limit.
    pub volume: QuadExt,
    pub quads: Vec<SpecializedQuad>,
    /// Slope `p/q` of the ray at `Y` for each step.
    pub slopes: Vec<Rational>,
    /// Each step equals `associate(y^k T)` evaluated at `b`.
    pub matches_associate: bool,
}

impl LimitRun {
    pub fn trace(&self) -> Vec<TraceStep> {
        self.quads.iter().enumerate().map(|(k, q)| TraceStep::new(k, q)).collect()
    }

    pub fn ox_constant(&self) -> bool {
        self.quads.windows(2).all(|w| w[0].len_ox == w[1].len_ox)
    }

    pub fn ox_is_inverse_volume(&self) -> bool {
        self.quads.iter().all(|q| &q.len_ox * &self.volume == QuadExt::one())
    }

    pub fn xv_decreasing(&self) -> bool {
        self.quads
            .windows(2)
            .all(|w| w[1].len_xv.cmp_exact(&w[0].len_xv) == Ok(Ordering::Less))
    }

    /// Slopes increase towards `z` and stay below it.
    pub fn slopes_approach_z(&self) -> bool {
        let below = self.slopes.iter().all(|s| {
            QuadExt::from_rational(s.clone()).cmp_exact(&self.z) == Ok(Ordering::Less)
        });
        below && self.slopes.windows(2).all(|w| w[0] < w[1])
    }
}

pub fn limit_run(t: &GeneratingTriple, k_max: usize) -> Result<LimitRun, AtfError> {
    let b = t.lower_endpoint()?;
    let acc = acc_of_b(&b)?;
    let sym = associate(t)?;
    let mut q = sym.specialize(&b);
    q.check_invariants(&Exact).map_err(|e| AtfError::OutsideDomain(format!("b = {b}: {e}")))?;
    let mut quads = vec![q.clone()];
    let mut tri = t.clone();
    let mut slopes = vec![Rational::new(tri.left.p().clone(), tri.left.q().clone())];
    let mut matches_associate = true;
    for _ in 0..k_max {
        q = q.mutate(Vertex::Y, &Exact)?.0;
        tri = tri.mutate_y()?;
        matches_associate &= q.same_data(&associate(&tri)?.specialize(&b));
        slopes.push(Rational::new(tri.left.p().clone(), tri.left.q().clone()));
        quads.push(q.clone());
    }
    Ok(LimitRun { volume: acc.volume(), z: acc.z, b, quads, slopes, matches_associate })
}

/// `(|OX|, |OY|)` and the ratio `|OY|/|OX|`.
pub fn embedded_ellipsoid(q: &SpecializedQuad) -> Result<(QuadExt, QuadExt, QuadExt), AtfError> {
    let (a, c) = q.embedded_ellipsoid();
    let ratio = c.checked_div(&a)?;
    Ok((a, c, ratio))
}
