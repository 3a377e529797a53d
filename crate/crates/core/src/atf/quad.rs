use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{
    affine_length, rat, vadd, AffineScalar, BInterval, IMat2, IVec2, LinFormB, QuadExt, Rational, ScalarError,
    Sign, SignOracle, Vec2,
};

use super::AtfError;

/// A vertex carrying a nodal ray.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Vertex {
    V,
    X,
    Y,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Vertex::V => 'v',
            Vertex::X => 'x',
            Vertex::Y => 'y',
        };
        write!(f, "{c}")
    }
}

/// Quadrilateral `OXVY` with `O` at the origin, `X` on the positive
/// horizontal axis and `Y` on the positive vertical axis.
///
/// Nodal rays point into the quadrilateral. `dir_xv` runs from `X` to `V`
/// and `dir_vy` from `V` to `Y`. `b` is the blow-up size in the same scalar
/// type as the lengths, used for the area invariant.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DecoratedQuad<S> {
    pub len_ox: S,
    pub len_oy: S,
    pub len_xv: S,
    pub len_vy: S,
    pub ray_x: IVec2,
    pub ray_v: IVec2,
    pub ray_y: IVec2,
    pub dir_xv: IVec2,
    pub dir_vy: IVec2,
    pub b: S,
}

/// The shear used by one mutation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MutationMatrix {
    pub mat: IMat2,
    pub vertex: Vertex,
    pub sign: i8,
}

impl<S: AffineScalar> DecoratedQuad<S> {
    pub fn x(&self) -> Vec2<S> {
        [self.len_ox.clone(), S::zero()]
    }

    pub fn v(&self) -> Vec2<S> {
        vadd(&self.x(), &self.dir_xv.times(&self.len_xv))
    }

    pub fn y(&self) -> Vec2<S> {
        [S::zero(), self.len_oy.clone()]
    }

    /// `V + |VY| dir_vy - Y`; zero for a closed quadrilateral.
    pub fn closure_defect(&self) -> Vec2<S> {
        let end = vadd(&self.v(), &self.dir_vy.times(&self.len_vy));
        let y = self.y();
        [end[0].clone() - y[0].clone(), end[1].clone() - y[1].clone()]
    }

    pub fn is_closed(&self) -> bool {
        self.closure_defect().iter().all(|c| c.is_zero())
    }

    /// Twice the shoelace area of `O, X, V, Y`.
    pub fn twice_area(&self) -> S::Square {
        let v = self.v();
        self.len_ox.mul_wide(&v[1]) + v[0].mul_wide(&self.len_oy)
    }

    /// `1 - b^2`, twice the expected area.
    pub fn expected_twice_area(&self) -> S::Square {
        let one = S::from_rational(Rational::one());
        one.mul_wide(&one) - self.b.mul_wide(&self.b)
    }

    pub fn area_ok(&self) -> bool {
        self.twice_area() == self.expected_twice_area()
    }

    pub fn lengths(&self) -> [&S; 4] {
        [&self.len_ox, &self.len_oy, &self.len_xv, &self.len_vy]
    }

    pub fn lengths_positive<O: SignOracle<S>>(&self, oracle: &O) -> bool {
        self.lengths().iter().all(|l| oracle.is_positive(l))
    }

    /// Closure, area, positive lengths and primitive rays.
    pub fn check_invariants<O: SignOracle<S>>(&self, oracle: &O) -> Result<(), AtfError> {
        if !self.is_closed() {
            return Err(AtfError::ClosureViolation(format!("{:?}", self.closure_defect())));
        }
        if !self.area_ok() {
            return Err(AtfError::AreaViolation(format!("{:?}", self.twice_area())));
        }
        for (name, l) in ["OX", "OY", "XV", "VY"].iter().zip(self.lengths()) {
            if !oracle.is_positive(l) {
                return Err(AtfError::NonPositiveLength { side: name.to_string(), value: l.to_string() });
            }
        }
        for r in [&self.ray_x, &self.ray_v, &self.ray_y, &self.dir_xv, &self.dir_vy] {
            if !r.is_primitive() {
                return Err(AtfError::NotPrimitive(r.to_string()));
            }
        }
        Ok(())
    }

    /// Builds a quadrilateral from its vertices `X`, `V`, `Y`.
    fn from_vertices<O: SignOracle<S>>(
        x: &Vec2<S>,
        v: &Vec2<S>,
        y: &Vec2<S>,
        rays: [IVec2; 3],
        b: S,
        oracle: &O,
    ) -> Result<Self, AtfError> {
        if !x[1].is_zero() || !y[0].is_zero() {
            return Err(AtfError::ClosureViolation("X or Y left its axis".into()));
        }
        let (len_xv, dir_xv) = affine_length(&[v[0].clone() - x[0].clone(), v[1].clone() - x[1].clone()], oracle)?;
        let (len_vy, dir_vy) = affine_length(&[y[0].clone() - v[0].clone(), y[1].clone() - v[1].clone()], oracle)?;
        let [ray_x, ray_v, ray_y] = rays;
        let q = DecoratedQuad {
            len_ox: x[0].clone(),
            len_oy: y[1].clone(),
            len_xv,
            len_vy,
            ray_x,
            ray_v,
            ray_y,
            dir_xv,
            dir_vy,
            b,
        };
        q.check_invariants(oracle)?;
        Ok(q)
    }

    /// Slides the vertex along its nodal ray and shears the cut-off piece.
    ///
    /// * `v`: the ray from `V` must cross the open side `OX`; `X` moves onto
    ///   the line `YV` beyond `V`.
    /// * `x`: the ray from `X` must cross the open side `VY`; `V` moves onto
    ///   the horizontal axis beyond `X`.
    /// * `y`: the ray from `Y` must cross the open side `XV`; `V` moves onto
    ///   the vertical axis beyond `Y`.
    ///
    /// The hit point becomes a vertex whose ray is the negated mutating ray;
    /// the moved vertex carries the sheared ray of the vertex it came from.
    pub fn mutate<O: SignOracle<S>>(&self, vertex: Vertex, oracle: &O) -> Result<(Self, MutationMatrix), AtfError> {
        let o: Vec2<S> = [S::zero(), S::zero()];
        let (x, v, y) = (self.x(), self.v(), self.y());
        // (pivot, ray, side start, side direction, side length, moving point,
        //  primitive direction pivot -> moving point, target direction)
        let (w, n, a, d, len, f, e_in, target) = match vertex {
            Vertex::V => (
                &v,
                &self.ray_v,
                &o,
                IVec2::new(1, 0),
                &self.len_ox,
                &x,
                -&self.dir_xv,
                -&self.dir_vy,
            ),
            Vertex::X => (&x, &self.ray_x, &v, self.dir_vy.clone(), &self.len_vy, &v, self.dir_xv.clone(), IVec2::new(1, 0)),
            Vertex::Y => (&y, &self.ray_y, &x, self.dir_xv.clone(), &self.len_xv, &v, -&self.dir_vy, IVec2::new(0, 1)),
        };
        let (r, u) = intersect(w, n, a, &d).ok_or_else(|| AtfError::RayMissesSide {
            vertex,
            detail: format!("ray {n} is parallel to the side direction {d}"),
        })?;
        let hit = oracle.is_positive(&r)
            && oracle.is_positive(&u)
            && oracle.is_positive(&(len.clone() - u.clone()));
        if !hit {
            return Err(AtfError::RayMissesSide {
                vertex,
                detail: format!("ray {n} gives r = {r}, u = {u}, side length {len}"),
            });
        }
        let p = vadd(a, &d.times(&u));

        let candidates: Vec<(IMat2, i8)> = [1i8, -1]
            .into_iter()
            .map(|s| (IMat2::shear(n, s), s))
            .filter(|(m, _)| m.apply(&e_in) == target)
            .collect();
        let (mat, sign) = match candidates.as_slice() {
            [one] => one.clone(),
            _ => return Err(AtfError::ShearSign { vertex, count: candidates.len() }),
        };
        let moved = vadd(w, &mat.apply_scalar(&[f[0].clone() - w[0].clone(), f[1].clone() - w[1].clone()]));

        let b = self.b.clone();
        let q = match vertex {
            Vertex::V => Self::from_vertices(&p, &moved, &y, [-n, mat.apply(&self.ray_x), self.ray_y.clone()], b, oracle)?,
            Vertex::X => Self::from_vertices(&moved, &p, &y, [mat.apply(&self.ray_v), -n, self.ray_y.clone()], b, oracle)?,
            Vertex::Y => Self::from_vertices(&x, &p, &moved, [self.ray_x.clone(), -n, mat.apply(&self.ray_v)], b, oracle)?,
        };
        Ok((q, MutationMatrix { mat, vertex, sign }))
    }

    /// `(|OX|, |OY|)`: the ellipsoid `E(a, c)` this diagram embeds.
    pub fn embedded_ellipsoid(&self) -> (S, S) {
        (self.len_ox.clone(), self.len_oy.clone())
    }

    pub fn map<T: AffineScalar>(&self, f: impl Fn(&S) -> T) -> DecoratedQuad<T> {
        DecoratedQuad {
            len_ox: f(&self.len_ox),
            len_oy: f(&self.len_oy),
            len_xv: f(&self.len_xv),
            len_vy: f(&self.len_vy),
            ray_x: self.ray_x.clone(),
            ray_v: self.ray_v.clone(),
            ray_y: self.ray_y.clone(),
            dir_xv: self.dir_xv.clone(),
            dir_vy: self.dir_vy.clone(),
            b: f(&self.b),
        }
    }

    /// Whether all geometric data agree (the parameter `b` is ignored).
    pub fn same_data(&self, other: &Self) -> bool {
        self.lengths() == other.lengths()
            && self.ray_x == other.ray_x
            && self.ray_v == other.ray_v
            && self.ray_y == other.ray_y
            && self.dir_xv == other.dir_xv
            && self.dir_vy == other.dir_vy
    }
}

/// Solves `w + r n = a + u d` for `(r, u)`.
fn intersect<S: AffineScalar>(w: &Vec2<S>, n: &IVec2, a: &Vec2<S>, d: &IVec2) -> Option<(S, S)> {
    // [n, -d] (r, u)^T = a - w
    let det = &d.x * &n.y - &n.x * &d.y;
    if det.is_zero() {
        return None;
    }
    let rhs = [a[0].clone() - w[0].clone(), a[1].clone() - w[1].clone()];
    let inv = Rational::new(1.into(), det);
    let r = (rhs[1].scale_int(&d.x) - rhs[0].scale_int(&d.y)).scale(&inv);
    let u = (rhs[1].scale_int(&n.x) - rhs[0].scale_int(&n.y)).scale(&inv);
    Some((r, u))
}

impl DecoratedQuad<LinFormB> {
    /// The toric-like diagram of the blow-up of size `b`.
    pub fn q0() -> Self {
        let one_minus_b = LinFormB::new(rat(1, 1), rat(-1, 1));
        DecoratedQuad {
            len_ox: LinFormB::constant(rat(1, 1)),
            len_oy: one_minus_b.clone(),
            len_xv: one_minus_b,
            len_vy: LinFormB::b(),
            ray_x: IVec2::new(-2, 1),
            ray_v: IVec2::new(0, -1),
            ray_y: IVec2::new(1, -1),
            dir_xv: IVec2::new(-1, 1),
            dir_vy: IVec2::new(-1, 0),
            b: LinFormB::b(),
        }
    }

    /// Substitutes a value for `b`.
    pub fn specialize(&self, b: &QuadExt) -> DecoratedQuad<QuadExt> {
        self.map(|l| l.eval_quad(b))
    }

    pub fn at_rational(&self, b: &Rational) -> DecoratedQuad<Rational> {
        self.map(|l| l.eval(b))
    }

    /// Open interval of `b` in `(0, 1)` on which every length is positive.
    pub fn positivity_region(&self) -> Option<BInterval> {
        BInterval::unit().positivity_region(self.lengths())
    }
}

impl DecoratedQuad<QuadExt> {
    pub fn to_f64(&self) -> DecoratedQuadF64 {
        DecoratedQuadF64 {
            len_ox: self.len_ox.to_f64(),
            len_oy: self.len_oy.to_f64(),
            len_xv: self.len_xv.to_f64(),
            len_vy: self.len_vy.to_f64(),
        }
    }

    /// Exact sign of every length.
    pub fn length_signs(&self) -> [Sign; 4] {
        use crate::scalar::ExactSign;
        self.lengths().map(|l| l.sign())
    }
}

/// Float rendering of the four lengths.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct DecoratedQuadF64 {
    pub len_ox: f64,
    pub len_oy: f64,
    pub len_xv: f64,
    pub len_vy: f64,
}

impl From<ScalarError> for AtfError {
    fn from(e: ScalarError) -> Self {
        AtfError::Scalar(e)
    }
}
