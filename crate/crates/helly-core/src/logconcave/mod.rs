//! Log-concave function representations closed under pointwise minimum,
//! with evaluation, log-linear majorants, tail bounds, integration and the
//! John-function solver.

mod integrate;
mod john;

pub use integrate::{adaptive_gk15, integrate, integrate_numeric, IntegrationResult};
pub use john::{
    integral_ratio, john_function, JohnFunctionResult, JohnResiduals, JohnSolverOptions,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ellipsoid::unit_ball_volume;
use crate::geometry::{dot, norm, GeometryError, HPolytope};
use crate::logbound::LogBound;
use crate::numerics::{golden_max, maximize_pattern};

/// Contacts are clamped below unit norm by this margin; the unit-norm branch
/// of the log-linear majorant encodes a hard halfspace constraint that the
/// domain polytopes carry instead.
pub const CONTACT_NORM_CLAMP: f64 = 1.0 - 1e-9;

#[derive(Debug, Error)]
pub enum LogConcaveError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("contact norm {0} is at or above one; use the clamped-contact convention")]
    UnitNormContact(f64),
    #[error("function has unbounded support and no declared bounding box")]
    UnboundedSupport,
    #[error("operation supports dimension at most {max}, got {got}")]
    UnsupportedDimension { got: usize, max: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("function is not proper: {0}")]
    NotProper(String),
    #[error("query out of scope: {0}")]
    OutOfScope(String),
    #[error("John function has zero integral")]
    ZeroJohnIntegral,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Axis-aligned box, the declared integration domain of a function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        BoundingBox { lo, hi }
    }

    pub fn cube(dim: usize, r: f64) -> Self {
        BoundingBox {
            lo: vec![-r; dim],
            hi: vec![r; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= l - 1e-12 && *v <= h + 1e-12)
    }

    pub fn intersect(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.max(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.min(*b))
                .collect(),
        }
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.min(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    /// Regular grid with about `n_total` points across the box.
    pub fn grid(&self, n_total: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let per_axis = match d {
            1 => n_total,
            2 => (n_total as f64).sqrt().ceil() as usize,
            _ => (n_total as f64).cbrt().ceil() as usize,
        }
        .max(2);
        let axis = |i: usize| -> Vec<f64> {
            (0..per_axis)
                .map(|k| self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (per_axis - 1) as f64)
                .collect()
        };
        match d {
            1 => axis(0).into_iter().map(|x| vec![x]).collect(),
            2 => {
                let (xs, ys) = (axis(0), axis(1));
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(vec![*x, *y]);
                    }
                }
                out
            }
            3 => {
                let (xs, ys, zs) = (axis(0), axis(1), axis(2));
                let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
                for x in &xs {
                    for y in &ys {
                        for z in &zs {
                            out.push(vec![*x, *y, *z]);
                        }
                    }
                }
                out
            }
            _ => panic!("grids supported up to d = 3"),
        }
    }
}

/// The upper-half-ball profile `sqrt(1 - |x|^2)` on the unit ball.
pub fn h_ball(x: &[f64]) -> f64 {
    let n2: f64 = x.iter().map(|v| v * v).sum();
    if n2 <= 1.0 {
        (1.0 - n2).sqrt()
    } else {
        0.0
    }
}

/// Integral of the profile: half the volume of the (d+1)-ball.
pub fn h_integral(d: usize) -> f64 {
    0.5 * unit_ball_volume(d + 1)
}

/// One log-linear piece `exp(-(<slope, x> + intercept))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLinearPiece {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

/// A position of the profile: `x -> height * h_ball(map (x - center))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipsoidalFunctionRepr", into = "EllipsoidalFunctionRepr")]
pub struct EllipsoidalFunction {
    pub height: f64,
    pub map: DMatrix<f64>,
    pub center: Vec<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct EllipsoidalFunctionRepr {
    height: f64,
    map: Vec<Vec<f64>>,
    center: Vec<f64>,
}

impl TryFrom<EllipsoidalFunctionRepr> for EllipsoidalFunction {
    type Error = LogConcaveError;
    fn try_from(r: EllipsoidalFunctionRepr) -> Result<Self, Self::Error> {
        let d = r.center.len();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for (i, row) in r.map.iter().enumerate() {
            if row.len() != d || r.map.len() != d {
                return Err(LogConcaveError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        EllipsoidalFunction::new(r.height, m, r.center)
    }
}

impl From<EllipsoidalFunction> for EllipsoidalFunctionRepr {
    fn from(e: EllipsoidalFunction) -> Self {
        let d = e.center.len();
        EllipsoidalFunctionRepr {
            height: e.height,
            map: (0..d)
                .map(|i| (0..d).map(|j| e.map[(i, j)]).collect())
                .collect(),
            center: e.center,
        }
    }
}

impl EllipsoidalFunction {
    pub fn new(
        height: f64,
        map: DMatrix<f64>,
        center: Vec<f64>,
    ) -> Result<Self, LogConcaveError> {
        if height <= 0.0 {
            return Err(LogConcaveError::NotProper(format!(
                "nonpositive height {height}"
            )));
        }
        if map.determinant().abs() <= 1e-12 {
            return Err(LogConcaveError::NotProper("singular map".into()));
        }
        Ok(EllipsoidalFunction {
            height,
            map,
            center,
        })
    }

    /// The profile itself.
    pub fn height_profile(dim: usize) -> Self {
        EllipsoidalFunction {
            height: 1.0,
            map: DMatrix::identity(dim, dim),
            center: vec![0.0; dim],
        }
    }

    /// `r * h_ball(x / r)`: the profile blown up by `r`.
    pub fn scaled_profile(dim: usize, r: f64) -> Self {
        EllipsoidalFunction {
            height: r,
            map: DMatrix::identity(dim, dim) / r,
            center: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut n2 = 0.0;
        for r in 0..d {
            let mut s = 0.0;
            for c in 0..d {
                s += self.map[(r, c)] * (x[c] - self.center[c]);
            }
            n2 += s * s;
        }
        if n2 <= 1.0 {
            self.height * (1.0 - n2).sqrt()
        } else {
            0.0
        }
    }

    /// Exact integral `height * h_integral(d) / |det map|`.
    pub fn integral(&self) -> f64 {
        self.height * h_integral(self.dim()) / self.map.determinant().abs()
    }

    /// Axis box of the base ellipsoid (closure of the support).
    pub fn base_box(&self) -> BoundingBox {
        let d = self.dim();
        let inv = self
            .map
            .clone()
            .try_inverse()
            .expect("map is nonsingular by construction");
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let half: f64 = (0..d).map(|j| inv[(i, j)] * inv[(i, j)]).sum::<f64>().sqrt();
            lo.push(self.center[i] - half);
            hi.push(self.center[i] + half);
        }
        BoundingBox { lo, hi }
    }

    /// Singular values of the base map (the linear map sending the unit ball
    /// onto the base ellipsoid), i.e. of `map^{-1}`.
    pub fn base_map_singular_values(&self) -> Vec<f64> {
        let inv = self
            .map
            .clone()
            .try_inverse()
            .expect("map is nonsingular by construction");
        let mut sv: Vec<f64> = inv.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        sv
    }

    /// Shift the function by `a` in the translate convention `x -> f(x + a)`.
    pub fn translated(&self, a: &[f64]) -> EllipsoidalFunction {
        EllipsoidalFunction {
            height: self.height,
            map: self.map.clone(),
            center: self.center.iter().zip(a).map(|(c, ai)| c - ai).collect(),
        }
    }
}

/// Tagged union of log-concave representations, closed under pointwise
/// minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LogConcaveFn {
    #[serde(rename = "polyloglinear")]
    PolyLogLinear {
        pieces: Vec<LogLinearPiece>,
        domain: HPolytope,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bbox: Option<BoundingBox>,
    },
    Ellipsoidal(EllipsoidalFunction),
    Const {
        level: f64,
        bbox: BoundingBox,
    },
    Min {
        children: Vec<LogConcaveFn>,
    },
}

impl LogConcaveFn {
    pub fn poly_log_linear(
        pieces: Vec<LogLinearPiece>,
        domain: HPolytope,
        bbox: Option<BoundingBox>,
    ) -> Result<Self, LogConcaveError> {
        if pieces.is_empty() {
            return Err(LogConcaveError::NotProper("no log-linear pieces".into()));
        }
        let d = domain.dim();
        for p in &pieces {
            if p.slope.len() != d {
                return Err(LogConcaveError::DimensionMismatch {
                    expected: d,
                    got: p.slope.len(),
                });
            }
        }
        Ok(LogConcaveFn::PolyLogLinear {
            pieces,
            domain,
            bbox,
        })
    }

    /// Indicator-like constant `level` on `domain`, zero outside.
    pub fn plateau(level: f64, domain: HPolytope) -> Result<Self, LogConcaveError> {
        let d = domain.dim();
        LogConcaveFn::poly_log_linear(
            vec![LogLinearPiece {
                slope: vec![0.0; d],
                intercept: -level.ln(),
            }],
            domain,
            None,
        )
    }

    pub fn profile(dim: usize) -> Self {
        LogConcaveFn::Ellipsoidal(EllipsoidalFunction::height_profile(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            LogConcaveFn::PolyLogLinear { domain, .. } => domain.dim(),
            LogConcaveFn::Ellipsoidal(e) => e.dim(),
            LogConcaveFn::Const { bbox, .. } => bbox.dim(),
            LogConcaveFn::Min { children } => children[0].dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LogConcaveFn::PolyLogLinear {
                pieces, domain, ..
            } => {
                if !domain.contains(x, 1e-9) {
                    return 0.0;
                }
                let m = pieces
                    .iter()
                    .map(|p| dot(&p.slope, x) + p.intercept)
                    .fold(f64::NEG_INFINITY, f64::max);
                (-m).exp()
            }
            LogConcaveFn::Ellipsoidal(e) => e.eval(x),
            LogConcaveFn::Const { level, .. } => *level,
            LogConcaveFn::Min { children } => children
                .iter()
                .map(|c| c.eval(x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Tightest declared/derivable axis box containing the support.
    /// `None` means unbounded with no declared domain.
    pub fn bounding_box(&self) -> Option<BoundingBox> {
        match self {
            LogConcaveFn::PolyLogLinear { domain, bbox, .. } => {
                if let Some(b) = bbox {
                    return Some(b.clone());
                }
                let verts = crate::geometry::vertices(domain).ok()?;
                let d = domain.dim();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in verts.vertices() {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                Some(BoundingBox { lo, hi })
            }
            LogConcaveFn::Ellipsoidal(e) => Some(e.base_box()),
            LogConcaveFn::Const { bbox, .. } => Some(bbox.clone()),
            LogConcaveFn::Min { children } => {
                let boxes: Vec<BoundingBox> =
                    children.iter().filter_map(|c| c.bounding_box()).collect();
                let mut it = boxes.into_iter();
                let first = it.next()?;
                Some(it.fold(first, |acc, b| acc.intersect(&b)))
            }
        }
    }

    /// Maximum over a coarse grid plus local refinement; used for start
    /// points and properness checks. Ties prefer points near the box center
    /// so plateaus do not pin the start to a boundary.
    pub fn rough_max(&self, bbox: &BoundingBox) -> (Vec<f64>, f64) {
        let grid = bbox.grid(if bbox.dim() == 1 { 257 } else { 1024 });
        let mid: Vec<f64> = bbox
            .lo
            .iter()
            .zip(&bbox.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect();
        let dist_mid = |x: &[f64]| crate::geometry::dist(x, &mid);
        let mut best = (grid[0].clone(), self.eval(&grid[0]));
        for x in &grid {
            let v = self.eval(x);
            if v > best.1 + 1e-15 || (v >= best.1 - 1e-15 && dist_mid(x) < dist_mid(&best.0)) {
                best = (x.clone(), v);
            }
        }
        let span = bbox
            .hi
            .iter()
            .zip(&bbox.lo)
            .map(|(h, l)| h - l)
            .fold(0.0f64, f64::max);
        let (x, v) = maximize_pattern(
            |x| self.eval(x),
            &best.0,
            span / 64.0,
            1e-10,
            4000,
        );
        if v > best.1 {
            (x, v)
        } else {
            best
        }
    }
}

/// Pointwise minimum, flattening nested minima.
pub fn pointwise_min(fs: Vec<LogConcaveFn>) -> Result<LogConcaveFn, LogConcaveError> {
    if fs.is_empty() {
        return Err(LogConcaveError::NotProper("empty minimum".into()));
    }
    let d = fs[0].dim();
    let mut children = Vec::new();
    for f in fs {
        if f.dim() != d {
            return Err(LogConcaveError::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
        match f {
            LogConcaveFn::Min { children: inner } => children.extend(inner),
            other => children.push(other),
        }
    }
    if children.len() == 1 {
        Ok(children.pop().expect("one child"))
    } else {
        Ok(LogConcaveFn::Min { children })
    }
}

/// Clamp a contact point strictly inside the unit ball.
pub fn clamp_contact(u: &[f64]) -> Vec<f64> {
    let n = norm(u);
    if n > CONTACT_NORM_CLAMP {
        u.iter().map(|v| v * CONTACT_NORM_CLAMP / n).collect()
    } else {
        u.to_vec()
    }
}

/// The log-linear majorant touching the profile at `u` (`|u| < 1`):
/// slope `u / h^2(u)`, value `h_ball(u)` at `x = u`.
pub fn ell_u(u: &[f64]) -> Result<LogConcaveFn, LogConcaveError> {
    let n = norm(u);
    // Points exactly at the clamp norm are produced by `clamp_contact` and
    // must pass.
    if n > CONTACT_NORM_CLAMP * (1.0 + 1e-12) {
        return Err(LogConcaveError::UnitNormContact(n));
    }
    let h = h_ball(u);
    let h2 = h * h;
    let slope: Vec<f64> = u.iter().map(|v| v / h2).collect();
    let intercept = -(n * n) / h2 - h.ln();
    LogConcaveFn::poly_log_linear(
        vec![LogLinearPiece { slope, intercept }],
        HPolytope::full_space(u.len()),
        None,
    )
}

/// Grid check of the touching-majorant bound: requires `f >= profile` on a
/// verification grid and a genuine contact at `u`, then tests
/// `f <= ell_u + 1e-7` over the declared domain.
pub fn check_loglinear_majorant(f: &LogConcaveFn, u: &[f64]) -> Result<bool, LogConcaveError> {
    let d = f.dim();
    if u.len() != d {
        return Err(LogConcaveError::DimensionMismatch {
            expected: d,
            got: u.len(),
        });
    }
    let ball_box = BoundingBox::cube(d, 1.0);
    for x in ball_box.grid(2000) {
        if f.eval(&x) < h_ball(&x) - 1e-9 {
            return Err(LogConcaveError::PreconditionViolation(format!(
                "f is below the profile at {x:?}"
            )));
        }
    }
    if (f.eval(u) - h_ball(u)).abs() > 1e-7 {
        return Err(LogConcaveError::PreconditionViolation(format!(
            "no contact at {u:?}: f = {}, profile = {}",
            f.eval(u),
            h_ball(u)
        )));
    }
    let majorant = ell_u(u)?;
    let domain = f
        .bounding_box()
        .unwrap_or_else(|| BoundingBox::cube(d, 3.0))
        .union(&ball_box);
    Ok(domain
        .grid(10_000)
        .iter()
        .all(|x| f.eval(x) <= majorant.eval(x) + 1e-7))
}

/// Pointwise tail bound for the minimum of touching majorants over the
/// vertices of `P` (`delta B <= P <= B`), evaluated at `x` outside the polar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn tail_bound_check(
    p: &crate::geometry::VPolytope,
    x: &[f64],
) -> Result<TailBoundCheck, LogConcaveError> {
    let delta = crate::geometry::hull_inradius_origin(p);
    if delta <= 1e-12 {
        return Err(LogConcaveError::PreconditionViolation(
            "hull has no inscribed ball about the origin".into(),
        ));
    }
    for v in p.vertices() {
        if norm(v) > 1.0 + 1e-9 {
            return Err(LogConcaveError::PreconditionViolation(format!(
                "vertex {v:?} lies outside the unit ball"
            )));
        }
    }
    // Gauge of the polar body: max over the generating vertices.
    let gauge = p
        .vertices()
        .iter()
        .map(|v| dot(v, x))
        .fold(0.0f64, f64::max);
    if gauge <= 1.0 + 1e-9 {
        return Err(LogConcaveError::OutOfScope(format!(
            "point lies inside the polar body (gauge {gauge})"
        )));
    }
    let mut lhs = f64::INFINITY;
    for v in p.vertices() {
        let u = clamp_contact(v);
        lhs = lhs.min(ell_u(&u)?.eval(x));
    }
    let rhs = std::f64::consts::E * (-gauge).exp();
    Ok(TailBoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Log-space tail-integral bound `2 e d^{d+1} / delta^d * h_integral(d)`.
pub fn tail_integral_bound(delta: f64, d: usize) -> LogBound {
    assert!(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    let log = std::f64::consts::LN_2
        + 1.0
        + (d as f64 + 1.0) * (d as f64).ln()
        - d as f64 * delta.ln()
        + h_integral(d).ln();
    LogBound::from_log(log)
}

/// Find a translate vector `a` with `g(. + a)` below `f`, by coarse grid
/// scan plus violation descent inside `search_box` (the feasible set of `a`
/// is convex). Returns `None` when the box is exhausted.
pub fn find_translate_below(
    f: &LogConcaveFn,
    g: &LogConcaveFn,
    search_box: &BoundingBox,
) -> Result<Option<Vec<f64>>, LogConcaveError> {
    let supp = g.bounding_box().ok_or(LogConcaveError::UnboundedSupport)?;
    let d = f.dim();
    let zgrid = supp.grid(if d == 1 { 513 } else { 2048 });
    let violation = |a: &[f64]| -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for z in &zgrid {
            let gz = g.eval(z);
            if gz <= 0.0 {
                continue;
            }
            let y: Vec<f64> = z.iter().zip(a).map(|(zi, ai)| zi - ai).collect();
            worst = worst.max(gz - f.eval(&y));
        }
        worst
    };
    let agrid = search_box.grid(if d == 1 { 41 } else { 441 });
    let mut best: Option<(Vec<f64>, f64)> = None;
    for a in &agrid {
        let v = violation(a);
        if v <= 1e-10 {
            return Ok(Some(a.clone()));
        }
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((a.clone(), v));
        }
    }
    // Convexity of the feasible set lets a local descent finish the job.
    if let Some((a0, _)) = best {
        let span = search_box
            .hi
            .iter()
            .zip(&search_box.lo)
            .map(|(h, l)| h - l)
            .fold(0.0f64, f64::max);
        let (a, neg_v) = maximize_pattern(|a| -violation(a), &a0, span / 40.0, 1e-9, 4000);
        if -neg_v <= 1e-10 {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Positions of functions: the substitution `f -> f(map^{-1} y + shift) / scale`,
/// which sends the ellipsoidal function `(scale, map, shift)` to the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionTransform {
    pub scale: f64,
    #[serde(with = "matrix_rows")]
    pub map: DMatrix<f64>,
    pub shift: Vec<f64>,
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }
}

impl PositionTransform {
    pub fn identity(dim: usize) -> Self {
        PositionTransform {
            scale: 1.0,
            map: DMatrix::identity(dim, dim),
            shift: vec![0.0; dim],
        }
    }

    /// The transform normalizing `g` to the profile.
    pub fn normalizing(g: &EllipsoidalFunction) -> Self {
        PositionTransform {
            scale: g.height,
            map: g.map.clone(),
            shift: g.center.clone(),
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.scale - 1.0).abs() <= tol
            && (self.map.clone() - DMatrix::<f64>::identity(self.map.nrows(), self.map.ncols()))
                .norm()
                <= tol
            && self.shift.iter().all(|v| v.abs() <= tol)
    }

    pub fn inverse(&self) -> PositionTransform {
        let inv = self
            .map
            .clone()
            .try_inverse()
            .expect("position maps are nonsingular");
        let shift = (-(&self.map) * DVector::from_column_slice(&self.shift))
            .iter()
            .copied()
            .collect();
        PositionTransform {
            scale: 1.0 / self.scale,
            map: inv,
            shift,
        }
    }

    /// `integral(apply(f)) = integral_factor() * integral(f)`.
    pub fn integral_factor(&self) -> f64 {
        self.map.determinant().abs() / self.scale
    }

    fn map_point(&self, x: &[f64]) -> Vec<f64> {
        // y = map (x - shift)
        let d = self.shift.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.map[(i, j)] * (x[j] - self.shift[j]))
                    .sum()
            })
            .collect()
    }

    fn map_box(&self, b: &BoundingBox) -> BoundingBox {
        let d = b.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let corners = 1usize << d;
        for mask in 0..corners {
            let corner: Vec<f64> = (0..d)
                .map(|i| if mask >> i & 1 == 1 { b.hi[i] } else { b.lo[i] })
                .collect();
            let y = self.map_point(&corner);
            for i in 0..d {
                lo[i] = lo[i].min(y[i]);
                hi[i] = hi[i].max(y[i]);
            }
        }
        BoundingBox { lo, hi }
    }

    pub fn apply_ellipsoidal(&self, e: &EllipsoidalFunction) -> EllipsoidalFunction {
        let inv = self
            .map
            .clone()
            .try_inverse()
            .expect("position maps are nonsingular");
        let new_map = &e.map * inv;
        let diff: Vec<f64> = e
            .center
            .iter()
            .zip(&self.shift)
            .map(|(a, b)| a - b)
            .collect();
        let new_center = (&self.map * DVector::from_column_slice(&diff))
            .iter()
            .copied()
            .collect();
        EllipsoidalFunction {
            height: e.height / self.scale,
            map: new_map,
            center: new_center,
        }
    }

    pub fn apply(&self, f: &LogConcaveFn) -> LogConcaveFn {
        match f {
            LogConcaveFn::PolyLogLinear {
                pieces,
                domain,
                bbox,
            } => {
                let inv = self
                    .map
                    .clone()
                    .try_inverse()
                    .expect("position maps are nonsingular");
                let new_pieces = pieces
                    .iter()
                    .map(|p| {
                        let s = DVector::from_column_slice(&p.slope);
                        let new_slope: Vec<f64> =
                            (inv.transpose() * &s).iter().copied().collect();
                        LogLinearPiece {
                            slope: new_slope,
                            intercept: p.intercept
                                + dot(&p.slope, &self.shift)
                                + self.scale.ln(),
                        }
                    })
                    .collect();
                LogConcaveFn::PolyLogLinear {
                    pieces: new_pieces,
                    domain: domain.substitute(&inv, &self.shift),
                    bbox: bbox.as_ref().map(|b| self.map_box(b)),
                }
            }
            LogConcaveFn::Ellipsoidal(e) => {
                LogConcaveFn::Ellipsoidal(self.apply_ellipsoidal(e))
            }
            LogConcaveFn::Const { level, bbox } => LogConcaveFn::Const {
                level: level / self.scale,
                bbox: self.map_box(bbox),
            },
            LogConcaveFn::Min { children } => LogConcaveFn::Min {
                children: children.iter().map(|c| self.apply(c)).collect(),
            },
        }
    }
}
