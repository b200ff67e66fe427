//! Convex body kernel: halfspace polytopes, vertex polytopes, widths,
//! strips, polars, gauges and diameters, exact at desk scale (`d <= 3`).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LpProblem, LpSolution};

/// Absolute comparison tolerance used by the geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;
/// Unit-norm tolerance for directions and zone axes.
pub const UNIT_TOL: f64 = 1e-12;
/// Exact vertex/facet enumeration is supported up to this dimension.
pub const MAX_EXACT_DIM: usize = 3;

pub type Vector = DVector<f64>;
pub type SquareMatrix = DMatrix<f64>;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("row {0} of the constraint matrix is zero")]
    ZeroRow(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope is infeasible")]
    Infeasible,
    #[error("polytope is unbounded in the queried direction")]
    UnboundedDirection,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("exact enumeration unsupported at dimension {dim} (max {max}); use the sampling paths")]
    UnsupportedDimension { dim: usize, max: usize },
    #[error("origin is not interior to the body")]
    OriginNotInterior,
    #[error("vertex set spans an affine subspace of dimension {rank} < {dim}")]
    DegenerateHull { rank: usize, dim: usize },
    #[error("vector is not normalizable (norm {0})")]
    NotNormalizable(f64),
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Halfspace polytope `{x : A x <= b}`. Rows of `A` are outer normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HPolytopeRepr", into = "HPolytopeRepr")]
pub struct HPolytope {
    rows: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    dim: usize,
}

#[derive(Serialize, Deserialize, Clone)]
struct HPolytopeRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

impl TryFrom<HPolytopeRepr> for HPolytope {
    type Error = GeometryError;
    fn try_from(r: HPolytopeRepr) -> Result<Self, Self::Error> {
        if r.a.is_empty() {
            let dim = r.dim.ok_or(GeometryError::EmptyInput(
                "row-free polytope needs an explicit dim",
            ))?;
            return Ok(HPolytope::full_space(dim));
        }
        HPolytope::new(r.a, r.b)
    }
}

impl From<HPolytope> for HPolytopeRepr {
    fn from(p: HPolytope) -> Self {
        let dim = if p.rows.is_empty() { Some(p.dim) } else { None };
        HPolytopeRepr {
            a: p.rows,
            b: p.offsets,
            dim,
        }
    }
}

impl HPolytope {
    pub fn new(rows: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self, GeometryError> {
        if rows.is_empty() {
            return Err(GeometryError::EmptyInput("constraint rows"));
        }
        if rows.len() != offsets.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: rows.len(),
                got: offsets.len(),
            });
        }
        let dim = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            if row.iter().map(|x| x * x).sum::<f64>().sqrt() <= UNIT_TOL {
                return Err(GeometryError::ZeroRow(i));
            }
        }
        Ok(HPolytope { rows, offsets, dim })
    }

    /// `R^d`, the row-free system.
    pub fn full_space(dim: usize) -> Self {
        HPolytope {
            rows: Vec::new(),
            offsets: Vec::new(),
            dim,
        }
    }

    /// Axis-aligned box `[lo_i, hi_i]`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self, GeometryError> {
        let d = lo.len();
        if hi.len() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: hi.len(),
            });
        }
        let mut rows = Vec::with_capacity(2 * d);
        let mut offsets = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut r = vec![0.0; d];
            r[i] = 1.0;
            rows.push(r.clone());
            offsets.push(hi[i]);
            r[i] = -1.0;
            rows.push(r);
            offsets.push(-lo[i]);
        }
        HPolytope::new(rows, offsets)
    }

    /// Centered cube `[-r, r]^d`.
    pub fn centered_cube(dim: usize, r: f64) -> Self {
        HPolytope::from_box(&vec![-r; dim], &vec![r; dim]).expect("cube is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows
            .iter()
            .zip(&self.offsets)
            .all(|(row, &bi)| dot(row, x) <= bi + tol)
    }

    /// LP feasibility probe.
    pub fn is_feasible(&self) -> bool {
        let objective = vec![0.0; self.dim];
        matches!(
            lp::solve(&LpProblem {
                objective: &objective,
                rows: &self.rows,
                b: &self.offsets,
            }),
            Ok(LpSolution::Optimal { .. })
        )
    }

    /// Bounded iff every axis support is finite.
    pub fn is_bounded(&self) -> bool {
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut obj = vec![0.0; self.dim];
                obj[i] = sign;
                match lp::solve(&LpProblem {
                    objective: &obj,
                    rows: &self.rows,
                    b: &self.offsets,
                }) {
                    Ok(LpSolution::Optimal { .. }) => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Translate by `t`: `{x : A x <= b + A t}`.
    pub fn translate(&self, t: &[f64]) -> HPolytope {
        let offsets = self
            .rows
            .iter()
            .zip(&self.offsets)
            .map(|(row, &bi)| bi + dot(row, t))
            .collect();
        HPolytope {
            rows: self.rows.clone(),
            offsets,
            dim: self.dim,
        }
    }

    /// Image under the affine substitution `x = M y + t` (constraints pull
    /// back): `{y : (A M) y <= b - A t}`.
    pub fn substitute(&self, m: &SquareMatrix, t: &[f64]) -> HPolytope {
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut offsets = Vec::with_capacity(self.rows.len());
        for (row, &bi) in self.rows.iter().zip(&self.offsets) {
            let rv = DVector::from_column_slice(row);
            let new_row = (rv.transpose() * m).transpose();
            rows.push(new_row.iter().copied().collect());
            offsets.push(bi - dot(row, t));
        }
        HPolytope {
            rows,
            offsets,
            dim: self.dim,
        }
    }
}

/// Vertex polytope: the convex hull of a nonempty point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VPolytopeRepr", into = "VPolytopeRepr")]
pub struct VPolytope {
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct VPolytopeRepr {
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<VPolytopeRepr> for VPolytope {
    type Error = GeometryError;
    fn try_from(r: VPolytopeRepr) -> Result<Self, Self::Error> {
        VPolytope::new(r.vertices)
    }
}

impl From<VPolytope> for VPolytopeRepr {
    fn from(p: VPolytope) -> Self {
        VPolytopeRepr {
            vertices: p.vertices,
        }
    }
}

impl VPolytope {
    /// Deduplicates within `GEOM_TOL`; interior-point removal is a separate
    /// pass ([`VPolytope::without_interior_points`]).
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyInput("vertex list"));
        }
        let dim = points[0].len();
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if !vertices.iter().any(|q| dist(q, &p) <= GEOM_TOL) {
                vertices.push(p);
            }
        }
        Ok(VPolytope { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn scaled(&self, s: f64) -> VPolytope {
        VPolytope {
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| x * s).collect())
                .collect(),
        }
    }

    /// Drop points lying in the convex hull of the others.
    pub fn without_interior_points(&self) -> VPolytope {
        if self.vertices.len() <= 1 {
            return self.clone();
        }
        let mut keep: Vec<Vec<f64>> = Vec::new();
        for i in 0..self.vertices.len() {
            let others: Vec<Vec<f64>> = self
                .vertices
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            let hull = VPolytope { vertices: others };
            if !hull.contains_point(&self.vertices[i], GEOM_TOL) {
                keep.push(self.vertices[i].clone());
            }
        }
        if keep.is_empty() {
            // All points coincide within tolerance.
            keep.push(self.vertices[0].clone());
        }
        VPolytope { vertices: keep }
    }

    /// Convex-combination membership, decided by an LP feasibility probe.
    pub fn contains_point(&self, p: &[f64], tol: f64) -> bool {
        let n = self.vertices.len();
        let d = self.dim();
        // Variables: barycentric weights. lambda_i >= 0, sum = 1, sum l_i v_i = p.
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 2 + 2 * d);
        let mut b: Vec<f64> = Vec::with_capacity(n + 2 + 2 * d);
        for i in 0..n {
            let mut r = vec![0.0; n];
            r[i] = -1.0;
            rows.push(r);
            b.push(0.0);
        }
        rows.push(vec![1.0; n]);
        b.push(1.0 + tol);
        rows.push(vec![-1.0; n]);
        b.push(-(1.0 - tol));
        for k in 0..d {
            let coef: Vec<f64> = self.vertices.iter().map(|v| v[k]).collect();
            rows.push(coef.clone());
            b.push(p[k] + tol);
            rows.push(coef.iter().map(|c| -c).collect());
            b.push(-(p[k] - tol));
        }
        let objective = vec![0.0; n];
        matches!(
            lp::solve(&LpProblem {
                objective: &objective,
                rows: &rows,
                b: &b,
            }),
            Ok(LpSolution::Optimal { .. })
        )
    }

    /// Support value `max_v <v, u>` of the hull.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Unit direction on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl TryFrom<Vec<f64>> for Direction {
    type Error = GeometryError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    /// Requires `||u|| = 1` within `UNIT_TOL`.
    pub fn new(u: Vec<f64>) -> Result<Self, GeometryError> {
        let n = norm(&u);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotNormalizable(n));
        }
        Ok(Direction(u))
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalize(u: &[f64]) -> Result<Self, GeometryError> {
        let n = norm(u);
        if n <= UNIT_TOL {
            return Err(GeometryError::NotNormalizable(n));
        }
        Ok(Direction(u.iter().map(|x| x / n).collect()))
    }

    pub fn axis(dim: usize, i: usize) -> Self {
        let mut u = vec![0.0; dim];
        u[i] = 1.0;
        Direction(u)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn negated(&self) -> Direction {
        Direction(self.0.iter().map(|x| -x).collect())
    }
}

/// Region between two parallel hyperplanes `alpha <= <x,u> <= beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub normal: Direction,
    pub lower: f64,
    pub upper: f64,
}

impl Strip {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() <= UNIT_TOL
    }

    /// The central parallel hyperplane, as `(normal, offset)`.
    pub fn midplane(&self) -> (Direction, f64) {
        (self.normal.clone(), 0.5 * (self.lower + self.upper))
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Outcome of `maximize <objective, x>` over a polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { point: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

pub fn solve_lp(objective: &[f64], p: &HPolytope) -> Result<LpOutcome, GeometryError> {
    if objective.len() != p.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: p.dim(),
            got: objective.len(),
        });
    }
    let sol = lp::solve(&LpProblem {
        objective,
        rows: &p.rows,
        b: &p.offsets,
    })?;
    Ok(match sol {
        LpSolution::Optimal { point, value } => LpOutcome::Optimal { point, value },
        LpSolution::Unbounded => LpOutcome::Unbounded,
        LpSolution::Infeasible => LpOutcome::Infeasible,
    })
}

/// Support value `h_P(u) = max { <u,x> : x in P }`.
pub fn support(p: &HPolytope, u: &Direction) -> Result<f64, GeometryError> {
    match solve_lp(u.coords(), p)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Unbounded => Err(GeometryError::UnboundedDirection),
        LpOutcome::Infeasible => Err(GeometryError::Infeasible),
    }
}

/// Width in direction `u`: `h_P(u) + h_P(-u)`.
pub fn width(p: &HPolytope, u: &Direction) -> Result<f64, GeometryError> {
    Ok(support(p, u)? + support(p, &u.negated())?)
}

/// The supporting strip of `P` with normal `u`; both boundary hyperplanes
/// touch `P`. Zero-width output is legal and flagged via `is_degenerate`.
pub fn supporting_strip(p: &HPolytope, u: &Direction) -> Result<Strip, GeometryError> {
    let beta = support(p, u)?;
    let alpha = -support(p, &u.negated())?;
    Ok(Strip {
        normal: u.clone(),
        lower: alpha,
        upper: beta,
    })
}

/// Concatenate constraint systems; no redundancy removal.
pub fn intersect(ps: &[HPolytope]) -> Result<HPolytope, GeometryError> {
    if ps.is_empty() {
        return Err(GeometryError::EmptyInput("polytope list"));
    }
    let dim = ps[0].dim();
    let mut rows = Vec::new();
    let mut offsets = Vec::new();
    for p in ps {
        if p.dim() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        rows.extend(p.rows.iter().cloned());
        offsets.extend(p.offsets.iter().copied());
    }
    Ok(HPolytope { rows, offsets, dim })
}

/// All vertices by basis enumeration with a feasibility filter (`d <= 3`).
pub fn vertices(p: &HPolytope) -> Result<VPolytope, GeometryError> {
    let d = p.dim();
    if d > MAX_EXACT_DIM {
        return Err(GeometryError::UnsupportedDimension {
            dim: d,
            max: MAX_EXACT_DIM,
        });
    }
    if !p.is_feasible() {
        return Err(GeometryError::Infeasible);
    }
    if !p.is_bounded() {
        return Err(GeometryError::Unbounded);
    }
    let m = p.num_rows();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut subset = vec![0usize; d];
    enumerate_subsets(m, d, &mut subset, 0, 0, &mut |idx: &[usize]| {
        let mut mat = DMatrix::<f64>::zeros(d, d);
        let mut rhs = DVector::<f64>::zeros(d);
        let mut scale = 1.0f64;
        for (r, &i) in idx.iter().enumerate() {
            let rn = norm(&p.rows[i]);
            scale *= rn;
            for c in 0..d {
                mat[(r, c)] = p.rows[i][c];
            }
            rhs[r] = p.offsets[i];
        }
        let det = mat.clone().determinant();
        if det.abs() <= 1e-9 * scale.max(1e-300) {
            return;
        }
        let lu = mat.lu();
        if let Some(x) = lu.solve(&rhs) {
            let xs: Vec<f64> = x.iter().copied().collect();
            let feasible = p
                .rows
                .iter()
                .zip(&p.offsets)
                .all(|(row, &bi)| dot(row, &xs) <= bi + GEOM_TOL * (1.0 + bi.abs()));
            if feasible && !found.iter().any(|q| dist(q, &xs) <= GEOM_TOL) {
                found.push(xs);
            }
        }
    });
    if found.is_empty() {
        return Err(GeometryError::Infeasible);
    }
    Ok(VPolytope { vertices: found })
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    subset: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(subset);
        return;
    }
    for i in start..n {
        subset[depth] = i;
        enumerate_subsets(n, k, subset, depth + 1, i + 1, f);
    }
}

/// Diameter of a bounded polytope. Exact (max pairwise vertex distance) at
/// `d <= 3`; a flagged sampled lower bound above that.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diameter {
    Exact(f64),
    SampledLowerBound(f64),
}

impl Diameter {
    pub fn value(&self) -> f64 {
        match self {
            Diameter::Exact(v) | Diameter::SampledLowerBound(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Diameter::Exact(_))
    }
}

pub fn diameter(p: &HPolytope) -> Result<Diameter, GeometryError> {
    let d = p.dim();
    if d <= MAX_EXACT_DIM {
        let vp = vertices(p)?;
        let vs = vp.vertices();
        let mut best = 0.0f64;
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                best = best.max(dist(&vs[i], &vs[j]));
            }
        }
        Ok(Diameter::Exact(best))
    } else {
        // Sampled width maximum; a lower bound on the true diameter.
        let dirs = crate::witness::deterministic_sphere_grid(d, 1024);
        let mut best = 0.0f64;
        for u in &dirs {
            let dir = Direction::normalize(u)?;
            best = best.max(width(p, &dir)?);
        }
        Ok(Diameter::SampledLowerBound(best))
    }
}

/// Polar `{y : <x,y> <= 1 for all x in X}`, one row per point.
pub fn polar(x: &VPolytope) -> HPolytope {
    HPolytope {
        rows: x.vertices.clone(),
        offsets: vec![1.0; x.vertices.len()],
        dim: x.dim(),
    }
}

/// Generator points `a_i / b_i` of the polar of an H-polytope containing the
/// origin in its interior (used by the bipolar checks).
pub fn polar_generators(p: &HPolytope) -> Result<VPolytope, GeometryError> {
    let mut points = Vec::with_capacity(p.num_rows());
    for (row, &bi) in p.rows.iter().zip(&p.offsets) {
        if bi <= UNIT_TOL {
            return Err(GeometryError::OriginNotInterior);
        }
        points.push(row.iter().map(|a| a / bi).collect());
    }
    VPolytope::new(points)
}

/// Minkowski gauge of `x` with respect to `K` (origin interior required):
/// `max_i <a_i, x> / b_i` clamped at zero.
pub fn gauge_norm(x: &[f64], k: &HPolytope) -> Result<f64, GeometryError> {
    if x.len() != k.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: k.dim(),
            got: x.len(),
        });
    }
    let mut value = 0.0f64;
    for (row, &bi) in k.rows.iter().zip(&k.offsets) {
        if bi <= UNIT_TOL {
            return Err(GeometryError::OriginNotInterior);
        }
        value = value.max(dot(row, x) / bi);
    }
    Ok(value)
}

/// Radius (and flag) of the largest origin-centered ball inside `P`:
/// `min_i b_i / ||a_i||`, reported as zero when the origin is outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InballRadius {
    pub radius: f64,
    pub origin_inside: bool,
}

pub fn inball_radius_centered(p: &HPolytope) -> InballRadius {
    let mut r = f64::INFINITY;
    for (row, &bi) in p.rows.iter().zip(&p.offsets) {
        r = r.min(bi / norm(row));
    }
    if p.rows.is_empty() {
        r = f64::INFINITY;
    }
    if r < 0.0 {
        InballRadius {
            radius: 0.0,
            origin_inside: false,
        }
    } else {
        InballRadius {
            radius: r,
            origin_inside: true,
        }
    }
}

/// Affine rank of a point set (dimension of the spanned affine subspace).
pub fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let d = points[0].len();
    let n = points.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, d);
    for (i, p) in points[1..].iter().enumerate() {
        for c in 0..d {
            m[(i, c)] = p[c] - points[0][c];
        }
    }
    m.rank(1e-9)
}

/// Facet enumeration of a full-dimensional hull at `d <= 3`: every
/// `d`-subset of points spanning a supporting hyperplane contributes a row.
pub fn facet_form(x: &VPolytope) -> Result<HPolytope, GeometryError> {
    let d = x.dim();
    if d > MAX_EXACT_DIM {
        return Err(GeometryError::UnsupportedDimension {
            dim: d,
            max: MAX_EXACT_DIM,
        });
    }
    let rank = affine_rank(x.vertices());
    if rank < d {
        return Err(GeometryError::DegenerateHull { rank, dim: d });
    }
    let vs = x.vertices();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut offsets: Vec<f64> = Vec::new();
    let mut push_candidate = |n: Vec<f64>, c: f64| {
        let nn = norm(&n);
        if nn <= UNIT_TOL {
            return;
        }
        let unit: Vec<f64> = n.iter().map(|v| v / nn).collect();
        let cu = c / nn;
        let supporting = vs.iter().all(|v| dot(&unit, v) <= cu + GEOM_TOL);
        if supporting
            && !rows
                .iter()
                .zip(&offsets)
                .any(|(r, &o)| dist(r, &unit) <= 1e-7 && (o - cu).abs() <= 1e-7)
        {
            rows.push(unit);
            offsets.push(cu);
        }
    };
    match d {
        1 => {
            let lo = vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            push_candidate(vec![1.0], hi);
            push_candidate(vec![-1.0], -lo);
        }
        2 => {
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    let e = [vs[j][0] - vs[i][0], vs[j][1] - vs[i][1]];
                    for sgn in [1.0, -1.0] {
                        let n = vec![sgn * e[1], -sgn * e[0]];
                        let c = dot(&n, &vs[i]);
                        push_candidate(n, c);
                    }
                }
            }
        }
        3 => {
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    for k in (j + 1)..vs.len() {
                        let a = [
                            vs[j][0] - vs[i][0],
                            vs[j][1] - vs[i][1],
                            vs[j][2] - vs[i][2],
                        ];
                        let b = [
                            vs[k][0] - vs[i][0],
                            vs[k][1] - vs[i][1],
                            vs[k][2] - vs[i][2],
                        ];
                        let cr = [
                            a[1] * b[2] - a[2] * b[1],
                            a[2] * b[0] - a[0] * b[2],
                            a[0] * b[1] - a[1] * b[0],
                        ];
                        for sgn in [1.0, -1.0] {
                            let n = vec![sgn * cr[0], sgn * cr[1], sgn * cr[2]];
                            let c = dot(&n, &vs[i]);
                            push_candidate(n, c);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    if rows.is_empty() {
        return Err(GeometryError::DegenerateHull { rank, dim: d });
    }
    Ok(HPolytope {
        rows,
        offsets,
        dim: d,
    })
}

/// Inradius of `conv(X)` about the origin; zero when the hull is degenerate
/// or the origin lies outside.
pub fn hull_inradius_origin(x: &VPolytope) -> f64 {
    let d = x.dim();
    let vs = x.vertices();
    match d {
        1 => {
            let lo = vs.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            (-lo).min(hi).max(0.0)
        }
        2 => {
            let hull = convex_hull_2d(vs);
            if hull.len() < 3 {
                return 0.0;
            }
            let mut r = f64::INFINITY;
            for i in 0..hull.len() {
                let p = &hull[i];
                let q = &hull[(i + 1) % hull.len()];
                let n = [q[1] - p[1], -(q[0] - p[0])];
                let nn = (n[0] * n[0] + n[1] * n[1]).sqrt();
                if nn <= UNIT_TOL {
                    continue;
                }
                let c = (n[0] * p[0] + n[1] * p[1]) / nn;
                if c < 0.0 {
                    return 0.0;
                }
                r = r.min(c);
            }
            if r.is_finite() {
                r
            } else {
                0.0
            }
        }
        3 => match facet_form(x) {
            Ok(h) => {
                let ib = inball_radius_centered(&h);
                if ib.origin_inside {
                    ib.radius
                } else {
                    0.0
                }
            }
            Err(_) => 0.0,
        },
        _ => panic!("hull_inradius_origin supports d <= 3"),
    }
}

/// Andrew's monotone chain; returns the hull in counter-clockwise order.
pub fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a[1].partial_cmp(&b[1]).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup_by(|a, b| dist(a, b) < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64], a: &[f64], b: &[f64]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Small vector helpers shared across the crate
// ---------------------------------------------------------------------------

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
