//! John (maximum-volume inscribed) and Lowner (minimum-volume enclosing)
//! ellipsoids with decomposition-of-identity contact certificates.
//!
//! One multiplicative-weight core solves both problems: the enclosing
//! ellipsoid works on lifted points, the inscribed one on the polar
//! generators of the (re-centered) halfspace system, with an outer
//! fixed-point search over the center for non-symmetric bodies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{affine_rank, dist, dot, norm, GeometryError, HPolytope, VPolytope};
use crate::numerics::{maximize_pattern, spd_inv_sqrt, spd_sqrt, symmetry_defect};
use crate::parallel;

/// Iteration cap for the multiplicative-weight loop.
pub const MVEE_MAX_ITERS: usize = 100_000;
/// Relative step tolerance that ends the loop early.
pub const MVEE_STEP_TOL: f64 = 1e-12;
/// Primal optimality tolerance (relative slack of the KKT values).
pub const MVEE_KKT_TOL: f64 = 1e-9;
/// Contact points must sit this close to the ellipsoid boundary.
pub const CONTACT_BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EllipsoidError {
    #[error("points span an affine subspace of dimension {rank} < {dim}")]
    DegenerateSpan { rank: usize, dim: usize },
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("shape matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `{x : (x - center)^T shape (x - center) <= 1}` with SPD `shape`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EllipsoidRepr", into = "EllipsoidRepr")]
pub struct Ellipsoid {
    center: Vec<f64>,
    shape: DMatrix<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct EllipsoidRepr {
    center: Vec<f64>,
    shape: Vec<Vec<f64>>,
}

impl TryFrom<EllipsoidRepr> for Ellipsoid {
    type Error = EllipsoidError;
    fn try_from(r: EllipsoidRepr) -> Result<Self, Self::Error> {
        let d = r.center.len();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for (i, row) in r.shape.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ellipsoid::new(r.center, m)
    }
}

impl From<Ellipsoid> for EllipsoidRepr {
    fn from(e: Ellipsoid) -> Self {
        let d = e.center.len();
        let shape = (0..d)
            .map(|i| (0..d).map(|j| e.shape[(i, j)]).collect())
            .collect();
        EllipsoidRepr {
            center: e.center,
            shape,
        }
    }
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self, EllipsoidError> {
        if symmetry_defect(&shape) > 1e-10 {
            return Err(EllipsoidError::NotPositiveDefinite);
        }
        let eig = shape.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(EllipsoidError::NotPositiveDefinite);
        }
        Ok(Ellipsoid { center, shape })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Ellipsoid {
            center: vec![0.0; dim],
            shape: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// Quadratic form value `(x-c)^T M (x-c)`.
    pub fn level(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let v = DVector::from_iterator(d, (0..d).map(|i| x[i] - self.center[i]));
        (v.transpose() * &self.shape * &v)[(0, 0)]
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.level(x) <= 1.0 + tol
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) / self.shape.determinant().sqrt()
    }

    /// Point `center + r * M^{-1/2} s` for a unit vector `s`.
    pub fn boundary_point(&self, s: &[f64], r: f64) -> Vec<f64> {
        let d = self.dim();
        let inv_sqrt = spd_inv_sqrt(&self.shape);
        let v = &inv_sqrt * DVector::from_column_slice(s);
        (0..d).map(|i| self.center[i] + r * v[i]).collect()
    }
}

/// Volume of the Euclidean unit ball, by the two-step recurrence.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / (dim as f64) * unit_ball_volume(dim - 2),
    }
}

/// Contact points and positive weights witnessing ellipsoid optimality:
/// `sum c_i u_i (x) u_i = Id` and `sum c_i u_i = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactCertificate {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Frobenius and Euclidean residuals of the decomposition identities.
pub fn verify_decomposition(cert: &ContactCertificate) -> (f64, f64) {
    if cert.points.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let d = cert.points[0].len();
    let mut sum = DMatrix::<f64>::zeros(d, d);
    let mut centroid = DVector::<f64>::zeros(d);
    for (p, &w) in cert.points.iter().zip(&cert.weights) {
        let v = DVector::from_column_slice(p);
        sum += w * &v * v.transpose();
        centroid += w * v;
    }
    let id = DMatrix::<f64>::identity(d, d);
    ((sum - id).norm(), centroid.norm())
}

// ---------------------------------------------------------------------------
// Multiplicative-weight core
// ---------------------------------------------------------------------------

/// Maximum point dimension handled by the stack-allocated kernel (lifted
/// points at d = 3 need k = 4; slack for experimentation).
const MVEE_MAX_K: usize = 8;

/// In-place inverse of a k x k matrix by Gauss-Jordan with partial pivoting.
/// Returns false when a pivot degenerates.
fn invert_small(a: &mut [f64], inv: &mut [f64], k: usize) -> bool {
    for i in 0..k {
        for j in 0..k {
            inv[i * k + j] = if i == j { 1.0 } else { 0.0 };
        }
    }
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if a[r * k + col].abs() > a[piv * k + col].abs() {
                piv = r;
            }
        }
        if a[piv * k + col].abs() < 1e-300 {
            return false;
        }
        if piv != col {
            for j in 0..k {
                a.swap(col * k + j, piv * k + j);
                inv.swap(col * k + j, piv * k + j);
            }
        }
        let p = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= p;
            inv[col * k + j] /= p;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f != 0.0 {
                for j in 0..k {
                    a[r * k + j] -= f * a[col * k + j];
                    inv[r * k + j] -= f * inv[col * k + j];
                }
            }
        }
    }
    true
}

/// Frank-Wolfe with away steps on `max log det sum_i u_i q_i q_i^T` over the
/// simplex. At the optimum the KKT values `q^T X^{-1} q` equal `k` on the
/// support. `points` is row-major `n x k`; `warm` optionally seeds the
/// weights (same length) for fast re-solves under small data perturbations.
fn mvee_weights(points: &[f64], n: usize, k: usize, kkt_tol: f64, warm: Option<&[f64]>) -> Vec<f64> {
    assert!(k <= MVEE_MAX_K && n > 0);
    let kf = k as f64;
    let mut u = match warm {
        Some(w) if w.len() == n && w.iter().all(|&v| v >= 0.0) && w.iter().sum::<f64>() > 0.0 => {
            let total: f64 = w.iter().sum();
            // Zeroed coordinates re-enter through add steps when needed.
            w.iter().map(|&v| v / total).collect::<Vec<f64>>()
        }
        _ => vec![1.0 / n as f64; n],
    };
    let mut x = [0.0f64; MVEE_MAX_K * MVEE_MAX_K];
    let mut xwork = [0.0f64; MVEE_MAX_K * MVEE_MAX_K];
    let mut xinv = [0.0f64; MVEE_MAX_K * MVEE_MAX_K];
    let mut tmp = [0.0f64; MVEE_MAX_K];

    let rebuild = |u: &[f64], x: &mut [f64]| {
        for v in x.iter_mut().take(k * k) {
            *v = 0.0;
        }
        for (i, &w) in u.iter().enumerate() {
            if w > 0.0 {
                let q = &points[i * k..(i + 1) * k];
                for r in 0..k {
                    for c in 0..k {
                        x[r * k + c] += w * q[r] * q[c];
                    }
                }
            }
        }
    };
    rebuild(&u, &mut x);

    for iter in 0..MVEE_MAX_ITERS {
        if iter > 0 && iter % 256 == 0 {
            let total: f64 = u.iter().sum();
            for w in u.iter_mut() {
                *w /= total;
            }
            rebuild(&u, &mut x);
        }
        xwork[..k * k].copy_from_slice(&x[..k * k]);
        if !invert_small(&mut xwork[..k * k], &mut xinv[..k * k], k) {
            rebuild(&u, &mut x);
            xwork[..k * k].copy_from_slice(&x[..k * k]);
            if !invert_small(&mut xwork[..k * k], &mut xinv[..k * k], k) {
                break;
            }
        }
        let mut g_max = f64::NEG_INFINITY;
        let mut g_min = f64::INFINITY;
        let mut i_max = 0;
        let mut i_min = 0;
        for i in 0..n {
            let q = &points[i * k..(i + 1) * k];
            for r in 0..k {
                let mut s = 0.0;
                for c in 0..k {
                    s += xinv[r * k + c] * q[c];
                }
                tmp[r] = s;
            }
            let mut g = 0.0;
            for r in 0..k {
                g += q[r] * tmp[r];
            }
            if g > g_max {
                g_max = g;
                i_max = i;
            }
            if u[i] > 0.0 && g < g_min {
                g_min = g;
                i_min = i;
            }
        }
        let add_gap = g_max - kf;
        let away_gap = kf - g_min;
        if add_gap <= kf * kkt_tol && away_gap <= kf * kkt_tol {
            break;
        }
        let (j, lambda, away, dropped) = if add_gap >= away_gap {
            let lam = add_gap / (kf * (g_max - 1.0));
            (i_max, lam.max(0.0), false, false)
        } else {
            let cap = u[i_min] / (1.0 - u[i_min]).max(1e-300);
            let lam = if g_min > 1.0 + 1e-14 {
                (away_gap / (kf * (g_min - 1.0))).min(cap)
            } else {
                cap
            };
            (i_min, lam.max(0.0), true, lam >= cap - 1e-300)
        };
        // Drop steps may legitimately be tiny; only a stalled interior step
        // signals convergence.
        if lambda.abs() < MVEE_STEP_TOL && !dropped {
            break;
        }
        let q = &points[j * k..(j + 1) * k];
        let (scale, rank1) = if away {
            (1.0 + lambda, -lambda)
        } else {
            (1.0 - lambda, lambda)
        };
        for w in u.iter_mut() {
            *w *= scale;
        }
        u[j] += rank1;
        if u[j] < 1e-15 {
            u[j] = 0.0;
        }
        for r in 0..k {
            for c in 0..k {
                x[r * k + c] = scale * x[r * k + c] + rank1 * q[r] * q[c];
            }
        }
    }
    let total: f64 = u.iter().sum();
    for w in u.iter_mut() {
        *w /= total;
    }
    u
}

fn flatten_points(points: &[DVector<f64>]) -> (Vec<f64>, usize, usize) {
    let n = points.len();
    let k = points[0].len();
    let mut flat = Vec::with_capacity(n * k);
    for p in points {
        flat.extend(p.iter().copied());
    }
    (flat, n, k)
}

// ---------------------------------------------------------------------------
// Lowner ellipsoid
// ---------------------------------------------------------------------------

/// Minimum-volume enclosing ellipsoid of a point set that affinely spans
/// `R^d`, with the converged barycentric weights (restricted to near-contact
/// points, scaled by `d`) as the certificate.
pub fn lowner_ellipsoid(
    points: &[Vec<f64>],
) -> Result<(Ellipsoid, ContactCertificate), EllipsoidError> {
    if points.is_empty() {
        return Err(EllipsoidError::DegenerateSpan { rank: 0, dim: 0 });
    }
    let d = points[0].len();
    let rank = affine_rank(points);
    if rank < d {
        return Err(EllipsoidError::DegenerateSpan { rank, dim: d });
    }
    let lifted: Vec<DVector<f64>> = points
        .iter()
        .map(|p| {
            DVector::from_iterator(d + 1, p.iter().copied().chain(std::iter::once(1.0)))
        })
        .collect();
    let (flat, n, k) = flatten_points(&lifted);
    let u = mvee_weights(&flat, n, k, MVEE_KKT_TOL, None);

    let mut center = DVector::<f64>::zeros(d);
    for (p, &w) in points.iter().zip(&u) {
        center += w * DVector::from_column_slice(p);
    }
    let mut scatter = DMatrix::<f64>::zeros(d, d);
    for (p, &w) in points.iter().zip(&u) {
        let v = DVector::from_column_slice(p) - &center;
        scatter += w * &v * v.transpose();
    }
    let scatter_inv = scatter
        .try_inverse()
        .ok_or(EllipsoidError::NotPositiveDefinite)?;
    let shape = scatter_inv / d as f64;
    let shape = 0.5 * (&shape + shape.transpose());
    let ellipsoid = Ellipsoid::new(center.iter().copied().collect(), shape.clone())?;

    let sqrt_shape = spd_sqrt(&shape);
    let mut cert_points = Vec::new();
    let mut cert_weights = Vec::new();
    for (p, &w) in points.iter().zip(&u) {
        if w <= 1e-9 {
            continue;
        }
        let v = &sqrt_shape * (DVector::from_column_slice(p) - &center);
        if (v.norm() - 1.0).abs() <= CONTACT_BOUNDARY_TOL {
            cert_points.push(v.iter().copied().collect());
            cert_weights.push(d as f64 * w);
        }
    }
    Ok((
        ellipsoid,
        ContactCertificate {
            points: cert_points,
            weights: cert_weights,
        },
    ))
}

// ---------------------------------------------------------------------------
// John ellipsoid
// ---------------------------------------------------------------------------

/// Centered subproblem: the maximum-volume origin-centered ellipsoid inside
/// `{x : <a_i, x> <= beta_i}` (all `beta_i > 0`) is the polar of the minimum
/// enclosing centered ellipsoid of the generators `a_i / beta_i`.
/// Returns `(shape M, weights)` with the inscribed body `{x^T M x <= 1}`.
fn centered_inscribed(
    rows: &[Vec<f64>],
    betas: &[f64],
    kkt_tol: f64,
    warm: Option<&[f64]>,
) -> Option<(DMatrix<f64>, Vec<f64>)> {
    let d = rows[0].len();
    if betas.iter().any(|&b| b <= 1e-12) {
        return None;
    }
    let n = rows.len();
    let mut flat = Vec::with_capacity(n * d);
    for (a, &b) in rows.iter().zip(betas) {
        flat.extend(a.iter().map(|v| v / b));
    }
    let u = mvee_weights(&flat, n, d, kkt_tol, warm);
    let mut x = DMatrix::<f64>::zeros(d, d);
    for (i, &w) in u.iter().enumerate() {
        if w > 0.0 {
            let q = DVector::from_column_slice(&flat[i * d..(i + 1) * d]);
            x += w * &q * q.transpose();
        }
    }
    let m = d as f64 * x;
    Some((0.5 * (&m + m.transpose()), u))
}

/// Chebyshev center: the center and radius of a largest inscribed ball.
pub fn chebyshev_center(p: &HPolytope) -> Result<(Vec<f64>, f64), EllipsoidError> {
    let d = p.dim();
    let mut rows = Vec::with_capacity(p.num_rows());
    for row in p.rows() {
        let mut r: Vec<f64> = row.clone();
        r.push(norm(row));
        rows.push(r);
    }
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    match crate::lp::solve(&crate::lp::LpProblem {
        objective: &objective,
        rows: &rows,
        b: p.offsets(),
    }) {
        Ok(crate::lp::LpSolution::Optimal { point, value }) => {
            Ok((point[..d].to_vec(), value))
        }
        Ok(crate::lp::LpSolution::Unbounded) => Err(EllipsoidError::Unbounded),
        Ok(crate::lp::LpSolution::Infeasible) => Err(EllipsoidError::EmptyInterior),
        Err(e) => Err(EllipsoidError::Geometry(e.into())),
    }
}

fn betas_at(p: &HPolytope, c: &[f64]) -> Vec<f64> {
    p.rows()
        .iter()
        .zip(p.offsets())
        .map(|(row, &bi)| bi - dot(row, c))
        .collect()
}

/// Maximum-volume inscribed ellipsoid of a bounded polytope with nonempty
/// interior, with facet-touch contact points and decomposition weights.
///
/// Origin-symmetric systems skip the center search. General bodies run a
/// shrinking pattern search over the center (the volume is concave in the
/// center, so the local search is global) followed by a fixed-point polish
/// that line-searches along the certificate's centroid-residual direction
/// until the decomposition residual passes.
pub fn john_ellipsoid(
    p: &HPolytope,
) -> Result<(Ellipsoid, ContactCertificate), EllipsoidError> {
    let d = p.dim();
    if !p.is_bounded() {
        return Err(EllipsoidError::Unbounded);
    }
    let (cheb, radius) = chebyshev_center(p)?;
    if radius <= 1e-10 {
        return Err(EllipsoidError::EmptyInterior);
    }

    use std::cell::RefCell;
    let warm: RefCell<Option<Vec<f64>>> = RefCell::new(None);
    let fit = |c: &[f64], tol: f64| -> Option<(DMatrix<f64>, Vec<f64>)> {
        let betas = betas_at(p, c);
        let warm_ref = warm.borrow().clone();
        let out = centered_inscribed(p.rows(), &betas, tol, warm_ref.as_deref());
        if let Some((_, w)) = &out {
            *warm.borrow_mut() = Some(w.clone());
        }
        out
    };
    let log_volume = |c: &[f64], tol: f64| -> f64 {
        match fit(c, tol) {
            Some((m, _)) => -0.5 * m.determinant().max(1e-300).ln(),
            None => f64::NEG_INFINITY,
        }
    };

    let mut center = vec![0.0; d];
    if !is_origin_symmetric(p) {
        let (c1, _) = maximize_pattern(
            |c| log_volume(c, 1e-8),
            &cheb,
            0.25 * radius,
            1e-5,
            1500,
        );
        center = c1;
        // Fixed-point polish. The volume is too flat near the optimum to
        // steer by value comparisons, but the certificate residual is linear
        // in the center error: step against the weighted contact centroid
        // with adaptive gain until the decomposition closes.
        let mut eta = 0.1 * radius;
        let mut current = certificate_at(p, &center, &fit);
        for _ in 0..200 {
            let Some(cur) = &current else { break };
            if cur.residual <= 1e-10 {
                break;
            }
            let dir = -(spd_inv_sqrt(&cur.shape) * &cur.centroid);
            let dn = dir.norm();
            if dn <= 1e-14 || eta <= 1e-14 {
                break;
            }
            let mut moved = false;
            for _ in 0..24 {
                let cand: Vec<f64> = center
                    .iter()
                    .zip(dir.iter())
                    .map(|(ci, di)| ci + eta * di / dn)
                    .collect();
                let next = certificate_at(p, &cand, &fit);
                if let Some(nx) = &next {
                    if nx.residual < cur.residual {
                        center = cand;
                        current = next;
                        eta *= 1.5;
                        moved = true;
                        break;
                    }
                }
                eta *= 0.5;
                if eta <= 1e-14 {
                    break;
                }
            }
            if !moved {
                break;
            }
        }
    }

    let snapshot =
        certificate_at(p, &center, &fit).ok_or(EllipsoidError::EmptyInterior)?;
    let ellipsoid = Ellipsoid::new(center.clone(), snapshot.shape.clone())?;
    Ok((
        ellipsoid,
        ContactCertificate {
            points: snapshot.points,
            weights: snapshot.weights,
        },
    ))
}

struct JohnSnapshot {
    shape: DMatrix<f64>,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// Centroid-block residual vector of the weight fit.
    centroid: DVector<f64>,
    /// Total least-squares residual of both identity blocks.
    residual: f64,
}

/// Solve the centered fit at `center`, collect near-touching facet
/// directions, and fit nonnegative decomposition weights to
/// `sum c u (x) u = Id`, `sum c u = 0` by NNLS.
fn certificate_at(
    p: &HPolytope,
    center: &[f64],
    fit: &impl Fn(&[f64], f64) -> Option<(DMatrix<f64>, Vec<f64>)>,
) -> Option<JohnSnapshot> {
    let d = p.dim();
    let (shape, weights) = fit(center, 1e-11)?;
    let betas = betas_at(p, center);
    let inv_sqrt = spd_inv_sqrt(&shape);
    // Generous candidate window; the NNLS zeroes spurious members and the
    // final contacts sharpen as the center converges.
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for (i, (row, &beta)) in p.rows().iter().zip(&betas).enumerate() {
        if beta <= 1e-12 {
            return None;
        }
        let q = DVector::from_column_slice(row) / beta;
        let v = &inv_sqrt * q;
        let vn = v.norm();
        if weights[i] > 1e-9 || (vn - 1.0).abs() <= 1e-4 {
            candidates.push(v / vn);
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let rows_eq = d * d + d;
    let mut a = DMatrix::<f64>::zeros(rows_eq, candidates.len());
    let mut b = DVector::<f64>::zeros(rows_eq);
    for i in 0..d {
        b[i * d + i] = 1.0;
    }
    for (j, v) in candidates.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                a[(r * d + c, j)] = v[r] * v[c];
            }
            a[(d * d + r, j)] = v[r];
        }
    }
    let w = crate::numerics::nnls(&a, &b, 200);
    let resid_vec = &a * &w - &b;
    let centroid = DVector::from_iterator(d, (0..d).map(|r| resid_vec[d * d + r]));
    let residual = resid_vec.norm();

    let mut points = Vec::new();
    let mut out_weights = Vec::new();
    for (j, v) in candidates.iter().enumerate() {
        if w[j] > 1e-9 {
            points.push(v.iter().copied().collect());
            out_weights.push(w[j]);
        }
    }
    Some(JohnSnapshot {
        shape,
        points,
        weights: out_weights,
        centroid,
        residual,
    })
}

fn is_origin_symmetric(p: &HPolytope) -> bool {
    let m = p.num_rows();
    let mut matched = vec![false; m];
    for i in 0..m {
        if matched[i] {
            continue;
        }
        let neg: Vec<f64> = p.rows()[i].iter().map(|x| -x).collect();
        let partner = (0..m).find(|&j| {
            j != i
                && !matched[j]
                && dist(&p.rows()[j], &neg) <= 1e-12
                && (p.offsets()[j] - p.offsets()[i]).abs() <= 1e-12
        });
        match partner {
            Some(j) => {
                matched[i] = true;
                matched[j] = true;
            }
            None => return false,
        }
    }
    true
}

/// Does the ellipsoid shrunk by the dimension factor about its center lie in
/// `conv(K)`? Checked by LP membership of seeded boundary samples.
pub fn check_lowner_inclusion(k: &VPolytope, e: &Ellipsoid) -> bool {
    let d = e.dim();
    let samples = crate::witness::deterministic_sphere_grid(d, 100 * d);
    let results = parallel::map_slice(&samples, |s| {
        let x = e.boundary_point(s, 1.0 / d as f64);
        k.contains_point(&x, 1e-7)
    });
    results.into_iter().all(|ok| ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;

    #[test]
    fn lowner_of_cross_polytope_is_unit_disk() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let (e, cert) = lowner_ellipsoid(&pts).unwrap();
        assert!(norm(e.center()) < 1e-7);
        assert!((e.shape() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-6);
        assert_eq!(cert.points.len(), 4);
        for w in &cert.weights {
            assert!((w - 0.5).abs() < 1e-6);
        }
        let (ri, rc) = verify_decomposition(&cert);
        assert!(ri < 1e-6 && rc < 1e-6);
    }

    #[test]
    fn lowner_of_inscribed_triangle_is_unit_circle() {
        let pts: Vec<Vec<f64>> = [0.25f64, 0.25 + 2.0 / 3.0, 0.25 + 4.0 / 3.0]
            .iter()
            .map(|t| {
                let th = t * std::f64::consts::PI;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let (e, cert) = lowner_ellipsoid(&pts).unwrap();
        assert!(norm(e.center()) < 1e-6);
        assert!((e.shape() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-5);
        let (ri, rc) = verify_decomposition(&cert);
        assert!(ri < 1e-5 && rc < 1e-5);
    }

    #[test]
    fn lowner_contains_all_points() {
        let pts = vec![
            vec![0.3, 0.1, -0.2],
            vec![-0.8, 0.5, 0.1],
            vec![0.2, -0.9, 0.4],
            vec![0.6, 0.7, 0.2],
            vec![-0.1, -0.3, -0.9],
            vec![0.9, -0.2, 0.5],
        ];
        let (e, _) = lowner_ellipsoid(&pts).unwrap();
        for p in &pts {
            assert!(e.level(p) <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn degenerate_span_is_reported() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        match lowner_ellipsoid(&pts) {
            Err(EllipsoidError::DegenerateSpan { rank: 1, dim: 2 }) => {}
            other => panic!("expected degenerate span, got {other:?}"),
        }
    }

    #[test]
    fn john_of_square_is_unit_disk_with_axis_contacts() {
        let p = HPolytope::centered_cube(2, 1.0);
        let (e, cert) = john_ellipsoid(&p).unwrap();
        assert!(norm(e.center()) < 1e-8);
        assert!((e.shape() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-7);
        assert_eq!(cert.points.len(), 4);
        for w in &cert.weights {
            assert!((w - 0.5).abs() < 1e-7);
        }
        let (ri, rc) = verify_decomposition(&cert);
        assert!(ri < 1e-6 && rc < 1e-6);
    }

    #[test]
    fn john_of_polygonal_disk_has_radius_one() {
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for k in 0..64 {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / 64.0;
            rows.push(vec![th.cos(), th.sin()]);
            b.push(1.0);
        }
        let p = HPolytope::new(rows, b).unwrap();
        let (e, _) = john_ellipsoid(&p).unwrap();
        // Inscribed-polygon oracle: radius must sit within the polygon's
        // inradius band [1, 1/cos(pi/64)].
        let eig = e.shape().clone().symmetric_eigen();
        for l in eig.eigenvalues.iter() {
            let radius = 1.0 / l.sqrt();
            assert!((radius - 1.0).abs() < 2e-3, "radius {radius}");
        }
    }

    #[test]
    fn john_is_affine_equivariant() {
        let p = HPolytope::new(
            vec![
                vec![1.0, 0.1],
                vec![-1.0, 0.2],
                vec![0.3, 1.0],
                vec![-0.2, -1.0],
                vec![1.0, 1.0],
            ],
            vec![1.0, 1.2, 0.9, 1.1, 1.5],
        )
        .unwrap();
        let (e, _) = john_ellipsoid(&p).unwrap();

        let l = nalgebra::dmatrix![1.4, 0.3; -0.2, 0.8];
        let t = [0.7, -0.4];
        let linv = l.clone().try_inverse().unwrap();
        let shift: Vec<f64> = (&linv * DVector::from_column_slice(&t))
            .iter()
            .map(|v| -v)
            .collect();
        let image = p.substitute(&linv, &shift);
        let (ei, _) = john_ellipsoid(&image).unwrap();

        let expected_center = &l * DVector::from_column_slice(e.center())
            + DVector::from_column_slice(&t);
        let expected_shape = linv.transpose() * e.shape() * &linv;
        assert!(
            (DVector::from_column_slice(ei.center()) - expected_center).norm() < 1e-5,
            "centers differ"
        );
        assert!((ei.shape() - expected_shape).norm() < 1e-5, "shapes differ");
    }

    #[test]
    fn shrunk_lowner_ball_lies_inside_inscribed_triangle() {
        // Equilateral triangle inscribed in the unit circle: inradius 1/2.
        let pts: Vec<Vec<f64>> = [0.5f64, 0.5 + 2.0 / 3.0, 0.5 + 4.0 / 3.0]
            .iter()
            .map(|t| {
                let th = t * std::f64::consts::PI;
                vec![th.cos(), th.sin()]
            })
            .collect();
        let tri = VPolytope::new(pts.clone()).unwrap();
        let (e, _) = lowner_ellipsoid(&pts).unwrap();
        assert!(check_lowner_inclusion(&tri, &e));
        let inradius = crate::geometry::hull_inradius_origin(&tri);
        assert!((inradius - 0.5).abs() < 1e-6);
    }

    #[test]
    fn square_in_circle_has_slack() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ];
        let square = VPolytope::new(pts.clone()).unwrap();
        let (e, _) = lowner_ellipsoid(&pts).unwrap();
        assert!(check_lowner_inclusion(&square, &e));
        let inradius = crate::geometry::hull_inradius_origin(&square);
        assert!(inradius > 0.5 + 0.1);
    }

    #[test]
    fn decomposition_residuals_of_hand_built_certificates() {
        let cert = ContactCertificate {
            points: vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            weights: vec![0.5; 4],
        };
        let (ri, rc) = verify_decomposition(&cert);
        assert!(ri == 0.0 && rc == 0.0);

        let cert = ContactCertificate {
            points: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            weights: vec![1.0, 1.0],
        };
        let (ri, rc) = verify_decomposition(&cert);
        assert!(ri.abs() < 1e-15);
        assert!((rc - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn john_volume_sandwich_on_a_polytope() {
        // vol(E) <= vol(P) <= d^d vol(E) at d = 2, Monte Carlo volume.
        let p = HPolytope::new(
            vec![
                vec![1.0, 0.4],
                vec![-0.9, 0.6],
                vec![-0.3, -1.0],
                vec![0.8, -0.7],
                vec![0.1, 1.0],
            ],
            vec![1.1, 0.8, 1.0, 1.2, 0.9],
        )
        .unwrap();
        let (e, _) = john_ellipsoid(&p).unwrap();
        let ve = e.volume();

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let verts = crate::geometry::vertices(&p).unwrap();
        let (mut lo, mut hi) = (vec![f64::INFINITY; 2], vec![f64::NEG_INFINITY; 2]);
        for v in verts.vertices() {
            for i in 0..2 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let box_vol = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let n = 100_000;
        let mut inside = 0usize;
        for _ in 0..n {
            let x = [
                rng.gen_range(lo[0]..hi[0]),
                rng.gen_range(lo[1]..hi[1]),
            ];
            if p.contains(&x, 0.0) {
                inside += 1;
            }
        }
        let vp = box_vol * inside as f64 / n as f64;
        assert!(ve <= vp * 1.02);
        assert!(vp <= 4.0 * ve * 1.02);
    }

    #[test]
    fn width_symmetry_sanity_via_direction_negation() {
        let p = HPolytope::centered_cube(2, 1.0);
        let u = Direction::normalize(&[0.3, 0.7]).unwrap();
        let w1 = crate::geometry::width(&p, &u).unwrap();
        let w2 = crate::geometry::width(&p, &u.negated()).unwrap();
        assert!((w1 - w2).abs() < 1e-12);
    }
}
