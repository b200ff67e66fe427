//! Best-ellipsoidal-minorant solver: the maximal-integral position of the
//! profile below a given log-concave function, with a contact-point
//! certificate fitted by nonnegative least squares.
//!
//! Multi-start projected ascent over (log height, log-Cholesky shape,
//! center); feasibility enforced by a grid-plus-refinement domination check
//! over the candidate's base ellipsoid. A certified local optimum is the
//! global one (uniqueness of the solution), and runs whose certificate
//! residuals exceed the tolerance are flagged, not trusted.

use nalgebra::{DMatrix, DVector};

use super::{
    h_ball, integrate, BoundingBox, EllipsoidalFunction, LogConcaveError, LogConcaveFn,
    PositionTransform,
};
use crate::numerics::{maximize_pattern, nnls};
use crate::parallel;

#[derive(Debug, Clone, Copy)]
pub struct JohnSolverOptions {
    /// Multi-start count.
    pub starts: usize,
    /// Pattern-search evaluation budget per start.
    pub max_evals: usize,
    /// Feasibility grid points over the base box per axis.
    pub feas_grid: usize,
    /// Residual threshold above which the result is flagged uncertified.
    pub certificate_tol: f64,
}

impl Default for JohnSolverOptions {
    fn default() -> Self {
        JohnSolverOptions {
            starts: 4,
            max_evals: 900,
            feas_grid: 101,
            certificate_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnResiduals {
    pub identity: f64,
    pub height: f64,
    pub centroid: f64,
}

impl JohnResiduals {
    pub fn max(&self) -> f64 {
        self.identity.max(self.height).max(self.centroid)
    }
}

#[derive(Debug, Clone)]
pub struct JohnFunctionResult {
    pub g: EllipsoidalFunction,
    /// Contact points in the frame where `g` becomes the profile.
    pub contacts: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub residuals: JohnResiduals,
    pub certified: bool,
}

// Shape parameter packing (the height is eliminated analytically):
// d = 1 -> base endpoints [lo, hi], which nearly decouple the left and
// right contact branches of the inner ratio minimum, so axis probes track
// the optimum crease; d = 2 -> [ln l11, l21, ln l22, c1, c2] with the shape
// map L L^T from the lower-triangular factor.
fn unpack_shape(q: &[f64], d: usize, height: f64) -> EllipsoidalFunction {
    match d {
        1 => {
            let half = 0.5 * (q[1] - q[0]).max(1e-12);
            EllipsoidalFunction {
                height,
                map: DMatrix::from_element(1, 1, 1.0 / half),
                center: vec![0.5 * (q[0] + q[1])],
            }
        }
        2 => {
            let l11 = q[0].exp();
            let l21 = q[1];
            let l22 = q[2].exp();
            let l = nalgebra::dmatrix![l11, 0.0; l21, l22];
            let map = &l * l.transpose();
            EllipsoidalFunction {
                height,
                map,
                center: vec![q[3], q[4]],
            }
        }
        _ => unreachable!(),
    }
}

fn log_det_map(q: &[f64], d: usize) -> f64 {
    match d {
        1 => -(0.5 * (q[1] - q[0]).max(1e-12)).ln(),
        2 => 2.0 * (q[0] + q[2]),
        _ => unreachable!(),
    }
}

fn shape_params_valid(q: &[f64], d: usize) -> bool {
    match d {
        1 => q[1] - q[0] > 1e-9,
        _ => true,
    }
}

/// Largest height making the base-shape candidate fit under `f`: the exact
/// minimum of `f / profile` over the open base, by grid scan, an explicit
/// patrol of the base-edge annulus (where a support mismatch hides between
/// grid points), and local refinement of the smallest ratios. Zero when `f`
/// vanishes inside the base.
fn height_limit(
    q: &[f64],
    d: usize,
    f: &LogConcaveFn,
    grid_per_axis: usize,
    top_k: usize,
    refine_budget: usize,
) -> (f64, Vec<f64>) {
    let unit = unpack_shape(q, d, 1.0);
    let bbox = unit.base_box();
    let total = match d {
        1 => grid_per_axis,
        _ => grid_per_axis * grid_per_axis,
    };
    let ratio = |x: &[f64]| -> f64 {
        let h = unit.eval(x);
        if h <= 1e-9 {
            return f64::INFINITY;
        }
        f.eval(x) / h
    };
    let mut pts = bbox.grid(total);
    // Edge patrol: points at relative radii 1 - eps inside the base, where a
    // support mismatch can hide between grid points.
    let inv = unit
        .map
        .clone()
        .try_inverse()
        .expect("shape maps are nonsingular");
    let eps_ring = [1e-8, 1e-5, 1e-3, 1e-2, 3e-2];
    let ring_dirs: Vec<Vec<f64>> = match d {
        1 => vec![vec![1.0], vec![-1.0]],
        _ => (0..32)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
                vec![th.cos(), th.sin()]
            })
            .collect(),
    };
    for u in &ring_dirs {
        for &eps in &eps_ring {
            let x: Vec<f64> = (0..d)
                .map(|i| {
                    unit.center[i]
                        + (1.0 - eps) * (0..d).map(|j| inv[(i, j)] * u[j]).sum::<f64>()
                })
                .collect();
            pts.push(x);
        }
    }
    let mut top: Vec<(f64, usize)> = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        let val = ratio(x);
        if top.len() < top_k {
            top.push((val, i));
            top.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        } else if val < top[top_k - 1].0 {
            top[top_k - 1] = (val, i);
            top.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        }
    }
    let cell = bbox
        .hi
        .iter()
        .zip(&bbox.lo)
        .map(|(h, l)| (h - l) / grid_per_axis as f64)
        .fold(0.0f64, f64::max);
    let mut best = (top[0].0, pts[top[0].1].clone());
    for &(_, i) in &top {
        let (x, neg) = maximize_pattern(|x| -ratio(x), &pts[i], cell, 1e-10, refine_budget);
        if -neg < best.0 {
            best = (-neg, x);
        }
    }
    if !best.0.is_finite() {
        (0.0, best.1)
    } else {
        (best.0.max(0.0), best.1)
    }
}

/// Largest violation of `g <= f` over the base of `g`, by grid scan plus
/// local refinement of the top candidates.
pub(crate) fn max_violation(
    g: &EllipsoidalFunction,
    f: &LogConcaveFn,
    grid_per_axis: usize,
) -> f64 {
    let bbox = g.base_box();
    let d = g.dim();
    let total = match d {
        1 => grid_per_axis,
        _ => grid_per_axis * grid_per_axis,
    };
    let grid = bbox.grid(total);
    let v = |x: &[f64]| g.eval(x) - f.eval(x);
    let mut top: Vec<(f64, usize)> = Vec::with_capacity(3);
    let mut worst = f64::NEG_INFINITY;
    for (i, x) in grid.iter().enumerate() {
        let val = v(x);
        worst = worst.max(val);
        if top.len() < 3 {
            top.push((val, i));
            top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        } else if val > top[2].0 {
            top[2] = (val, i);
            top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        }
    }
    let cell = bbox
        .hi
        .iter()
        .zip(&bbox.lo)
        .map(|(h, l)| (h - l) / (grid_per_axis as f64))
        .fold(0.0f64, f64::max);
    for &(_, i) in &top {
        let (_, refined) = maximize_pattern(&v, &grid[i], cell, 1e-9, 200);
        worst = worst.max(refined);
    }
    worst
}

/// The maximal-integral ellipsoidal function below `f` (d <= 2), with the
/// fitted contact certificate.
pub fn john_function(
    f: &LogConcaveFn,
    opts: &JohnSolverOptions,
) -> Result<JohnFunctionResult, LogConcaveError> {
    let d = f.dim();
    if d > 2 {
        return Err(LogConcaveError::UnsupportedDimension { got: d, max: 2 });
    }
    let bbox = f.bounding_box().ok_or(LogConcaveError::UnboundedSupport)?;
    let (peak, fmax) = f.rough_max(&bbox);
    if fmax <= 0.0 {
        return Err(LogConcaveError::NotProper(
            "function vanishes on its bounding box".into(),
        ));
    }
    let span = bbox
        .hi
        .iter()
        .zip(&bbox.lo)
        .map(|(h, l)| h - l)
        .fold(0.0f64, f64::max);

    // Objective over the shape alone; the height is solved exactly inside.
    let coarse = |q: &[f64]| -> f64 {
        if !shape_params_valid(q, d) {
            return f64::NEG_INFINITY;
        }
        let (alpha, _) = height_limit(q, d, f, 41, 2, 80);
        if alpha <= 0.0 {
            f64::NEG_INFINITY
        } else {
            alpha.ln() - log_det_map(q, d)
        }
    };
    let fine = |q: &[f64]| -> f64 {
        if !shape_params_valid(q, d) {
            return f64::NEG_INFINITY;
        }
        let (alpha, _) = height_limit(q, d, f, opts.feas_grid, 4, 200);
        if alpha <= 0.0 {
            f64::NEG_INFINITY
        } else {
            alpha.ln() - log_det_map(q, d)
        }
    };
    let mid: Vec<f64> = bbox
        .lo
        .iter()
        .zip(&bbox.hi)
        .map(|(l, h)| 0.5 * (l + h))
        .collect();
    let radii = [span / 8.0, span / 3.0, span / 16.0, span / 2.0, span / 5.0, span / 12.0];
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for (k, &r) in radii.iter().take(opts.starts.max(1)).enumerate() {
        let c = if k % 2 == 0 { &peak } else { &mid };
        starts.push(match d {
            1 => vec![c[0] - r, c[0] + r],
            _ => vec![(1.0 / r).ln(), 0.0, (1.0 / r).ln(), c[0], c[1]],
        });
    }

    // Coarse multi-start, then one fine polish from the winner.
    let coarse_step = (span / 16.0).clamp(0.3, 10.0);
    let runs = parallel::map_slice(&starts, |q0| {
        crate::numerics::maximize_pattern_diag(&coarse, q0, coarse_step, 1e-3, opts.max_evals / 2)
    });
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (q, val) in runs {
        if val.is_finite() && best.as_ref().map_or(true, |(bv, _)| val > *bv) {
            best = Some((val, q));
        }
    }
    let (_, q_coarse) = best.ok_or_else(|| {
        LogConcaveError::NotProper("no feasible ellipsoidal candidate found".into())
    })?;
    // A second polish with a reset step schedule recovers the progress a
    // single shrinking schedule leaves on curved optimum creases.
    let (q, fine_val) = if q_coarse.len() == 2 {
        let (q1, _) =
            crate::numerics::maximize_pattern_compass2(&fine, &q_coarse, 0.1, 1e-5, opts.max_evals);
        crate::numerics::maximize_pattern_compass2(&fine, &q1, 3e-3, 2e-7, opts.max_evals)
    } else {
        let (q1, _) =
            crate::numerics::maximize_pattern_diag(&fine, &q_coarse, 0.02, 1e-5, opts.max_evals);
        crate::numerics::maximize_pattern_diag(&fine, &q1, 2e-3, 2e-7, opts.max_evals)
    };
    if !fine_val.is_finite() {
        return Err(LogConcaveError::NotProper(
            "polish lost feasibility".into(),
        ));
    }
    let (alpha, _) = height_limit(&q, d, f, opts.feas_grid, 4, 200);
    let mut g = unpack_shape(&q, d, alpha);

    // Safety shrink: the height limit came from a sampled minimum, so clear
    // any leftover violation exactly at its witness point.
    for _ in 0..12 {
        let viol = max_violation(&g, f, opts.feas_grid);
        if viol <= 1e-10 {
            break;
        }
        g.height *= 1.0 - (viol / g.height).min(0.5) - 1e-12;
    }

    let (mut contacts, mut weights, mut residuals) = fit_certificate(f, &g);
    // The pattern phases localize the optimum to ~1e-3; when both contacts
    // sit on smooth log-linear branches the stationarity system is closed,
    // and a Newton root polish reaches machine precision.
    if d == 1 && residuals.max() > 1e-7 && contacts.len() == 2 {
        if let Some(better) = newton_polish_1d(f, &g, &contacts) {
            if max_violation(&better, f, opts.feas_grid) <= 1e-9 {
                let (c2, w2, r2) = fit_certificate(f, &better);
                if r2.max() < residuals.max() && !c2.is_empty() {
                    g = better;
                    contacts = c2;
                    weights = w2;
                    residuals = r2;
                }
            }
        }
    }
    let certified = residuals.max() <= opts.certificate_tol;
    Ok(JohnFunctionResult {
        g,
        contacts,
        weights,
        residuals,
        certified,
    })
}

/// The locally active log-linear branch `exp(-(s x + t))` of `f` at `x`,
/// when the minimum passes through piecewise log-linear or constant parts.
fn active_log_linear_1d(f: &LogConcaveFn, x: f64) -> Option<(f64, f64)> {
    match f {
        LogConcaveFn::PolyLogLinear { pieces, domain, .. } => {
            // Stay clear of the domain boundary, where the branch is a hard
            // cutoff rather than a line.
            if !domain.contains(&[x], -1e-7) {
                return None;
            }
            let mut best: Option<(f64, f64)> = None;
            for p in pieces {
                let v = p.slope[0] * x + p.intercept;
                if best.map_or(true, |(s, t)| v > s * x + t) {
                    best = Some((p.slope[0], p.intercept));
                }
            }
            best
        }
        LogConcaveFn::Const { level, .. } => Some((0.0, -level.ln())),
        LogConcaveFn::Ellipsoidal(_) => None,
        LogConcaveFn::Min { children } => {
            let mut best: Option<(f64, &LogConcaveFn)> = None;
            for c in children {
                let v = c.eval(&[x]);
                if best.map_or(true, |(bv, _)| v < bv) {
                    best = Some((v, c));
                }
            }
            active_log_linear_1d(best?.1, x)
        }
    }
}

/// Solve the two-contact stationarity system at d = 1 by damped Newton on
/// `(ln height, ln a, center)`: each active branch must touch the scaled
/// profile, and the normalized contacts must satisfy `u1 u2 = -1/2`.
fn newton_polish_1d(
    f: &LogConcaveFn,
    g: &EllipsoidalFunction,
    contacts: &[Vec<f64>],
) -> Option<EllipsoidalFunction> {
    let a0 = g.map[(0, 0)];
    let c0 = g.center[0];
    let x1 = contacts[0][0] / a0 + c0;
    let x2 = contacts[1][0] / a0 + c0;
    let (s1, t1) = active_log_linear_1d(f, x1)?;
    let (s2, t2) = active_log_linear_1d(f, x2)?;
    if s1 * s2 >= 0.0 {
        return None; // needs one branch on each side
    }
    let touch_u = |sigma: f64| -> f64 {
        if sigma.abs() < 1e-14 {
            0.0
        } else {
            (-1.0 + (1.0 + 4.0 * sigma * sigma).sqrt()) / (2.0 * sigma)
        }
    };
    // Residual of the stationarity system at v = (ln alpha, ln a, c).
    let system = |v: &[f64]| -> Option<[f64; 3]> {
        let (la, lna, c) = (v[0], v[1], v[2]);
        let a = lna.exp();
        let mut us = [0.0f64; 2];
        let mut gres = [0.0f64; 2];
        for (i, &(s, t)) in [(s1, t1), (s2, t2)].iter().enumerate() {
            let sigma = s / a;
            let tau = t + s * c + la;
            let u = touch_u(sigma);
            if u.abs() >= 1.0 {
                return None;
            }
            let h = (1.0 - u * u).sqrt();
            gres[i] = sigma * u + tau + h.ln();
            us[i] = u;
        }
        Some([gres[0], gres[1], us[0] * us[1] + 0.5])
    };
    let mut v = vec![g.height.ln(), a0.ln(), c0];
    for _ in 0..40 {
        let r = system(&v)?;
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm < 1e-13 {
            break;
        }
        // Finite-difference Jacobian.
        let mut jac = DMatrix::<f64>::zeros(3, 3);
        let h = 1e-7;
        for j in 0..3 {
            let mut vp = v.clone();
            vp[j] += h;
            let rp = system(&vp)?;
            for i in 0..3 {
                jac[(i, j)] = (rp[i] - r[i]) / h;
            }
        }
        let rhs = DVector::from_column_slice(&r);
        let step = jac.lu().solve(&rhs)?;
        let mut damp = 1.0;
        loop {
            let cand: Vec<f64> = v.iter().zip(step.iter()).map(|(vi, si)| vi - damp * si).collect();
            match system(&cand) {
                Some(rc) => {
                    let nc = (rc[0] * rc[0] + rc[1] * rc[1] + rc[2] * rc[2]).sqrt();
                    if nc < norm || damp < 1e-4 {
                        v = cand;
                        break;
                    }
                }
                None => {}
            }
            damp *= 0.5;
            if damp < 1e-6 {
                return None;
            }
        }
    }
    let r = system(&v)?;
    if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt() > 1e-10 {
        return None;
    }
    EllipsoidalFunction::new(
        v[0].exp(),
        DMatrix::from_element(1, 1, v[1].exp()),
        vec![v[2]],
    )
    .ok()
}

/// Contact detection in the normalized frame plus NNLS weight fitting for
/// the identity, height and centroid blocks.
fn fit_certificate(
    f: &LogConcaveFn,
    g: &EllipsoidalFunction,
) -> (Vec<Vec<f64>>, Vec<f64>, JohnResiduals) {
    let d = g.dim();
    let t = PositionTransform::normalizing(g);
    let tf = t.apply(f);
    let gap = |u: &[f64]| tf.eval(u) - h_ball(u);

    // Scan strictly inside the unit ball.
    let margin = 1e-6;
    let scan: Vec<Vec<f64>> = match d {
        1 => (0..2001)
            .map(|k| vec![-1.0 + margin + (2.0 - 2.0 * margin) * k as f64 / 2000.0])
            .collect(),
        _ => {
            let mut pts = Vec::new();
            let n_r = 40;
            let n_th = 80;
            pts.push(vec![0.0, 0.0]);
            for i in 1..=n_r {
                let r = (1.0 - margin) * i as f64 / n_r as f64;
                for j in 0..n_th {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / n_th as f64;
                    pts.push(vec![r * th.cos(), r * th.sin()]);
                }
            }
            pts
        }
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for u in &scan {
        if gap(u) <= 3e-4 {
            // Refine the contact location.
            let (refined, neg_gap) = maximize_pattern(|x| -gap(x), u, 5e-3, 1e-10, 300);
            if -neg_gap <= 1e-4 {
                let clamped = super::clamp_contact(&refined);
                if !candidates
                    .iter()
                    .any(|c| crate::geometry::dist(c, &clamped) <= 1e-2)
                {
                    candidates.push(clamped);
                }
            }
        }
    }
    if candidates.is_empty() {
        return (
            Vec::new(),
            Vec::new(),
            JohnResiduals {
                identity: f64::INFINITY,
                height: f64::INFINITY,
                centroid: f64::INFINITY,
            },
        );
    }

    // Equations: d^2 identity entries, one height row, d centroid rows.
    let rows = d * d + 1 + d;
    let mut a = DMatrix::<f64>::zeros(rows, candidates.len());
    let mut b = DVector::<f64>::zeros(rows);
    for i in 0..d {
        b[i * d + i] = 1.0;
    }
    b[d * d] = 1.0;
    for (j, u) in candidates.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                a[(r * d + c, j)] = u[r] * u[c];
            }
            a[(d * d + 1 + r, j)] = u[r];
        }
        let val = tf.eval(u);
        a[(d * d, j)] = val * val;
    }
    let w = nnls(&a, &b, 300);
    let resid = &a * &w - &b;
    let identity = (0..d * d)
        .map(|i| resid[i] * resid[i])
        .sum::<f64>()
        .sqrt();
    let height = resid[d * d].abs();
    let centroid = (0..d)
        .map(|i| resid[d * d + 1 + i] * resid[d * d + 1 + i])
        .sum::<f64>()
        .sqrt();

    let mut contacts = Vec::new();
    let mut weights = Vec::new();
    for (j, u) in candidates.iter().enumerate() {
        if w[j] > 1e-9 {
            contacts.push(u.clone());
            weights.push(w[j]);
        }
    }
    (
        contacts,
        weights,
        JohnResiduals {
            identity,
            height,
            centroid,
        },
    )
}

/// `(integral(f) / integral(g))^{1/d}`; logged against the empirical slope
/// constant by the harness.
pub fn integral_ratio(
    f: &LogConcaveFn,
    g: &EllipsoidalFunction,
) -> Result<f64, LogConcaveError> {
    let ig = g.integral();
    if !(ig > 0.0) {
        return Err(LogConcaveError::ZeroJohnIntegral);
    }
    let fi = integrate(f, (1e-7 * ig).max(1e-12))?;
    Ok((fi.value / ig).powf(1.0 / f.dim() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use crate::logconcave::{h_integral, pointwise_min, LogConcaveFn};

    #[test]
    fn profile_is_its_own_best_minorant() {
        let f = LogConcaveFn::profile(1);
        let r = john_function(&f, &JohnSolverOptions::default()).unwrap();
        assert!(
            (r.g.integral() - h_integral(1)).abs() < 2e-3,
            "integral {}",
            r.g.integral()
        );
        assert!(r.certified, "residuals {:?}", r.residuals);
        // Domination re-verification.
        for k in 0..10_000 {
            let x = [-1.2 + 2.4 * k as f64 / 9999.0];
            assert!(r.g.eval(&x) <= f.eval(&x) + 1e-7);
        }
    }

    #[test]
    fn plateau_fit_matches_parameter_grid_oracle() {
        // Indicator-like: constant one on [-1, 1].
        let f = LogConcaveFn::plateau(1.0, HPolytope::centered_cube(1, 1.0)).unwrap();
        let r = john_function(&f, &JohnSolverOptions::default()).unwrap();

        // Brute-force oracle over (height, map, center).
        let mut best = 0.0f64;
        let n = 40;
        for ih in 1..=n {
            let h = ih as f64 / n as f64;
            for ia in 1..=n {
                let a = 0.5 + 1.5 * ia as f64 / n as f64;
                for ic in 0..=n {
                    let c = -0.5 + ic as f64 / n as f64;
                    // feasibility: support [c - 1/a, c + 1/a] inside [-1,1],
                    // height below one.
                    if h <= 1.0 && c - 1.0 / a >= -1.0 && c + 1.0 / a <= 1.0 {
                        best = best.max(h / a * h_integral(1));
                    }
                }
            }
        }
        assert!(
            r.g.integral() >= best - 1e-3,
            "solver {} vs oracle {best}",
            r.g.integral()
        );
        // Analytic optimum: height one, base exactly [-1, 1].
        assert!((r.g.integral() - h_integral(1)).abs() < 2e-3);
    }

    #[test]
    fn min_of_position_and_clamp_beats_grid_oracle() {
        let two_profile = crate::logconcave::EllipsoidalFunction {
            height: 2.0,
            map: nalgebra::DMatrix::identity(1, 1) * 0.9,
            center: vec![0.1],
        };
        let f = pointwise_min(vec![
            LogConcaveFn::Ellipsoidal(two_profile),
            LogConcaveFn::Const {
                level: 1.0,
                bbox: crate::logconcave::BoundingBox::cube(1, 3.0),
            },
        ])
        .unwrap();
        let r = john_function(&f, &JohnSolverOptions::default()).unwrap();

        let mut best = 0.0f64;
        let n = 36;
        for ih in 1..=n {
            let h = ih as f64 / n as f64;
            for ia in 1..=n {
                let a = 0.4 + 2.0 * ia as f64 / n as f64;
                for ic in 0..=n {
                    let c = -0.6 + 1.4 * ic as f64 / n as f64;
                    let g = crate::logconcave::EllipsoidalFunction {
                        height: h,
                        map: nalgebra::DMatrix::from_element(1, 1, a),
                        center: vec![c],
                    };
                    if super::max_violation(&g, &f, 161) <= 1e-9 {
                        best = best.max(g.integral());
                    }
                }
            }
        }
        assert!(
            r.g.integral() >= best - 1e-3,
            "solver {} vs oracle {best}",
            r.g.integral()
        );
    }

    #[test]
    fn solver_output_stays_below_f_everywhere() {
        let f = pointwise_min(vec![
            LogConcaveFn::poly_log_linear(
                vec![
                    crate::logconcave::LogLinearPiece {
                        slope: vec![1.1],
                        intercept: -0.4,
                    },
                    crate::logconcave::LogLinearPiece {
                        slope: vec![-0.9],
                        intercept: -0.2,
                    },
                ],
                HPolytope::centered_cube(1, 8.0),
                None,
            )
            .unwrap(),
            LogConcaveFn::Const {
                level: 1.3,
                bbox: crate::logconcave::BoundingBox::cube(1, 8.0),
            },
        ])
        .unwrap();
        let r = john_function(&f, &JohnSolverOptions::default()).unwrap();
        let bbox = r.g.base_box();
        for k in 0..100_000 {
            let x = [bbox.lo[0] + (bbox.hi[0] - bbox.lo[0]) * k as f64 / 99_999.0];
            assert!(r.g.eval(&x) <= f.eval(&x) + 1e-7);
        }
    }

    #[test]
    fn ratio_examples() {
        let f = LogConcaveFn::profile(1);
        let g = crate::logconcave::EllipsoidalFunction::height_profile(1);
        let ratio = integral_ratio(&f, &g).unwrap();
        assert!((ratio - 1.0).abs() < 1e-6);

        let plateau = LogConcaveFn::plateau(1.0, HPolytope::centered_cube(1, 1.0)).unwrap();
        let r = john_function(&plateau, &JohnSolverOptions::default()).unwrap();
        let ratio = integral_ratio(&plateau, &r.g).unwrap();
        assert!(ratio.is_finite() && ratio >= 1.0 - 1e-9);
        // Analytic: 2 / (pi/2).
        assert!((ratio - 4.0 / std::f64::consts::PI).abs() < 5e-3);
    }

    #[test]
    fn two_dimensional_profile_fit() {
        let f = LogConcaveFn::profile(2);
        let opts = JohnSolverOptions {
            starts: 3,
            max_evals: 1600,
            feas_grid: 41,
            certificate_tol: 1e-3,
        };
        let r = john_function(&f, &opts).unwrap();
        assert!(
            (r.g.integral() - h_integral(2)).abs() < 0.05 * h_integral(2),
            "integral {}",
            r.g.integral()
        );
    }
}
