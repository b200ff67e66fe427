//! Numeric integration of log-concave representations: adaptive
//! Gauss-Kronrod in one dimension, iterated panels in two, Monte Carlo in
//! three. Pure ellipsoidal functions short-circuit to their closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BoundingBox, LogConcaveError, LogConcaveFn};

/// 15-point Kronrod abscissae (positive half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights (paired with the even Kronrod abscissae).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel: returns `(kronrod, |kronrod - gauss|)`.
fn gk15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive bisection on Gauss-Kronrod panels with a worst-panel-first
/// queue. Returns `(value, error_estimate)`.
pub fn adaptive_gk15<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_panels: usize,
) -> (f64, f64) {
    if hi <= lo {
        return (0.0, 0.0);
    }
    let (v, e) = gk15_panel(&f, lo, hi);
    let mut panels = vec![(lo, hi, v, e)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol || panels.len() >= max_panels {
            break;
        }
        let mut worst = 0usize;
        for (i, p) in panels.iter().enumerate() {
            if p.3 > panels[worst].3 {
                worst = i;
            }
        }
        let (a, b, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // Interval exhausted at machine precision.
            let (v, e) = gk15_panel(&f, a, b);
            panels.push((a, b, v, e * 0.0));
            continue;
        }
        let (v1, e1) = gk15_panel(&f, a, m);
        let (v2, e2) = gk15_panel(&f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
    let value = panels.iter().map(|p| p.2).sum();
    let err = panels.iter().map(|p| p.3).sum();
    (value, err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    /// False when the estimate failed to reach the requested tolerance.
    pub tol_met: bool,
}

/// Integrate over the declared bounding box. Ellipsoidal functions return
/// their closed form exactly; other shapes go through quadrature
/// (d = 1, 2) or seeded Monte Carlo (d = 3).
pub fn integrate(f: &LogConcaveFn, tol: f64) -> Result<IntegrationResult, LogConcaveError> {
    if let LogConcaveFn::Ellipsoidal(e) = f {
        return Ok(IntegrationResult {
            value: e.integral(),
            error_estimate: 0.0,
            tol_met: true,
        });
    }
    integrate_numeric(f, tol)
}

/// Always-numeric route (used to cross-check the closed forms).
pub fn integrate_numeric(
    f: &LogConcaveFn,
    tol: f64,
) -> Result<IntegrationResult, LogConcaveError> {
    let bbox = f.bounding_box().ok_or(LogConcaveError::UnboundedSupport)?;
    if bbox.is_empty() {
        return Ok(IntegrationResult {
            value: 0.0,
            error_estimate: 0.0,
            tol_met: true,
        });
    }
    match f.dim() {
        1 => {
            let (value, err) =
                adaptive_gk15(|x| f.eval(&[x]), bbox.lo[0], bbox.hi[0], tol, 4000);
            Ok(IntegrationResult {
                value,
                error_estimate: err,
                tol_met: err <= tol,
            })
        }
        2 => Ok(integrate_2d(f, &bbox, tol)),
        3 => Ok(integrate_mc(f, &bbox, tol, 0x1e57)),
        d => Err(LogConcaveError::UnsupportedDimension { got: d, max: 3 }),
    }
}

fn integrate_2d(f: &LogConcaveFn, bbox: &BoundingBox, tol: f64) -> IntegrationResult {
    let width = bbox.hi[0] - bbox.lo[0];
    let inner_tol = (tol / width.max(1e-12)) * 0.25;
    let mut inner_err_acc = std::cell::Cell::new(0.0f64);
    let outer = |x: f64| -> f64 {
        let (v, e) = adaptive_gk15(|y| f.eval(&[x, y]), bbox.lo[1], bbox.hi[1], inner_tol, 800);
        inner_err_acc.set(inner_err_acc.get().max(e));
        v
    };
    let (value, outer_err) = adaptive_gk15(&outer, bbox.lo[0], bbox.hi[0], tol * 0.5, 2000);
    let err = outer_err + inner_err_acc.get_mut().max(inner_tol) * width;
    IntegrationResult {
        value,
        error_estimate: err,
        tol_met: err <= tol,
    }
}

fn integrate_mc(f: &LogConcaveFn, bbox: &BoundingBox, tol: f64, seed: u64) -> IntegrationResult {
    let d = bbox.dim();
    let vol: f64 = bbox
        .hi
        .iter()
        .zip(&bbox.lo)
        .map(|(h, l)| (h - l).max(0.0))
        .product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut n = 0usize;
    let batches = 40usize;
    let batch = 25_000usize;
    let mut err = f64::INFINITY;
    let mut value = 0.0;
    for _ in 0..batches {
        for _ in 0..batch {
            let x: Vec<f64> = (0..d)
                .map(|i| rng.gen_range(bbox.lo[i]..bbox.hi[i]))
                .collect();
            let v = f.eval(&x);
            sum += v;
            sum_sq += v * v;
        }
        n += batch;
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        value = vol * mean;
        err = vol * (var / n as f64).sqrt() * 3.0;
        if err <= tol {
            break;
        }
    }
    IntegrationResult {
        value,
        error_estimate: err,
        tol_met: err <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;
    use crate::logconcave::{
        h_integral, pointwise_min, EllipsoidalFunction, LogConcaveFn, LogLinearPiece,
    };

    #[test]
    fn profile_integral_one_dimensional() {
        let f = LogConcaveFn::profile(1);
        let r = integrate_numeric(&f, 1e-8).unwrap();
        assert!(r.tol_met);
        assert!((r.value - std::f64::consts::PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn ellipsoidal_closed_form_path() {
        // alpha = 2, map = Id/3 at d = 1: integral 2 * 3 * pi/2 = 3 pi.
        let e = EllipsoidalFunction {
            height: 2.0,
            map: nalgebra::DMatrix::identity(1, 1) / 3.0,
            center: vec![0.0],
        };
        let f = LogConcaveFn::Ellipsoidal(e);
        let r = integrate(&f, 1e-8).unwrap();
        assert_eq!(r.error_estimate, 0.0);
        assert!((r.value - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature_at_low_dims() {
        let cases = vec![
            EllipsoidalFunction {
                height: 1.7,
                map: nalgebra::DMatrix::identity(1, 1) * 0.8,
                center: vec![0.3],
            },
            EllipsoidalFunction {
                height: 0.9,
                map: nalgebra::dmatrix![1.2, 0.2; -0.1, 0.7],
                center: vec![0.1, -0.4],
            },
        ];
        for e in cases {
            let f = LogConcaveFn::Ellipsoidal(e.clone());
            let exact = e.integral();
            let num = integrate_numeric(&f, 1e-7).unwrap();
            assert!(
                (num.value - exact).abs() <= 1e-6 * exact.max(1.0),
                "numeric {} vs exact {exact}",
                num.value
            );
        }
    }

    #[test]
    fn clipped_exponential_has_analytic_integral() {
        // exp(-|x|) on [-10, 10]: integral 2 (1 - e^{-10}).
        let f = LogConcaveFn::poly_log_linear(
            vec![
                LogLinearPiece {
                    slope: vec![1.0],
                    intercept: 0.0,
                },
                LogLinearPiece {
                    slope: vec![-1.0],
                    intercept: 0.0,
                },
            ],
            HPolytope::centered_cube(1, 10.0),
            None,
        )
        .unwrap();
        let r = integrate_numeric(&f, 1e-8).unwrap();
        let exact = 2.0 * (1.0 - (-10.0f64).exp());
        assert!(r.tol_met);
        assert!((r.value - exact).abs() < 1e-8);
    }

    #[test]
    fn two_dimensional_profile() {
        let f = LogConcaveFn::profile(2);
        let r = integrate_numeric(&f, 1e-6).unwrap();
        assert!((r.value - h_integral(2)).abs() < 1e-5, "value {}", r.value);
    }

    #[test]
    fn min_with_clamp_integrates() {
        let f = pointwise_min(vec![
            LogConcaveFn::profile(1),
            LogConcaveFn::Const {
                level: 0.6,
                bbox: crate::logconcave::BoundingBox::cube(1, 2.0),
            },
        ])
        .unwrap();
        // Analytic: profile clipped at 0.6; crossing at |x| = 0.8.
        let crossing = 0.8f64;
        let cap: f64 = 2.0 * crossing * 0.6;
        let lune = {
            // integral of sqrt(1-x^2) from 0.8 to 1, times 2
            let anti = |x: f64| 0.5 * (x * (1.0 - x * x).sqrt() + x.asin());
            2.0 * (anti(1.0) - anti(crossing))
        };
        let r = integrate_numeric(&f, 1e-8).unwrap();
        assert!((r.value - (cap + lune)).abs() < 1e-7);
    }

    #[test]
    fn unbounded_support_is_rejected() {
        let f = LogConcaveFn::poly_log_linear(
            vec![LogLinearPiece {
                slope: vec![1.0],
                intercept: 0.0,
            }],
            HPolytope::full_space(1),
            None,
        )
        .unwrap();
        assert!(matches!(
            integrate_numeric(&f, 1e-6),
            Err(LogConcaveError::UnboundedSupport)
        ));
    }
}
