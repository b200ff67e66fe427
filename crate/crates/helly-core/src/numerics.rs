//! Shared numeric helpers: SPD matrix roots, nonnegative least squares and
//! small derivative-free optimizers used by the fitting routines.

use nalgebra::{DMatrix, DVector};

/// Symmetric positive-definite square root via eigendecomposition.
pub fn spd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spd_power(m, 0.5)
}

/// Symmetric positive-definite inverse square root.
pub fn spd_inv_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    spd_power(m, -0.5)
}

pub fn spd_power(m: &DMatrix<f64>, e: f64) -> DMatrix<f64> {
    let sym = 0.5 * (m + m.transpose());
    let eig = sym.symmetric_eigen();
    let d = eig.eigenvalues.map(|l| l.max(1e-300).powf(e));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).norm()
}

/// Lawson-Hanson nonnegative least squares: minimize `||A w - b||` over
/// `w >= 0`. Sized for small certificate systems.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let mut passive = vec![false; n];
    let mut w = DVector::<f64>::zeros(n);
    let tol = 1e-12 * (1.0 + b.norm());
    for _ in 0..max_iter {
        let resid = b - a * &w;
        let grad = a.transpose() * &resid;
        // Most-violated inactive coordinate.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !passive[i] && grad[i] > tol {
                if best.map_or(true, |(_, g)| grad[i] > g) {
                    best = Some((i, grad[i]));
                }
            }
        }
        let Some((j, _)) = best else {
            break;
        };
        passive[j] = true;
        // Inner loop: solve on the passive set, backtrack until nonnegative.
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = a.select_columns(idx.iter());
            let sol = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-12)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if sol.iter().all(|&v| v > -1e-14) {
                w.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    w[i] = sol[k].max(0.0);
                }
                break;
            }
            // Step toward `sol` until the first coordinate hits zero.
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if sol[k] <= 1e-14 {
                    let denom = w[i] - sol[k];
                    if denom > 1e-300 {
                        alpha = alpha.min(w[i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                w[i] += alpha * (sol[k] - w[i]);
                if w[i] <= 1e-14 {
                    w[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    w
}

/// Derivative-free pattern maximization: axis probes with shrinking steps.
/// Deterministic; suited to smooth low-dimensional concave objectives.
pub fn maximize_pattern<F>(
    f: F,
    x0: &[f64],
    init_step: f64,
    min_step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = init_step;
    let mut evals = 1usize;
    while step > min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..n {
            for sgn in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += sgn * step;
                let fy = f(&y);
                evals += 1;
                if fy > fx + 1e-15 {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Pattern maximization probing axis and two-coordinate diagonal moves;
/// escapes constraint corners that stall the axis-only variant.
pub fn maximize_pattern_diag<F>(
    f: F,
    x0: &[f64],
    init_step: f64,
    min_step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e.clone());
        e[i] = -1.0;
        dirs.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut e = vec![0.0; n];
                e[i] = si;
                e[j] = sj;
                dirs.push(e);
            }
        }
    }
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = init_step;
    let mut evals = 1usize;
    while step > min_step && evals < max_evals {
        let mut improved = false;
        for dir in &dirs {
            let y: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + step * di).collect();
            let fy = f(&y);
            evals += 1;
            if fy > fx + 1e-15 {
                x = y;
                fx = fy;
                improved = true;
            }
            if evals >= max_evals {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Pattern maximization over two parameters with a 16-direction compass;
/// tracks narrow curved creases that axis/diagonal probes miss.
pub fn maximize_pattern_compass2<F>(
    f: F,
    x0: &[f64],
    init_step: f64,
    min_step: f64,
    max_evals: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(x0.len(), 2);
    let dirs: Vec<[f64; 2]> = (0..16)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            [th.cos(), th.sin()]
        })
        .collect();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = init_step;
    let mut evals = 1usize;
    while step > min_step && evals < max_evals {
        let mut improved = false;
        for dir in &dirs {
            let y = vec![x[0] + step * dir[0], x[1] + step * dir[1]];
            let fy = f(&y);
            evals += 1;
            if fy > fx + 1e-15 {
                x = y;
                fx = fy;
                improved = true;
            }
            if evals >= max_evals {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut m1 = hi - INV_PHI * (hi - lo);
    let mut m2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(m1);
    let mut f2 = f(m2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + INV_PHI * (hi - lo);
            f2 = f(m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - INV_PHI * (hi - lo);
            f1 = f(m1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
