//! Dense two-phase simplex over free variables.
//!
//! Solves `maximize <c, x>  subject to  A x <= b` with `x` unrestricted in
//! sign. Free variables are split into positive/negative parts, rows with a
//! negative right-hand side get an artificial variable, and both phases pivot
//! with Bland's rule so the result is deterministic for a fixed input.

use thiserror::Error;

/// Feasibility tolerance for returned points.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Optimality tolerance on reduced costs.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Entries below this magnitude are never used as pivots.
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { point: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("dimension mismatch: objective has {objective} entries, constraint matrix has {columns} columns")]
    DimensionMismatch { objective: usize, columns: usize },
    #[error("numerically singular basis; basic variable indices {basis:?}")]
    SingularBasis { basis: Vec<usize> },
}

/// Dense LP data: rows of `a` are constraint normals, `b` the offsets.
pub struct LpProblem<'a> {
    pub objective: &'a [f64],
    pub rows: &'a [Vec<f64>],
    pub b: &'a [f64],
}

struct Tableau {
    m: usize,
    ncols: usize,
    // row-major, m rows of ncols + 1 entries (last entry is the RHS)
    data: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize, // structural columns (split vars + slacks)
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.ncols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.ncols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.ncols + 1;
        let piv = self.data[row * w + col];
        for c in 0..w {
            self.data[row * w + c] /= piv;
        }
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let factor = self.data[r * w + col];
            if factor != 0.0 {
                for c in 0..w {
                    self.data[r * w + c] -= factor * self.data[row * w + c];
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `z_j - c_j` and objective value for cost vector `costs`.
    fn reduced_costs(&self, costs: &[f64]) -> (Vec<f64>, f64) {
        let mut rc = vec![0.0; self.ncols];
        let mut value = 0.0;
        for r in 0..self.m {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                value += cb * self.rhs(r);
                for c in 0..self.ncols {
                    rc[c] += cb * self.at(r, c);
                }
            }
        }
        for c in 0..self.ncols {
            rc[c] -= costs[c];
        }
        (rc, value)
    }

    /// Run Bland-rule simplex iterations for `costs` (maximization).
    /// `allowed` masks columns that may enter the basis.
    fn run(&mut self, costs: &[f64], allowed: &[bool]) -> Result<bool, LpError> {
        let max_iters = 2000 * (self.m + self.ncols).max(16);
        for _ in 0..max_iters {
            let (rc, _) = self.reduced_costs(costs);
            // Bland: lowest-index improving column.
            let mut entering = None;
            for c in 0..self.ncols {
                if allowed[c] && rc[c] < -OPTIMALITY_TOL {
                    entering = Some(c);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(true); // optimal
            };
            // Ratio test; ties broken by lowest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, col);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || (ratio < lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(false), // unbounded
            }
        }
        Err(LpError::SingularBasis {
            basis: self.basis.clone(),
        })
    }
}

/// Solve `maximize <objective, x> : rows[i] . x <= b[i]`.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let d = problem.objective.len();
    for row in problem.rows {
        if row.len() != d {
            return Err(LpError::DimensionMismatch {
                objective: d,
                columns: row.len(),
            });
        }
    }
    let m = problem.rows.len();
    if m == 0 {
        // Whole space: bounded only for the zero objective.
        if problem.objective.iter().all(|&c| c == 0.0) {
            return Ok(LpSolution::Optimal {
                point: vec![0.0; d],
                value: 0.0,
            });
        }
        return Ok(LpSolution::Unbounded);
    }

    // Columns: d positive parts, d negative parts, m slacks, then artificials.
    let negated: Vec<bool> = problem.b.iter().map(|&bi| bi < 0.0).collect();
    let n_art = negated.iter().filter(|&&n| n).count();
    let n_struct = 2 * d + m;
    let ncols = n_struct + n_art;
    let w = ncols + 1;

    let mut data = vec![0.0; m * w];
    let mut basis = vec![0usize; m];
    let mut art_idx = 0;
    for r in 0..m {
        let sign = if negated[r] { -1.0 } else { 1.0 };
        for j in 0..d {
            let a = sign * problem.rows[r][j];
            data[r * w + j] = a;
            data[r * w + d + j] = -a;
        }
        data[r * w + 2 * d + r] = sign; // slack
        data[r * w + ncols] = sign * problem.b[r];
        if negated[r] {
            let col = n_struct + art_idx;
            data[r * w + col] = 1.0;
            basis[r] = col;
            art_idx += 1;
        } else {
            basis[r] = 2 * d + r;
        }
    }

    let mut tab = Tableau {
        m,
        ncols,
        data,
        basis,
        n_struct,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        for c in n_struct..ncols {
            phase1[c] = -1.0;
        }
        let allowed = vec![true; ncols];
        tab.run(&phase1, &allowed)?;
        let (_, value) = tab.reduced_costs(&phase1);
        if value < -FEASIBILITY_TOL {
            return Ok(LpSolution::Infeasible);
        }
        // Pivot leftover artificials out of the basis where possible.
        for r in 0..tab.m {
            if tab.basis[r] >= tab.n_struct {
                let col = (0..tab.n_struct).find(|&c| tab.at(r, c).abs() > PIVOT_TOL);
                if let Some(c) = col {
                    tab.pivot(r, c);
                }
            }
        }
    }

    let mut phase2 = vec![0.0; ncols];
    for j in 0..d {
        phase2[j] = problem.objective[j];
        phase2[d + j] = -problem.objective[j];
    }
    let mut allowed = vec![true; ncols];
    for c in n_struct..ncols {
        allowed[c] = false;
    }
    let optimal = tab.run(&phase2, &allowed)?;
    if !optimal {
        return Ok(LpSolution::Unbounded);
    }

    let mut point = vec![0.0; d];
    for r in 0..tab.m {
        let v = tab.basis[r];
        if v < d {
            point[v] += tab.rhs(r);
        } else if v < 2 * d {
            point[v - d] -= tab.rhs(r);
        }
    }
    let (_, value) = tab.reduced_costs(&phase2);
    Ok(LpSolution::Optimal { point, value })
}
