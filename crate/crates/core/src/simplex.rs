//! Dense tableau primal simplex for `max c·x  s.t.  A x (<= | =) b,  x >= 0`.
//!
//! Only what the master problem needs: a caller-supplied feasible starting
//! basis, Dantzig pricing with a switch to Bland's rule after a run of
//! degenerate pivots, and row duals read off the final objective row.

use crate::error::{Error, Result};

pub(crate) const DEFAULT_PIVOT_TOL: f64 = 1e-9;
const STALL_THRESHOLD: usize = 50;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    // rows x (cols + 1), last entry of each row is the right-hand side.
    a: Vec<f64>,
    // Reduced costs z_j - c_j, plus the objective value in the last slot.
    obj: Vec<f64>,
    basis: Vec<usize>,
    // Columns that may never enter (artificials).
    frozen: Vec<bool>,
    // Column that starts as the unit vector of each row, with its cost.
    unit_columns: Vec<usize>,
    cost: Vec<f64>,
    tol: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub values: Vec<f64>,
    pub objective: f64,
    /// Dual value per row, `c_B B^-1`.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl Tableau {
    /// `a` is rows x cols (row-major), `basis[i]` names a column that is a
    /// unit vector with a one in row `i`, and `b >= 0`. Those starting unit
    /// columns are also where the row duals are read from.
    pub fn new(
        a: Vec<f64>,
        b: &[f64],
        cost: &[f64],
        basis: Vec<usize>,
        frozen: Vec<bool>,
        tol: f64,
    ) -> Self {
        let rows = b.len();
        let cols = cost.len();
        debug_assert_eq!(a.len(), rows * cols);
        let mut t = Vec::with_capacity(rows * (cols + 1));
        for i in 0..rows {
            t.extend_from_slice(&a[i * cols..(i + 1) * cols]);
            t.push(b[i]);
        }
        let mut obj: Vec<f64> = cost.iter().map(|c| -c).collect();
        obj.push(0.0);
        let mut tab = Tableau {
            rows,
            cols,
            a: t,
            obj,
            unit_columns: basis.clone(),
            basis,
            frozen,
            cost: cost.to_vec(),
            tol,
        };
        // Price out basic columns with nonzero cost.
        for i in 0..rows {
            let j = tab.basis[i];
            let d = tab.obj[j];
            if d != 0.0 {
                for k in 0..=cols {
                    tab.obj[k] -= d * tab.at(i, k);
                }
            }
        }
        tab
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    /// Pivots column `col` into the basis at row `row`.
    pub fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let p = self.at(row, col);
        for k in 0..w {
            self.a[row * w + k] /= p;
        }
        self.a[row * w + col] = 1.0;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.a[i * w + col];
            if f != 0.0 {
                for k in 0..w {
                    self.a[i * w + k] -= f * self.a[row * w + k];
                }
                self.a[i * w + col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for k in 0..w {
                self.obj[k] -= f * self.a[row * w + k];
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let candidates = (0..self.cols).filter(|&j| !self.frozen[j] && self.obj[j] < -self.tol);
        if bland {
            candidates.min()
        } else {
            // Most negative reduced cost, lowest index on ties.
            candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if self.obj[b] <= self.obj[j] => Some(b),
                _ => Some(j),
            })
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let aij = self.at(i, col);
            if aij <= self.tol {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / aij;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - self.tol
                        || (ratio <= br + self.tol && self.basis[i] < self.basis[bi])
                    {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    pub fn solve(mut self) -> Result<SimplexResult> {
        let mut pivots = 0;
        let mut stalled = 0;
        let mut bland = false;
        while let Some(col) = self.entering(bland) {
            let Some(row) = self.leaving(col) else {
                return Err(Error::Numerical("LP is unbounded".into()));
            };
            let before = self.obj[self.cols];
            self.pivot(row, col);
            pivots += 1;
            if self.obj[self.cols] <= before + self.tol {
                stalled += 1;
                if stalled >= STALL_THRESHOLD {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            if pivots >= MAX_PIVOTS {
                return Err(Error::Numerical(format!(
                    "no optimality certificate after {pivots} pivots"
                )));
            }
        }
        let mut values = vec![0.0; self.cols];
        for (i, &j) in self.basis.iter().enumerate() {
            values[j] = self.rhs(i);
        }
        // For the starting unit column e_i of row i: z - c = y_i - c.
        let duals = self
            .unit_columns
            .iter()
            .map(|&j| self.obj[j] + self.cost[j])
            .collect();
        Ok(SimplexResult {
            values,
            objective: self.obj[self.cols],
            duals,
            pivots,
        })
    }
}
