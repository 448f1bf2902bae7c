//! Dense two-phase simplex for the tiny linear programs that show up in
//! polytope work (longest-chord offsets, normal-cone max-min points).
//!
//! Problems here have at most a few dozen rows and variables, so a textbook
//! tableau with Bland's rule is plenty.

/// Maximize `c . x` subject to `A x <= b`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "infeasible"),
            LpError::Unbounded => write!(f, "unbounded"),
            LpError::IterationLimit => write!(f, "iteration limit"),
        }
    }
}

const EPS: f64 = 1e-11;

struct Tableau {
    /// rows x cols; last column is the rhs.
    data: Vec<Vec<f64>>,
    /// Objective row (reduced costs), last entry is the negative objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.data[row][col];
        for v in self.data[row].iter_mut() {
            *v /= piv;
        }
        for r in 0..self.data.len() {
            if r != row {
                let factor = self.data[r][col];
                if factor.abs() > 0.0 {
                    for c in 0..=self.cols {
                        self.data[r][c] -= factor * self.data[row][c];
                    }
                }
            }
        }
        let factor = self.obj[col];
        if factor.abs() > 0.0 {
            for c in 0..=self.cols {
                self.obj[c] -= factor * self.data[row][c];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations until no improving column remains.
    fn run(&mut self, allowed_cols: usize) -> Result<(), LpError> {
        let limit = 50 * (self.cols + self.data.len()) + 1000;
        for _ in 0..limit {
            let Some(col) = (0..allowed_cols).find(|&c| self.obj[c] > EPS) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.data.len() {
                let a = self.data[r][col];
                if a > EPS {
                    let ratio = self.data[r][self.cols] / a;
                    let better = match best {
                        None => true,
                        Some((br, bratio)) => {
                            ratio < bratio - EPS
                                || (ratio < bratio + EPS && self.basis[r] < self.basis[br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(LpError::Unbounded),
            }
        }
        Err(LpError::IterationLimit)
    }
}

pub fn maximize(p: &LpProblem) -> Result<LpSolution, LpError> {
    let m = p.rows.len();
    let n = p.objective.len();
    debug_assert!(p.rows.iter().all(|r| r.len() == n));
    debug_assert_eq!(p.rhs.len(), m);

    // Columns: n structural, m slacks, then one artificial per negative row.
    let negative_rows: Vec<usize> = (0..m).filter(|&i| p.rhs[i] < 0.0).collect();
    let n_art = negative_rows.len();
    let cols = n + m + n_art;

    let mut data = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art_index = 0usize;
    for i in 0..m {
        let flip = if p.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i][j] = flip * p.rows[i][j];
        }
        data[i][n + i] = flip; // slack
        data[i][cols] = flip * p.rhs[i];
        if flip < 0.0 {
            let a_col = n + m + art_index;
            art_index += 1;
            data[i][a_col] = 1.0;
            basis[i] = a_col;
        } else {
            basis[i] = n + i;
        }
    }

    let mut t = Tableau { data, obj: vec![0.0; cols + 1], basis, cols };

    if n_art > 0 {
        // Phase 1: maximize -(sum of artificials).
        for c in n + m..cols {
            t.obj[c] = -1.0;
        }
        // Price out the artificial basis.
        for r in 0..m {
            if t.basis[r] >= n + m {
                for c in 0..=cols {
                    t.obj[c] += t.data[r][c];
                }
            }
        }
        t.run(cols)?;
        // Current objective value is -obj[cols]; infeasible when the
        // artificials cannot be driven to zero.
        if t.obj[cols] > 1e-8 {
            return Err(LpError::Infeasible);
        }
        // Pivot artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&c| t.data[r][c].abs() > 1e-9) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2 with the real objective, artificial columns frozen.
    t.obj = vec![0.0; cols + 1];
    for j in 0..n {
        t.obj[j] = p.objective[j];
    }
    for r in 0..m {
        let b = t.basis[r];
        if b < n {
            let factor = t.obj[b];
            if factor.abs() > 0.0 {
                for c in 0..=cols {
                    t.obj[c] -= factor * t.data[r][c];
                }
            }
        }
    }
    t.run(n + m)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.data[r][cols];
        }
    }
    Ok(LpSolution { objective: -t.obj[cols], x })
}
