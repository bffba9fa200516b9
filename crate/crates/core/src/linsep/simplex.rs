//! Dense two-phase tableau simplex for `max c^T x  s.t.  A x <= b`.
//!
//! Entering columns follow Dantzig's largest-coefficient rule until a run of
//! degenerate pivots is seen, after which Bland's smallest-index rule takes
//! over for the rest of the phase; Bland's rule cannot cycle, so every solve
//! terminates.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
/// Steps at or below this length count as degenerate.
const DEGENERATE_STEP: f64 = 1e-9;
/// Pivots per tableau dimension before pricing falls back to Bland's rule.
const PIVOT_BUDGET_PER_DIM: usize = 20;

/// One `coeffs . x <= bound` row.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Self {
        Constraint { coeffs, bound }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Optimal dual multiplier of each constraint (nonnegative).
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

pub const MAX_CONSTRAINTS: usize = 10_000;
pub const MAX_VARIABLES: usize = 1_000;

/// Maximizes `objective . x` subject to every constraint, with `x >= 0` when
/// `nonneg` is set and `x` free otherwise.
pub fn lp_maximize(
    objective: &[f64],
    constraints: &[Constraint],
    nonneg: bool,
) -> Result<LpOutcome> {
    let nvar = objective.len();
    if constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::guard(
            "LP constraints",
            MAX_CONSTRAINTS as u128,
            constraints.len() as u128,
        ));
    }
    if nvar > MAX_VARIABLES {
        return Err(Error::guard(
            "LP variables",
            MAX_VARIABLES as u128,
            nvar as u128,
        ));
    }
    validate(objective, constraints)?;
    if nonneg {
        return Ok(solve_standard(objective, constraints));
    }
    // x = x+ - x-
    let split_obj: Vec<f64> = objective
        .iter()
        .copied()
        .chain(objective.iter().map(|c| -c))
        .collect();
    let split_rows: Vec<Constraint> = constraints
        .iter()
        .map(|c| {
            Constraint::new(
                c.coeffs
                    .iter()
                    .copied()
                    .chain(c.coeffs.iter().map(|a| -a))
                    .collect(),
                c.bound,
            )
        })
        .collect();
    Ok(match solve_standard(&split_obj, &split_rows) {
        LpOutcome::Optimal(s) => LpOutcome::Optimal(LpSolution {
            value: s.value,
            x: (0..nvar).map(|j| s.x[j] - s.x[nvar + j]).collect(),
            duals: s.duals,
        }),
        other => other,
    })
}

pub(crate) fn validate(objective: &[f64], constraints: &[Constraint]) -> Result<()> {
    if let Some(j) = objective.iter().position(|c| !c.is_finite()) {
        return Err(Error::field(
            format!("objective[{j}]"),
            "non-finite coefficient",
        ));
    }
    for (i, c) in constraints.iter().enumerate() {
        if c.coeffs.len() != objective.len() {
            return Err(Error::field(
                format!("constraints[{i}]"),
                format!(
                    "expected {} coefficients, got {}",
                    objective.len(),
                    c.coeffs.len()
                ),
            ));
        }
        if !c.bound.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::field(
                format!("constraints[{i}]"),
                "non-finite entry",
            ));
        }
    }
    Ok(())
}

/// `max c.x, A x <= b, x >= 0` without size guards. Inputs must be validated.
pub(crate) fn solve_standard(objective: &[f64], constraints: &[Constraint]) -> LpOutcome {
    Tableau::build(objective, constraints).solve(objective)
}

struct Tableau {
    rows: usize,
    nvar: usize,
    /// structural + one slack per row + artificials
    cols: usize,
    art_start: usize,
    /// row-major, `cols + 1` wide; last entry of a row is its right-hand side
    a: Vec<f64>,
    basis: Vec<usize>,
    /// reduced costs `c_B B^-1 A_j - c_j`, last entry is the objective value
    cost: Vec<f64>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn build(objective: &[f64], constraints: &[Constraint]) -> Tableau {
        let rows = constraints.len();
        let nvar = objective.len();
        let n_art = constraints.iter().filter(|c| c.bound < 0.0).count();
        let art_start = nvar + rows;
        let cols = art_start + n_art;
        let width = cols + 1;
        let mut a = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let mut next_art = art_start;
        for (i, c) in constraints.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            let sign = if c.bound < 0.0 { -1.0 } else { 1.0 };
            for (j, &v) in c.coeffs.iter().enumerate() {
                row[j] = sign * v;
            }
            row[nvar + i] = sign;
            row[cols] = sign * c.bound;
            if c.bound < 0.0 {
                row[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = nvar + i;
            }
        }
        Tableau {
            rows,
            nvar,
            cols,
            art_start,
            a,
            basis,
            cost: vec![0.0; width],
        }
    }

    fn set_objective(&mut self, c: impl Fn(usize) -> f64) {
        let width = self.width();
        for j in 0..width {
            self.cost[j] = if j < self.cols { -c(j) } else { 0.0 };
        }
        for i in 0..self.rows {
            let cb = c(self.basis[i]);
            if cb != 0.0 {
                let row = &self.a[i * width..(i + 1) * width];
                for (cj, &aij) in self.cost.iter_mut().zip(row) {
                    *cj += cb * aij;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.width();
        let p = self.a[r * width + c];
        {
            let row = &mut self.a[r * width..(r + 1) * width];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[c] = 1.0;
        }
        let pivot_row: Vec<f64> = self.a[r * width..(r + 1) * width].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * width + c];
            if f != 0.0 {
                let row = &mut self.a[i * width..(i + 1) * width];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, &pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs pivots over columns `0..allowed`. Returns false if unbounded, which
    /// never happens in phase one.
    fn optimize(&mut self, allowed: usize, phase_one: bool) -> bool {
        let width = self.width();
        let mut banned = vec![false; allowed];
        let mut degenerate = 0usize;
        let mut pivots = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..allowed).find(|&j| !banned[j] && self.cost[j] < -PIVOT_EPS)
            } else {
                let mut best = None;
                let mut best_val = -PIVOT_EPS;
                for (j, (&cj, &ban)) in self.cost[..allowed].iter().zip(&banned).enumerate() {
                    if !ban && cj < best_val {
                        best_val = cj;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aic = self.a[i * width + c];
                if aic > PIVOT_EPS {
                    let ratio = self.a[i * width + self.cols].max(0.0) / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                // A column with no pivot row is a ray only if its reduced cost
                // is significant at the column's scale; phase one has none.
                let scale = (0..self.rows)
                    .map(|i| self.a[i * width + c].abs())
                    .fold(1.0, f64::max);
                if phase_one || self.cost[c] > -PIVOT_EPS * scale {
                    banned[c] = true;
                    continue;
                }
                return false;
            };
            if ratio <= DEGENERATE_STEP {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            pivots += 1;
            // Rounding can make Dantzig pricing cycle; Bland's rule stays on once chosen.
            if degenerate >= DEGENERATE_RUN
                || pivots >= PIVOT_BUDGET_PER_DIM * (self.rows + self.cols)
            {
                bland = true;
            }
            self.pivot(r, c);
        }
    }

    fn solve(mut self, objective: &[f64]) -> LpOutcome {
        let width = self.width();
        if self.cols > self.art_start {
            let art_start = self.art_start;
            self.set_objective(|j| if j >= art_start { -1.0 } else { 0.0 });
            self.optimize(self.cols, true);
            let scale = (0..self.rows)
                .map(|i| self.a[i * width + self.cols].abs())
                .fold(1.0, f64::max);
            if self.cost[self.cols] < -1e-9 * scale {
                return LpOutcome::Infeasible;
            }
            // Pivot zero-level artificials out of the basis where possible.
            for i in 0..self.rows {
                if self.basis[i] >= self.art_start {
                    if let Some(j) =
                        (0..self.art_start).find(|&j| self.a[i * width + j].abs() > PIVOT_EPS)
                    {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let nvar = self.nvar;
        self.set_objective(|j| if j < nvar { objective[j] } else { 0.0 });
        if !self.optimize(self.art_start, false) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; nvar];
        for i in 0..self.rows {
            let b = self.basis[i];
            if b < nvar {
                x[b] = self.a[i * width + self.cols];
            }
        }
        let duals = (0..self.rows)
            .map(|i| self.cost[nvar + i].max(0.0))
            .collect();
        let value = objective
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .fold(0.0, |a, b| a + b);
        LpOutcome::Optimal(LpSolution { value, x, duals })
    }
}
