//! Find `(w, z)` with `w >= 0`, `z >= 1`, `w_j = 0` on masked coordinates and
//! `label * (w . x - z * last) >= 1` for every point.
//!
//! Among consistent separators the one minimizing `sum(w) + z` is returned.
//! Only coordinates that are unmasked and nonzero in some point become LP
//! columns; the remaining weights are 0.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::simplex::{solve_standard, Constraint, LpOutcome};
use crate::error::{Error, Result};

const MARGIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }
}

/// A point `(features, last)` of dimension `features.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub features: Vec<f64>,
    pub last: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorProblem {
    dim: usize,
    points: Vec<LabeledPoint>,
    zero_coords: BTreeSet<usize>,
}

impl SeparatorProblem {
    pub fn new(
        dim: usize,
        points: Vec<LabeledPoint>,
        zero_coords: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        for (k, p) in points.iter().enumerate() {
            if p.features.len() != dim {
                return Err(Error::field(
                    format!("points[{k}]"),
                    format!("expected {dim} features, got {}", p.features.len()),
                ));
            }
            if !p.last.is_finite() || p.features.iter().any(|x| !x.is_finite()) {
                return Err(Error::field(
                    format!("points[{k}]"),
                    "non-finite coordinate",
                ));
            }
        }
        let zero_coords: BTreeSet<usize> = zero_coords.into_iter().collect();
        if let Some(&j) = zero_coords.iter().find(|&&j| j >= dim) {
            return Err(Error::IndexOutOfRange { index: j, n: dim });
        }
        Ok(SeparatorProblem {
            dim,
            points,
            zero_coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn zero_coords(&self) -> &BTreeSet<usize> {
        &self.zero_coords
    }

    fn live_coords(&self) -> Vec<usize> {
        let mut live = vec![false; self.dim];
        for p in &self.points {
            for (j, &x) in p.features.iter().enumerate() {
                if x != 0.0 {
                    live[j] = true;
                }
            }
        }
        (0..self.dim)
            .filter(|&j| live[j] && !self.zero_coords.contains(&j))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorSolution {
    pub w: Vec<f64>,
    pub z: f64,
}

impl SeparatorSolution {
    /// `label * (w . x - z * last)`.
    pub fn margin(&self, p: &LabeledPoint) -> f64 {
        let dot: f64 = self.w.iter().zip(&p.features).map(|(w, x)| w * x).sum();
        p.label.sign() * (dot - self.z * p.last)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeparatorOutcome {
    Feasible(SeparatorSolution),
    Infeasible,
}

/// Which LP is handed to the simplex. Both give the same optimum value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// The one with fewer tableau rows.
    Auto,
    /// One row per point; needs a feasibility phase.
    Primal,
    /// One row per live coordinate; the origin is feasible, and unboundedness
    /// certifies that no separator exists.
    Dual,
}

pub fn solve_consistent_separator(prob: &SeparatorProblem) -> Result<SeparatorOutcome> {
    solve_separator_with(prob, Formulation::Auto)
}

/// Solves by constraint generation: the LP over a working set of points is a
/// relaxation, so its optimum is optimal overall once it separates every
/// point, and its infeasibility is infeasibility overall.
pub fn solve_separator_with(
    prob: &SeparatorProblem,
    form: Formulation,
) -> Result<SeparatorOutcome> {
    let live = prob.live_coords();
    let ncols = live.len() + 1;
    let batch = (4 * ncols).max(50);
    let total = prob.points.len();
    let mut in_set = vec![false; total];
    let mut working: Vec<usize> = (0..total.min(batch)).collect();
    for &k in &working {
        in_set[k] = true;
    }
    loop {
        let Some(sol) = solve_subset(prob, &live, &working, form)? else {
            return Ok(SeparatorOutcome::Infeasible);
        };
        if sol.z < 1.0 - MARGIN_TOL {
            return Err(Error::Numerical(format!("separator z = {} below 1", sol.z)));
        }
        let mut violated: Vec<(f64, usize)> = prob
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| (sol.margin(p), k))
            .filter(|&(m, _)| m < 1.0 - MARGIN_TOL)
            .collect();
        if violated.is_empty() {
            return Ok(SeparatorOutcome::Feasible(sol));
        }
        if let Some(&(m, k)) = violated.iter().find(|&&(_, k)| in_set[k]) {
            return Err(Error::Numerical(format!(
                "separator margin {m} at point {k}"
            )));
        }
        violated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, k) in violated.iter().take(batch) {
            in_set[k] = true;
            working.push(k);
        }
    }
}

/// The separator LP over the points `subset`, each row scaled to unit
/// maximum coefficient. `None` means infeasible.
fn solve_subset(
    prob: &SeparatorProblem,
    live: &[usize],
    subset: &[usize],
    form: Formulation,
) -> Result<Option<SeparatorSolution>> {
    let ncols = live.len() + 1;
    // Rows of A u >= b over u = (w_live, z); the last row is z >= 1.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(subset.len() + 1);
    let mut rhs: Vec<f64> = Vec::with_capacity(subset.len() + 1);
    for &k in subset {
        let p = &prob.points[k];
        let s = p.label.sign();
        let row: Vec<f64> = live
            .iter()
            .map(|&j| s * p.features[j])
            .chain(std::iter::once(-s * p.last))
            .collect();
        let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            // 0 >= 1 cannot hold
            return Ok(None);
        }
        rows.push(row.iter().map(|a| a / scale).collect());
        rhs.push(1.0 / scale);
    }
    let mut z_row = vec![0.0; ncols];
    z_row[ncols - 1] = 1.0;
    rows.push(z_row);
    rhs.push(1.0);
    let nrows = rows.len();
    let use_dual = match form {
        Formulation::Auto => ncols <= nrows,
        Formulation::Primal => false,
        Formulation::Dual => true,
    };
    let u = if use_dual {
        // max b.y  s.t.  A^T y <= 1, y >= 0; the primal u is the dual vector.
        let constraints: Vec<Constraint> = (0..ncols)
            .map(|c| Constraint::new(rows.iter().map(|r| r[c]).collect(), 1.0))
            .collect();
        match solve_standard(&rhs, &constraints) {
            LpOutcome::Optimal(s) => s.duals,
            LpOutcome::Unbounded => return Ok(None),
            LpOutcome::Infeasible => {
                return Err(Error::Numerical(
                    "separator dual reported infeasible".into(),
                ))
            }
        }
    } else {
        // max -(1.u)  s.t.  -A u <= -b, u >= 0.
        let constraints: Vec<Constraint> = rows
            .iter()
            .zip(&rhs)
            .map(|(r, &b)| Constraint::new(r.iter().map(|a| -a).collect(), -b))
            .collect();
        match solve_standard(&vec![-1.0; ncols], &constraints) {
            LpOutcome::Optimal(s) => s.x,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => {
                return Err(Error::Numerical(
                    "separator primal reported unbounded".into(),
                ))
            }
        }
    };
    let mut w = vec![0.0; prob.dim];
    for (c, &j) in live.iter().enumerate() {
        w[j] = u[c].max(0.0);
    }
    Ok(Some(SeparatorSolution { w, z: u[ncols - 1] }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(features: &[f64], last: f64, label: Label) -> LabeledPoint {
        LabeledPoint {
            features: features.to_vec(),
            last,
            label,
        }
    }

    fn both(prob: &SeparatorProblem) -> [SeparatorOutcome; 2] {
        [
            solve_separator_with(prob, Formulation::Primal).unwrap(),
            solve_separator_with(prob, Formulation::Dual).unwrap(),
        ]
    }

    #[test]
    fn masked_example() {
        let prob = SeparatorProblem::new(
            2,
            vec![
                pt(&[1.0, 0.0], 2.0, Label::Pos),
                pt(&[1.0, 0.0], 3.0, Label::Neg),
            ],
            [1],
        )
        .unwrap();
        for out in both(&prob) {
            let SeparatorOutcome::Feasible(s) = out else {
                panic!("expected feasible")
            };
            assert_eq!(s.w[1], 0.0);
            let ratio = s.w[0] / s.z;
            assert!(ratio > 2.0 && ratio < 3.0);
            assert!((s.w[0] - 5.0).abs() < 1e-9 && (s.z - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn badly_scaled_single_points() {
        let ones = vec![1.0; 67];
        for label in [Label::Pos, Label::Neg] {
            let prob = SeparatorProblem::new(67, vec![pt(&ones, 18_387_391.9, label)], []).unwrap();
            for out in both(&prob) {
                let SeparatorOutcome::Feasible(s) = out else {
                    panic!("expected feasible")
                };
                assert!(s.margin(&prob.points()[0]) >= 1.0 - 1e-7);
            }
        }
    }

    #[test]
    fn empty_points() {
        let prob = SeparatorProblem::new(3, vec![], []).unwrap();
        for out in both(&prob) {
            assert_eq!(
                out,
                SeparatorOutcome::Feasible(SeparatorSolution {
                    w: vec![0.0; 3],
                    z: 1.0
                })
            );
        }
    }

    #[test]
    fn contradictory_points() {
        let prob = SeparatorProblem::new(
            2,
            vec![
                pt(&[1.0, 0.0], 1.0, Label::Pos),
                pt(&[1.0, 0.0], 1.0, Label::Neg),
            ],
            [],
        )
        .unwrap();
        for out in both(&prob) {
            assert_eq!(out, SeparatorOutcome::Infeasible);
        }
    }

    #[test]
    fn masking_can_force_infeasibility() {
        let prob = SeparatorProblem::new(1, vec![pt(&[1.0], 1.0, Label::Pos)], [0]).unwrap();
        for out in both(&prob) {
            assert_eq!(out, SeparatorOutcome::Infeasible);
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(SeparatorProblem::new(2, vec![pt(&[1.0], 1.0, Label::Pos)], []).is_err());
        assert!(SeparatorProblem::new(2, vec![], [2]).is_err());
        assert!(SeparatorProblem::new(1, vec![pt(&[f64::NAN], 1.0, Label::Pos)], []).is_err());
    }
}
