//! Linear programming: a dense simplex engine and the consistent-separator
//! problem solved on top of it.

mod separator;
mod simplex;

pub use separator::{
    solve_consistent_separator, solve_separator_with, Formulation, Label, LabeledPoint,
    SeparatorOutcome, SeparatorProblem, SeparatorSolution,
};
pub use simplex::{lp_maximize, Constraint, LpOutcome, LpSolution, MAX_CONSTRAINTS, MAX_VARIABLES};
