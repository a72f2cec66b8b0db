//! Basic LP relaxation for Boolean templates and threshold rounding.

mod lp;
mod solver;

pub use lp::{solve_lp, LPSolution, LinearConstraint, LpStatus, RationalLP, Relation};
pub use solver::{build_blp, round_search, round_search_detailed, Rounding};
