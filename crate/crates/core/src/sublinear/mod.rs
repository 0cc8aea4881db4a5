//! Terminal-value solvers for the G-heat and g-expectation equations, S-shaped
//! terminal constructors, and a recombining-lattice oracle.
//!
//! Both equations are marched backward from t = 1 by explicit finite differences
//! on [−L, L]. The boundary rows are linearly extrapolated, clipped to the range
//! of φ on the grid when φ is bounded.

mod solver;
mod terminals;
mod test_function;
mod tree;

pub use solver::{
    compute_g, compute_g_mean, scalar_table, solve, solve_g_expectation, solve_g_heat, Generator, HjbProblem,
    Resolution, ValueGrid,
};
pub use terminals::{named_terminal, s_shaped_terminal, TERMINAL_NAMES};
pub use test_function::{detect_convexity, make_s_shaped, Growth, Rule, SShapeSpec, Shape, TestFunction};
pub use tree::tree_value_oracle;
#[cfg(test)]
pub(crate) use tree::commensurate_denominator;
