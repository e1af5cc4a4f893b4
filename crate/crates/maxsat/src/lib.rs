//! Exact weighted partial Max-SAT.
//!
//! The crate bundles a small incremental CDCL solver ([`Solver`]), a WCNF
//! problem type with the classic text format ([`WcnfProblem`]), an exact
//! optimizer ([`solve`]) and an adapter for external solver binaries.
//!
//! ```
//! use genplan_maxsat::{solve, Lit, SolveOptions, WcnfProblem};
//!
//! let mut p = WcnfProblem::new(2);
//! p.add_hard(vec![Lit::from_dimacs(1), Lit::from_dimacs(2)]).unwrap();
//! p.add_soft(vec![Lit::from_dimacs(-1)], 3).unwrap();
//! p.add_soft(vec![Lit::from_dimacs(-2)], 2).unwrap();
//! let result = solve(&p, &SolveOptions::default());
//! assert_eq!(result.cost(), Some(2));
//! ```

mod counter;
mod external;
mod heap;
mod lit;
mod optimize;
mod solver;
mod wcnf;

pub use counter::WeightCounter;
pub use external::{read_model_file, ExternalSolver};
pub use lit::{LBool, Lit, Var};
pub use optimize::{solve, SolveOptions, SolveResult, SolveStats, SolveStatus};
pub use solver::{Limits, SatStatus, Solver, SolverStats};
pub use wcnf::{
    format_model, parse_model, parse_solver_output, parse_verified_model, ModelOutput, SolverVerdict, WcnfProblem,
};

#[derive(Debug, thiserror::Error)]
pub enum MaxSatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("soft clause with zero weight")]
    ZeroWeight,
    #[error("literal {lit} out of range for {num_vars} variables")]
    LiteralOutOfRange { lit: i32, num_vars: usize },
    #[error("model violates hard clause {index}")]
    HardClauseViolated { index: usize },
    #[error("external solver: {0}")]
    External(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
