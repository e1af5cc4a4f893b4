//! Adapter for external Max-SAT solvers that read WCNF and print a model.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use crate::optimize::{SolveResult, SolveStats, SolveStatus};
use crate::wcnf::{parse_solver_output, SolverVerdict, WcnfProblem};
use crate::MaxSatError;

/// An external solver binary. It is invoked as `program args... <wcnf-path>`
/// and must print conventional "s"/"v" lines on standard output.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalSolver { program: program.into(), args: Vec::new() }
    }

    /// Writes the problem to `workdir/problem.wcnf`, runs the solver, keeps
    /// its output in `workdir/problem.model` and verifies the model.
    pub fn solve(&self, problem: &WcnfProblem, workdir: &Path) -> Result<SolveResult, MaxSatError> {
        let start = Instant::now();
        let wcnf_path = workdir.join("problem.wcnf");
        let model_path = workdir.join("problem.model");
        fs::write(&wcnf_path, problem.to_wcnf_string())?;
        let output = Command::new(&self.program).args(&self.args).arg(&wcnf_path).output()?;
        fs::write(&model_path, &output.stdout)?;
        let mut result = read_model_file(&model_path, problem)?;
        result.stats.wall_time = start.elapsed();
        Ok(result)
    }
}

/// Interprets a solver output file for `problem`, verifying any model against
/// the hard clauses and recomputing its cost.
pub fn read_model_file(path: &Path, problem: &WcnfProblem) -> Result<SolveResult, MaxSatError> {
    let text = fs::read_to_string(path)?;
    let out = parse_solver_output(&text, problem.num_vars())?;
    let stats = SolveStats::default();
    if out.verdict == Some(SolverVerdict::Unsatisfiable) {
        return Ok(SolveResult { status: SolveStatus::UnsatisfiableHard, stats });
    }
    let model = out.model.ok_or_else(|| MaxSatError::External(format!("no model in {}", path.display())))?;
    problem.verify_hard(&model)?;
    let cost = problem.soft_cost(&model);
    let status = match out.verdict {
        Some(SolverVerdict::Optimum) => SolveStatus::Optimum { cost, model },
        _ => SolveStatus::TimedOut { best: Some((cost, model)) },
    };
    Ok(SolveResult { status, stats })
}
