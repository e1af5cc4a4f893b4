//! Exact weighted Max-SAT by linear SAT-UNSAT search.
//!
//! The first model gives an upper bound; a weight counter over the soft
//! clause violation indicators is then built once, and each improving
//! model is followed by a unit clause forbidding its cost or more. The
//! final unsatisfiable call proves optimality.

use std::time::{Duration, Instant};

use crate::counter::WeightCounter;
use crate::lit::Lit;
use crate::solver::{Limits, SatStatus, Solver};
use crate::wcnf::WcnfProblem;

/// Knobs for one optimization call.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    pub max_conflicts: Option<u64>,
    /// A known lower bound on the optimum; search stops as soon as a model
    /// of this cost is found.
    pub lower_bound: u64,
    /// Preferred initial value per variable (e.g. a previous solution).
    pub phase_hint: Option<Vec<bool>>,
}

impl SolveOptions {
    pub fn with_time_limit(limit: Duration) -> Self {
        SolveOptions { time_limit: Some(limit), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Optimum {
        cost: u64,
        model: Vec<bool>,
    },
    UnsatisfiableHard,
    /// The budget ran out; carries the best model found, if any.
    TimedOut {
        best: Option<(u64, Vec<bool>)>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub sat_calls: u32,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn cost(&self) -> Option<u64> {
        match &self.status {
            SolveStatus::Optimum { cost, .. } => Some(*cost),
            _ => None,
        }
    }

    pub fn model(&self) -> Option<&[bool]> {
        match &self.status {
            SolveStatus::Optimum { model, .. } => Some(model),
            SolveStatus::TimedOut { best: Some((_, m)) } => Some(m),
            _ => None,
        }
    }
}

/// Solves `problem` to optimality within the given budget.
pub fn solve(problem: &WcnfProblem, options: &SolveOptions) -> SolveResult {
    let start = Instant::now();
    let limits = Limits { deadline: options.time_limit.map(|d| start + d), max_conflicts: options.max_conflicts };
    let n = problem.num_vars();
    let mut solver = Solver::new();
    solver.reserve_vars(n);
    if let Some(hint) = &options.phase_hint {
        for (v, &b) in hint.iter().enumerate().take(n) {
            solver.set_phase(crate::Var(v as u32), b);
        }
    }
    for c in problem.hard() {
        solver.add_clause(c);
    }
    // violation indicator per soft clause: true when the clause may be falsified
    let mut indicators: Vec<(Lit, u64)> = Vec::with_capacity(problem.soft().len());
    for (c, w) in problem.soft() {
        if c.len() == 1 {
            let ind = !c[0];
            if options.phase_hint.is_none() {
                solver.set_phase(ind.var(), ind.is_negated());
            }
            indicators.push((ind, *w));
        } else {
            let r = solver.new_var();
            let mut relaxed = c.clone();
            relaxed.push(r.pos());
            solver.add_clause(&relaxed);
            indicators.push((r.pos(), *w));
        }
    }

    let mut stats = SolveStats::default();
    let finish = |solver: &Solver, mut stats: SolveStats, status: SolveStatus| {
        let s = solver.stats();
        stats.decisions = s.decisions;
        stats.conflicts = s.conflicts;
        stats.wall_time = start.elapsed();
        SolveResult { status, stats }
    };

    let mut best: Option<(u64, Vec<bool>)> = None;
    let mut counter: Option<WeightCounter> = None;
    loop {
        stats.sat_calls += 1;
        match solver.solve_limited(&[], &limits) {
            SatStatus::Sat => {
                let model: Vec<bool> = solver.model()[..n].to_vec();
                let cost = problem.cost(&model).expect("embedded solver returned a model violating a hard clause");
                best = Some((cost, model));
                if cost == 0 || cost <= options.lower_bound {
                    break;
                }
                let c = counter.get_or_insert_with(|| WeightCounter::build(&mut solver, &indicators, cost));
                let bound = c.at_least(cost);
                solver.add_clause(&[!bound]);
            }
            SatStatus::Unsat => {
                if best.is_none() {
                    return finish(&solver, stats, SolveStatus::UnsatisfiableHard);
                }
                break;
            }
            SatStatus::Unknown => {
                return finish(&solver, stats, SolveStatus::TimedOut { best });
            }
        }
    }
    let (cost, model) = best.expect("loop exits with a model");
    debug_assert_eq!(problem.cost(&model), Some(cost));
    finish(&solver, stats, SolveStatus::Optimum { cost, model })
}
