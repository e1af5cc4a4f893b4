use std::fmt::Write as _;
use std::time::Duration;

use crate::policy::Execution;

/// Summary of one learning run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// Transitions whose source is not a goal.
    pub transitions: usize,
    pub states: usize,
    pub classes: usize,
    pub diameter: u32,
    pub pool: usize,
    pub vars: usize,
    /// Clauses of the last theory solved.
    pub clauses: usize,
    /// Clauses the theory would have with every class pair enforced.
    pub full_clauses: usize,
    pub separation_clauses: usize,
    pub iterations: usize,
    pub unsat_reason: Option<String>,
    pub cost: Option<u64>,
    pub features: Vec<String>,
    pub max_weight: Option<u32>,
    pub rules: Option<usize>,
    /// Training spaces on which the policy verified.
    pub verified: Option<usize>,
    pub tests: Vec<(String, Execution)>,
    pub total_time: Duration,
    pub sat_time: Duration,
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".to_string(), T::to_string)
}

fn outcome(e: &Execution) -> String {
    match e {
        Execution::Reached(plan) => format!("solved {}", plan.len()),
        Execution::Failed { reason, steps } => format!("failed {reason} {steps}"),
    }
}

impl RunReport {
    /// `key value` lines; stable across runs with equal inputs (no timings).
    pub fn key_values(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} {v}").unwrap();
        kv("transitions", self.transitions.to_string());
        kv("states", self.states.to_string());
        kv("classes", self.classes.to_string());
        kv("d_max", self.diameter.to_string());
        kv("pool", self.pool.to_string());
        kv("vars", self.vars.to_string());
        kv("clauses", self.clauses.to_string());
        kv("clauses_full", self.full_clauses.to_string());
        kv("separation_clauses", self.separation_clauses.to_string());
        kv("iterations", self.iterations.to_string());
        kv("result", if self.cost.is_some() { "policy".into() } else { "unsat".into() });
        if let Some(r) = &self.unsat_reason {
            kv("unsat_reason", r.clone());
        }
        kv("cost", opt(&self.cost));
        kv("num_features", self.features.len().to_string());
        kv("k_max", opt(&self.max_weight));
        kv("rules", opt(&self.rules));
        kv("verified", opt(&self.verified));
        for f in &self.features {
            kv("feature", f.clone());
        }
        for (name, e) in &self.tests {
            kv("test", format!("{name} {}", outcome(e)));
        }
        out
    }

    /// A two-row table in the style of a results overview, with timings.
    pub fn table(&self) -> String {
        let head =
            ["|S|", "|S/~|", "d_max", "|F|", "vars", "clauses", "t_all", "t_SAT", "c_Phi", "|Phi|", "k*", "|pi|"];
        let row = [
            self.transitions.to_string(),
            self.classes.to_string(),
            self.diameter.to_string(),
            self.pool.to_string(),
            self.vars.to_string(),
            format!("{} ({})", self.clauses, self.full_clauses),
            format!("{:.2}", self.total_time.as_secs_f64()),
            format!("{:.2}", self.sat_time.as_secs_f64()),
            opt(&self.cost),
            self.features.len().to_string(),
            opt(&self.max_weight),
            opt(&self.rules),
        ];
        let widths: Vec<usize> = head.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let line = |cells: Vec<String>| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        let mut out = line(head.iter().map(|s| s.to_string()).collect());
        out.push('\n');
        out.push_str(&line(row.to_vec()));
        out.push('\n');
        if !self.tests.is_empty() {
            let solved = self.tests.iter().filter(|(_, e)| e.reached()).count();
            writeln!(out, "test instances solved: {solved}/{}", self.tests.len()).unwrap();
        }
        out
    }
}
