//! Weighted partial Max-SAT problems and the classic WCNF text format.

use std::fmt::Write as _;
use std::io;

use crate::lit::Lit;
use crate::MaxSatError;

/// A weighted partial Max-SAT instance. Variables are numbered from zero
/// internally and from one in WCNF text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WcnfProblem {
    num_vars: usize,
    hard: Vec<Vec<Lit>>,
    soft: Vec<(Vec<Lit>, u64)>,
}

impl WcnfProblem {
    pub fn new(num_vars: usize) -> Self {
        WcnfProblem { num_vars, ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Grows the variable count so that `n` variables exist.
    pub fn ensure_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn hard(&self) -> &[Vec<Lit>] {
        &self.hard
    }

    pub fn soft(&self) -> &[(Vec<Lit>, u64)] {
        &self.soft
    }

    pub fn num_clauses(&self) -> usize {
        self.hard.len() + self.soft.len()
    }

    fn check_range(&self, lits: &[Lit]) -> Result<(), MaxSatError> {
        match lits.iter().find(|l| l.var().index() >= self.num_vars) {
            Some(l) => Err(MaxSatError::LiteralOutOfRange { lit: l.to_dimacs(), num_vars: self.num_vars }),
            None => Ok(()),
        }
    }

    pub fn add_hard(&mut self, lits: Vec<Lit>) -> Result<(), MaxSatError> {
        self.check_range(&lits)?;
        self.hard.push(lits);
        Ok(())
    }

    pub fn add_soft(&mut self, lits: Vec<Lit>, weight: u64) -> Result<(), MaxSatError> {
        if weight == 0 {
            return Err(MaxSatError::ZeroWeight);
        }
        self.check_range(&lits)?;
        self.soft.push((lits, weight));
        Ok(())
    }

    /// Sum of soft weights plus one; the weight of hard clauses in WCNF.
    pub fn top(&self) -> u64 {
        1 + self.soft.iter().map(|(_, w)| w).sum::<u64>()
    }

    fn satisfied(clause: &[Lit], model: &[bool]) -> bool {
        clause.iter().any(|l| model.get(l.var().index()).is_some_and(|&v| v != l.is_negated()))
    }

    /// Index of the first hard clause the model falsifies.
    pub fn first_violated_hard(&self, model: &[bool]) -> Option<usize> {
        self.hard.iter().position(|c| !Self::satisfied(c, model))
    }

    pub fn verify_hard(&self, model: &[bool]) -> Result<(), MaxSatError> {
        match self.first_violated_hard(model) {
            Some(index) => Err(MaxSatError::HardClauseViolated { index }),
            None => Ok(()),
        }
    }

    /// Total weight of falsified soft clauses (hard clauses are not checked).
    pub fn soft_cost(&self, model: &[bool]) -> u64 {
        self.soft.iter().filter(|(c, _)| !Self::satisfied(c, model)).map(|(_, w)| w).sum()
    }

    /// Cost of a model, or `None` if it violates a hard clause.
    pub fn cost(&self, model: &[bool]) -> Option<u64> {
        self.first_violated_hard(model).is_none().then(|| self.soft_cost(model))
    }

    pub fn to_wcnf_string(&self) -> String {
        let top = self.top();
        let mut out = String::new();
        writeln!(out, "p wcnf {} {} {}", self.num_vars, self.num_clauses(), top).unwrap();
        let mut line = |w: u64, lits: &[Lit]| {
            write!(out, "{w}").unwrap();
            for l in lits {
                write!(out, " {}", l.to_dimacs()).unwrap();
            }
            out.push_str(" 0\n");
        };
        for c in &self.hard {
            line(top, c);
        }
        for (c, w) in &self.soft {
            line(*w, c);
        }
        out
    }

    pub fn write_wcnf<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_wcnf_string().as_bytes())
    }

    /// Parses classic WCNF. Clauses whose weight equals or exceeds top are hard.
    pub fn parse_wcnf(text: &str) -> Result<Self, MaxSatError> {
        let mut header: Option<(usize, usize, u64)> = None;
        let mut problem = WcnfProblem::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |msg: String| MaxSatError::Parse { line: line_no, msg };
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 5 || f[1] != "wcnf" {
                    return Err(err(format!("expected 'p wcnf <vars> <clauses> <top>', got '{line}'")));
                }
                let n = f[2].parse().map_err(|_| err(format!("bad variable count '{}'", f[2])))?;
                let m = f[3].parse().map_err(|_| err(format!("bad clause count '{}'", f[3])))?;
                let top = f[4].parse().map_err(|_| err(format!("bad top weight '{}'", f[4])))?;
                header = Some((n, m, top));
                problem.num_vars = n;
                continue;
            }
            let (_, _, top) = header.ok_or_else(|| err("clause before header".into()))?;
            let mut tokens = line.split_whitespace();
            let w: u64 =
                tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("missing clause weight".into()))?;
            let mut lits = Vec::new();
            let mut terminated = false;
            for t in tokens {
                let d: i32 = t.parse().map_err(|_| err(format!("bad literal '{t}'")))?;
                if d == 0 {
                    terminated = true;
                    break;
                }
                lits.push(Lit::from_dimacs(d));
            }
            if !terminated {
                return Err(err("clause not terminated by 0".into()));
            }
            let res = if w >= top { problem.add_hard(lits) } else { problem.add_soft(lits, w) };
            res.map_err(|e| err(e.to_string()))?;
        }
        let (_, m, _) = header.ok_or(MaxSatError::Parse { line: 0, msg: "missing header".into() })?;
        if problem.num_clauses() != m {
            return Err(MaxSatError::Parse {
                line: 0,
                msg: format!("header declares {m} clauses, found {}", problem.num_clauses()),
            });
        }
        Ok(problem)
    }
}

/// Result line of a solver's output ("s ..." line), if one was present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverVerdict {
    Optimum,
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

/// Parsed solver output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelOutput {
    pub verdict: Option<SolverVerdict>,
    pub model: Option<Vec<bool>>,
}

/// Reads solver output in the conventional form: "s" status lines, "o"
/// cost lines and "v" model lines, either signed literals or a 0/1 string.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<ModelOutput, MaxSatError> {
    let mut verdict = None;
    let mut model: Option<Vec<bool>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| MaxSatError::Parse { line: i + 1, msg };
        if let Some(rest) = line.strip_prefix("s ") {
            verdict = Some(match rest.trim() {
                "OPTIMUM FOUND" => SolverVerdict::Optimum,
                "SATISFIABLE" => SolverVerdict::Satisfiable,
                "UNSATISFIABLE" => SolverVerdict::Unsatisfiable,
                _ => SolverVerdict::Unknown,
            });
        } else if let Some(rest) = line.strip_prefix('v') {
            let m = model.get_or_insert_with(|| vec![false; num_vars]);
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            let bitstring =
                tokens.len() == 1 && tokens[0].len() == num_vars && tokens[0].bytes().all(|b| b == b'0' || b == b'1');
            if bitstring {
                for (v, &b) in tokens[0].as_bytes().iter().enumerate() {
                    m[v] = b == b'1';
                }
                continue;
            }
            for t in tokens {
                let d: i64 = t.parse().map_err(|_| err(format!("bad model literal '{t}'")))?;
                if d == 0 {
                    break;
                }
                let v = d.unsigned_abs() as usize;
                if v > num_vars {
                    return Err(err(format!("model literal {d} exceeds {num_vars} variables")));
                }
                m[v - 1] = d > 0;
            }
        }
    }
    Ok(ModelOutput { verdict, model })
}

/// Parses a model (see [`parse_solver_output`]) and fails if none is present.
pub fn parse_model(text: &str, num_vars: usize) -> Result<Vec<bool>, MaxSatError> {
    parse_solver_output(text, num_vars)?.model.ok_or(MaxSatError::Parse { line: 0, msg: "no model line".into() })
}

/// Parses a model and checks it against the problem's hard clauses.
pub fn parse_verified_model(text: &str, problem: &WcnfProblem) -> Result<Vec<bool>, MaxSatError> {
    let model = parse_model(text, problem.num_vars())?;
    problem.verify_hard(&model)?;
    Ok(model)
}

/// Formats a model as a "v" line with signed literals.
pub fn format_model(model: &[bool]) -> String {
    let mut out = String::from("v");
    for (i, &b) in model.iter().enumerate() {
        let d = i as i64 + 1;
        write!(out, " {}", if b { d } else { -d }).unwrap();
    }
    out.push_str(" 0\n");
    out
}
