//! Conflict-driven clause learning SAT solver.
//!
//! A compact MiniSat-style engine: two watched literals with blockers,
//! first-UIP learning with recursive minimization, VSIDS, phase saving,
//! Luby restarts and LBD-guided learnt clause reduction. Clauses can be
//! added between calls, which is what the optimizer and the solution
//! enumerators rely on.

use std::time::Instant;

use crate::heap::VarHeap;
use crate::lit::{LBool, Lit, Var};

const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f32,
    lbd: u32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Outcome of a satisfiability call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    /// A resource limit was hit before an answer was found.
    Unknown,
}

/// Resource limits for one call.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub max_conflicts: Option<u64>,
}

/// Search statistics, cumulative over the solver's lifetime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Debug, Clone)]
pub struct Solver {
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    order: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    analyze_stack: Vec<Lit>,
    analyze_toclear: Vec<Lit>,
    level_stamp: Vec<u64>,
    stamp: u64,
    max_learnts: f64,
    model: Vec<bool>,
    ok: bool,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            analyze_stack: Vec::new(),
            analyze_toclear: Vec::new(),
            level_stamp: Vec::new(),
            stamp: 0,
            max_learnts: 0.0,
            model: Vec::new(),
            ok: true,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Number of live original (non-learnt) clauses with two or more literals.
    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.polarity.push(false);
        self.seen.push(false);
        self.level_stamp.push(0);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.insert(v, &self.activity);
        Var(v)
    }

    /// Makes sure variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    /// Preferred polarity for the first decision on `var`; later decisions
    /// use the saved phase.
    pub fn set_phase(&mut self, var: Var, value: bool) {
        self.polarity[var.index()] = value;
    }

    /// False once the clause set is known to be unsatisfiable at level 0.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Model of the last successful call, indexed by variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    #[inline]
    fn value(&self, lit: Lit) -> LBool {
        match self.assigns[lit.var().index()] {
            LBool::Undef => LBool::Undef,
            LBool::True => LBool::from_bool(!lit.is_negated()),
            LBool::False => LBool::from_bool(lit.is_negated()),
        }
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause. Returns false if the formula became trivially unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let max_var = lits.iter().map(|l| l.var().index() + 1).max().unwrap_or(0);
        self.reserve_vars(max_var);

        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        for w in c.windows(2) {
            if w[0] == !w[1] {
                return true; // tautology
            }
        }
        let mut kept = Vec::with_capacity(c.len());
        for &l in &c {
            match self.value(l) {
                LBool::True => return true,
                LBool::False => {}
                LBool::Undef => kept.push(l),
            }
        }
        match kept.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                let cref = self.clauses.len() as u32;
                self.clauses.push(Clause { lits: kept, learnt: false, deleted: false, activity: 0.0, lbd: 0 });
                self.attach(cref);
                true
            }
        }
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (l0, l1) = (c.lits[0], c.lits[1]);
        self.watches[(!l0).code()].push(Watcher { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watcher { cref, blocker: l0 });
    }

    #[inline]
    fn enqueue(&mut self, lit: Lit, reason: u32) {
        let v = lit.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = LBool::from_bool(!lit.is_negated());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var();
            self.assigns[v.index()] = LBool::Undef;
            self.reason[v.index()] = NO_REASON;
            self.polarity[v.index()] = !lit.is_negated();
            self.order.insert(v.0, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let clause = &mut self.clauses[cref as usize];
                if clause.deleted {
                    continue;
                }
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let nw = Watcher { cref, blocker: first };
                let first_val = match self.assigns[first.var().index()] {
                    LBool::Undef => LBool::Undef,
                    LBool::True => LBool::from_bool(!first.is_negated()),
                    LBool::False => LBool::from_bool(first.is_negated()),
                };
                if first != w.blocker && first_val == LBool::True {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    let lv = self.assigns[l.var().index()];
                    let is_false = match lv {
                        LBool::Undef => false,
                        LBool::True => l.is_negated(),
                        LBool::False => !l.is_negated(),
                    };
                    if !is_false {
                        clause.lits.swap(1, k);
                        let new_watch = !clause.lits[1];
                        self.watches[new_watch.code()].push(nw);
                        continue 'watchers;
                    }
                }
                ws[j] = nw;
                j += 1;
                if first_val == LBool::False {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v.0, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: Var) -> u32 {
        1 << (self.level[v.index()] & 31)
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::from_dimacs(1)];
        let mut path_c = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = if p.is_some() { 1 } else { 0 };
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.bump_var(v);
                    self.seen[v.index()] = true;
                    if self.level[v.index()] >= self.decision_level() {
                        path_c += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            confl = self.reason[pl.var().index()];
            self.seen[pl.var().index()] = false;
            path_c -= 1;
            if path_c == 0 {
                break;
            }
        }
        learnt[0] = !p.expect("conflict at positive level has a UIP");

        // recursive minimization
        self.analyze_toclear.clear();
        self.analyze_toclear.extend_from_slice(&learnt);
        let mut abstract_levels = 0u32;
        for &l in &learnt[1..] {
            abstract_levels |= self.abstract_level(l.var());
        }
        let mut j = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var().index()] == NO_REASON || !self.lit_redundant(l, abstract_levels) {
                learnt[j] = l;
                j += 1;
            }
        }
        learnt.truncate(j);

        let bt_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        for k in 0..self.analyze_toclear.len() {
            let v = self.analyze_toclear[k].var();
            self.seen[v.index()] = false;
        }
        (learnt, bt_level)
    }

    fn lit_redundant(&mut self, p: Lit, abstract_levels: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_toclear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[q.var().index()];
            debug_assert_ne!(cref, NO_REASON);
            let len = self.clauses[cref as usize].lits.len();
            for k in 1..len {
                let l = self.clauses[cref as usize].lits[k];
                let v = l.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    if self.reason[v.index()] != NO_REASON && (self.abstract_level(v) & abstract_levels) != 0 {
                        self.seen[v.index()] = true;
                        self.analyze_stack.push(l);
                        self.analyze_toclear.push(l);
                    } else {
                        for t in top..self.analyze_toclear.len() {
                            let tv = self.analyze_toclear[t].var();
                            self.seen[tv.index()] = false;
                        }
                        self.analyze_toclear.truncate(top);
                        return false;
                    }
                }
            }
        }
        true
    }

    fn compute_lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut n = 0;
        for &l in lits {
            let lvl = self.level[l.var().index()] as usize;
            if lvl >= self.level_stamp.len() {
                self.level_stamp.resize(lvl + 1, 0);
            }
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                n += 1;
            }
        }
        n
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        self.reason[l0.var().index()] == cref && self.value(l0) == LBool::True
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.retain(|&c| !self.clauses[c as usize].deleted);
        learnts.sort_by(|&a, &b| {
            let ca = &self.clauses[a as usize];
            let cb = &self.clauses[b as usize];
            cb.lbd.cmp(&ca.lbd).then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (i, &cref) in learnts.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lbd > 2 && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    fn pick_branch_lit(&mut self) -> Option<Lit> {
        loop {
            let v = self.order.pop(&self.activity)?;
            if self.assigns[v as usize] == LBool::Undef {
                self.stats.decisions += 1;
                return Some(Var(v).lit(self.polarity[v as usize]));
            }
        }
    }

    fn luby(y: f64, mut x: u64) -> f64 {
        let mut size = 1u64;
        let mut seq = 0u32;
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        y.powi(seq as i32)
    }

    fn search(&mut self, nof_conflicts: u64, assumptions: &[Lit], limits: &Limits, start_conflicts: u64) -> SatStatus {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SatStatus::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.compute_lbd(&learnt);
                    let cref = self.clauses.len() as u32;
                    let first = learnt[0];
                    self.clauses.push(Clause { lits: learnt, learnt: true, deleted: false, activity: 0.0, lbd });
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;

                if self.stats.conflicts.is_multiple_of(256) {
                    if let Some(d) = limits.deadline {
                        if Instant::now() >= d {
                            return SatStatus::Unknown;
                        }
                    }
                }
                if let Some(m) = limits.max_conflicts {
                    if self.stats.conflicts - start_conflicts >= m {
                        return SatStatus::Unknown;
                    }
                }
            } else {
                if conflicts_here >= nof_conflicts {
                    self.cancel_until(0);
                    self.stats.restarts += 1;
                    return SatStatus::Unknown;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match self.value(a) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => return SatStatus::Unsat,
                        LBool::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let lit = match next {
                    Some(l) => l,
                    None => match self.pick_branch_lit() {
                        Some(l) => l,
                        None => return SatStatus::Sat,
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, NO_REASON);
            }
        }
    }

    pub fn solve(&mut self) -> SatStatus {
        self.solve_limited(&[], &Limits::default())
    }

    /// Solves under assumptions (which hold only for this call). An
    /// `Unsat` answer with non-empty assumptions does not mark the
    /// solver itself as unsatisfiable.
    pub fn solve_limited(&mut self, assumptions: &[Lit], limits: &Limits) -> SatStatus {
        self.model.clear();
        if !self.ok {
            return SatStatus::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SatStatus::Unsat;
        }
        let n = self.num_vars();
        self.order.rebuild((0..n as u32).filter(|&v| self.assigns[v as usize] == LBool::Undef), &self.activity);
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(2000.0);
        let start_conflicts = self.stats.conflicts;
        let mut restart = 0u64;
        loop {
            let budget = (Self::luby(2.0, restart) * 100.0) as u64;
            restart += 1;
            let status = self.search(budget, assumptions, limits, start_conflicts);
            match status {
                SatStatus::Sat => {
                    self.model = self.assigns.iter().map(|&a| a == LBool::True).collect();
                    self.cancel_until(0);
                    return SatStatus::Sat;
                }
                SatStatus::Unsat => {
                    self.cancel_until(0);
                    return SatStatus::Unsat;
                }
                SatStatus::Unknown => {
                    let out_of_time = limits.deadline.is_some_and(|d| Instant::now() >= d);
                    let out_of_conflicts =
                        limits.max_conflicts.is_some_and(|m| self.stats.conflicts - start_conflicts >= m);
                    if out_of_time || out_of_conflicts {
                        self.cancel_until(0);
                        return SatStatus::Unknown;
                    }
                }
            }
        }
    }
}
