//! Sequential weight counter: a CNF circuit whose output `at_least(j)` is
//! forced true whenever the weighted sum of true inputs reaches `j`.
//!
//! Only the upward direction is encoded, which is all an upper bound needs:
//! asserting `!at_least(k)` forbids every assignment of weight `k` or more.
//! Sums beyond the cap saturate at the cap.

use crate::lit::{Lit, Var};
use crate::solver::Solver;

#[derive(Debug, Clone)]
pub struct WeightCounter {
    cap: u64,
    // outputs[j - 1] is implied by "sum >= j"
    outputs: Vec<Lit>,
}

impl WeightCounter {
    /// Builds the circuit over `(input, weight)` pairs, with sums counted up to `cap`.
    pub fn build(solver: &mut Solver, inputs: &[(Lit, u64)], cap: u64) -> Self {
        assert!(cap >= 1, "counter cap must be positive");
        let k = cap as usize;
        let mut prev: Option<Vec<Lit>> = None;
        for &(x, w) in inputs {
            debug_assert!(w > 0);
            let w = w.min(cap) as usize;
            let cur: Vec<Lit> = (0..k).map(|_| solver.new_var().pos()).collect();
            // x -> s[j] for j <= w
            for &s in &cur[..w] {
                solver.add_clause(&[!x, s]);
            }
            if let Some(p) = &prev {
                for j in 0..k {
                    // s_prev[j] -> s[j]
                    solver.add_clause(&[!p[j], cur[j]]);
                    // x & s_prev[j] -> s[min(j + w, k - 1)]
                    if j + 1 < k {
                        solver.add_clause(&[!x, !p[j], cur[(j + w).min(k - 1)]]);
                    }
                }
            }
            prev = Some(cur);
        }
        let outputs = match prev {
            Some(p) => p,
            None => {
                // no inputs: the sum is always zero
                let v: Var = solver.new_var();
                solver.add_clause(&[v.neg()]);
                vec![v.pos(); k]
            }
        };
        WeightCounter { cap, outputs }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Literal implied by "weighted sum >= j", for `1 <= j <= cap`.
    pub fn at_least(&self, j: u64) -> Lit {
        assert!(j >= 1 && j <= self.cap, "bound {j} outside 1..={}", self.cap);
        self.outputs[(j - 1) as usize]
    }
}
