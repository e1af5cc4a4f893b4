//! Solves a small weighted partial Max-SAT problem with the embedded solver
//! and round-trips it through the WCNF text format.

use genplan_maxsat::{format_model, solve, Lit, SolveOptions, WcnfProblem};

fn lits(ds: &[i32]) -> Vec<Lit> {
    ds.iter().map(|&d| Lit::from_dimacs(d)).collect()
}

fn main() {
    // Pick features 1..4 so that every "pair" (hard clause) is covered at
    // least once, paying the feature weight for each selection.
    let mut p = WcnfProblem::new(4);
    for c in [&[1, 2][..], &[2, 3], &[3, 4], &[1, 4], &[1, 3]] {
        p.add_hard(lits(c)).unwrap();
    }
    for (v, w) in [(1, 3), (2, 2), (3, 2), (4, 4)] {
        p.add_soft(lits(&[-v]), w).unwrap();
    }
    let text = p.to_wcnf_string();
    print!("{text}");
    let reread = WcnfProblem::parse_wcnf(&text).expect("round trip");
    assert_eq!(reread.to_wcnf_string(), text);

    let result = solve(&reread, &SolveOptions::default());
    println!("optimum cost {:?}", result.cost());
    print!("{}", format_model(result.model().expect("satisfiable")));
    println!("{:?}", result.stats);
}
