//! Weighted Max-SAT theory whose models are policies over selected features.

mod classes;
mod solution;
mod theory;

pub use classes::{change_code, compute_classes, decode_change, Classes, TransitionClass};
pub use solution::{decode, initial_pairs, pairs_to_text, parse_pairs, validate_solution, PairsFormatError, Solution};
pub use theory::{build_theory, ordered, ClauseTag, PairSet, Theory, VariableMap};
