//! STRIPS front end: PDDL parsing, grounding and state semantics.

mod ground;
mod model;
mod parse;
mod print;
pub mod sexpr;
mod state;

pub use ground::{ground, ground_with_limits, GroundAction, GroundAtom, GroundProblem, GroundingLimits, PredicateInfo};
pub use model::*;
pub use parse::{parse_domain, parse_instance, validate_instance, GOAL_PARAMETER_DIRECTIVE};
pub use print::{domain_to_pddl, instance_to_pddl};
pub use state::State;

use sexpr::Pos;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PddlError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("unsupported PDDL feature at {pos}: {construct}")]
    Unsupported { pos: Pos, construct: String },
    #[error("{0}")]
    Semantic(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
}

impl PddlError {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        PddlError::Syntax { pos, msg: msg.into() }
    }

    pub(crate) fn semantic(msg: impl Into<String>) -> Self {
        PddlError::Semantic(msg.into())
    }
}
