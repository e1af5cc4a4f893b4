//! Description-logic features: expressions, denotations and pool generation.

mod denot;
mod expr;
mod pool;
mod vocab;

pub use expr::{parse_concept, parse_feature, parse_role, Concept, Feature, FeatureKind, Role};
pub use pool::{change, generate_pool, ChangeValue, Dir, FeatureMatrix, FeaturePool, PoolConfig, PoolStats};
pub use vocab::{InstanceView, Vocabulary, VocabularyOptions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("cannot parse '{text}': {msg}")]
    Syntax { text: String, msg: String },
    #[error("predicate '{predicate}' has arity {arity}; only arities up to 2 enter the grammar")]
    HighArity { predicate: String, arity: usize },
    #[error("pool exceeds {limit} {what}")]
    PoolCap { what: &'static str, limit: usize },
    #[error("feature {feature} refers to unknown symbol '{symbol}'")]
    UnknownSymbol { feature: String, symbol: String },
    #[error("feature file line {line}: {msg}")]
    Format { line: usize, msg: String },
}
