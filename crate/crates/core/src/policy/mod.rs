//! Feature-based policies: rules, extraction, verification and execution.

mod exec;
mod extract;
mod verify;

use std::fmt;
use std::fmt::Write as _;

pub use exec::{greedy_execute, Execution, Failure, TieBreak};
pub use extract::{extract_policy, ExtractError};
pub use verify::{check_complete, check_descending, verify_exhaustive, Descending, Verdict, VerificationReport};

use crate::features::{parse_feature, Feature, FeatureError};

/// One atomic effect on a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    /// Boolean feature becomes true / false.
    Set(bool),
    Inc,
    Dec,
}

/// Per-feature effects; `None` means the feature keeps its value.
pub type EffectSet = Vec<Option<Effect>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    /// Required boolean counterpart per feature; `None` leaves it open.
    pub body: Vec<Option<bool>>,
    pub effects: Vec<EffectSet>,
}

impl Rule {
    pub fn matches(&self, before: &[u32]) -> bool {
        self.body.iter().zip(before).all(|(lit, &v)| lit.is_none_or(|b| b == (v > 0)))
    }
}

/// True iff the change from `before` to `after` satisfies `effect`.
pub fn satisfies(effect: &[Option<Effect>], before: &[u32], after: &[u32]) -> bool {
    effect.iter().zip(before.iter().zip(after)).all(|(e, (&x, &y))| match e {
        None => x == y,
        Some(Effect::Set(b)) => (y > 0) == *b,
        Some(Effect::Inc) => y > x,
        Some(Effect::Dec) => y < x,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub features: Vec<Feature>,
    pub rules: Vec<Rule>,
}

impl Policy {
    pub fn cost(&self) -> u32 {
        self.features.iter().map(Feature::weight).sum()
    }

    /// A transition with feature values `before` → `after` is compatible if
    /// some rule whose body holds has an effect it satisfies.
    pub fn compatible(&self, before: &[u32], after: &[u32]) -> bool {
        self.rules.iter().any(|r| r.matches(before) && r.effects.iter().any(|e| satisfies(e, before, after)))
    }

    fn literal_name(i: usize) -> String {
        format!("f{i}")
    }

    /// Text form: a header, one `feature` line per feature and one rule per
    /// line, `{f0, !f1, f2=0} -> {!f0, f2++} | {f1}`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("genplan-policy 1\n");
        for (i, f) in self.features.iter().enumerate() {
            writeln!(out, "feature {i} {} {} {f}", f.weight(), if f.boolean { "bool" } else { "num" }).unwrap();
        }
        for r in &self.rules {
            let body: Vec<String> = r
                .body
                .iter()
                .enumerate()
                .filter_map(|(i, lit)| {
                    let name = Self::literal_name(i);
                    lit.map(|b| match (self.features[i].boolean, b) {
                        (true, true) => name,
                        (true, false) => format!("!{name}"),
                        (false, true) => format!("{name}>0"),
                        (false, false) => format!("{name}=0"),
                    })
                })
                .collect();
            let effects: Vec<String> = r
                .effects
                .iter()
                .map(|e| {
                    let parts: Vec<String> = e
                        .iter()
                        .enumerate()
                        .filter_map(|(i, eff)| {
                            let name = Self::literal_name(i);
                            eff.map(|x| match x {
                                Effect::Set(true) => name,
                                Effect::Set(false) => format!("!{name}"),
                                Effect::Inc => format!("{name}++"),
                                Effect::Dec => format!("{name}--"),
                            })
                        })
                        .collect();
                    format!("{{{}}}", parts.join(", "))
                })
                .collect();
            writeln!(out, "{{{}}} -> {}", body.join(", "), effects.join(" | ")).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, PolicyError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        match lines.next() {
            Some((_, l)) if l.trim() == "genplan-policy 1" => {}
            Some((i, l)) => return Err(PolicyError::at(i, format!("unsupported header '{}'", l.trim()))),
            None => return Err(PolicyError::at(0, "empty policy file")),
        }
        let mut features: Vec<Feature> = Vec::new();
        let mut rules = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("feature ") {
                if !rules.is_empty() {
                    return Err(PolicyError::at(i, "feature lines must precede rules"));
                }
                let parts: Vec<&str> = rest.trim().splitn(4, char::is_whitespace).collect();
                if parts.len() != 4 {
                    return Err(PolicyError::at(i, "expected 'feature id weight kind expression'"));
                }
                if parts[0].parse::<usize>().ok() != Some(features.len()) {
                    return Err(PolicyError::at(i, format!("feature ids must be consecutive, found '{}'", parts[0])));
                }
                let boolean = match parts[2] {
                    "bool" => true,
                    "num" => false,
                    k => return Err(PolicyError::at(i, format!("unknown feature kind '{k}'"))),
                };
                let f =
                    parse_feature(parts[3], boolean).map_err(|e| PolicyError::Feature { line: i + 1, source: e })?;
                if parts[1].parse::<u32>().ok() != Some(f.weight()) {
                    return Err(PolicyError::at(
                        i,
                        format!("weight {} disagrees with {} for {f}", parts[1], f.weight()),
                    ));
                }
                features.push(f);
            } else {
                rules.extend(parse_rule(line, &features).map_err(|m| PolicyError::at(i, m))?);
            }
        }
        Ok(Policy { features, rules })
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("policy line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("policy line {line}: {source}")]
    Feature { line: usize, source: FeatureError },
}

impl PolicyError {
    fn at(i: usize, msg: impl Into<String>) -> Self {
        PolicyError::Syntax { line: i + 1, msg: msg.into() }
    }
}

fn feature_index(name: &str, features: &[Feature]) -> Result<usize, String> {
    name.strip_prefix('f')
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&i| i < features.len())
        .ok_or_else(|| format!("unknown feature '{name}'"))
}

fn braced(text: &str) -> Result<Vec<&str>, String> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| format!("expected '{{...}}', found '{}'", text.trim()))?;
    Ok(inner.split(',').map(str::trim).filter(|t| !t.is_empty()).collect())
}

/// Parses one rule line. A `?` body literal (`f3?`) stands for both values and
/// expands the line into several rules; a `?` effect (`f3?`) allows any change
/// of that feature, including none.
fn parse_rule(line: &str, features: &[Feature]) -> Result<Vec<Rule>, String> {
    let (body, effects) = line
        .split_once("->")
        .or_else(|| line.split_once('↦'))
        .ok_or_else(|| "expected 'body -> effect | ...'".to_string())?;
    let mut bodies: Vec<Vec<Option<bool>>> = vec![vec![None; features.len()]];
    let mut seen = vec![false; features.len()];
    for lit in braced(body)? {
        let (name, value) = if let Some(n) = lit.strip_suffix("=0") {
            (n, Some(false))
        } else if let Some(n) = lit.strip_suffix(">0") {
            (n, Some(true))
        } else if let Some(n) = lit.strip_suffix('?') {
            (n, None)
        } else if let Some(n) = lit.strip_prefix('!') {
            (n, Some(false))
        } else {
            (lit, Some(true))
        };
        let i = feature_index(name.trim(), features)?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(format!("feature f{i} appears twice in a body"));
        }
        let numeric_literal = lit.ends_with("=0") || lit.ends_with(">0");
        if value.is_some() && numeric_literal == features[i].boolean {
            return Err(format!("literal '{lit}' does not fit the kind of f{i}"));
        }
        match value {
            Some(b) => bodies.iter_mut().for_each(|body| body[i] = Some(b)),
            None => {
                bodies = bodies
                    .into_iter()
                    .flat_map(|body| {
                        [false, true].map(|b| {
                            let mut x = body.clone();
                            x[i] = Some(b);
                            x
                        })
                    })
                    .collect()
            }
        }
    }
    let mut parsed = Vec::new();
    for eff in effects.split('|') {
        let mut alternatives = vec![vec![None; features.len()]];
        let mut seen = vec![false; features.len()];
        for atom in braced(eff)? {
            let (name, values) = if let Some(n) = atom.strip_suffix('?') {
                (n, None)
            } else if let Some(n) = atom.strip_suffix("++") {
                (n, Some(Effect::Inc))
            } else if let Some(n) = atom.strip_suffix("--") {
                (n, Some(Effect::Dec))
            } else if let Some(n) = atom.strip_prefix('!') {
                (n, Some(Effect::Set(false)))
            } else {
                (atom, Some(Effect::Set(true)))
            };
            let i = feature_index(name.trim(), features)?;
            if values.is_some_and(|v| matches!(v, Effect::Set(_)) != features[i].boolean) {
                return Err(format!("effect '{atom}' does not fit the kind of f{i}"));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(format!("feature f{i} appears twice in an effect"));
            }
            let options: Vec<Option<Effect>> = match values {
                Some(v) => vec![Some(v)],
                None if features[i].boolean => vec![None, Some(Effect::Set(true)), Some(Effect::Set(false))],
                None => vec![None, Some(Effect::Inc), Some(Effect::Dec)],
            };
            alternatives = alternatives
                .into_iter()
                .flat_map(|e| {
                    options.iter().map(move |&o| {
                        let mut x = e.clone();
                        x[i] = o;
                        x
                    })
                })
                .collect();
        }
        for e in alternatives {
            if !parsed.contains(&e) {
                parsed.push(e);
            }
        }
    }
    Ok(bodies.into_iter().map(|body| Rule { body, effects: parsed.clone() }).collect())
}
