use std::collections::BTreeMap;

use super::{Effect, EffectSet, Policy, Rule};
use crate::encoding::{decode_change, validate_solution, Classes};
use crate::features::{Dir, Feature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("classes {0} and {1} look the same under the selected features but only one is good")]
pub struct ExtractError(pub u32, pub u32);

/// Builds one rule per source valuation of the selected features seen on a
/// good class, with one effect per distinct change pattern.
pub fn extract_policy(
    pool: &[Feature],
    selected: &[usize],
    classes: &Classes,
    good: &[bool],
) -> Result<Policy, ExtractError> {
    if let Some(&(a, b)) = validate_solution(classes, selected, good).first() {
        return Err(ExtractError(a, b));
    }
    let features: Vec<Feature> = selected.iter().map(|&f| pool[f].clone()).collect();
    let mut rules: BTreeMap<Vec<bool>, Vec<EffectSet>> = BTreeMap::new();
    for (c, class) in classes.classes.iter().enumerate() {
        if !good[c] {
            continue;
        }
        let mut body = Vec::with_capacity(selected.len());
        let mut effect = Vec::with_capacity(selected.len());
        for (&f, feature) in selected.iter().zip(&features) {
            let cv = decode_change(class.key[f]);
            body.push(cv.src);
            effect.push(match (cv.dir, feature.boolean) {
                (Dir::Same, _) => None,
                (Dir::Up, true) => Some(Effect::Set(true)),
                (Dir::Down, true) => Some(Effect::Set(false)),
                (Dir::Up, false) => Some(Effect::Inc),
                (Dir::Down, false) => Some(Effect::Dec),
            });
        }
        let effects = rules.entry(body).or_default();
        if !effects.contains(&effect) {
            effects.push(effect);
        }
    }
    let rules = rules
        .into_iter()
        .map(|(body, mut effects)| {
            effects.sort();
            Rule { body: body.into_iter().map(Some).collect(), effects }
        })
        .collect();
    Ok(Policy { features, rules })
}
