use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classes::Classes;
use super::theory::{ordered, PairSet, Theory};
use crate::statespace::SampleSet;

/// All pairs of classes that leave a common state, plus `extra` random pairs.
pub fn initial_pairs(sample: &SampleSet, classes: &Classes, seed: u64, extra: usize) -> PairSet {
    let mut pairs = PairSet::new();
    for (i, space) in sample.spaces.iter().enumerate() {
        let t_off = sample.transition_offset(i);
        for s in 0..space.num_states() as u32 {
            let out: BTreeSet<u32> = space.outgoing_range(s).filter_map(|k| classes.class_of(t_off + k)).collect();
            let out: Vec<u32> = out.into_iter().collect();
            for a in 0..out.len() {
                for b in a + 1..out.len() {
                    pairs.insert((out[a], out[b]));
                }
            }
        }
    }
    let n = classes.len() as u32;
    if n >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n - 1);
            let b = if b >= a { b + 1 } else { b };
            pairs.insert(ordered(a, b));
        }
    }
    pairs
}

/// Selected features, class labels and cost read off a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub selected: Vec<usize>,
    pub good: Vec<bool>,
    pub cost: u64,
}

pub fn decode(theory: &Theory, model: &[bool], weights: &[u32]) -> Solution {
    if let Some(i) = theory.problem.first_violated_hard(model) {
        panic!("model violates hard clause {i} ({})", theory.tags[i]);
    }
    let v = &theory.vars;
    let selected: Vec<usize> = (0..v.num_features).filter(|&f| model[v.select(f).index()]).collect();
    let good = (0..v.num_classes as u32).map(|c| model[v.good(c).index()]).collect();
    let cost = selected.iter().map(|&f| weights[f] as u64).sum();
    Solution { selected, good, cost }
}

/// Class pairs, one good and one not, that no selected feature separates.
pub fn validate_solution(classes: &Classes, selected: &[usize], good: &[bool]) -> Vec<(u32, u32)> {
    let mut buckets: HashMap<Vec<u8>, (Vec<u32>, Vec<u32>)> = HashMap::new();
    for (c, class) in classes.classes.iter().enumerate() {
        let key: Vec<u8> = selected.iter().map(|&f| class.key[f]).collect();
        let entry = buckets.entry(key).or_default();
        if good[c] {
            entry.0.push(c as u32);
        } else {
            entry.1.push(c as u32);
        }
    }
    let mut out = Vec::new();
    for (goods, bads) in buckets.values() {
        for &g in goods {
            for &b in bads {
                out.push(ordered(g, b));
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, thiserror::Error)]
#[error("pair file line {line}: {msg}")]
pub struct PairsFormatError {
    pub line: usize,
    pub msg: String,
}

/// `genplan-pairs 1`, then one `a b` line per class pair.
pub fn pairs_to_text(pairs: &PairSet) -> String {
    let mut out = String::from("genplan-pairs 1\n");
    for (a, b) in pairs {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}

/// Reads [`pairs_to_text`] output; every class id must be below `num_classes`.
pub fn parse_pairs(text: &str, num_classes: usize) -> Result<PairSet, PairsFormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "genplan-pairs 1" => {}
        Some((i, l)) => {
            return Err(PairsFormatError { line: i + 1, msg: format!("unsupported header '{}'", l.trim()) })
        }
        None => return Err(PairsFormatError { line: 0, msg: "empty pair file".into() }),
    }
    let mut pairs = PairSet::new();
    for (i, line) in lines {
        let err = |msg: String| PairsFormatError { line: i + 1, msg };
        let ids: Vec<u32> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(format!("bad class id '{t}'"))))
            .collect::<Result<_, _>>()?;
        let [a, b] = ids[..] else { return Err(err("expected two class ids".into())) };
        if a == b || a as usize >= num_classes || b as usize >= num_classes {
            return Err(err(format!("invalid pair {a} {b} for {num_classes} classes")));
        }
        pairs.insert(ordered(a, b));
    }
    Ok(pairs)
}
