use std::collections::HashMap;

use crate::features::{ChangeValue, Dir, FeatureMatrix};
use crate::statespace::SampleSet;

/// Packs a change value into a byte: bit 2 holds the source value, the low
/// bits the direction.
pub fn change_code(c: ChangeValue) -> u8 {
    let dir = match c.dir {
        Dir::Same => 0,
        Dir::Up => 1,
        Dir::Down => 2,
    };
    (c.src as u8) << 2 | dir
}

pub fn decode_change(code: u8) -> ChangeValue {
    let dir = match code & 3 {
        0 => Dir::Same,
        1 => Dir::Up,
        _ => Dir::Down,
    };
    ChangeValue { src: code & 4 != 0, dir }
}

/// Transitions that no pool feature tells apart and that agree on whether
/// they lead into a dead-end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionClass {
    pub deadend_target: bool,
    /// Change code of every pool feature.
    pub key: Vec<u8>,
    /// Global transition ids, ascending; the first is the representative.
    pub members: Vec<usize>,
}

impl TransitionClass {
    pub fn representative(&self) -> usize {
        self.members[0]
    }
}

#[derive(Debug, Clone, Default)]
pub struct Classes {
    pub classes: Vec<TransitionClass>,
    /// Class of each global transition; `None` unless the source is alive.
    pub of_transition: Vec<Option<u32>>,
}

impl Classes {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, transition: usize) -> Option<u32> {
        self.of_transition[transition]
    }
}

/// Partitions the transitions leaving alive states. With `merge` off every
/// transition is its own class.
pub fn compute_classes(sample: &SampleSet, matrix: &FeatureMatrix, merge: bool) -> Classes {
    let mut out = Classes { classes: Vec::new(), of_transition: vec![None; sample.num_transitions()] };
    let mut index: HashMap<(bool, Vec<u8>), u32> = HashMap::new();
    for (i, space) in sample.spaces.iter().enumerate() {
        for (k, t) in space.transitions.iter().enumerate() {
            if !space.is_alive(t.src) {
                continue;
            }
            let global = sample.transition_offset(i) + k;
            let (s, d) = (sample.global_state(i, t.src), sample.global_state(i, t.dst));
            let key: Vec<u8> = (0..matrix.num_features()).map(|f| change_code(matrix.delta(f, s, d))).collect();
            let deadend_target = space.is_deadend(t.dst);
            let id = if merge {
                *index.entry((deadend_target, key.clone())).or_insert_with(|| {
                    out.classes.push(TransitionClass { deadend_target, key, members: Vec::new() });
                    out.classes.len() as u32 - 1
                })
            } else {
                out.classes.push(TransitionClass { deadend_target, key, members: Vec::new() });
                out.classes.len() as u32 - 1
            };
            out.classes[id as usize].members.push(global);
            out.of_transition[global] = Some(id);
        }
    }
    out
}
