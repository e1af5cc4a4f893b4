use std::fmt;

/// A set of true ground atoms, stored as a bitset over atom ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    words: Box<[u64]>,
}

impl State {
    pub fn empty(num_atoms: usize) -> Self {
        State { words: vec![0; num_atoms.div_ceil(64)].into_boxed_slice() }
    }

    pub fn from_atoms(num_atoms: usize, atoms: impl IntoIterator<Item = u32>) -> Self {
        let mut s = State::empty(num_atoms);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    #[inline]
    pub fn contains(&self, atom: u32) -> bool {
        self.words[(atom >> 6) as usize] >> (atom & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, atom: u32) {
        self.words[(atom >> 6) as usize] |= 1 << (atom & 63);
    }

    #[inline]
    pub fn remove(&mut self, atom: u32) {
        self.words[(atom >> 6) as usize] &= !(1 << (atom & 63));
    }

    pub fn contains_all(&self, atoms: &[u32]) -> bool {
        atoms.iter().all(|&a| self.contains(a))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// True atom ids in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((i as u32) << 6 | b)
            })
        })
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.atoms()).finish()
    }
}
