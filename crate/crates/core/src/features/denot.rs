//! Bitset kernels over one state. A concept denotation is `w` words over
//! `m` objects; a role denotation is `m` rows of `w` words, row `a` holding
//! the successors of `a`.

pub fn words(m: usize) -> usize {
    m.div_ceil(64).max(1)
}

#[inline]
pub fn get(bits: &[u64], i: usize) -> bool {
    bits[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub fn set(bits: &mut [u64], i: usize) {
    bits[i >> 6] |= 1 << (i & 63);
}

pub fn count(bits: &[u64]) -> u32 {
    bits.iter().map(|w| w.count_ones()).sum()
}

pub fn is_empty(bits: &[u64]) -> bool {
    bits.iter().all(|&w| w == 0)
}

pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + b)
        })
    })
}

pub fn fill(m: usize, dst: &mut [u64]) {
    dst.fill(0);
    for i in 0..m {
        set(dst, i);
    }
}

pub fn not(m: usize, src: &[u64], dst: &mut [u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = !s;
    }
    let tail = m % 64;
    let last = dst.len() - 1;
    if m == 0 {
        dst.fill(0);
    } else if tail != 0 {
        dst[last] &= (1u64 << tail) - 1;
    }
}

pub fn and(a: &[u64], b: &[u64], dst: &mut [u64]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x & y;
    }
}

pub fn exists(m: usize, w: usize, role: &[u64], c: &[u64], dst: &mut [u64]) {
    dst.fill(0);
    for a in 0..m {
        if intersects(&role[a * w..(a + 1) * w], c) {
            set(dst, a);
        }
    }
}

pub fn forall(m: usize, w: usize, role: &[u64], c: &[u64], dst: &mut [u64]) {
    dst.fill(0);
    for a in 0..m {
        if role[a * w..(a + 1) * w].iter().zip(c).all(|(r, x)| r & !x == 0) {
            set(dst, a);
        }
    }
}

pub fn equal(m: usize, w: usize, r1: &[u64], r2: &[u64], dst: &mut [u64]) {
    dst.fill(0);
    for a in 0..m {
        if r1[a * w..(a + 1) * w] == r2[a * w..(a + 1) * w] {
            set(dst, a);
        }
    }
}

pub fn transpose(m: usize, w: usize, role: &[u64], dst: &mut [u64]) {
    dst.fill(0);
    for a in 0..m {
        for b in ones(&role[a * w..(a + 1) * w]) {
            set(&mut dst[b * w..(b + 1) * w], a);
        }
    }
}

/// Non-reflexive transitive closure, in place.
pub fn closure(m: usize, w: usize, role: &mut [u64]) {
    for k in 0..m {
        let row_k: Vec<u64> = role[k * w..(k + 1) * w].to_vec();
        for a in 0..m {
            if get(&role[a * w..(a + 1) * w], k) {
                for (x, y) in role[a * w..(a + 1) * w].iter_mut().zip(&row_k) {
                    *x |= y;
                }
            }
        }
    }
}

/// Breadth-first layers from `from` along `role` steps into `restrict`.
/// `dist[b]` is the layer of `b`, or `m + 1` if unreachable.
pub fn layers(m: usize, w: usize, from: &[u64], role: &[u64], restrict: &[u64], dist: &mut [u32]) {
    let unreached = m as u32 + 1;
    dist.fill(unreached);
    let mut frontier = from.to_vec();
    let mut seen = from.to_vec();
    for a in ones(from) {
        dist[a] = 0;
    }
    let mut next = vec![0u64; w];
    let mut d = 0;
    while !is_empty(&frontier) {
        d += 1;
        next.fill(0);
        for a in ones(&frontier) {
            for (n, r) in next.iter_mut().zip(&role[a * w..(a + 1) * w]) {
                *n |= r;
            }
        }
        for i in 0..w {
            next[i] &= restrict[i] & !seen[i];
            seen[i] |= next[i];
        }
        for b in ones(&next) {
            dist[b] = d;
        }
        std::mem::swap(&mut frontier, &mut next);
    }
}

/// Smallest layer among the objects of `to`.
pub fn min_layer(m: usize, dist: &[u32], to: &[u64]) -> u32 {
    ones(to).map(|b| dist[b]).min().unwrap_or(m as u32 + 1)
}
