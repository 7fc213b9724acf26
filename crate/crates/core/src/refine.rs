//! Signature refinement engines for pair colorings and tuple colorings.
//!
//! Every engine can refine several structures at once under one naming
//! dictionary. New colors are ranks of signatures in sorted order, so names
//! never depend on point labels.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

/// Largest R² for which triple counts use a dense scratch array.
const DENSE_LIMIT: usize = 1 << 22;

#[inline]
pub(crate) fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic hasher used for history fingerprints.
pub(crate) struct StableHasher(u64);

impl StableHasher {
    pub fn new() -> Self {
        StableHasher(0x51_7cc1_b727_220a)
    }
}

impl Hasher for StableHasher {
    fn finish(&self) -> u64 {
        mix(self.0)
    }
    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.0 = mix(self.0 ^ u64::from_le_bytes(buf));
        }
    }
    fn write_u32(&mut self, i: u32) {
        self.0 = mix(self.0 ^ i as u64);
    }
    fn write_u64(&mut self, i: u64) {
        self.0 = mix(self.0 ^ i);
    }
    fn write_usize(&mut self, i: usize) {
        self.0 = mix(self.0 ^ i as u64);
    }
}

pub(crate) fn fingerprint<T: Hash>(value: &T) -> u64 {
    let mut h = StableHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// Signature of a pair: old color, color of the transpose, and the multiset
/// of (c(α,γ), c(γ,β)) over γ as sorted (r, s, count) triples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairSig {
    pub old: u32,
    pub transpose: u32,
    pub counts: Box<[(u32, u32, u32)]>,
}

/// Signature of a tuple: old color and the multiset over α of the packed
/// substitution colors (c(x_{1←α}), …, c(x_{m←α})).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleSig {
    pub old: u32,
    pub counts: Box<[(u128, u32)]>,
}

/// Per-round record: distinct signatures in name order, and for each
/// structure the number of cells carrying each name.
#[derive(Clone, Debug)]
pub(crate) struct RoundTrace<S> {
    pub sigs: Vec<S>,
    pub counts: Vec<Vec<u32>>,
}

pub(crate) struct Refined<S> {
    pub colors: Vec<Vec<u32>>,
    pub rank: usize,
    pub iterations: usize,
    pub rounds: Vec<RoundTrace<S>>,
    /// Index of the first round whose per-structure censuses differ.
    pub diverged_at: Option<usize>,
}

/// Label-independent refinement history of a single structure: the sorted
/// initial keys with multiplicities, then each round's signatures with
/// multiplicities. Two runs are synchronized iff their histories are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History<S> {
    pub initial: Vec<(Vec<u32>, u32)>,
    pub rounds: Vec<Vec<(S, u32)>>,
}

impl<S: Hash> History<S> {
    pub fn fingerprint(&self) -> u64 {
        fingerprint(self)
    }
}

impl<S: Clone> History<S> {
    pub(crate) fn from_single(initial: Vec<(Vec<u32>, u32)>, refined: &Refined<S>) -> Self {
        let rounds = refined
            .rounds
            .iter()
            .map(|r| {
                r.sigs
                    .iter()
                    .cloned()
                    .zip(r.counts[0].iter().copied())
                    .collect()
            })
            .collect();
        History { initial, rounds }
    }
}

/// Names keys jointly across structures by rank in the sorted distinct list.
pub(crate) fn name_keys<K: Ord + Clone>(structs: &[&[K]]) -> (Vec<Vec<u32>>, Vec<K>) {
    let mut distinct: Vec<K> = structs.iter().flat_map(|s| s.iter().cloned()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let names = structs
        .iter()
        .map(|s| {
            s.iter()
                .map(|k| distinct.binary_search(k).unwrap() as u32)
                .collect()
        })
        .collect();
    (names, distinct)
}

/// Histogram of names per structure.
pub(crate) fn census(colors: &[u32], rank: usize) -> Vec<u32> {
    let mut c = vec![0u32; rank];
    for &x in colors {
        c[x as usize] += 1;
    }
    c
}

/// Sorted distinct initial keys with their multiplicity in one structure.
pub(crate) fn initial_census<K: Ord + Clone>(
    names: &[u32],
    distinct: &[K],
    encode: impl Fn(&K) -> Vec<u32>,
) -> Vec<(Vec<u32>, u32)> {
    let counts = census(names, distinct.len());
    distinct
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(k, c)| (encode(k), c))
        .collect()
}

struct Interner<S> {
    sigs: Vec<S>,
    next: Vec<u32>,
    index: HashMap<(u32, u32, u64), u32>,
}

impl<S> Interner<S> {
    fn new() -> Self {
        Interner {
            sigs: Vec::new(),
            next: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn intern(&mut self, key: (u32, u32, u64), eq: impl Fn(&S) -> bool, make: impl FnOnce() -> S) -> u32 {
        let fresh = self.sigs.len() as u32;
        match self.index.get(&key) {
            None => {
                self.index.insert(key, fresh);
            }
            Some(&head) => {
                let mut i = head;
                loop {
                    if eq(&self.sigs[i as usize]) {
                        return i;
                    }
                    if self.next[i as usize] == u32::MAX {
                        break;
                    }
                    i = self.next[i as usize];
                }
                self.next[i as usize] = fresh;
            }
        }
        self.sigs.push(make());
        self.next.push(u32::MAX);
        fresh
    }
}

/// Drives rounds until the joint color count stops growing.
fn drive<S: Ord + Clone>(
    mut structs: Vec<Vec<u32>>,
    mut rank: usize,
    stop_on_divergence: bool,
    mut round: impl FnMut(&[Vec<u32>], usize) -> (Vec<S>, Vec<Vec<u32>>),
) -> Refined<S> {
    let mut rounds = Vec::new();
    let mut iterations = 0;
    let mut diverged_at = None;
    if structs.len() > 1 {
        let c0 = census(&structs[0], rank);
        if structs[1..].iter().any(|s| census(s, rank) != c0) {
            diverged_at = Some(0);
            if stop_on_divergence {
                return Refined { colors: structs, rank, iterations, rounds, diverged_at };
            }
        }
    }
    loop {
        let (sigs, assigns) = round(&structs, rank);
        let mut order: Vec<u32> = (0..sigs.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| sigs[a as usize].cmp(&sigs[b as usize]));
        let mut name = vec![0u32; sigs.len()];
        for (k, &i) in order.iter().enumerate() {
            name[i as usize] = k as u32;
        }
        let new_rank = sigs.len();
        let mut counts = Vec::with_capacity(assigns.len());
        for (s, assign) in structs.iter_mut().zip(assigns) {
            for (dst, a) in s.iter_mut().zip(assign) {
                *dst = name[a as usize];
            }
            counts.push(census(s, new_rank));
        }
        let mut sigs_opt: Vec<Option<S>> = sigs.into_iter().map(Some).collect();
        let sorted: Vec<S> = order.iter().map(|&i| sigs_opt[i as usize].take().unwrap()).collect();
        let round_index = rounds.len() + 1;
        let diverged = counts.len() > 1 && counts[1..].iter().any(|c| *c != counts[0]);
        rounds.push(RoundTrace { sigs: sorted, counts });
        if diverged && diverged_at.is_none() {
            diverged_at = Some(round_index);
        }
        if new_rank == rank || (diverged && stop_on_divergence) {
            rank = new_rank;
            break;
        }
        rank = new_rank;
        iterations += 1;
    }
    Refined { colors: structs, rank, iterations, rounds, diverged_at }
}

/// Classical pair refinement. `presence` replaces counts by 1, giving a
/// coarser set-valued refinement used for q-free class correspondences.
pub(crate) fn refine_pairs(
    structs: Vec<Vec<u32>>,
    ns: &[usize],
    rank: usize,
    presence: bool,
    stop_on_divergence: bool,
) -> Refined<PairSig> {
    let ns = ns.to_vec();
    drive(structs, rank, stop_on_divergence, |s, r| pair_round(s, &ns, r, presence))
}

pub(crate) fn pair_round(
    structs: &[Vec<u32>],
    ns: &[usize],
    rank: usize,
    presence: bool,
) -> (Vec<PairSig>, Vec<Vec<u32>>) {
    let mut interner: Interner<PairSig> = Interner::new();
    let dense = rank.checked_mul(rank).is_some_and(|v| v <= DENSE_LIMIT);
    let mut cnt: Vec<u32> = if dense { vec![0; rank * rank] } else { Vec::new() };
    let mut touched: Vec<u32> = Vec::new();
    let mut keys: Vec<u64> = Vec::new();
    let mut rle: Vec<(u32, u32, u32)> = Vec::new();
    let mut assigns = Vec::with_capacity(structs.len());
    for (colors, &n) in structs.iter().zip(ns) {
        let mut tr = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                tr[b * n + a] = colors[a * n + b];
            }
        }
        let mut assign = vec![0u32; n * n];
        for a in 0..n {
            let row = &colors[a * n..(a + 1) * n];
            for b in 0..n {
                let col = &tr[b * n..(b + 1) * n];
                let old = row[b];
                let t = tr[a * n + b];
                let id = if dense {
                    touched.clear();
                    for g in 0..n {
                        let k = row[g] as usize * rank + col[g] as usize;
                        let c = &mut cnt[k];
                        if *c == 0 {
                            touched.push(k as u32);
                        }
                        *c += 1;
                    }
                    if presence {
                        for &k in &touched {
                            cnt[k as usize] = 1;
                        }
                    }
                    let mut h = 0u64;
                    for &k in &touched {
                        h = h.wrapping_add(mix(((k as u64) << 32) | cnt[k as usize] as u64));
                    }
                    let cnt_ref = &cnt;
                    let len = touched.len();
                    let touched_ref = &mut touched;
                    let id = interner.intern(
                        (old, t, h),
                        |sig| {
                            sig.counts.len() == len
                                && sig
                                    .counts
                                    .iter()
                                    .all(|&(r, s, c)| cnt_ref[r as usize * rank + s as usize] == c)
                        },
                        || {
                            touched_ref.sort_unstable();
                            PairSig {
                                old,
                                transpose: t,
                                counts: touched_ref
                                    .iter()
                                    .map(|&k| {
                                        let k = k as usize;
                                        ((k / rank) as u32, (k % rank) as u32, cnt_ref[k])
                                    })
                                    .collect(),
                            }
                        },
                    );
                    for &k in touched.iter() {
                        cnt[k as usize] = 0;
                    }
                    id
                } else {
                    keys.clear();
                    keys.extend((0..n).map(|g| ((row[g] as u64) << 32) | col[g] as u64));
                    keys.sort_unstable();
                    rle.clear();
                    for &k in &keys {
                        let (r, s) = ((k >> 32) as u32, k as u32);
                        match rle.last_mut() {
                            Some(last) if last.0 == r && last.1 == s => {
                                if !presence {
                                    last.2 += 1
                                }
                            }
                            _ => rle.push((r, s, 1)),
                        }
                    }
                    let mut h = 0u64;
                    for &(r, s, c) in &rle {
                        h = h.wrapping_add(mix(mix(((r as u64) << 32) | s as u64) ^ c as u64));
                    }
                    let rle_ref = &rle;
                    interner.intern(
                        (old, t, h),
                        |sig| &*sig.counts == rle_ref.as_slice(),
                        || PairSig {
                            old,
                            transpose: t,
                            counts: rle_ref.clone().into_boxed_slice(),
                        },
                    )
                };
                assign[a * n + b] = id;
            }
        }
        assigns.push(assign);
    }
    (interner.sigs, assigns)
}

/// Joint pair refinement of several structures started from keys named
/// jointly, so equal keys carry equal names.
pub(crate) fn joint_from_keys<K: Ord + Clone>(
    structs: &[&[K]],
    ns: &[usize],
    stop_on_divergence: bool,
) -> Refined<PairSig> {
    let (names, distinct) = name_keys(structs);
    refine_pairs(names, ns, distinct.len(), false, stop_on_divergence)
}

/// True iff the two structures refine in lockstep: same censuses at every
/// round, hence identical label-independent histories.
pub(crate) fn synchronized<K: Ord + Clone>(a: &[K], na: usize, b: &[K], nb: usize) -> bool {
    na == nb && joint_from_keys(&[a, b], &[na, nb], true).diverged_at.is_none()
}

/// m-dimensional refinement over flat row-major colorings of Ω^m.
pub(crate) fn refine_tuples(
    structs: Vec<Vec<u32>>,
    ns: &[usize],
    m: usize,
    rank: usize,
    stop_on_divergence: bool,
) -> Refined<TupleSig> {
    let ns = ns.to_vec();
    drive(structs, rank, stop_on_divergence, |s, r| tuple_round(s, &ns, m, r))
}

fn tuple_round(structs: &[Vec<u32>], ns: &[usize], m: usize, rank: usize) -> (Vec<TupleSig>, Vec<Vec<u32>>) {
    let mut interner: Interner<TupleSig> = Interner::new();
    let mut keys: Vec<u128> = Vec::new();
    let mut rle: Vec<(u128, u32)> = Vec::new();
    let mut assigns = Vec::with_capacity(structs.len());
    for (colors, &n) in structs.iter().zip(ns) {
        let total = n.pow(m as u32);
        let strides: Vec<usize> = (0..m).map(|i| n.pow((m - 1 - i) as u32)).collect();
        let mut digits = vec![0usize; m];
        let mut assign = vec![0u32; total];
        for (x, slot) in assign.iter_mut().enumerate() {
            keys.clear();
            // base[i] = x with coordinate i zeroed
            let bases: Vec<usize> = (0..m).map(|i| x - digits[i] * strides[i]).collect();
            for a in 0..n {
                let mut key: u128 = 0;
                for i in 0..m {
                    key = key * rank as u128 + colors[bases[i] + a * strides[i]] as u128;
                }
                keys.push(key);
            }
            keys.sort_unstable();
            rle.clear();
            for &k in &keys {
                match rle.last_mut() {
                    Some(last) if last.0 == k => last.1 += 1,
                    _ => rle.push((k, 1)),
                }
            }
            let mut h = 0u64;
            for &(k, c) in &rle {
                h = h.wrapping_add(mix(mix(k as u64) ^ mix((k >> 64) as u64 ^ ((c as u64) << 40))));
            }
            let old = colors[x];
            let rle_ref = &rle;
            *slot = interner.intern(
                (old, 0, h),
                |sig| &*sig.counts == rle_ref.as_slice(),
                || TupleSig {
                    old,
                    counts: rle_ref.clone().into_boxed_slice(),
                },
            );
            // advance the digit vector
            for i in (0..m).rev() {
                digits[i] += 1;
                if digits[i] < n {
                    break;
                }
                digits[i] = 0;
            }
        }
        assigns.push(assign);
    }
    (interner.sigs, assigns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_rainbow(n: usize) -> Vec<u32> {
        (0..n * n)
            .map(|i| {
                let (a, b) = (i / n, i % n);
                if a == b {
                    0
                } else if a.abs_diff(b) == 1 {
                    1
                } else {
                    2
                }
            })
            .collect()
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let c = path_rainbow(6);
        let (dense_sigs, dense_assign) = pair_round(std::slice::from_ref(&c), &[6], 3, false);
        // force the sparse path by claiming a huge rank
        let big = 5000;
        let (sparse_sigs, sparse_assign) = pair_round(&[c], &[6], big, false);
        assert_eq!(dense_sigs.len(), sparse_sigs.len());
        assert!(crate::partition::same(&dense_assign[0], &sparse_assign[0]));
    }

    #[test]
    fn joint_runs_detect_divergence() {
        // C6 versus two triangles
        let cyc = |n: usize, adj: &dyn Fn(usize, usize) -> bool| -> Vec<u32> {
            (0..n * n)
                .map(|i| {
                    let (a, b) = (i / n, i % n);
                    if a == b {
                        0
                    } else if adj(a, b) {
                        1
                    } else {
                        2
                    }
                })
                .collect()
        };
        let c6 = cyc(6, &|a, b| (a + 1) % 6 == b || (b + 1) % 6 == a);
        let tt = cyc(6, &|a, b| a / 3 == b / 3);
        let r = refine_pairs(vec![c6.clone(), tt], &[6, 6], 3, false, false);
        assert!(r.diverged_at.is_some());
        let r = refine_pairs(vec![c6.clone(), c6], &[6, 6], 3, false, false);
        assert!(r.diverged_at.is_none());
    }

    #[test]
    fn history_fingerprint_is_stable() {
        let c = path_rainbow(4);
        let r = refine_pairs(vec![c.clone()], &[4], 3, false, false);
        let h1 = History::from_single(vec![], &r);
        let r2 = refine_pairs(vec![c], &[4], 3, false, false);
        let h2 = History::from_single(vec![], &r2);
        assert_eq!(h1, h2);
        assert_eq!(h1.fingerprint(), h2.fingerprint());
    }
}
