//! Partition comparisons on flat color arrays.

use std::collections::HashMap;

/// True iff every class of `fine` lies inside one class of `coarse`.
pub fn refines(fine: &[u32], coarse: &[u32]) -> bool {
    assert_eq!(fine.len(), coarse.len());
    let mut map: HashMap<u32, u32> = HashMap::new();
    for (&f, &c) in fine.iter().zip(coarse) {
        match map.entry(f) {
            std::collections::hash_map::Entry::Occupied(e) => {
                if *e.get() != c {
                    return false;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }
    true
}

pub fn same(a: &[u32], b: &[u32]) -> bool {
    refines(a, b) && refines(b, a)
}

/// Renames labels to 0..R-1 keeping their relative order.
pub fn compact_sorted<T: Ord + Clone>(labels: &[T]) -> (Vec<u32>, usize) {
    let mut distinct: Vec<T> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let names = labels
        .iter()
        .map(|l| distinct.binary_search(l).unwrap() as u32)
        .collect();
    (names, distinct.len())
}

/// Renames labels to 0..R-1 in order of first occurrence.
pub fn compact_first_occurrence(labels: &[u32]) -> (Vec<u32>, usize) {
    let mut map: HashMap<u32, u32> = HashMap::new();
    let names = labels
        .iter()
        .map(|&l| {
            let k = map.len() as u32;
            *map.entry(l).or_insert(k)
        })
        .collect();
    (names, map.len())
}

/// Minimal union-find.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so that roots are deterministic minima
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_order() {
        let fine = [0, 1, 2, 2];
        let coarse = [0, 0, 1, 1];
        assert!(refines(&fine, &coarse));
        assert!(!refines(&coarse, &fine));
        assert!(same(&[0, 0, 1], &[5, 5, 3]));
    }

    #[test]
    fn compaction() {
        assert_eq!(compact_sorted(&[7, 3, 7, 9]), (vec![1, 0, 1, 2], 3));
        assert_eq!(compact_first_occurrence(&[7, 3, 7, 9]), (vec![0, 1, 0, 2], 3));
    }
}
