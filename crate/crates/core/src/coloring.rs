//! Ground sets, pair colorings, canonical renumbering, and rainbow checks.

use serde::Serialize;

use crate::error::{parse_err, Error, Result};
use crate::partition::{self, UnionFind};

/// A finite ground set {0, .., n-1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidColoring("empty ground set".into()));
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.n
    }
}

/// A coloring of Ω×Ω by dense identifiers 0..R-1, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairColoring {
    n: usize,
    rank: usize,
    colors: Vec<u32>,
}

impl PairColoring {
    /// Wraps a dense coloring. Every color below the maximum must occur.
    pub fn new(n: usize, colors: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidColoring("empty ground set".into()));
        }
        if colors.len() != n * n {
            return Err(Error::InvalidColoring(format!(
                "expected {} colors, got {}",
                n * n,
                colors.len()
            )));
        }
        let rank = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; rank];
        for &c in &colors {
            seen[c as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidColoring(format!(
                "color {missing} is unused (colors must be dense)"
            )));
        }
        Ok(PairColoring { n, rank, colors })
    }

    /// Builds a coloring from arbitrary labels, keeping the label order.
    pub fn from_labels<T: Ord + Clone>(n: usize, labels: &[T]) -> Self {
        assert_eq!(labels.len(), n * n);
        let (colors, rank) = partition::compact_sorted(labels);
        PairColoring { n, rank, colors }
    }

    pub fn from_fn<T: Ord + Clone>(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let labels: Vec<T> = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::from_labels(n, &labels)
    }

    pub(crate) fn from_dense_unchecked(n: usize, rank: usize, colors: Vec<u32>) -> Self {
        debug_assert_eq!(colors.len(), n * n);
        PairColoring { n, rank, colors }
    }

    /// Two classes: diagonal and off-diagonal (one class when n = 1).
    pub fn trivial(n: usize) -> Self {
        Self::from_fn(n, |a, b| a != b)
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_fn(n, |a, b| (a, b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn color(&self, a: usize, b: usize) -> u32 {
        self.colors[a * self.n + b]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn class_index(&self) -> ClassIndex {
        let mut members = vec![Vec::new(); self.rank];
        for (i, &c) in self.colors.iter().enumerate() {
            members[c as usize].push((i / self.n, i % self.n));
        }
        ClassIndex { members }
    }

    /// Number of pairs per color.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.rank];
        for &c in &self.colors {
            s[c as usize] += 1;
        }
        s
    }

    /// Colors touching the diagonal.
    pub fn diagonal_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.rank];
        for a in 0..self.n {
            flags[self.color(a, a) as usize] = true;
        }
        flags
    }

    /// Renames colors: diagonal-touching colors first, then the rest, each
    /// group by first occurrence in row-major order.
    pub fn canonical_renumber(&self) -> Self {
        let (colors, rank) = canonical_names(self.n, &self.colors);
        PairColoring {
            n: self.n,
            rank,
            colors,
        }
    }

    pub fn same_partition(&self, other: &Self) -> bool {
        self.n == other.n && partition::same(&self.colors, &other.colors)
    }

    /// True iff `self` is finer than or equal to `other` (every class of
    /// `self` lies in a class of `other`).
    pub fn refines(&self, other: &Self) -> bool {
        self.n == other.n && partition::refines(&self.colors, &other.colors)
    }

    /// Image under a point bijection: pair (p[a], p[b]) gets the color of (a, b).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut colors = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                colors[perm[a] * n + perm[b]] = self.color(a, b);
            }
        }
        PairColoring {
            n,
            rank: self.rank,
            colors,
        }
    }

    /// Text form: `m 2 <n> <R>` followed by n rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("m 2 {} {}\n", self.n, self.rank);
        for a in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|b| self.color(a, b).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Tokens::new(text);
        let (l, c, head) = tokens.next_token().ok_or_else(|| parse_err(1, 1, "empty input"))?;
        if head != "m" {
            return Err(parse_err(l, c, format!("expected `m`, found `{head}`")));
        }
        let arity = tokens.number("arity")?;
        if arity != 2 {
            return Err(parse_err(l, c, format!("expected arity 2, found {arity}")));
        }
        let n = tokens.number("n")?;
        let rank = tokens.number("R")?;
        if n == 0 {
            return Err(parse_err(l, c, "n must be positive"));
        }
        let mut colors = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let (l, c, v) = tokens.number_at("color")?;
            if v >= rank {
                return Err(parse_err(l, c, format!("color {v} out of range 0..{rank}")));
            }
            colors.push(v as u32);
        }
        if let Some((l, c, t)) = tokens.next_token() {
            return Err(parse_err(l, c, format!("trailing token `{t}`")));
        }
        let p = PairColoring::new(n, colors)?;
        if p.rank != rank {
            return Err(parse_err(
                l,
                c,
                format!("header says R = {rank}, but {} colors are used", p.rank),
            ));
        }
        Ok(p)
    }
}

pub(crate) fn canonical_names(n: usize, colors: &[u32]) -> (Vec<u32>, usize) {
    let rank = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut diagonal = vec![false; rank];
    for a in 0..n {
        diagonal[colors[a * n + a] as usize] = true;
    }
    let mut name = vec![u32::MAX; rank];
    let mut next = 0u32;
    for pass_diagonal in [true, false] {
        for &c in colors {
            let c = c as usize;
            if diagonal[c] == pass_diagonal && name[c] == u32::MAX {
                name[c] = next;
                next += 1;
            }
        }
    }
    (colors.iter().map(|&c| name[c as usize]).collect(), next as usize)
}

/// Members of each color class.
#[derive(Clone, Debug)]
pub struct ClassIndex {
    pub members: Vec<Vec<(usize, usize)>>,
}

impl ClassIndex {
    pub fn size(&self, color: usize) -> usize {
        self.members[color].len()
    }

    pub fn total(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }
}

/// Finest common coarsening: classes are the transitive closure of
/// "same class in p or same class in q".
pub fn join_partitions(p: &PairColoring, q: &PairColoring) -> Result<PairColoring> {
    if p.n != q.n {
        return Err(Error::SizeMismatch {
            left: p.n,
            right: q.n,
        });
    }
    let mut uf = UnionFind::new(p.rank + q.rank);
    for (&a, &b) in p.colors.iter().zip(&q.colors) {
        uf.union(a as usize, p.rank + b as usize);
    }
    let labels: Vec<u32> = p.colors.iter().map(|&a| uf.find(a as usize) as u32).collect();
    let (colors, rank) = canonical_names(p.n, &labels);
    Ok(PairColoring {
        n: p.n,
        rank,
        colors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RainbowReport {
    /// The diagonal is a union of classes.
    pub c1: bool,
    /// A class touching both the diagonal and its complement.
    pub c1_witness: Option<((usize, usize), (usize, usize))>,
    /// The transpose of every class is a class.
    pub c2: bool,
    /// Two pairs of one class whose transposes lie in different classes.
    pub c2_witness: Option<((usize, usize), (usize, usize))>,
}

impl RainbowReport {
    pub fn valid(&self) -> bool {
        self.c1 && self.c2
    }
}

pub fn validate_rainbow(p: &PairColoring) -> RainbowReport {
    let n = p.n;
    let mut diag_rep: Vec<Option<(usize, usize)>> = vec![None; p.rank];
    let mut off_rep: Vec<Option<(usize, usize)>> = vec![None; p.rank];
    let mut transpose: Vec<Option<(u32, (usize, usize))>> = vec![None; p.rank];
    let mut c1_witness = None;
    let mut c2_witness = None;
    for a in 0..n {
        for b in 0..n {
            let c = p.color(a, b) as usize;
            if a == b {
                diag_rep[c].get_or_insert((a, b));
            } else {
                off_rep[c].get_or_insert((a, b));
            }
            if c1_witness.is_none() {
                if let (Some(d), Some(o)) = (diag_rep[c], off_rep[c]) {
                    c1_witness = Some((d, o));
                }
            }
            let t = p.color(b, a);
            match transpose[c] {
                None => transpose[c] = Some((t, (a, b))),
                Some((t0, first)) if t0 != t && c2_witness.is_none() => {
                    c2_witness = Some((first, (a, b)));
                }
                _ => {}
            }
        }
    }
    RainbowReport {
        c1: c1_witness.is_none(),
        c1_witness,
        c2: c2_witness.is_none(),
        c2_witness,
    }
}

/// Whitespace tokenizer with line/column positions and `#` comments.
pub(crate) struct Tokens<'a> {
    items: std::vec::IntoIter<(usize, usize, &'a str)>,
    last: (usize, usize),
}

impl<'a> Tokens<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (li, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(k) => &line[..k],
                None => line,
            };
            let mut col = 0;
            for piece in line.split_whitespace() {
                let off = line[col..].find(piece).unwrap() + col;
                items.push((li + 1, off + 1, piece));
                col = off + piece.len();
            }
        }
        Tokens {
            items: items.into_iter(),
            last: (1, 1),
        }
    }

    pub fn next_token(&mut self) -> Option<(usize, usize, &'a str)> {
        let t = self.items.next()?;
        self.last = (t.0, t.1);
        Some(t)
    }

    pub fn number_at(&mut self, what: &str) -> Result<(usize, usize, usize)> {
        match self.next_token() {
            None => Err(parse_err(
                self.last.0,
                self.last.1,
                format!("unexpected end of input, expected {what}"),
            )),
            Some((l, c, t)) => t
                .parse::<usize>()
                .map(|v| (l, c, v))
                .map_err(|_| parse_err(l, c, format!("expected {what}, found `{t}`"))),
        }
    }

    pub fn number(&mut self, what: &str) -> Result<usize> {
        self.number_at(what).map(|t| t.2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coloring_strategy() -> impl Strategy<Value = PairColoring> {
        (1usize..6).prop_flat_map(|n| {
            proptest::collection::vec(0u32..4, n * n)
                .prop_map(move |v| PairColoring::from_labels(n, &v))
        })
    }

    #[test]
    fn join_examples() {
        let p = PairColoring::trivial(3);
        assert_eq!(join_partitions(&p, &p).unwrap(), p.canonical_renumber());
        let d = PairColoring::discrete(2);
        let t = PairColoring::trivial(2);
        assert!(join_partitions(&d, &t).unwrap().same_partition(&t));
        // Ω² of a single point has one pair; use n = 2 with four pairs
        let p = PairColoring::new(2, vec![0, 1, 2, 0]).unwrap();
        let q = PairColoring::new(2, vec![0, 0, 1, 0]).unwrap();
        assert!(join_partitions(&p, &q).unwrap().same_partition(&q));
        assert!(join_partitions(&p, &PairColoring::discrete(3)).is_err());
    }

    #[test]
    fn renumber_rule() {
        let p = PairColoring::new(2, vec![2, 0, 1, 2]).unwrap();
        let r = p.canonical_renumber();
        assert_eq!(r.colors(), &[0, 1, 2, 0]);
        // two diagonal colors: named by row-major first occurrence
        let p = PairColoring::new(2, vec![1, 2, 2, 0]).unwrap();
        assert_eq!(p.canonical_renumber().colors(), &[0, 2, 2, 1]);
    }

    #[test]
    fn rainbow_checks() {
        // graph rainbow of a path
        let p = PairColoring::from_fn(3, |a, b| if a == b { 0 } else if a.abs_diff(b) == 1 { 1 } else { 2 });
        assert!(validate_rainbow(&p).valid());
        // diagonal pair merged with an off-diagonal pair
        let p = PairColoring::from_fn(3, |a, b| if a == b || (a, b) == (0, 1) { 0 } else { 1 });
        let r = validate_rainbow(&p);
        assert!(!r.c1);
        assert!(r.c1_witness.is_some());
        // class {(0,1),(0,2)} with transposes (1,0), (2,0) in different classes
        let p = PairColoring::from_fn(3, |a, b| match (a, b) {
            _ if a == b => 0,
            (0, _) => 1,
            (1, 0) => 2,
            (2, 0) => 3,
            _ => 4,
        });
        let r = validate_rainbow(&p);
        assert!(r.c1);
        assert!(!r.c2);
        let (x, y) = r.c2_witness.unwrap();
        // brute scan: both witnesses share a class but their transposes do not
        assert_eq!(p.color(x.0, x.1), p.color(y.0, y.1));
        assert_ne!(p.color(x.1, x.0), p.color(y.1, y.0));
    }

    #[test]
    fn text_round_trip_and_diagnostics() {
        let p = PairColoring::from_fn(3, |a, b| (a + 2 * b) % 3);
        let back = PairColoring::parse(&p.to_text()).unwrap();
        assert_eq!(back, p);
        match PairColoring::parse("m 2 2 2\n0 1\n1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PairColoring::parse("m 2 2 3\n0 1\n1 0\n").is_err());
    }

    proptest! {
        #[test]
        fn renumber_idempotent_and_partition_preserving(p in coloring_strategy()) {
            let r = p.canonical_renumber();
            prop_assert!(r.same_partition(&p));
            prop_assert_eq!(r.canonical_renumber(), r.clone());
        }

        #[test]
        fn renumber_ignores_names(p in coloring_strategy(), shift in 1u32..7) {
            let relabeled: Vec<u32> = p.colors().iter().map(|&c| (c * 7 + shift) % 1000).collect();
            let q = PairColoring::from_labels(p.n(), &relabeled);
            prop_assert_eq!(q.canonical_renumber(), p.canonical_renumber());
        }

        #[test]
        fn join_laws(p in coloring_strategy(), seed in 0u64..1000) {
            let n = p.n();
            let q = PairColoring::from_fn(n, |a, b| ((a * 31 + b * 17) as u64 ^ seed) % 3);
            let r = PairColoring::from_fn(n, |a, b| ((a * 7 + b) as u64 + seed) % 2);
            let pq = join_partitions(&p, &q).unwrap();
            prop_assert_eq!(pq.clone(), join_partitions(&q, &p).unwrap());
            prop_assert_eq!(join_partitions(&pq, &r).unwrap(),
                join_partitions(&p, &join_partitions(&q, &r).unwrap()).unwrap());
            prop_assert_eq!(join_partitions(&p, &p).unwrap(), p.canonical_renumber());
            prop_assert!(p.refines(&pq) && q.refines(&pq));
        }
    }
}
