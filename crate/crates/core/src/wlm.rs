//! m-ary colorings (m = 2, 3, 4) and the m-dimensional Weisfeiler-Leman
//! refinement, with projections, residues and class multiplicities.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::{self, caps};
use crate::cc::CoherentConfiguration;
use crate::coloring::{PairColoring, Tokens};
use crate::error::{parse_err, Error, Result};
use crate::partition::{self, UnionFind};
use crate::refine::{self, History, TupleSig};

/// A coloring of Ω^m by dense color identifiers, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaryColoring {
    m: usize,
    n: usize,
    rank: usize,
    colors: Vec<u32>,
}

impl MaryColoring {
    pub fn new(m: usize, n: usize, colors: Vec<u32>) -> Result<Self> {
        check_arity(m, 2)?;
        if colors.len() != n.pow(m as u32) {
            return Err(Error::InvalidColoring(format!(
                "expected {} colors for m = {m}, n = {n}, got {}",
                n.pow(m as u32),
                colors.len()
            )));
        }
        let rank = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; rank];
        for &c in &colors {
            seen[c as usize] = true;
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidColoring(format!("color {c} is unused")));
        }
        Ok(MaryColoring { m, n, rank, colors })
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    pub fn tuple(&self, mut idx: usize) -> Vec<usize> {
        let mut x = vec![0; self.m];
        for slot in x.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        x
    }

    pub fn color(&self, x: &[usize]) -> u32 {
        self.colors[self.index(x)]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.rank];
        for &c in &self.colors {
            s[c as usize] += 1;
        }
        s
    }

    pub fn same_partition(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && partition::same(&self.colors, &other.colors)
    }

    /// True iff `self` is finer than or equal to `other`.
    pub fn refines(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && partition::refines(&self.colors, &other.colors)
    }

    /// The 2-ary coloring as a pair coloring (colors kept).
    pub fn to_pair_coloring(&self) -> Result<PairColoring> {
        if self.m != 2 {
            return Err(Error::Arity(format!("expected arity 2, got {}", self.m)));
        }
        PairColoring::new(self.n, self.colors.clone())
    }

    pub fn from_pair_coloring(p: &PairColoring) -> Self {
        MaryColoring {
            m: 2,
            n: p.n(),
            rank: p.rank(),
            colors: p.colors().to_vec(),
        }
    }

    /// Dump: `m <arity> <n> <R>` then the colors, n per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("m {} {} {}\n", self.m, self.n, self.rank);
        for row in self.colors.chunks(self.n) {
            let row: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut colors = Vec::new();
        for (li, raw) in text.lines().enumerate() {
            let line = li + 1;
            let mut toks = Tokens::new(raw);
            if header.is_none() {
                let Some((_, col, head)) = toks.next_token() else {
                    continue;
                };
                if head != "m" {
                    return Err(parse_err(line, col, "expected header `m <arity> <n> <R>`"));
                }
                let mut num = |what: &str| toks.number_at(what).map(|(_, _, v)| v).map_err(|e| relocate(e, line));
                let (m, n, r) = (num("arity")?, num("n")?, num("color count")?);
                if !(2..=4).contains(&m) {
                    return Err(parse_err(line, col, format!("arity {m} not in 2..=4")));
                }
                header = Some((m, n, r));
                continue;
            }
            while let Some((_, col, t)) = toks.next_token() {
                let v: u32 = t
                    .parse()
                    .map_err(|_| parse_err(line, col, format!("expected a color, found `{t}`")))?;
                if v as usize >= header.unwrap().2 {
                    return Err(parse_err(line, col, format!("color {v} out of range")));
                }
                colors.push(v);
            }
        }
        let (m, n, r) = header.ok_or_else(|| parse_err(1, 1, "missing header"))?;
        let f = MaryColoring::new(m, n, colors)?;
        if f.rank != r {
            return Err(Error::InvalidColoring(format!("header says {r} colors, found {}", f.rank)));
        }
        Ok(f)
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse { line, column, message },
        other => other,
    }
}

fn check_arity(m: usize, min: usize) -> Result<()> {
    if (min..=4).contains(&m) {
        Ok(())
    } else {
        Err(Error::Arity(format!("arity {m} not in {min}..=4")))
    }
}

fn check_cap(m: usize, n: usize) -> Result<()> {
    let c = caps();
    match m {
        2 => caps::check("pair", n, c.pair),
        3 => caps::check("ternary", n, c.ternary),
        _ => caps::check("quaternary", n, c.quaternary),
    }
}

/// Equality pattern ρ(x) as a restricted growth string: position i gets
/// the index of the first position holding the same point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TuplePattern {
    m: u8,
    rgs: [u8; 4],
}

impl TuplePattern {
    pub fn of(x: &[usize]) -> Self {
        let mut rgs = [0u8; 4];
        for i in 0..x.len() {
            rgs[i] = (0..=i).find(|&j| x[j] == x[i]).unwrap() as u8;
        }
        TuplePattern { m: x.len() as u8, rgs }
    }

    pub fn equal(&self, i: usize, j: usize) -> bool {
        self.rgs[i] == self.rgs[j]
    }

    pub fn blocks(&self) -> usize {
        (0..self.m as usize).filter(|&i| self.rgs[i] as usize == i).count()
    }
}

/// |mon(M)| = m^m self-maps of the positions.
pub fn mon_size(m: usize) -> usize {
    m.pow(m as u32)
}

/// All self-maps of {0..m-1}, in lexicographic order.
pub fn mon(m: usize) -> Vec<Vec<usize>> {
    (0..mon_size(m))
        .map(|mut k| {
            let mut s = vec![0; m];
            for slot in s.iter_mut().rev() {
                *slot = k % m;
                k /= m;
            }
            s
        })
        .collect()
}

type InitKey = (TuplePattern, [u32; 16]);

fn initial_key(x: &PairColoring, t: &[usize]) -> InitKey {
    let m = t.len();
    let mut mat = [0u32; 16];
    for i in 0..m {
        for j in 0..m {
            mat[i * m + j] = x.color(t[i], t[j]);
        }
    }
    (TuplePattern::of(t), mat)
}

fn encode_key(k: &InitKey) -> Vec<u32> {
    let mut v: Vec<u32> = k.0.rgs[..k.0.m as usize].iter().map(|&r| r as u32).collect();
    let m = k.0.m as usize;
    v.extend_from_slice(&k.1[..m * m]);
    v
}

/// Jointly named initial colorings: names are ranks of the sorted distinct
/// keys (ρ, pair-color matrix), so equal keys give equal names across inputs.
fn initial_joint(xs: &[&PairColoring], m: usize) -> (Vec<Vec<u32>>, Vec<InitKey>) {
    let mut ids: HashMap<InitKey, u32> = HashMap::new();
    let mut raw = Vec::with_capacity(xs.len());
    for x in xs {
        let n = x.n();
        let total = n.pow(m as u32);
        let mut t = vec![0usize; m];
        let mut out = vec![0u32; total];
        for slot in out.iter_mut() {
            let k = initial_key(x, &t);
            let next = ids.len() as u32;
            *slot = *ids.entry(k).or_insert(next);
            for i in (0..m).rev() {
                t[i] += 1;
                if t[i] < n {
                    break;
                }
                t[i] = 0;
            }
        }
        raw.push(out);
    }
    let mut distinct: Vec<(InitKey, u32)> = ids.into_iter().collect();
    distinct.sort_unstable();
    let mut rename = vec![0u32; distinct.len()];
    for (rank, (_, id)) in distinct.iter().enumerate() {
        rename[*id as usize] = rank as u32;
    }
    for s in raw.iter_mut() {
        for c in s.iter_mut() {
            *c = rename[*c as usize];
        }
    }
    (raw, distinct.into_iter().map(|(k, _)| k).collect())
}

/// c₀ of the m-dimensional refinement.
pub fn initial_coloring(x: &PairColoring, m: usize) -> Result<MaryColoring> {
    check_arity(m, 2)?;
    check_cap(m, x.n())?;
    let (mut names, distinct) = initial_joint(&[x], m);
    Ok(MaryColoring {
        m,
        n: x.n(),
        rank: distinct.len(),
        colors: names.pop().unwrap(),
    })
}

/// Joint m-dimensional refinement of several rainbows with shared naming.
pub struct WlmRun {
    /// Stable colorings, each compacted on its own (dense names).
    pub colorings: Vec<MaryColoring>,
    /// Stable colors under the shared naming: equal values across
    /// structures mean equal WL_m colors.
    pub joint: Vec<Vec<u32>>,
    pub iterations: usize,
    /// First round (0 = initial coloring) where the censuses differ.
    pub diverged_at: Option<usize>,
    /// Per-structure histories (initial census, then per-round signatures).
    pub histories: Vec<History<TupleSig>>,
    /// Round and the first two censuses where they differ.
    pub divergence: Option<(usize, Vec<u32>, Vec<u32>)>,
}

pub fn wlm_joint(xs: &[&PairColoring], m: usize, stop_on_divergence: bool) -> Result<WlmRun> {
    check_arity(m, 2)?;
    for x in xs {
        check_cap(m, x.n())?;
    }
    let (names, distinct) = initial_joint(xs, m);
    let initial: Vec<_> = names
        .iter()
        .map(|s| refine::initial_census(s, &distinct, encode_key))
        .collect();
    let ns: Vec<usize> = xs.iter().map(|x| x.n()).collect();
    let initial_names = if xs.len() > 1 { names[..2].to_vec() } else { Vec::new() };
    let r = refine::refine_tuples(names, &ns, m, distinct.len(), stop_on_divergence);
    let divergence = r.diverged_at.map(|round| {
        if round == 0 {
            let c = |s: &[u32]| refine::census(s, distinct.len());
            (0, c(&initial_names[0]), c(&initial_names[1]))
        } else {
            let counts = &r.rounds[round - 1].counts;
            let k = counts.iter().position(|c| *c != counts[0]).unwrap();
            (round, counts[0].clone(), counts[k].clone())
        }
    });
    let histories = initial
        .into_iter()
        .enumerate()
        .map(|(k, init)| History {
            initial: init,
            rounds: r
                .rounds
                .iter()
                .map(|round| {
                    round
                        .sigs
                        .iter()
                        .cloned()
                        .zip(round.counts[k].iter().copied())
                        .filter(|(_, c)| *c > 0)
                        .collect()
                })
                .collect(),
        })
        .collect();
    let joint = r.colors.clone();
    let colorings = r
        .colors
        .into_iter()
        .zip(&ns)
        .map(|(colors, &n)| {
            let (colors, rank) = partition::compact_sorted(&colors);
            MaryColoring { m, n, rank, colors }
        })
        .collect();
    Ok(WlmRun {
        colorings,
        joint,
        iterations: r.iterations,
        diverged_at: r.diverged_at,
        histories,
        divergence,
    })
}

/// WL_m(X): the stable m-dimensional coloring. Colors are label-independent
/// (ranked by refinement signature).
pub fn wlm_closure(x: &PairColoring, m: usize) -> Result<MaryColoring> {
    Ok(wlm_joint(&[x], m, false)?.colorings.pop().unwrap())
}

/// Runs the m-dimensional refinement starting from an arbitrary partition
/// of Ωᵐ (joined with the equality pattern of each tuple).
pub fn wlm_refine(f: &MaryColoring) -> Result<MaryColoring> {
    check_arity(f.m, 2)?;
    check_cap(f.m, f.n)?;
    let keys: Vec<(u32, TuplePattern)> = (0..f.colors.len())
        .map(|i| (f.colors[i], TuplePattern::of(&f.tuple(i))))
        .collect();
    let (start, rank) = partition::compact_sorted(&keys);
    let r = refine::refine_tuples(vec![start], &[f.n], f.m, rank, false);
    let (colors, rank) = partition::compact_sorted(&r.colors[0]);
    Ok(MaryColoring { m: f.m, n: f.n, rank, colors })
}

/// pr_k: classes are the k-prefix images of the classes of f, merged where
/// they overlap. Names follow the least f-color mapping onto each class.
pub fn project(f: &MaryColoring, k: usize) -> Result<MaryColoring> {
    if k < 2 || k >= f.m {
        return Err(Error::Arity(format!("projection to {k} from arity {}", f.m)));
    }
    let n = f.n;
    let block = n.pow((f.m - k) as u32);
    let mut uf = UnionFind::new(f.rank);
    for chunk in f.colors.chunks(block) {
        for &c in &chunk[1..] {
            uf.union(chunk[0] as usize, c as usize);
        }
    }
    let mut least = vec![u32::MAX; f.rank];
    for c in 0..f.rank {
        let r = uf.find(c);
        least[r] = least[r].min(c as u32);
    }
    let labels: Vec<u32> = f
        .colors
        .chunks(block)
        .map(|chunk| least[uf.find(chunk[0] as usize)])
        .collect();
    let (colors, rank) = partition::compact_sorted(&labels);
    Ok(MaryColoring { m: k, n, rank, colors })
}

/// pr₂ as a validated coherent configuration.
pub fn pr2(f: &MaryColoring) -> Result<CoherentConfiguration> {
    let p = if f.m == 2 { f.clone() } else { project(f, 2)? };
    CoherentConfiguration::new(&p.to_pair_coloring()?)
}

/// res_y: the k-ary coloring x ↦ f(x·y), with k = m − |y|.
pub fn residue(f: &MaryColoring, y: &[usize]) -> Result<MaryColoring> {
    if y.is_empty() || f.m - y.len() < 2 || y.len() >= f.m {
        return Err(Error::Arity(format!("residue by {} points from arity {}", y.len(), f.m)));
    }
    if let Some(&p) = y.iter().find(|&&p| p >= f.n) {
        return Err(Error::PointOutOfRange { point: p, n: f.n });
    }
    let k = f.m - y.len();
    let n = f.n;
    let tail = y.iter().fold(0, |acc, &a| acc * n + a);
    let shift = n.pow(y.len() as u32);
    let labels: Vec<u32> = (0..n.pow(k as u32)).map(|x| f.colors[x * shift + tail]).collect();
    let (colors, rank) = partition::compact_sorted(&labels);
    Ok(MaryColoring { m: k, n, rank, colors })
}

/// n_k(X): how many members of the class share a given k-prefix; checked
/// constant over the whole class.
pub fn class_multiplicity(f: &MaryColoring, class: u32, k: usize) -> Result<usize> {
    if k < 1 || k >= f.m {
        return Err(Error::Arity(format!("multiplicity for k = {k}, arity {}", f.m)));
    }
    if class as usize >= f.rank {
        return Err(Error::InvalidColoring(format!("no class {class}")));
    }
    let block = f.n.pow((f.m - k) as u32);
    let mut value = None;
    for (p, chunk) in f.colors.chunks(block).enumerate() {
        let c = chunk.iter().filter(|&&c| c == class).count();
        if c == 0 {
            continue;
        }
        match value {
            None => value = Some(c),
            Some(v) if v != c => {
                return Err(Error::Constancy(format!(
                    "class {class}: prefix {p} has {c} members, another has {v}"
                )))
            }
            _ => {}
        }
    }
    Ok(value.unwrap())
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MaryReport {
    pub c1: bool,
    /// Two tuples of one class with different equality patterns.
    pub c1_witness: Option<(Vec<usize>, Vec<usize>)>,
    pub c2: bool,
    /// (class, σ) whose image is not a class.
    pub c2_witness: Option<(u32, Vec<usize>)>,
    pub c3: bool,
    /// Two tuples of one class with different substitution counts.
    pub c3_witness: Option<(Vec<usize>, Vec<usize>)>,
    /// False when (C3′) was checked on a sample only.
    pub c3_exhaustive: bool,
}

impl MaryReport {
    pub fn valid(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

fn substitution_signature(f: &MaryColoring, x: &[usize]) -> Vec<Vec<u32>> {
    let mut t = x.to_vec();
    let mut sig: Vec<Vec<u32>> = (0..f.n)
        .map(|a| {
            (0..f.m)
                .map(|i| {
                    let keep = t[i];
                    t[i] = a;
                    let c = f.color(&t);
                    t[i] = keep;
                    c
                })
                .collect()
        })
        .collect();
    sig.sort_unstable();
    sig
}

/// Checks (C1′), (C2′) and (C3′). (C3′) is exhaustive for n^m ≤ 10⁶ and
/// uses a fixed-seed sample of 20000 tuples above that.
pub fn validate_mary(f: &MaryColoring) -> MaryReport {
    let total = f.colors.len();
    let mut rep: Vec<Option<usize>> = vec![None; f.rank];
    for (i, &c) in f.colors.iter().enumerate() {
        rep[c as usize].get_or_insert(i);
    }
    // C1′
    let mut c1_witness = None;
    let pat: Vec<TuplePattern> = rep.iter().map(|r| TuplePattern::of(&f.tuple(r.unwrap()))).collect();
    for (i, &c) in f.colors.iter().enumerate() {
        let x = f.tuple(i);
        if TuplePattern::of(&x) != pat[c as usize] {
            c1_witness = Some((f.tuple(rep[c as usize].unwrap()), x));
            break;
        }
    }
    // C2′
    let sizes = f.sizes();
    let mut c2_witness = None;
    'sigma: for s in mon(f.m) {
        let mut image = vec![u32::MAX; f.rank];
        let mut hit = vec![false; total];
        let mut y = vec![0; f.m];
        for i in 0..total {
            let x = f.tuple(i);
            for (k, &j) in s.iter().enumerate() {
                y[k] = x[j];
            }
            let yi = f.index(&y);
            let c = f.colors[i] as usize;
            let d = f.colors[yi];
            if image[c] == u32::MAX {
                image[c] = d;
            } else if image[c] != d {
                c2_witness = Some((c as u32, s.clone()));
                break 'sigma;
            }
            hit[yi] = true;
        }
        let mut hits = vec![0usize; f.rank];
        for (i, &h) in hit.iter().enumerate() {
            hits[f.colors[i] as usize] += h as usize;
        }
        for c in 0..f.rank {
            let d = image[c] as usize;
            if hits[d] != sizes[d] {
                c2_witness = Some((c as u32, s.clone()));
                break 'sigma;
            }
        }
    }
    // C3′
    let exhaustive = total <= 1_000_000;
    let sample: Vec<usize> = if exhaustive {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..20_000).map(|_| rng.gen_range(0..total)).collect()
    };
    let mut first: HashMap<u32, (usize, Vec<Vec<u32>>)> = HashMap::new();
    let mut c3_witness = None;
    for i in sample {
        let x = f.tuple(i);
        let sig = substitution_signature(f, &x);
        match first.get(&f.colors[i]) {
            None => {
                first.insert(f.colors[i], (i, sig));
            }
            Some((j, s)) if *s != sig => {
                c3_witness = Some((f.tuple(*j), x));
                break;
            }
            _ => {}
        }
    }
    MaryReport {
        c1: c1_witness.is_none(),
        c1_witness,
        c2: c2_witness.is_none(),
        c2_witness,
        c3: c3_witness.is_none(),
        c3_witness,
        c3_exhaustive: exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::{self, wl_closure};
    use crate::graph;

    #[test]
    fn mon_sizes() {
        assert_eq!(mon_size(3), 27);
        assert_eq!(mon(3).len(), 27);
        assert_eq!(mon_size(4), 256);
    }

    #[test]
    fn trivial_rainbow_gives_five_patterns() {
        let x = graph::complete(5).rainbow();
        let f = initial_coloring(&x, 3).unwrap();
        assert_eq!(f.rank(), 5);
        let w = wlm_closure(&x, 3).unwrap();
        assert_eq!(w.rank(), 5);
        assert!(validate_mary(&w).valid());
    }

    #[test]
    fn closure_is_valid_and_projects_to_wl() {
        for g in [graph::petersen(), graph::heawood(), graph::path(5)] {
            let x = g.rainbow();
            let w = wlm_closure(&x, 3).unwrap();
            assert!(validate_mary(&w).valid());
            let p = pr2(&w).unwrap();
            let wl = wl_closure(&x, &[]).unwrap();
            assert!(p.refines(&wl));
        }
        let w = wlm_closure(&graph::complete(3).rainbow(), 3).unwrap();
        assert_eq!(project(&w, 2).unwrap().rank(), 2);
    }

    #[test]
    fn initial_petersen_fails_c3() {
        let f = initial_coloring(&graph::petersen().rainbow(), 3).unwrap();
        let r = validate_mary(&f);
        assert!(r.c1 && !r.c3 && r.c3_witness.is_some());
    }

    #[test]
    fn broken_c2_is_detected() {
        // on 2 points, merge (0,1) with (0,0) only: the transpose image of
        // that class is {(1,0),(0,0)}, which is not a class
        let f = MaryColoring::new(2, 2, vec![0, 0, 1, 2]).unwrap();
        let r = validate_mary(&f);
        assert!(!r.c2);
    }

    #[test]
    fn residues_and_multiplicities() {
        let x = graph::heawood().rainbow();
        let w = wlm_closure(&x, 3).unwrap();
        let p = project(&w, 2).unwrap();
        let pr = pr2(&w).unwrap();
        for a in 0..14 {
            let r = residue(&w, &[a]).unwrap();
            assert!(r.refines(&p));
            let ext = cc::point_extension(&pr, &[a]).unwrap();
            assert!(r.to_pair_coloring().unwrap().refines(ext.coloring()));
            // {(α,α)} is a class of the residue
            let c = r.color(&[a, a]);
            assert_eq!(r.sizes()[c as usize], 1);
        }
        let k = wlm_closure(&graph::complete(5).rainbow(), 3).unwrap();
        let distinct = k.color(&[0, 1, 2]);
        assert_eq!(class_multiplicity(&k, distinct, 2).unwrap(), 3);
        assert_eq!(class_multiplicity(&k, k.color(&[0, 0, 0]), 2).unwrap(), 1);
    }

    #[test]
    fn dump_round_trip() {
        let w = wlm_closure(&graph::cycle(5).rainbow(), 3).unwrap();
        assert_eq!(MaryColoring::parse(&w.to_text()).unwrap(), w);
        assert!(MaryColoring::parse("m 5 2 1\n0 0 0 0\n").is_err());
    }

    #[test]
    fn relabeling_keeps_colors() {
        let g = graph::petersen();
        let perm = [3, 1, 4, 0, 5, 9, 2, 6, 8, 7];
        let a = wlm_closure(&g.rainbow(), 3).unwrap();
        let b = wlm_closure(&g.permuted(&perm).rainbow(), 3).unwrap();
        assert_eq!(a.sizes(), b.sizes());
        for i in 0..1000 {
            let x = a.tuple(i);
            let y: Vec<usize> = x.iter().map(|&p| perm[p]).collect();
            assert_eq!(a.color(&x), b.color(&y));
        }
    }
}
