//! Coherent configurations: the WL closure, intersection numbers,
//! restrictions, tensor squares, point extensions and 2-extensions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::caps::{self, caps};
use crate::coloring::{canonical_names, join_partitions, validate_rainbow, PairColoring, RainbowReport};
use crate::error::{Error, Result};
use crate::partition;
use crate::refine::{self, History, PairSig};

/// Per-class data of a coherent configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassInfo {
    pub size: usize,
    pub diagonal: bool,
    pub left_fiber: usize,
    pub right_fiber: usize,
    /// |αs| for α in the left fiber.
    pub left_valency: usize,
    /// |s β| for β in the right fiber.
    pub right_valency: usize,
    pub transpose: u32,
}

/// A validated coherent configuration. The coloring is stored with the
/// row-major canonical numbering; `canon` maps each color to a name that
/// does not depend on point labels.
#[derive(Clone, Debug)]
pub struct CoherentConfiguration {
    coloring: PairColoring,
    canon: Vec<u32>,
    fibers: Vec<Vec<usize>>,
    fiber_of: Vec<usize>,
    classes: Vec<ClassInfo>,
    iterations: usize,
}

impl PartialEq for CoherentConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.coloring == other.coloring
    }
}

impl Eq for CoherentConfiguration {}

impl CoherentConfiguration {
    /// Validates (C1)-(C3) and wraps the coloring. Color values of the input
    /// act as label-independent names.
    pub fn new(p: &PairColoring) -> Result<Self> {
        let report = validate_cc(p);
        if !report.valid() {
            return Err(Error::NotCoherent(report.describe()));
        }
        Ok(Self::from_names(p.n(), p.colors().to_vec(), 0))
    }

    /// Trusted constructor from label-independent dense names.
    pub(crate) fn from_names(n: usize, names: Vec<u32>, iterations: usize) -> Self {
        let (colors, rank) = canonical_names(n, &names);
        let mut canon = vec![0u32; rank];
        for (c, &name) in colors.iter().zip(&names) {
            canon[*c as usize] = name;
        }
        let coloring = PairColoring::from_dense_unchecked(n, rank, colors);
        let mut fiber_of = vec![0usize; n];
        let mut nfibers = 0;
        for (a, f) in fiber_of.iter_mut().enumerate() {
            *f = coloring.color(a, a) as usize;
            nfibers = nfibers.max(*f + 1);
        }
        let mut fibers = vec![Vec::new(); nfibers];
        for (a, &f) in fiber_of.iter().enumerate() {
            fibers[f].push(a);
        }
        let sizes = coloring.sizes();
        let mut rep = vec![None; rank];
        for a in 0..n {
            for b in 0..n {
                rep[coloring.color(a, b) as usize].get_or_insert((a, b));
            }
        }
        let classes = (0..rank)
            .map(|c| {
                let (a, b) = rep[c].unwrap();
                let (lf, rf) = (fiber_of[a], fiber_of[b]);
                ClassInfo {
                    size: sizes[c],
                    diagonal: a == b,
                    left_fiber: lf,
                    right_fiber: rf,
                    left_valency: sizes[c] / fibers[lf].len(),
                    right_valency: sizes[c] / fibers[rf].len(),
                    transpose: coloring.color(b, a),
                }
            })
            .collect();
        CoherentConfiguration {
            coloring,
            canon,
            fibers,
            fiber_of,
            classes,
            iterations,
        }
    }

    pub fn n(&self) -> usize {
        self.coloring.n()
    }

    pub fn rank(&self) -> usize {
        self.coloring.rank()
    }

    pub fn coloring(&self) -> &PairColoring {
        &self.coloring
    }

    pub fn color(&self, a: usize, b: usize) -> u32 {
        self.coloring.color(a, b)
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber_of(&self, a: usize) -> usize {
        self.fiber_of[a]
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn is_scheme(&self) -> bool {
        self.fibers.len() == 1
    }

    /// Refinement passes that split classes when the configuration was built.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Label-independent name of each class.
    pub fn canon(&self) -> &[u32] {
        &self.canon
    }

    /// Per-pair label-independent names.
    pub fn canonical_colors(&self) -> Vec<u32> {
        self.coloring.colors().iter().map(|&c| self.canon[c as usize]).collect()
    }

    /// Left valency of each class.
    pub fn valencies(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.left_valency).collect()
    }

    /// True iff `self` ≥ `other` in the partition order (finer or equal).
    pub fn refines(&self, other: &Self) -> bool {
        self.coloring.refines(&other.coloring)
    }

    pub fn same_partition(&self, other: &Self) -> bool {
        self.coloring.same_partition(&other.coloring)
    }

    pub fn report(&self, with_tensor: bool) -> Result<ClosureReport> {
        let intersection_numbers = if with_tensor {
            let t = intersection_numbers(self)?;
            let mut v = Vec::new();
            for (tc, row) in t.entries.iter().enumerate() {
                for &(r, s, c) in row {
                    v.push([r, s, tc as u32, c]);
                }
            }
            Some(v)
        } else {
            None
        };
        Ok(ClosureReport {
            rank: self.rank(),
            fibers: self.fibers.clone(),
            valencies: self.valencies(),
            iterations: self.iterations,
            intersection_numbers,
        })
    }
}

/// JSON summary of a closure.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub rank: usize,
    pub fibers: Vec<Vec<usize>>,
    pub valencies: Vec<usize>,
    pub iterations: usize,
    /// Nonzero entries as [r, s, t, c_{r,s}^t].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection_numbers: Option<Vec<[u32; 4]>>,
}

/// Result of refining one structure from label-independent initial keys.
pub(crate) struct SingleRefinement {
    pub names: Vec<u32>,
    pub rank: usize,
    pub history: History<PairSig>,
}

pub(crate) fn refine_from_keys<K: Ord + Clone>(
    n: usize,
    keys: &[K],
    encode: impl Fn(&K) -> Vec<u32>,
) -> SingleRefinement {
    let (mut names, distinct) = refine::name_keys(&[keys]);
    let initial = refine::initial_census(&names[0], &distinct, encode);
    let r = refine::refine_pairs(vec![names.pop().unwrap()], &[n], distinct.len(), false, false);
    let history = History::from_single(initial, &r);
    SingleRefinement {
        rank: r.rank,
        names: r.colors.into_iter().next().unwrap(),
        history,
    }
}

pub(crate) fn closure_from_keys<K: Ord + Clone>(n: usize, keys: &[K]) -> CoherentConfiguration {
    let (mut names, distinct) = refine::name_keys(&[keys]);
    let r = refine::refine_pairs(vec![names.pop().unwrap()], &[n], distinct.len(), false, false);
    CoherentConfiguration::from_names(n, r.colors.into_iter().next().unwrap(), r.iterations)
}

pub(crate) fn encode_u64(k: &u64) -> Vec<u32> {
    vec![(*k >> 32) as u32, *k as u32]
}

/// The coherent closure WL(x, T) of a coloring with distinguished pair sets.
pub fn wl_closure(x: &PairColoring, distinguished: &[Vec<(usize, usize)>]) -> Result<CoherentConfiguration> {
    let n = x.n();
    caps::check("pair", n, caps().pair)?;
    let mut member: Vec<Vec<u32>> = vec![Vec::new(); if distinguished.is_empty() { 0 } else { n * n }];
    for (i, set) in distinguished.iter().enumerate() {
        for &(a, b) in set {
            if a >= n || b >= n {
                return Err(Error::PointOutOfRange { point: a.max(b), n });
            }
            let m = &mut member[a * n + b];
            if m.last() != Some(&(i as u32)) {
                m.push(i as u32);
            }
        }
    }
    let keys: Vec<(u32, bool, Vec<u32>)> = (0..n * n)
        .map(|i| {
            (
                x.colors()[i],
                i / n == i % n,
                member.get(i).cloned().unwrap_or_default(),
            )
        })
        .collect();
    Ok(closure_from_keys(n, &keys))
}

/// Sparse tensor of intersection numbers: for each t the sorted nonzero
/// triples (r, s, c_{r,s}^t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTensor {
    pub rank: usize,
    pub entries: Vec<Vec<(u32, u32, u32)>>,
}

impl IntersectionTensor {
    pub fn get(&self, r: u32, s: u32, t: u32) -> u32 {
        let row = &self.entries[t as usize];
        match row.binary_search_by(|&(a, b, _)| (a, b).cmp(&(r, s))) {
            Ok(i) => row[i].2,
            Err(_) => 0,
        }
    }
}

fn triple_counts(p: &PairColoring, a: usize, b: usize) -> Vec<(u32, u32, u32)> {
    let mut m: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for g in 0..p.n() {
        *m.entry((p.color(a, g), p.color(g, b))).or_default() += 1;
    }
    m.into_iter().map(|((r, s), c)| (r, s, c)).collect()
}

/// Computes c_{r,s}^t = #{γ : (α,γ) ∈ r, (γ,β) ∈ s} at a representative of
/// each t and re-checks it at a second representative.
pub fn intersection_numbers(cc: &CoherentConfiguration) -> Result<IntersectionTensor> {
    let p = &cc.coloring;
    let index = p.class_index();
    let mut entries = Vec::with_capacity(p.rank());
    for (t, members) in index.members.iter().enumerate() {
        let (a, b) = members[0];
        let e = triple_counts(p, a, b);
        let (a2, b2) = members[members.len() - 1];
        if members.len() > 1 && triple_counts(p, a2, b2) != e {
            return Err(Error::Constancy(format!(
                "class {t}: pairs ({a},{b}) and ({a2},{b2}) have different triple counts"
            )));
        }
        entries.push(e);
    }
    Ok(IntersectionTensor {
        rank: p.rank(),
        entries,
    })
}

/// Checks the counting identities of a tensor: Σ_t |t| c_{r,s}^t equals
/// |r|·n_s on matching supports (else 0), and Σ_r c_{r,s}^t is the right
/// valency of s when s and t end in the same fiber (else 0).
pub fn check_tensor_identities(cc: &CoherentConfiguration, tensor: &IntersectionTensor) -> bool {
    let cls = &cc.classes;
    let r_count = cls.len();
    let mut weighted = vec![0usize; r_count * r_count];
    for (t, row) in tensor.entries.iter().enumerate() {
        let mut col_sum = vec![0usize; r_count];
        for &(r, s, c) in row {
            weighted[r as usize * r_count + s as usize] += c as usize * cls[t].size;
            col_sum[s as usize] += c as usize;
        }
        for (s, &sum) in col_sum.iter().enumerate() {
            let expect = if cls[s].right_fiber == cls[t].right_fiber {
                cls[s].right_valency
            } else {
                0
            };
            if sum != expect {
                return false;
            }
        }
    }
    for r in 0..r_count {
        for s in 0..r_count {
            let expect = if cls[r].right_fiber == cls[s].left_fiber {
                cls[r].size * cls[s].left_valency
            } else {
                0
            };
            if weighted[r * r_count + s] != expect {
                return false;
            }
        }
    }
    true
}

/// A failure of (C3): the triple (r, s) is counted differently at two pairs
/// of class t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C3Witness {
    pub r: u32,
    pub s: u32,
    pub t: u32,
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub first_count: u32,
    pub second_count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CcReport {
    pub rainbow: RainbowReport,
    pub c3: bool,
    pub c3_witness: Option<C3Witness>,
}

impl CcReport {
    pub fn valid(&self) -> bool {
        self.rainbow.valid() && self.c3
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(w) = self.rainbow.c1_witness {
            parts.push(format!("(C1) fails at {:?} / {:?}", w.0, w.1));
        }
        if let Some(w) = self.rainbow.c2_witness {
            parts.push(format!("(C2) fails at {:?} / {:?}", w.0, w.1));
        }
        if let Some(w) = &self.c3_witness {
            parts.push(format!(
                "(C3) fails for r={}, s={}, t={}: {} at {:?} vs {} at {:?}",
                w.r, w.s, w.t, w.first_count, w.first, w.second_count, w.second
            ));
        }
        parts.join("; ")
    }
}

/// Reports (C1), (C2), (C3) with witnesses.
pub fn validate_cc(p: &PairColoring) -> CcReport {
    let rainbow = validate_rainbow(p);
    let n = p.n();
    let (_, assigns) = refine::pair_round(&[p.colors().to_vec()], &[n], p.rank(), false);
    let assign = &assigns[0];
    let mut first_sig: Vec<Option<(u32, usize)>> = vec![None; p.rank()];
    let mut c3_witness = None;
    for (i, &sig) in assign.iter().enumerate() {
        let t = p.colors()[i] as usize;
        match first_sig[t] {
            None => first_sig[t] = Some((sig, i)),
            Some((s0, i0)) if s0 != sig => {
                let (a0, b0, a1, b1) = (i0 / n, i0 % n, i / n, i % n);
                let e0 = triple_counts(p, a0, b0);
                let e1 = triple_counts(p, a1, b1);
                let lookup = |e: &[(u32, u32, u32)], r: u32, s: u32| {
                    e.iter().find(|x| x.0 == r && x.1 == s).map_or(0, |x| x.2)
                };
                let mut keys: Vec<(u32, u32)> = e0.iter().chain(&e1).map(|x| (x.0, x.1)).collect();
                keys.sort_unstable();
                // a transpose mismatch alone splits the signature; then (C2) fails
                c3_witness = keys.into_iter().find_map(|(r, s)| {
                    let (c0, c1) = (lookup(&e0, r, s), lookup(&e1, r, s));
                    (c0 != c1).then_some(C3Witness {
                        r,
                        s,
                        t: t as u32,
                        first: (a0, b0),
                        second: (a1, b1),
                        first_count: c0,
                        second_count: c1,
                    })
                });
                if c3_witness.is_some() {
                    break;
                }
            }
            _ => {}
        }
    }
    CcReport {
        rainbow,
        c3: c3_witness.is_none(),
        c3_witness,
    }
}

/// Restriction to a homogeneity set Δ (points taken in increasing order).
pub fn restrict(cc: &CoherentConfiguration, delta: &[usize]) -> Result<CoherentConfiguration> {
    let n = cc.n();
    let mut inside = vec![false; n];
    for &a in delta {
        if a >= n {
            return Err(Error::PointOutOfRange { point: a, n });
        }
        inside[a] = true;
    }
    for (f, fiber) in cc.fibers.iter().enumerate() {
        let k = fiber.iter().filter(|&&a| inside[a]).count();
        if k != 0 && k != fiber.len() {
            return Err(Error::NotHomogeneitySet(format!("set cuts fiber {f}")));
        }
    }
    let pts: Vec<usize> = (0..n).filter(|&a| inside[a]).collect();
    if pts.is_empty() {
        return Err(Error::NotHomogeneitySet("empty set".into()));
    }
    let m = pts.len();
    let labels: Vec<u32> = (0..m * m)
        .map(|i| cc.canon[cc.color(pts[i / m], pts[i % m]) as usize])
        .collect();
    let (names, _) = partition::compact_sorted(&labels);
    Ok(CoherentConfiguration::from_names(m, names, 0))
}

/// The tensor square on Ω², point (x₁, x₂) ↦ x₁·n + x₂.
pub fn tensor_square(cc: &CoherentConfiguration) -> Result<CoherentConfiguration> {
    let n = cc.n();
    caps::check("two_extension", n, caps().two_extension)?;
    let big = n * n;
    let r = cc.rank() as u32;
    let names: Vec<u32> = (0..big * big)
        .map(|i| {
            let (x, y) = (i / big, i % big);
            let c1 = cc.canon[cc.color(x / n, y / n) as usize];
            let c2 = cc.canon[cc.color(x % n, y % n) as usize];
            c1 * r + c2
        })
        .collect();
    Ok(CoherentConfiguration::from_names(big, names, 0))
}

fn check_points(n: usize, y: &[usize]) -> Result<()> {
    if let Some(&p) = y.iter().find(|&&p| p >= n) {
        return Err(Error::PointOutOfRange { point: p, n });
    }
    if y.len() > 32 {
        return Err(Error::Arity("at most 32 points can be individualized".into()));
    }
    Ok(())
}

/// Initial keys of a point extension: (base key, bitmask of the i with
/// (a, b) = (y_i, y_i)).
pub(crate) fn extension_keys(n: usize, base: &[u32], y: &[usize]) -> Vec<u64> {
    let mut keys: Vec<u64> = base.iter().map(|&c| (c as u64) << 32).collect();
    for (i, &p) in y.iter().enumerate() {
        keys[p * n + p] |= 1 << i;
    }
    keys
}

/// X_y = WL(X, {1_{y_i}}).
pub fn point_extension(cc: &CoherentConfiguration, y: &[usize]) -> Result<CoherentConfiguration> {
    let n = cc.n();
    caps::check("pair", n, caps().pair)?;
    check_points(n, y)?;
    let keys = extension_keys(n, &cc.canonical_colors(), y);
    Ok(closure_from_keys(n, &keys))
}

/// X̂ = WL(X ⊗ X, 1_Δ) with Δ the diagonal of Ω².
pub fn two_extension(cc: &CoherentConfiguration) -> Result<CoherentConfiguration> {
    let n = cc.n();
    let sq = tensor_square(cc)?;
    let big = n * n;
    let base = sq.canonical_colors();
    let keys: Vec<u64> = (0..big * big)
        .map(|i| {
            let (x, y) = (i / big, i % big);
            let marked = x == y && x / n == x % n;
            ((base[i] as u64) << 1) | marked as u64
        })
        .collect();
    Ok(closure_from_keys(big, &keys))
}

/// X̄ from a given 2-extension on n² points.
pub fn two_closure_of_extension(hat: &CoherentConfiguration) -> Result<CoherentConfiguration> {
    let n = integer_sqrt(hat.n()).ok_or_else(|| Error::NotTwoExtension("size is not a square".into()))?;
    let delta: Vec<usize> = (0..n).map(|a| a * n + a).collect();
    restrict(hat, &delta)
}

pub fn two_closure(cc: &CoherentConfiguration) -> Result<CoherentConfiguration> {
    two_closure_of_extension(&two_extension(cc)?)
}

fn integer_sqrt(m: usize) -> Option<usize> {
    let r = (m as f64).sqrt().round() as usize;
    (r * r == m).then_some(r)
}

/// Classes of X̂ inside the parabolic e (pairs ((β,α),(γ,α))).
#[derive(Clone, Debug, Serialize)]
pub struct ParabolicReport {
    /// Number of classes contained in e.
    pub classes_in_e: usize,
    /// Row counts: |{α,β,γ}| = 1; = 2; three distinct with all pairwise base
    /// relations equal; three distinct otherwise.
    pub rows: [usize; 4],
    /// Finer census: (number of distinct elements, sorted base relations of
    /// the distinct pairs) with the number of classes of that type.
    pub types: Vec<(usize, Vec<u32>, usize)>,
}

/// Classifies the classes of a 2-extension lying in e. Base relations come
/// from the 2-closure (the diagonal restriction of `hat`).
pub fn parabolic_report(hat: &CoherentConfiguration) -> Result<ParabolicReport> {
    let big = hat.n();
    let n = integer_sqrt(big).ok_or_else(|| Error::NotTwoExtension("size is not a square".into()))?;
    let base = two_closure_of_extension(hat)?;
    let sizes = hat.coloring.sizes();
    let mut in_e = vec![0usize; hat.rank()];
    let mut kind: Vec<Option<(usize, Vec<u32>)>> = vec![None; hat.rank()];
    for alpha in 0..n {
        for beta in 0..n {
            for gamma in 0..n {
                let c = hat.color(beta * n + alpha, gamma * n + alpha) as usize;
                in_e[c] += 1;
                let mut pts = vec![alpha, beta, gamma];
                pts.sort_unstable();
                pts.dedup();
                let mut rels = Vec::new();
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        // base relations of a plane scheme are symmetric; take the
                        // smaller of the two orientations to stay orientation-free
                        let x = base.color(pts[i], pts[j]).min(base.color(pts[j], pts[i]));
                        rels.push(x);
                    }
                }
                rels.sort_unstable();
                let k = (pts.len(), rels);
                match &kind[c] {
                    None => kind[c] = Some(k),
                    Some(prev) if *prev != k => {
                        return Err(Error::NotTwoExtension(format!(
                            "class {c} mixes triple types {prev:?} and {k:?}"
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let mut rows = [0usize; 4];
    let mut types: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
    let mut classes_in_e = 0;
    for c in 0..hat.rank() {
        if in_e[c] == 0 {
            continue;
        }
        if in_e[c] != sizes[c] {
            return Err(Error::NotTwoExtension(format!("class {c} is not contained in e")));
        }
        classes_in_e += 1;
        let (d, rels) = kind[c].clone().unwrap();
        let row = match d {
            1 => 0,
            2 => 1,
            _ if rels.iter().all(|&r| r == rels[0]) => 2,
            _ => 3,
        };
        rows[row] += 1;
        *types.entry((d, rels)).or_default() += 1;
    }
    Ok(ParabolicReport {
        classes_in_e,
        rows,
        types: types.into_iter().map(|((d, r), k)| (d, r, k)).collect(),
    })
}

/// Intersection of two coherent configurations: the join of their colorings.
pub fn intersect_cc(a: &CoherentConfiguration, b: &CoherentConfiguration) -> Result<CoherentConfiguration> {
    let joined = join_partitions(&a.coloring, &b.coloring)?;
    // name each joined class by the least canonical name of `a` inside it
    let mut least = vec![u32::MAX; joined.rank()];
    for (j, &c) in joined.colors().iter().zip(a.coloring.colors()) {
        let x = &mut least[*j as usize];
        *x = (*x).min(a.canon[c as usize]);
    }
    let labels: Vec<u32> = joined.colors().iter().map(|&j| least[j as usize]).collect();
    let (names, _) = partition::compact_sorted(&labels);
    let out = CoherentConfiguration::from_names(a.n(), names, 0);
    let report = validate_cc(&out.coloring);
    if !report.valid() {
        return Err(Error::NotCoherent(report.describe()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    fn closure(g: &graph::Graph) -> CoherentConfiguration {
        wl_closure(&g.rainbow(), &[]).unwrap()
    }

    #[test]
    fn small_closures() {
        let k4 = closure(&graph::complete(4));
        assert_eq!(k4.rank(), 2);
        assert_eq!(k4.valencies(), vec![1, 3]);
        let pet = closure(&graph::petersen());
        assert_eq!(pet.rank(), 3);
        let mut v = pet.valencies();
        v.sort();
        assert_eq!(v, vec![1, 3, 6]);
        let hw = closure(&graph::heawood());
        assert_eq!(hw.valencies(), vec![1, 6, 3, 4]);
        for cc in [&k4, &pet, &hw] {
            assert!(validate_cc(cc.coloring()).valid());
        }
    }

    #[test]
    fn intersection_number_examples() {
        let k4 = closure(&graph::complete(4));
        let t = intersection_numbers(&k4).unwrap();
        assert_eq!(t.get(1, 1, 1), 2);
        assert!(check_tensor_identities(&k4, &t));
        let pg = graph::petersen();
        let pet = closure(&pg);
        let e = pet.color(0, 1);
        let t = intersection_numbers(&pet).unwrap();
        assert_eq!(t.get(e, e, e), 0);
        assert!(check_tensor_identities(&pet, &t));
        // Heawood: valency order is s0, s1, s2, s3 so colors are the indices
        let hw = closure(&graph::heawood());
        let t = intersection_numbers(&hw).unwrap();
        assert_eq!(t.get(2, 2, 1), 1);
        assert!(check_tensor_identities(&hw, &t));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_cc(&PairColoring::trivial(4)).valid());
        let p3 = graph::path(3).rainbow();
        let r = validate_cc(&p3);
        assert!(r.rainbow.valid());
        assert!(!r.c3);
        let w = r.c3_witness.unwrap();
        assert_eq!(p3.color(w.first.0, w.first.1), w.t);
        assert_eq!(p3.color(w.second.0, w.second.1), w.t);
        assert_ne!(w.first_count, w.second_count);
        assert!(CoherentConfiguration::new(&p3).is_err());
    }

    #[test]
    fn restriction() {
        let pet = closure(&graph::petersen());
        let all: Vec<usize> = (0..10).collect();
        assert!(restrict(&pet, &all).unwrap().same_partition(&pet));
        let u = closure(&graph::complete(3).disjoint_union(&graph::complete(4)));
        assert_eq!(u.fibers().len(), 2);
        let k3 = restrict(&u, &[0, 1, 2]).unwrap();
        assert_eq!(k3.rank(), 2);
        assert_eq!(k3.n(), 3);
        assert!(restrict(&u, &[0, 1]).is_err());
    }

    #[test]
    fn tensor_squares() {
        let k2 = closure(&graph::complete(2));
        assert_eq!(tensor_square(&k2).unwrap().rank(), 4);
        let k3 = closure(&graph::complete(3));
        let sq = tensor_square(&k3).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                for u in 0..9 {
                    for v in 0..9 {
                        let same = sq.color(x, y) == sq.color(u, v);
                        let expect = k3.color(x / 3, y / 3) == k3.color(u / 3, v / 3)
                            && k3.color(x % 3, y % 3) == k3.color(u % 3, v % 3);
                        assert_eq!(same, expect);
                    }
                }
            }
        }
        let hw = closure(&graph::heawood());
        let sq = tensor_square(&hw).unwrap();
        assert_eq!(sq.rank(), 16);
        assert!(validate_cc(sq.coloring()).valid());
    }

    #[test]
    fn point_extensions_of_complete_graphs() {
        for n in 4..=6 {
            let k = closure(&graph::complete(n));
            let x = point_extension(&k, &[1]).unwrap();
            assert_eq!(x.rank(), 5);
        }
    }

    #[test]
    fn two_extension_small() {
        let k3 = closure(&graph::complete(3));
        let hat = two_extension(&k3).unwrap();
        assert!(validate_cc(hat.coloring()).valid());
        let rep = parabolic_report(&hat).unwrap();
        assert!(rep.classes_in_e > 0);
        let bar = two_closure_of_extension(&hat).unwrap();
        assert!(bar.refines(&k3));
        let hw = closure(&graph::heawood());
        let bar = two_closure(&hw).unwrap();
        assert!(bar.same_partition(&hw));
    }

    #[test]
    fn intersections() {
        let pet = closure(&graph::petersen());
        assert!(intersect_cc(&pet, &pet).unwrap().same_partition(&pet));
        let disc = CoherentConfiguration::new(&PairColoring::discrete(10)).unwrap();
        assert!(intersect_cc(&disc, &pet).unwrap().same_partition(&pet));
        let a = point_extension(&pet, &[0]).unwrap();
        let b = point_extension(&pet, &[1]).unwrap();
        let i = intersect_cc(&a, &b).unwrap();
        assert!(i.refines(&pet));
    }
}
