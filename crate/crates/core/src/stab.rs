//! Weisfeiler's relations ∼₁..∼₄, the operators σᵢ, depth-1 stabilization
//! and the sesquiclosure.

use serde::Serialize;

use crate::caps::{self, caps, threads};
use crate::cc::{self, CoherentConfiguration};
use crate::coloring::PairColoring;
use crate::error::{Error, Result};
use crate::partition;
use crate::refine;

/// Point extensions X_y of one configuration for every 1-tuple or every
/// pair y, with their ∼-classes (mutual extendability of the identity).
///
/// Each X_y is named by its own refinement signatures, so a class of X_y and
/// the class of X_{y′} with the same name correspond under the yy′-extension
/// whenever that extension exists.
#[derive(Clone, Debug)]
pub struct ExtensionCache {
    n: usize,
    arity: usize,
    names: Vec<Vec<u32>>,
    ranks: Vec<usize>,
    class_of: Vec<u32>,
    members: Vec<Vec<usize>>,
}

struct Entry {
    fingerprint: u64,
    names: Vec<u32>,
    rank: usize,
}

fn compute_entry(n: usize, base: &[u32], y: &[usize]) -> Entry {
    let keys = cc::extension_keys(n, base, y);
    let r = cc::refine_from_keys(n, &keys, cc::encode_u64);
    Entry {
        fingerprint: r.history.fingerprint(),
        names: r.names,
        rank: r.rank,
    }
}

/// Evaluates `f` on 0..count using up to `threads()` workers; results come
/// back in index order.
pub(crate) fn par_map<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = threads().clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| scope.spawn(move || (w..count).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

impl ExtensionCache {
    /// X_α for every point α.
    pub fn one_point(cc: &CoherentConfiguration) -> Result<Self> {
        caps::check("pair", cc.n(), caps().pair)?;
        Ok(Self::build(cc, 1))
    }

    /// X_y for every pair y, indexed row-major.
    pub fn pairs(cc: &CoherentConfiguration) -> Result<Self> {
        caps::check("pair_extension", cc.n(), caps().pair_extension)?;
        Ok(Self::build(cc, 2))
    }

    /// Number of distinguished points per extension (1 or 2).
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The tuple y of the k-th extension.
    pub fn tuple(&self, k: usize) -> Vec<usize> {
        tuple_of(self.n, self.arity, k)
    }

    fn build(cc: &CoherentConfiguration, arity: usize) -> Self {
        let n = cc.n();
        let base = cc.canonical_colors();
        let count = n.pow(arity as u32);
        let entries = par_map(count, |k| compute_entry(n, &base, &tuple_of(n, arity, k)));
        // group by fingerprint, then confirm exactly by lockstep refinement
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&k| (entries[k].fingerprint, k));
        let mut groups: Vec<(u64, usize, Vec<usize>)> = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let fp = entries[order[start]].fingerprint;
            let mut end = start;
            while end < order.len() && entries[order[end]].fingerprint == fp {
                end += 1;
            }
            let mut subgroups: Vec<Vec<usize>> = Vec::new();
            for &k in &order[start..end] {
                let keys = cc::extension_keys(n, &base, &tuple_of(n, arity, k));
                let found = subgroups.iter_mut().find(|g| {
                    let rep = cc::extension_keys(n, &base, &tuple_of(n, arity, g[0]));
                    refine::synchronized(&rep, n, &keys, n)
                });
                match found {
                    Some(g) => g.push(k),
                    None => subgroups.push(vec![k]),
                }
            }
            for (sub, g) in subgroups.into_iter().enumerate() {
                groups.push((fp, sub, g));
            }
            start = end;
        }
        groups.sort();
        let mut class_of = vec![0u32; count];
        let mut members = Vec::with_capacity(groups.len());
        for (label, (_, _, g)) in groups.into_iter().enumerate() {
            for &k in &g {
                class_of[k] = label as u32;
            }
            members.push(g);
        }
        let (names, ranks) = entries.into_iter().map(|e| (e.names, e.rank)).unzip();
        ExtensionCache {
            n,
            arity,
            names,
            ranks,
            class_of,
            members,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Label-independent name of pair (a, b) in X_y, y given by index.
    pub fn name(&self, y: usize, a: usize, b: usize) -> u32 {
        self.names[y][a * self.n + b]
    }

    pub fn names(&self, y: usize) -> &[u32] {
        &self.names[y]
    }

    pub fn rank(&self, y: usize) -> usize {
        self.ranks[y]
    }

    /// ∼-class label of y: equal labels iff the identity has the
    /// yy′-extension.
    pub fn class_of(&self, y: usize) -> u32 {
        self.class_of[y]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// The extension X_y as a configuration.
    pub fn extension(&self, y: usize) -> CoherentConfiguration {
        CoherentConfiguration::from_names(self.n, self.names[y].clone(), 0)
    }

    /// n_y(x) for all y (outer) and x (inner, row-major pairs).
    pub fn counts(&self) -> Vec<Vec<u32>> {
        let nn = self.n * self.n;
        let mut out = vec![vec![0u32; nn]; self.len()];
        let mut vals: Vec<u32> = Vec::new();
        for class in &self.members {
            for x in 0..nn {
                vals.clear();
                vals.extend(class.iter().map(|&y| self.names[y][x]));
                let mut sorted = vals.clone();
                sorted.sort_unstable();
                for (&y, &v) in class.iter().zip(&vals) {
                    let lo = sorted.partition_point(|&s| s < v);
                    let hi = sorted.partition_point(|&s| s <= v);
                    out[y][x] = (hi - lo) as u32;
                }
            }
        }
        out
    }

    /// n_y(x) for one y and one x.
    pub fn count(&self, y: usize, x: usize) -> u32 {
        let v = self.names[y][x];
        self.members[self.class_of[y] as usize]
            .iter()
            .filter(|&&z| self.names[z][x] == v)
            .count() as u32
    }

    pub fn index_of(&self, y: &[usize]) -> usize {
        y.iter().fold(0, |acc, &a| acc * self.n + a)
    }
}

fn tuple_of(n: usize, arity: usize, mut k: usize) -> Vec<usize> {
    let mut y = vec![0; arity];
    for slot in y.iter_mut().rev() {
        *slot = k % n;
        k /= n;
    }
    y
}

/// Matching rule for the value families in ∼₂ and ∼₄.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SimMode {
    /// Equal value sets (the symmetrized "for each … there is …").
    #[default]
    ValueSet,
    /// Equal multisets; possibly finer.
    Multiset,
}

/// Classes of ∼ᵢ, labelled in a label-independent order. For i = 1 the
/// labels are per point, otherwise per pair (row-major).
#[derive(Clone, Debug, Serialize)]
pub struct SimClasses {
    pub index: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl SimClasses {
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (k, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(k);
        }
        out
    }
}

fn value_family(mut v: Vec<u32>, mode: SimMode) -> Vec<u32> {
    v.sort_unstable();
    if mode == SimMode::ValueSet {
        v.dedup();
    }
    v
}

fn sim_from_cache(cc: &CoherentConfiguration, i: usize, cache: &ExtensionCache, mode: SimMode) -> SimClasses {
    let n = cc.n();
    match i {
        1 | 3 => {
            let labels: Vec<u32> = (0..cache.len()).map(|k| cache.class_of(k)).collect();
            SimClasses {
                index: i,
                count: cache.classes().len(),
                labels,
            }
        }
        _ => {
            let counts = cache.counts();
            let canon = cc.canonical_colors();
            let keys: Vec<(u32, Vec<u32>)> = (0..n * n)
                .map(|x| {
                    let head = if i == 2 { canon[x] } else { cache.class_of(x) };
                    (head, value_family(counts.iter().map(|c| c[x]).collect(), mode))
                })
                .collect();
            let (labels, count) = partition::compact_sorted(&keys);
            SimClasses { index: i, labels, count }
        }
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=4).contains(&i) {
        Ok(())
    } else {
        Err(Error::Arity(format!("σ index {i} not in 1..=4")))
    }
}

pub fn sim_classes(cc: &CoherentConfiguration, i: usize) -> Result<SimClasses> {
    sim_classes_with(cc, i, SimMode::default())
}

pub fn sim_classes_with(cc: &CoherentConfiguration, i: usize, mode: SimMode) -> Result<SimClasses> {
    check_index(i)?;
    let cache = if i <= 2 {
        ExtensionCache::one_point(cc)?
    } else {
        ExtensionCache::pairs(cc)?
    };
    Ok(sim_from_cache(cc, i, &cache, mode))
}

/// WL(X, Tᵢ) for given ∼ᵢ classes.
pub fn sigma_from(cc: &CoherentConfiguration, sim: &SimClasses) -> CoherentConfiguration {
    let n = cc.n();
    let canon = cc.canonical_colors();
    let keys: Vec<(u32, u32)> = (0..n * n)
        .map(|x| {
            let label = if sim.index == 1 {
                let (a, b) = (x / n, x % n);
                if a == b {
                    sim.labels[a] + 1
                } else {
                    0
                }
            } else {
                sim.labels[x]
            };
            (canon[x], label)
        })
        .collect();
    cc::closure_from_keys(n, &keys)
}

/// σᵢ(X) = WL(X, Tᵢ).
pub fn sigma(cc: &CoherentConfiguration, i: usize) -> Result<CoherentConfiguration> {
    Ok(sigma_from(cc, &sim_classes(cc, i)?))
}

/// One application in a stabilization run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub sigma: usize,
    pub rank_before: usize,
    pub rank_after: usize,
}

#[derive(Clone, Debug)]
pub struct Stabilized {
    pub cc: CoherentConfiguration,
    pub trace: Vec<TraceStep>,
    /// One-point extensions of the result, when they were computed last.
    pub cache: Option<ExtensionCache>,
}

/// The procedure "while X < σᵢ(X) for some i ∈ I do X := σᵢ(X)" with
/// ascending i, restarting from the smallest index after each growth.
pub fn stabilize(start: CoherentConfiguration, selected: &[usize], mode: SimMode) -> Result<Stabilized> {
    let mut sel: Vec<usize> = selected.to_vec();
    sel.sort_unstable();
    sel.dedup();
    for &i in &sel {
        check_index(i)?;
    }
    if sel.iter().any(|&i| i >= 3) {
        caps::check("pair_extension", start.n(), caps().pair_extension)?;
    }
    let mut x = start;
    let mut trace = Vec::new();
    let mut iteration = 0;
    loop {
        let mut one: Option<ExtensionCache> = None;
        let mut two: Option<ExtensionCache> = None;
        let mut grew = false;
        for &i in &sel {
            let cache = if i <= 2 {
                if one.is_none() {
                    one = Some(ExtensionCache::one_point(&x)?);
                }
                one.as_ref().unwrap()
            } else {
                if two.is_none() {
                    two = Some(ExtensionCache::pairs(&x)?);
                }
                two.as_ref().unwrap()
            };
            let next = sigma_from(&x, &sim_from_cache(&x, i, cache, mode));
            iteration += 1;
            trace.push(TraceStep {
                iteration,
                sigma: i,
                rank_before: x.rank(),
                rank_after: next.rank(),
            });
            if next.rank() > x.rank() {
                x = next;
                grew = true;
                break;
            }
        }
        if !grew {
            return Ok(Stabilized { cc: x, trace, cache: one });
        }
    }
}

/// WLD(X): the σ₁,σ₂ fixed point above WL(X).
pub fn sesquiclosure(x: &PairColoring) -> Result<CoherentConfiguration> {
    Ok(sesquiclosure_traced(x)?.cc)
}

pub fn sesquiclosure_traced(x: &PairColoring) -> Result<Stabilized> {
    stabilize(cc::wl_closure(x, &[])?, &[1, 2], SimMode::default())
}

/// W restricted to the selected σ's; {1,2,3,4} gives W itself.
pub fn deep_stab(x: &PairColoring, selected: &[usize]) -> Result<CoherentConfiguration> {
    Ok(deep_stab_traced(x, selected)?.cc)
}

pub fn deep_stab_traced(x: &PairColoring, selected: &[usize]) -> Result<Stabilized> {
    stabilize(cc::wl_closure(x, &[])?, selected, SimMode::default())
}

/// n_y(x) for pairs x and y.
pub fn n_y_count(cc: &CoherentConfiguration, x: (usize, usize), y: (usize, usize)) -> Result<u32> {
    let n = cc.n();
    for p in [x.0, x.1, y.0, y.1] {
        if p >= n {
            return Err(Error::PointOutOfRange { point: p, n });
        }
    }
    let cache = ExtensionCache::pairs(cc)?;
    Ok(cache.count(y.0 * n + y.1, x.0 * n + x.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    fn scheme(g: &graph::Graph) -> CoherentConfiguration {
        cc::wl_closure(&g.rainbow(), &[]).unwrap()
    }

    fn shrikhande_rook() -> graph::Graph {
        graph::shrikhande().disjoint_union(&graph::rook(4))
    }

    #[test]
    fn complete_graph_classes() {
        let k = scheme(&graph::complete(5));
        assert_eq!(sim_classes(&k, 1).unwrap().count, 1);
        let s3 = sim_classes(&k, 3).unwrap();
        assert_eq!(s3.count, 2);
        assert_eq!(sigma(&k, 1).unwrap(), k);
        assert_eq!(deep_stab(&graph::complete(5).rainbow(), &[1, 2, 3, 4]).unwrap().rank(), 2);
    }

    #[test]
    fn n_alpha_on_k4() {
        let k = scheme(&graph::complete(4));
        assert_eq!(n_y_count(&k, (0, 1), (2, 2)).unwrap(), 2);
        let cache = ExtensionCache::pairs(&k).unwrap();
        assert!(cache.counts().iter().flatten().all(|&c| c >= 1));
    }

    #[test]
    fn shrikhande_rook_splits() {
        let g = shrikhande_rook();
        let x = scheme(&g);
        assert_eq!(x.fibers().len(), 1);
        let s1 = sim_classes(&x, 1).unwrap();
        assert_eq!(s1.count, 2);
        let mut cls = s1.classes();
        cls.sort();
        assert_eq!(cls[0], (0..16).collect::<Vec<_>>());
        assert!(sigma(&x, 1).unwrap().fibers().len() >= 2);
        let w = deep_stab(&g.rainbow(), &[1, 2]).unwrap();
        assert!(w.fiber_of(0) != w.fiber_of(16));
    }

    #[test]
    fn shrikhande_sesquiclosure_has_rank_four() {
        let w = sesquiclosure(&graph::shrikhande().rainbow()).unwrap();
        assert_eq!(w.rank(), 4);
        let mut v = w.valencies();
        v.sort_unstable();
        assert_eq!(v, vec![1, 3, 6, 6]);
    }

    #[test]
    fn threads_do_not_change_results() {
        let x = scheme(&graph::petersen());
        let a = ExtensionCache::one_point(&x).unwrap();
        caps::set_threads(3);
        let b = ExtensionCache::one_point(&x).unwrap();
        caps::set_threads(1);
        assert_eq!(a.names, b.names);
        assert_eq!(a.class_of, b.class_of);
    }
}
