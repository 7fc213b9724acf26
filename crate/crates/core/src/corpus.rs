//! Graph corpus (every graph up to isomorphism on few vertices, plus named
//! graphs) and the property suite run over it.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algiso::{canonical_form, wld_equivalent, wlm_equivalent};
use crate::cc::{self, CoherentConfiguration};
use crate::coloring::PairColoring;
use crate::error::{Error, Result};
use crate::graph::{self, Graph};
use crate::oracles::{self, PebbleGame, Winner};
use crate::stab::{self, par_map};
use crate::wlm;

/// Largest n for which `all_graphs` enumerates.
pub const MAX_ENUMERATED: usize = 8;

/// Stable vertex colors of color refinement, named by sorted signature so
/// that they do not depend on the labeling.
fn vertex_cells(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut colors: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();
    let mut count = {
        let mut s = colors.clone();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = (0..n).filter(|&u| g.adjacent(u, v)).map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        colors = sigs
            .iter()
            .map(|s| distinct.binary_search(s).unwrap() as u32)
            .collect();
        if distinct.len() == count {
            return colors;
        }
        count = distinct.len();
    }
}

/// Canonical code of an uncolored graph on at most 11 vertices: the least
/// upper-triangle adjacency word over all orderings compatible with the
/// refinement cells.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical_code supports n ≤ 11");
    let cells = vertex_cells(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| cells[v]);
    let slot_cell: Vec<u32> = order.iter().map(|&v| cells[v]).collect();
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn go(g: &Graph, cells: &[u32], slot_cell: &[u32], perm: &mut Vec<usize>, used: &mut [bool], best: &mut u64) {
        let n = g.n();
        if perm.len() == n {
            let mut code = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    code = (code << 1) | g.adjacent(perm[i], perm[j]) as u64;
                }
            }
            *best = (*best).min(code);
            return;
        }
        let want = slot_cell[perm.len()];
        for v in 0..n {
            if !used[v] && cells[v] == want {
                used[v] = true;
                perm.push(v);
                go(g, cells, slot_cell, perm, used, best);
                perm.pop();
                used[v] = false;
            }
        }
    }
    go(g, &cells, &slot_cell, &mut perm, &mut used, &mut best);
    best
}

/// One representative per isomorphism class of graphs on n vertices, by
/// vertex augmentation with canonical deduplication. Deterministic order.
pub fn all_graphs(n: usize) -> Result<Vec<Graph>> {
    if n > MAX_ENUMERATED {
        return Err(Error::CapExceeded {
            what: "corpus",
            value: n,
            cap: MAX_ENUMERATED,
        });
    }
    let mut level = vec![Graph::empty(0)];
    for k in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 0u32..(1 << (k - 1)) {
                let mut h = Graph::empty(k);
                for (u, v) in g.edges() {
                    h.add_edge(u, v);
                }
                for u in 0..k - 1 {
                    if mask & (1 << u) != 0 {
                        h.add_edge(u, k - 1);
                    }
                }
                if seen.insert(canonical_code(&h)) {
                    next.push(h);
                }
            }
        }
        next.sort_by_cached_key(|h| (h.edge_count(), canonical_code(h)));
        level = next;
    }
    Ok(level)
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: Graph,
}

/// Named graphs of the suite.
pub fn named_graphs() -> Vec<CorpusEntry> {
    let e = |name: &str, graph: Graph| CorpusEntry { name: name.into(), graph };
    vec![
        e("petersen", graph::petersen()),
        e("heawood", graph::heawood()),
        e("shrikhande", graph::shrikhande()),
        e("rook4", graph::rook(4)),
        e("c6", graph::cycle(6)),
        e("2c3", graph::cycle(3).disjoint_union(&graph::cycle(3))),
        e("k3+k4", graph::complete(3).disjoint_union(&graph::complete(4))),
        e("asym6", graph::smallest_asymmetric()),
    ]
}

/// Every graph on 1..=max_n vertices, named `g<n>_<index>`.
pub fn enumerated(max_n: usize) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for (i, g) in all_graphs(n)?.into_iter().enumerate() {
            out.push(CorpusEntry {
                name: format!("g{n}_{i}"),
                graph: g,
            });
        }
    }
    Ok(out)
}

/// A random relabeling of g.
pub fn relabel(g: &Graph, rng: &mut impl Rng) -> Graph {
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.shuffle(rng);
    g.permuted(&perm)
}

/// `count` uniform random labeled graphs with 1..=max_n vertices and edge
/// probability 1/2.
pub fn random_graphs(count: usize, max_n: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v);
                    }
                }
            }
            CorpusEntry {
                name: format!("random{i}"),
                graph: g,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub property: String,
    pub checked: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

/// Accumulates (property, subject, ok) observations in insertion order.
#[derive(Default)]
struct Tally {
    map: BTreeMap<usize, PropertyOutcome>,
    order: Vec<String>,
}

impl Tally {
    fn record(&mut self, property: &str, subject: &str, ok: bool) {
        let idx = match self.order.iter().position(|p| p == property) {
            Some(i) => i,
            None => {
                self.order.push(property.into());
                self.order.len() - 1
            }
        };
        let o = self.map.entry(idx).or_insert_with(|| PropertyOutcome {
            property: property.into(),
            checked: 0,
            failures: 0,
            examples: Vec::new(),
        });
        o.checked += 1;
        if !ok {
            o.failures += 1;
            if o.examples.len() < 5 {
                o.examples.push(subject.into());
            }
        }
    }

    fn absorb(&mut self, subject: &str, results: Vec<Check>) {
        for (p, r) in results {
            match r {
                Ok(ok) => self.record(p, subject, ok),
                Err(e) => self.record(p, &format!("{subject}: {e}"), false),
            }
        }
    }

    fn finish(self) -> Vec<PropertyOutcome> {
        self.map.into_values().collect()
    }
}

/// Runs per-graph checks in parallel and tallies them by property.
fn per_graph(
    entries: &[CorpusEntry],
    check: impl Fn(&Graph) -> Vec<Check> + Sync,
) -> Vec<PropertyOutcome> {
    let results = par_map(entries.len(), |i| check(&entries[i].graph));
    let mut t = Tally::default();
    for (e, r) in entries.iter().zip(results) {
        t.absorb(&e.name, r);
    }
    t.finish()
}

/// pr₂WL₃(G) = WLD(G) and WL₃(G) = WL₃(WLD(G)).
pub fn wld_identities(g: &Graph) -> Vec<Check> {
    let x = g.rainbow();
    let both = (|| -> Result<(bool, bool)> {
        let w3 = wlm::wlm_closure(&x, 3)?;
        let wld = stab::sesquiclosure(&x)?;
        let first = wlm::pr2(&w3)?.same_partition(&wld);
        let second = wlm::wlm_closure(wld.coloring(), 3)?.same_partition(&w3);
        Ok((first, second))
    })();
    match both {
        Ok((a, b)) => vec![("pr2 WL3 = WLD", Ok(a)), ("WL3 = WL3 o WLD", Ok(b))],
        Err(e) => vec![("pr2 WL3 = WLD", Err(e.to_string())), ("WL3 = WL3 o WLD", Err(e.to_string()))],
    }
}

type Check = (&'static str, std::result::Result<bool, String>);

/// pr₂WL₃(G) ≤ W(G) ≤ pr₂WL₄(G).
pub fn sandwich(g: &Graph) -> Vec<Check> {
    let x = g.rainbow();
    let r = (|| -> Result<(bool, bool)> {
        let lo = wlm::pr2(&wlm::wlm_closure(&x, 3)?)?;
        let w = stab::deep_stab(&x, &[1, 2, 3, 4])?;
        let hi = wlm::pr2(&wlm::wlm_closure(&x, 4)?)?;
        Ok((w.refines(&lo), hi.refines(&w)))
    })();
    match r {
        Ok((a, b)) => vec![("pr2 WL3 <= W", Ok(a)), ("W <= pr2 WL4", Ok(b))],
        Err(e) => vec![("pr2 WL3 <= W", Err(e.to_string())), ("W <= pr2 WL4", Err(e.to_string()))],
    }
}

/// The rainbow of g with point 0 individualized: a refinement of g's
/// rainbow, used for monotonicity.
fn finer_input(x: &PairColoring) -> PairColoring {
    PairColoring::from_fn(x.n(), |a, b| (x.color(a, b), a == 0, b == 0))
}

/// Extensive, idempotent and monotone for a pair-level closure.
fn pair_closure_laws(
    x: &PairColoring,
    f: impl Fn(&PairColoring) -> Result<CoherentConfiguration>,
) -> Result<[bool; 3]> {
    let fx = f(x)?;
    let extensive = fx.coloring().refines(x);
    let idempotent = f(fx.coloring())?.same_partition(&fx);
    let monotone = f(&finer_input(x))?.refines(&fx);
    Ok([extensive, idempotent, monotone])
}

/// Closure laws for wl_closure, wlm_closure(3), sesquiclosure and deep_stab,
/// plus automorphism preservation of σ₁..σ₄ when n ≤ 8.
pub fn closure_laws(g: &Graph) -> Vec<Check> {
    let x = g.rainbow();
    let mut out = Vec::new();
    let mut push3 = |names: [&'static str; 3], r: Result<[bool; 3]>| match r {
        Ok(v) => {
            for (n, ok) in names.into_iter().zip(v) {
                out.push((n, Ok(ok)));
            }
        }
        Err(e) => {
            for n in names {
                out.push((n, Err(e.to_string())));
            }
        }
    };
    push3(
        ["wl_closure extensive", "wl_closure idempotent", "wl_closure monotone"],
        pair_closure_laws(&x, |p| cc::wl_closure(p, &[])),
    );
    push3(
        ["sesquiclosure extensive", "sesquiclosure idempotent", "sesquiclosure monotone"],
        pair_closure_laws(&x, stab::sesquiclosure),
    );
    push3(
        ["deep_stab extensive", "deep_stab idempotent", "deep_stab monotone"],
        pair_closure_laws(&x, |p| stab::deep_stab(p, &[1, 2, 3, 4])),
    );
    push3(
        ["wl3 extensive", "wl3 idempotent", "wl3 monotone"],
        (|| -> Result<[bool; 3]> {
            let f = wlm::wlm_closure(&x, 3)?;
            let extensive = f.refines(&wlm::initial_coloring(&x, 3)?);
            let idempotent = wlm::wlm_refine(&f)?.same_partition(&f);
            let monotone = wlm::wlm_closure(&finer_input(&x), 3)?.refines(&f);
            Ok([extensive, idempotent, monotone])
        })(),
    );
    if g.n() <= 8 {
        let r = (|| -> Result<bool> {
            let orbits = oracles::brute_orbits(&x, 2)?;
            let base = cc::wl_closure(&x, &[])?;
            let mut ok = orbits.pairs.refines(&base);
            for i in 1..=4 {
                let s = stab::sigma(&base, i)?;
                ok &= orbits.generators.iter().all(|gen| oracles::preserves(s.coloring(), gen));
            }
            Ok(ok)
        })();
        out.push(("sigma_i preserve Aut", r.map_err(|e| e.to_string())));
    }
    out
}

/// Properties on many graphs at once.
pub fn check_wld_identities(entries: &[CorpusEntry]) -> Vec<PropertyOutcome> {
    per_graph(entries, wld_identities)
}

pub fn check_sandwich(entries: &[CorpusEntry]) -> Vec<PropertyOutcome> {
    per_graph(entries, sandwich)
}

pub fn check_closure_laws(entries: &[CorpusEntry]) -> Vec<PropertyOutcome> {
    per_graph(entries, closure_laws)
}

/// WL₃ and WLD verdicts agree on every pair whose WL closures have equal
/// canonical invariants, and on each graph against a random relabeling.
pub fn check_agreement(entries: &[CorpusEntry], seed: u64) -> Result<Vec<PropertyOutcome>> {
    let keys = par_map(entries.len(), |i| -> Result<String> {
        let g = &entries[i].graph;
        let c = canonical_form(&cc::wl_closure(&g.rainbow(), &[])?)?;
        Ok(format!("{}:{:?}", g.n(), c.invariant()))
    });
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        groups.entry(k?).or_default().push(i);
    }
    let mut pairs: Vec<(String, Graph, Graph)> = Vec::new();
    for members in groups.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pairs.push((
                    format!("{} vs {}", entries[i].name, entries[j].name),
                    entries[i].graph.clone(),
                    entries[j].graph.clone(),
                ));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for e in entries {
        pairs.push((format!("{} vs relabeled", e.name), e.graph.clone(), relabel(&e.graph, &mut rng)));
    }
    let results = par_map(pairs.len(), |k| -> Result<(bool, bool)> {
        let (_, g, h) = &pairs[k];
        let (x, y) = (g.rainbow(), h.rainbow());
        if crate::algiso::standard_similarity(&x, &y).is_err() {
            return Ok((true, true));
        }
        Ok((wlm_equivalent(&x, &y, 3)?.equivalent(), wld_equivalent(&x, &y)?.equivalent()))
    });
    let mut t = Tally::default();
    for ((name, _, _), r) in pairs.iter().zip(results) {
        match r {
            Ok((a, b)) => {
                t.record("wl3 and wld verdicts agree", name, a == b);
                if name.ends_with("relabeled") {
                    t.record("relabeling is equivalent", name, a && b);
                }
            }
            Err(e) => t.record("wl3 and wld verdicts agree", &format!("{name}: {e}"), false),
        }
    }
    Ok(t.finish())
}

/// Duplicator wins from (x, x′) with three pebbles iff the joint WL₂
/// colors of x and x′ agree. Returns the first counterexample.
pub fn game_identity(g: &Graph, h: &Graph) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let (x, y) = (g.rainbow(), h.rainbow());
    let game = PebbleGame::solve(&x, &y)?;
    let run = wlm::wlm_joint(&[&x, &y], 2, false)?;
    let (cg, ch) = (&run.colorings[0], &run.colorings[1]);
    let (jg, jh) = (&run.joint[0], &run.joint[1]);
    let n = g.n();
    for a in 0..n * n {
        let ta = cg.tuple(a);
        for b in 0..n * n {
            let tb = ch.tuple(b);
            let duplicator = game.winner(&ta, &tb)? == Winner::Duplicator;
            if duplicator != (jg[a] == jh[b]) {
                return Ok(Some((ta, tb)));
            }
        }
    }
    Ok(None)
}

/// The game identity over every similar pair with n ≤ `exhaustive_n`, plus
/// `sampled` random similar pairs on `exhaustive_n + 1` vertices.
pub fn check_game_identity(exhaustive_n: usize, sampled: usize, seed: u64) -> Result<Vec<PropertyOutcome>> {
    let mut pairs: Vec<(String, Graph, Graph)> = Vec::new();
    for n in 1..=exhaustive_n {
        let gs = all_graphs(n)?;
        for (i, g) in gs.iter().enumerate() {
            for (j, h) in gs.iter().enumerate() {
                pairs.push((format!("g{n}_{i} vs g{n}_{j}"), g.clone(), h.clone()));
            }
        }
    }
    let next = exhaustive_n + 1;
    if sampled > 0 {
        let gs = all_graphs(next)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sampled {
            let (i, j) = (rng.gen_range(0..gs.len()), rng.gen_range(0..gs.len()));
            let h = relabel(&gs[j], &mut rng);
            pairs.push((format!("g{next}_{i} vs g{next}_{j}*"), gs[i].clone(), h));
        }
    }
    let results = par_map(pairs.len(), |k| -> Result<Option<_>> {
        let (_, g, h) = &pairs[k];
        if crate::algiso::standard_similarity(&g.rainbow(), &h.rainbow()).is_err() {
            return Ok(None);
        }
        game_identity(g, h).map(Some)
    });
    let mut t = Tally::default();
    for ((name, _, _), r) in pairs.iter().zip(results) {
        match r {
            Ok(None) => {}
            Ok(Some(None)) => t.record("duplicator wins iff WL2 colors agree", name, true),
            Ok(Some(Some((a, b)))) => {
                t.record("duplicator wins iff WL2 colors agree", &format!("{name} at {a:?}/{b:?}"), false)
            }
            Err(e) => t.record("duplicator wins iff WL2 colors agree", &format!("{name}: {e}"), false),
        }
    }
    Ok(t.finish())
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub max_n: usize,
    /// Replace the enumerated graphs by this many random ones.
    pub sample: Option<usize>,
    pub named: bool,
    pub seed: u64,
    /// Game identity: exhaustive up to this n (0 skips it).
    pub game_n: usize,
    /// Extra random pairs on game_n + 1 vertices.
    pub game_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_n: 7,
            sample: None,
            named: true,
            seed: 7,
            game_n: 4,
            game_samples: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub graphs: usize,
    pub properties: Vec<PropertyOutcome>,
    pub passed: bool,
}

/// The full property suite over the corpus.
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut base = match opts.sample {
        Some(k) => random_graphs(k, opts.max_n, opts.seed),
        None => enumerated(opts.max_n)?,
    };
    let small = base.clone();
    if opts.named {
        base.extend(named_graphs());
    }
    let mut properties = check_wld_identities(&base);
    properties.extend(check_sandwich(&small));
    properties.extend(check_agreement(&base, opts.seed)?);
    properties.extend(check_closure_laws(&base));
    if opts.game_n > 0 {
        properties.extend(check_game_identity(opts.game_n, opts.game_samples, opts.seed)?);
    }
    let passed = properties.iter().all(PropertyOutcome::passed);
    Ok(SuiteReport {
        graphs: base.len(),
        properties,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let expect = [1, 1, 2, 4, 11, 34, 156];
        for (n, &c) in expect.iter().enumerate() {
            assert_eq!(all_graphs(n).unwrap().len(), c, "n = {n}");
        }
    }

    #[test]
    fn canonical_code_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for e in random_graphs(40, 8, 1) {
            let h = relabel(&e.graph, &mut rng);
            assert_eq!(canonical_code(&e.graph), canonical_code(&h));
        }
        assert_ne!(canonical_code(&graph::cycle(6)), canonical_code(&named_graphs()[5].graph));
    }

    #[test]
    fn game_identity_small() {
        let out = check_game_identity(3, 0, 1).unwrap();
        assert!(out.iter().all(PropertyOutcome::passed), "{out:?}");
    }
}
