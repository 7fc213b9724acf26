//! Canonical forms, algebraic isomorphisms found by lockstep refinement,
//! point extensions of them, sesquiclosed checks, and the WL_m / WLD
//! equivalence tests.

use serde::Serialize;

use crate::cc::{self, CoherentConfiguration, IntersectionTensor};
use crate::coloring::PairColoring;
use crate::error::{Error, Result};
use crate::refine;
use crate::stab::{self, ExtensionCache};
use crate::wlm;

/// Per-class data in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassCensus {
    pub size: usize,
    pub diagonal: bool,
    pub left_fiber_size: usize,
    pub right_fiber_size: usize,
    pub left_valency: usize,
    pub right_valency: usize,
    pub transpose: u32,
}

/// Relabeling-invariant description of a configuration: colors renamed by
/// the label-independent names, with census and tensor in that order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalColoring {
    pub n: usize,
    /// Canonical color of every pair, row-major.
    #[serde(skip)]
    pub colors: Vec<u32>,
    pub census: Vec<ClassCensus>,
    /// For each class t, sorted nonzero (r, s, c_{r,s}^t).
    pub tensor: Vec<Vec<(u32, u32, u32)>>,
}

impl CanonicalColoring {
    /// Census and tensor only; equal for relabeled inputs.
    pub fn invariant(&self) -> (&[ClassCensus], &[Vec<(u32, u32, u32)>]) {
        (&self.census, &self.tensor)
    }
}

pub fn canonical_form(cc: &CoherentConfiguration) -> Result<CanonicalColoring> {
    let canon = cc.canon();
    let rank = cc.rank();
    // canon names are dense; position of each name
    let mut by_name = vec![0usize; rank];
    for (c, &name) in canon.iter().enumerate() {
        by_name[name as usize] = c;
    }
    let census = by_name
        .iter()
        .map(|&c| {
            let info = &cc.classes()[c];
            ClassCensus {
                size: info.size,
                diagonal: info.diagonal,
                left_fiber_size: cc.fibers()[info.left_fiber].len(),
                right_fiber_size: cc.fibers()[info.right_fiber].len(),
                left_valency: info.left_valency,
                right_valency: info.right_valency,
                transpose: canon[info.transpose as usize],
            }
        })
        .collect();
    let t = cc::intersection_numbers(cc)?;
    let tensor = by_name
        .iter()
        .map(|&c| {
            let mut v: Vec<(u32, u32, u32)> = t.entries[c]
                .iter()
                .map(|&(r, s, k)| (canon[r as usize], canon[s as usize], k))
                .collect();
            v.sort_unstable();
            v
        })
        .collect();
    Ok(CanonicalColoring {
        n: cc.n(),
        colors: cc.canonical_colors(),
        census,
        tensor,
    })
}

/// A color bijection between two configurations with its evidence.
#[derive(Clone, Debug)]
pub struct AlgIsoWitness {
    pub source: CoherentConfiguration,
    pub target: CoherentConfiguration,
    /// Source color → target color (row-major numbering on both sides).
    pub map: Vec<u32>,
    pub tensors_match: bool,
    pub supports_match: bool,
    /// Points fixed by a point extension, when this witness is one.
    pub points: Option<(Vec<usize>, Vec<usize>)>,
}

impl AlgIsoWitness {
    pub fn identity(cc: &CoherentConfiguration) -> Self {
        AlgIsoWitness {
            source: cc.clone(),
            target: cc.clone(),
            map: (0..cc.rank() as u32).collect(),
            tensors_match: true,
            supports_match: true,
            points: None,
        }
    }

    pub fn inverse_map(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.map.len()];
        for (c, &d) in self.map.iter().enumerate() {
            inv[d as usize] = c as u32;
        }
        inv
    }

    /// Is the map the identity on canonical names?
    pub fn preserves_names(&self) -> bool {
        self.map
            .iter()
            .enumerate()
            .all(|(c, &d)| self.source.canon()[c] == self.target.canon()[d as usize])
    }

    pub fn pairs(&self) -> Vec<[u32; 2]> {
        self.map.iter().enumerate().map(|(c, &d)| [c as u32, d]).collect()
    }
}

/// First round at which two lockstep refinements disagree, with the
/// censuses of that round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub round: usize,
    pub left_census: Vec<u32>,
    pub right_census: Vec<u32>,
}

fn divergence_of(r: &refine::Refined<refine::PairSig>, initial: &[Vec<u32>], rank0: usize) -> Option<Divergence> {
    let round = r.diverged_at?;
    let (left, right) = if round == 0 {
        (refine::census(&initial[0], rank0), refine::census(&initial[1], rank0))
    } else {
        let c = &r.rounds[round - 1].counts;
        (c[0].clone(), c[1].clone())
    };
    Some(Divergence {
        round,
        left_census: left,
        right_census: right,
    })
}

/// Runs two keyed structures in lockstep. On success returns the final
/// names of both sides.
fn lockstep<K: Ord + Clone>(a: &[K], na: usize, b: &[K], nb: usize) -> std::result::Result<(Vec<u32>, Vec<u32>, usize), Divergence> {
    let (names, distinct) = refine::name_keys(&[a, b]);
    let initial = names.clone();
    let r = refine::refine_pairs(names, &[na, nb], distinct.len(), false, true);
    if let Some(d) = divergence_of(&r, &initial, distinct.len()) {
        return Err(d);
    }
    let mut it = r.colors.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap(), r.rank))
}

/// Builds the witness from two final namings of the same shape.
fn witness_from_names(
    source: CoherentConfiguration,
    target: CoherentConfiguration,
    names_a: &[u32],
    names_b: &[u32],
    rank: usize,
) -> Option<AlgIsoWitness> {
    let mut by_name = vec![u32::MAX; rank];
    for (i, &f) in names_b.iter().enumerate() {
        by_name[f as usize] = target.coloring().colors()[i];
    }
    let mut map = vec![u32::MAX; source.rank()];
    for (i, &f) in names_a.iter().enumerate() {
        let c = source.coloring().colors()[i] as usize;
        let d = by_name[f as usize];
        if d == u32::MAX || (map[c] != u32::MAX && map[c] != d) {
            return None;
        }
        map[c] = d;
    }
    if source.rank() != target.rank() || map.contains(&u32::MAX) {
        return None;
    }
    let supports_match = (0..source.rank()).all(|c| {
        let (x, y) = (&source.classes()[c], &target.classes()[map[c] as usize]);
        x.size == y.size && x.diagonal == y.diagonal && map[x.transpose as usize] == y.transpose
    });
    let tensors_match = match (cc::intersection_numbers(&source), cc::intersection_numbers(&target)) {
        (Ok(ta), Ok(tb)) => tensors_agree(&ta, &tb, &map),
        _ => false,
    };
    Some(AlgIsoWitness {
        source,
        target,
        map,
        tensors_match,
        supports_match,
        points: None,
    })
}

/// Exhaustive comparison c_{φr,φs}^{φt} = c_{r,s}^t.
pub fn tensors_agree(a: &IntersectionTensor, b: &IntersectionTensor, map: &[u32]) -> bool {
    if a.entries.len() != b.entries.len() {
        return false;
    }
    a.entries.iter().enumerate().all(|(t, row)| {
        let mut mapped: Vec<(u32, u32, u32)> = row
            .iter()
            .map(|&(r, s, c)| (map[r as usize], map[s as usize], c))
            .collect();
        mapped.sort_unstable();
        mapped == b.entries[map[t] as usize]
    })
}

fn check_seed(a: &CoherentConfiguration, b: &CoherentConfiguration, seed: &[(u32, u32)]) -> Result<()> {
    let mut used = vec![false; b.rank()];
    let mut src = vec![false; a.rank()];
    for &(c, d) in seed {
        if c as usize >= a.rank() || d as usize >= b.rank() {
            return Err(Error::InconsistentSeed(format!("pair ({c}, {d}) out of range")));
        }
        if a.classes()[c as usize].diagonal != b.classes()[d as usize].diagonal {
            return Err(Error::InconsistentSeed(format!(
                "class {c} and class {d} differ in lying on the diagonal"
            )));
        }
        if used[d as usize] || src[c as usize] {
            return Err(Error::InconsistentSeed(format!("pair ({c}, {d}) is not injective")));
        }
        used[d as usize] = true;
        src[c as usize] = true;
    }
    Ok(())
}

/// Looks for the algebraic isomorphism a → b that agrees with `seed`
/// (row-major colors) and, on unseeded classes, matches classes with equal
/// canonical names. Decided by lockstep refinement with shared naming.
pub fn find_alg_iso(
    a: &CoherentConfiguration,
    b: &CoherentConfiguration,
    seed: &[(u32, u32)],
) -> Result<Option<AlgIsoWitness>> {
    Ok(find_alg_iso_detailed(a, b, seed)?.ok())
}

pub fn find_alg_iso_detailed(
    a: &CoherentConfiguration,
    b: &CoherentConfiguration,
    seed: &[(u32, u32)],
) -> Result<std::result::Result<AlgIsoWitness, Divergence>> {
    check_seed(a, b, seed)?;
    let mut seed_a = vec![None; a.rank()];
    let mut seed_b = vec![None; b.rank()];
    for &(c, d) in seed {
        seed_a[c as usize] = Some(c);
        seed_b[d as usize] = Some(c);
    }
    let key = |seeded: Option<u32>, name: u32| match seeded {
        Some(c) => (0u8, c),
        None => (1u8, name),
    };
    let ka: Vec<(u8, u32)> = a
        .coloring()
        .colors()
        .iter()
        .map(|&c| key(seed_a[c as usize], a.canon()[c as usize]))
        .collect();
    let kb: Vec<(u8, u32)> = b
        .coloring()
        .colors()
        .iter()
        .map(|&d| key(seed_b[d as usize], b.canon()[d as usize]))
        .collect();
    let (na, nb, rank) = match lockstep(&ka, a.n(), &kb, b.n()) {
        Ok(x) => x,
        Err(d) => return Ok(Err(d)),
    };
    let w = witness_from_names(a.clone(), b.clone(), &na, &nb, rank);
    Ok(match w {
        Some(w) if w.tensors_match && w.supports_match => Ok(w),
        _ => Err(Divergence {
            round: usize::MAX,
            left_census: a.coloring().sizes().iter().map(|&s| s as u32).collect(),
            right_census: b.coloring().sizes().iter().map(|&s| s as u32).collect(),
        }),
    })
}

/// Keys of a point extension expressed in the source color space.
fn extension_keys_via(cc: &CoherentConfiguration, to_source: &[u32], y: &[usize]) -> Vec<u64> {
    let base: Vec<u32> = cc
        .coloring()
        .colors()
        .iter()
        .map(|&c| to_source[c as usize])
        .collect();
    cc::extension_keys(cc.n(), &base, y)
}

fn check_tuple(n: usize, y: &[usize]) -> Result<()> {
    match y.iter().find(|&&p| p >= n) {
        Some(&p) => Err(Error::PointOutOfRange { point: p, n }),
        None => Ok(()),
    }
}

/// The xx′-extension of w, if it exists.
pub fn extend_point(w: &AlgIsoWitness, x: &[usize], x2: &[usize]) -> Result<Option<AlgIsoWitness>> {
    if x.len() != x2.len() {
        return Err(Error::TupleLength(x.len(), x2.len()));
    }
    check_tuple(w.source.n(), x)?;
    check_tuple(w.target.n(), x2)?;
    let id: Vec<u32> = (0..w.source.rank() as u32).collect();
    let ka = extension_keys_via(&w.source, &id, x);
    let kb = extension_keys_via(&w.target, &w.inverse_map(), x2);
    let (na, nb, rank) = match lockstep(&ka, w.source.n(), &kb, w.target.n()) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    let ea = CoherentConfiguration::from_names(w.source.n(), na.clone(), 0);
    let eb = CoherentConfiguration::from_names(w.target.n(), nb.clone(), 0);
    let Some(mut ext) = witness_from_names(ea, eb, &na, &nb, rank) else {
        return Ok(None);
    };
    // classwise: each class of the extension maps into the w-image of the
    // class containing it
    let extends = (0..w.source.n() * w.source.n()).all(|i| {
        let ca = w.source.coloring().colors()[i];
        let e = ext.source.coloring().colors()[i];
        let img = ext.map[e as usize];
        // any pair of the image class lies in w(ca)
        let j = ext.target.coloring().colors().iter().position(|&c| c == img).unwrap();
        w.target.coloring().colors()[j] == w.map[ca as usize]
    });
    if !(extends && ext.tensors_match && ext.supports_match) {
        return Ok(None);
    }
    ext.points = Some((x.to_vec(), x2.to_vec()));
    Ok(Some(ext))
}

#[derive(Clone, Debug, Serialize)]
pub struct SesquiReport {
    pub s1: bool,
    /// (α, β, γ): β and γ lie in one αs but in different fibers of X_α.
    pub s1_witness: Option<(usize, usize, usize)>,
    pub s2: bool,
    /// (α, α′) in one fiber without an αα′-extension of the identity.
    pub s2_witness: Option<(usize, usize)>,
}

impl SesquiReport {
    pub fn sesquiclosed(&self) -> bool {
        self.s1 && self.s2
    }
}

pub fn sesquiclosed_check(cc: &CoherentConfiguration) -> Result<SesquiReport> {
    Ok(sesquiclosed_check_with(cc, &ExtensionCache::one_point(cc)?))
}

pub fn sesquiclosed_check_with(cc: &CoherentConfiguration, cache: &ExtensionCache) -> SesquiReport {
    let n = cc.n();
    let mut s1_witness = None;
    'outer: for a in 0..n {
        // first point seen for each αs class and each X_α fiber
        let mut by_class: Vec<Option<usize>> = vec![None; cc.rank()];
        for b in 0..n {
            let s = cc.color(a, b) as usize;
            match by_class[s] {
                None => by_class[s] = Some(b),
                Some(c) => {
                    if cache.name(a, b, b) != cache.name(a, c, c) {
                        s1_witness = Some((a, c, b));
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut s2_witness = None;
    for fiber in cc.fibers() {
        let a = fiber[0];
        if let Some(&b) = fiber.iter().find(|&&b| cache.class_of(b) != cache.class_of(a)) {
            s2_witness = Some((a, b));
            break;
        }
    }
    SesquiReport {
        s1: s1_witness.is_none(),
        s1_witness,
        s2: s2_witness.is_none(),
        s2_witness,
    }
}

/// True iff w has the αα′-extension for all α ∈ Δ, α′ ∈ Δ^w, over all
/// fibers Δ of the source.
pub fn sesquiclosed_algiso_check(w: &AlgIsoWitness) -> bool {
    let (a, b) = (&w.source, &w.target);
    let id: Vec<u32> = (0..a.rank() as u32).collect();
    let inv = w.inverse_map();
    let keys_a = |p: usize| extension_keys_via(a, &id, &[p]);
    let keys_b = |p: usize| extension_keys_via(b, &inv, &[p]);
    let fp = |keys: Vec<u64>, n: usize| cc::refine_from_keys(n, &keys, cc::encode_u64).history.fingerprint();
    let fa = stab::par_map(a.n(), |p| fp(keys_a(p), a.n()));
    let fb = stab::par_map(b.n(), |p| fp(keys_b(p), b.n()));
    for (k, fiber) in a.fibers().iter().enumerate() {
        let diag = a.color(fiber[0], fiber[0]);
        let image = w.map[diag as usize];
        let Some(target) = b.fibers().iter().find(|f| b.color(f[0], f[0]) == image) else {
            return false;
        };
        let _ = k;
        let rep = fiber[0];
        let ok_fp = fiber.iter().all(|&p| fa[p] == fa[rep]) && target.iter().all(|&p| fb[p] == fa[rep]);
        if !ok_fp {
            return false;
        }
        let kr = keys_a(rep);
        let exact = fiber[1..]
            .iter()
            .all(|&p| refine::synchronized(&kr, a.n(), &keys_a(p), a.n()))
            && target
                .iter()
                .all(|&p| refine::synchronized(&kr, a.n(), &keys_b(p), b.n()));
        if !exact {
            return false;
        }
    }
    true
}

/// Checks that two rainbows admit the standard similarity: equal size,
/// equal color sets, each color on the diagonal on both sides or on
/// neither, and transposition acting alike. Class sizes may differ.
pub fn standard_similarity(g: &PairColoring, h: &PairColoring) -> Result<()> {
    if g.n() != h.n() {
        return Err(Error::NoStandardSimilarity(format!("ground sets of size {} and {}", g.n(), h.n())));
    }
    if g.rank() != h.rank() {
        return Err(Error::NoStandardSimilarity(format!("{} colors versus {}", g.rank(), h.rank())));
    }
    if g.diagonal_flags() != h.diagonal_flags() {
        return Err(Error::NoStandardSimilarity("diagonal colors differ".into()));
    }
    let transpose = |p: &PairColoring| -> Option<Vec<u32>> {
        let n = p.n();
        let mut t = vec![u32::MAX; p.rank()];
        for a in 0..n {
            for b in 0..n {
                let (c, d) = (p.color(a, b) as usize, p.color(b, a));
                if t[c] == u32::MAX {
                    t[c] = d;
                } else if t[c] != d {
                    return None;
                }
            }
        }
        Some(t)
    };
    match (transpose(g), transpose(h)) {
        (Some(x), Some(y)) if x == y => Ok(()),
        (Some(_), Some(_)) => Err(Error::NoStandardSimilarity("transposition differs".into())),
        _ => Err(Error::NoStandardSimilarity("input is not a rainbow".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Equivalent,
    Distinguished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Lockstep refinement split at this round.
    Divergence(Divergence),
    /// Color map of the certifying algebraic isomorphism (source, target).
    ColorMap { map: Vec<[u32; 2]> },
    /// A later stage failed.
    Failure { stage: String, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub method: String,
    pub verdict: VerdictKind,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn equivalent(&self) -> bool {
        self.verdict == VerdictKind::Equivalent
    }

    fn new(method: &str, verdict: VerdictKind, certificate: Certificate) -> Self {
        Verdict {
            method: method.into(),
            verdict,
            certificate,
        }
    }
}

/// Classical WL: lockstep pair refinement from the raw colors.
pub fn wl_equivalent(g: &PairColoring, h: &PairColoring) -> Result<Verdict> {
    standard_similarity(g, h)?;
    let key = |p: &PairColoring| -> Vec<u32> { p.colors().to_vec() };
    Ok(match lockstep(&key(g), g.n(), &key(h), h.n()) {
        Ok(_) => Verdict::new("wl", VerdictKind::Equivalent, Certificate::ColorMap {
            map: (0..g.rank() as u32).map(|c| [c, c]).collect(),
        }),
        Err(d) => Verdict::new("wl", VerdictKind::Distinguished, Certificate::Divergence(d)),
    })
}

/// WL_m-equivalence: lockstep m-dimensional refinement seeded by the
/// standard similarity.
pub fn wlm_equivalent(g: &PairColoring, h: &PairColoring, m: usize) -> Result<Verdict> {
    standard_similarity(g, h)?;
    let method = format!("wl{m}");
    let run = wlm::wlm_joint(&[g, h], m, true)?;
    Ok(match run.divergence {
        None => Verdict::new(&method, VerdictKind::Equivalent, Certificate::ColorMap {
            map: (0..g.rank() as u32).map(|c| [c, c]).collect(),
        }),
        Some((round, left, right)) => Verdict::new(
            &method,
            VerdictKind::Distinguished,
            Certificate::Divergence(Divergence {
                round,
                left_census: left,
                right_census: right,
            }),
        ),
    })
}

/// Does the witness send every class inside g-color c into h-color c?
fn extends_similarity(w: &AlgIsoWitness, g: &PairColoring, h: &PairColoring) -> bool {
    let n = g.n();
    let mut target_base = vec![u32::MAX; w.target.rank()];
    for i in 0..n * n {
        target_base[w.target.coloring().colors()[i] as usize] = h.colors()[i];
    }
    (0..n * n).all(|i| target_base[w.map[w.source.coloring().colors()[i] as usize] as usize] == g.colors()[i])
}

/// Equivalence through stabilized configurations: `stabilize` maps a
/// rainbow to its configuration, the two are matched by canonical names,
/// the match must extend the standard similarity and, when `sesquiclosed`,
/// be sesquiclosed.
fn stabilized_equivalent(
    method: &str,
    g: &PairColoring,
    h: &PairColoring,
    stabilize: impl Fn(&PairColoring) -> Result<CoherentConfiguration>,
    sesquiclosed: bool,
) -> Result<Verdict> {
    standard_similarity(g, h)?;
    let (x, y) = (stabilize(g)?, stabilize(h)?);
    let w = match find_alg_iso_detailed(&x, &y, &[])? {
        Ok(w) => w,
        Err(d) => return Ok(Verdict::new(method, VerdictKind::Distinguished, Certificate::Divergence(d))),
    };
    if !extends_similarity(&w, g, h) {
        return Ok(Verdict::new(method, VerdictKind::Distinguished, Certificate::Failure {
            stage: "similarity".into(),
            detail: "the algebraic isomorphism does not extend the standard similarity".into(),
        }));
    }
    if sesquiclosed && !sesquiclosed_algiso_check(&w) {
        return Ok(Verdict::new(method, VerdictKind::Distinguished, Certificate::Failure {
            stage: "sesquiclosed".into(),
            detail: "some αα′-extension does not exist".into(),
        }));
    }
    Ok(Verdict::new(method, VerdictKind::Equivalent, Certificate::ColorMap { map: w.pairs() }))
}

/// WLD-equivalence: a sesquiclosed algebraic isomorphism between the
/// sesquiclosures extending the standard similarity.
pub fn wld_equivalent(g: &PairColoring, h: &PairColoring) -> Result<Verdict> {
    stabilized_equivalent("wld", g, h, stab::sesquiclosure, true)
}

/// Equivalence through W = deep_stab(·, {1,2,3,4}): an algebraic
/// isomorphism of the stabilized configurations matched by canonical names
/// and extending the standard similarity.
pub fn deepstab_equivalent(g: &PairColoring, h: &PairColoring) -> Result<Verdict> {
    stabilized_equivalent("deepstab", g, h, |p| stab::deep_stab(p, &[1, 2, 3, 4]), false)
}
