//! Acceptance suite: one PASS/FAIL line per criterion. Exact criteria are
//! compared exactly; runtime budgets are pinned below.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ccstab::algiso::{self, sesquiclosed_check};
use ccstab::cc::{self, CoherentConfiguration};
use ccstab::corpus::{self, CorpusEntry, PropertyOutcome};
use ccstab::graph;
use ccstab::planes::{self, compare_profiles, one_point_blocks, one_point_profile, plane_scheme, PlaneScheme};

const PLANE_CLOSURE_BUDGET: Duration = Duration::from_secs(1);
const TWO_EXTENSION_Q3_BUDGET: Duration = Duration::from_secs(30);
const TWO_EXTENSION_Q4_BUDGET: Duration = Duration::from_secs(600);
const ONE_POINT_BUDGET: Duration = Duration::from_secs(10);
const SAMPLED_SUITE_BUDGET: Duration = Duration::from_secs(60);
const GAME_BUDGET: Duration = Duration::from_secs(300);
const ORDER_NINE_BUDGET: Duration = Duration::from_secs(1800);

const TWO_EXTENSION_RANK: usize = 208;
const PARABOLIC_CLASSES: usize = 14;
const PARABOLIC_ROWS: [usize; 4] = [1, 9, 2, 2];
const ONE_POINT_RANK: usize = 24;
const BLOCK_TABLE: [[usize; 4]; 4] = [[1, 1, 1, 1], [1, 3, 2, 2], [1, 2, 2, 1], [1, 2, 1, 2]];
const GAME_SAMPLES: usize = 200;

type Verdict = Result<String, String>;

fn scheme(q: usize) -> PlaneScheme {
    plane_scheme(&planes::pg2(q).expect("plane"))
}

fn summarize(outcomes: &[PropertyOutcome]) -> Verdict {
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| format!("{}: {} of {} failed, e.g. {:?}", o.property, o.failures, o.checked, o.examples))
        .collect();
    let checked: usize = outcomes.iter().map(|o| o.checked).sum();
    if failed.is_empty() {
        Ok(format!("{checked} checks"))
    } else {
        Err(failed.join("; "))
    }
}

fn plane_closures() -> Verdict {
    let mut notes = Vec::new();
    for q in 2..=5 {
        let t = Instant::now();
        let p = planes::pg2(q).map_err(|e| e.to_string())?;
        let ps = plane_scheme(&p);
        let c = cc::wl_closure(&planes::incidence_graph(&p).rainbow(), &[]).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        if c.rank() != 4 {
            return Err(format!("q={q}: rank {}", c.rank()));
        }
        // valencies listed by s-index: diagonal, same type, incident, opposite
        let n = ps.n();
        let mut by_s = [usize::MAX; 4];
        for a in 0..n {
            for b in 0..n {
                let class = c.color(a, b) as usize;
                let s = ps.s(a, b) as usize;
                match by_s[s] {
                    usize::MAX => by_s[s] = class,
                    k if k != class => return Err(format!("q={q}: relation s{s} is not a class")),
                    _ => {}
                }
            }
        }
        let val: Vec<usize> = by_s.iter().map(|&k| c.classes()[k].left_valency).collect();
        let want = vec![1, q * q + q, q + 1, q * q];
        if val != want {
            return Err(format!("q={q}: valencies {val:?}, expected {want:?}"));
        }
        if elapsed > PLANE_CLOSURE_BUDGET {
            return Err(format!("q={q}: {elapsed:?} over budget"));
        }
        notes.push(format!("q={q} {val:?} {elapsed:.2?}"));
    }
    Ok(notes.join(", "))
}

fn two_extensions(hats: &mut HashMap<usize, CoherentConfiguration>) -> Verdict {
    let mut notes = Vec::new();
    for (q, budget) in [(3, TWO_EXTENSION_Q3_BUDGET), (4, TWO_EXTENSION_Q4_BUDGET)] {
        let t = Instant::now();
        let hat = cc::two_extension(&scheme(q).scheme).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        let rank = hat.rank();
        hats.insert(q, hat);
        if rank != TWO_EXTENSION_RANK {
            return Err(format!("q={q}: rank {rank}"));
        }
        if elapsed > budget {
            return Err(format!("q={q}: {elapsed:?} over budget {budget:?}"));
        }
        notes.push(format!("q={q} rank {rank} {elapsed:.1?}"));
    }
    Ok(notes.join(", "))
}

fn parabolic(hats: &HashMap<usize, CoherentConfiguration>) -> Verdict {
    let mut notes = Vec::new();
    let mut bad = Vec::new();
    for q in [3, 4] {
        let hat = match hats.get(&q) {
            Some(h) => h.clone(),
            None => cc::two_extension(&scheme(q).scheme).map_err(|e| e.to_string())?,
        };
        let r = cc::parabolic_report(&hat).map_err(|e| e.to_string())?;
        let line = format!("q={q}: {} classes in e, rows {:?}", r.classes_in_e, r.rows);
        if r.classes_in_e != PARABOLIC_CLASSES || r.rows != PARABOLIC_ROWS {
            bad.push(format!("{line}, expected {PARABOLIC_CLASSES} classes, rows {PARABOLIC_ROWS:?}"));
        } else {
            notes.push(line);
        }
    }
    if bad.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(bad.join("; "))
    }
}

fn one_point() -> Verdict {
    let t = Instant::now();
    let mut profiles = Vec::new();
    for q in [3, 4, 5] {
        let ps = scheme(q);
        let xa = cc::point_extension(&ps.scheme, &[0]).map_err(|e| e.to_string())?;
        if xa.rank() != ONE_POINT_RANK {
            return Err(format!("q={q}: rank {}", xa.rank()));
        }
        let (sizes, table) = one_point_blocks(&ps, &xa, 0).ok_or(format!("q={q}: fibers are not the αs_i"))?;
        let want = [1, q * q + q, q + 1, q * q];
        if sizes != want {
            return Err(format!("q={q}: fiber sizes {sizes:?}, expected {want:?}"));
        }
        if table != BLOCK_TABLE {
            return Err(format!("q={q}: block table {table:?}"));
        }
        profiles.push(one_point_profile(&ps, 0).map_err(|e| e.to_string())?);
    }
    let cmp34 = compare_profiles(&profiles[..2]);
    if !(cmp34.correspondence && cmp34.same_support) {
        return Err(format!("q=3 vs q=4 tensors: {cmp34:?}"));
    }
    let cmp = compare_profiles(&profiles);
    let elapsed = t.elapsed();
    if elapsed > ONE_POINT_BUDGET {
        return Err(format!("{elapsed:?} over budget"));
    }
    Ok(format!(
        "rank 24 for q=3,4,5, tensor correspondence q=3..5: {}, {elapsed:.2?}",
        cmp.correspondence && cmp.same_support
    ))
}

fn small_corpus() -> Vec<CorpusEntry> {
    corpus::enumerated(7).expect("corpus")
}

fn full_corpus() -> Vec<CorpusEntry> {
    let mut c = small_corpus();
    c.extend(corpus::named_graphs());
    c
}

fn wld_identities(all: &[CorpusEntry]) -> Verdict {
    let sampled = corpus::random_graphs(200, 7, 11);
    let t = Instant::now();
    let quick = corpus::check_wld_identities(&sampled);
    let elapsed = t.elapsed();
    summarize(&quick).map_err(|e| format!("sampled: {e}"))?;
    if elapsed > SAMPLED_SUITE_BUDGET {
        return Err(format!("sampled run {elapsed:?} over budget"));
    }
    let full = summarize(&corpus::check_wld_identities(all))?;
    Ok(format!("{} graphs, {full}; sampled 200 in {elapsed:.1?}", all.len()))
}

fn sandwich(small: &[CorpusEntry]) -> Verdict {
    Ok(format!("{} graphs, {}", small.len(), summarize(&corpus::check_sandwich(small))?))
}

fn agreement(all: &[CorpusEntry]) -> Verdict {
    let outcomes = corpus::check_agreement(all, 5).map_err(|e| e.to_string())?;
    let detail = summarize(&outcomes)?;
    let (s, r) = (graph::shrikhande().rainbow(), graph::rook(4).rainbow());
    let wl3 = algiso::wlm_equivalent(&s, &r, 3).map_err(|e| e.to_string())?;
    let wld = algiso::wld_equivalent(&s, &r).map_err(|e| e.to_string())?;
    if wl3.equivalent() || wld.equivalent() {
        return Err("Shrikhande vs rook not distinguished by both".into());
    }
    Ok(format!("{detail}; Shrikhande vs rook distinguished by both"))
}

fn sesquiclosed() -> Verdict {
    for q in [2, 3, 4] {
        let r = sesquiclosed_check(&scheme(q).scheme).map_err(|e| e.to_string())?;
        if !r.sesquiclosed() {
            return Err(format!("plane scheme q={q}: {r:?}"));
        }
    }
    let shr = cc::wl_closure(&graph::shrikhande().rainbow(), &[]).map_err(|e| e.to_string())?;
    let r = sesquiclosed_check(&shr).map_err(|e| e.to_string())?;
    if !(r.s2 && !r.s1 && r.s1_witness.is_some()) {
        return Err(format!("Shrikhande: {r:?}"));
    }
    let union = graph::shrikhande().disjoint_union(&graph::rook(4));
    let u = cc::wl_closure(&union.rainbow(), &[]).map_err(|e| e.to_string())?;
    let r2 = sesquiclosed_check(&u).map_err(|e| e.to_string())?;
    if r2.s2 || r2.s2_witness.is_none() {
        return Err(format!("Shrikhande+rook: {r2:?}"));
    }
    Ok(format!(
        "planes q=2..4 pass; Shrikhande S1 witness {:?}; union S2 witness {:?}",
        r.s1_witness.unwrap(),
        r2.s2_witness.unwrap()
    ))
}

fn game() -> Verdict {
    let t = Instant::now();
    let outcomes = corpus::check_game_identity(4, GAME_SAMPLES, 9).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let detail = summarize(&outcomes)?;
    if elapsed > GAME_BUDGET {
        return Err(format!("{elapsed:?} over budget"));
    }
    Ok(format!("{detail} (n ≤ 4 exhaustive, {GAME_SAMPLES} sampled n = 5), {elapsed:.1?}"))
}

fn closure_laws(all: &[CorpusEntry]) -> Verdict {
    summarize(&corpus::check_closure_laws(all))
}

/// None when the order-9 data is absent.
fn order_nine() -> Option<Verdict> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/planes/hall9.plane");
    if !path.exists() {
        return None;
    }
    Some((|| {
        let t = Instant::now();
        let hall = planes::load_plane(&path).map_err(|e| e.to_string())?;
        let pg = planes::pg2(9).map_err(|e| e.to_string())?;
        let g = planes::incidence_graph(&pg).rainbow();
        let h = planes::incidence_graph(&hall).rainbow();
        let v = algiso::wld_equivalent(&g, &h).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        if !v.equivalent() {
            return Err(format!("verdict {:?}", v.certificate));
        }
        if elapsed > ORDER_NINE_BUDGET {
            return Err(format!("{elapsed:?} over budget"));
        }
        println!("  note: PG(2,9) and the Hall plane are WLD-equivalent, hence WL3-equivalent by the agreement of criterion 7 (WL3 not run)");
        Ok(format!("WLD-equivalent in {elapsed:.1?}"))
    })())
}

fn main() -> ExitCode {
    // the libtest protocol probes with --list; there are no named tests
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    ccstab::caps::set_threads(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut failed = 0;
    let mut report = |k: usize, title: &str, v: Verdict| {
        match &v {
            Ok(d) => println!("criterion {k:>2} PASS {title}: {d}"),
            Err(e) => {
                failed += 1;
                println!("criterion {k:>2} FAIL {title}: {e}");
            }
        }
    };
    let mut hats = HashMap::new();
    report(1, "plane scheme ranks and valencies", plane_closures());
    report(2, "two-extension rank", two_extensions(&mut hats));
    report(3, "parabolic class counts", parabolic(&hats));
    drop(hats);
    report(4, "one-point extension", one_point());
    let all = full_corpus();
    let small = small_corpus();
    report(5, "pr2 WL3 = WLD and WL3 = WL3 o WLD", wld_identities(&all));
    report(6, "sandwich pr2 WL3 <= W <= pr2 WL4", sandwich(&small));
    report(7, "WL3 and WLD verdicts agree", agreement(&all));
    report(8, "sesquiclosed checks", sesquiclosed());
    report(9, "pebble game vs WL2 colors", game());
    report(10, "closure-operator laws", closure_laws(&all));
    match order_nine() {
        Some(v) => report(11, "order-9 planes WLD-equivalent", v),
        None => println!("criterion 11 SKIP order-9 planes: data/planes/hall9.plane not present"),
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
