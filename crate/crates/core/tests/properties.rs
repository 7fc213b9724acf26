use ccstab::algiso::{canonical_form, wl_equivalent, wld_equivalent, wlm_equivalent};
use ccstab::caps::Caps;
use ccstab::cc::{self, validate_cc, CoherentConfiguration};
use ccstab::coloring::{validate_rainbow, PairColoring};
use ccstab::corpus;
use ccstab::graph::{self, Graph};
use ccstab::oracles::{self, PebbleGame};
use ccstab::stab::{self, deep_stab, sesquiclosure, sigma};
use ccstab::wlm::{self, MaryColoring};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn relabeled(g: &Graph, seed: u64) -> Graph {
    corpus::relabel(g, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn closure(g: &Graph) -> CoherentConfiguration {
    cc::wl_closure(&g.rainbow(), &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_coherent_and_refines_input(g in arb_graph(9)) {
        let c = closure(&g);
        prop_assert!(validate_cc(c.coloring()).valid());
        prop_assert!(validate_rainbow(c.coloring()).valid());
        prop_assert!(c.coloring().refines(&g.rainbow()));
    }

    #[test]
    fn canonical_form_ignores_labels(g in arb_graph(9), seed in any::<u64>()) {
        let h = relabeled(&g, seed);
        let (a, b) = (canonical_form(&closure(&g)).unwrap(), canonical_form(&closure(&h)).unwrap());
        prop_assert_eq!(a.invariant(), b.invariant());
        prop_assert!(wl_equivalent(&g.rainbow(), &h.rainbow()).unwrap().equivalent());
    }

    #[test]
    fn wl3_histogram_ignores_labels(g in arb_graph(7), seed in any::<u64>()) {
        let h = relabeled(&g, seed);
        let (a, b) = (wlm::wlm_closure(&g.rainbow(), 3).unwrap(), wlm::wlm_closure(&h.rainbow(), 3).unwrap());
        prop_assert_eq!(a.sizes(), b.sizes());
        prop_assert!(wlm_equivalent(&g.rainbow(), &h.rainbow(), 3).unwrap().equivalent());
    }

    #[test]
    fn projection_is_coherent_and_stable(g in arb_graph(7)) {
        let f = wlm::wlm_closure(&g.rainbow(), 3).unwrap();
        let p = wlm::pr2(&f).unwrap();
        prop_assert!(validate_cc(p.coloring()).valid());
        let again = wlm::pr2(&wlm::wlm_closure(p.coloring(), 2).unwrap()).unwrap();
        prop_assert!(again.same_partition(&p));
        prop_assert!(wlm::validate_mary(&f).valid());
    }

    #[test]
    fn two_closure_dominates_sesquiclosure(g in arb_graph(6)) {
        let c = closure(&g);
        let bar = cc::two_closure(&c).unwrap();
        let wld = sesquiclosure(c.coloring()).unwrap();
        prop_assert!(bar.refines(&wld));
    }

    #[test]
    fn stabilization_order_does_not_matter(g in arb_graph(7), seed in any::<u64>()) {
        let target = deep_stab(&g.rainbow(), &[1, 2, 3, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = closure(&g);
        loop {
            let mut order = [1usize, 2, 3, 4];
            for i in (1..4).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let mut grew = false;
            for i in order {
                let next = sigma(&x, i).unwrap();
                if next.rank() > x.rank() {
                    x = next;
                    grew = true;
                    break;
                }
            }
            if !grew {
                break;
            }
        }
        prop_assert!(x.same_partition(&target));
    }

    #[test]
    fn verdicts_on_relabelings(g in arb_graph(7), seed in any::<u64>()) {
        let h = relabeled(&g, seed);
        prop_assert!(wld_equivalent(&g.rainbow(), &h.rainbow()).unwrap().equivalent());
    }

    #[test]
    fn game_is_symmetric(g in arb_graph(4), h in arb_graph(4), x in proptest::collection::vec(0usize..4, 1..=2), y in proptest::collection::vec(0usize..4, 2)) {
        prop_assume!(g.n() == h.n());
        let (a, b) = (g.rainbow(), h.rainbow());
        prop_assume!(ccstab::algiso::standard_similarity(&a, &b).is_ok());
        let x: Vec<usize> = x.into_iter().map(|p| p % g.n()).collect();
        let y: Vec<usize> = y[..x.len()].iter().map(|p| p % g.n()).collect();
        let forward = oracles::pebble_game(&a, &b, 2, &x, &y).unwrap();
        let backward = oracles::pebble_game(&b, &a, 2, &y, &x).unwrap();
        prop_assert_eq!(forward, backward);
    }

    #[test]
    fn memo_matches_plain_recursion(g in arb_graph(3), h in arb_graph(3), rounds in 0usize..3, a in 0usize..3, b in 0usize..3) {
        prop_assume!(g.n() == h.n());
        let (x, y) = (g.rainbow(), h.rainbow());
        prop_assume!(ccstab::algiso::standard_similarity(&x, &y).is_ok());
        let (a, b) = (a % g.n(), b % g.n());
        let memo = PebbleGame::solve_rounds(&x, &y, rounds).unwrap().winner(&[a], &[b]).unwrap();
        let plain = oracles::survives_without_memo(&x, &y, &[(a, b)], rounds);
        prop_assert_eq!(memo == oracles::Winner::Duplicator, plain);
    }

    #[test]
    fn text_formats_round_trip(g in arb_graph(8)) {
        prop_assert_eq!(Graph::parse(&g.to_text()).unwrap(), g.clone());
        let c = closure(&g);
        prop_assert_eq!(PairColoring::parse(&c.coloring().to_text()).unwrap(), c.coloring().clone());
        let f = wlm::wlm_closure(&g.rainbow(), 3).unwrap();
        prop_assert_eq!(MaryColoring::parse(&f.to_text()).unwrap(), f);
    }
}

#[test]
fn orbits_refine_closure_and_preserve_sigmas() {
    for e in corpus::enumerated(6).unwrap().iter().chain(&corpus::named_graphs()) {
        if e.graph.n() > 10 {
            continue;
        }
        let x = e.graph.rainbow();
        let o = oracles::brute_orbits(&x, 2).unwrap();
        let c = cc::wl_closure(&x, &[]).unwrap();
        assert!(o.pairs.refines(&c), "{}", e.name);
        for g in &o.generators {
            assert!(oracles::preserves(c.coloring(), g), "{}", e.name);
        }
    }
}

#[test]
fn orbit_counts_match_group_order() {
    // |Aut| of the cycle C_n is 2n and of the Petersen graph 120
    for n in 3..=8 {
        let o = oracles::brute_orbits(&graph::cycle(n).rainbow(), 1).unwrap();
        assert_eq!(o.group_order, 2 * n as u128);
    }
    // triple orbits project onto pair orbits
    let t = oracles::brute_orbits(&graph::petersen().rainbow(), 3).unwrap();
    let triples = t.triples.as_ref().unwrap();
    let n = t.n;
    let mut image = std::collections::HashMap::new();
    for (i, &lab) in triples.iter().enumerate() {
        let (a, b) = (i / (n * n), (i / n) % n);
        let pair = t.pairs.color(a, b);
        assert_eq!(*image.entry(lab).or_insert(pair), pair);
    }
}

#[test]
fn cap_override_parsing() {
    let c = Caps::parse_override("pair=1024, game=6").unwrap();
    assert_eq!((c.pair, c.game, c.ternary), (1024, 6, Caps::default().ternary));
    assert!(Caps::parse_override("pair").is_err());
    assert!(Caps::parse_override("bogus=3").is_err());
    assert!(Caps::parse_override("pair=x").is_err());
}

#[test]
fn game_cap_is_enforced() {
    let g = graph::cycle(6).rainbow();
    assert!(oracles::pebble_game(&g, &g, 2, &[0], &[0]).is_err());
}

#[test]
fn sigma_ranks_on_named_graphs() {
    for e in corpus::named_graphs() {
        let c = closure(&e.graph);
        for i in 1..=4 {
            let s = stab::sigma(&c, i).unwrap();
            assert!(s.refines(&c), "{} sigma {i}", e.name);
        }
    }
}
