use proptest::prelude::*;
use rand::RngExt;

use eppa_core::covers::{build_cover, CoverDescriptor};
use eppa_core::eppa::{eppa_extend, verify_extension, ExtensionOptions};
use eppa_core::fiber::{fiber_product, intersection, is_l_root_closed, is_malnormal};
use eppa_core::gen;
use eppa_core::homology::h1_basis;
use eppa_core::hypertournament::{family_graph, Hypertournament, PartialMap};
use eppa_core::linalg::FpMatrix;
use eppa_core::oracle::{brute_force_hypertournament, brute_force_rank};
use eppa_core::perm::{Perm, PermGroup, StabilizerChain};
use eppa_core::separability::{separate_from_cyclic, verify_witness, SearchBudget};
use eppa_core::{maximal_root, subgroup_graph, SubgroupGraph, Word};

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let n = n as i32;
    prop::collection::vec(
        (1..=n, any::<bool>()).prop_map(|(g, neg)| if neg { -g } else { g }),
        0..=max_len,
    )
    .prop_map(move |xs| Word::from_signed(n as usize, &xs).unwrap())
}

fn nontrivial_word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(n, max_len).prop_filter("nontrivial", |w| !w.is_identity())
}

fn perm(degree: usize) -> impl Strategy<Value = Perm> {
    Just((0..degree).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

/// A structure on at most five points, from a tournament-like start with a few tuples toggled.
fn small_structure(seed: u64) -> Hypertournament {
    let mut r = gen::rng(seed);
    let size = r.random_range(1..=5u32);
    let mut m = Hypertournament::new([], 0..size);
    for l in [2usize, 3] {
        if r.random_bool(0.6) {
            m.ls.insert(l);
            if let Some(rel) = gen::random_hypertournament(&mut r, size, l)
                .relations
                .get(&l)
            {
                m.relations.insert(l, rel.clone());
            }
        }
    }
    for _ in 0..r.random_range(0..=2usize) {
        let Some(&l) = m.ls.iter().nth(r.random_range(0..m.ls.len().max(1))) else {
            break;
        };
        if (size as usize) < l {
            break;
        }
        let t: Vec<u32> = (0..l).map(|_| r.random_range(0..size)).collect();
        let rel = m.relations.entry(l).or_default();
        if !rel.remove(&t) {
            rel.insert(t);
        }
    }
    m
}

#[test]
fn structure_generator_reaches_both_verdicts() {
    let valid = (0..200).filter(|&s| small_structure(s).is_valid()).count();
    assert!(valid > 20 && valid < 180, "{valid} of 200 valid");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_form_a_group(u in word(2, 8), v in word(2, 8), x in word(2, 8)) {
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(u.mul(&v).mul(&x), u.mul(&v.mul(&x)));
        prop_assert_eq!(Word::parse(2, &u.to_string()).unwrap(), u.clone());
        prop_assert_eq!(u.mul(&v).inverse(), v.inverse().mul(&u.inverse()));
    }

    #[test]
    fn maximal_roots_are_not_powers(w in nontrivial_word(2, 10)) {
        let r = maximal_root(&w).unwrap();
        prop_assert_eq!(r.root.pow(r.exponent as i64), w);
        prop_assert_eq!(maximal_root(&r.root).unwrap().exponent, 1);
    }

    #[test]
    fn generators_and_products_are_members(gens in prop::collection::vec(nontrivial_word(2, 5), 1..=3), picks in prop::collection::vec((0usize..3, any::<bool>()), 0..6)) {
        let h = subgroup_graph(2, &gens);
        prop_assert!(gens.iter().all(|g| h.contains(g)));
        let product = picks.iter().fold(Word::identity(2), |acc, &(i, inv)| {
            let g = &gens[i % gens.len()];
            acc.mul(&if inv { g.inverse() } else { g.clone() })
        });
        prop_assert!(h.contains(&product));
        let basis = h.basis();
        prop_assert_eq!(basis.len(), h.rank());
        let again = subgroup_graph(2, &basis);
        prop_assert_eq!(again.graph.canonical_code().unwrap(), h.graph.canonical_code().unwrap());
        prop_assert!(h.graph.is_core().is_ok() && h.graph.is_immersed());
    }

    #[test]
    fn covers_have_schreier_rank(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let n = r.random_range(1..=3usize);
        let k = r.random_range(1..=8usize);
        let g = gen::random_cover_of_wedge(&mut r, n, k);
        let h = SubgroupGraph::from_graph(&g).unwrap();
        prop_assert_eq!(h.rank(), 1 + k * (n - 1));
        prop_assert_eq!(h.index(), Some(k));
    }

    #[test]
    fn fiber_products_multiply_sizes(a in prop::collection::vec(nontrivial_word(2, 4), 1..=2), b in prop::collection::vec(nontrivial_word(2, 4), 1..=2), probe in word(2, 8)) {
        let (h, k) = (subgroup_graph(2, &a), subgroup_graph(2, &b));
        let fp = fiber_product(&h.graph, &k.graph).unwrap();
        prop_assert_eq!(fp.graph.num_vertices(), h.graph.num_vertices() * k.graph.num_vertices());
        for l in 0..2 {
            prop_assert_eq!(fp.graph.edges_with_label(l), h.graph.edges_with_label(l) * k.graph.edges_with_label(l));
        }
        let meet = intersection(&h, &k).unwrap();
        prop_assert_eq!(meet.contains(&probe), h.contains(&probe) && k.contains(&probe));
        prop_assert!(meet.basis().iter().all(|x| h.contains(x) && k.contains(x)));
    }

    #[test]
    fn non_malnormal_verdicts_carry_certificates(gens in prop::collection::vec(nontrivial_word(2, 4), 1..=2)) {
        let h = subgroup_graph(2, &gens);
        let rep = is_malnormal(&h).unwrap();
        prop_assert_eq!(rep.malnormal, rep.stats.components.iter().all(|c| c.diagonal || c.is_tree));
        if let Some(c) = rep.certificate {
            prop_assert!(!c.element.is_identity());
            prop_assert!(h.contains(&c.element) && h.contains(&c.conjugate) && !h.contains(&c.conjugator));
            prop_assert_eq!(c.element.conjugate_by(&c.conjugator.inverse()), c.conjugate);
        }
    }

    #[test]
    fn root_witnesses_are_roots(gens in prop::collection::vec(nontrivial_word(2, 4), 1..=2), l in 2usize..=5) {
        let h = subgroup_graph(2, &gens);
        let rc = is_l_root_closed(&h, l).unwrap();
        prop_assert_eq!(rc.closed, rc.witness.is_none());
        if let Some(w) = rc.witness {
            prop_assert!(!h.contains(&w) && h.contains(&w.pow(l as i64)));
        }
    }

    #[test]
    fn h1_dimension_is_graph_rank(gens in prop::collection::vec(nontrivial_word(2, 5), 1..=3), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let g = subgroup_graph(2, &gens).graph;
        prop_assert_eq!(h1_basis(&g, p).unwrap().dim(), g.rank());
    }

    #[test]
    fn matrix_rank_matches_kernel_count(p in prop::sample::select(vec![2u64, 3, 5]), rows in prop::collection::vec(prop::collection::vec(0i64..5, 3), 1..=4)) {
        let m = FpMatrix::from_rows(p, &rows).unwrap();
        let reduced: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64 % p).collect()).collect();
        prop_assert_eq!(m.rank(), brute_force_rank(p, &reduced, 3));
    }

    #[test]
    fn cyclic_covers_have_predicted_components(gens in prop::collection::vec(nontrivial_word(2, 4), 1..=2), p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>()) {
        let g = subgroup_graph(2, &gens).graph;
        let mut r = gen::rng(seed);
        let c: Vec<u64> = (0..g.num_edges()).map(|_| r.random_range(0..p)).collect();
        let d = CoverDescriptor::new(g.clone(), p, c).unwrap();
        let cover = build_cover(&d);
        prop_assert_eq!(cover.total.num_vertices(), p as usize * g.num_vertices());
        prop_assert_eq!(cover.total.components().1, d.predicted_components());
        cover.projection.check(&cover.total, &g).unwrap();
        cover.deck.check(&cover.total, &cover.total).unwrap();
    }

    #[test]
    fn stabilizer_chain_order_matches_enumeration(gens in (1usize..=6).prop_flat_map(|d| prop::collection::vec(perm(d), 0..=3).prop_map(move |g| (d, g)))) {
        let (degree, gens) = gens;
        let slow = PermGroup::generate(degree, &gens, 1000).unwrap();
        let chain = StabilizerChain::new(degree, &gens).unwrap();
        prop_assert_eq!(chain.order(), slow.order() as u128);
        prop_assert!(slow.elements().iter().all(|g| chain.contains(g)));
    }

    #[test]
    fn validate_matches_the_definition(seed in any::<u64>()) {
        let m = small_structure(seed);
        prop_assert_eq!(m.is_valid(), brute_force_hypertournament(&m));
        let back: Hypertournament = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn stabilizers_are_root_closed(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let l = if r.random_bool(0.5) { 2 } else { 3 };
        let size = r.random_range(l as u32..=5);
        let m = gen::random_hypertournament(&mut r, size, l);
        let maps: Vec<PartialMap> = (0..r.random_range(1..=2usize)).map(|_| gen::random_partial_iso(&mut r, &m, 3)).collect();
        let g = family_graph(&m, &maps).unwrap();
        for v in 0..g.num_vertices() {
            let (comp, map) = g.component_of(v);
            let basis = comp.cycle_basis(map[v].unwrap()).unwrap();
            if !basis.is_empty() {
                prop_assert!(is_l_root_closed(&subgroup_graph(g.alphabet(), &basis), l).unwrap().closed);
            }
        }
    }

    #[test]
    fn separation_witnesses_verify(c in nontrivial_word(2, 3), g in word(2, 4), l in prop::sample::select(vec![2u64, 3])) {
        let h = subgroup_graph(2, std::slice::from_ref(&c));
        prop_assume!(!h.contains(&g) && is_l_root_closed(&h, l as usize).unwrap().closed);
        let w = separate_from_cyclic(&c, &g, &[l], SearchBudget::default()).unwrap();
        prop_assert!(verify_witness(&w));
        prop_assert!(!(w.order as u64).is_multiple_of(l));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extensions_verify_and_avoid_order_l(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let (m, l) = if r.random_bool(0.25) {
            (gen::random_hypertournament(&mut r, 4, 3), 3u128)
        } else {
            let size = r.random_range(2..=5);
            (gen::random_tournament(&mut r, size), 2)
        };
        let Some(phi) = gen::random_disjoint_partial_iso(&mut r, &m, 2) else { return Ok(()) };
        let maps = [phi];
        let res = eppa_extend(&m, &maps, &ExtensionOptions::default()).unwrap();
        prop_assert!(verify_extension(&res, &m, &maps).is_ok());
        let order = StabilizerChain::new(res.extended.universe.len(), &res.generator_actions).unwrap().order();
        prop_assert!(!order.is_multiple_of(l));
        prop_assert!(res.embedding.values().all(|y| res.extended.universe.contains(y)));
        for rel in m.relations.values() {
            for t in rel {
                let image: Vec<u32> = t.iter().map(|x| res.embedding[x]).collect();
                prop_assert!(res.extended.holds(&image));
            }
        }
    }
}
