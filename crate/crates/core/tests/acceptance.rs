//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use eppa_core::covers::{build_cover, pullback, CoverDescriptor};
use eppa_core::eppa::{eppa_extend, verify_extension, ExtensionOptions};
use eppa_core::fiber::{fiber_product, intersection, is_l_root_closed, is_malnormal};
use eppa_core::gen;
use eppa_core::homology::{gersten_check, h1_basis, GerstenInput};
use eppa_core::hypertournament::{Hypertournament, PartialMap};
use eppa_core::oracle::{
    malnormal_counterexample, root_counterexample, small_generating_sets, NielsenOracle,
};
use eppa_core::separability::{separate_from_cyclic, verify_witness, SearchBudget, SepError};
use eppa_core::word::words_up_to;
use eppa_core::{subgroup_graph, SubgroupGraph, Word};
use rand::RngExt;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn w(s: &str) -> Word {
    Word::parse(2, s).unwrap()
}

fn counterexample_counts() -> Verdict {
    let h = subgroup_graph(2, &[w("abABa"), w("b")]);
    let g = &h.graph;
    let fp = fiber_product(g, g).unwrap();
    let s = fp.stats();
    let trees = s
        .components
        .iter()
        .filter(|c| !c.diagonal)
        .all(|c| c.is_tree);
    let mal = is_malnormal(&h).unwrap().malnormal;
    let got = (
        g.num_vertices(),
        g.edges_with_label(0),
        g.edges_with_label(1),
        s.vertices,
        s.edge_counts.clone(),
        s.nondiagonal_edge_counts.clone(),
    );
    let want = (5, 3, 3, 25, vec![9, 9], vec![6, 6]);
    verdict(
        got == want && trees && mal,
        format!("counts {got:?}, non-diagonal trees {trees}, malnormal {mal}"),
    )
}

fn nielsen_schreier() -> Verdict {
    let mut r = gen::rng(2);
    let mut bad = Vec::new();
    for i in 0..50 {
        let n = r.random_range(1..=3usize);
        let k = r.random_range(1..=8usize);
        let g = gen::random_cover_of_wedge(&mut r, n, k);
        let h = SubgroupGraph::from_graph(&g).unwrap();
        if h.rank() != 1 + k * (n - 1) || h.basis().len() != h.rank() || h.index() != Some(k) {
            bad.push(i);
        }
    }
    verdict(bad.is_empty(), format!("50 covers, failures {bad:?}"))
}

fn oracle_equivalence() -> Verdict {
    // distinct subgroups, keyed by their based graph
    let mut seen = BTreeSet::new();
    let mut subgroups = Vec::new();
    for gens in small_generating_sets(2, 3, 2) {
        let h = subgroup_graph(2, &gens);
        if seen.insert(h.graph.canonical_code().unwrap()) {
            subgroups.push((h, gens));
        }
    }
    let long = words_up_to(2, 8);
    let short = words_up_to(2, 6);
    let mut disagreements = Vec::new();
    let mut balls = Vec::new();
    for (h, gens) in &subgroups {
        let o = NielsenOracle::new(2, gens).unwrap();
        let ball = o.ball(8);
        if long.iter().any(|x| h.contains(x) != ball.contains(x)) {
            disagreements.push(format!("membership {gens:?}"));
        }
        let rep = is_malnormal(h).unwrap();
        let agree = match &rep.certificate {
            None => malnormal_counterexample(&o, 6, 6).is_none(),
            Some(c) => {
                !c.element.is_identity()
                    && o.contains(&c.element)
                    && o.contains(&c.conjugate)
                    && !o.contains(&c.conjugator)
            }
        };
        if !agree {
            disagreements.push(format!("malnormality {gens:?}"));
        }
        for l in [2, 3] {
            let rc = is_l_root_closed(h, l).unwrap();
            let agree = match &rc.witness {
                None => root_counterexample(&o, l, 6).is_none(),
                Some(x) => !o.contains(x) && o.contains(&x.pow(l as i64)),
            };
            if !agree {
                disagreements.push(format!("{l}-roots {gens:?}"));
            }
        }
        balls.push(ball);
    }
    // intersections of neighbouring subgroups in the list
    for i in 0..subgroups.len().saturating_sub(1) {
        let meet = intersection(&subgroups[i].0, &subgroups[i + 1].0).unwrap();
        let both: HashSet<&Word> = balls[i]
            .iter()
            .filter(|x| balls[i + 1].contains(*x))
            .collect();
        if short
            .iter()
            .chain(&long)
            .any(|x| meet.contains(x) != both.contains(x))
        {
            disagreements.push(format!(
                "intersection {:?} {:?}",
                subgroups[i].1,
                subgroups[i + 1].1
            ));
        }
    }
    let sample: Vec<&String> = disagreements.iter().take(3).collect();
    verdict(
        disagreements.is_empty(),
        format!(
            "{} subgroups, {} disagreements {sample:?}",
            subgroups.len(),
            disagreements.len()
        ),
    )
}

fn connected_pullbacks() -> Verdict {
    let mut r = gen::rng(4);
    let mut ok = 0;
    let mut first_bad = None;
    for i in 0..100 {
        let p = [2, 3, 5][i % 3];
        let im = gen::random_h1_iso_immersion(&mut r, p, 8);
        let c = gen::random_surjective_cocycle(&mut r, &im.x, p);
        let cover = build_cover(&CoverDescriptor::new(im.x.clone(), p, c).unwrap());
        let pb = pullback(&im.a, &im.f, &cover.total, &cover.projection, &im.x).unwrap();
        let fibers_ok = (0..im.a.num_vertices())
            .all(|v| pb.to_left.vertex_map.iter().filter(|&&u| u == v).count() == p as usize);
        let deck_ok = cover.deck.check(&cover.total, &cover.total).is_ok()
            && (0..cover.total.num_vertices()).all(|v| cover.deck.vertex_map[v] != v);
        let dims = (
            h1_basis(&pb.graph, p).unwrap().dim(),
            h1_basis(&cover.total, p).unwrap().dim(),
        );
        if pb.graph.is_connected() && fibers_ok && deck_ok && dims.0 == dims.1 {
            ok += 1;
        } else if first_bad.is_none() {
            first_bad = Some(i);
        }
    }
    verdict(ok == 100, format!("{ok}/100, first failure {first_bad:?}"))
}

fn gersten() -> Verdict {
    let mut r = gen::rng(5);
    let mut ok = 0;
    for i in 0..100 {
        let p = [2, 3, 5][i % 3];
        let im = gen::random_h1_injective_immersion(&mut r, p, 8);
        let cocycle_y: Vec<u64> = (0..im.x.num_edges())
            .map(|_| r.random_range(0..p))
            .collect();
        let cocycle_x = im.f.edge_map.iter().map(|&e| cocycle_y[e]).collect();
        let input = GerstenInput {
            x: im.a,
            y: im.x,
            f: im.f,
            p,
            cocycle_x,
            cocycle_y,
            lift: None,
        };
        if gersten_check(&input).is_ok_and(|rep| rep.lift_injective) {
            ok += 1;
        }
    }
    let (mut applicable, mut module_ok) = (0, 0);
    for i in 0..200 {
        let p = [2, 3, 5][i % 3];
        let rows = r.random_range(1..=3usize);
        let cols = r.random_range(1..=rows);
        let m = gen::random_module_map(&mut r, p, rows, cols);
        if m.specialization().is_injective() {
            applicable += 1;
            if m.is_injective() {
                module_ok += 1;
            }
        }
    }
    verdict(ok == 100 && module_ok == applicable, format!("lifts {ok}/100, module maps {module_ok}/{applicable} of 200 with injective specialization"))
}

fn cyclic_separation() -> Verdict {
    let cs = ["aa", "ababab", "abbA", "abbAabbA", "abbAabbAabbA"];
    let ls: [&[u64]; 3] = [&[2], &[3], &[2, 3]];
    let (mut solved, mut skipped) = (0, 0);
    let mut failures = Vec::new();
    for c in cs.map(w) {
        let h = subgroup_graph(2, std::slice::from_ref(&c));
        for l in ls {
            if l.iter()
                .any(|&q| !is_l_root_closed(&h, q as usize).unwrap().closed)
            {
                skipped += 1;
                continue;
            }
            for g in words_up_to(2, 3).into_iter().filter(|g| !h.contains(g)) {
                match separate_from_cyclic(&c, &g, l, SearchBudget::default()) {
                    Ok(wit)
                        if verify_witness(&wit)
                            && eppa_core::arith::prime_factors(wit.order as u64)
                                .iter()
                                .all(|q| !l.contains(q)) =>
                    {
                        solved += 1
                    }
                    Ok(_) => failures.push(format!("{c} vs {g}, L {l:?}: bad witness")),
                    Err(SepError::NotRootClosed { .. }) => skipped += 1,
                    Err(e) => failures.push(format!("{c} vs {g}, L {l:?}: {e}")),
                }
            }
        }
    }
    let sample: Vec<&String> = failures.iter().take(3).collect();
    verdict(failures.is_empty(), format!("{solved} witnesses verified, {skipped} (c, L) pairs not root-closed, failures {sample:?}"))
}

fn extensions() -> Verdict {
    let mut r = gen::rng(7);
    let mut ok = 0;
    let mut largest = 0;
    let mut failures = Vec::new();
    let mut run = |m: &Hypertournament, phi: PartialMap, label: String| {
        let maps = [phi];
        match eppa_extend(m, &maps, &ExtensionOptions::default()) {
            Ok(res)
                if verify_extension(&res, m, &maps).is_ok()
                    && res.extended.universe.len() <= 10_000 =>
            {
                ok += 1;
                largest = largest.max(res.extended.universe.len());
            }
            Ok(_) => failures.push(format!("{label}: extension fails verification")),
            Err(e) => failures.push(format!("{label}: {}", e.code())),
        }
    };
    let mut made = 0;
    while made < 20 {
        let size = r.random_range(2..=5u32);
        let m = gen::random_tournament(&mut r, size);
        let Some(phi) = gen::random_disjoint_partial_iso(&mut r, &m, 2) else {
            continue;
        };
        made += 1;
        run(&m, phi, format!("tournament {made}"));
    }
    let mut tries = 0;
    loop {
        tries += 1;
        let m = gen::random_hypertournament(&mut r, 4, 3);
        if let Some(phi) = gen::random_disjoint_partial_iso(&mut r, &m, 2) {
            run(&m, phi, "3-hypertournament".into());
            break;
        }
        if tries > 100 {
            failures.push("no 3-hypertournament instance generated".into());
            break;
        }
    }
    verdict(
        ok == 21 && failures.is_empty(),
        format!("{ok}/21 verified, largest |M'| = {largest}, failures {failures:?}"),
    )
}

fn negative_space() -> Verdict {
    let mut m = Hypertournament::new([2], 0..2);
    m.insert(vec![0, 1]);
    let reverse = eppa_extend(
        &m,
        &[PartialMap::from_pairs([(0, 1), (1, 0)])],
        &ExtensionOptions::default(),
    );
    let mut t = Hypertournament::new([2], 0..4);
    for x in 0..4 {
        for y in x + 1..4 {
            t.insert(vec![x, y]);
        }
    }
    let maps = [
        PartialMap::from_pairs([(0, 1), (1, 2), (2, 3)]),
        PartialMap::from_pairs([(0, 2), (1, 3)]),
    ];
    let branched = eppa_extend(&t, &maps, &ExtensionOptions::default());
    let codes = (
        reverse.err().map(|e| e.code()),
        branched.err().map(|e| e.code()),
    );
    verdict(
        codes == (Some("E_NOT_PARTIAL_ISO"), Some("E_NOT_SUBTADPOLE")),
        format!("codes {codes:?}"),
    )
}

type Criterion = (&'static str, fn() -> Verdict, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "counterexample counts",
            counterexample_counts,
            Duration::from_secs(1),
        ),
        (
            "Nielsen-Schreier rank",
            nielsen_schreier,
            Duration::from_secs(5),
        ),
        (
            "oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(120),
        ),
        (
            "connected pullbacks",
            connected_pullbacks,
            Duration::from_secs(30),
        ),
        ("injective lifts", gersten, Duration::from_secs(30)),
        (
            "separation from cyclic subgroups",
            cyclic_separation,
            Duration::from_secs(30),
        ),
        (
            "hypertournament extensions",
            extensions,
            Duration::from_secs(300),
        ),
        ("rejected inputs", negative_space, Duration::from_secs(5)),
    ];
    let mut all = true;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let elapsed = t.elapsed();
        let pass = v.pass && elapsed <= limit;
        all &= pass;
        println!(
            "criterion {}: {} {name} ({:.2?}, limit {limit:?}): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
