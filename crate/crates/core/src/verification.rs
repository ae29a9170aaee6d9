//! End-to-end checks: the malnormal subgroup `<abABa, b>` of `F_2`, and a
//! seeded run of every module's invariants plus a directory of fixtures.

use std::fs;
use std::path::Path;

use rand::RngExt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, prime_factors};
use crate::covers::{
    build_cover, cover_tower, pullback, pullback_cover, CoverError, TowerStrategy,
};
use crate::eppa::{eppa_extend, verify_extension, ExtensionOptions};
use crate::fiber::{fiber_product, is_l_root_closed, is_malnormal, ComponentInfo, FiberError};
use crate::gen;
use crate::graph::{GraphMorphism, LabeledGraph};
use crate::homology::{gersten_check, h1_basis, induced_h1_map, GerstenInput, HomologyError};
use crate::hypertournament::{family_graph, Hypertournament, PartialMap};
use crate::linalg::FpMatrix;
use crate::oracle::{
    brute_force_hypertournament, brute_force_rank, malnormal_counterexample, root_counterexample,
    NielsenOracle,
};
use crate::perm::{Perm, PermGroup, StabilizerChain};
use crate::separability::{separate_from_cyclic, verify_witness, SearchBudget, SepError};
use crate::stallings::{subgroup_graph, SubgroupGraph};
use crate::word::Word;

/// Generators of the malnormal subgroup used as the counterexample.
pub const COUNTEREXAMPLE_GENERATORS: [&str; 2] = ["abABa", "b"];

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("cannot read fixtures: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountCheck {
    pub name: String,
    pub expected: usize,
    pub actual: usize,
    pub pass: bool,
}

/// One level `X_i` of the tower and the pullback `A ×_X X_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerRow {
    pub depth: usize,
    pub degree: usize,
    pub level_vertices: usize,
    pub pullback_vertices: usize,
    pub connected: bool,
    pub h1_pullback: usize,
    pub h1_level: usize,
    pub h1_isomorphism: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub p: u64,
    pub depth: usize,
    pub generators: Vec<String>,
    pub counts: Vec<CountCheck>,
    pub nondiagonal_components: Vec<ComponentInfo>,
    pub nondiagonal_trees: bool,
    pub malnormal: bool,
    pub h1_isomorphism: bool,
    pub tower: Vec<TowerRow>,
    pub pass: bool,
}

fn count(name: &str, expected: usize, actual: usize) -> CountCheck {
    CountCheck {
        name: name.into(),
        expected,
        actual,
        pass: expected == actual,
    }
}

/// Checks the graph counts, malnormality, the `H_1` isomorphism mod `p` and
/// connectivity of pullbacks along a `depth`-level tower of `Z/p` covers.
pub fn verify_paper_counterexample(
    p: u64,
    depth: usize,
) -> Result<VerificationReport, VerificationError> {
    if !is_prime(p) {
        return Err(VerificationError::NotPrime(p));
    }
    let gens: Vec<Word> = COUNTEREXAMPLE_GENERATORS
        .iter()
        .map(|s| Word::parse(2, s).expect("valid word"))
        .collect();
    let h = subgroup_graph(2, &gens);
    let a = &h.graph;
    let fp = fiber_product(a, a)?;
    let stats = fp.stats();
    let mal = is_malnormal(&h)?;
    let counts = vec![
        count("vertices", 5, a.num_vertices()),
        count("a_edges", 3, a.edges_with_label(0)),
        count("b_edges", 3, a.edges_with_label(1)),
        count("product_vertices", 25, stats.vertices),
        count("product_a_edges", 9, stats.edge_counts[0]),
        count("product_b_edges", 9, stats.edge_counts[1]),
        count("nondiagonal_a_edges", 6, stats.nondiagonal_edge_counts[0]),
        count("nondiagonal_b_edges", 6, stats.nondiagonal_edge_counts[1]),
    ];
    let nondiagonal_components: Vec<ComponentInfo> = stats
        .components
        .iter()
        .filter(|c| !c.diagonal)
        .cloned()
        .collect();
    let nondiagonal_trees = nondiagonal_components.iter().all(|c| c.is_tree);

    let x = LabeledGraph::wedge(2);
    let f = GraphMorphism::to_wedge(a);
    let h1_isomorphism = induced_h1_map(&f, a, &x, p)?.is_isomorphism();
    let tower = cover_tower(&x, p, depth, TowerStrategy::LexFirst)?;
    let mut rows = Vec::with_capacity(depth + 1);
    for i in 0..=depth {
        let (level, to_base) = if i == 0 {
            (x.clone(), GraphMorphism::identity(&x))
        } else {
            (
                tower.levels[i - 1].total.clone(),
                tower.to_base[i - 1].clone(),
            )
        };
        let pb = pullback(a, &f, &level, &to_base, &x)?;
        let connected = pb.graph.is_connected();
        let h1_pullback = h1_basis(&pb.graph, p)?.dim();
        let h1_level = h1_basis(&level, p)?.dim();
        let iso = induced_h1_map(&pb.to_right, &pb.graph, &level, p)?.is_isomorphism();
        rows.push(TowerRow {
            depth: i,
            degree: (p as usize).pow(i as u32),
            level_vertices: level.num_vertices(),
            pullback_vertices: pb.graph.num_vertices(),
            connected,
            h1_pullback,
            h1_level,
            h1_isomorphism: iso,
            pass: connected && h1_pullback == h1_level && iso,
        });
    }
    let pass = counts.iter().all(|c| c.pass)
        && nondiagonal_trees
        && mal.malnormal
        && h1_isomorphism
        && rows.iter().all(|r| r.pass);
    Ok(VerificationReport {
        p,
        depth,
        generators: COUNTEREXAMPLE_GENERATORS
            .iter()
            .map(|s| s.to_string())
            .collect(),
        counts,
        nondiagonal_components,
        nondiagonal_trees,
        malnormal: mal.malnormal,
        h1_isomorphism,
        tower: rows,
        pass,
    })
}

/// Instance counts for [`run_property_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSizes {
    /// Instances per randomized invariant.
    pub cases: usize,
    /// Instances of the extension pipeline.
    pub eppa_cases: usize,
    /// Vertex bound for random graphs.
    pub max_vertices: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            cases: 50,
            eppa_cases: 10,
            max_vertices: 8,
        }
    }
}

impl SuiteSizes {
    pub fn tiny() -> Self {
        SuiteSizes {
            cases: 5,
            eppa_cases: 2,
            max_vertices: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSummary {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    /// Instances the invariant does not apply to.
    pub skipped: usize,
    pub first_violation: Option<String>,
}

impl InvariantSummary {
    pub fn pass(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub sizes: SuiteSizes,
    pub invariants: Vec<InvariantSummary>,
    pub pass: bool,
}

enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

fn run_invariant(
    name: &str,
    cases: usize,
    mut rng: gen::Rng,
    mut one: impl FnMut(&mut gen::Rng, usize) -> Outcome,
) -> InvariantSummary {
    let mut s = InvariantSummary {
        name: name.into(),
        checked: 0,
        passed: 0,
        skipped: 0,
        first_violation: None,
    };
    for i in 0..cases {
        match one(&mut rng, i) {
            Outcome::Pass => {
                s.checked += 1;
                s.passed += 1;
            }
            Outcome::Skip => s.skipped += 1,
            Outcome::Fail(msg) => {
                s.checked += 1;
                s.first_violation
                    .get_or_insert_with(|| format!("case {i}: {msg}"));
            }
        }
    }
    s
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(msg())
    }
}

fn oracle_of(h: &SubgroupGraph) -> Option<NielsenOracle> {
    NielsenOracle::new(h.alphabet(), &h.basis()).ok()
}

fn random_prime(rng: &mut gen::Rng) -> u64 {
    [2, 3, 5][rng.random_range(0..3)]
}

/// Runs every invariant suite with the given seed, then the fixtures in `fixtures` if given.
pub fn run_property_suite(
    seed: u64,
    sizes: SuiteSizes,
    fixtures: Option<&Path>,
) -> Result<SuiteSummary, VerificationError> {
    let n = sizes.cases;
    let maxv = sizes.max_vertices.max(2);
    let sub = |k: u64| gen::rng(seed.wrapping_mul(0x9e37_79b9).wrapping_add(k));
    let mut out = Vec::new();

    out.push(run_invariant(
        "stallings.nielsen_schreier",
        n,
        sub(1),
        |r, _| {
            let rank = r.random_range(1..=3usize);
            let k = r.random_range(1..=maxv);
            let g = gen::random_cover_of_wedge(r, rank, k);
            check(g.rank() == 1 + k * (rank - 1), || {
                format!(
                    "degree {k} cover of a rank-{rank} wedge has rank {}",
                    g.rank()
                )
            })
        },
    ));

    out.push(run_invariant(
        "stallings.membership_oracle",
        n,
        sub(2),
        |r, _| {
            let h = gen::random_subgroup(r, 2, 2, 3, maxv);
            let Some(o) = oracle_of(&h) else {
                return Outcome::Skip;
            };
            for _ in 0..20 {
                let w = gen::random_word(r, 2, 8);
                if h.contains(&w) != o.contains(&w) {
                    return Outcome::Fail(format!(
                        "membership of {w} in <{}> disagrees",
                        words(&h.basis())
                    ));
                }
            }
            Outcome::Pass
        },
    ));

    out.push(run_invariant(
        "fiber.malnormal_oracle",
        n,
        sub(3),
        |r, _| {
            let h = gen::random_subgroup(r, 2, 2, 3, maxv);
            let Some(o) = oracle_of(&h) else {
                return Outcome::Skip;
            };
            let Ok(rep) = is_malnormal(&h) else {
                return Outcome::Fail("malnormality check errored".into());
            };
            let basis = words(&h.basis());
            match rep.certificate {
                None => check(malnormal_counterexample(&o, 3, 6).is_none(), || {
                    format!("<{basis}> reported malnormal but the oracle finds a conjugate")
                }),
                Some(c) => check(
                    o.contains(&c.element)
                        && o.contains(&c.conjugate)
                        && !o.contains(&c.conjugator)
                        && !c.element.is_identity(),
                    || format!("certificate for <{basis}> does not hold"),
                ),
            }
        },
    ));

    out.push(run_invariant(
        "fiber.root_closure_oracle",
        n,
        sub(4),
        |r, _| {
            let h = gen::random_subgroup(r, 2, 2, 3, maxv);
            let Some(o) = oracle_of(&h) else {
                return Outcome::Skip;
            };
            let l = r.random_range(2..=3usize);
            let Ok(rc) = is_l_root_closed(&h, l) else {
                return Outcome::Fail("root closure check errored".into());
            };
            let basis = words(&h.basis());
            match rc.witness {
                None => check(root_counterexample(&o, l, 5).is_none(), || {
                    format!("<{basis}> reported {l}-root-closed but the oracle finds a root")
                }),
                Some(w) => check(!o.contains(&w) && o.contains(&w.pow(l as i64)), || {
                    format!("root witness {w} for <{basis}> does not hold")
                }),
            }
        },
    ));

    out.push(run_invariant("linalg.rank_oracle", n, sub(5), |r, _| {
        let p = random_prime(r);
        let (rows, cols) = (r.random_range(1..=4usize), r.random_range(1..=4usize));
        let m: Vec<Vec<u64>> = (0..rows)
            .map(|_| (0..cols).map(|_| r.random_range(0..p)).collect())
            .collect();
        let signed: Vec<Vec<i64>> = m
            .iter()
            .map(|row| row.iter().map(|&x| x as i64).collect())
            .collect();
        let fast = FpMatrix::from_rows(p, &signed).map(|a| a.rank());
        let slow = brute_force_rank(p, &m, cols);
        check(fast.as_ref() == Ok(&slow), || {
            format!("rank mod {p} of {m:?}: {fast:?} vs {slow}")
        })
    }));

    out.push(run_invariant(
        "covers.connected_pullback",
        n,
        sub(6),
        |r, _| {
            let p = random_prime(r);
            let im = gen::random_h1_iso_immersion(r, p, maxv);
            if im.x.rank() == 0 {
                return Outcome::Skip;
            }
            let c = gen::random_surjective_cocycle(r, &im.x, p);
            let Ok(d) = crate::covers::CoverDescriptor::new(im.x.clone(), p, c) else {
                return Outcome::Fail("bad cocycle".into());
            };
            let cover = build_cover(&d);
            let Ok(pb) = pullback_cover(&im.a, &im.f, &cover) else {
                return Outcome::Fail("pullback failed".into());
            };
            let (Ok(ha), Ok(hx)) = (h1_basis(&pb.total, p), h1_basis(&cover.total, p)) else {
                return Outcome::Fail("homology failed".into());
            };
            check(
                pb.total.is_connected()
                    && pb.total.num_vertices() == p as usize * im.a.num_vertices()
                    && ha.dim() == hx.dim(),
                || {
                    format!(
                        "p = {p}: pullback connected {}, H_1 ranks {} vs {}",
                        pb.total.is_connected(),
                        ha.dim(),
                        hx.dim()
                    )
                },
            )
        },
    ));

    out.push(run_invariant("homology.gersten", n, sub(7), |r, _| {
        let p = random_prime(r);
        let im = gen::random_h1_injective_immersion(r, p, maxv);
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
        match gersten_check(&input) {
            Ok(rep) => check(rep.lift_injective, || {
                format!(
                    "p = {p}: lift has rank {} on H_1 of rank {}",
                    rep.lift_rank, rep.cover_rank_x
                )
            }),
            Err(e) => Outcome::Fail(e.to_string()),
        }
    }));

    out.push(run_invariant("ring.claim_module", n, sub(8), |r, _| {
        let p = random_prime(r);
        let (rows, cols) = (r.random_range(1..=3usize), r.random_range(1..=3usize));
        let m = gen::random_module_map(r, p, rows, cols);
        if !m.specialization().is_injective() {
            return Outcome::Skip;
        }
        check(m.is_injective(), || {
            format!("p = {p}: injective specialization but the module map is not injective")
        })
    }));

    out.push(run_invariant(
        "separability.cyclic_witness",
        n,
        sub(9),
        |r, _| {
            let c = gen::random_word(r, 2, 3);
            let g = gen::random_word(r, 2, 3);
            let ls: &[u64] = [&[2][..], &[3], &[2, 3]][r.random_range(0..3)];
            match separate_from_cyclic(&c, &g, ls, SearchBudget::default()) {
                Ok(w) => check(
                    verify_witness(&w)
                        && prime_factors(w.order as u64)
                            .iter()
                            .all(|q| !ls.contains(q)),
                    || format!("witness for {g} against <{c}> fails"),
                ),
                Err(SepError::NotRootClosed { .. } | SepError::Member(_)) => Outcome::Skip,
                Err(e) => Outcome::Fail(format!("{g} against <{c}>, L = {ls:?}: {e}")),
            }
        },
    ));

    out.push(run_invariant("perm.schreier_sims", n, sub(10), |r, _| {
        let degree = r.random_range(1..=6usize);
        let gens: Vec<Perm> = (0..r.random_range(0..=3usize))
            .map(|_| {
                let mut images: Vec<usize> = (0..degree).collect();
                rand::seq::SliceRandom::shuffle(images.as_mut_slice(), r);
                Perm::from_images(images).expect("permutation")
            })
            .collect();
        let slow = PermGroup::generate(degree, &gens, 1000).map(|g| g.order() as u128);
        let fast = StabilizerChain::new(degree, &gens).map(|c| c.order());
        check(slow.is_ok() && slow.ok() == fast.ok(), || {
            format!("orders disagree on {gens:?}")
        })
    }));

    out.push(run_invariant(
        "hypertournament.validate_oracle",
        n,
        sub(11),
        |r, _| {
            let size = r.random_range(1..=5u32);
            let mut m = Hypertournament::new([], 0..size);
            for l in [2usize, 3] {
                if r.random_bool(0.6) {
                    let t = gen::random_hypertournament(r, size, l);
                    m.ls.insert(l);
                    if let Some(rel) = t.relations.get(&l) {
                        m.relations.insert(l, rel.clone());
                    }
                }
            }
            // perturb to reach invalid structures too
            for _ in 0..r.random_range(0..=2usize) {
                let Some(&l) = m.ls.iter().nth(r.random_range(0..m.ls.len().max(1))) else {
                    break;
                };
                if size < l as u32 {
                    break;
                }
                let mut pts: Vec<u32> = (0..size).collect();
                rand::seq::SliceRandom::shuffle(pts.as_mut_slice(), r);
                let t = pts[..l].to_vec();
                let rel = m.relations.entry(l).or_default();
                if !rel.remove(&t) {
                    rel.insert(t);
                }
            }
            let fast = m.is_valid();
            check(fast == brute_force_hypertournament(&m), || {
                format!(
                    "validate says {fast} on {}",
                    serde_json::to_string(&m).unwrap_or_default()
                )
            })
        },
    ));

    out.push(run_invariant(
        "hypertournament.root_closed_stabilizers",
        n,
        sub(12),
        |r, _| {
            let size = r.random_range(2..=5u32);
            let l = if r.random_bool(0.5) { 2 } else { 3 };
            if size < l as u32 {
                return Outcome::Skip;
            }
            let m = gen::random_hypertournament(r, size, l);
            let maps: Vec<PartialMap> = (0..r.random_range(1..=2usize))
                .map(|_| gen::random_partial_iso(r, &m, 3))
                .collect();
            let Ok(g) = family_graph(&m, &maps) else {
                return Outcome::Fail("family graph failed".into());
            };
            for v in 0..g.num_vertices() {
                let (comp, map) = g.component_of(v);
                let root = map[v].expect("vertex lies in its component");
                let Ok(basis) = comp.cycle_basis(root) else {
                    return Outcome::Fail("cycle basis failed".into());
                };
                if basis.is_empty() {
                    continue;
                }
                let h = subgroup_graph(g.alphabet(), &basis);
                match is_l_root_closed(&h, l) {
                    Ok(rc) if rc.closed => {}
                    _ => {
                        return Outcome::Fail(format!(
                            "stabilizer of {} is not {l}-root-closed",
                            m.universe[v]
                        ))
                    }
                }
            }
            Outcome::Pass
        },
    ));

    out.push(run_invariant(
        "eppa.verified_extension",
        sizes.eppa_cases,
        sub(13),
        |r, i| {
            let (m, l) = if i % 4 == 3 {
                (gen::random_hypertournament(r, 4, 3), 3u64)
            } else {
                {
                    let size = r.random_range(2..=5);
                    (gen::random_tournament(r, size), 2)
                }
            };
            let Some(phi) = gen::random_disjoint_partial_iso(r, &m, 2) else {
                return Outcome::Skip;
            };
            let maps = [phi];
            match eppa_extend(&m, &maps, &ExtensionOptions::default()) {
                Ok(res) => {
                    if let Err(d) = verify_extension(&res, &m, &maps) {
                        return Outcome::Fail(d.to_string());
                    }
                    let order =
                        StabilizerChain::new(res.extended.universe.len(), &res.generator_actions)
                            .map(|c| c.order());
                    check(order.as_ref().is_ok_and(|&o| o % l as u128 != 0), || {
                        format!("acting group has order {order:?}, divisible by {l}")
                    })
                }
                Err(e) => Outcome::Fail(format!("{}: {e}", e.code())),
            }
        },
    ));

    if let Some(dir) = fixtures {
        out.push(run_fixtures(dir)?);
    }
    let pass = out.iter().all(InvariantSummary::pass);
    Ok(SuiteSummary {
        seed,
        sizes,
        invariants: out,
        pass,
    })
}

fn words(ws: &[Word]) -> String {
    ws.iter()
        .map(Word::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// A golden case stored as one JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fixture {
    Subgroup {
        rank: usize,
        generators: Vec<String>,
        expect: SubgroupExpect,
    },
    // Structures stay as raw JSON: tagged enums lose the integer map keys.
    Hypertournament {
        structure: serde_json::Value,
        valid: bool,
    },
    Extension {
        structure: serde_json::Value,
        maps: Vec<PartialMap>,
        expect: String,
    },
    Counterexample {
        p: u64,
        depth: usize,
        pass: bool,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SubgroupExpect {
    pub vertices: Option<usize>,
    pub edge_counts: Option<Vec<usize>>,
    pub rank: Option<usize>,
    pub malnormal: Option<bool>,
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default)]
    pub non_members: Vec<String>,
}

fn mismatch<T: std::fmt::Debug + PartialEq>(
    field: &str,
    expected: &T,
    actual: &T,
) -> Option<String> {
    (expected != actual).then(|| format!("{field}: expected {expected:?}, computed {actual:?}"))
}

fn structure_of(v: &serde_json::Value) -> Result<Hypertournament, String> {
    serde_json::from_value(v.clone()).map_err(|e| format!("structure: {e}"))
}

/// Evaluates one fixture; `Err` names the first field that disagrees.
pub fn check_fixture(f: &Fixture) -> Result<(), String> {
    match f {
        Fixture::Subgroup {
            rank,
            generators,
            expect,
        } => {
            let parse = |s: &String| Word::parse(*rank, s).map_err(|e| format!("word {s}: {e}"));
            let gens = generators
                .iter()
                .map(parse)
                .collect::<Result<Vec<_>, _>>()?;
            let h = subgroup_graph(*rank, &gens);
            let checks = [
                expect
                    .vertices
                    .and_then(|v| mismatch("vertices", &v, &h.graph.num_vertices())),
                expect
                    .edge_counts
                    .as_ref()
                    .and_then(|v| mismatch("edge_counts", v, &h.graph.edge_counts())),
                expect.rank.and_then(|v| mismatch("rank", &v, &h.rank())),
                match expect.malnormal {
                    Some(v) => mismatch(
                        "malnormal",
                        &v,
                        &is_malnormal(&h).map_err(|e| e.to_string())?.malnormal,
                    ),
                    None => None,
                },
            ];
            if let Some(m) = checks.into_iter().flatten().next() {
                return Err(m);
            }
            for (list, want) in [(&expect.members, true), (&expect.non_members, false)] {
                for s in list {
                    let w = parse(s)?;
                    if h.contains(&w) != want {
                        return Err(format!("membership of {s}: expected {want}"));
                    }
                }
            }
            Ok(())
        }
        Fixture::Hypertournament { structure, valid } => {
            match (structure_of(structure)?.validate(), valid) {
                (Ok(()), true) => Ok(()),
                (Err(_), false) => Ok(()),
                (Ok(()), false) => Err("valid: expected false, computed true".into()),
                (Err(v), true) => Err(format!("valid: expected true, computed false ({v})")),
            }
        }
        Fixture::Extension {
            structure,
            maps,
            expect,
        } => {
            let structure = structure_of(structure)?;
            match eppa_extend(&structure, maps, &ExtensionOptions::default()) {
                Ok(res) => {
                    verify_extension(&res, &structure, maps)
                        .map_err(|d| format!("extension fails verification: {d}"))?;
                    mismatch("expect", expect, &"ok".to_string()).map_or(Ok(()), Err)
                }
                Err(e) => mismatch("expect", expect, &e.code().to_string()).map_or(Ok(()), Err),
            }
        }
        Fixture::Counterexample { p, depth, pass } => {
            let got = verify_paper_counterexample(*p, *depth)
                .map(|r| r.pass)
                .unwrap_or(false);
            mismatch("pass", pass, &got).map_or(Ok(()), Err)
        }
    }
}

/// Checks every `*.json` file in `dir`, in name order.
pub fn run_fixtures(dir: &Path) -> Result<InvariantSummary, VerificationError> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| VerificationError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut s = InvariantSummary {
        name: "fixtures".into(),
        checked: 0,
        passed: 0,
        skipped: 0,
        first_violation: None,
    };
    for path in files {
        s.checked += 1;
        let result = fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| {
                serde_json::from_str::<Fixture>(&text).map_err(|e| format!("parse error: {e}"))
            })
            .and_then(|f| check_fixture(&f));
        match result {
            Ok(()) => s.passed += 1,
            Err(msg) => {
                s.first_violation
                    .get_or_insert_with(|| format!("{}: {msg}", path.display()));
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_report_passes() {
        let r = verify_paper_counterexample(2, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.tower.len(), 2);
        assert!(matches!(
            verify_paper_counterexample(4, 1),
            Err(VerificationError::NotPrime(4))
        ));
    }

    #[test]
    fn tiny_suite_passes() {
        let s = run_property_suite(1, SuiteSizes::tiny(), None).unwrap();
        assert!(s.pass, "{s:?}");
    }
}
