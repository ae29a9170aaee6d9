//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, GraphMorphism, LabeledGraph};
use crate::homology::induced_h1_map;
use crate::hypertournament::{check_family, permutations, permute, Hypertournament, PartialMap};
use crate::ring::{ModuleMap, RingElem};
use crate::stallings::{subgroup_graph, SubgroupGraph};
use crate::word::{Letter, Word};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly chosen reduced word of length `1..=max_len`.
pub fn random_word(rng: &mut Rng, n: usize, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len.max(1));
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_index(rng.random_range(0..2 * n));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::from_letters(n, letters).expect("letters in range")
}

/// A connected degree-`k` cover of the wedge of `n` circles, from `n` random permutations.
pub fn random_cover_of_wedge(rng: &mut Rng, n: usize, k: usize) -> LabeledGraph {
    loop {
        let mut edges = Vec::with_capacity(n * k);
        for label in 0..n {
            let mut images: Vec<usize> = (0..k).collect();
            images.shuffle(rng);
            edges.extend(
                images
                    .iter()
                    .enumerate()
                    .map(|(src, &dst)| Edge { src, dst, label }),
            );
        }
        let g = LabeledGraph::new(n, k, edges, Some(0)).expect("valid edges");
        if g.is_connected() {
            return g;
        }
    }
}

/// Stallings graph of a random subgroup with up to `max_gens` generators, at most `max_vertices` vertices and rank at least 1.
pub fn random_subgroup(
    rng: &mut Rng,
    n: usize,
    max_gens: usize,
    max_len: usize,
    max_vertices: usize,
) -> SubgroupGraph {
    loop {
        let k = rng.random_range(1..=max_gens.max(1));
        let gens: Vec<Word> = (0..k).map(|_| random_word(rng, n, max_len)).collect();
        let h = subgroup_graph(n, &gens);
        if h.graph.num_vertices() <= max_vertices && h.rank() >= 1 {
            return h;
        }
    }
}

/// An immersion `A → X` of based core graphs, `A` for a subgroup of the group of `X`.
#[derive(Clone, Debug)]
pub struct Immersion {
    pub a: LabeledGraph,
    pub x: LabeledGraph,
    pub f: GraphMorphism,
}

fn random_product(rng: &mut Rng, basis: &[Word], n: usize, max_factors: usize) -> Word {
    let k = rng.random_range(1..=max_factors.max(1));
    (0..k).fold(Word::identity(n), |acc, _| {
        let b = &basis[rng.random_range(0..basis.len())];
        acc.mul(&if rng.random_bool(0.5) {
            b.clone()
        } else {
            b.inverse()
        })
    })
}

/// A random immersion whose induced map on `H_1(-; Z/p)` satisfies `accept(rank, rows, cols)`.
fn random_immersion(
    rng: &mut Rng,
    p: u64,
    max_vertices: usize,
    accept: impl Fn(usize, usize, usize) -> bool,
) -> Immersion {
    loop {
        let n = rng.random_range(1..=2usize);
        let h = random_subgroup(rng, n, 2, 4, max_vertices);
        let basis = h.basis();
        let r = basis.len();
        let gens: Vec<Word> = (0..r)
            .map(|_| random_product(rng, &basis, n, 3))
            .filter(|w| !w.is_identity())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let k = subgroup_graph(n, &gens);
        if k.graph.num_vertices() > max_vertices {
            continue;
        }
        let Ok(f) = GraphMorphism::by_labels(&k.graph, &h.graph) else {
            continue;
        };
        let Ok(m) = induced_h1_map(&f, &k.graph, &h.graph, p) else {
            continue;
        };
        if accept(m.rank(), m.rows(), m.cols()) {
            return Immersion {
                a: k.graph,
                x: h.graph,
                f,
            };
        }
    }
}

/// An immersion inducing an isomorphism on `H_1(-; Z/p)`.
pub fn random_h1_iso_immersion(rng: &mut Rng, p: u64, max_vertices: usize) -> Immersion {
    random_immersion(rng, p, max_vertices, |rank, rows, cols| {
        rank == rows && rank == cols
    })
}

/// An immersion inducing an injection on `H_1(-; Z/p)`.
pub fn random_h1_injective_immersion(rng: &mut Rng, p: u64, max_vertices: usize) -> Immersion {
    random_immersion(rng, p, max_vertices, |rank, _, cols| rank == cols)
}

/// A cocycle on `g` whose cover is connected.
pub fn random_surjective_cocycle(rng: &mut Rng, g: &LabeledGraph, p: u64) -> Vec<u64> {
    assert!(g.rank() > 0, "graph has no cycles");
    loop {
        let c: Vec<u64> = (0..g.num_edges()).map(|_| rng.random_range(0..p)).collect();
        if crate::covers::CoverDescriptor::new(g.clone(), p, c.clone())
            .is_ok_and(|d| d.is_connected())
        {
            return c;
        }
    }
}

pub fn random_module_map(rng: &mut Rng, p: u64, rows: usize, cols: usize) -> ModuleMap {
    let entries = (0..rows * cols)
        .map(|_| {
            let coeffs: Vec<u64> = (0..p).map(|_| rng.random_range(0..p)).collect();
            RingElem::from_coeffs(p, &coeffs)
        })
        .collect();
    ModuleMap::new(p, rows, cols, entries).expect("p prime")
}

/// A random `{l}`-hypertournament on `0..n` with one orientation per `l`-set.
pub fn random_hypertournament(rng: &mut Rng, n: u32, l: usize) -> Hypertournament {
    use itertools::Itertools;
    let mut m = Hypertournament::new([l], 0..n);
    let perms = permutations(l);
    for subset in (0..n).combinations(l) {
        let pi = &perms[rng.random_range(0..perms.len())];
        m.insert(permute(&subset, pi));
    }
    m
}

pub fn random_tournament(rng: &mut Rng, n: u32) -> Hypertournament {
    random_hypertournament(rng, n, 2)
}

/// A partial isomorphism of `m` with domain and range disjoint, as large as found within a few tries.
pub fn random_disjoint_partial_iso(
    rng: &mut Rng,
    m: &Hypertournament,
    max_domain: usize,
) -> Option<PartialMap> {
    let half = m.universe.len() / 2;
    for d in (1..=max_domain.min(half)).rev() {
        for _ in 0..50 {
            let mut pts = m.universe.clone();
            pts.shuffle(rng);
            let phi =
                PartialMap::from_pairs(pts[..d].iter().copied().zip(pts[d..2 * d].iter().copied()));
            if check_family(m, std::slice::from_ref(&phi)).is_ok() {
                return Some(phi);
            }
        }
    }
    None
}

/// A random partial isomorphism of `m` with at most `max_domain` points.
pub fn random_partial_iso(rng: &mut Rng, m: &Hypertournament, max_domain: usize) -> PartialMap {
    let n = m.universe.len();
    loop {
        let d = rng.random_range(0..=max_domain.min(n));
        let mut dom = m.universe.clone();
        dom.shuffle(rng);
        let mut ran = m.universe.clone();
        ran.shuffle(rng);
        let phi = PartialMap::from_pairs(dom[..d].iter().copied().zip(ran[..d].iter().copied()));
        if check_family(m, std::slice::from_ref(&phi)).is_ok() {
            return phi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = random_tournament(&mut rng(7), 5);
        let b = random_tournament(&mut rng(7), 5);
        assert_eq!(a, b);
        assert!(a.is_valid());
        let c = random_cover_of_wedge(&mut rng(1), 2, 6);
        assert_eq!(c.rank(), 1 + 6);
    }

    #[test]
    fn immersions_meet_their_conditions() {
        let mut r = rng(3);
        let im = random_h1_iso_immersion(&mut r, 3, 8);
        im.f.check(&im.a, &im.x).unwrap();
        assert!(induced_h1_map(&im.f, &im.a, &im.x, 3)
            .unwrap()
            .is_isomorphism());
    }
}
