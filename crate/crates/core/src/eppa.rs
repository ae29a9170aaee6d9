//! Extending a finite hypertournament so that a family of partial
//! isomorphisms becomes a family of automorphisms.
//!
//! The family acts partially on `M`, and the stabilizer `H` of a base point
//! `x₀` is read off the family graph. A finite quotient `F_k → Q` of order
//! prime to every arity is chosen so that, with `K` the preimage of the image
//! of `H`:
//!
//! - `w_x⁻¹ w_y ∉ K` for `x ≠ y`, so `x ↦ w_x K` embeds `M` into `F_k / K`;
//! - no element of `F_k` moves a tuple of `R` onto a tuple of `M` outside `R`.
//!
//! Relations on `F_k / K` are then the orbits of those of `M`, completed orbit
//! by orbit, and the generators act by automorphisms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::fiber::{is_l_root_closed, FiberError};
use crate::graph::{GraphError, LabeledGraph};
use crate::hypertournament::{
    check_family, family_graph, orbit_structure, subtadpole_check, HyperError, Hypertournament,
    PartialMap, Tuple, Violation,
};
use crate::perm::{Perm, PermGroup};
use crate::separability::{
    separate_coset_system, CosetConstraint, CosetStrategy, FiniteQuotient, SearchBudget, SepError,
    MAX_QUOTIENT_ORDER,
};
use crate::stallings::subgroup_graph;
use crate::word::Word;

/// Largest extension built by default.
pub const DEFAULT_BOUND: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EppaError {
    #[error("input is not a hypertournament: {0}")]
    NotHypertournament(Violation),
    #[error("arity {0} is not prime")]
    NotPrime(usize),
    #[error(transparent)]
    Family(HyperError),
    #[error("family graph is not a subtadpole (vertices {vertices:?})")]
    NotSubtadpole { vertices: Vec<u32> },
    #[error("stabilizer is not closed under {l}-th roots: {witness}")]
    NotRootClosed { l: usize, witness: String },
    #[error("quotient search failed: {0}")]
    Search(SepError),
    #[error("{what} has size {size}, above the bound {bound}")]
    TooLarge {
        what: &'static str,
        size: usize,
        bound: usize,
    },
    #[error("extension changes M: {seed:?} forces {forced:?}")]
    StarViolation { seed: Tuple, forced: Tuple },
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl EppaError {
    pub fn code(&self) -> &'static str {
        match self {
            EppaError::NotHypertournament(_) => "E_NOT_HYPERTOURNAMENT",
            EppaError::NotPrime(_) => "E_BAD_INPUT",
            EppaError::Family(e) => e.code(),
            EppaError::NotSubtadpole { .. } => "E_NOT_SUBTADPOLE",
            EppaError::NotRootClosed { .. } => "E_NOT_ROOT_CLOSED",
            EppaError::Search(SepError::SearchExhausted(_)) => "E_SEARCH_EXHAUSTED",
            EppaError::Search(SepError::TooLarge(_)) | EppaError::TooLarge { .. } => "E_TOO_LARGE",
            EppaError::Search(_) => "E_SEPARATION",
            EppaError::StarViolation { .. } => "E_STAR_VIOLATION",
            EppaError::Internal(_) => "E_INTERNAL",
        }
    }

    /// Whether the failure comes from a size or search cap rather than the input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self.code(), "E_SEARCH_EXHAUSTED" | "E_TOO_LARGE")
    }
}

impl From<HyperError> for EppaError {
    fn from(e: HyperError) -> Self {
        match e {
            HyperError::SeedConflict { seed, forced, .. } => {
                EppaError::StarViolation { seed, forced }
            }
            HyperError::TooLarge { tuples, cap } => EppaError::TooLarge {
                what: "tuple space",
                size: tuples,
                bound: cap,
            },
            other => EppaError::Family(other),
        }
    }
}

impl From<GraphError> for EppaError {
    fn from(e: GraphError) -> Self {
        EppaError::Family(HyperError::Graph(e))
    }
}

impl From<FiberError> for EppaError {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::Graph(g) => g.into(),
            other => EppaError::Internal(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExtensionOptions {
    /// Largest admissible number of elements of the extension.
    pub bound: usize,
    pub budget: SearchBudget,
    pub strategy: CosetStrategy,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions {
            bound: DEFAULT_BOUND,
            budget: SearchBudget::default(),
            strategy: CosetStrategy::SingleQuotientFirst,
        }
    }
}

/// A pair `from ↦ to` added to connect the family graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connector {
    pub letter: usize,
    pub from: u32,
    pub to: u32,
    pub new_letter: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionMetadata {
    pub basepoint: Option<u32>,
    pub connectors: Vec<Connector>,
    /// `w_x` with `w_x · x₀ = x`.
    pub coset_words: BTreeMap<u32, String>,
    pub stabilizer: Vec<String>,
    pub constraints: usize,
    pub quotient: String,
    pub quotient_order: usize,
    pub transcript: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub extended: Hypertournament,
    pub embedding: BTreeMap<u32, u32>,
    /// One permutation of the positions of `extended.universe` per input map.
    pub automorphisms: Vec<Perm>,
    /// Actions of all letters, including those added as connectors.
    pub generator_actions: Vec<Perm>,
    pub metadata: ExtensionMetadata,
}

fn identity_extension(m: &Hypertournament, maps: &[PartialMap]) -> ExtensionResult {
    let n = m.universe.len();
    ExtensionResult {
        extended: m.clone(),
        embedding: m.universe.iter().map(|&x| (x, x)).collect(),
        automorphisms: vec![Perm::identity(n); maps.len()],
        generator_actions: vec![Perm::identity(n); maps.len()],
        metadata: ExtensionMetadata {
            basepoint: m.universe.first().copied(),
            quotient: "trivial".into(),
            quotient_order: 1,
            ..Default::default()
        },
    }
}

/// Adds pairs to the family until its graph is connected.
///
/// A pair joining two components is added to the last map when the result is
/// still a partial isomorphism; otherwise a one-point map becomes a new letter.
fn connect(m: &Hypertournament, family: &mut Vec<PartialMap>) -> Result<Vec<Connector>, EppaError> {
    let mut added = Vec::new();
    loop {
        let g = family_graph(m, family)?;
        let (comp, count) = g.components();
        if count <= 1 {
            return Ok(added);
        }
        let last = family.len() - 1;
        let mut found = None;
        'search: for (i, &u) in m.universe.iter().enumerate() {
            if family[last].get(u).is_some() {
                continue;
            }
            for (j, &v) in m.universe.iter().enumerate() {
                if comp[i] == comp[j] || family[last].range().any(|y| y == v) {
                    continue;
                }
                let mut candidate = family[last].clone();
                candidate.map.insert(u, v);
                if check_family(m, std::slice::from_ref(&candidate)).is_ok() {
                    found = Some((u, v, candidate));
                    break 'search;
                }
            }
        }
        match found {
            Some((u, v, candidate)) => {
                family[last] = candidate;
                added.push(Connector {
                    letter: last,
                    from: u,
                    to: v,
                    new_letter: false,
                });
            }
            None => {
                let u = m.universe[0];
                let j = (0..m.universe.len())
                    .find(|&j| comp[j] != comp[0])
                    .expect("disconnected");
                let v = m.universe[j];
                family.push(PartialMap::from_pairs([(u, v)]));
                added.push(Connector {
                    letter: family.len() - 1,
                    from: u,
                    to: v,
                    new_letter: true,
                });
            }
        }
    }
}

fn all_tuples(universe: &[u32], l: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    use itertools::Itertools;
    (0..universe.len()).permutations(l)
}

/// Builds a finite extension of `m` in which every map of the family extends to an automorphism.
pub fn eppa_extend(
    m: &Hypertournament,
    maps: &[PartialMap],
    opts: &ExtensionOptions,
) -> Result<ExtensionResult, EppaError> {
    m.validate().map_err(EppaError::NotHypertournament)?;
    if let Some(&l) = m.ls.iter().find(|&&l| !is_prime(l as u64)) {
        return Err(EppaError::NotPrime(l));
    }
    check_family(m, maps)?;
    let g = family_graph(m, maps)?;
    if let Err(vs) = subtadpole_check(&g) {
        return Err(EppaError::NotSubtadpole {
            vertices: vs.into_iter().map(|v| m.universe[v]).collect(),
        });
    }
    if maps.is_empty() || m.universe.is_empty() {
        return Ok(identity_extension(m, maps));
    }

    let mut family = maps.to_vec();
    let connectors = connect(m, &mut family)?;
    let k = family.len();
    let g: LabeledGraph = family_graph(m, &family)?;
    let tree = g.spanning_tree(0);
    let words: Vec<Word> = tree
        .path
        .iter()
        .map(|p| p.as_ref().expect("connected").reversed())
        .collect();
    let stabilizer: Vec<Word> = g.cycle_basis(0)?.iter().map(Word::reversed).collect();

    let h = subgroup_graph(k, &stabilizer);
    for &l in &m.ls {
        let rc = is_l_root_closed(&h, l)?;
        if !rc.closed {
            let witness = rc.witness.map(|w| w.to_string()).unwrap_or_default();
            return Err(EppaError::NotRootClosed { l, witness });
        }
    }

    let n = m.universe.len();
    let mut constraints = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            constraints.push(CosetConstraint::Exclude {
                subgroup: stabilizer.clone(),
                word: words[x].inverse().mul(&words[y]),
            });
        }
    }
    for &l in &m.ls {
        let in_r: Vec<Vec<usize>> = all_tuples(&m.universe, l)
            .filter(|t| m.holds(&positions_to_tuple(m, t)))
            .collect();
        for z in all_tuples(&m.universe, l) {
            if m.holds(&positions_to_tuple(m, &z)) {
                continue;
            }
            for y in &in_r {
                let translates = z
                    .iter()
                    .zip(y)
                    .map(|(&zi, &yi)| (words[zi].clone(), words[yi].inverse()))
                    .collect();
                constraints.push(CosetConstraint::DisjointCosets {
                    subgroup: stabilizer.clone(),
                    translates,
                });
            }
        }
    }
    let ls: Vec<u64> = m.ls.iter().map(|&l| l as u64).collect();
    let sol = separate_coset_system(k, &constraints, &ls, opts.budget, opts.strategy)
        .map_err(EppaError::Search)?;

    let q = &sol.quotient;
    let hbar = q
        .subgroup_image(&stabilizer, MAX_QUOTIENT_ORDER)
        .map_err(EppaError::Search)?;
    let cosets = CosetSpace::enumerate(q, &hbar, opts.bound)?;
    let size = cosets.reps.len();
    let actions = cosets.actions;
    let coset = |p: &Perm| cosets.index[&canonical(p, &hbar)];
    let embed: Vec<usize> = words.iter().map(|w| coset(&q.eval(w))).collect();
    if embed.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(EppaError::Internal("embedding is not injective".into()));
    }
    for (i, phi) in family.iter().enumerate() {
        for (&a, &b) in &phi.map {
            let (pa, pb) = (
                m.position(a).expect("checked"),
                m.position(b).expect("checked"),
            );
            if actions[i].apply(embed[pa]) != embed[pb] {
                return Err(EppaError::Internal(format!(
                    "letter {i} does not extend {a} -> {b}"
                )));
            }
        }
    }

    let mut seed = Hypertournament::new(m.ls.iter().copied(), embed.iter().map(|&c| c as u32));
    for rel in m.relations.values() {
        for t in rel {
            seed.insert(
                t.iter()
                    .map(|&x| embed[m.position(x).expect("validated")] as u32)
                    .collect(),
            );
        }
    }
    let action = actions
        .iter()
        .map(|p| p.images().iter().map(|&x| Some(x as usize)).collect())
        .collect();
    let extended = orbit_structure(size, &action, &m.ls, Some(&seed))?;
    extended
        .validate()
        .map_err(|v| EppaError::Internal(format!("extension is not a hypertournament: {v}")))?;

    let metadata = ExtensionMetadata {
        basepoint: Some(m.universe[0]),
        connectors,
        coset_words: m
            .universe
            .iter()
            .zip(&words)
            .map(|(&x, w)| (x, w.to_string()))
            .collect(),
        stabilizer: stabilizer.iter().map(Word::to_string).collect(),
        constraints: constraints.len(),
        quotient: q.name.clone(),
        quotient_order: sol.order,
        transcript: sol.transcript,
    };
    let result = ExtensionResult {
        extended,
        embedding: m
            .universe
            .iter()
            .zip(&embed)
            .map(|(&x, &c)| (x, c as u32))
            .collect(),
        automorphisms: actions[..maps.len()].to_vec(),
        generator_actions: actions,
        metadata,
    };
    verify_extension(&result, m, maps).map_err(|d| EppaError::Internal(d.to_string()))?;
    Ok(result)
}

fn positions_to_tuple(m: &Hypertournament, t: &[usize]) -> Tuple {
    t.iter().map(|&i| m.universe[i]).collect()
}

/// Smallest element of the coset `gH̄`.
fn canonical(g: &Perm, h: &PermGroup) -> Perm {
    h.elements()
        .iter()
        .map(|e| g.compose(e))
        .min()
        .expect("subgroup contains the identity")
}

/// The left cosets `gH̄` of the image of `F_k`, found from `H̄` by breadth-first search.
struct CosetSpace {
    reps: Vec<Perm>,
    index: HashMap<Perm, usize>,
    actions: Vec<Perm>,
}

impl CosetSpace {
    fn enumerate(q: &FiniteQuotient, h: &PermGroup, bound: usize) -> Result<Self, EppaError> {
        let id = canonical(&Perm::identity(q.degree), h);
        let mut reps = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut images = vec![Vec::new(); q.images.len()];
        let mut i = 0;
        while i < reps.len() {
            for (s, img) in q.images.iter().zip(images.iter_mut()) {
                let key = canonical(&s.compose(&reps[i]), h);
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        if reps.len() >= bound {
                            return Err(EppaError::TooLarge {
                                what: "coset space",
                                size: reps.len() + 1,
                                bound,
                            });
                        }
                        index.insert(key.clone(), reps.len());
                        reps.push(key);
                        reps.len() - 1
                    }
                };
                img.push(j);
            }
            i += 1;
        }
        let actions = images
            .into_iter()
            .map(|img| Perm::from_images(img).expect("left multiplication permutes cosets"))
            .collect();
        Ok(CosetSpace {
            reps,
            index,
            actions,
        })
    }
}

/// The first failed check of [`verify_extension`].
#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
pub enum ExtensionDefect {
    #[error("extension is not a hypertournament: {0}")]
    Invalid(Violation),
    #[error("arities differ from those of M")]
    Arity,
    #[error("embedding is undefined at {0} or leaves the extension")]
    EmbeddingDomain(u32),
    #[error("embedding identifies {0} and {1}")]
    EmbeddingNotInjective(u32, u32),
    #[error("embedding does not preserve the relation at {0:?}")]
    EmbeddingRelation(Tuple),
    #[error("{got} automorphisms for {want} maps")]
    AutomorphismCount { got: usize, want: usize },
    #[error("automorphism {0} has the wrong degree")]
    Degree(usize),
    #[error("automorphism {index} moves {tuple:?} out of the relation")]
    NotAutomorphism { index: usize, tuple: Tuple },
    #[error("automorphism {index} does not extend the map at {element}")]
    NotExtending { index: usize, element: u32 },
}

/// Checks an extension certificate against `M` and the family.
pub fn verify_extension(
    r: &ExtensionResult,
    m: &Hypertournament,
    maps: &[PartialMap],
) -> Result<(), ExtensionDefect> {
    let e = &r.extended;
    e.validate().map_err(ExtensionDefect::Invalid)?;
    if e.ls != m.ls {
        return Err(ExtensionDefect::Arity);
    }
    let pos = |x: u32| e.position(x);
    let mut image = BTreeMap::new();
    for &x in &m.universe {
        let y = r
            .embedding
            .get(&x)
            .copied()
            .filter(|&y| pos(y).is_some())
            .ok_or(ExtensionDefect::EmbeddingDomain(x))?;
        if let Some(prev) = image.insert(y, x) {
            return Err(ExtensionDefect::EmbeddingNotInjective(prev, x));
        }
    }
    for &l in &m.ls {
        for t in all_tuples(&m.universe, l) {
            let t = positions_to_tuple(m, &t);
            let img: Tuple = t.iter().map(|x| r.embedding[x]).collect();
            if m.holds(&t) != e.holds(&img) {
                return Err(ExtensionDefect::EmbeddingRelation(t));
            }
        }
    }
    if r.automorphisms.len() != maps.len() {
        return Err(ExtensionDefect::AutomorphismCount {
            got: r.automorphisms.len(),
            want: maps.len(),
        });
    }
    for (index, (a, phi)) in r.automorphisms.iter().zip(maps).enumerate() {
        if a.degree() != e.universe.len() {
            return Err(ExtensionDefect::Degree(index));
        }
        let act = |x: u32| e.universe[a.apply(pos(x).expect("element of the extension"))];
        for rel in e.relations.values() {
            for t in rel {
                let img: Tuple = t.iter().map(|&x| act(x)).collect();
                if !e.holds(&img) {
                    return Err(ExtensionDefect::NotAutomorphism {
                        index,
                        tuple: t.clone(),
                    });
                }
            }
        }
        for (&x, &y) in &phi.map {
            let (Some(&ex), Some(&ey)) = (r.embedding.get(&x), r.embedding.get(&y)) else {
                return Err(ExtensionDefect::EmbeddingDomain(x));
            };
            if act(ex) != ey {
                return Err(ExtensionDefect::NotExtending { index, element: x });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tournament(n: u32, edges: &[(u32, u32)]) -> Hypertournament {
        let mut m = Hypertournament::new([2], 0..n);
        for &(a, b) in edges {
            m.insert(vec![a, b]);
        }
        m
    }

    #[test]
    fn three_cycle_with_one_point_map() {
        let m = tournament(3, &[(0, 1), (1, 2), (2, 0)]);
        let maps = [PartialMap::from_pairs([(0, 1)])];
        let r = eppa_extend(&m, &maps, &ExtensionOptions::default()).unwrap();
        verify_extension(&r, &m, &maps).unwrap();
        assert_eq!(r.metadata.quotient_order % 2, 1);
    }

    #[test]
    fn empty_family_is_identity() {
        let m = tournament(3, &[(0, 1), (1, 2), (2, 0)]);
        let r = eppa_extend(&m, &[], &ExtensionOptions::default()).unwrap();
        assert_eq!(r.extended, m);
        assert!(r.embedding.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn rejections() {
        let m = tournament(2, &[(0, 1)]);
        let swap = [PartialMap::from_pairs([(0, 1), (1, 0)])];
        assert_eq!(
            eppa_extend(&m, &swap, &ExtensionOptions::default())
                .unwrap_err()
                .code(),
            "E_NOT_PARTIAL_ISO"
        );
    }

    #[test]
    fn tampering_is_caught() {
        let m = tournament(3, &[(0, 1), (1, 2), (2, 0)]);
        let maps = [PartialMap::from_pairs([(0, 1)])];
        let r = eppa_extend(&m, &maps, &ExtensionOptions::default()).unwrap();
        let mut broken = r.clone();
        let first = broken
            .extended
            .relations
            .get(&2)
            .unwrap()
            .iter()
            .next()
            .unwrap()
            .clone();
        broken
            .extended
            .relations
            .get_mut(&2)
            .unwrap()
            .remove(&first);
        assert!(matches!(
            verify_extension(&broken, &m, &maps),
            Err(ExtensionDefect::Invalid(Violation::Unoriented { .. }))
        ));
        let mut moved = r.clone();
        moved.automorphisms[0] = Perm::identity(r.extended.universe.len());
        assert!(matches!(
            verify_extension(&moved, &m, &maps),
            Err(ExtensionDefect::NotExtending { .. })
        ));
    }
}
