//! Finite `L`-hypertournaments, families of partial isomorphisms, and
//! invariant completion of relations along a partial group action.
//!
//! `R_σ(x̄)` holds when `R(x_σ(1), ..., x_σ(l))` does. A structure is an
//! `L`-hypertournament when every tuple of distinct elements satisfies some
//! `R_σ` and no `R_σ` holds on all cyclic shifts of a tuple. Equivalently, no
//! tuple `ȳ ∈ R` and `l`-cycle `π` of positions have `ȳ∘π^j ∈ R` for every `j`;
//! this second form is what [`Hypertournament::validate`] checks.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fiber::MAX_PRODUCT_TUPLES;
use crate::graph::{Edge, GraphError, LabeledGraph};
use crate::stallings::subgroup_graph;
use crate::word::{Letter, Word};

pub type Tuple = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HyperError {
    #[error("element {0} is not in the universe")]
    UnknownElement(u32),
    #[error("partial map {index} is not injective: {a} and {b} both map to {image}")]
    NotInjective {
        index: usize,
        a: u32,
        b: u32,
        image: u32,
    },
    #[error("partial map {index} does not preserve the relation on {tuple:?}")]
    NotPartialIsomorphism { index: usize, tuple: Tuple },
    #[error("the orbit of {tuple:?} contains a cycle")]
    ForcedCycle { l: usize, tuple: Tuple },
    #[error("seed tuple {seed:?} forces {forced:?}, which the seed omits")]
    SeedConflict {
        l: usize,
        seed: Tuple,
        forced: Tuple,
    },
    #[error("{tuples} tuples exceed the cap {cap}")]
    TooLarge { tuples: usize, cap: usize },
    #[error("arity {0} must be at least 2")]
    BadArity(usize),
    #[error("seed element {0} is outside the acted-on set")]
    SeedOutOfRange(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl HyperError {
    pub fn code(&self) -> &'static str {
        match self {
            HyperError::UnknownElement(_) => "E_UNKNOWN_ELEMENT",
            HyperError::NotInjective { .. } => "E_NOT_INJECTIVE",
            HyperError::NotPartialIsomorphism { .. } => "E_NOT_PARTIAL_ISO",
            HyperError::ForcedCycle { .. } => "E_FORCED_CYCLE",
            HyperError::SeedConflict { .. } => "E_SEED_CONFLICT",
            HyperError::TooLarge { .. } => "E_TOO_LARGE",
            HyperError::BadArity(_) | HyperError::SeedOutOfRange(_) => "E_BAD_INPUT",
            HyperError::Graph(_) => "E_GRAPH",
        }
    }
}

/// The first way a structure fails to be an `L`-hypertournament.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BadArity { l: usize },
    DuplicateElement { element: u32 },
    StrayArity { l: usize },
    MalformedTuple { l: usize, tuple: Tuple },
    Unoriented { l: usize, tuple: Tuple },
    Cycle { l: usize, tuples: Vec<Tuple> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadArity { l } => write!(f, "arity {l} must be at least 2"),
            Violation::DuplicateElement { element } => {
                write!(f, "element {element} is listed twice")
            }
            Violation::StrayArity { l } => write!(f, "relation of arity {l} is not in L"),
            Violation::MalformedTuple { l, tuple } => write!(
                f,
                "{tuple:?} is not an {l}-tuple of distinct universe elements"
            ),
            Violation::Unoriented { l, tuple } => {
                write!(f, "no permutation of {tuple:?} is in R_{l}")
            }
            Violation::Cycle { l, tuples } => write!(f, "R_{l} contains the cycle {tuples:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypertournament {
    #[serde(rename = "L")]
    pub ls: BTreeSet<usize>,
    pub universe: Vec<u32>,
    #[serde(default)]
    pub relations: BTreeMap<usize, BTreeSet<Tuple>>,
}

/// All permutations of `0..l` in lexicographic order.
pub fn permutations(l: usize) -> Vec<Vec<usize>> {
    (0..l).permutations(l).collect()
}

/// The `(l-1)!` permutations of `0..l` consisting of a single `l`-cycle.
pub fn l_cycles(l: usize) -> Vec<Vec<usize>> {
    (1..l)
        .permutations(l.saturating_sub(1))
        .map(|rest| {
            let mut pi = vec![0; l];
            let mut cur = 0;
            for &r in &rest {
                pi[cur] = r;
                cur = r;
            }
            pi[cur] = 0;
            pi
        })
        .collect()
}

/// `t∘π`, i.e. the tuple `(t_π(0), ..., t_π(l-1))`.
pub fn permute<T: Copy>(t: &[T], pi: &[usize]) -> Vec<T> {
    pi.iter().map(|&i| t[i]).collect()
}

impl Hypertournament {
    pub fn new(
        ls: impl IntoIterator<Item = usize>,
        universe: impl IntoIterator<Item = u32>,
    ) -> Self {
        let universe: BTreeSet<u32> = universe.into_iter().collect();
        Hypertournament {
            ls: ls.into_iter().collect(),
            universe: universe.into_iter().collect(),
            relations: BTreeMap::new(),
        }
    }

    pub fn relation(&self, l: usize) -> Option<&BTreeSet<Tuple>> {
        self.relations.get(&l)
    }

    pub fn holds(&self, t: &[u32]) -> bool {
        self.relations.get(&t.len()).is_some_and(|r| r.contains(t))
    }

    pub fn insert(&mut self, t: Tuple) {
        self.relations.entry(t.len()).or_default().insert(t);
    }

    pub fn position(&self, x: u32) -> Option<usize> {
        self.universe.iter().position(|&y| y == x)
    }

    pub fn validate(&self) -> Result<(), Violation> {
        if let Some(&l) = self.ls.iter().find(|&&l| l < 2) {
            return Err(Violation::BadArity { l });
        }
        let mut seen = HashSet::new();
        for &x in &self.universe {
            if !seen.insert(x) {
                return Err(Violation::DuplicateElement { element: x });
            }
        }
        for (&l, rel) in &self.relations {
            if !self.ls.contains(&l) && !rel.is_empty() {
                return Err(Violation::StrayArity { l });
            }
            for t in rel {
                let distinct = t.iter().collect::<HashSet<_>>().len() == t.len();
                if t.len() != l || !distinct || t.iter().any(|x| !seen.contains(x)) {
                    return Err(Violation::MalformedTuple {
                        l,
                        tuple: t.clone(),
                    });
                }
            }
        }
        let empty = BTreeSet::new();
        for &l in &self.ls {
            let rel = self.relations.get(&l).unwrap_or(&empty);
            let perms = permutations(l);
            for subset in self.universe.iter().copied().sorted().combinations(l) {
                if !perms.iter().any(|pi| rel.contains(&permute(&subset, pi))) {
                    return Err(Violation::Unoriented { l, tuple: subset });
                }
            }
            let cycles = l_cycles(l);
            for t in rel {
                for pi in &cycles {
                    let mut orbit = vec![t.clone()];
                    for _ in 1..l {
                        let next = permute(orbit.last().expect("nonempty"), pi);
                        if !rel.contains(&next) {
                            break;
                        }
                        orbit.push(next);
                    }
                    if orbit.len() == l {
                        return Err(Violation::Cycle { l, tuples: orbit });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

/// An injective partial map on the universe of a structure.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartialMapJson", into = "PartialMapJson")]
pub struct PartialMap {
    pub map: BTreeMap<u32, u32>,
}

#[derive(Serialize, Deserialize)]
struct PartialMapJson {
    map: BTreeMap<String, serde_json::Value>,
}

impl TryFrom<PartialMapJson> for PartialMap {
    type Error = String;

    fn try_from(j: PartialMapJson) -> Result<Self, String> {
        let parse_value = |v: &serde_json::Value| -> Result<u32, String> {
            match v {
                serde_json::Value::String(s) => {
                    s.trim().parse().map_err(|_| format!("bad element {s:?}"))
                }
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| format!("bad element {n}")),
                other => Err(format!("bad element {other}")),
            }
        };
        let mut map = BTreeMap::new();
        for (k, v) in &j.map {
            let k: u32 = k.trim().parse().map_err(|_| format!("bad element {k:?}"))?;
            map.insert(k, parse_value(v)?);
        }
        Ok(PartialMap { map })
    }
}

impl From<PartialMap> for PartialMapJson {
    fn from(m: PartialMap) -> Self {
        PartialMapJson {
            map: m
                .map
                .into_iter()
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
                .collect(),
        }
    }
}

impl PartialMap {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        PartialMap {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, x: u32) -> Option<u32> {
        self.map.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }

    pub fn range(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.values().copied()
    }
}

/// Checks that each map is an injective partial isomorphism of `m`.
pub fn check_family(m: &Hypertournament, maps: &[PartialMap]) -> Result<(), HyperError> {
    let universe: HashSet<u32> = m.universe.iter().copied().collect();
    for (index, phi) in maps.iter().enumerate() {
        let mut inverse: HashMap<u32, u32> = HashMap::new();
        for (&a, &b) in &phi.map {
            for x in [a, b] {
                if !universe.contains(&x) {
                    return Err(HyperError::UnknownElement(x));
                }
            }
            if let Some(&prev) = inverse.get(&b) {
                return Err(HyperError::NotInjective {
                    index,
                    a: prev,
                    b: a,
                    image: b,
                });
            }
            inverse.insert(b, a);
        }
        let domain: Vec<u32> = phi.domain().collect();
        for &l in &m.ls {
            for t in domain.iter().copied().permutations(l) {
                let image: Tuple = t.iter().map(|&x| phi.map[&x]).collect();
                if m.holds(&t) != m.holds(&image) {
                    return Err(HyperError::NotPartialIsomorphism { index, tuple: t });
                }
            }
        }
    }
    Ok(())
}

/// The immersed graph with an edge `x → φ_i(x)` labelled `i`; vertices are universe positions.
pub fn family_graph(m: &Hypertournament, maps: &[PartialMap]) -> Result<LabeledGraph, HyperError> {
    let pos: HashMap<u32, usize> = m
        .universe
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let lookup = |x: u32| pos.get(&x).copied().ok_or(HyperError::UnknownElement(x));
    let mut edges = Vec::new();
    for (label, phi) in maps.iter().enumerate() {
        let mut seen = HashMap::new();
        for (&a, &b) in &phi.map {
            if let Some(prev) = seen.insert(b, a) {
                return Err(HyperError::NotInjective {
                    index: label,
                    a: prev,
                    b: a,
                    image: b,
                });
            }
            edges.push(Edge {
                src: lookup(a)?,
                dst: lookup(b)?,
                label,
            });
        }
    }
    Ok(LabeledGraph::new(
        maps.len(),
        m.universe.len(),
        edges,
        None,
    )?)
}

/// Vertices of degree 3 when the graph is a subtadpole, `Err` with the offending vertices otherwise.
pub fn subtadpole_check(g: &LabeledGraph) -> Result<Option<usize>, Vec<usize>> {
    let deg = g.degrees();
    let bad: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] > 3).collect();
    let three: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 3).collect();
    if !bad.is_empty() {
        Err(bad)
    } else if three.len() > 1 {
        Err(three)
    } else {
        Ok(three.first().copied())
    }
}

/// At most one vertex of degree 3 and every other vertex of degree at most 2.
pub fn is_subtadpole(g: &LabeledGraph) -> bool {
    subtadpole_check(g).is_ok()
}

/// A partial action of a free group on `0..size`: one injective partial map per generator.
pub type PartialAction = Vec<Vec<Option<usize>>>;

/// Reads the partial action off an immersed graph.
pub fn action_of_graph(g: &LabeledGraph) -> PartialAction {
    let mut out = vec![vec![None; g.num_vertices()]; g.alphabet()];
    for e in g.edges() {
        out[e.label][e.src] = Some(e.dst);
    }
    out
}

struct TupleSpace {
    size: usize,
    l: usize,
    total: usize,
}

impl TupleSpace {
    fn new(size: usize, l: usize) -> Result<Self, HyperError> {
        let total = (0..l)
            .try_fold(1usize, |acc, _| acc.checked_mul(size))
            .filter(|&t| t <= MAX_PRODUCT_TUPLES);
        match total {
            Some(total) => Ok(TupleSpace { size, l, total }),
            None => Err(HyperError::TooLarge {
                tuples: size.saturating_pow(l as u32),
                cap: MAX_PRODUCT_TUPLES,
            }),
        }
    }

    fn encode(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.size + x)
    }

    fn decode_into(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = idx % self.size;
            idx /= self.size;
        }
    }

    fn decode(&self, idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.l];
        self.decode_into(idx, &mut t);
        t
    }
}

fn distinct(t: &[usize]) -> bool {
    (0..t.len()).all(|i| (0..i).all(|j| t[i] != t[j]))
}

fn to_tuple(t: &[usize]) -> Tuple {
    t.iter().map(|&x| x as u32).collect()
}

/// Chooses relations on `0..size` invariant under the partial action.
///
/// Tuples in one orbit of the action share membership. Orbits of the seed
/// tuples are included first; then every set without an orientation receives
/// the orbit of its increasing arrangement. The seed's own structure must
/// survive unchanged.
pub fn orbit_structure(
    size: usize,
    action: &PartialAction,
    ls: &BTreeSet<usize>,
    seed: Option<&Hypertournament>,
) -> Result<Hypertournament, HyperError> {
    let mut out = Hypertournament::new(ls.iter().copied(), 0..size as u32);
    if let Some(s) = seed {
        if let Some(&x) = s.universe.iter().find(|&&x| x as usize >= size) {
            return Err(HyperError::SeedOutOfRange(x));
        }
    }
    for &l in ls {
        if l < 2 {
            return Err(HyperError::BadArity(l));
        }
        let space = TupleSpace::new(size, l)?;
        let mut uf = crate::uf::UnionFind::new(space.total);
        let mut t = vec![0; l];
        let mut img = vec![0; l];
        for idx in 0..space.total {
            space.decode_into(idx, &mut t);
            if !distinct(&t) {
                continue;
            }
            for m in action {
                if t.iter()
                    .zip(img.iter_mut())
                    .all(|(&x, y)| m[x].map(|v| *y = v).is_some())
                {
                    uf.union(idx, space.encode(&img));
                }
            }
        }
        let (class, count) = uf.labels();
        let mut cyclic = vec![false; count];
        let cycles = l_cycles(l);
        for idx in 0..space.total {
            space.decode_into(idx, &mut t);
            if !distinct(&t) || cyclic[class[idx]] {
                continue;
            }
            for pi in &cycles {
                let mut cur = t.clone();
                let closed = (1..l).all(|_| {
                    cur = permute(&cur, pi);
                    class[space.encode(&cur)] == class[idx]
                });
                if closed {
                    cyclic[class[idx]] = true;
                    break;
                }
            }
        }
        let mut in_r = vec![false; count];
        if let Some(s) = seed {
            let mut origin: HashMap<usize, Tuple> = HashMap::new();
            let empty = BTreeSet::new();
            let rel = s.relations.get(&l).unwrap_or(&empty);
            for tup in rel {
                let u: Vec<usize> = tup.iter().map(|&x| x as usize).collect();
                if u.len() != l || !distinct(&u) || u.iter().any(|&x| x >= size) {
                    return Err(HyperError::SeedOutOfRange(
                        tup.iter()
                            .copied()
                            .find(|&x| x as usize >= size)
                            .unwrap_or(0),
                    ));
                }
                let c = class[space.encode(&u)];
                if cyclic[c] {
                    return Err(HyperError::ForcedCycle {
                        l,
                        tuple: tup.clone(),
                    });
                }
                in_r[c] = true;
                origin.entry(c).or_insert_with(|| tup.clone());
            }
            for z in s.universe.iter().map(|&x| x as usize).permutations(l) {
                let zt = to_tuple(&z);
                let c = class[space.encode(&z)];
                if in_r[c] && !rel.contains(&zt) {
                    return Err(HyperError::SeedConflict {
                        l,
                        seed: origin[&c].clone(),
                        forced: zt,
                    });
                }
            }
        }
        let perms = permutations(l);
        for idx in 0..space.total {
            space.decode_into(idx, &mut t);
            if !t.windows(2).all(|w| w[0] < w[1]) {
                continue;
            }
            if perms
                .iter()
                .any(|pi| in_r[class[space.encode(&permute(&t, pi))]])
            {
                continue;
            }
            let c = class[idx];
            if cyclic[c] {
                return Err(HyperError::ForcedCycle {
                    l,
                    tuple: to_tuple(&t),
                });
            }
            in_r[c] = true;
        }
        let rel: BTreeSet<Tuple> = (0..space.total)
            .filter(|&idx| in_r[class[idx]])
            .map(|idx| to_tuple(&space.decode(idx)))
            .collect();
        out.relations.insert(l, rel);
    }
    Ok(out)
}

/// The ball of the given radius in the graph of the left action of `F_n` on the cosets `gH`.
///
/// Vertex 0 is the coset `H`; `representatives[v]` is a word `g` with `v = gH`.
#[derive(Clone, Debug, Serialize)]
pub struct SchreierBall {
    pub graph: LabeledGraph,
    pub representatives: Vec<Word>,
}

pub fn schreier_ball(n: usize, gens: &[Word], radius: usize) -> SchreierBall {
    // A path reading p from H ends at reverse(p)·H, so the graph is the Schreier
    // graph of the reversed subgroup.
    let reversed: Vec<Word> = gens.iter().map(Word::reversed).collect();
    let core = subgroup_graph(n, &reversed);
    let trans = core.transitions();
    type Node = (usize, Vec<Letter>);
    let step = |(v, tail): &Node, l: Letter| -> Node {
        let mut tail = tail.clone();
        if tail.is_empty() {
            if let Some(w) = trans.step(*v, l) {
                return (w, tail);
            }
            tail.push(l);
        } else if tail.last() == Some(&l.inverse()) {
            tail.pop();
        } else {
            tail.push(l);
        }
        (*v, tail)
    };
    let start: Node = (core.basepoint(), Vec::new());
    let mut index: HashMap<Node, usize> = HashMap::from([(start.clone(), 0)]);
    let mut nodes = vec![start];
    let mut paths = vec![Vec::<Letter>::new()];
    let mut frontier = vec![0usize];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &frontier {
            for li in 0..2 * n {
                let l = Letter::from_index(li);
                let target = step(&nodes[i], l);
                if !index.contains_key(&target) {
                    index.insert(target.clone(), nodes.len());
                    let mut p = paths[i].clone();
                    p.push(l);
                    paths.push(p);
                    next.push(nodes.len());
                    nodes.push(target);
                }
            }
        }
        frontier = next;
    }
    let mut edges = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        for g in 0..n {
            if let Some(&j) = index.get(&step(node, Letter::pos(g as u16))) {
                edges.push(Edge {
                    src: i,
                    dst: j,
                    label: g,
                });
            }
        }
    }
    let graph = LabeledGraph::new(n, nodes.len(), edges, Some(0)).expect("edges within the ball");
    let representatives = paths
        .iter()
        .map(|p| Word::from_letters(n, p.iter().rev().copied()).expect("letters in range"))
        .collect();
    SchreierBall {
        graph,
        representatives,
    }
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
    fn small_tournaments() {
        assert!(tournament(3, &[(0, 1), (1, 2), (2, 0)]).is_valid());
        assert!(matches!(
            tournament(2, &[(0, 1), (1, 0)]).validate(),
            Err(Violation::Cycle { .. })
        ));
        assert!(matches!(
            tournament(3, &[(0, 1)]).validate(),
            Err(Violation::Unoriented { .. })
        ));
    }

    #[test]
    fn cycles_of_positions() {
        assert_eq!(l_cycles(2), vec![vec![1, 0]]);
        assert_eq!(l_cycles(3).len(), 2);
        assert_eq!(l_cycles(5).len(), 24);
    }

    #[test]
    fn partial_map_json() {
        let maps: Vec<PartialMap> =
            serde_json::from_str(r#"[{"map": {"0": "1"}}, {"map": {"2": 0}}]"#).unwrap();
        assert_eq!(maps[0].get(0), Some(1));
        assert_eq!(maps[1].get(2), Some(0));
        let back = serde_json::to_string(&maps[0]).unwrap();
        assert_eq!(back, r#"{"map":{"0":"1"}}"#);
    }

    #[test]
    fn hypertournament_json() {
        let m: Hypertournament =
            serde_json::from_str(r#"{"L":[2],"universe":[0,1],"relations":{"2":[[0,1]]}}"#)
                .unwrap();
        assert!(m.is_valid());
        assert!(m.holds(&[0, 1]));
    }

    #[test]
    fn family_checks() {
        let m = tournament(2, &[(0, 1)]);
        let swap = PartialMap::from_pairs([(0, 1), (1, 0)]);
        assert_eq!(
            check_family(&m, &[swap]).unwrap_err().code(),
            "E_NOT_PARTIAL_ISO"
        );
        let clash = PartialMap::from_pairs([(0, 1), (1, 1)]);
        assert_eq!(
            check_family(&m, &[clash]).unwrap_err().code(),
            "E_NOT_INJECTIVE"
        );
    }

    #[test]
    fn subtadpole_degrees() {
        let m = Hypertournament::new([2], 0..6);
        let single = [PartialMap::from_pairs([(0, 3), (1, 4)])];
        assert!(is_subtadpole(&family_graph(&m, &single).unwrap()));
        let one_branch = [
            PartialMap::from_pairs([(0, 1), (1, 2)]),
            PartialMap::from_pairs([(1, 3)]),
        ];
        assert_eq!(
            subtadpole_check(&family_graph(&m, &one_branch).unwrap()),
            Ok(Some(1))
        );
        let two = [
            PartialMap::from_pairs([(0, 1), (1, 2), (3, 4), (4, 5)]),
            PartialMap::from_pairs([(1, 3), (4, 0)]),
        ];
        assert!(!is_subtadpole(&family_graph(&m, &two).unwrap()));
    }

    #[test]
    fn trivial_action_uses_lex_order() {
        let h = orbit_structure(3, &vec![vec![None; 3]], &BTreeSet::from([2]), None).unwrap();
        assert!(h.is_valid());
        assert_eq!(
            h.relation(2).unwrap().iter().cloned().collect::<Vec<_>>(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
    }

    #[test]
    fn involution_forces_a_cycle() {
        let err = orbit_structure(2, &vec![vec![Some(1), Some(0)]], &BTreeSet::from([2]), None)
            .unwrap_err();
        assert_eq!(err.code(), "E_FORCED_CYCLE");
    }

    #[test]
    fn coset_ball_of_cyclic_subgroup() {
        let ball = schreier_ball(2, &[Word::parse(2, "a").unwrap()], 2);
        // H, bH, BH, then abH, AbH, bbH, aBH, ABH, BBH
        assert_eq!(ball.graph.num_vertices(), 9);
        let h =
            orbit_structure(9, &action_of_graph(&ball.graph), &BTreeSet::from([2]), None).unwrap();
        assert!(h.is_valid());
        let trans = ball.graph.transitions().unwrap();
        for (v, w) in ball.representatives.iter().enumerate() {
            assert_eq!(trans.trace(0, &w.reversed()), Some(v));
        }
    }
}
