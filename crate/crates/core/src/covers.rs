//! Cyclic covers of graphs from `Z/p`-valued cocycles, pullbacks and towers.

use std::collections::{BTreeMap, HashMap};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::is_prime;
use crate::graph::{Edge, GraphError, GraphMorphism, LabeledGraph};
use crate::perm::{Perm, PermGroup};

/// Largest total graph built by a tower.
pub const MAX_TOWER_VERTICES: usize = 1_000_000;
/// Largest monodromy group turned into a Cayley graph.
pub const MAX_NORMAL_CORE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cocycle has {got} values but the graph has {edges} edges")]
    CocycleLength { got: usize, edges: usize },
    #[error("base graph is not connected")]
    Disconnected,
    #[error("base graph has no cycles, so every cyclic cover is trivial")]
    NoSurjectiveCocycle,
    #[error("maps do not have a common target")]
    TargetMismatch,
    #[error("{what} of size {size} exceeds the cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("graph is not a finite cover of the wedge: {0}")]
    NotACover(String),
    #[error("bad cocycle text: {0}")]
    Parse(String),
    #[error("bad embedding: {0}")]
    BadEmbedding(String),
}

/// Data of a `p`-fold cyclic cover: the base graph and one value per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverDescriptor {
    pub base: LabeledGraph,
    pub p: u64,
    pub cocycle: Vec<u64>,
}

/// The total graph with projection and generating deck transformation.
///
/// Vertex `(v, k)` has index `v * p + k`, edge `(e, k)` has index `e * p + k`
/// and runs from `(src e, k)` to `(dst e, k + c(e))`.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicCover {
    pub descriptor: CoverDescriptor,
    pub total: LabeledGraph,
    pub projection: GraphMorphism,
    pub deck: GraphMorphism,
}

impl CoverDescriptor {
    pub fn new(base: LabeledGraph, p: u64, cocycle: Vec<u64>) -> Result<Self, CoverError> {
        if !is_prime(p) {
            return Err(CoverError::NotPrime(p));
        }
        if cocycle.len() != base.num_edges() {
            return Err(CoverError::CocycleLength {
                got: cocycle.len(),
                edges: base.num_edges(),
            });
        }
        let cocycle = cocycle.into_iter().map(|c| c % p).collect();
        Ok(CoverDescriptor { base, p, cocycle })
    }

    /// Parses `"a=1,b=0"` (every edge with that label) or `"#3=2"` (edge index 3).
    pub fn parse(base: LabeledGraph, p: u64, text: &str) -> Result<Self, CoverError> {
        let mut cocycle = vec![0u64; base.num_edges()];
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CoverError::Parse(part.into()))?;
            let value: i64 = value
                .trim()
                .parse()
                .map_err(|_| CoverError::Parse(part.into()))?;
            let value = crate::arith::modp(value, p.max(1));
            let key = key.trim();
            if let Some(idx) = key.strip_prefix('#') {
                let i: usize = idx.parse().map_err(|_| CoverError::Parse(part.into()))?;
                *cocycle
                    .get_mut(i)
                    .ok_or_else(|| CoverError::Parse(format!("no edge {i}")))? = value;
            } else {
                let mut cs = key.chars();
                let label = match (cs.next(), cs.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => c as usize - 'a' as usize,
                    _ => return Err(CoverError::Parse(part.into())),
                };
                if label >= base.alphabet() {
                    return Err(CoverError::Parse(format!("label {key} outside alphabet")));
                }
                for (i, e) in base.edges().iter().enumerate() {
                    if e.label == label {
                        cocycle[i] = value;
                    }
                }
            }
        }
        CoverDescriptor::new(base, p, cocycle)
    }

    /// Values of the cocycle on the homology basis of each component.
    fn periods(&self) -> Vec<Vec<u64>> {
        let (label, count) = self.base.components();
        let mut out = vec![Vec::new(); count];
        let mut done = vec![false; count];
        for v in 0..self.base.num_vertices() {
            let c = label[v];
            if done[c] {
                continue;
            }
            done[c] = true;
            let tree = self.base.spanning_tree(v);
            let mut pot = vec![0u64; self.base.num_vertices()];
            for &u in &tree.order[1..] {
                let e = tree.parent_edge[u].expect("non-root");
                let edge = self.base.edges()[e];
                pot[u] = if edge.dst == u {
                    (pot[edge.src] + self.cocycle[e]) % self.p
                } else {
                    (pot[edge.dst] + self.p - self.cocycle[e]) % self.p
                };
            }
            for (i, edge) in self.base.edges().iter().enumerate() {
                if label[edge.src] == c && !tree.tree_edge[i] {
                    out[c]
                        .push((pot[edge.src] + self.cocycle[i] + self.p - pot[edge.dst]) % self.p);
                }
            }
        }
        out
    }

    /// Number of components of the total graph, computed from periods alone.
    pub fn predicted_components(&self) -> usize {
        self.periods()
            .iter()
            .map(|ps| {
                if ps.iter().any(|&x| x != 0) {
                    1
                } else {
                    self.p as usize
                }
            })
            .sum()
    }

    /// Whether the cover of a connected base is connected.
    pub fn is_connected(&self) -> bool {
        self.base.is_connected() && self.periods()[0].iter().any(|&x| x != 0)
    }
}

/// Builds the cover described by a cocycle.
pub fn build_cover(desc: &CoverDescriptor) -> CyclicCover {
    let p = desc.p as usize;
    let base = &desc.base;
    let mut edges = Vec::with_capacity(base.num_edges() * p);
    for (i, e) in base.edges().iter().enumerate() {
        for k in 0..p {
            let k2 = (k + desc.cocycle[i] as usize) % p;
            edges.push(Edge {
                src: e.src * p + k,
                dst: e.dst * p + k2,
                label: e.label,
            });
        }
    }
    let nv = base.num_vertices() * p;
    let total = LabeledGraph::new(base.alphabet(), nv, edges, base.basepoint().map(|b| b * p))
        .expect("valid cover");
    let projection = GraphMorphism {
        vertex_map: (0..nv).map(|v| v / p).collect(),
        edge_map: (0..total.num_edges()).map(|e| e / p).collect(),
    };
    let shift = |x: usize| x / p * p + (x % p + 1) % p;
    let deck = GraphMorphism {
        vertex_map: (0..nv).map(shift).collect(),
        edge_map: (0..total.num_edges()).map(shift).collect(),
    };
    CyclicCover {
        descriptor: desc.clone(),
        total,
        projection,
        deck,
    }
}

/// Fiber product of two maps into the same graph.
#[derive(Clone, Debug, Serialize)]
pub struct Pullback {
    pub graph: LabeledGraph,
    pub to_left: GraphMorphism,
    pub to_right: GraphMorphism,
}

/// `A ×_X B` for `f: A → X` and `q: B → X`.
pub fn pullback(
    a: &LabeledGraph,
    f: &GraphMorphism,
    b: &LabeledGraph,
    q: &GraphMorphism,
    x: &LabeledGraph,
) -> Result<Pullback, CoverError> {
    f.check(a, x)?;
    q.check(b, x)?;
    let mut fiber_v: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, &t) in q.vertex_map.iter().enumerate() {
        fiber_v.entry(t).or_default().push(j);
    }
    let mut fiber_e: HashMap<usize, Vec<usize>> = HashMap::new();
    for (j, &t) in q.edge_map.iter().enumerate() {
        fiber_e.entry(t).or_default().push(j);
    }
    let mut index = BTreeMap::new();
    let mut left_v = Vec::new();
    let mut right_v = Vec::new();
    for (i, &t) in f.vertex_map.iter().enumerate() {
        for &j in fiber_v.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
            index.insert((i, j), left_v.len());
            left_v.push(i);
            right_v.push(j);
        }
    }
    let mut edges = Vec::new();
    let mut left_e = Vec::new();
    let mut right_e = Vec::new();
    for (i, &t) in f.edge_map.iter().enumerate() {
        let ea = a.edges()[i];
        for &j in fiber_e.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
            let eb = b.edges()[j];
            edges.push(Edge {
                src: index[&(ea.src, eb.src)],
                dst: index[&(ea.dst, eb.dst)],
                label: ea.label,
            });
            left_e.push(i);
            right_e.push(j);
        }
    }
    let basepoint = match (a.basepoint(), b.basepoint()) {
        (Some(x), Some(y)) => index.get(&(x, y)).copied(),
        _ => None,
    };
    let graph = LabeledGraph::new(a.alphabet(), left_v.len(), edges, basepoint)?;
    Ok(Pullback {
        graph,
        to_left: GraphMorphism {
            vertex_map: left_v,
            edge_map: left_e,
        },
        to_right: GraphMorphism {
            vertex_map: right_v,
            edge_map: right_e,
        },
    })
}

/// Pullback of `f: A → X` along a cyclic cover of `X`, as a cyclic cover of `A`.
pub fn pullback_cover(
    a: &LabeledGraph,
    f: &GraphMorphism,
    cover: &CyclicCover,
) -> Result<CyclicCover, CoverError> {
    f.check(a, &cover.descriptor.base)?;
    let cocycle = f
        .edge_map
        .iter()
        .map(|&e| cover.descriptor.cocycle[e])
        .collect();
    Ok(build_cover(&CoverDescriptor::new(
        a.clone(),
        cover.descriptor.p,
        cocycle,
    )?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TowerStrategy {
    /// The surjective normalized cocycle `(0, ..., 0, 1)` on the chords of a spanning tree.
    LexFirst,
    Random {
        seed: u64,
    },
}

/// A sequence of connected cyclic covers `X = X_0 ← X_1 ← ... ← X_d`.
#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    pub levels: Vec<CyclicCover>,
    /// Composite projection `X_k → X` for `k = 1..=d`.
    pub to_base: Vec<GraphMorphism>,
}

impl Tower {
    pub fn top(&self) -> Option<&LabeledGraph> {
        self.levels.last().map(|c| &c.total)
    }
}

/// Builds a tower of connected `p`-fold covers.
pub fn cover_tower(
    x: &LabeledGraph,
    p: u64,
    depth: usize,
    strategy: TowerStrategy,
) -> Result<Tower, CoverError> {
    if !is_prime(p) {
        return Err(CoverError::NotPrime(p));
    }
    if !x.is_connected() {
        return Err(CoverError::Disconnected);
    }
    let size = x
        .num_vertices()
        .saturating_mul((p as usize).saturating_pow(depth as u32));
    if size > MAX_TOWER_VERTICES {
        return Err(CoverError::TooLarge {
            what: "tower",
            size,
            cap: MAX_TOWER_VERTICES,
        });
    }
    let mut rng = match strategy {
        TowerStrategy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        TowerStrategy::LexFirst => None,
    };
    let mut levels: Vec<CyclicCover> = Vec::new();
    let mut to_base: Vec<GraphMorphism> = Vec::new();
    let mut current = x.clone();
    for _ in 0..depth {
        let root = current.basepoint().unwrap_or(0);
        let tree = current.spanning_tree(root);
        let chords: Vec<usize> = (0..current.num_edges())
            .filter(|&e| !tree.tree_edge[e])
            .collect();
        if chords.is_empty() {
            return Err(CoverError::NoSurjectiveCocycle);
        }
        let mut cocycle = vec![0u64; current.num_edges()];
        match rng.as_mut() {
            None => cocycle[*chords.last().expect("nonempty")] = 1,
            Some(r) => loop {
                for &c in &chords {
                    cocycle[c] = r.random_range(0..p);
                }
                if chords.iter().any(|&c| cocycle[c] != 0) {
                    break;
                }
            },
        }
        let cover = build_cover(&CoverDescriptor::new(current.clone(), p, cocycle)?);
        let composite = match to_base.last() {
            None => cover.projection.clone(),
            Some(prev) => cover.projection.then(prev),
        };
        current = cover.total.clone();
        levels.push(cover);
        to_base.push(composite);
    }
    Ok(Tower { levels, to_base })
}

/// Edge permutations of a graph in which every vertex has exactly one incoming and one outgoing edge per label.
pub fn label_permutations(g: &LabeledGraph) -> Result<Vec<Perm>, CoverError> {
    let t = g.transitions()?;
    let mut out = Vec::with_capacity(g.alphabet());
    for i in 0..g.alphabet() {
        let images = (0..g.num_vertices())
            .map(|v| {
                t.step(v, crate::word::Letter::pos(i as u16))
                    .ok_or_else(|| {
                        CoverError::NotACover(format!("vertex {v} lacks an outgoing edge {i}"))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Perm::from_images(images).map_err(|e| CoverError::NotACover(e.to_string()))?);
    }
    Ok(out)
}

/// The smallest regular cover of the wedge that covers `g`.
#[derive(Clone, Debug, Serialize)]
pub struct NormalCore {
    /// Cayley graph of the monodromy group; vertex `i` is `group.elements()[i]`.
    pub graph: LabeledGraph,
    pub to_cover: GraphMorphism,
    pub order: usize,
}

/// Order of the monodromy group of a finite cover of the wedge.
pub fn monodromy_order(g: &LabeledGraph, cap: usize) -> Result<usize, CoverError> {
    let gens = label_permutations(g)?;
    let group =
        PermGroup::generate(g.num_vertices(), &gens, cap).map_err(|_| CoverError::TooLarge {
            what: "monodromy group",
            size: cap + 1,
            cap,
        })?;
    Ok(group.order())
}

/// Cayley graph of the monodromy group of a finite connected cover of the wedge.
pub fn normal_core_cover(g: &LabeledGraph) -> Result<NormalCore, CoverError> {
    let gens = label_permutations(g)?;
    let group = PermGroup::generate(g.num_vertices(), &gens, MAX_NORMAL_CORE).map_err(|_| {
        CoverError::TooLarge {
            what: "monodromy group",
            size: MAX_NORMAL_CORE + 1,
            cap: MAX_NORMAL_CORE,
        }
    })?;
    let v0 = g.basepoint().unwrap_or(0);
    let mut edges = Vec::new();
    for (gi, elem) in group.elements().iter().enumerate() {
        for (i, s) in gens.iter().enumerate() {
            let target = group
                .index_of(&s.compose(elem))
                .expect("closed under generators");
            edges.push(Edge {
                src: gi,
                dst: target,
                label: i,
            });
        }
    }
    let graph = LabeledGraph::new(
        g.alphabet(),
        group.order(),
        edges,
        Some(
            group
                .index_of(&Perm::identity(g.num_vertices()))
                .expect("identity"),
        ),
    )?;
    let vmap = group.elements().iter().map(|e| e.apply(v0)).collect();
    let to_cover = GraphMorphism::from_vertex_map(&graph, g, vmap)?;
    Ok(NormalCore {
        graph,
        to_cover,
        order: group.order(),
    })
}

/// Outcome of pulling back `f: A → X` along a cover `B → X` into which `A` embeds.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingProduct {
    pub disconnected: bool,
    pub components: usize,
    /// Size of the component containing the graph of the embedding.
    pub embedded_component_vertices: usize,
}

/// Fiber product of `A` and `B` over `X` when `A` embeds in `B` over `X` and `B` has degree above 1.
pub fn check_disconnected_embedding(
    a: &LabeledGraph,
    fa: &GraphMorphism,
    b: &LabeledGraph,
    qb: &GraphMorphism,
    x: &LabeledGraph,
    embedding: &GraphMorphism,
) -> Result<EmbeddingProduct, CoverError> {
    embedding.check(a, b)?;
    let injective = |m: &[usize]| {
        let mut seen = std::collections::HashSet::new();
        m.iter().all(|v| seen.insert(*v))
    };
    if !injective(&embedding.vertex_map) || !injective(&embedding.edge_map) {
        return Err(CoverError::BadEmbedding("not injective".into()));
    }
    let composite = embedding.then(qb);
    if composite.vertex_map != fa.vertex_map || composite.edge_map != fa.edge_map {
        return Err(CoverError::BadEmbedding(
            "does not commute with the maps to X".into(),
        ));
    }
    if x.num_vertices() == 0 || b.num_vertices() <= x.num_vertices() {
        return Err(CoverError::BadEmbedding(
            "cover degree must exceed 1".into(),
        ));
    }
    let pb = pullback(a, fa, b, qb, x)?;
    let (comp, count) = pb.graph.components();
    let start = (0..pb.graph.num_vertices()).find(|&v| {
        a.num_vertices() > 0
            && pb.to_left.vertex_map[v] == 0
            && pb.to_right.vertex_map[v] == embedding.vertex_map[0]
    });
    let embedded_component_vertices =
        start.map_or(0, |s| comp.iter().filter(|&&c| c == comp[s]).count());
    Ok(EmbeddingProduct {
        disconnected: count > 1,
        components: count,
        embedded_component_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_cover_of_circle() {
        let x = LabeledGraph::wedge(1);
        let d = CoverDescriptor::new(x.clone(), 2, vec![1]).unwrap();
        assert!(d.is_connected());
        let c = build_cover(&d);
        assert!(c.total.is_connected());
        assert_eq!(c.total.num_vertices(), 2);
        let trivial = build_cover(&CoverDescriptor::new(x, 2, vec![0]).unwrap());
        assert_eq!(trivial.total.components().1, 2);
    }

    #[test]
    fn cocycle_text() {
        let d = CoverDescriptor::parse(LabeledGraph::wedge(2), 3, "a=1, b=-1").unwrap();
        assert_eq!(d.cocycle, vec![1, 2]);
        assert!(CoverDescriptor::parse(LabeledGraph::wedge(2), 3, "c=1").is_err());
    }

    #[test]
    fn tower_levels_are_connected() {
        let t = cover_tower(&LabeledGraph::wedge(2), 3, 2, TowerStrategy::LexFirst).unwrap();
        assert_eq!(t.top().unwrap().num_vertices(), 9);
        assert!(t.levels.iter().all(|c| c.total.is_connected()));
        assert_eq!(t.top().unwrap().rank(), 1 + 9);
    }

    #[test]
    fn normal_core_of_triangle() {
        // S3 acting on three points
        let g = LabeledGraph::new(
            2,
            3,
            vec![
                Edge {
                    src: 0,
                    dst: 1,
                    label: 0,
                },
                Edge {
                    src: 1,
                    dst: 2,
                    label: 0,
                },
                Edge {
                    src: 2,
                    dst: 0,
                    label: 0,
                },
                Edge {
                    src: 0,
                    dst: 1,
                    label: 1,
                },
                Edge {
                    src: 1,
                    dst: 0,
                    label: 1,
                },
                Edge {
                    src: 2,
                    dst: 2,
                    label: 1,
                },
            ],
            Some(0),
        )
        .unwrap();
        let core = normal_core_cover(&g).unwrap();
        assert_eq!(core.order, 6);
        core.to_cover.check(&core.graph, &g).unwrap();
    }

    #[test]
    fn embedding_in_trivial_cover_disconnects() {
        let x = LabeledGraph::wedge(1);
        let cover = build_cover(&CoverDescriptor::new(x.clone(), 3, vec![0]).unwrap());
        let a = LabeledGraph::new(
            1,
            1,
            vec![Edge {
                src: 0,
                dst: 0,
                label: 0,
            }],
            Some(0),
        )
        .unwrap();
        let emb = GraphMorphism {
            vertex_map: vec![1],
            edge_map: vec![1],
        };
        let r = check_disconnected_embedding(
            &a,
            &GraphMorphism::to_wedge(&a),
            &cover.total,
            &cover.projection,
            &x,
            &emb,
        )
        .unwrap();
        assert!(r.disconnected);
        assert_eq!((r.components, r.embedded_component_vertices), (3, 1));
    }
}
