//! Finite directed graphs with edges labelled by free generators.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::uf::UnionFind;
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} references vertex {vertex} but the graph has {count} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        count: usize,
    },
    #[error("edge {edge} has label {label} but the alphabet has {n} letters")]
    LabelOutOfRange { edge: usize, label: usize, n: usize },
    #[error("basepoint {0} is not a vertex")]
    BadBasepoint(usize),
    #[error("graph is not immersed: vertex {vertex} has two {letter:?} edges")]
    NotImmersed { vertex: usize, letter: Letter },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no basepoint")]
    NoBasepoint,
    #[error("vertex {0} has degree at most one and is not the basepoint")]
    NotCore(usize),
    #[error("alphabet sizes differ ({0} vs {1})")]
    AlphabetMismatch(usize, usize),
    #[error("not a graph morphism: {0}")]
    NotMorphism(String),
    #[error("bad graph json: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: usize,
}

/// A graph over the wedge of `n` circles: every edge carries a generator label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    num_vertices: usize,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
}

/// Outgoing and incoming edge per vertex and label of an immersed graph.
#[derive(Clone, Debug)]
pub struct Transitions {
    n: usize,
    out: Vec<Option<usize>>,
    inn: Vec<Option<usize>>,
    edges: Vec<Edge>,
}

impl Transitions {
    pub fn edge(&self, v: usize, l: Letter) -> Option<usize> {
        let i = v * self.n + l.gen as usize;
        if l.inv {
            self.inn[i]
        } else {
            self.out[i]
        }
    }

    /// The endpoint reached from `v` along letter `l`.
    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        self.edge(v, l).map(|e| {
            if l.inv {
                self.edges[e].src
            } else {
                self.edges[e].dst
            }
        })
    }

    /// Reads `w` left to right starting at `v`.
    pub fn trace(&self, v: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(v, |v, &l| self.step(v, l))
    }
}

/// Breadth-first spanning tree of one component.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub root: usize,
    /// Vertices of the component in discovery order.
    pub order: Vec<usize>,
    pub parent_edge: Vec<Option<usize>>,
    pub reached: Vec<bool>,
    pub tree_edge: Vec<bool>,
    /// Label of the tree path from the root, `None` outside the component.
    pub path: Vec<Option<Word>>,
}

impl LabeledGraph {
    pub fn new(
        n: usize,
        num_vertices: usize,
        edges: Vec<Edge>,
        basepoint: Option<usize>,
    ) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            for v in [e.src, e.dst] {
                if v >= num_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        edge: i,
                        vertex: v,
                        count: num_vertices,
                    });
                }
            }
            if e.label >= n {
                return Err(GraphError::LabelOutOfRange {
                    edge: i,
                    label: e.label,
                    n,
                });
            }
        }
        if let Some(b) = basepoint {
            if b >= num_vertices {
                return Err(GraphError::BadBasepoint(b));
            }
        }
        Ok(LabeledGraph {
            n,
            num_vertices,
            edges,
            basepoint,
        })
    }

    /// One vertex with a loop for every generator.
    pub fn wedge(n: usize) -> Self {
        let edges = (0..n)
            .map(|i| Edge {
                src: 0,
                dst: 0,
                label: i,
            })
            .collect();
        LabeledGraph {
            n,
            num_vertices: 1,
            edges,
            basepoint: Some(0),
        }
    }

    pub fn alphabet(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn with_basepoint(mut self, b: Option<usize>) -> Result<Self, GraphError> {
        if let Some(v) = b {
            if v >= self.num_vertices {
                return Err(GraphError::BadBasepoint(v));
            }
        }
        self.basepoint = b;
        Ok(self)
    }

    pub fn edges_with_label(&self, label: usize) -> usize {
        self.edges.iter().filter(|e| e.label == label).count()
    }

    pub fn edge_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for e in &self.edges {
            c[e.label] += 1;
        }
        c
    }

    /// Degree with loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_vertices];
        for e in &self.edges {
            d[e.src] += 1;
            d[e.dst] += 1;
        }
        d
    }

    pub fn transitions(&self) -> Result<Transitions, GraphError> {
        let mut out = vec![None; self.num_vertices * self.n];
        let mut inn = vec![None; self.num_vertices * self.n];
        for (i, e) in self.edges.iter().enumerate() {
            let o = &mut out[e.src * self.n + e.label];
            if o.is_some() {
                return Err(GraphError::NotImmersed {
                    vertex: e.src,
                    letter: Letter::pos(e.label as u16),
                });
            }
            *o = Some(i);
            let t = &mut inn[e.dst * self.n + e.label];
            if t.is_some() {
                return Err(GraphError::NotImmersed {
                    vertex: e.dst,
                    letter: Letter::new(e.label as u16, true),
                });
            }
            *t = Some(i);
        }
        Ok(Transitions {
            n: self.n,
            out,
            inn,
            edges: self.edges.clone(),
        })
    }

    pub fn is_immersed(&self) -> bool {
        self.transitions().is_ok()
    }

    /// Incident half-edges per vertex as `(letter, edge, other end)`, sorted by letter then edge.
    pub fn incidence(&self) -> Vec<Vec<(Letter, usize, usize)>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.src].push((Letter::pos(e.label as u16), i, e.dst));
            inc[e.dst].push((Letter::new(e.label as u16, true), i, e.src));
        }
        for list in &mut inc {
            list.sort_by_key(|&(l, e, _)| (l.index(), e));
        }
        inc
    }

    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.num_vertices);
        for e in &self.edges {
            uf.union(e.src, e.dst);
        }
        uf.labels()
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices > 0 && self.components().1 == 1
    }

    /// First Betti number: `|E| - |V| + #components`.
    pub fn rank(&self) -> usize {
        let (_, c) = self.components();
        self.edges.len() + c - self.num_vertices
    }

    /// `(vertices, edges, rank)` for every component.
    pub fn component_ranks(&self) -> Vec<(usize, usize, usize)> {
        let (label, c) = self.components();
        let mut v = vec![0usize; c];
        let mut e = vec![0usize; c];
        for &l in &label {
            v[l] += 1;
        }
        for edge in &self.edges {
            e[label[edge.src]] += 1;
        }
        (0..c).map(|i| (v[i], e[i], e[i] + 1 - v[i])).collect()
    }

    pub fn spanning_tree(&self, root: usize) -> SpanningTree {
        let inc = self.incidence();
        let nv = self.num_vertices;
        let mut reached = vec![false; nv];
        let mut parent_edge = vec![None; nv];
        let mut path: Vec<Option<Word>> = vec![None; nv];
        let mut tree_edge = vec![false; self.edges.len()];
        let mut order = vec![root];
        reached[root] = true;
        path[root] = Some(Word::identity(self.n));
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(l, e, w) in &inc[v] {
                if !reached[w] {
                    reached[w] = true;
                    parent_edge[w] = Some(e);
                    tree_edge[e] = true;
                    let pw = path[v].as_ref().expect("reached vertices have paths");
                    path[w] = Some(
                        Word::from_letters(self.n, pw.letters().iter().copied().chain([l]))
                            .expect("labels in range"),
                    );
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        SpanningTree {
            root,
            order,
            parent_edge,
            reached,
            tree_edge,
            path,
        }
    }

    /// Free basis of the fundamental group at `v`: one loop word per edge outside a spanning tree.
    pub fn cycle_basis(&self, v: usize) -> Result<Vec<Word>, GraphError> {
        if v >= self.num_vertices {
            return Err(GraphError::BadBasepoint(v));
        }
        let t = self.spanning_tree(v);
        if t.order.len() != self.num_vertices {
            return Err(GraphError::Disconnected);
        }
        Ok(self.chord_words(&t))
    }

    pub(crate) fn chord_words(&self, t: &SpanningTree) -> Vec<Word> {
        self.edges
            .iter()
            .enumerate()
            .filter(|&(i, e)| !t.tree_edge[i] && t.reached[e.src])
            .map(|(_, e)| {
                let ps = t.path[e.src].as_ref().expect("reached");
                let pd = t.path[e.dst].as_ref().expect("reached");
                ps.mul(&Word::generator(self.n, e.label).expect("label in range"))
                    .mul(&pd.inverse())
            })
            .collect()
    }

    /// Subgraph spanned by the given vertices, with the map from old to new ids.
    pub fn induced(&self, keep: &[bool]) -> (LabeledGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.num_vertices];
        let mut count = 0;
        for v in 0..self.num_vertices {
            if keep[v] {
                map[v] = Some(count);
                count += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(Edge {
                    src: map[e.src]?,
                    dst: map[e.dst]?,
                    label: e.label,
                })
            })
            .collect();
        let basepoint = self.basepoint.and_then(|b| map[b]);
        (
            LabeledGraph {
                n: self.n,
                num_vertices: count,
                edges,
                basepoint,
            },
            map,
        )
    }

    /// The component containing `v`, based at `v`.
    pub fn component_of(&self, v: usize) -> (LabeledGraph, Vec<Option<usize>>) {
        let (label, _) = self.components();
        let keep: Vec<bool> = label.iter().map(|&l| l == label[v]).collect();
        let (g, map) = self.induced(&keep);
        let b = map[v];
        (LabeledGraph { basepoint: b, ..g }, map)
    }

    /// Repeatedly deletes vertices of degree at most one other than the basepoint.
    pub fn core(&self) -> (LabeledGraph, Vec<Option<usize>>) {
        let nv = self.num_vertices;
        let mut alive_edge = vec![true; self.edges.len()];
        let mut alive = vec![true; nv];
        let mut deg = self.degrees();
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.src].push(i);
            if e.dst != e.src {
                inc[e.dst].push(i);
            }
        }
        let mut stack: Vec<usize> = (0..nv)
            .filter(|&v| deg[v] <= 1 && Some(v) != self.basepoint)
            .collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &e in &inc[v] {
                if !alive_edge[e] {
                    continue;
                }
                alive_edge[e] = false;
                let edge = self.edges[e];
                let other = if edge.src == v { edge.dst } else { edge.src };
                deg[v] -= 1;
                deg[other] -= 1;
                if alive[other] && deg[other] <= 1 && Some(other) != self.basepoint {
                    stack.push(other);
                }
            }
        }
        self.induced(&alive)
    }

    pub fn is_core(&self) -> Result<(), GraphError> {
        match self
            .degrees()
            .iter()
            .enumerate()
            .find(|&(v, &d)| d <= 1 && Some(v) != self.basepoint)
        {
            Some((v, _)) => Err(GraphError::NotCore(v)),
            None => Ok(()),
        }
    }

    /// Disjoint union; vertices of `other` are shifted by `self.num_vertices()`.
    pub fn disjoint_union(&self, other: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
        if self.n != other.n {
            return Err(GraphError::AlphabetMismatch(self.n, other.n));
        }
        let off = self.num_vertices;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            src: e.src + off,
            dst: e.dst + off,
            label: e.label,
        }));
        Ok(LabeledGraph {
            n: self.n,
            num_vertices: off + other.num_vertices,
            edges,
            basepoint: self.basepoint,
        })
    }

    /// Label-preserving isomorphism invariant of an immersed graph.
    ///
    /// Two immersed graphs get equal codes iff they are isomorphic; if both
    /// are based, the isomorphism must also match basepoints.
    pub fn canonical_code(&self) -> Result<Vec<Vec<u32>>, GraphError> {
        let t = self.transitions()?;
        let (label, c) = self.components();
        let mut codes = Vec::with_capacity(c);
        for comp in 0..c {
            let members: Vec<usize> = (0..self.num_vertices)
                .filter(|&v| label[v] == comp)
                .collect();
            let starts: Vec<usize> = match self.basepoint {
                Some(b) if label[b] == comp => vec![b],
                _ => members.clone(),
            };
            let mut best = starts
                .iter()
                .map(|&s| bfs_code(&t, self.n, self.num_vertices, s))
                .min()
                .expect("nonempty");
            if starts.len() == 1 && self.basepoint.is_some_and(|b| label[b] == comp) {
                best.insert(0, u32::MAX);
            }
            codes.push(best);
        }
        codes.sort();
        Ok(codes)
    }
}

fn bfs_code(t: &Transitions, n: usize, nv: usize, start: usize) -> Vec<u32> {
    let mut num = vec![u32::MAX; nv];
    let mut order = vec![start];
    num[start] = 0;
    let mut i = 0;
    let mut code = Vec::new();
    while i < order.len() {
        let v = order[i];
        i += 1;
        for li in 0..2 * n {
            match t.step(v, Letter::from_index(li)) {
                None => code.push(u32::MAX - 1),
                Some(w) => {
                    if num[w] == u32::MAX {
                        num[w] = order.len() as u32;
                        order.push(w);
                    }
                    code.push(num[w]);
                }
            }
        }
    }
    code
}

/// A label-preserving map of graphs given on vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMorphism {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

impl GraphMorphism {
    pub fn check(&self, src: &LabeledGraph, dst: &LabeledGraph) -> Result<(), GraphError> {
        if self.vertex_map.len() != src.num_vertices || self.edge_map.len() != src.num_edges() {
            return Err(GraphError::NotMorphism(
                "map sizes do not match the source".into(),
            ));
        }
        if let Some(v) = self.vertex_map.iter().find(|&&v| v >= dst.num_vertices) {
            return Err(GraphError::NotMorphism(format!(
                "vertex image {v} out of range"
            )));
        }
        for (i, e) in src.edges.iter().enumerate() {
            let Some(f) = dst.edges.get(self.edge_map[i]) else {
                return Err(GraphError::NotMorphism(format!(
                    "edge image of {i} out of range"
                )));
            };
            if f.label != e.label
                || f.src != self.vertex_map[e.src]
                || f.dst != self.vertex_map[e.dst]
            {
                return Err(GraphError::NotMorphism(format!(
                    "edge {i} is not mapped compatibly"
                )));
            }
        }
        Ok(())
    }

    /// Extends a vertex map to edges when the target is immersed.
    pub fn from_vertex_map(
        src: &LabeledGraph,
        dst: &LabeledGraph,
        vertex_map: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let t = dst.transitions()?;
        let mut edge_map = Vec::with_capacity(src.num_edges());
        for (i, e) in src.edges.iter().enumerate() {
            let img = vertex_map
                .get(e.src)
                .and_then(|&u| t.edge(u, Letter::pos(e.label as u16)));
            match img {
                Some(f) if Some(&dst.edges[f].dst) == vertex_map.get(e.dst) => edge_map.push(f),
                _ => {
                    return Err(GraphError::NotMorphism(format!(
                        "edge {i} has no compatible image"
                    )))
                }
            }
        }
        let m = GraphMorphism {
            vertex_map,
            edge_map,
        };
        m.check(src, dst)?;
        Ok(m)
    }

    /// The labelling map onto the wedge of circles.
    pub fn to_wedge(g: &LabeledGraph) -> Self {
        GraphMorphism {
            vertex_map: vec![0; g.num_vertices],
            edge_map: g.edges.iter().map(|e| e.label).collect(),
        }
    }

    /// Based immersion of a connected based graph into an immersed based graph, following labels.
    pub fn by_labels(src: &LabeledGraph, dst: &LabeledGraph) -> Result<Self, GraphError> {
        let sb = src.basepoint.ok_or(GraphError::NoBasepoint)?;
        let db = dst.basepoint.ok_or(GraphError::NoBasepoint)?;
        let t = dst.transitions()?;
        let tree = src.spanning_tree(sb);
        if tree.order.len() != src.num_vertices {
            return Err(GraphError::Disconnected);
        }
        let mut vmap = vec![0; src.num_vertices];
        for &v in &tree.order {
            let p = tree.path[v].as_ref().expect("reached");
            vmap[v] = t.trace(db, p).ok_or_else(|| {
                GraphError::NotMorphism(format!("path to vertex {v} does not lift"))
            })?;
        }
        GraphMorphism::from_vertex_map(src, dst, vmap)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphMorphism) -> GraphMorphism {
        GraphMorphism {
            vertex_map: self
                .vertex_map
                .iter()
                .map(|&v| other.vertex_map[v])
                .collect(),
            edge_map: self.edge_map.iter().map(|&e| other.edge_map[e]).collect(),
        }
    }

    pub fn identity(g: &LabeledGraph) -> Self {
        GraphMorphism {
            vertex_map: (0..g.num_vertices).collect(),
            edge_map: (0..g.num_edges()).collect(),
        }
    }
}

/// Label text: letters for small alphabets, one-based integers otherwise.
fn label_json(n: usize, label: usize) -> Value {
    if n <= 26 {
        Value::String(((b'a' + label as u8) as char).to_string())
    } else {
        Value::from(label + 1)
    }
}

fn parse_label(n: usize, v: &Value) -> Result<usize, GraphError> {
    let bad = || GraphError::Json(format!("bad edge label {v}"));
    let label = match v {
        Value::String(s) => {
            let mut cs = s.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => c as usize - 'a' as usize,
                _ => return Err(bad()),
            }
        }
        Value::Number(x) => (x.as_u64().filter(|&x| x >= 1).ok_or_else(bad)? - 1) as usize,
        _ => return Err(bad()),
    };
    if label >= n {
        return Err(GraphError::Json(format!(
            "label {v} outside alphabet of size {n}"
        )));
    }
    Ok(label)
}

/// On-disk graph: vertex ids may be any JSON scalars.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub vertices: Vec<Value>,
    pub edges: Vec<(Value, Value, Value)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Value>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<LabeledGraph, GraphError> {
        let mut ids = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if ids.insert(v.to_string(), i).is_some() {
                return Err(GraphError::Json(format!("duplicate vertex {v}")));
            }
        }
        let lookup = |v: &Value| {
            ids.get(&v.to_string())
                .copied()
                .ok_or_else(|| GraphError::Json(format!("unknown vertex {v}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|(s, d, l)| {
                Ok(Edge {
                    src: lookup(s)?,
                    dst: lookup(d)?,
                    label: parse_label(self.n, l)?,
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let basepoint = self.basepoint.as_ref().map(lookup).transpose()?;
        LabeledGraph::new(self.n, self.vertices.len(), edges, basepoint)
    }

    pub fn from_graph(g: &LabeledGraph) -> Self {
        GraphJson {
            n: g.n,
            vertices: (0..g.num_vertices).map(Value::from).collect(),
            edges: g
                .edges
                .iter()
                .map(|e| {
                    (
                        Value::from(e.src),
                        Value::from(e.dst),
                        label_json(g.n, e.label),
                    )
                })
                .collect(),
            basepoint: g.basepoint.map(Value::from),
        }
    }
}

impl Serialize for LabeledGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson::from_graph(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GraphJson::deserialize(d)?
            .to_graph()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: usize, dst: usize, label: usize) -> Edge {
        Edge { src, dst, label }
    }

    #[test]
    fn rank_and_core() {
        // a triangle with a pendant path
        let g = LabeledGraph::new(
            2,
            5,
            vec![e(0, 1, 0), e(1, 2, 1), e(2, 0, 0), e(2, 3, 1), e(3, 4, 0)],
            Some(0),
        )
        .unwrap();
        assert_eq!(g.rank(), 1);
        let (c, _) = g.core();
        assert_eq!(c.num_vertices(), 3);
        assert!(c.is_core().is_ok());
        assert_eq!(g.is_core(), Err(GraphError::NotCore(4)));
    }

    #[test]
    fn basis_reads_loops() {
        let g = LabeledGraph::new(2, 2, vec![e(0, 1, 0), e(1, 0, 1), e(0, 1, 1)], Some(0)).unwrap();
        let basis = g.cycle_basis(0).unwrap();
        let t = g.transitions().unwrap();
        assert_eq!(basis.len(), g.rank());
        for w in &basis {
            assert_eq!(t.trace(0, w), Some(0));
        }
    }

    #[test]
    fn json_round_trip() {
        let text =
            r#"{"n":2,"vertices":["x","y"],"edges":[["x","y","a"],["y","x","b"]],"basepoint":"y"}"#;
        let g: LabeledGraph = serde_json::from_str(text).unwrap();
        assert_eq!(g.basepoint(), Some(1));
        let back: LabeledGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<LabeledGraph>(
            r#"{"n":1,"vertices":[0],"edges":[[0,0,"b"]]}"#
        )
        .is_err());
    }

    #[test]
    fn canonical_code_ignores_numbering() {
        let g = LabeledGraph::new(1, 3, vec![e(0, 1, 0), e(1, 2, 0), e(2, 0, 0)], None).unwrap();
        let h = LabeledGraph::new(1, 3, vec![e(2, 1, 0), e(1, 0, 0), e(0, 2, 0)], None).unwrap();
        assert_eq!(g.canonical_code(), h.canonical_code());
    }
}
