//! Fiber products over the wedge, intersections, malnormality and root closure.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, GraphError, GraphMorphism, LabeledGraph};
use crate::stallings::SubgroupGraph;
use crate::uf::UnionFind;
use crate::word::{Letter, Word};

/// Largest number of tuples explored by the root-closure test.
pub const MAX_PRODUCT_TUPLES: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiberError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("root exponent must be at least 2, got {0}")]
    BadExponent(usize),
    #[error("{vertices}^{l} tuples exceed the cap of {cap}")]
    TooLarge {
        vertices: usize,
        l: usize,
        cap: usize,
    },
    #[error("vertex ({0}, {1}) is not in the product")]
    NoSuchVertex(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub vertices: usize,
    pub edges: usize,
    pub edge_counts: Vec<usize>,
    pub rank: usize,
    pub is_tree: bool,
    pub diagonal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentStats {
    pub vertices: usize,
    pub edge_counts: Vec<usize>,
    pub diagonal_vertices: usize,
    pub diagonal_edge_counts: Vec<usize>,
    pub nondiagonal_edge_counts: Vec<usize>,
    pub components: Vec<ComponentInfo>,
}

/// The fiber product of two immersed graphs over the wedge.
///
/// Vertex `(a, b)` has index `a * right_vertices + b`.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub graph: LabeledGraph,
    pub left_vertices: usize,
    pub right_vertices: usize,
    pub component: Vec<usize>,
    pub num_components: usize,
    /// Set when both factors are the same graph.
    pub is_self_product: bool,
    pub to_left: GraphMorphism,
    pub to_right: GraphMorphism,
}

impl FiberProduct {
    pub fn vertex(&self, a: usize, b: usize) -> usize {
        a * self.right_vertices + b
    }

    pub fn pair(&self, v: usize) -> (usize, usize) {
        (v / self.right_vertices, v % self.right_vertices)
    }

    fn is_diagonal_vertex(&self, v: usize) -> bool {
        let (a, b) = self.pair(v);
        self.is_self_product && a == b
    }

    pub fn component_is_diagonal(&self, c: usize) -> bool {
        (0..self.graph.num_vertices()).any(|v| self.component[v] == c && self.is_diagonal_vertex(v))
    }

    pub fn stats(&self) -> ComponentStats {
        let n = self.graph.alphabet();
        let nc = self.num_components;
        let mut infos: Vec<ComponentInfo> = (0..nc)
            .map(|_| ComponentInfo {
                vertices: 0,
                edges: 0,
                edge_counts: vec![0; n],
                rank: 0,
                is_tree: true,
                diagonal: false,
            })
            .collect();
        let mut diagonal_vertices = 0;
        for v in 0..self.graph.num_vertices() {
            let c = &mut infos[self.component[v]];
            c.vertices += 1;
            if self.is_diagonal_vertex(v) {
                c.diagonal = true;
                diagonal_vertices += 1;
            }
        }
        let mut diagonal_edge_counts = vec![0; n];
        let mut nondiagonal_edge_counts = vec![0; n];
        for e in self.graph.edges() {
            let c = &mut infos[self.component[e.src]];
            c.edges += 1;
            c.edge_counts[e.label] += 1;
            if self.is_diagonal_vertex(e.src) {
                diagonal_edge_counts[e.label] += 1;
            } else {
                nondiagonal_edge_counts[e.label] += 1;
            }
        }
        for c in &mut infos {
            c.rank = c.edges + 1 - c.vertices;
            c.is_tree = c.rank == 0;
        }
        ComponentStats {
            vertices: self.graph.num_vertices(),
            edge_counts: self.graph.edge_counts(),
            diagonal_vertices,
            diagonal_edge_counts,
            nondiagonal_edge_counts,
            components: infos,
        }
    }
}

/// Fiber product without the core requirement on the factors.
pub fn product_over_wedge(a: &LabeledGraph, b: &LabeledGraph) -> Result<FiberProduct, FiberError> {
    if a.alphabet() != b.alphabet() {
        return Err(GraphError::AlphabetMismatch(a.alphabet(), b.alphabet()).into());
    }
    a.transitions()?;
    b.transitions()?;
    let n = a.alphabet();
    let nb = b.num_vertices();
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, e) in b.edges().iter().enumerate() {
        by_label[e.label].push(j);
    }
    let mut edges = Vec::new();
    let mut to_left = Vec::new();
    let mut to_right = Vec::new();
    for (i, ea) in a.edges().iter().enumerate() {
        for &j in &by_label[ea.label] {
            let eb = b.edges()[j];
            edges.push(Edge {
                src: ea.src * nb + eb.src,
                dst: ea.dst * nb + eb.dst,
                label: ea.label,
            });
            to_left.push(i);
            to_right.push(j);
        }
    }
    let nv = a.num_vertices() * nb;
    let basepoint = match (a.basepoint(), b.basepoint()) {
        (Some(x), Some(y)) => Some(x * nb + y),
        _ => None,
    };
    let graph = LabeledGraph::new(n, nv, edges, basepoint)?;
    let (component, num_components) = graph.components();
    let left = GraphMorphism {
        vertex_map: (0..nv).map(|v| v / nb.max(1)).collect(),
        edge_map: to_left,
    };
    let right = GraphMorphism {
        vertex_map: (0..nv).map(|v| v % nb.max(1)).collect(),
        edge_map: to_right,
    };
    Ok(FiberProduct {
        graph,
        left_vertices: a.num_vertices(),
        right_vertices: nb,
        component,
        num_components,
        is_self_product: a == b,
        to_left: left,
        to_right: right,
    })
}

/// Fiber product of two immersed core graphs over the wedge.
pub fn fiber_product(a: &LabeledGraph, b: &LabeledGraph) -> Result<FiberProduct, FiberError> {
    a.is_core()?;
    b.is_core()?;
    product_over_wedge(a, b)
}

/// The subgroup carried by the component of `(a, b)`.
///
/// Based at the basepoints this is the intersection of the two subgroups; at
/// other vertices it is an intersection of conjugates.
pub fn component_pi1(fp: &FiberProduct, a: usize, b: usize) -> Result<SubgroupGraph, FiberError> {
    if a >= fp.left_vertices || b >= fp.right_vertices {
        return Err(FiberError::NoSuchVertex(a, b));
    }
    let g = fp.graph.clone().with_basepoint(Some(fp.vertex(a, b)))?;
    Ok(SubgroupGraph::from_graph(&g)?)
}

/// `H ∩ K` as a subgroup graph.
pub fn intersection(h: &SubgroupGraph, k: &SubgroupGraph) -> Result<SubgroupGraph, FiberError> {
    let fp = product_over_wedge(&h.graph, &k.graph)?;
    component_pi1(&fp, h.basepoint(), k.basepoint())
}

/// Evidence that `conjugator^-1 * element * conjugator` lies in `H`
/// for a nontrivial `element` of `H` and a `conjugator` outside `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalnormalCertificate {
    pub conjugator: Word,
    pub element: Word,
    pub conjugate: Word,
}

#[derive(Clone, Debug, Serialize)]
pub struct MalnormalReport {
    pub malnormal: bool,
    pub certificate: Option<MalnormalCertificate>,
    pub stats: ComponentStats,
}

/// `H` is malnormal iff every off-diagonal component of `H ⊗ H` is a tree.
pub fn is_malnormal(h: &SubgroupGraph) -> Result<MalnormalReport, FiberError> {
    let fp = fiber_product(&h.graph, &h.graph)?;
    let stats = fp.stats();
    let bad = stats
        .components
        .iter()
        .position(|c| !c.diagonal && !c.is_tree);
    let certificate = match bad {
        None => None,
        Some(c) => {
            let v = (0..fp.graph.num_vertices())
                .find(|&v| fp.component[v] == c)
                .expect("nonempty component");
            let (x, y) = fp.pair(v);
            let loop_word = fp
                .graph
                .clone()
                .with_basepoint(Some(v))?
                .component_of(v)
                .0
                .cycle_basis(0)
                .map_err(FiberError::Graph)?
                .into_iter()
                .next()
                .expect("component is not a tree");
            let tree = h.graph.spanning_tree(h.basepoint());
            let u = tree.path[x].clone().expect("connected");
            let w = tree.path[y].clone().expect("connected");
            let element = loop_word.conjugate_by(&u);
            let conjugator = u.mul(&w.inverse());
            let conjugate = element.conjugate_by(&conjugator.inverse());
            let cert = MalnormalCertificate {
                conjugator,
                element,
                conjugate,
            };
            debug_assert!(
                h.contains(&cert.element)
                    && h.contains(&cert.conjugate)
                    && !h.contains(&cert.conjugator)
            );
            Some(cert)
        }
    };
    Ok(MalnormalReport {
        malnormal: certificate.is_none(),
        certificate,
        stats,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RootClosure {
    pub l: usize,
    pub closed: bool,
    /// A word `w` with `w^l` in `H` and `w` outside `H`.
    pub witness: Option<Word>,
}

/// Tests whether `w^l ∈ H` forces `w ∈ H`.
///
/// Uses the `l`-fold fiber product of the core graph with itself: `H` fails
/// the test iff some tuple with distinct first two entries lies in the same
/// component as its cyclic shift.
pub fn is_l_root_closed(h: &SubgroupGraph, l: usize) -> Result<RootClosure, FiberError> {
    if l < 2 {
        return Err(FiberError::BadExponent(l));
    }
    let v = h.graph.num_vertices();
    let total = (0..l)
        .try_fold(1usize, |acc, _| acc.checked_mul(v))
        .filter(|&t| t <= MAX_PRODUCT_TUPLES);
    let Some(total) = total else {
        return Err(FiberError::TooLarge {
            vertices: v,
            l,
            cap: MAX_PRODUCT_TUPLES,
        });
    };
    let n = h.alphabet();
    let t = h.transitions();
    let mut uf = UnionFind::new(total);
    let mut digits = vec![0usize; l];
    for code in 0..total {
        decode(code, v, &mut digits);
        for i in 0..n {
            if let Some(target) = step_tuple(t, &digits, Letter::pos(i as u16), v) {
                uf.union(code, target);
            }
        }
    }
    for code in 0..total {
        decode(code, v, &mut digits);
        if digits[0] == digits[1] {
            continue;
        }
        let shifted = encode((1..=l).map(|j| digits[j % l]), v);
        if uf.same(code, shifted) {
            let s = product_path(h, l, code, shifted);
            let tree = h.graph.spanning_tree(h.basepoint());
            let u = tree.path[digits[0]].clone().expect("connected");
            let w = s.conjugate_by(&u);
            debug_assert!(h.contains(&w.pow(l as i64)) && !h.contains(&w));
            return Ok(RootClosure {
                l,
                closed: false,
                witness: Some(w),
            });
        }
    }
    Ok(RootClosure {
        l,
        closed: true,
        witness: None,
    })
}

fn decode(mut code: usize, v: usize, digits: &mut [usize]) {
    for d in digits.iter_mut() {
        *d = code % v;
        code /= v;
    }
}

fn encode(digits: impl Iterator<Item = usize>, v: usize) -> usize {
    let ds: Vec<usize> = digits.collect();
    ds.iter().rev().fold(0, |acc, &d| acc * v + d)
}

fn step_tuple(
    t: &crate::graph::Transitions,
    digits: &[usize],
    l: Letter,
    v: usize,
) -> Option<usize> {
    let mut next = Vec::with_capacity(digits.len());
    for &d in digits {
        next.push(t.step(d, l)?);
    }
    Some(encode(next.into_iter(), v))
}

/// Label of a path between two tuples in the `l`-fold product.
fn product_path(h: &SubgroupGraph, l: usize, from: usize, to: usize) -> Word {
    let v = h.graph.num_vertices();
    let n = h.alphabet();
    let t = h.transitions();
    let mut prev: std::collections::HashMap<usize, (usize, Letter)> = Default::default();
    let mut queue = VecDeque::from([from]);
    let mut digits = vec![0usize; l];
    prev.insert(from, (from, Letter::pos(0)));
    while let Some(c) = queue.pop_front() {
        if c == to {
            break;
        }
        decode(c, v, &mut digits);
        for li in 0..2 * n {
            let letter = Letter::from_index(li);
            if let Some(d) = step_tuple(t, &digits, letter, v) {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(d) {
                    e.insert((c, letter));
                    queue.push_back(d);
                }
            }
        }
    }
    let mut letters = Vec::new();
    let mut c = to;
    while c != from {
        let (p, letter) = prev[&c];
        letters.push(letter);
        c = p;
    }
    letters.reverse();
    Word::from_letters(n, letters).expect("letters in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::subgroup_graph;

    fn sg(gens: &[&str]) -> SubgroupGraph {
        subgroup_graph(
            2,
            &gens
                .iter()
                .map(|g| Word::parse(2, g).unwrap())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn figure_one_counts() {
        let h = sg(&["abABa", "b"]);
        let fp = fiber_product(&h.graph, &h.graph).unwrap();
        let s = fp.stats();
        assert_eq!(s.vertices, 25);
        assert_eq!(s.edge_counts, vec![9, 9]);
        assert_eq!(s.nondiagonal_edge_counts, vec![6, 6]);
        assert!(is_malnormal(&h).unwrap().malnormal);
    }

    #[test]
    fn powers_are_not_malnormal() {
        let h = sg(&["aa"]);
        let r = is_malnormal(&h).unwrap();
        assert!(!r.malnormal);
        let c = r.certificate.unwrap();
        assert!(h.contains(&c.element) && h.contains(&c.conjugate) && !h.contains(&c.conjugator));
    }

    #[test]
    fn root_closure() {
        let h = sg(&["aa"]);
        let r = is_l_root_closed(&h, 2).unwrap();
        assert!(!r.closed);
        assert_eq!(r.witness.unwrap().to_string(), "a");
        assert!(is_l_root_closed(&h, 3).unwrap().closed);
        assert!(!is_l_root_closed(&sg(&["ababab"]), 3).unwrap().closed);
        assert!(is_l_root_closed(&sg(&["ababab"]), 2).unwrap().closed);
    }

    #[test]
    fn rejects_non_core() {
        let g = LabeledGraph::new(
            1,
            2,
            vec![Edge {
                src: 0,
                dst: 1,
                label: 0,
            }],
            Some(0),
        )
        .unwrap();
        assert!(matches!(
            fiber_product(&g, &g),
            Err(FiberError::Graph(GraphError::NotCore(1)))
        ));
    }
}
