//! Stallings folding and subgroup graphs.

use serde::Serialize;

use crate::graph::{Edge, GraphError, LabeledGraph, Transitions};
use crate::uf::UnionFind;
use crate::word::Word;

/// Folds a labelled graph until it is immersed.
///
/// Returns the folded graph and the quotient map on vertices. The result does
/// not depend on the order in which folds are performed.
pub fn fold(g: &LabeledGraph) -> (LabeledGraph, Vec<usize>) {
    let n = g.alphabet();
    let nv = g.num_vertices();
    let mut uf = UnionFind::new(nv);
    let mut adj: Vec<Vec<Option<usize>>> = vec![vec![None; 2 * n]; nv];
    let mut pending: Vec<(usize, usize)> = Vec::new();

    fn add(
        uf: &mut UnionFind,
        adj: &mut [Vec<Option<usize>>],
        pending: &mut Vec<(usize, usize)>,
        x: usize,
        li: usize,
        y: usize,
    ) {
        let x = uf.find(x);
        match adj[x][li] {
            Some(z) => {
                if !uf.same(z, y) {
                    pending.push((z, y));
                }
            }
            None => adj[x][li] = Some(y),
        }
    }

    for e in g.edges() {
        add(&mut uf, &mut adj, &mut pending, e.src, 2 * e.label, e.dst);
        add(
            &mut uf,
            &mut adj,
            &mut pending,
            e.dst,
            2 * e.label + 1,
            e.src,
        );
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (uf.find(a), uf.find(b));
            let Some(root) = uf.union(ra, rb) else {
                continue;
            };
            let other = if root == ra { rb } else { ra };
            let moved = std::mem::take(&mut adj[other]);
            for (li, t) in moved.into_iter().enumerate() {
                if let Some(t) = t {
                    add(&mut uf, &mut adj, &mut pending, root, li, t);
                }
            }
        }
    }

    let (labels, count) = uf.labels();
    let mut edges = Vec::new();
    for v in 0..nv {
        if uf.find(v) != v {
            continue;
        }
        for i in 0..n {
            if let Some(t) = adj[v][2 * i] {
                edges.push(Edge {
                    src: labels[v],
                    dst: labels[uf.find(t)],
                    label: i,
                });
            }
        }
    }
    edges.sort();
    let basepoint = g.basepoint().map(|b| labels[b]);
    let folded = LabeledGraph::new(n, count, edges, basepoint).expect("folding preserves validity");
    (folded, labels)
}

/// The bouquet of loops spelling the given words, before folding.
pub fn petal_graph(n: usize, gens: &[Word]) -> LabeledGraph {
    let mut edges = Vec::new();
    let mut nv = 1;
    for w in gens {
        let len = w.len();
        for (k, l) in w.letters().iter().enumerate() {
            let from = if k == 0 { 0 } else { nv + k - 1 };
            let to = if k + 1 == len { 0 } else { nv + k };
            let (src, dst) = if l.inv { (to, from) } else { (from, to) };
            edges.push(Edge {
                src,
                dst,
                label: l.gen as usize,
            });
        }
        nv += len.saturating_sub(1);
    }
    LabeledGraph::new(n, nv, edges, Some(0)).expect("petal graph is valid")
}

/// Immersed core graph of a finitely generated subgroup, based at the identity coset.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupGraph {
    pub graph: LabeledGraph,
    pub generators: Vec<Word>,
    #[serde(skip)]
    trans: Transitions,
}

impl SubgroupGraph {
    pub fn basepoint(&self) -> usize {
        self.graph.basepoint().expect("subgroup graphs are based")
    }

    pub fn transitions(&self) -> &Transitions {
        &self.trans
    }

    pub fn alphabet(&self) -> usize {
        self.graph.alphabet()
    }

    /// Builds the subgroup graph from an arbitrary based graph: fold, keep the base component, take the core.
    pub fn from_graph(g: &LabeledGraph) -> Result<Self, GraphError> {
        let b = g.basepoint().ok_or(GraphError::NoBasepoint)?;
        let (comp, _) = g.component_of(b);
        let (folded, _) = fold(&comp);
        let (core, _) = folded.core();
        let generators = core.cycle_basis(core.basepoint().expect("basepoint survives"))?;
        let trans = core.transitions()?;
        Ok(SubgroupGraph {
            graph: core,
            generators,
            trans,
        })
    }

    /// Wraps a graph that is already connected, immersed and core.
    pub fn from_core(g: LabeledGraph) -> Result<Self, GraphError> {
        let b = g.basepoint().ok_or(GraphError::NoBasepoint)?;
        g.is_core()?;
        let trans = g.transitions()?;
        let generators = g.cycle_basis(b)?;
        Ok(SubgroupGraph {
            graph: g,
            generators,
            trans,
        })
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.trans.trace(self.basepoint(), w) == Some(self.basepoint())
    }

    /// Free basis read off a spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        self.graph
            .cycle_basis(self.basepoint())
            .expect("subgroup graphs are connected")
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    /// Index in the ambient free group, if finite.
    pub fn index(&self) -> Option<usize> {
        let full = 2 * self.alphabet();
        self.graph
            .degrees()
            .iter()
            .all(|&d| d == full)
            .then_some(self.graph.num_vertices())
    }
}

/// Stallings graph of the subgroup generated by `gens` in the free group of rank `n`.
pub fn subgroup_graph(n: usize, gens: &[Word]) -> SubgroupGraph {
    let (folded, _) = fold(&petal_graph(n, gens));
    let (core, _) = folded.core();
    let trans = core.transitions().expect("folded graphs are immersed");
    SubgroupGraph {
        graph: core,
        generators: gens.to_vec(),
        trans,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &[&str]) -> Vec<Word> {
        s.iter().map(|x| Word::parse(2, x).unwrap()).collect()
    }

    #[test]
    fn figure_one_graph() {
        let h = subgroup_graph(2, &words(&["abABa", "b"]));
        assert_eq!(h.graph.num_vertices(), 5);
        assert_eq!(h.graph.edge_counts(), vec![3, 3]);
        assert_eq!(h.rank(), 2);
        assert!(h.contains(&Word::parse(2, "abABab").unwrap()));
        assert!(!h.contains(&Word::parse(2, "a").unwrap()));
    }

    #[test]
    fn trivial_and_whole_group() {
        let t = subgroup_graph(2, &[]);
        assert_eq!(t.graph.num_vertices(), 1);
        assert_eq!(t.rank(), 0);
        let f = subgroup_graph(2, &words(&["ab", "b"]));
        assert_eq!(f.index(), Some(1));
    }

    #[test]
    fn folding_collapses_backtracks() {
        let h = subgroup_graph(2, &words(&["aa", "aaa"]));
        assert_eq!(h.graph.num_vertices(), 1);
        assert_eq!(h.rank(), 1);
    }
}
