//! First homology of graphs with `Z/p` coefficients and induced maps.
//!
//! A basis of `H_1` comes from a spanning forest: each edge outside the
//! forest closes one cycle. A cycle's coordinates in this basis are its
//! values on those chords.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covers::{build_cover, CoverDescriptor, CoverError, CyclicCover};
use crate::graph::{GraphError, GraphMorphism, LabeledGraph};
use crate::linalg::{FpMatrix, LinalgError};
use crate::ring::{vector_valuation, RingElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("lift does not commute with the projections at {0}")]
    CommutativityViolation(String),
    #[error("no lift of the map to the given covers exists")]
    NoLift,
}

/// Cycle basis of a graph over `Z/p`.
#[derive(Clone, Debug, Serialize)]
pub struct CycleSpace {
    /// `|E| × b_1` matrix whose columns are the basis cycles.
    pub basis: FpMatrix,
    /// Edge closing each basis cycle, in column order.
    pub chords: Vec<usize>,
}

impl CycleSpace {
    pub fn dim(&self) -> usize {
        self.chords.len()
    }

    /// Coordinates of a cycle in this basis.
    pub fn coordinates(&self, z: &[u64]) -> Vec<u64> {
        self.chords.iter().map(|&c| z[c]).collect()
    }
}

/// Basis of `H_1(g; Z/p)` from a breadth-first spanning forest.
pub fn h1_basis(g: &LabeledGraph, p: u64) -> Result<CycleSpace, HomologyError> {
    FpMatrix::zeros(p, 0, 0)?;
    let nv = g.num_vertices();
    let ne = g.num_edges();
    let mut in_forest = vec![false; ne];
    // Signed edge chain of the forest path from the root to each vertex.
    let mut chain: Vec<Option<Vec<u64>>> = vec![None; nv];
    for root in 0..nv {
        if chain[root].is_some() {
            continue;
        }
        let t = g.spanning_tree(root);
        chain[root] = Some(vec![0; ne]);
        for &v in &t.order[1..] {
            let e = t.parent_edge[v].expect("non-root vertex has a parent");
            in_forest[e] = true;
            let edge = g.edges()[e];
            let (parent, sign) = if edge.dst == v {
                (edge.src, 1)
            } else {
                (edge.dst, p - 1)
            };
            let mut c = chain[parent].clone().expect("parents come first");
            c[e] = (c[e] + sign) % p;
            chain[v] = Some(c);
        }
    }
    let chords: Vec<usize> = (0..ne).filter(|&e| !in_forest[e]).collect();
    let columns: Vec<Vec<u64>> = chords
        .iter()
        .map(|&e| {
            let edge = g.edges()[e];
            let cs = chain[edge.src].as_ref().expect("all reached");
            let cd = chain[edge.dst].as_ref().expect("all reached");
            let mut z: Vec<u64> = (0..ne).map(|i| (cs[i] + p - cd[i]) % p).collect();
            z[e] = (z[e] + 1) % p;
            z
        })
        .collect();
    Ok(CycleSpace {
        basis: FpMatrix::from_columns(p, ne, &columns)?,
        chords,
    })
}

/// The boundary map `C_1 → C_0`.
pub fn boundary(g: &LabeledGraph, p: u64) -> Result<FpMatrix, HomologyError> {
    let mut m = FpMatrix::zeros(p, g.num_vertices(), g.num_edges())?;
    for (i, e) in g.edges().iter().enumerate() {
        if e.src != e.dst {
            m.set(e.dst, i, 1);
            m.set(e.src, i, p - 1);
        }
    }
    Ok(m)
}

/// Pushforward on 1-chains.
pub fn chain_map(
    f: &GraphMorphism,
    a: &LabeledGraph,
    x: &LabeledGraph,
    p: u64,
) -> Result<FpMatrix, HomologyError> {
    f.check(a, x)?;
    let mut m = FpMatrix::zeros(p, x.num_edges(), a.num_edges())?;
    for (i, &j) in f.edge_map.iter().enumerate() {
        m.set(j, i, (m.get(j, i) + 1) % p);
    }
    Ok(m)
}

/// Matrix of `f_*: H_1(A) → H_1(X)` in the forest bases.
pub fn induced_h1_map(
    f: &GraphMorphism,
    a: &LabeledGraph,
    x: &LabeledGraph,
    p: u64,
) -> Result<FpMatrix, HomologyError> {
    let ha = h1_basis(a, p)?;
    let hx = h1_basis(x, p)?;
    let push = chain_map(f, a, x, p)?.mul(&ha.basis)?;
    let columns: Vec<Vec<u64>> = (0..push.cols())
        .map(|c| hx.coordinates(&push.column(c)))
        .collect();
    Ok(FpMatrix::from_columns(p, hx.dim(), &columns)?)
}

/// Input to [`gersten_check`]: a map `f: X → Y` and cyclic covers of both ends.
#[derive(Clone, Debug, Deserialize)]
pub struct GerstenInput {
    pub x: LabeledGraph,
    pub y: LabeledGraph,
    pub f: GraphMorphism,
    pub p: u64,
    pub cocycle_x: Vec<u64>,
    pub cocycle_y: Vec<u64>,
    /// Lift `X̂ → Ŷ`; found automatically when absent.
    #[serde(default)]
    pub lift: Option<GraphMorphism>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GerstenReport {
    pub p: u64,
    pub base_rank_x: usize,
    pub base_rank_y: usize,
    pub base_map_rank: usize,
    pub cover_rank_x: usize,
    pub cover_rank_y: usize,
    pub lift_rank: usize,
    pub lift_injective: bool,
    /// `r` with `lift ∘ t = t^r ∘ lift`, if one exists.
    pub deck_exponent: Option<u64>,
    /// `(1 - t)`-valuations of each basis cycle of `X̂` and of its image, when `r = 1`.
    pub valuations: Vec<(Option<u32>, Option<u32>)>,
}

/// Finds a lift `X̂ → Ŷ` of `f`, trying deck exponents `1, ..., p-1` and then `0`.
pub fn find_lift(f: &GraphMorphism, cx: &CyclicCover, cy: &CyclicCover) -> Option<GraphMorphism> {
    let x = &cx.descriptor.base;
    let p = cx.descriptor.p;
    let (label, count) = x.components();
    let roots: Vec<usize> = (0..count)
        .map(|c| label.iter().position(|&l| l == c).expect("nonempty"))
        .collect();
    let rs: Vec<u64> = (1..p).chain([0]).collect();
    'r: for r in rs {
        let mut s = vec![0u64; x.num_vertices()];
        for &root in &roots {
            let t = x.spanning_tree(root);
            for &v in &t.order[1..] {
                let e = t.parent_edge[v].expect("non-root");
                let edge = x.edges()[e];
                let delta = (cy.descriptor.cocycle[f.edge_map[e]] + p * p
                    - r * cx.descriptor.cocycle[e])
                    % p;
                s[v] = if edge.dst == v {
                    (s[edge.src] + delta) % p
                } else {
                    (s[edge.dst] + p - delta) % p
                };
            }
        }
        for (e, edge) in x.edges().iter().enumerate() {
            let delta =
                (cy.descriptor.cocycle[f.edge_map[e]] + p * p - r * cx.descriptor.cocycle[e]) % p;
            if (s[edge.src] + delta) % p != s[edge.dst] {
                continue 'r;
            }
        }
        let pu = p as usize;
        let vertex_map = (0..cx.total.num_vertices())
            .map(|vk| {
                let (v, k) = (vk / pu, (vk % pu) as u64);
                f.vertex_map[v] * pu + ((s[v] + r * k) % p) as usize
            })
            .collect();
        let edge_map = (0..cx.total.num_edges())
            .map(|ek| {
                let (e, k) = (ek / pu, (ek % pu) as u64);
                f.edge_map[e] * pu + ((s[x.edges()[e].src] + r * k) % p) as usize
            })
            .collect();
        return Some(GraphMorphism {
            vertex_map,
            edge_map,
        });
    }
    None
}

fn deck_exponent(lift: &GraphMorphism, cx: &CyclicCover, cy: &CyclicCover) -> Option<u64> {
    (0..cx.descriptor.p).find(|&r| {
        let ty = |v: usize| (0..r).fold(v, |v, _| cy.deck.vertex_map[v]);
        let te = |e: usize| (0..r).fold(e, |e, _| cy.deck.edge_map[e]);
        (0..cx.total.num_vertices())
            .all(|v| lift.vertex_map[cx.deck.vertex_map[v]] == ty(lift.vertex_map[v]))
            && (0..cx.total.num_edges())
                .all(|e| lift.edge_map[cx.deck.edge_map[e]] == te(lift.edge_map[e]))
    })
}

/// Views a chain on a cyclic cover as a vector over the group ring.
fn as_module_vector(z: &[u64], base_edges: usize, p: u64) -> Vec<RingElem> {
    let pu = p as usize;
    (0..base_edges)
        .map(|e| RingElem::from_coeffs(p, &z[e * pu..(e + 1) * pu]))
        .collect()
}

/// Checks injectivity of the lifted map on `H_1` of the covers.
///
/// Requires `f_*` to be injective on `H_1(-; Z/p)`; fails otherwise.
pub fn gersten_check(input: &GerstenInput) -> Result<GerstenReport, HomologyError> {
    let p = input.p;
    input.f.check(&input.x, &input.y)?;
    let base = induced_h1_map(&input.f, &input.x, &input.y, p)?;
    if !base.is_injective() {
        return Err(HomologyError::PreconditionFailed(format!(
            "f_* has rank {} on H_1 of rank {}",
            base.rank(),
            base.cols()
        )));
    }
    let cx = build_cover(&CoverDescriptor::new(
        input.x.clone(),
        p,
        input.cocycle_x.clone(),
    )?);
    let cy = build_cover(&CoverDescriptor::new(
        input.y.clone(),
        p,
        input.cocycle_y.clone(),
    )?);
    let lift = match &input.lift {
        Some(l) => l.clone(),
        None => find_lift(&input.f, &cx, &cy).ok_or(HomologyError::NoLift)?,
    };
    lift.check(&cx.total, &cy.total)?;
    for v in 0..cx.total.num_vertices() {
        if cy.projection.vertex_map[lift.vertex_map[v]]
            != input.f.vertex_map[cx.projection.vertex_map[v]]
        {
            return Err(HomologyError::CommutativityViolation(format!("vertex {v}")));
        }
    }
    for e in 0..cx.total.num_edges() {
        if cy.projection.edge_map[lift.edge_map[e]] != input.f.edge_map[cx.projection.edge_map[e]] {
            return Err(HomologyError::CommutativityViolation(format!("edge {e}")));
        }
    }
    let lifted = induced_h1_map(&lift, &cx.total, &cy.total, p)?;
    let r = deck_exponent(&lift, &cx, &cy);
    let mut valuations = Vec::new();
    if r == Some(1) {
        let hx = h1_basis(&cx.total, p)?;
        let push = chain_map(&lift, &cx.total, &cy.total, p)?.mul(&hx.basis)?;
        for c in 0..hx.dim() {
            let zin = as_module_vector(&hx.basis.column(c), input.x.num_edges(), p);
            let zout = as_module_vector(&push.column(c), input.y.num_edges(), p);
            valuations.push((vector_valuation(&zin), vector_valuation(&zout)));
        }
    }
    Ok(GerstenReport {
        p,
        base_rank_x: input.x.rank(),
        base_rank_y: input.y.rank(),
        base_map_rank: base.rank(),
        cover_rank_x: cx.total.rank(),
        cover_rank_y: cy.total.rank(),
        lift_rank: lifted.rank(),
        lift_injective: lifted.is_injective(),
        deck_exponent: r,
        valuations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::subgroup_graph;
    use crate::word::Word;

    fn figure_one() -> LabeledGraph {
        let gens = [
            Word::parse(2, "abABa").unwrap(),
            Word::parse(2, "b").unwrap(),
        ];
        subgroup_graph(2, &gens).graph
    }

    #[test]
    fn cycle_basis_is_closed_and_spans() {
        let g = figure_one();
        for p in [2, 3, 5] {
            let h = h1_basis(&g, p).unwrap();
            assert_eq!(h.dim(), g.rank());
            let d = boundary(&g, p).unwrap().mul(&h.basis).unwrap();
            assert!(d.to_rows().iter().flatten().all(|&x| x == 0));
            assert_eq!(h.basis.rank(), h.dim());
        }
    }

    #[test]
    fn figure_one_maps_isomorphically() {
        let a = figure_one();
        let x = LabeledGraph::wedge(2);
        let f = GraphMorphism::to_wedge(&a);
        for p in [2, 3, 5, 7] {
            assert!(induced_h1_map(&f, &a, &x, p).unwrap().is_isomorphism());
        }
    }

    #[test]
    fn gersten_on_pulled_back_cover() {
        let a = figure_one();
        let x = LabeledGraph::wedge(2);
        let f = GraphMorphism::to_wedge(&a);
        let cocycle_x = vec![1, 0];
        let cocycle_a = f.edge_map.iter().map(|&e| cocycle_x[e]).collect();
        let input = GerstenInput {
            x: a,
            y: x,
            f,
            p: 2,
            cocycle_x: cocycle_a,
            cocycle_y: cocycle_x,
            lift: None,
        };
        let r = gersten_check(&input).unwrap();
        assert!(r.lift_injective);
        assert_eq!(r.deck_exponent, Some(1));
    }

    #[test]
    fn gersten_rejects_non_injective_base() {
        // a loop mapped twice around the circle kills H_1 mod 2
        let a = subgroup_graph(1, &[Word::parse(1, "aa").unwrap()]).graph;
        let x = LabeledGraph::wedge(1);
        let f = GraphMorphism::to_wedge(&a);
        let input = GerstenInput {
            x: a,
            y: x,
            f,
            p: 2,
            cocycle_x: vec![0, 0],
            cocycle_y: vec![0],
            lift: None,
        };
        assert!(matches!(
            gersten_check(&input),
            Err(HomologyError::PreconditionFailed(_))
        ));
    }
}
