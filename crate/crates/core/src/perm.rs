//! Permutations and permutation groups enumerated by closure.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("images do not form a bijection")]
    NotBijection,
    #[error("group order exceeds the cap {0}")]
    TooLarge(usize),
    #[error("degrees differ ({0} vs {1})")]
    Degree(usize, usize),
}

/// A permutation of `0..n`, stored as its list of images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Debug)]
#[serde(transparent)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotBijection);
            }
            seen[i] = true;
        }
        Ok(Perm(images.into_iter().map(|i| i as u32).collect()))
    }

    /// The cyclic shift `i ↦ i + 1 mod n`.
    pub fn cycle(n: usize) -> Self {
        Perm((0..n as u32).map(|i| (i + 1) % n as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Perm::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut l = 1u64;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            l = l / crate::arith::gcd(l, len) * len;
        }
        l
    }

    /// Disjoint-union action on `0..n+m`.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let n = self.0.len() as u32;
        Perm(
            self.0
                .iter()
                .copied()
                .chain(other.0.iter().map(|&i| i + n))
                .collect(),
        )
    }
}

/// A finite permutation group with all its elements listed.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl PermGroup {
    /// Closes the generators under composition, failing once more than `cap` elements appear.
    pub fn generate(degree: usize, gens: &[Perm], cap: usize) -> Result<Self, PermError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(PermError::Degree(g.degree(), degree));
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elements.len() {
            for s in gens {
                let x = s.compose(&elements[i]);
                if !index.contains_key(&x) {
                    if elements.len() >= cap {
                        return Err(PermError::TooLarge(cap));
                    }
                    index.insert(x.clone(), elements.len());
                    elements.push(x);
                }
            }
            i += 1;
        }
        Ok(PermGroup {
            degree,
            elements,
            index,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, x: &Perm) -> bool {
        self.index.contains_key(x)
    }

    pub fn index_of(&self, x: &Perm) -> Option<usize> {
        self.index.get(x).copied()
    }
}

/// Base and strong generating set of a permutation group, built by the Schreier–Sims algorithm.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    base: Vec<usize>,
    /// `transversals[i][b]` maps `base[i]` to `b` and fixes the earlier base points.
    transversals: Vec<HashMap<usize, Perm>>,
}

impl StabilizerChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Result<Self, PermError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(PermError::Degree(g.degree(), degree));
        }
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = Vec::new();
        for g in &gens {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(first_moved(g));
            }
        }
        let mut levels: Vec<Vec<Perm>> = (0..base.len())
            .map(|i| {
                gens.iter()
                    .filter(|g| base[..i].iter().all(|&b| g.apply(b) == b))
                    .cloned()
                    .collect()
            })
            .collect();
        let mut transversals: Vec<HashMap<usize, Perm>> = (0..base.len())
            .map(|i| orbit_transversal(degree, base[i], &levels[i]))
            .collect();
        let mut i = base.len() as isize - 1;
        'outer: while i >= 0 {
            let iu = i as usize;
            let points: Vec<(usize, Perm)> = transversals[iu]
                .iter()
                .map(|(&b, u)| (b, u.clone()))
                .collect();
            for (beta, u_beta) in points {
                for gen in levels[iu].clone() {
                    let u1 = &transversals[iu][&gen.apply(beta)];
                    let g1 = gen.compose(&u_beta);
                    if &g1 == u1 {
                        continue;
                    }
                    let schreier = u1.inverse().compose(&g1);
                    let (h, j) = strip(&schreier, &base, &transversals);
                    let mut j = j;
                    if j == base.len() {
                        if h.is_identity() {
                            continue;
                        }
                        base.push(first_moved(&h));
                        levels.push(Vec::new());
                        transversals.push(HashMap::new());
                        j = base.len() - 1;
                    }
                    for l in iu + 1..=j {
                        levels[l].push(h.clone());
                        transversals[l] = orbit_transversal(degree, base[l], &levels[l]);
                    }
                    i = j as isize;
                    continue 'outer;
                }
            }
            i -= 1;
        }
        Ok(StabilizerChain { base, transversals })
    }

    pub fn order(&self) -> u128 {
        self.transversals.iter().map(|t| t.len() as u128).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, j) = strip(g, &self.base, &self.transversals);
        j == self.base.len() && h.is_identity()
    }
}

fn first_moved(g: &Perm) -> usize {
    (0..g.degree())
        .find(|&i| g.apply(i) != i)
        .expect("non-identity")
}

fn orbit_transversal(degree: usize, b: usize, gens: &[Perm]) -> HashMap<usize, Perm> {
    let mut t = HashMap::from([(b, Perm::identity(degree))]);
    let mut queue = vec![b];
    while let Some(x) = queue.pop() {
        let ux = t[&x].clone();
        for s in gens {
            let y = s.apply(x);
            if let std::collections::hash_map::Entry::Vacant(e) = t.entry(y) {
                e.insert(s.compose(&ux));
                queue.push(y);
            }
        }
    }
    t
}

/// Sifts `g` through the chain; returns the residue and the level where sifting stopped.
fn strip(g: &Perm, base: &[usize], transversals: &[HashMap<usize, Perm>]) -> (Perm, usize) {
    let mut h = g.clone();
    for (i, (&b, t)) in base.iter().zip(transversals).enumerate() {
        match t.get(&h.apply(b)) {
            Some(u) => h = u.inverse().compose(&h),
            None => return (h, i),
        }
    }
    (h, base.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_order() {
        let s = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        let c = Perm::cycle(4);
        assert_eq!(PermGroup::generate(4, &[s, c], 100).unwrap().order(), 24);
        assert!(PermGroup::generate(
            4,
            &[Perm::cycle(4), Perm::from_images(vec![1, 0, 2, 3]).unwrap()],
            10
        )
        .is_err());
    }

    #[test]
    fn compose_order() {
        let a = Perm::from_images(vec![1, 2, 0]).unwrap();
        let b = Perm::from_images(vec![1, 0, 2]).unwrap();
        assert_eq!(a.compose(&b).images(), &[2, 1, 0]);
        assert_eq!(a.order(), 3);
        assert!(a.pow(3).is_identity());
        assert_eq!(a.pow(-1), a.inverse());
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn chain_orders_match_enumeration() {
        let s = Perm::from_images(vec![1, 0, 2, 3, 4]).unwrap();
        let c = Perm::cycle(5);
        assert_eq!(
            StabilizerChain::new(5, &[s.clone(), c.clone()])
                .unwrap()
                .order(),
            120
        );
        let a = Perm::from_images(vec![1, 2, 0, 3, 4, 5]).unwrap();
        let b = Perm::from_images(vec![0, 1, 2, 4, 5, 3]).unwrap();
        let chain = StabilizerChain::new(6, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(chain.order(), 9);
        assert!(chain.contains(&a.compose(&b)));
        assert!(!chain.contains(&Perm::from_images(vec![1, 0, 2, 3, 4, 5]).unwrap()));
        assert_eq!(StabilizerChain::new(3, &[]).unwrap().order(), 1);
    }
}
