//! The group ring `(Z/p)[t]/(1 - t^p)` and maps between its free modules.

use std::fmt;

use serde::Serialize;

use crate::linalg::{FpMatrix, LinalgError};

/// Element `sum c_k t^k` of the group ring of `Z/p` over `Z/p`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RingElem {
    p: u64,
    coeffs: Vec<u64>,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl RingElem {
    pub fn zero(p: u64) -> Self {
        RingElem {
            p,
            coeffs: vec![0; p as usize],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::monomial(p, 0, 1)
    }

    pub fn monomial(p: u64, k: u64, c: u64) -> Self {
        let mut e = Self::zero(p);
        e.coeffs[(k % p) as usize] = c % p;
        e
    }

    pub fn from_coeffs(p: u64, coeffs: &[u64]) -> Self {
        let mut e = Self::zero(p);
        for (k, &c) in coeffs.iter().enumerate() {
            let i = k % p as usize;
            e.coeffs[i] = (e.coeffs[i] + c) % p;
        }
        e
    }

    /// `1 - t`.
    pub fn one_minus_t(p: u64) -> Self {
        let mut e = Self::one(p);
        e.coeffs[1 % p as usize] = (e.coeffs[1 % p as usize] + p - 1) % p;
        e
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, o: &RingElem) -> RingElem {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        RingElem { p: self.p, coeffs }
    }

    pub fn mul(&self, o: &RingElem) -> RingElem {
        let p = self.p as usize;
        let mut out = vec![0u64; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[(i + j) % p] = (out[(i + j) % p] + a * b) % self.p;
            }
        }
        RingElem {
            p: self.p,
            coeffs: out,
        }
    }

    /// Image under `t ↦ 1`.
    pub fn augmentation(&self) -> u64 {
        self.coeffs.iter().sum::<u64>() % self.p
    }

    /// Solves `(1 - t) b = self` with `b_0 = 0`, if possible.
    pub fn div_one_minus_t(&self) -> Option<RingElem> {
        if self.augmentation() != 0 {
            return None;
        }
        let p = self.p;
        let mut b = vec![0u64; p as usize];
        for j in 1..p as usize {
            b[j] = (b[j - 1] + self.coeffs[j]) % p;
        }
        Some(RingElem { p, coeffs: b })
    }

    /// Largest `k` with `self ∈ (1 - t)^k R`; `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(next) = cur.div_one_minus_t() {
            k += 1;
            cur = next;
        }
        Some(k)
    }
}

/// Valuation of a vector in a free module: the minimum over coordinates.
pub fn vector_valuation(v: &[RingElem]) -> Option<u32> {
    v.iter().filter_map(RingElem::valuation).min()
}

/// A map `R^cols → R^rows` of free modules over the group ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleMap {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl ModuleMap {
    pub fn new(
        p: u64,
        rows: usize,
        cols: usize,
        entries: Vec<RingElem>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Dimension("entry count".into()));
        }
        FpMatrix::zeros(p, 0, 0)?;
        Ok(ModuleMap {
            p,
            rows,
            cols,
            entries,
        })
    }

    pub fn entry(&self, r: usize, c: usize) -> &RingElem {
        &self.entries[r * self.cols + c]
    }

    pub fn apply(&self, v: &[RingElem]) -> Vec<RingElem> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(RingElem::zero(self.p), |acc, c| {
                    acc.add(&self.entry(r, c).mul(&v[c]))
                })
            })
            .collect()
    }

    /// Matrix over `Z/p` obtained from `t ↦ 1`.
    pub fn specialization(&self) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.p, self.rows, self.cols).expect("prime checked");
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.entry(r, c).augmentation());
            }
        }
        m
    }

    /// The same map as a `Z/p`-linear map of dimension `p` times larger.
    pub fn expand(&self) -> FpMatrix {
        let p = self.p as usize;
        let mut m = FpMatrix::zeros(self.p, self.rows * p, self.cols * p).expect("prime checked");
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.entry(r, c);
                for j in 0..p {
                    for k in 0..p {
                        m.set(r * p + (j + k) % p, c * p + j, a.coeffs[k]);
                    }
                }
            }
        }
        m
    }

    pub fn is_injective(&self) -> bool {
        self.expand().is_injective()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_one_minus_t() {
        let p = 5;
        let b = RingElem::from_coeffs(p, &[0, 2, 1, 4, 3]);
        let a = RingElem::one_minus_t(p).mul(&b);
        assert_eq!(a.augmentation(), 0);
        let q = a.div_one_minus_t().unwrap();
        assert_eq!(RingElem::one_minus_t(p).mul(&q), a);
        assert!(RingElem::one(p).div_one_minus_t().is_none());
    }

    #[test]
    fn norm_element_has_top_valuation() {
        let p = 3;
        let norm = RingElem::from_coeffs(p, &[1, 1, 1]);
        assert_eq!(norm.valuation(), Some(2));
        assert_eq!(RingElem::one_minus_t(p).valuation(), Some(1));
        assert_eq!(RingElem::zero(p).valuation(), None);
    }

    #[test]
    fn expansion_matches_action() {
        let p = 3;
        let f = ModuleMap::new(p, 1, 1, vec![RingElem::one_minus_t(p)]).unwrap();
        assert!(!f.is_injective());
        assert_eq!(f.expand().rank(), 2);
        let g = ModuleMap::new(p, 1, 1, vec![RingElem::monomial(p, 1, 2)]).unwrap();
        assert!(g.is_injective());
    }
}
