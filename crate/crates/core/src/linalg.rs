//! Dense matrices over a prime field.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{inv_mod, is_prime, modp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix mod {} ({}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn from_rows(p: u64, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = FpMatrix::zeros(p, rows.len(), cols)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Dimension("ragged rows".into()));
            }
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, modp(x, p));
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(p: u64, rows: usize, columns: &[Vec<u64>]) -> Result<Self, LinalgError> {
        let mut m = FpMatrix::zeros(p, rows, columns.len())?;
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::Dimension("column length".into()));
            }
            for (r, &x) in col.iter().enumerate() {
                m.set(r, c, x % p);
            }
        }
        Ok(m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: u64) {
        self.data[r * self.cols + c] = x % self.p;
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.cols != other.rows || self.p != other.p {
            return Err(LinalgError::Dimension(format!(
                "{}x{} mod {} times {}x{} mod {}",
                self.rows, self.cols, self.p, other.rows, other.cols, other.p
            )));
        }
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols)?;
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let i = r * out.cols + c;
                    out.data[i] = (out.data[i] + a * other.get(k, c)) % self.p;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * v[c]).sum::<u64>() % self.p)
            .collect()
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            data: vec![0; self.data.len()],
        };
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for c in 0..m.cols {
                m.data.swap(row * m.cols + c, piv * m.cols + c);
            }
            let inv = inv_mod(m.get(row, col), p);
            for c in 0..m.cols {
                let x = m.get(row, c) * inv % p;
                m.set(row, c, x);
            }
            for r in 0..m.rows {
                let f = m.get(r, col);
                if r == row || f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let x = (m.get(r, c) + p * p - f * m.get(row, c)) % p;
                    m.set(r, c, x);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = (self.p - r.get(i, f)) % self.p;
                }
                v
            })
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_isomorphism(&self) -> bool {
        self.rows == self.cols && self.is_injective()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = FpMatrix::from_rows(3, &[vec![1, 2, 0], vec![2, 1, 0]]).unwrap();
        assert_eq!(m.rank(), 1);
        for v in m.kernel() {
            assert!(m.apply(&v).iter().all(|&x| x == 0));
        }
        assert_eq!(m.kernel().len(), 2);
        assert!(FpMatrix::zeros(4, 1, 1).is_err());
    }

    #[test]
    fn product() {
        let a = FpMatrix::from_rows(5, &[vec![1, 2], vec![3, 4]]).unwrap();
        let i = FpMatrix::identity(5, 2).unwrap();
        assert_eq!(a.mul(&i).unwrap(), a);
        assert_eq!(a.transpose().transpose(), a);
        assert!(a.is_isomorphism());
    }
}
