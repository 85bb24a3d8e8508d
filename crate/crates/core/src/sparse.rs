//! Minimal compressed sparse row matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub rows: usize,
    pub cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut count = vec![0usize; rows + 1];
        for &(i, _, _) in triplets {
            count[i + 1] += 1;
        }
        for i in 0..rows {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut tmp = vec![(0usize, 0.0); triplets.len()];
        for &(i, j, x) in triplets {
            tmp[fill[i]] = (j, x);
            fill[i] += 1;
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        for i in 0..rows {
            let row = &mut tmp[count[i]..count[i + 1]];
            row.sort_by_key(|e| e.0);
            let start = indices.len();
            for &(j, x) in row.iter() {
                if indices.len() > start && *indices.last().unwrap() == j {
                    *values.last_mut().unwrap() += x;
                } else {
                    indices.push(j);
                    values.push(x);
                }
            }
            indptr.push(indices.len());
        }
        Csr { rows, cols, indptr, indices, values }
    }

    pub fn identity(n: usize) -> Self {
        Csr { rows: n, cols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            *yi = self.row(i).map(|(j, a)| a * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: x.len() });
        }
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        Ok(y)
    }

    pub fn transpose(&self) -> Csr {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            t.extend(self.row(i).map(|(j, x)| (j, i, x)));
        }
        Csr::from_triplets(self.cols, self.rows, &t)
    }

    pub fn matmul(&self, b: &Csr) -> Result<Csr> {
        if self.cols != b.rows {
            return Err(Error::Dimension { expected: self.cols, got: b.rows });
        }
        let mut t = Vec::new();
        let mut acc = vec![0.0; b.cols];
        let mut mark = vec![usize::MAX; b.cols];
        let mut touched = Vec::new();
        for i in 0..self.rows {
            touched.clear();
            for (k, a) in self.row(i) {
                for (j, x) in b.row(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * x;
                }
            }
            touched.sort_unstable();
            t.extend(touched.iter().map(|&j| (i, j, acc[j])));
        }
        Ok(Csr::from_triplets(self.rows, b.cols, &t))
    }

    /// `Pᵀ A P`.
    pub fn galerkin(&self, p: &Csr) -> Result<Csr> {
        p.transpose().matmul(&self.matmul(p)?)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, x) in self.row(i) {
                row[j] = x;
            }
        }
        d
    }
}
