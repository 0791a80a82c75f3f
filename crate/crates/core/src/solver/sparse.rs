//! Symmetric sparse storage for assembly and a profile (skyline) LDL^T
//! factorization with reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Compressed sparse rows with a fixed pattern; both triangles are stored.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Pattern of the union of dense element blocks.
    pub fn from_blocks<'a>(n: usize, blocks: impl Iterator<Item = &'a [usize]>) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for dofs in blocks {
            for &i in dofs {
                rows[i].extend_from_slice(dofs);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map(|k| self.values[k]).unwrap_or(0.0)
    }

    pub fn add_block(&mut self, dofs: &[usize], ke: &DMatrix<f64>) {
        for (a, &i) in dofs.iter().enumerate() {
            let start = self.row_ptr[i];
            let row = &self.col_idx[start..self.row_ptr[i + 1]];
            for (b, &j) in dofs.iter().enumerate() {
                let k = start
                    + row
                        .binary_search(&j)
                        .expect("entry outside the assembled pattern");
                self.values[k] += ke[(a, b)];
            }
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }

    /// Largest |A_ij - A_ji| relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut big: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                big = big.max(self.values[k].abs());
                worst = worst.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        if big > 0.0 {
            worst / big
        } else {
            0.0
        }
    }
}

/// Reverse Cuthill-McKee ordering of the graph given by adjacency lists.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let degree = |i: usize| adj[i].len();
    let bfs_last = |start: usize, visited: &[bool]| {
        let mut seen = visited.to_vec();
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(v) = q.pop_front() {
            last = v;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        last
    };
    loop {
        // lowest-degree unvisited vertex, then hop to a pseudo-peripheral one
        let Some(seed) = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree(i), i))
        else {
            break;
        };
        let start = bfs_last(bfs_last(seed, &visited), &visited);
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = q.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| (degree(w), w));
            for w in nb {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// LDL^T factor of a symmetric matrix in variable-band (profile) storage.
#[derive(Debug, Clone)]
pub struct SkylineLdl {
    n: usize,
    /// perm[new] = old index in the reduced system.
    perm: Vec<usize>,
    first: Vec<usize>,
    ptr: Vec<usize>,
    data: Vec<f64>,
    d: Vec<f64>,
}

impl SkylineLdl {
    /// Factor the submatrix of `a` on the rows/columns listed in `free`.
    pub fn factor(a: &CsrMatrix, free: &[usize]) -> Result<Self> {
        let n = free.len();
        let mut local = vec![usize::MAX; a.n];
        for (k, &g) in free.iter().enumerate() {
            local[g] = k;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, &g) in free.iter().enumerate() {
            for p in a.row_ptr[g]..a.row_ptr[g + 1] {
                let l = local[a.col_idx[p]];
                if l != usize::MAX && l != k {
                    adj[k].push(l);
                }
            }
        }
        let perm = reverse_cuthill_mckee(&adj);
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = iperm[old];
            for &o in &adj[old] {
                let j = iperm[o];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            ptr.push(ptr[i] + (i - first[i] + 1));
        }
        let mut data = vec![0.0; ptr[n]];
        let mut diag_scale: f64 = 0.0;
        for (old, &g) in free.iter().enumerate() {
            let i = iperm[old];
            for p in a.row_ptr[g]..a.row_ptr[g + 1] {
                let l = local[a.col_idx[p]];
                if l == usize::MAX {
                    continue;
                }
                let j = iperm[l];
                if j <= i {
                    data[ptr[i] + (j - first[i])] += a.values[p];
                }
            }
            diag_scale = diag_scale.max(data[ptr[i] + (i - first[i])].abs());
        }

        let mut d = vec![0.0; n];
        for i in 0..n {
            let fi = first[i];
            let row_i = ptr[i];
            // g_ij = a_ij - sum_k g_ik l_jk, stored in row i
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[row_i + (j - fi)];
                let ri = row_i + (k0 - fi);
                let rj = ptr[j] + (k0 - fj);
                for k in 0..(j - k0) {
                    s -= data[ri + k] * data[rj + k];
                }
                data[row_i + (j - fi)] = s;
            }
            let mut di = data[row_i + (i - fi)];
            for j in fi..i {
                let g = data[row_i + (j - fi)];
                let l = g / d[j];
                data[row_i + (j - fi)] = l;
                di -= g * l;
            }
            if !(di.abs() > 1e-13 * diag_scale) {
                return Err(Error::Singular(format!(
                    "zero pivot at equation {} (global dof {}), pivot {di:e}",
                    i, free[perm[i]]
                )));
            }
            d[i] = di;
            data[row_i + (i - fi)] = 1.0;
        }
        Ok(SkylineLdl {
            n,
            perm,
            first,
            ptr,
            data,
            d,
        })
    }

    pub fn profile_len(&self) -> usize {
        self.data.len()
    }

    /// Number of negative pivots (matrix inertia).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    /// Solve with a right-hand side ordered like `free`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.ptr[i]..self.ptr[i + 1]];
            let mut s = y[i];
            for j in fi..i {
                s -= row[j - fi] * y[j];
            }
            y[i] = s;
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.ptr[i]..self.ptr[i + 1]];
            let yi = y[i];
            for j in fi..i {
                y[j] -= row[j - fi] * yi;
            }
        }
        let mut x = DVector::zeros(n);
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random SPD matrix assembled from overlapping 4x4 blocks along a 2D grid.
    fn random_system(seed: u64) -> (CsrMatrix, Vec<Vec<usize>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, ny) = (7, 5);
        let node = |i: usize, j: usize| i + j * (nx + 1);
        let n = (nx + 1) * (ny + 1);
        let mut blocks = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                blocks.push(vec![
                    node(i, j),
                    node(i + 1, j),
                    node(i + 1, j + 1),
                    node(i, j + 1),
                ]);
            }
        }
        let mut a = CsrMatrix::from_blocks(n, blocks.iter().map(|b| b.as_slice()));
        for b in &blocks {
            let m = DMatrix::from_fn(4, 4, |_, _| rng.random::<f64>() - 0.5);
            let ke = &m * m.transpose() + DMatrix::identity(4, 4) * 0.1;
            a.add_block(b, &ke);
        }
        (a, blocks)
    }

    #[test]
    fn ldl_matches_dense_lu() {
        let (a, _) = random_system(5);
        let free: Vec<usize> = (0..a.n).filter(|i| i % 7 != 3).collect();
        let f = SkylineLdl::factor(&a, &free).unwrap();
        let dense = a.to_dense().select_rows(&free).select_columns(&free);
        let b = DVector::from_fn(free.len(), |i, _| (i as f64 * 0.37).sin());
        let x = f.solve(&b);
        let x_ref = dense.clone().lu().solve(&b).unwrap();
        assert!((&x - &x_ref).norm() <= 1e-10 * x_ref.norm());
        assert_eq!(f.negative_pivots(), 0);
    }

    #[test]
    fn rcm_is_a_permutation_and_reduces_profile() {
        let (a, _) = random_system(9);
        let free: Vec<usize> = (0..a.n).collect();
        let f = SkylineLdl::factor(&a, &free).unwrap();
        let mut p = f.perm.clone();
        p.sort_unstable();
        assert_eq!(p, free);
        // natural ordering profile of this grid is (nx + 2) wide at most
        assert!(f.profile_len() <= a.n * 10);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = CsrMatrix::from_blocks(3, [vec![0usize, 1, 2]].iter().map(|b| b.as_slice()));
        a.add_block(&[0, 1, 2], &DMatrix::from_element(3, 3, 1.0));
        assert!(matches!(
            SkylineLdl::factor(&a, &[0, 1, 2]),
            Err(Error::Singular(_))
        ));
    }
}
