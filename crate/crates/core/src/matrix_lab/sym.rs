use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Symmetric matrix stored as sorted sparse rows plus a constant added to
/// every entry: `X = S + c J` with `J` the all-ones matrix. The constant
/// term lets the centered adjacency matrix stay sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    rows: Vec<Vec<(u32, f64)>>,
    shift: f64,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
            shift: 0.0,
        }
    }

    /// Build from upper-triangle triplets `(i, j, s_ij)` with `i <= j`
    /// (no duplicates) and the constant `shift`.
    pub fn from_upper(n: usize, upper: &[(usize, usize, f64)], shift: f64) -> Result<Self> {
        let mut counts = vec![0usize; n];
        for &(i, j, _) in upper {
            if i > j || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "triplet ({i}, {j}) is not in the upper triangle of a {n}x{n} matrix"
                )));
            }
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut rows: Vec<Vec<(u32, f64)>> = counts.iter().map(|&c| Vec::with_capacity(c)).collect();
        for &(i, j, v) in upper {
            rows[i].push((j as u32, v));
            if i != j {
                rows[j].push((i as u32, v));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidParameter("duplicate triplet".into()));
            }
        }
        Ok(Self { n, rows, shift })
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidParameter("matrix is not square".into()));
        }
        let n = a.nrows();
        let mut upper = Vec::new();
        for i in 0..n {
            for j in i..n {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::InvalidParameter(format!("matrix is not symmetric at ({i}, {j})")));
                }
                if a[(i, j)] != 0.0 {
                    upper.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_upper(n, &upper, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Constant `c` in `X = S + c J`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Stored entries `(j, s_ij)` of row `i` of the sparse part.
    pub fn sparse_row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    /// Stored entries in the upper triangle, diagonal included.
    pub fn upper_nnz(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|e| e.0 as usize >= i).count())
            .sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(pos) => row[pos].1 + self.shift,
            Err(_) => self.shift,
        }
    }

    fn put(row: &mut Vec<(u32, f64)>, j: usize, v: f64) {
        match row.binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(pos) => row[pos].1 = v,
            Err(pos) => row.insert(pos, (j as u32, v)),
        }
    }

    /// Set `X_ij = X_ji = value`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = value - self.shift;
        Self::put(&mut self.rows[i], j, s);
        if i != j {
            Self::put(&mut self.rows[j], i, s);
        }
    }

    /// Multiply every stored off-diagonal entry of row and column `i` by `factor`.
    pub fn scale_offdiag(&mut self, i: usize, factor: f64) {
        let cols: Vec<usize> = self.rows[i]
            .iter()
            .map(|e| e.0 as usize)
            .filter(|&j| j != i)
            .collect();
        for j in cols {
            let v = self.get(i, j) * factor;
            self.set(i, j, v);
        }
    }

    /// `y = X x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let total = if self.shift != 0.0 { self.shift * x.iter().sum::<f64>() } else { 0.0 };
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = total;
            for &(j, v) in &self.rows[i] {
                acc += v * x[j as usize];
            }
            *yi = acc;
        });
    }

    /// `Y = X B` for a row-major `n × width` block `B`.
    pub fn matmat(&self, b: &[f64], width: usize, out: &mut [f64]) {
        let mut totals = vec![0.0; width];
        if self.shift != 0.0 {
            for row in b.chunks_exact(width) {
                totals.iter_mut().zip(row).for_each(|(t, x)| *t += x);
            }
            totals.iter_mut().for_each(|t| *t *= self.shift);
        }
        out.par_chunks_mut(width).enumerate().for_each(|(i, yi)| {
            yi.copy_from_slice(&totals);
            for &(j, v) in &self.rows[i] {
                let xj = &b[j as usize * width..(j as usize + 1) * width];
                yi.iter_mut().zip(xj).for_each(|(y, x)| *y += v * x);
            }
        });
    }

    /// `-X`.
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, -v)).collect())
                .collect(),
            shift: -self.shift,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `Σ_{j != i} X_ij²` for every `i`: squared column norms with the
    /// diagonal entry zeroed.
    pub fn offdiag_degrees(&self) -> Vec<f64> {
        self.column_norms(false)
    }

    /// `Σ_j X_ij²` for every `i`.
    pub fn full_degrees(&self) -> Vec<f64> {
        self.column_norms(true)
    }

    fn column_norms(&self, with_diagonal: bool) -> Vec<f64> {
        let c = self.shift;
        let implicit = if with_diagonal { self.n } else { self.n - 1 } as f64 * c * c;
        (0..self.n)
            .map(|i| {
                let mut acc = implicit;
                for &(j, s) in &self.rows[i] {
                    if with_diagonal || j as usize != i {
                        let x = s + c;
                        acc += x * x - c * c;
                    }
                }
                acc
            })
            .collect()
    }

    /// `‖X‖_F²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.full_degrees().iter().sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::from_element(self.n, self.n, self.shift);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, s) in row {
                a[(i, j as usize)] = s + self.shift;
            }
        }
        a
    }

    /// Bitwise check that every stored entry has an identical mirror.
    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter().all(|&(j, v)| {
                let mirror = &self.rows[j as usize];
                match mirror.binary_search_by_key(&(i as u32), |e| e.0) {
                    Ok(pos) => mirror[pos].1.to_bits() == v.to_bits(),
                    Err(_) => false,
                }
            })
        })
    }

    /// Every stored upper-triangle entry `(i, j, s_ij)` in row-major order.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |e| e.0 as usize >= i)
                .map(move |&(j, v)| (i, j as usize, v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SymMatrix {
        SymMatrix::from_upper(3, &[(0, 0, 1.0), (0, 2, -2.0), (1, 2, 0.5)], 0.25).unwrap()
    }

    #[test]
    fn dense_agrees_with_sparse_operations() {
        let a = small();
        let d = a.to_dense();
        let x = [0.3, -1.0, 2.0];
        let y = a.apply(&x);
        let yd = &d * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).abs() < 1e-15);
            let full: f64 = (0..3).map(|j| d[(i, j)] * d[(i, j)]).sum();
            assert!((a.full_degrees()[i] - full).abs() < 1e-14);
            assert!((a.offdiag_degrees()[i] - (full - d[(i, i)] * d[(i, i)])).abs() < 1e-14);
        }
        assert!((a.frobenius_sq() - d.norm_squared()).abs() < 1e-13);
        let block = [0.3, 1.0, -1.0, 0.5, 2.0, 0.0];
        let mut y2 = [0.0; 6];
        a.matmat(&block, 2, &mut y2);
        for c in 0..2 {
            let col: Vec<f64> = (0..3).map(|i| block[2 * i + c]).collect();
            let yc = a.apply(&col);
            for i in 0..3 {
                assert!((y2[2 * i + c] - yc[i]).abs() < 1e-15);
            }
        }
        let neg = a.negated().to_dense();
        assert_eq!(neg, -d);
    }

    #[test]
    fn set_and_scale_keep_symmetry() {
        let mut a = small();
        a.set(1, 0, 4.0);
        assert_eq!(a.get(0, 1), 4.0);
        a.scale_offdiag(0, 3.0);
        assert!((a.get(2, 0) - (-2.0 + 0.25) * 3.0).abs() < 1e-15);
        assert!((a.get(1, 0) - 12.0).abs() < 1e-15);
        assert_eq!(a.get(0, 0), 1.25);
        assert!(a.is_symmetric());
    }

    #[test]
    fn rejects_bad_triplets() {
        assert!(SymMatrix::from_upper(2, &[(1, 0, 1.0)], 0.0).is_err());
        assert!(SymMatrix::from_upper(2, &[(0, 1, 1.0), (0, 1, 2.0)], 0.0).is_err());
    }
}
