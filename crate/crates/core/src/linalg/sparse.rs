use crate::error::{Error, Result};
use crate::linalg::dense::Vector;

/// Sparse matrix in compressed-row (CSR) form.
///
/// Triplet lists are the construction and interchange format; the row-compressed
/// layout is what the hot loops see.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from `(row, col, value)` triplets.
    ///
    /// Rejects out-of-bounds indices, duplicate coordinates, and non-finite
    /// values. Explicit zeros are kept as stored entries.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "triplet ({r}, {c}) out of bounds for {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("sparse entry ({r}, {c})")));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate sparse coordinate ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &sorted {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (col_idx, values) = sorted.iter().map(|&(_, c, v)| (c, v)).unzip();
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Build directly from CSR arrays (the model-file interchange path).
    pub fn from_csr(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1
            || row_ptr.first() != Some(&0)
            || row_ptr.last() != Some(&values.len())
            || col_idx.len() != values.len()
        {
            return Err(Error::Dimension("inconsistent CSR arrays".into()));
        }
        for w in row_ptr.windows(2) {
            if w[0] > w[1] {
                return Err(Error::Dimension("CSR row pointers not monotone".into()));
            }
        }
        for r in 0..rows {
            let cols_here = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            for pair in cols_here.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::InvalidArgument(
                        "CSR columns must be strictly increasing within a row".into(),
                    ));
                }
            }
            if cols_here.iter().any(|&c| c >= cols) {
                return Err(Error::Dimension("CSR column index out of bounds".into()));
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("sparse values".into()));
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// CSR views for serialization.
    pub fn csr_parts(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.row_ptr, &self.col_idx, &self.values)
    }

    /// Recover the triplet interchange form (row-major order).
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push((r, self.col_idx[k], self.values[k]));
            }
        }
        out
    }

    /// Multiply every stored value by `c`.
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Sparse matrix–vector product `self · v`.
    pub fn spmv(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "spmv: {}x{} with vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(Vector::from_raw(self.spmv_slice(v.as_slice())))
    }

    pub(crate) fn spmv_slice(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.spmv_into(v, &mut out);
        out
    }

    pub(crate) fn spmv_into(&self, v: &[f64], out: &mut [f64]) {
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * v[self.col_idx[k]];
            }
            out[r] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    #[test]
    fn zero_matrix_annihilates() {
        let m = SparseMatrix::from_triplets(3, 2, &[]).unwrap();
        let v = Vector::new(vec![4.0, -1.0]).unwrap();
        assert_eq!(m.spmv(&v).unwrap().as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn sparse_identity_is_identity() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let v = Vector::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(m.spmv(&v).unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        let err = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.0)]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn out_of_bounds_rejected() {
        let err = SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn spmv_dimension_check() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(m.spmv(&Vector::zeros(2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn spmv_matches_dense_product() {
        // 5x5 at ~30% density against the brute-force dense product.
        let mut rng = testutil::rng(42);
        for _ in 0..25 {
            let (sparse, dense) = testutil::random_sparse_with_dense(&mut rng, 5, 5, 0.3);
            let v = testutil::random_vector(&mut rng, 5);
            let got = sparse.spmv(&v).unwrap();
            let want = testutil::dense_matvec(&dense, v.as_slice());
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-12, "got {g}, want {w}");
            }
        }
    }

    #[test]
    fn triplets_round_trip() {
        let t = vec![(0, 1, 2.5), (1, 0, -1.0), (2, 2, 0.5)];
        let m = SparseMatrix::from_triplets(3, 3, &t).unwrap();
        assert_eq!(m.triplets(), t);
        let (rp, ci, vals) = m.csr_parts();
        let m2 = SparseMatrix::from_csr(3, 3, rp.to_vec(), ci.to_vec(), vals.to_vec()).unwrap();
        assert_eq!(m, m2);
    }

    proptest::proptest! {
        #[test]
        fn spmv_equals_dense_product_on_arbitrary_instances(
            rows in 1usize..7,
            cols in 1usize..7,
            seed in proptest::num::u64::ANY,
            density in 0.0f64..1.0,
        ) {
            let mut rng = testutil::rng(seed);
            let (sparse, dense) = testutil::random_sparse_with_dense(&mut rng, rows, cols, density);
            let v = testutil::random_vector(&mut rng, cols);
            let got = sparse.spmv(&v).unwrap();
            let want = testutil::dense_matvec(&dense, v.as_slice());
            for (g, w) in got.iter().zip(&want) {
                proptest::prop_assert!((g - w).abs() <= 1e-12);
            }
        }
    }
}
