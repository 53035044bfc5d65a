use std::io::Write;

use crate::{Error, Result};

/// Compressed sparse row matrix with explicit dimensions.
///
/// Rows hold strictly increasing column indices and no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from `(row, col, value)` triplets in any order.
    ///
    /// Duplicate coordinates are rejected rather than summed.
    pub fn build_from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= nrows || col >= ncols {
                return Err(Error::EntryOutOfRange { row, col, nrows, ncols });
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }

        let mut row_offsets = vec![0usize; nrows + 1];
        for &(r, _, _) in &entries {
            row_offsets[r + 1] += 1;
        }
        for i in 0..nrows {
            row_offsets[i + 1] += row_offsets[i];
        }
        let (col_indices, values) = entries.into_iter().map(|(_, c, v)| (c, v)).unzip();
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Wraps raw CSR arrays after checking every structural invariant.
    pub fn from_csr_parts(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedCsr(msg));
        if row_offsets.len() != nrows + 1 {
            return bad(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                nrows + 1
            ));
        }
        if row_offsets[0] != 0 {
            return bad("row_offsets[0] != 0".into());
        }
        if row_offsets[nrows] != col_indices.len() || col_indices.len() != values.len() {
            return bad(format!(
                "row_offsets[nrows] = {}, {} column indices, {} values",
                row_offsets[nrows],
                col_indices.len(),
                values.len()
            ));
        }
        for i in 0..nrows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return bad(format!("row_offsets decreases at row {i}"));
            }
            let cols = &col_indices[lo..hi];
            if let Some(&c) = cols.iter().find(|&&c| c >= ncols) {
                return Err(Error::EntryOutOfRange {
                    row: i,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            if let Some(w) = cols.windows(2).find(|w| w[0] >= w[1]) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateEntry { row: i, col: w[0] });
                }
                return bad(format!("columns of row {i} are not increasing"));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_offsets[row + 1] - self.row_offsets[row]
    }

    /// Column indices and values of one row.
    #[inline]
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[row], self.row_offsets[row + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at `(row, col)`, if any. Binary search within the row.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        if row >= self.nrows {
            return None;
        }
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).ok().map(|k| vals[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Materializes the transpose as a new CSR matrix (counting sort by column).
    pub fn transpose_explicit(&self) -> SparseMatrix {
        let mut row_offsets = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            row_offsets[c + 1] += 1;
        }
        for j in 0..self.ncols {
            row_offsets[j + 1] += row_offsets[j];
        }
        let mut next = row_offsets.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows are visited in increasing order, so each output row comes out sorted.
        for (r, c, v) in self.triplets() {
            let slot = next[c];
            col_indices[slot] = r;
            values[slot] = v;
            next[c] += 1;
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Writes the matrix as MatrixMarket `coordinate real general` text.
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_from_triplets() {
        let a = SparseMatrix::build_from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 1, 2]);
        assert_eq!(a.col_indices(), &[0, 1]);
        assert_eq!(a.values(), &[1.0, 1.0]);
    }

    #[test]
    fn triplets_are_sorted_by_column() {
        let a = SparseMatrix::build_from_triplets(1, 3, [(0, 2, 5.0), (0, 0, 3.0)]).unwrap();
        assert_eq!(a.row_offsets(), &[0, 2]);
        assert_eq!(a.col_indices(), &[0, 2]);
        assert_eq!(a.values(), &[3.0, 5.0]);
    }

    #[test]
    fn duplicate_triplet_is_rejected() {
        let err = SparseMatrix::build_from_triplets(2, 2, [(0, 0, 1.0), (0, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { row: 0, col: 0 }));
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = SparseMatrix::build_from_triplets(2, 2, [(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::EntryOutOfRange { row: 0, col: 2, .. }));
        let err = SparseMatrix::build_from_triplets(2, 2, [(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::EntryOutOfRange { row: 2, .. }));
    }

    #[test]
    fn csr_parts_validation() {
        assert!(SparseMatrix::from_csr_parts(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr_parts(1, 2, vec![0, 2], vec![0, 0], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr_parts(2, 2, vec![0, 2], vec![0, 1], vec![1.0, 2.0]).is_err());
        assert!(SparseMatrix::from_csr_parts(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0]).is_err());
        assert!(SparseMatrix::from_csr_parts(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn transpose_of_identity_and_row() {
        let i2 = SparseMatrix::build_from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(i2.transpose_explicit(), i2);

        let row = SparseMatrix::build_from_triplets(1, 2, [(0, 0, 3.0), (0, 1, 4.0)]).unwrap();
        let col = row.transpose_explicit();
        assert_eq!((col.nrows(), col.ncols()), (2, 1));
        assert_eq!(col.row_offsets(), &[0, 1, 2]);
        assert_eq!(col.values(), &[3.0, 4.0]);
    }

    #[test]
    fn get_and_matrix_market() {
        let a = SparseMatrix::build_from_triplets(2, 3, [(0, 1, 2.5), (1, 2, -1.0)]).unwrap();
        assert_eq!(a.get(0, 1), Some(2.5));
        assert_eq!(a.get(0, 0), None);
        assert_eq!(a.get(5, 0), None);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real general");
        assert_eq!(lines[1], "2 3 2");
        assert_eq!(lines[2], "1 2 2.5e0");
        assert_eq!(lines[3], "2 3 -1e0");
    }
}
