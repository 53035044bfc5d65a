//! The primitive operations. Every numerical kernel in the crate goes through
//! these functions.

use rayon::prelude::*;

use super::work;
use super::{DenseVector, Descriptor, IndexMask, Semiring, SparseMatrix};
use crate::{Error, Result};

/// Below this many rows/indices per task, work stays on one thread.
const MIN_PAR_LEN: usize = 512;

/// Chunk length of the fixed reduction tree used by [`dot`].
pub const DOT_CHUNK: usize = 2048;

fn check_len(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { op, expected, found });
    }
    Ok(())
}

/// Raw view of a slice that several tasks write at pairwise distinct indices.
#[derive(Clone, Copy)]
struct DisjointSlice {
    ptr: *mut f64,
    len: usize,
}

// SAFETY: callers only write through `write`, and each index is written by at
// most one task (mask members are distinct by construction).
unsafe impl Send for DisjointSlice {}
unsafe impl Sync for DisjointSlice {}

impl DisjointSlice {
    fn new(s: &mut [f64]) -> Self {
        Self {
            ptr: s.as_mut_ptr(),
            len: s.len(),
        }
    }

    /// # Safety
    /// No other task may access index `i` concurrently.
    #[inline]
    unsafe fn get(&self, i: usize) -> f64 {
        assert!(i < self.len);
        *self.ptr.add(i)
    }

    /// # Safety
    /// No other task may access index `i` concurrently.
    #[inline]
    unsafe fn write(&self, i: usize, v: f64) {
        assert!(i < self.len);
        *self.ptr.add(i) = v;
    }
}

#[inline]
fn row_product<S: Semiring>(a: &SparseMatrix, row: usize, x: &[f64], ring: &S) -> f64 {
    let (cols, vals) = a.row(row);
    let mut acc = ring.zero();
    for (&c, &v) in cols.iter().zip(vals) {
        acc = ring.add(acc, ring.mul(v, x[c]));
    }
    acc
}

/// `y⟨mask⟩ = A·x` (or `Aᵀ·x` with [`Descriptor::transpose_matrix`]).
///
/// Only positions in `mask` are written; everything else in `y` keeps its
/// previous value. Without a mask every position is overwritten.
pub fn mxv<S: Semiring>(
    y: &mut DenseVector,
    mask: Option<&IndexMask>,
    a: &SparseMatrix,
    x: &DenseVector,
    ring: &S,
    desc: Descriptor,
) -> Result<()> {
    let (in_len, out_len) = if desc.transpose_matrix {
        (a.nrows(), a.ncols())
    } else {
        (a.ncols(), a.nrows())
    };
    check_len("mxv input", in_len, x.len())?;
    check_len("mxv output", out_len, y.len())?;
    if let Some(m) = mask {
        check_len("mxv mask", out_len, m.universe_size())?;
    }

    let xs = x.as_slice();
    let visits = match (desc.transpose_matrix, mask) {
        (false, None) => y
            .as_mut_slice()
            .par_iter_mut()
            .with_min_len(MIN_PAR_LEN)
            .enumerate()
            .map(|(i, yi)| {
                *yi = row_product(a, i, xs, ring);
                a.row_nnz(i)
            })
            .sum::<usize>(),
        (false, Some(m)) => {
            let out = DisjointSlice::new(y.as_mut_slice());
            m.members()
                .par_iter()
                .with_min_len(MIN_PAR_LEN)
                .map(|&i| {
                    // SAFETY: mask members are distinct.
                    unsafe { out.write(i, row_product(a, i, xs, ring)) };
                    a.row_nnz(i)
                })
                .sum::<usize>()
        }
        (true, mask) => transposed_scatter(y, mask, a, xs, ring),
    };
    work::add_nnz(visits as u64);
    Ok(())
}

// Sequential scatter over the rows of A; output row order is fixed, so the
// result is deterministic.
fn transposed_scatter<S: Semiring>(
    y: &mut DenseVector,
    mask: Option<&IndexMask>,
    a: &SparseMatrix,
    x: &[f64],
    ring: &S,
) -> usize {
    let ys = y.as_mut_slice();
    match mask {
        None => {
            ys.fill(ring.zero());
            for (r, c, v) in a.triplets() {
                ys[c] = ring.add(ys[c], ring.mul(v, x[r]));
            }
        }
        Some(m) => {
            for &i in m.members() {
                ys[i] = ring.zero();
            }
            for (r, c, v) in a.triplets() {
                if m.contains(c) {
                    ys[c] = ring.add(ys[c], ring.mul(v, x[r]));
                }
            }
        }
    }
    a.nnz()
}

fn dot_tree(x: &[f64], y: &[f64]) -> f64 {
    if x.len() <= DOT_CHUNK {
        return x.iter().zip(y).fold(0.0, |acc, (a, b)| acc + a * b);
    }
    let chunks = x.len().div_ceil(DOT_CHUNK);
    let mid = (chunks / 2) * DOT_CHUNK;
    let (lo, hi) = rayon::join(|| dot_tree(&x[..mid], &y[..mid]), || dot_tree(&x[mid..], &y[mid..]));
    lo + hi
}

/// `Σ x[i]·y[i]`.
///
/// Summation runs sequentially inside chunks of [`DOT_CHUNK`] elements and
/// chunk sums combine along a binary tree fixed by the vector length alone.
/// The result is therefore bit-identical for any thread count.
pub fn dot(x: &DenseVector, y: &DenseVector) -> Result<f64> {
    check_len("dot", x.len(), y.len())?;
    Ok(dot_tree(x.as_slice(), y.as_slice()))
}

/// `w = alpha·x + beta·y`.
pub fn waxpby(w: &mut DenseVector, alpha: f64, x: &DenseVector, beta: f64, y: &DenseVector) -> Result<()> {
    check_len("waxpby", w.len(), x.len())?;
    check_len("waxpby", w.len(), y.len())?;
    w.as_mut_slice()
        .par_iter_mut()
        .with_min_len(MIN_PAR_LEN)
        .zip(x.as_slice().par_iter().zip(y.as_slice()))
        .for_each(|(wi, (&xi, &yi))| *wi = alpha * xi + beta * yi);
    Ok(())
}

/// In-place form of [`waxpby`] where the output aliases the first operand:
/// `w = alpha·w + beta·y`.
pub fn waxpby_assign(w: &mut DenseVector, alpha: f64, beta: f64, y: &DenseVector) -> Result<()> {
    check_len("waxpby", w.len(), y.len())?;
    w.as_mut_slice()
        .par_iter_mut()
        .with_min_len(MIN_PAR_LEN)
        .zip(y.as_slice())
        .for_each(|(wi, &yi)| *wi = alpha * *wi + beta * yi);
    Ok(())
}

/// Runs `body` once for every member `i` of `mask`.
///
/// `body(i, out_i, [in_0[i], .., in_{N-1}[i]])` may read and overwrite the
/// output element at `i` and sees the inputs at `i` only. Members may run in
/// any order and concurrently.
pub fn apply_masked<const N: usize, F>(
    mask: &IndexMask,
    out: &mut DenseVector,
    inputs: [&DenseVector; N],
    body: F,
) -> Result<()>
where
    F: Fn(usize, &mut f64, [f64; N]) + Sync,
{
    let n = mask.universe_size();
    check_len("apply_masked", n, out.len())?;
    for v in &inputs {
        check_len("apply_masked", n, v.len())?;
    }
    let target = DisjointSlice::new(out.as_mut_slice());
    mask.members().par_iter().with_min_len(MIN_PAR_LEN).for_each(|&i| {
        let vals = inputs.map(|v| v[i]);
        // SAFETY: mask members are distinct, so index i belongs to this task.
        unsafe {
            let mut cur = target.get(i);
            body(i, &mut cur, vals);
            target.write(i, cur);
        }
    });
    work::add_apply(mask.len() as u64);
    Ok(())
}

pub fn set_all(v: &mut DenseVector, value: f64) {
    v.as_mut_slice().fill(value);
}
