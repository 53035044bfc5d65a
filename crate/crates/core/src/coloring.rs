//! Greedy distance-1 coloring of a matrix's adjacency structure.
//!
//! Indices sharing a color have no stored entry between them, so Gauss–Seidel
//! updates inside one color are independent. On the HPCG stencil the greedy
//! sweep in natural order yields the eight parity classes of
//! `(ix mod 2, iy mod 2, iz mod 2)`.

use crate::algebra::{IndexMask, SparseMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    masks: Vec<IndexMask>,
}

impl Coloring {
    /// Wraps precomputed masks without checking them; see [`validate_coloring`].
    pub fn from_masks(masks: Vec<IndexMask>) -> Self {
        Self { masks }
    }

    pub fn num_colors(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[IndexMask] {
        &self.masks
    }

    /// Color of every index; `None` where no mask contains it.
    pub fn color_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (k, m) in self.masks.iter().enumerate() {
            for &i in m.members() {
                if i < n {
                    out[i] = Some(k);
                }
            }
        }
        out
    }
}

/// Visits rows in increasing order and gives each the smallest color not used
/// by an already-colored neighbour. The pattern of `A` and `Aᵀ` is united
/// first, so unsymmetric structures are handled too.
pub fn greedy_color(a: &SparseMatrix) -> Coloring {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "coloring needs a square matrix");
    let at = a.transpose_explicit();

    const UNCOLORED: usize = usize::MAX;
    let mut color = vec![UNCOLORED; n];
    // forbidden[c] == i marks color c as taken by a neighbour of row i.
    let mut forbidden: Vec<usize> = Vec::new();
    let mut num_colors = 0;
    for i in 0..n {
        for &j in a.row(i).0.iter().chain(at.row(i).0) {
            if j != i && color[j] != UNCOLORED {
                forbidden[color[j]] = i;
            }
        }
        let c = (0..num_colors).find(|&c| forbidden[c] != i).unwrap_or(num_colors);
        if c == num_colors {
            num_colors += 1;
            forbidden.push(UNCOLORED);
        }
        color[i] = c;
    }

    let mut members = vec![Vec::new(); num_colors];
    for (i, &c) in color.iter().enumerate() {
        members[c].push(i);
    }
    let masks = members
        .into_iter()
        .map(|m| IndexMask::new(n, m).expect("indices pushed in increasing order"))
        .collect();
    Coloring { masks }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColoringVerdict {
    Valid,
    /// `index` belongs to no color.
    Uncovered {
        index: usize,
    },
    /// `index` appears in more than one color.
    Overlap {
        index: usize,
    },
    /// A mask was built for a different universe size.
    SizeMismatch {
        color: usize,
    },
    /// Stored entry `(row, col)` joins two indices of the same color.
    Conflict {
        row: usize,
        col: usize,
    },
}

impl ColoringVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ColoringVerdict::Valid)
    }
}

/// Checks that the masks partition `[0, n)` and that no stored off-diagonal
/// entry connects two indices of the same color. Reports the first violation.
pub fn validate_coloring(a: &SparseMatrix, coloring: &Coloring) -> ColoringVerdict {
    let n = a.nrows();
    let mut color = vec![None; n];
    for (k, m) in coloring.masks().iter().enumerate() {
        if m.universe_size() != n {
            return ColoringVerdict::SizeMismatch { color: k };
        }
        for &i in m.members() {
            if color[i].is_some() {
                return ColoringVerdict::Overlap { index: i };
            }
            color[i] = Some(k);
        }
    }
    if let Some(index) = color.iter().position(Option::is_none) {
        return ColoringVerdict::Uncovered { index };
    }
    for (row, col, _) in a.triplets() {
        if row != col && color[row] == color[col] {
            return ColoringVerdict::Conflict { row, col };
        }
    }
    ColoringVerdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_matrix, GridDims};

    fn path(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::build_from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn path_needs_two_colors() {
        let c = greedy_color(&path(3));
        assert_eq!(c.num_colors(), 2);
        assert_eq!(c.masks()[0].members(), &[0, 2]);
        assert_eq!(c.masks()[1].members(), &[1]);
    }

    #[test]
    fn diagonal_matrix_is_one_color() {
        let d = SparseMatrix::build_from_triplets(5, 5, (0..5).map(|i| (i, i, 1.0))).unwrap();
        let c = greedy_color(&d);
        assert_eq!(c.num_colors(), 1);
        assert_eq!(c.masks()[0].members(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn unsymmetric_pattern_is_symmetrized() {
        // Only (2, 0) is stored; 0 and 2 must still differ.
        let a = SparseMatrix::build_from_triplets(3, 3, [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let c = greedy_color(&a);
        let col = c.color_of(3);
        assert_ne!(col[0], col[2]);
        assert!(validate_coloring(&a, &c).is_valid());
        assert!(validate_coloring(&a.transpose_explicit(), &c).is_valid());
    }

    #[test]
    fn stencil_colors_are_parity_classes() {
        for n in [4, 6] {
            let g = GridDims::cube(n).unwrap();
            let a = build_matrix(g);
            let c = greedy_color(&a);
            assert_eq!(c.num_colors(), 8);
            for (i, color) in c.color_of(g.len()).into_iter().enumerate() {
                let (x, y, z) = g.coords(i);
                assert_eq!(color, Some((x % 2) + 2 * (y % 2) + 4 * (z % 2)));
            }
            assert!(validate_coloring(&a, &c).is_valid());
        }
    }

    #[test]
    fn invalid_colorings_are_reported() {
        let p = path(3);
        let one = Coloring::from_masks(vec![IndexMask::full(3)]);
        assert_eq!(
            validate_coloring(&p, &one),
            ColoringVerdict::Conflict { row: 0, col: 1 }
        );

        let none = Coloring::from_masks(vec![]);
        assert_eq!(validate_coloring(&p, &none), ColoringVerdict::Uncovered { index: 0 });

        let twice = Coloring::from_masks(vec![IndexMask::full(3), IndexMask::new(3, vec![1]).unwrap()]);
        assert_eq!(validate_coloring(&p, &twice), ColoringVerdict::Overlap { index: 1 });

        let wrong = Coloring::from_masks(vec![IndexMask::full(4)]);
        assert_eq!(
            validate_coloring(&p, &wrong),
            ColoringVerdict::SizeMismatch { color: 0 }
        );
    }
}
