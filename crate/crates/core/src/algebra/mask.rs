use crate::{Error, Result};

/// Structural mask: a set of distinct indices below `universe_size`.
///
/// Only the pattern matters; there are no stored mask values. Members are
/// normally increasing; [`IndexMask::with_order`] keeps a caller-chosen
/// traversal order instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMask {
    universe_size: usize,
    members: Vec<usize>,
    sorted: bool,
}

impl IndexMask {
    /// Validates that `members` is strictly increasing and in range.
    pub fn new(universe_size: usize, members: Vec<usize>) -> Result<Self> {
        for (k, &m) in members.iter().enumerate() {
            if m >= universe_size || (k > 0 && members[k - 1] >= m) {
                return Err(Error::InvalidMask {
                    index: m,
                    universe: universe_size,
                });
            }
        }
        Ok(Self {
            universe_size,
            members,
            sorted: true,
        })
    }

    /// Keeps `members` in the given order; they must be distinct and in range.
    pub fn with_order(universe_size: usize, members: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; universe_size];
        for &m in &members {
            if m >= universe_size || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidMask {
                    index: m,
                    universe: universe_size,
                });
            }
        }
        let sorted = members.windows(2).all(|w| w[0] < w[1]);
        Ok(Self {
            universe_size,
            members,
            sorted,
        })
    }

    /// Sorts `indices` first; duplicates are still rejected.
    pub fn from_indices(universe_size: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        Self::new(universe_size, indices)
    }

    pub fn full(universe_size: usize) -> Self {
        Self {
            universe_size,
            members: (0..universe_size).collect(),
            sorted: true,
        }
    }

    pub fn empty(universe_size: usize) -> Self {
        Self {
            universe_size,
            members: Vec::new(),
            sorted: true,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    /// Members in traversal order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        if self.sorted {
            self.members.binary_search(&index).is_ok()
        } else {
            self.members.contains(&index)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(IndexMask::new(5, vec![0, 2, 4]).is_ok());
        assert!(IndexMask::new(5, vec![2, 0]).is_err());
        assert!(IndexMask::new(5, vec![1, 1]).is_err());
        assert!(IndexMask::new(5, vec![5]).is_err());
        assert_eq!(IndexMask::from_indices(5, vec![4, 0, 2]).unwrap().members(), &[0, 2, 4]);

        let shuffled = IndexMask::with_order(5, vec![4, 0, 2]).unwrap();
        assert_eq!(shuffled.members(), &[4, 0, 2]);
        assert!(shuffled.contains(0) && !shuffled.contains(1));
        assert!(IndexMask::with_order(5, vec![3, 3]).is_err());
        assert!(IndexMask::with_order(5, vec![6]).is_err());
    }
}
