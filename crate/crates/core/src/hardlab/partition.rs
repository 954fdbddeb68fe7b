use serde::Serialize;

use crate::{Error, Result};

/// Row sets `ℒ_i` of the hard instance. Rows `l` are 1-based, nodes 0-based
/// (node 0 is the master).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionTable {
    m: usize,
    sets: Vec<Vec<usize>>,
    owner: Vec<Option<usize>>,
}

impl PartitionTable {
    /// `ℒ_1 = ∅`, `ℒ_i = { l ≤ m : l ≡ i-1 (mod n-1) }` for `2 ≤ i ≤ n`.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("the partition needs n >= 3, got {n}")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        let mut sets = vec![Vec::new(); n];
        for l in 1..=m {
            // node i (1-based) owns l when l ≡ i-1; i-1 ranges over 1..=n-1
            let r = (l - 1) % (n - 1) + 1;
            sets[r].push(l);
        }
        Self::custom(m, sets)
    }

    /// Arbitrary assignment, used to build deliberately broken instances.
    /// Only requires rows within a set to be at least 2 apart (so their
    /// `b_l` are orthogonal) and every row to have at most one owner.
    pub fn custom(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![None; m + 1];
        for (i, set) in sets.iter().enumerate() {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[1] - w[0] < 2 {
                    return Err(Error::InvalidParameter(format!("rows {} and {} of node {} are adjacent", w[0], w[1], i + 1)));
                }
            }
            for &l in set {
                if l == 0 || l > m {
                    return Err(Error::InvalidParameter(format!("row {l} outside 1..={m}")));
                }
                if owner[l].replace(i).is_some() {
                    return Err(Error::InvalidParameter(format!("row {l} has two owners")));
                }
            }
        }
        Ok(Self { m, sets, owner })
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Rows held by node `i` (0-based).
    pub fn rows(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Copy of every row set, for building modified partitions.
    pub fn rows_all(&self) -> Vec<Vec<usize>> {
        self.sets.clone()
    }

    /// 0-based node owning row `l` (1-based).
    pub fn owner(&self, l: usize) -> Option<usize> {
        self.owner.get(l).copied().flatten()
    }

    /// True when the sets cover `1..=m` exactly once and `ℒ_1` is empty.
    pub fn is_valid(&self) -> bool {
        self.sets[0].is_empty() && (1..=self.m).all(|l| self.owner(l).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_nodes_seven_rows() {
        let p = PartitionTable::new(3, 7).unwrap();
        assert!(p.rows(0).is_empty());
        assert_eq!(p.rows(1), &[1, 3, 5, 7]);
        assert_eq!(p.rows(2), &[2, 4, 6]);
        assert!(p.is_valid());
    }

    #[test]
    fn owners_cover_rows_once() {
        for (n, m) in [(3, 1), (4, 10), (5, 31), (12, 5)] {
            let p = PartitionTable::new(n, m).unwrap();
            let total: usize = (0..n).map(|i| p.rows(i).len()).sum();
            assert_eq!(total, m);
            for l in 1..=m {
                let o = p.owner(l).unwrap();
                assert!(o >= 1);
                assert_eq!((l - 1) % (n - 1), o - 1);
            }
        }
    }

    #[test]
    fn rejects_small_n_and_bad_custom() {
        assert!(PartitionTable::new(2, 5).is_err());
        assert!(PartitionTable::custom(4, vec![vec![1, 2], vec![3]]).is_err());
        assert!(PartitionTable::custom(4, vec![vec![1], vec![1, 3]]).is_err());
        let leaky = PartitionTable::custom(4, vec![vec![1], vec![3], vec![2, 4]]).unwrap();
        assert!(!leaky.is_valid());
    }
}
