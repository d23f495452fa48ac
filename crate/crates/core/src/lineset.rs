use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projgeom::GeometryTables;

/// A sorted, duplicate-free set of line indices of PG(3,q).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineSet {
    q: u32,
    lines: Vec<u32>,
}

impl LineSet {
    pub fn new(t: &GeometryTables, lines: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = lines.into_iter().collect();
        for &l in &v {
            t.check_line(l)?;
        }
        v.sort_unstable();
        v.dedup();
        Ok(LineSet { q: t.q(), lines: v })
    }

    /// Like [`LineSet::new`] but rejects repeated lines.
    pub fn new_distinct(t: &GeometryTables, lines: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = lines.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLine(w[0]));
        }
        Self::new(t, v)
    }

    pub fn empty(q: u32) -> Self {
        LineSet { q, lines: Vec::new() }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn lines(&self) -> &[u32] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn contains(&self, l: u32) -> bool {
        self.lines.binary_search(&l).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.lines.iter().copied()
    }

    /// Membership bitset over all lines of the geometry.
    pub fn membership(&self, t: &GeometryTables) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(t.num_lines());
        for &l in &self.lines {
            b.insert(l as usize);
        }
        b
    }

    pub fn union(&self, other: &LineSet) -> LineSet {
        let mut lines: Vec<u32> = self.lines.iter().chain(&other.lines).copied().collect();
        lines.sort_unstable();
        lines.dedup();
        LineSet { q: self.q, lines }
    }

    pub fn is_disjoint(&self, other: &LineSet) -> bool {
        !self.lines.iter().any(|&l| other.contains(l))
    }

    /// Image under a permutation of all line indices.
    pub fn image(&self, perm: &[u32]) -> LineSet {
        let mut lines: Vec<u32> = self.lines.iter().map(|&l| perm[l as usize]).collect();
        lines.sort_unstable();
        LineSet { q: self.q, lines }
    }
}

impl<'a> IntoIterator for &'a LineSet {
    type Item = &'a u32;
    type IntoIter = std::slice::Iter<'a, u32>;

    fn into_iter(self) -> Self::IntoIter {
        self.lines.iter()
    }
}
