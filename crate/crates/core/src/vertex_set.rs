//! Sets of vertex ids.
//!
//! Sets whose ids are all below 64 are stored as a single `u64` bitmask; anything
//! larger falls back to a sorted id list. The representation is canonical, so two
//! sets compare equal exactly when they hold the same ids.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Mask(u64),
    List(Vec<usize>),
}

/// A finite set of vertex ids.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    repr: Repr,
}

impl Default for VertexSet {
    fn default() -> Self {
        Self::new()
    }
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet {
            repr: Repr::Mask(0),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        VertexSet {
            repr: Repr::Mask(mask),
        }
    }

    /// Builds a set from arbitrary ids; duplicates are ignored.
    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self::from_sorted(ids)
    }

    fn from_sorted(ids: Vec<usize>) -> Self {
        match ids.last() {
            Some(&max) if max >= 64 => VertexSet {
                repr: Repr::List(ids),
            },
            _ => VertexSet {
                repr: Repr::Mask(ids.iter().fold(0u64, |m, &i| m | (1u64 << i))),
            },
        }
    }

    /// Bitmask view, available when every id is below 64.
    pub fn mask(&self) -> Option<u64> {
        match &self.repr {
            Repr::Mask(m) => Some(*m),
            Repr::List(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Mask(m) => m.count_ones() as usize,
            Repr::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, id: usize) -> bool {
        match &self.repr {
            Repr::Mask(m) => id < 64 && m >> id & 1 == 1,
            Repr::List(v) => v.binary_search(&id).is_ok(),
        }
    }

    pub fn insert(&mut self, id: usize) {
        match &mut self.repr {
            Repr::Mask(m) if id < 64 => *m |= 1u64 << id,
            Repr::Mask(_) => {
                let mut ids = self.to_vec();
                ids.push(id);
                *self = Self::from_sorted(ids);
            }
            Repr::List(v) => {
                if let Err(pos) = v.binary_search(&id) {
                    v.insert(pos, id);
                }
            }
        }
    }

    pub fn remove(&mut self, id: usize) {
        match &mut self.repr {
            Repr::Mask(m) => {
                if id < 64 {
                    *m &= !(1u64 << id)
                }
            }
            Repr::List(v) => {
                if let Ok(pos) = v.binary_search(&id) {
                    v.remove(pos);
                    let ids = std::mem::take(v);
                    *self = Self::from_sorted(ids);
                }
            }
        }
    }

    /// Ids in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        match &self.repr {
            Repr::Mask(m) => Iter::Mask(*m),
            Repr::List(v) => Iter::List(v.iter()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max_id(&self) -> Option<usize> {
        match &self.repr {
            Repr::Mask(0) => None,
            Repr::Mask(m) => Some(63 - m.leading_zeros() as usize),
            Repr::List(v) => v.last().copied(),
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Mask(a), Repr::Mask(b)) => a & !b == 0,
            _ => self.iter().all(|i| other.contains(i)),
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        match (&self.repr, &other.repr) {
            (Repr::Mask(a), Repr::Mask(b)) => VertexSet::from_mask(a | b),
            _ => VertexSet::from_ids(self.iter().chain(other.iter())),
        }
    }

    /// `self \ other`.
    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        match (&self.repr, &other.repr) {
            (Repr::Mask(a), Repr::Mask(b)) => VertexSet::from_mask(a & !b),
            _ => VertexSet::from_sorted(self.iter().filter(|&i| !other.contains(i)).collect()),
        }
    }

    /// 0/1 indicator vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for i in self.iter() {
            if i < n {
                x[i] = 1.0;
            }
        }
        x
    }

    /// Ordering used for deterministic tie-breaks: smaller cardinality first, then
    /// lexicographic on the ascending id lists.
    pub fn cmp_size_lex(&self, other: &VertexSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

pub enum Iter<'a> {
    Mask(u64),
    List(std::slice::Iter<'a, usize>),
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Iter::Mask(m) => {
                if *m == 0 {
                    None
                } else {
                    let i = m.trailing_zeros() as usize;
                    *m &= *m - 1;
                    Some(i)
                }
            }
            Iter::List(it) => it.next().copied(),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        VertexSet::from_ids(iter)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
