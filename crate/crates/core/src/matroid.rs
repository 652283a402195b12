//! Oracle-backed matroids over the vertex ground set `{0, .., n-1}`.
//!
//! Four encodings are supported: uniform, partition, graphic (each ground element is
//! mapped to an edge of an auxiliary multigraph) and explicit (a downward-closed family
//! of bitmasks). Independence is the primitive; rank and greedy optimization are derived
//! from it.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::error::{input_err, Error, Result};
use crate::vertex_set::VertexSet;

/// Largest ground set for which graphic/explicit matroids keep a full rank table.
const RANK_TABLE_MAX: usize = 20;
/// Largest ground set for which explicit families are checked for the exchange axiom.
const EXCHANGE_CHECK_MAX: usize = 16;
/// Largest subset family enumerated by [`Matroid::subset_ranks`].
pub const ENUMERATION_MAX: usize = 24;
const EXPLICIT_FAMILY_MAX: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum MatroidKind {
    /// Sets of size at most `rank`.
    Uniform { rank: usize },
    /// At most `caps[b]` elements from block `b`.
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    /// Element `i` is the edge `edges[i]` of a multigraph on `node_count` nodes;
    /// a set is independent when its edges form a forest.
    Graphic {
        node_count: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Independent sets listed as bitmasks (closed downward at construction).
    Explicit { family: Vec<u64> },
}

#[derive(Debug)]
pub struct Matroid {
    ground_size: usize,
    kind: MatroidKind,
    block_of: Vec<usize>,
    family: HashSet<u64>,
    rank_table: OnceLock<Option<Vec<u8>>>,
}

impl Clone for Matroid {
    fn clone(&self) -> Self {
        Matroid {
            ground_size: self.ground_size,
            kind: self.kind.clone(),
            block_of: self.block_of.clone(),
            family: self.family.clone(),
            rank_table: OnceLock::new(),
        }
    }
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.ground_size == other.ground_size && self.kind == other.kind
    }
}

impl Matroid {
    fn build(ground_size: usize, kind: MatroidKind) -> Self {
        Matroid {
            ground_size,
            kind,
            block_of: Vec::new(),
            family: HashSet::new(),
            rank_table: OnceLock::new(),
        }
    }

    pub fn uniform(ground_size: usize, rank: usize) -> Result<Self> {
        if rank > ground_size {
            return input_err(format!("uniform rank {rank} exceeds ground size {ground_size}"));
        }
        Ok(Self::build(ground_size, MatroidKind::Uniform { rank }))
    }

    pub fn partition(ground_size: usize, blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return input_err(format!(
                "partition has {} blocks but {} caps",
                blocks.len(),
                caps.len()
            ));
        }
        let mut block_of = vec![usize::MAX; ground_size];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= ground_size {
                    return input_err(format!("partition block {b} holds element {i} outside ground set"));
                }
                if block_of[i] != usize::MAX {
                    return input_err(format!("element {i} appears in more than one partition block"));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return input_err(format!("element {i} is not covered by any partition block"));
        }
        let mut m = Self::build(ground_size, MatroidKind::Partition { blocks, caps });
        m.block_of = block_of;
        Ok(m)
    }

    pub fn graphic(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= node_count || b >= node_count {
                return input_err(format!("graphic element {i} maps to edge ({a},{b}) outside {node_count} nodes"));
            }
        }
        Ok(Self::build(edges.len(), MatroidKind::Graphic { node_count, edges }))
    }

    /// Explicit family; the given sets are closed downward. For ground sets of at most
    /// 16 elements the exchange axiom is verified exhaustively.
    pub fn explicit(ground_size: usize, sets: &[VertexSet]) -> Result<Self> {
        if ground_size > 64 {
            return input_err("explicit matroids support at most 64 elements");
        }
        let mut family: HashSet<u64> = HashSet::new();
        family.insert(0);
        for s in sets {
            if s.max_id().is_some_and(|m| m >= ground_size) {
                return input_err(format!("explicit set {s:?} leaves the ground set"));
            }
            let mask = s.mask().expect("ids below 64");
            if family.contains(&mask) {
                continue;
            }
            // every submask of `mask`
            let mut sub = mask;
            loop {
                family.insert(sub);
                if family.len() > EXPLICIT_FAMILY_MAX {
                    return Err(Error::Capacity {
                        what: "explicit family size",
                        size: family.len(),
                        limit: EXPLICIT_FAMILY_MAX,
                    });
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        let mut list: Vec<u64> = family.iter().copied().collect();
        list.sort_unstable_by_key(|&m| (m.count_ones(), m));
        let mut m = Self::build(ground_size, MatroidKind::Explicit { family: list });
        m.family = family;
        if ground_size <= EXCHANGE_CHECK_MAX {
            m.verify_exchange()?;
        }
        Ok(m)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    /// Rank-bounded blocks `(elements, cap)` for the uniform and partition encodings.
    pub(crate) fn blocks(&self) -> Option<Vec<(Vec<usize>, usize)>> {
        match &self.kind {
            MatroidKind::Uniform { rank } => Some(vec![((0..self.ground_size).collect(), *rank)]),
            MatroidKind::Partition { blocks, caps } => {
                Some(blocks.iter().cloned().zip(caps.iter().copied()).collect())
            }
            _ => None,
        }
    }

    fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.max_id() {
            Some(m) if m >= self.ground_size => input_err(format!(
                "vertex {m} outside matroid ground set of size {}",
                self.ground_size
            )),
            _ => Ok(()),
        }
    }

    pub fn is_independent(&self, s: &VertexSet) -> Result<bool> {
        self.check_set(s)?;
        let mut ext = self.extender();
        Ok(s.iter().all(|i| ext.try_add(i)))
    }

    /// Independence of a bitmask over the first 64 elements.
    pub(crate) fn independent_mask(&self, mask: u64) -> bool {
        match &self.kind {
            MatroidKind::Explicit { .. } => self.family.contains(&mask),
            _ => {
                let mut ext = self.extender();
                let mut m = mask;
                while m != 0 {
                    let i = m.trailing_zeros() as usize;
                    if !ext.try_add(i) {
                        return false;
                    }
                    m &= m - 1;
                }
                true
            }
        }
    }

    /// Rank by a greedy scan over `s` (or a table lookup for small ground sets).
    pub fn rank(&self, s: &VertexSet) -> Result<usize> {
        self.check_set(s)?;
        if let Some(mask) = s.mask() {
            return Ok(self.rank_mask(mask));
        }
        let mut ext = self.extender();
        Ok(s.iter().filter(|&i| ext.try_add(i)).count())
    }

    pub(crate) fn rank_mask(&self, mask: u64) -> usize {
        if let Some(table) = self.rank_table() {
            return table[mask as usize] as usize;
        }
        let mut ext = self.extender();
        let mut m = mask;
        let mut r = 0;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            if ext.try_add(i) {
                r += 1;
            }
            m &= m - 1;
        }
        r
    }

    pub fn full_rank(&self) -> usize {
        let mut ext = self.extender();
        (0..self.ground_size).filter(|&i| ext.try_add(i)).count()
    }

    /// Maximum-weight independent set by the greedy algorithm: elements are scanned by
    /// decreasing weight (ties by ascending id), nonpositive weights are skipped.
    pub fn greedy_max_weight(&self, weights: &[f64]) -> Result<(VertexSet, f64)> {
        if weights.len() != self.ground_size {
            return input_err(format!(
                "weight vector has length {}, ground size is {}",
                weights.len(),
                self.ground_size
            ));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return input_err(format!("weight {i} is not finite"));
        }
        let mut order: Vec<usize> = (0..self.ground_size).filter(|&i| weights[i] > 0.0).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let mut ext = self.extender();
        let mut chosen = Vec::new();
        let mut value = 0.0;
        for i in order {
            if ext.try_add(i) {
                chosen.push(i);
                value += weights[i];
            }
        }
        Ok((VertexSet::from_ids(chosen), value))
    }

    /// Greedy scan over `order` as given, returning the kept elements.
    pub(crate) fn greedy_in_order(&self, order: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut ext = self.extender();
        order.into_iter().filter(|&i| ext.try_add(i)).collect()
    }

    pub(crate) fn extender(&self) -> Extender<'_> {
        match &self.kind {
            MatroidKind::Uniform { rank } => Extender::Uniform { left: *rank },
            MatroidKind::Partition { caps, .. } => Extender::Partition {
                block_of: &self.block_of,
                left: caps.clone(),
            },
            MatroidKind::Graphic { node_count, edges } => Extender::Graphic {
                edges,
                dsu: Dsu::new(*node_count),
            },
            MatroidKind::Explicit { .. } => Extender::Explicit {
                family: &self.family,
                mask: 0,
            },
        }
    }

    fn rank_table(&self) -> Option<&Vec<u8>> {
        self.rank_table
            .get_or_init(|| match self.kind {
                MatroidKind::Graphic { .. } | MatroidKind::Explicit { .. }
                    if self.ground_size <= RANK_TABLE_MAX =>
                {
                    Some(self.build_rank_table((0..self.ground_size).collect::<Vec<_>>().as_slice()))
                }
                _ => None,
            })
            .as_ref()
    }

    /// Rank of every subset of `elems`, indexed by local bitmask (bit `k` ↔ `elems[k]`).
    fn build_rank_table(&self, elems: &[usize]) -> Vec<u8> {
        let m = elems.len();
        let index = SubsetIndex::new(elems);
        let mut rank = vec![0u8; 1usize << m];
        for local in 1usize..(1 << m) {
            let prev = local & (local - 1);
            let size = local.count_ones() as u8;
            rank[local] = if rank[prev] == size - 1 {
                if self.independent_mask(index.global(local)) {
                    size
                } else {
                    size - 1
                }
            } else {
                // a dependent subset: some element is redundant
                let mut best = 0;
                let mut rest = local;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    best = best.max(rank[local ^ bit]);
                    rest ^= bit;
                }
                best
            };
        }
        rank
    }

    /// Ranks of all subsets of `elems` (at most [`ENUMERATION_MAX`] elements, ids < 64).
    pub(crate) fn subset_ranks(&self, elems: &[usize]) -> Result<Vec<u8>> {
        if elems.len() > ENUMERATION_MAX {
            return Err(Error::Capacity {
                what: "subset enumeration support",
                size: elems.len(),
                limit: ENUMERATION_MAX,
            });
        }
        if let Some(table) = self.rank_table() {
            let index = SubsetIndex::new(elems);
            return Ok((0..1usize << elems.len())
                .map(|local| table[index.global(local) as usize])
                .collect());
        }
        if elems.iter().any(|&i| i >= 64) {
            return input_err("subset enumeration needs element ids below 64");
        }
        Ok(self.build_rank_table(elems))
    }

    /// Bitmasks of all independent sets, or `None` once more than `limit` are found.
    pub(crate) fn independent_masks(&self, limit: usize) -> Option<Vec<u64>> {
        if let MatroidKind::Explicit { family } = &self.kind {
            return (family.len() <= limit).then(|| family.clone());
        }
        let n = self.ground_size;
        let mut out = vec![0u64];
        let mut stack = vec![(0u64, 0usize)];
        while let Some((mask, next)) = stack.pop() {
            for i in next..n {
                let cand = mask | (1u64 << i);
                if self.independent_mask(cand) {
                    out.push(cand);
                    if out.len() > limit {
                        return None;
                    }
                    stack.push((cand, i + 1));
                }
            }
        }
        out.sort_unstable_by_key(|&m| (m.count_ones(), m));
        Some(out)
    }

    /// Number of independent sets, or `None` when it exceeds `limit`.
    pub fn count_independent_sets(&self, limit: u64) -> Option<u64> {
        let count: u128 = match &self.kind {
            MatroidKind::Uniform { rank } => (0..=*rank).map(|i| binomial(self.ground_size, i)).sum(),
            MatroidKind::Partition { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .map(|(b, &c)| (0..=c.min(b.len())).map(|i| binomial(b.len(), i)).sum::<u128>())
                .fold(1u128, |acc, x| acc.saturating_mul(x)),
            MatroidKind::Explicit { family } => family.len() as u128,
            MatroidKind::Graphic { .. } => {
                if self.ground_size > 64 {
                    return None;
                }
                return self
                    .independent_masks(limit.min(usize::MAX as u64) as usize)
                    .map(|v| v.len() as u64);
            }
        };
        (count <= limit as u128).then_some(count as u64)
    }

    fn verify_exchange(&self) -> Result<()> {
        let n = self.ground_size;
        let full: Vec<usize> = (0..n).collect();
        let rank = self.build_rank_table(&full);
        for &a in &self.family {
            let mut closure = a;
            for e in 0..n {
                let bit = 1u64 << e;
                if a & bit == 0 && !self.family.contains(&(a | bit)) {
                    closure |= bit;
                }
            }
            if rank[closure as usize] as u32 != a.count_ones() {
                return input_err(format!(
                    "explicit family violates the exchange axiom at set {:?}",
                    VertexSet::from_mask(a)
                ));
            }
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Incremental independence test: elements are offered one at a time and kept when the
/// kept set stays independent.
pub(crate) enum Extender<'a> {
    Uniform { left: usize },
    Partition { block_of: &'a [usize], left: Vec<usize> },
    Graphic { edges: &'a [(usize, usize)], dsu: Dsu },
    Explicit { family: &'a HashSet<u64>, mask: u64 },
}

impl Extender<'_> {
    pub(crate) fn try_add(&mut self, i: usize) -> bool {
        match self {
            Extender::Uniform { left } => {
                if *left == 0 {
                    return false;
                }
                *left -= 1;
                true
            }
            Extender::Partition { block_of, left } => {
                let b = block_of[i];
                if left[b] == 0 {
                    return false;
                }
                left[b] -= 1;
                true
            }
            Extender::Graphic { edges, dsu } => {
                let (a, b) = edges[i];
                dsu.union(a, b)
            }
            Extender::Explicit { family, mask } => {
                let cand = *mask | (1u64 << i);
                if cand == *mask || !family.contains(&cand) {
                    return false;
                }
                *mask = cand;
                true
            }
        }
    }
}

/// Union–find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the classes of `a` and `b`; false when they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Maps local subset masks over a list of element ids to global masks and sums, via
/// two half-width lookup tables.
pub(crate) struct SubsetIndex {
    low_bits: usize,
    low_global: Vec<u64>,
    high_global: Vec<u64>,
}

impl SubsetIndex {
    pub(crate) fn new(elems: &[usize]) -> Self {
        let low_bits = elems.len() / 2;
        let half = |ids: &[usize]| {
            let mut t = vec![0u64; 1 << ids.len()];
            for m in 1usize..t.len() {
                let k = m.trailing_zeros() as usize;
                t[m] = t[m & (m - 1)] | (1u64 << ids[k]);
            }
            t
        };
        SubsetIndex {
            low_bits,
            low_global: half(&elems[..low_bits]),
            high_global: half(&elems[low_bits..]),
        }
    }

    #[inline]
    pub(crate) fn global(&self, local: usize) -> u64 {
        self.low_global[local & ((1 << self.low_bits) - 1)] | self.high_global[local >> self.low_bits]
    }
}

/// Sums of a vector over all subsets of a list of element ids, via two half tables.
pub(crate) struct SubsetSums {
    low_bits: usize,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl SubsetSums {
    pub(crate) fn new(elems: &[usize], values: &[f64]) -> Self {
        let low_bits = elems.len() / 2;
        let half = |ids: &[usize]| {
            let mut t = vec![0.0f64; 1 << ids.len()];
            for m in 1usize..t.len() {
                let k = m.trailing_zeros() as usize;
                t[m] = t[m & (m - 1)] + values[ids[k]];
            }
            t
        };
        SubsetSums {
            low_bits,
            low: half(&elems[..low_bits]),
            high: half(&elems[low_bits..]),
        }
    }

    #[inline]
    pub(crate) fn sum(&self, local: usize) -> f64 {
        self.low[local & ((1 << self.low_bits) - 1)] + self.high[local >> self.low_bits]
    }
}
