//! Vertex sets and path components of the degree-Rips complex `L(s, k)`.
//!
//! Components of a simplicial complex are those of its 1-skeleton, so only
//! edges `{i, j}` with `d(i, j) <= s` between surviving vertices are used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Points with at least `k` distinct neighbours within distance `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub scale: f64,
    pub k: usize,
    pub members: Vec<usize>,
}

impl VertexSet {
    pub fn contains(&self, point: usize) -> bool {
        self.members.binary_search(&point).is_ok()
    }
}

/// Path components of `L(scale, k)`. Blocks are sorted, ordered by their
/// minimum member, and that minimum is the block's label.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    scale: f64,
    k: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<Option<usize>>,
}

impl Partition {
    /// Canonicalizes `blocks` and checks they are nonempty and disjoint.
    pub fn from_blocks(scale: f64, k: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in &mut blocks {
            b.sort_unstable();
            if b.is_empty() {
                return Err(Error::MalformedTree("empty block".into()));
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let len = blocks
            .iter()
            .filter_map(|b| b.last())
            .max()
            .map_or(0, |&m| m + 1);
        let mut block_of = vec![None; len];
        for (pos, b) in blocks.iter().enumerate() {
            for &p in b {
                if block_of[p].replace(pos).is_some() {
                    return Err(Error::MalformedTree(format!(
                        "point {p} occurs twice at scale {scale}"
                    )));
                }
            }
        }
        Ok(Partition {
            scale,
            k,
            blocks,
            block_of,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn members(&self, pos: usize) -> &[usize] {
        &self.blocks[pos]
    }

    pub fn label(&self, pos: usize) -> usize {
        self.blocks[pos][0]
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.blocks.iter().map(|b| b[0])
    }

    /// Block position for a canonical label.
    pub fn position(&self, label: usize) -> Option<usize> {
        self.blocks.binary_search_by_key(&label, |b| b[0]).ok()
    }

    /// Block position containing `point`, if the point is a vertex.
    pub fn block_of(&self, point: usize) -> Option<usize> {
        self.block_of.get(point).copied().flatten()
    }

    /// Canonical label of the block containing `point`.
    pub fn label_of(&self, point: usize) -> Option<usize> {
        self.block_of(point).map(|pos| self.label(pos))
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links by smaller root index, so each root is its set's minimum.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn degree_mask(dm: &DistanceMatrix, s: f64, k: usize) -> Vec<bool> {
    (0..dm.len())
        .map(|i| {
            k == 0
                || dm
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, &d)| j != i && d <= s)
                    .nth(k - 1)
                    .is_some()
        })
        .collect()
}

pub fn vertex_set(dm: &DistanceMatrix, s: f64, k: usize) -> VertexSet {
    let members = degree_mask(dm, s, k)
        .into_iter()
        .enumerate()
        .filter_map(|(i, keep)| keep.then_some(i))
        .collect();
    VertexSet {
        scale: s,
        k,
        members,
    }
}

pub fn components_at(dm: &DistanceMatrix, s: f64, k: usize) -> Partition {
    let n = dm.len();
    let alive = degree_mask(dm, s, k);
    let mut uf = UnionFind::new(n);
    for i in (0..n).filter(|&i| alive[i]) {
        for j in (i + 1..n).filter(|&j| alive[j]) {
            if dm.get(i, j) <= s {
                uf.union(i, j);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in (0..n).filter(|&i| alive[i]) {
        let r = uf.find(i);
        by_root[r].push(i);
    }
    let blocks = by_root.into_iter().filter(|b| !b.is_empty()).collect();
    Partition::from_blocks(s, k, blocks).expect("union-find blocks are disjoint")
}

/// Reference implementations used to cross-check the fast paths.
pub mod oracle {
    use super::*;

    /// Components by repeated relaxation of a reachability matrix over the
    /// full adjacency relation.
    pub fn brute_force_components(dm: &DistanceMatrix, s: f64, k: usize) -> Partition {
        let n = dm.len();
        let alive: Vec<bool> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && dm.get(i, j) <= s).count() >= k)
            .collect();
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = alive[i] && alive[j] && (i == j || dm.get(i, j) <= s);
            }
        }
        // Warshall transitive closure
        for m in 0..n {
            let via = reach[m].clone();
            for row in reach.iter_mut() {
                if row[m] {
                    for (cell, &v) in row.iter_mut().zip(&via) {
                        *cell |= v;
                    }
                }
            }
        }
        let mut blocks = Vec::new();
        let mut taken = vec![false; n];
        for i in 0..n {
            if alive[i] && !taken[i] {
                let block: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
                for &j in &block {
                    taken[j] = true;
                }
                blocks.push(block);
            }
        }
        Partition::from_blocks(s, k, blocks).expect("closure classes are disjoint")
    }
}
