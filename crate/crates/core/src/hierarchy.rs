//! The component hierarchy over the phase-change grid: nodes are
//! `(scale index, component)` pairs ordered by scale and inclusion.
//!
//! Partitions only change at phase-change numbers, so a node at an arbitrary
//! scale `s` is represented by the node at the largest grid value `<= s`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::{phase_change_scales, DistanceMatrix, ScaleGrid};
use crate::rips::{components_at, Partition};

/// A component `label` (its minimum point index) at grid position
/// `scale_index`. Ordered by scale index, then label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GammaNode {
    pub scale_index: usize,
    pub label: usize,
}

impl GammaNode {
    pub fn new(scale_index: usize, label: usize) -> Self {
        GammaNode { scale_index, label }
    }
}

impl std::fmt::Display for GammaNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, [{}])", self.scale_index, self.label)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaTree {
    grid: ScaleGrid,
    k: usize,
    partitions: Vec<Partition>,
    /// `lineage[i][p]`: position at grid index `i + 1` of the block containing
    /// block `p` of grid index `i`.
    lineage: Vec<Vec<usize>>,
}

pub fn build_gamma(dm: &DistanceMatrix, k: usize) -> GammaTree {
    build_gamma_with(dm, phase_change_scales(dm), k, Execution::default())
}

/// Builds the hierarchy on an explicit grid (for example an epsilon-merged
/// one). Partitions are computed independently per scale.
pub fn build_gamma_with(
    dm: &DistanceMatrix,
    grid: ScaleGrid,
    k: usize,
    exec: Execution,
) -> GammaTree {
    let partitions = exec.map(grid.as_slice(), |&s| components_at(dm, s, k));
    GammaTree::from_parts(grid, k, partitions).expect("degree-Rips partitions are nested")
}

impl GammaTree {
    /// Assembles a tree from per-scale partitions, deriving the lineage and
    /// checking that every block lands inside a single block one scale up.
    pub fn from_parts(grid: ScaleGrid, k: usize, partitions: Vec<Partition>) -> Result<Self> {
        if grid.len() != partitions.len() {
            return Err(Error::MalformedTree(format!(
                "{} scales but {} partitions",
                grid.len(),
                partitions.len()
            )));
        }
        let mut lineage = Vec::with_capacity(grid.len().saturating_sub(1));
        for (i, pair) in partitions.windows(2).enumerate() {
            let (lower, upper) = (&pair[0], &pair[1]);
            let links = lower
                .blocks()
                .iter()
                .map(|block| {
                    let target = upper.block_of(block[0]);
                    match target {
                        Some(t) if block.iter().all(|&p| upper.block_of(p) == Some(t)) => Ok(t),
                        _ => Err(Error::MalformedTree(format!(
                            "block {} at scale index {i} is not contained in a block at {}",
                            block[0],
                            i + 1
                        ))),
                    }
                })
                .collect::<Result<Vec<usize>>>()?;
            lineage.push(links);
        }
        Ok(GammaTree {
            grid,
            k,
            partitions,
            lineage,
        })
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self, scale_index: usize) -> f64 {
        self.grid[scale_index]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn partition(&self, scale_index: usize) -> Option<&Partition> {
        self.partitions.get(scale_index)
    }

    /// No components at any scale (happens when `k >= n`).
    pub fn is_empty(&self) -> bool {
        self.partitions.iter().all(Partition::is_empty)
    }

    pub fn top_is_single_block(&self) -> bool {
        self.partitions.last().is_some_and(|p| p.len() == 1)
    }

    pub fn node_count(&self) -> usize {
        self.partitions.iter().map(Partition::len).sum()
    }

    /// All nodes in `(scale_index, label)` order.
    pub fn nodes(&self) -> Vec<GammaNode> {
        self.partitions
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.labels().map(move |l| GammaNode::new(i, l)))
            .collect()
    }

    pub(crate) fn position(&self, node: GammaNode) -> Result<usize> {
        self.partitions
            .get(node.scale_index)
            .and_then(|p| p.position(node.label))
            .ok_or(Error::InvalidNode(node))
    }

    fn node_at(&self, scale_index: usize, pos: usize) -> GammaNode {
        GammaNode::new(scale_index, self.partitions[scale_index].label(pos))
    }

    pub fn contains(&self, node: GammaNode) -> bool {
        self.position(node).is_ok()
    }

    pub fn members(&self, node: GammaNode) -> Result<&[usize]> {
        let pos = self.position(node)?;
        Ok(self.partitions[node.scale_index].members(pos))
    }

    /// The component containing `point` at `scale_index`, if the point is a
    /// vertex there.
    pub fn node_of_point(&self, scale_index: usize, point: usize) -> Option<GammaNode> {
        let p = self.partitions.get(scale_index)?;
        p.label_of(point).map(|l| GammaNode::new(scale_index, l))
    }

    /// The node one grid step up that contains `node`.
    pub fn parent(&self, node: GammaNode) -> Result<Option<GammaNode>> {
        let pos = self.position(node)?;
        Ok(self
            .lineage
            .get(node.scale_index)
            .map(|links| self.node_at(node.scale_index + 1, links[pos])))
    }

    /// Nodes one grid step down that map into `node`.
    pub fn children(&self, node: GammaNode) -> Result<Vec<GammaNode>> {
        let pos = self.position(node)?;
        let Some(below) = node.scale_index.checked_sub(1) else {
            return Ok(Vec::new());
        };
        Ok(self.lineage[below]
            .iter()
            .enumerate()
            .filter(|&(_, &up)| up == pos)
            .map(|(p, _)| self.node_at(below, p))
            .collect())
    }

    /// Image of `node` at grid index `to` (which must not be below it).
    pub fn lift(&self, node: GammaNode, to: usize) -> Result<GammaNode> {
        let mut pos = self.position(node)?;
        if to < node.scale_index || to >= self.grid.len() {
            return Err(Error::ScaleOutOfRange(to));
        }
        for links in &self.lineage[node.scale_index..to] {
            pos = links[pos];
        }
        Ok(self.node_at(to, pos))
    }

    /// `a <= b`: `a` is at a scale no larger than `b` and its component
    /// lands in `b`'s.
    pub fn node_leq(&self, a: GammaNode, b: GammaNode) -> Result<bool> {
        self.position(b)?;
        if a.scale_index > b.scale_index {
            self.position(a)?;
            return Ok(false);
        }
        Ok(self.lift(a, b.scale_index)? == b)
    }

    /// Least upper bound: the first scale at which both lineages meet.
    pub fn join(&self, a: GammaNode, b: GammaNode) -> Result<GammaNode> {
        let start = a.scale_index.max(b.scale_index);
        let mut pa = self.position(self.lift(a, start)?)?;
        let mut pb = self.position(self.lift(b, start)?)?;
        let mut i = start;
        while pa != pb {
            let links = self.lineage.get(i).ok_or(Error::NoUpperBound)?;
            pa = links[pa];
            pb = links[pb];
            i += 1;
        }
        Ok(self.node_at(i, pa))
    }

    pub fn join_many(&self, nodes: &[GammaNode]) -> Result<GammaNode> {
        let (&first, rest) = nodes
            .split_first()
            .ok_or_else(|| Error::Internal("join of an empty list".into()))?;
        self.position(first)?;
        rest.iter().try_fold(first, |acc, &n| self.join(acc, n))
    }

    /// Merge-height distances `u - s` between the components at one scale,
    /// where `u` is the scale of their join.
    pub fn slice_ultrametric(&self, scale_index: usize) -> Result<UltrametricSlice> {
        let part = self
            .partitions
            .get(scale_index)
            .ok_or(Error::ScaleOutOfRange(scale_index))?;
        if part.is_empty() {
            return Err(Error::EmptySlice(scale_index));
        }
        let s = self.scale(scale_index);
        let labels: Vec<usize> = part.labels().collect();
        let n = labels.len();
        let mut distances = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let u = self.join(
                    GammaNode::new(scale_index, labels[i]),
                    GammaNode::new(scale_index, labels[j]),
                )?;
                let d = self.scale(u.scale_index) - s;
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }
        Ok(UltrametricSlice {
            scale_index,
            scale: s,
            labels,
            distances,
        })
    }

    pub fn to_doc(&self) -> GammaTreeDoc {
        let nodes = self
            .partitions
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.blocks().iter().map(move |b| NodeDoc {
                    scale_index: i,
                    label: b[0],
                    members: b.clone(),
                })
            })
            .collect();
        let lineage = self
            .lineage
            .iter()
            .enumerate()
            .flat_map(|(i, links)| {
                links.iter().enumerate().map(move |(pos, &up)| {
                    [
                        i,
                        self.partitions[i].label(pos),
                        self.partitions[i + 1].label(up),
                    ]
                })
            })
            .collect();
        GammaTreeDoc {
            k: self.k,
            scales: self.grid.as_slice().to_vec(),
            nodes,
            lineage,
        }
    }

    pub fn from_doc(doc: &GammaTreeDoc) -> Result<Self> {
        let grid = ScaleGrid::from_scales(doc.scales.clone())?;
        let mut blocks: Vec<Vec<Vec<usize>>> = vec![Vec::new(); grid.len()];
        for node in &doc.nodes {
            let slot = blocks
                .get_mut(node.scale_index)
                .ok_or(Error::ScaleOutOfRange(node.scale_index))?;
            if node.members.iter().min() != Some(&node.label) {
                return Err(Error::MalformedTree(format!(
                    "label {} is not the minimum member",
                    node.label
                )));
            }
            slot.push(node.members.clone());
        }
        let partitions = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| Partition::from_blocks(grid[i], doc.k, b))
            .collect::<Result<Vec<_>>>()?;
        let tree = GammaTree::from_parts(grid, doc.k, partitions)?;
        let mut expected = tree.to_doc().lineage;
        let mut given = doc.lineage.clone();
        expected.sort_unstable();
        given.sort_unstable();
        if expected != given {
            return Err(Error::MalformedTree(
                "lineage does not match the partitions".into(),
            ));
        }
        Ok(tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("tree document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }

    /// Graphviz rendering with one rank per grid scale, edges pointing up
    /// the lineage.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph gamma {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, p) in self.partitions.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            let _ = writeln!(out, "  subgraph scale_{i} {{\n    rank=same;");
            for b in p.blocks() {
                let _ = writeln!(
                    out,
                    "    n{i}_{} [label=\"s={} {:?}\"];",
                    b[0], self.grid[i], b
                );
            }
            out.push_str("  }\n");
        }
        for (i, links) in self.lineage.iter().enumerate() {
            for (pos, &up) in links.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  n{i}_{} -> n{}_{};",
                    self.partitions[i].label(pos),
                    i + 1,
                    self.partitions[i + 1].label(up)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Symmetric distance matrix over the components at one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct UltrametricSlice {
    pub scale_index: usize,
    pub scale: f64,
    pub labels: Vec<usize>,
    distances: Vec<f64>,
}

impl UltrametricSlice {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.labels.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.distances
            .chunks(self.labels.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// CSV with the block labels as header row and first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for l in &self.labels {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            let _ = write!(out, "{l}");
            for j in 0..self.labels.len() {
                let _ = write!(out, ",{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub scale_index: usize,
    pub label: usize,
    pub members: Vec<usize>,
}

/// JSON layout of a [`GammaTree`]. Lineage rows are
/// `[from_scale_index, label, label_one_scale_up]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTreeDoc {
    pub k: usize,
    pub scales: Vec<f64>,
    pub nodes: Vec<NodeDoc>,
    pub lineage: Vec<[usize; 3]>,
}
