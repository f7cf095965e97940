//! Branch points of a component hierarchy and the retraction of the
//! hierarchy onto them.
//!
//! A node is a branch point when at least two components one grid step
//! below land in it (a merge), or when nothing below lands in it (a birth).
//! A node with exactly one predecessor block is not a branch point, even if
//! new vertices join it at that scale.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{GammaNode, GammaTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchCondition {
    Merge,
    Birth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchPoint {
    pub node: GammaNode,
    pub condition: BranchCondition,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BranchOptions {
    /// Do not count components present at the smallest grid scale as births.
    pub strict_minimal_births: bool,
}

/// The branch points of a [`GammaTree`], ordered as nodes of the tree.
#[derive(Clone, Debug)]
pub struct BranchTree<'a> {
    base: &'a GammaTree,
    points: BTreeMap<GammaNode, BranchCondition>,
    /// Per scale and block position: the maximal branch point below.
    below: Vec<Vec<Option<GammaNode>>>,
}

pub fn extract_branch_points(tree: &GammaTree) -> BranchTree<'_> {
    extract_branch_points_with(tree, BranchOptions::default())
}

pub fn extract_branch_points_with(tree: &GammaTree, options: BranchOptions) -> BranchTree<'_> {
    let mut points = BTreeMap::new();
    let mut below: Vec<Vec<Option<GammaNode>>> = Vec::with_capacity(tree.grid().len());
    for (i, part) in tree.partitions().iter().enumerate() {
        let mut row = Vec::with_capacity(part.len());
        for label in part.labels() {
            let node = GammaNode::new(i, label);
            let children = tree.children(node).expect("node from the tree");
            let condition = match children.len() {
                0 if i == 0 && options.strict_minimal_births => None,
                0 => Some(BranchCondition::Birth),
                1 => None,
                _ => Some(BranchCondition::Merge),
            };
            let max_below = match condition {
                Some(c) => {
                    points.insert(node, c);
                    Some(node)
                }
                // walking back through the sole predecessor
                None => children.first().and_then(|c| {
                    let pos = tree.position(*c).expect("child from the tree");
                    below[i - 1][pos]
                }),
            };
            row.push(max_below);
        }
        below.push(row);
    }
    BranchTree {
        base: tree,
        points,
        below,
    }
}

impl<'a> BranchTree<'a> {
    pub fn base(&self) -> &'a GammaTree {
        self.base
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = GammaNode> + '_ {
        self.points.keys().copied()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = BranchPoint> + '_ {
        self.points
            .iter()
            .map(|(&node, &condition)| BranchPoint { node, condition })
    }

    pub fn contains(&self, node: GammaNode) -> bool {
        self.points.contains_key(&node)
    }

    pub fn condition(&self, node: GammaNode) -> Option<BranchCondition> {
        self.points.get(&node).copied()
    }

    pub fn count(&self, condition: BranchCondition) -> usize {
        self.points.values().filter(|&&c| c == condition).count()
    }

    /// The largest branch point `<= node`: the last branch point met when
    /// walking the node's lineage backwards.
    pub fn max_branch_below(&self, node: GammaNode) -> Result<GammaNode> {
        let pos = self.base.position(node)?;
        self.below[node.scale_index][pos].ok_or(Error::NoBranchBelow(node))
    }

    /// Join of two branch points, which is again a branch point.
    pub fn branch_join(&self, a: GammaNode, b: GammaNode) -> Result<GammaNode> {
        for n in [a, b] {
            if !self.contains(n) {
                return Err(Error::NotBranchPoint(n));
            }
        }
        let j = self.base.join(a, b)?;
        if !self.contains(j) {
            return Err(Error::Internal(format!(
                "join {j} of branch points {a} and {b} is not a branch point"
            )));
        }
        Ok(j)
    }

    /// The smallest branch point strictly above `node`, if any.
    pub fn next_above(&self, node: GammaNode) -> Result<Option<GammaNode>> {
        let mut cur = node;
        while let Some(up) = self.base.parent(cur)? {
            if self.contains(up) {
                return Ok(Some(up));
            }
            cur = up;
        }
        Ok(None)
    }

    /// Checks that `max_branch_below` is a retraction onto the branch points
    /// bounded above by the identity: `max(n) <= n` for every node, `max(b) = b`
    /// on branch points, and `max` is monotone along every covering relation
    /// `n <= parent(n)` (hence monotone).
    pub fn retraction_check(&self) -> RetractionReport {
        let mut report = RetractionReport::default();
        for n in self.base.nodes() {
            report.checked += 1;
            let m = match self.max_branch_below(n) {
                Ok(m) => m,
                Err(e) => {
                    report.fail(format!("{n}: {e}"));
                    continue;
                }
            };
            if !self.base.node_leq(m, n).unwrap_or(false) {
                report.fail(format!("max {m} is not below {n}"));
            }
            if self.contains(n) && m != n {
                report.fail(format!("branch point {n} retracts to {m}"));
            }
            if let Ok(Some(up)) = self.base.parent(n) {
                if let Ok(mu) = self.max_branch_below(up) {
                    if !self.base.node_leq(m, mu).unwrap_or(false) {
                        report.fail(format!("max not monotone: {n} <= {up} but {m} not <= {mu}"));
                    }
                }
            }
        }
        report.pass = report.counterexamples.is_empty();
        report
    }

    pub fn to_doc(&self) -> BranchTreeDoc {
        let index: BTreeMap<GammaNode, usize> =
            self.nodes().enumerate().map(|(i, n)| (n, i)).collect();
        let branch_points = self
            .points()
            .map(|p| BranchPointDoc {
                scale: self.base.scale(p.node.scale_index),
                label: p.node.label,
                condition: p.condition,
                members: self.base.members(p.node).expect("branch node").to_vec(),
            })
            .collect();
        let parent = self
            .nodes()
            .map(|n| {
                self.next_above(n)
                    .expect("branch node")
                    .map(|up| index[&up])
            })
            .collect();
        BranchTreeDoc {
            k: self.base.k(),
            branch_points,
            parent,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("branch document serializes")
    }

    pub fn to_dot(&self) -> String {
        let doc = self.to_doc();
        let mut out = String::from("digraph branches {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, bp) in doc.branch_points.iter().enumerate() {
            let shape = match bp.condition {
                BranchCondition::Merge => "box",
                BranchCondition::Birth => "ellipse",
            };
            let _ = writeln!(
                out,
                "  b{i} [shape={shape}, label=\"s={} {:?}\"];",
                bp.scale, bp.members
            );
        }
        for (i, p) in doc.parent.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(out, "  b{i} -> b{p};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RetractionReport {
    pub pass: bool,
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl RetractionReport {
    fn fail(&mut self, what: String) {
        self.counterexamples.push(what);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPointDoc {
    pub scale: f64,
    pub label: usize,
    pub condition: BranchCondition,
    pub members: Vec<usize>,
}

/// JSON layout of a [`BranchTree`]. `parent[i]` indexes the next branch
/// point above `branch_points[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchTreeDoc {
    pub k: usize,
    pub branch_points: Vec<BranchPointDoc>,
    pub parent: Vec<Option<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::build_gamma;
    use crate::metric::{DistanceMatrix, Metric, PointCloud};

    fn line_tree(v: &[f64], k: usize) -> GammaTree {
        let dm = DistanceMatrix::new(&PointCloud::from_line(v).unwrap(), Metric::Euclidean);
        build_gamma(&dm, k)
    }

    fn n(i: usize, l: usize) -> GammaNode {
        GammaNode::new(i, l)
    }

    #[test]
    fn line_k0() {
        let t = line_tree(&[0.0, 1.0, 3.0], 0);
        let bt = extract_branch_points(&t);
        let pts: Vec<_> = bt.points().map(|p| (p.node, p.condition)).collect();
        use BranchCondition::*;
        assert_eq!(
            pts,
            vec![
                (n(0, 0), Birth),
                (n(0, 1), Birth),
                (n(0, 2), Birth),
                (n(1, 0), Merge),
                (n(2, 0), Merge),
            ]
        );
        assert_eq!(bt.count(Birth), 3);
        assert_eq!(bt.count(Merge), 2);
    }

    #[test]
    fn line_k1_new_vertex_is_not_a_branch() {
        let t = line_tree(&[0.0, 1.0, 3.0], 1);
        let bt = extract_branch_points(&t);
        let pts: Vec<_> = bt.points().map(|p| (p.node, p.condition)).collect();
        assert_eq!(pts, vec![(n(1, 0), BranchCondition::Birth)]);
        assert!(!bt.contains(n(2, 0)));
        assert_eq!(bt.max_branch_below(n(2, 0)).unwrap(), n(1, 0));
        assert_eq!(bt.max_branch_below(n(3, 0)).unwrap(), n(1, 0));
    }

    #[test]
    fn single_point() {
        let t = line_tree(&[7.0], 0);
        let bt = extract_branch_points(&t);
        assert_eq!(bt.nodes().collect::<Vec<_>>(), vec![n(0, 0)]);
        assert!(bt.retraction_check().pass);
    }

    #[test]
    fn joins_and_max() {
        let t = line_tree(&[0.0, 1.0, 3.0], 0);
        let bt = extract_branch_points(&t);
        assert_eq!(bt.branch_join(n(0, 0), n(0, 2)).unwrap(), n(2, 0));
        assert_eq!(bt.branch_join(n(0, 0), n(0, 1)).unwrap(), n(1, 0));
        assert_eq!(bt.branch_join(n(1, 0), n(1, 0)).unwrap(), n(1, 0));
        assert!(matches!(
            bt.branch_join(n(0, 0), n(3, 0)),
            Err(Error::NotBranchPoint(_))
        ));
        assert_eq!(bt.max_branch_below(n(1, 2)).unwrap(), n(0, 2));
        assert_eq!(bt.max_branch_below(n(1, 0)).unwrap(), n(1, 0));
        assert_eq!(bt.max_branch_below(n(3, 0)).unwrap(), n(2, 0));
    }

    #[test]
    fn retraction_passes() {
        for k in 0..3 {
            let t = line_tree(&[0.0, 1.0, 3.0], k);
            let r = extract_branch_points(&t).retraction_check();
            assert!(r.pass, "{:?}", r.counterexamples);
        }
    }

    #[test]
    fn strict_reading_drops_initial_births() {
        let t = line_tree(&[0.0, 1.0, 3.0], 0);
        let bt = extract_branch_points_with(
            &t,
            BranchOptions {
                strict_minimal_births: true,
            },
        );
        assert_eq!(bt.nodes().collect::<Vec<_>>(), vec![n(1, 0), n(2, 0)]);
        assert!(matches!(
            bt.max_branch_below(n(1, 2)),
            Err(Error::NoBranchBelow(_))
        ));
        assert!(!bt.retraction_check().pass);
    }

    #[test]
    fn export() {
        let t = line_tree(&[0.0, 1.0, 3.0], 0);
        let doc = extract_branch_points(&t).to_doc();
        assert_eq!(doc.parent, vec![Some(3), Some(3), Some(4), Some(4), None]);
        assert_eq!(doc.branch_points[4].members, vec![0, 1, 2]);
        assert_eq!(doc.branch_points[4].scale, 2.0);
        let text = extract_branch_points(&t).to_json();
        let back: BranchTreeDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(text.contains("\"condition\": \"birth\""));
        let dot = extract_branch_points(&t).to_dot();
        assert!(dot.contains("b0 -> b3;"));
    }
}
