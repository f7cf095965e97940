//! Independent reference computations shared by the integration suites.
//! Nothing here calls the join, lineage or matching code it is used to
//! check.

#![allow(dead_code)]

use branchpoint::{BranchTree, DistanceMatrix, GammaNode, GammaTree, Metric, PointCloud};

/// Every ordered tuple of `size` distinct indices below `n`.
pub fn distinct_tuples(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, size, &mut Vec::new(), &mut out);
    out
}

/// Hausdorff distance between the sets of distinct `(k+1)`-tuples under the
/// sup product metric, by enumerating both tuple sets.
pub fn naive_config_hausdorff(x: &PointCloud, y: &PointCloud, k: usize, metric: Metric) -> f64 {
    let tx = distinct_tuples(x.len(), k + 1);
    let ty = distinct_tuples(y.len(), k + 1);
    let sup = |a: &[usize], b: &[usize], from: &PointCloud, to: &PointCloud| {
        a.iter()
            .zip(b)
            .map(|(&i, &j)| metric.distance(from.point(i), to.point(j)))
            .fold(0.0, f64::max)
    };
    let directed = |src: &[Vec<usize>], dst: &[Vec<usize>], from: &PointCloud, to: &PointCloud| {
        src.iter()
            .map(|a| {
                dst.iter()
                    .map(|b| sup(a, b, from, to))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(&tx, &ty, x, y).max(directed(&ty, &tx, y, x))
}

/// Single-linkage merge heights by repeatedly merging the two closest
/// clusters (minimum point-to-point distance).
pub fn naive_single_linkage(dm: &DistanceMatrix) -> Vec<Vec<f64>> {
    let n = dm.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut height = vec![vec![0.0; n]; n];
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let d = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dm.get(i, j))
                    .fold(f64::INFINITY, f64::min);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (h, a, b) = best;
        for &i in &clusters[a] {
            for &j in &clusters[b] {
                height[i][j] = h;
                height[j][i] = h;
            }
        }
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
    }
    height
}

/// Order by membership: blocks only grow along the hierarchy, so
/// `a <= b` iff `a` is no later than `b` and its points lie in `b`.
pub fn leq_by_members(t: &GammaTree, a: GammaNode, b: GammaNode) -> bool {
    if a.scale_index > b.scale_index {
        return false;
    }
    let mb = t.members(b).unwrap();
    t.members(a)
        .unwrap()
        .iter()
        .all(|p| mb.binary_search(p).is_ok())
}

/// Smallest-scale common upper bound found by scanning every node.
pub fn brute_join(t: &GammaTree, a: GammaNode, b: GammaNode) -> Option<GammaNode> {
    t.nodes()
        .into_iter()
        .find(|&c| leq_by_members(t, a, c) && leq_by_members(t, b, c))
}

/// Largest branch point below `n`, as the join of all branch points below.
pub fn join_of_branches_below(bt: &BranchTree<'_>, n: GammaNode) -> Option<GammaNode> {
    let t = bt.base();
    let below: Vec<GammaNode> = bt.nodes().filter(|&p| leq_by_members(t, p, n)).collect();
    t.join_many(&below).ok()
}

/// Branch-point test from block containment between consecutive scales:
/// a node is a branch point when two or more blocks one step below lie in
/// it, or none does.
pub fn brute_is_branch(t: &GammaTree, n: GammaNode) -> bool {
    if n.scale_index == 0 {
        return true;
    }
    let prev = n.scale_index - 1;
    let below = t.partitions()[prev]
        .labels()
        .filter(|&l| leq_by_members(t, GammaNode::new(prev, l), n))
        .count();
    below != 1
}
