//! Interleaving of branch-point trees for nested data sets `X ⊆ Y`.
//!
//! Given `r` above the configuration-space Hausdorff distance, every vertex
//! `y` of `L(s, k; Y)` is sent to a vertex `θ(y)` of `L(s + 2r, k; X)` within
//! distance `r`, fixing the points of `X`. On branch trees this yields the
//! maps `i*`, `θ*` and the shift `σ*`, and [`verify_interleaving`] checks
//! every order relation between them exhaustively.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::branch::{extract_branch_points, BranchTree};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hierarchy::{build_gamma_with, GammaNode, GammaTree};
use crate::metric::{
    bottleneck_inject, config_hausdorff_distance_with, hall_violator, phase_change_scales,
    CrossDistances, DistanceMatrix, Metric, PointCloud, SubsetWitness,
};
use crate::rips::vertex_set;

/// Slack added to the configuration distance when no radius is given; the
/// stability argument needs a strict inequality.
pub const DEFAULT_RADIUS_SLACK: f64 = 1e-9;

pub fn default_radius(config_distance: f64) -> f64 {
    let r = config_distance + DEFAULT_RADIUS_SLACK;
    if r > config_distance {
        r
    } else {
        config_distance.next_up()
    }
}

/// `X ⊆ Y` with the embedding of `X` into `Y`, a density `k` and a radius `r`.
#[derive(Clone, Debug)]
pub struct NestedPair {
    x: PointCloud,
    y: PointCloud,
    embedding: Vec<usize>,
    k: usize,
    metric: Metric,
    r: f64,
    config_distance: f64,
}

impl NestedPair {
    /// Fails unless every point of `x` is a point of `y` and `r` (defaulting
    /// to the configuration distance plus a small slack) strictly exceeds the
    /// configuration distance.
    pub fn new(
        x: PointCloud,
        y: PointCloud,
        k: usize,
        metric: Metric,
        r: Option<f64>,
    ) -> Result<Self> {
        let pair = Self::with_radius_unchecked(x, y, k, metric, r)?;
        if !(pair.r > pair.config_distance) {
            return Err(Error::RadiusTooSmall {
                r: pair.r,
                config: pair.config_distance,
            });
        }
        Ok(pair)
    }

    /// Like [`NestedPair::new`] but accepts any radius, so that witness
    /// failures for undersized radii can be observed.
    pub fn with_radius_unchecked(
        x: PointCloud,
        y: PointCloud,
        k: usize,
        metric: Metric,
        r: Option<f64>,
    ) -> Result<Self> {
        let embedding = x.embed_into(&y)?;
        let config_distance =
            config_hausdorff_distance_with(&x, &y, k, metric, Execution::default())?;
        let r = r.unwrap_or_else(|| default_radius(config_distance));
        Ok(NestedPair {
            x,
            y,
            embedding,
            k,
            metric,
            r,
            config_distance,
        })
    }

    pub fn x(&self) -> &PointCloud {
        &self.x
    }

    pub fn y(&self) -> &PointCloud {
        &self.y
    }

    /// Position in `Y` of each point of `X`.
    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn config_distance(&self) -> f64 {
        self.config_distance
    }
}

/// Vertex map from `L(s, k; Y)` to `L(s + 2r, k; X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMap {
    pub scale: f64,
    /// Y point index to X point index.
    pub assignments: BTreeMap<usize, usize>,
    pub witnesses: BTreeMap<usize, SubsetWitness>,
}

impl ThetaMap {
    pub fn get(&self, y: usize) -> Option<usize> {
        self.assignments.get(&y).copied()
    }
}

/// An order-preserving map between branch trees, tabulated on its domain.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PosetMap {
    pub pairs: BTreeMap<GammaNode, GammaNode>,
}

impl PosetMap {
    pub fn get(&self, node: GammaNode) -> Option<GammaNode> {
        self.pairs.get(&node).copied()
    }

    /// Pairs `a <= b` of the domain whose images are not ordered.
    pub fn monotonicity_violations(
        &self,
        domain: &GammaTree,
        codomain: &GammaTree,
    ) -> Vec<(GammaNode, GammaNode)> {
        let mut bad = Vec::new();
        for (&a, &fa) in &self.pairs {
            for (&b, &fb) in &self.pairs {
                if a != b
                    && domain.node_leq(a, b).unwrap_or(false)
                    && !codomain.node_leq(fa, fb).unwrap_or(false)
                {
                    bad.push((a, b));
                }
            }
        }
        bad
    }
}

/// Everything needed to evaluate the interleaving maps for one pair:
/// distance data, both hierarchies and `θ` at every grid scale of `Y`.
pub struct Interleaving<'p> {
    pair: &'p NestedPair,
    exec: Execution,
    dm_x: DistanceMatrix,
    dm_y: DistanceMatrix,
    cross: CrossDistances,
    x_of_y: Vec<Option<usize>>,
    gamma_x: GammaTree,
    gamma_y: GammaTree,
    thetas: Vec<ThetaMap>,
}

impl<'p> Interleaving<'p> {
    pub fn new(pair: &'p NestedPair, exec: Execution) -> Result<Self> {
        let dm_x = DistanceMatrix::new(&pair.x, pair.metric);
        let dm_y = DistanceMatrix::new(&pair.y, pair.metric);
        let cross = CrossDistances::new(&pair.y, &pair.x, pair.metric)?;
        let mut x_of_y = vec![None; pair.y.len()];
        for (x, &y) in pair.embedding.iter().enumerate() {
            x_of_y[y] = Some(x);
        }
        let gamma_x = build_gamma_with(&dm_x, phase_change_scales(&dm_x), pair.k, exec);
        let gamma_y = build_gamma_with(&dm_y, phase_change_scales(&dm_y), pair.k, exec);
        let mut this = Interleaving {
            pair,
            exec,
            dm_x,
            dm_y,
            cross,
            x_of_y,
            gamma_x,
            gamma_y,
            thetas: Vec::new(),
        };
        let scales = this.gamma_y.grid().as_slice().to_vec();
        this.thetas = exec.try_map(&scales, |&s| this.theta_at(s))?;
        Ok(this)
    }

    pub fn pair(&self) -> &NestedPair {
        self.pair
    }

    pub fn gamma_x(&self) -> &GammaTree {
        &self.gamma_x
    }

    pub fn gamma_y(&self) -> &GammaTree {
        &self.gamma_y
    }

    /// `θ` at the `Y` grid scale with the given index.
    pub fn theta(&self, scale_index_y: usize) -> &ThetaMap {
        &self.thetas[scale_index_y]
    }

    /// `θ` at an arbitrary scale `s`: points of `X` are fixed; any other
    /// vertex `y` is matched, together with its `k` nearest neighbours within
    /// `s` (ties by index), injectively into `X` at bottleneck cost `<= r`,
    /// and sent to its own partner.
    pub fn theta_at(&self, s: f64) -> Result<ThetaMap> {
        let k = self.pair.k;
        let r = self.pair.r;
        let mut assignments = BTreeMap::new();
        let mut witnesses = BTreeMap::new();
        for y in vertex_set(&self.dm_y, s, k).members {
            let witness = match self.x_of_y[y] {
                Some(x) => SubsetWitness {
                    pairs: vec![(y, x)],
                    bottleneck: 0.0,
                },
                None => {
                    let row = self.dm_y.row(y);
                    let mut near: Vec<usize> =
                        (0..row.len()).filter(|&j| j != y && row[j] <= s).collect();
                    near.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
                    let subset: Vec<usize> =
                        std::iter::once(y).chain(near.into_iter().take(k)).collect();
                    let w = bottleneck_inject(&subset, &self.cross)?;
                    if !(w.bottleneck <= r) {
                        let violator = hall_violator(&subset, &self.cross, r).unwrap_or_default();
                        return Err(Error::WitnessUnavailable {
                            scale: s,
                            r,
                            subset,
                            bottleneck: w.bottleneck,
                            violator,
                        });
                    }
                    w
                }
            };
            let x = witness.target_of(y).expect("witness covers its vertex");
            assignments.insert(y, x);
            witnesses.insert(y, witness);
        }
        Ok(ThetaMap {
            scale: s,
            assignments,
            witnesses,
        })
    }

    fn shifted_x(&self, s: f64) -> usize {
        self.gamma_x
            .grid()
            .floor_index(s + 2.0 * self.pair.r)
            .expect("shifted scale is nonnegative")
    }

    fn shifted_y(&self, s: f64) -> usize {
        self.gamma_y
            .grid()
            .floor_index(s + 2.0 * self.pair.r)
            .expect("shifted scale is nonnegative")
    }

    /// `i*`: a branch point of `X` to the maximal branch point of `Y` below
    /// the component of the same points at the same scale.
    pub fn i_star(&self, by: &BranchTree<'_>, b: GammaNode) -> Result<GammaNode> {
        let s = self.gamma_x.scale(b.scale_index);
        let j = self
            .gamma_y
            .grid()
            .index_of(s)
            .ok_or_else(|| Error::Internal(format!("scale {s} of X missing from Y grid")))?;
        let y = self.pair.embedding[b.label];
        let node = self.gamma_y.node_of_point(j, y).ok_or_else(|| {
            Error::Internal(format!(
                "X point {} is not a Y vertex at scale {s}",
                b.label
            ))
        })?;
        by.max_branch_below(node)
    }

    /// `θ*`: a branch point `(t, [y])` of `Y` to the maximal branch point of
    /// `X` below `(t + 2r, [θ(y)])`. Every member of `[y]` must give the
    /// same component.
    pub fn theta_star(&self, bx: &BranchTree<'_>, c: GammaNode) -> Result<GammaNode> {
        let t = self.gamma_y.scale(c.scale_index);
        let theta = &self.thetas[c.scale_index];
        let j = self.shifted_x(t);
        let mut image = None;
        for &y in self.gamma_y.members(c)? {
            let x = theta
                .get(y)
                .ok_or_else(|| Error::Internal(format!("θ undefined on vertex {y}")))?;
            let node = self.gamma_x.node_of_point(j, x).ok_or_else(|| {
                Error::Internal(format!("θ({y}) = {x} is not an X vertex at index {j}"))
            })?;
            match image {
                None => image = Some(node),
                Some(prev) if prev != node => {
                    return Err(Error::Internal(format!(
                        "θ* not well defined on {c}: members give {prev} and {node}"
                    )))
                }
                Some(_) => {}
            }
        }
        bx.max_branch_below(image.expect("components are nonempty"))
    }

    pub fn sigma_star(&self, bt: &BranchTree<'_>, b: GammaNode) -> Result<GammaNode> {
        sigma_image(bt, b, self.pair.r)
    }

    fn theta_failures(&self, ti: usize) -> Vec<String> {
        let s = self.gamma_y.scale(ti);
        let r = self.pair.r;
        let shifted = s + 2.0 * r;
        let theta = &self.thetas[ti];
        let jx = self.shifted_x(s);
        let mut out = Vec::new();
        for (&y, &x) in &theta.assignments {
            if let Some(fixed) = self.x_of_y[y] {
                if fixed != x {
                    out.push(format!("scale {s}: θ moves X point {fixed} to {x}"));
                }
            }
            if !(self.cross.get(y, x) <= r) {
                out.push(format!("scale {s}: d({y}, θ({y}) = {x}) exceeds r"));
            }
            if self.gamma_x.node_of_point(jx, x).is_none() {
                out.push(format!(
                    "scale {s}: θ({y}) = {x} is not a vertex at {shifted}"
                ));
            }
        }
        let verts: Vec<(usize, usize)> = theta.assignments.iter().map(|(&a, &b)| (a, b)).collect();
        for (i, &(y1, x1)) in verts.iter().enumerate() {
            for &(y2, x2) in &verts[i + 1..] {
                if self.dm_y.get(y1, y2) <= s {
                    if !(self.dm_x.get(x1, x2) <= shifted) {
                        out.push(format!(
                            "scale {s}: edge ({y1}, {y2}) maps to ({x1}, {x2}) longer than {shifted}"
                        ));
                    }
                    let c1 = self.gamma_x.node_of_point(jx, x1);
                    let c2 = self.gamma_x.node_of_point(jx, x2);
                    if c1.is_none() || c1 != c2 {
                        out.push(format!(
                            "scale {s}: edge ({y1}, {y2}) splits across components"
                        ));
                    }
                }
            }
        }
        out
    }

    /// Component-level diagram at one `Y` grid scale: `θ ∘ i` equals the
    /// shift on `X`, and `i ∘ θ` equals the shift on `Y`.
    fn pi0_failures(&self, ti: usize) -> (usize, Vec<String>) {
        let s = self.gamma_y.scale(ti);
        let theta = &self.thetas[ti];
        let jx = self.gamma_x.grid().floor_index(s).expect("s >= 0");
        let jx2 = self.shifted_x(s);
        let jy2 = self.shifted_y(s);
        let mut checked = 0;
        let mut out = Vec::new();
        let part_x = &self.gamma_x.partitions()[jx];
        for x in part_x.vertices() {
            checked += 1;
            let y = self.pair.embedding[x];
            if self.gamma_y.node_of_point(ti, y).is_none() {
                out.push(format!("scale {s}: X vertex {x} is not a Y vertex"));
                continue;
            }
            let tx = theta.get(y);
            if tx != Some(x) {
                out.push(format!("scale {s}: θ(i({x})) = {tx:?}"));
                continue;
            }
            let shifted = self.gamma_x.node_of_point(jx2, x);
            if shifted.is_none() {
                out.push(format!("scale {s}: X vertex {x} vanishes after the shift"));
            }
        }
        for (&y, &x) in &theta.assignments {
            checked += 1;
            let via_theta = self.gamma_y.node_of_point(jy2, self.pair.embedding[x]);
            let shifted = self.gamma_y.node_of_point(jy2, y);
            if via_theta.is_none() || via_theta != shifted {
                out.push(format!(
                    "scale {s}: [i(θ({y}))] = {via_theta:?} but σ[{y}] = {shifted:?}"
                ));
            }
        }
        (checked, out)
    }
}

fn sigma_image(bt: &BranchTree<'_>, b: GammaNode, r: f64) -> Result<GammaNode> {
    let tree = bt.base();
    let s = tree.scale(b.scale_index);
    let j = tree
        .grid()
        .floor_index(s + 2.0 * r)
        .ok_or(Error::ScaleOutOfRange(b.scale_index))?;
    bt.max_branch_below(tree.lift(b, j)?)
}

fn tabulate<F>(bt: &BranchTree<'_>, exec: Execution, f: F) -> (PosetMap, Vec<String>)
where
    F: Fn(GammaNode) -> Result<GammaNode> + Sync + Send,
{
    let nodes: Vec<GammaNode> = bt.nodes().collect();
    let images = exec.map(&nodes, |&n| f(n));
    let mut map = PosetMap::default();
    let mut errors = Vec::new();
    for (n, img) in nodes.into_iter().zip(images) {
        match img {
            Ok(m) => {
                map.pairs.insert(n, m);
            }
            Err(e) => errors.push(format!("{n}: {e}")),
        }
    }
    (map, errors)
}

pub fn theta_vertex_map(pair: &NestedPair, s: f64) -> Result<ThetaMap> {
    Interleaving::new(pair, Execution::default())?.theta_at(s)
}

pub fn induced_map_i(pair: &NestedPair) -> Result<PosetMap> {
    let il = Interleaving::new(pair, Execution::default())?;
    let bx = extract_branch_points(il.gamma_x());
    let by = extract_branch_points(il.gamma_y());
    let (map, errors) = tabulate(&bx, il.exec, |b| il.i_star(&by, b));
    first_error(errors)?;
    Ok(map)
}

pub fn induced_map_theta(pair: &NestedPair) -> Result<PosetMap> {
    let il = Interleaving::new(pair, Execution::default())?;
    let bx = extract_branch_points(il.gamma_x());
    let by = extract_branch_points(il.gamma_y());
    let (map, errors) = tabulate(&by, il.exec, |c| il.theta_star(&bx, c));
    first_error(errors)?;
    Ok(map)
}

/// The shift `(s, [x]) ↦ max(s + 2r, [x])` on a branch tree.
pub fn induced_map_sigma(bt: &BranchTree<'_>, r: f64) -> Result<PosetMap> {
    let (map, errors) = tabulate(bt, Execution::default(), |b| sigma_image(bt, b, r));
    first_error(errors)?;
    Ok(map)
}

fn first_error(errors: Vec<String>) -> Result<()> {
    match errors.into_iter().next() {
        Some(e) => Err(Error::Internal(e)),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn from_parts(checked: usize, failures: Vec<String>) -> Self {
        CheckResult {
            pass: failures.is_empty(),
            checked,
            failures,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    /// `θ* i* <= σ*` on the branch points of `X`.
    pub eq4: CheckResult,
    /// `i* θ* <= σ*` on the branch points of `Y`.
    pub eq5: CheckResult,
    /// `b <= σ*(b) <= (s + 2r, [x])` on both trees.
    pub eq6: CheckResult,
    /// `i*(a) ∪ i*(b) <= i*(a ∪ b)`.
    pub join_compat: CheckResult,
    /// Both triangles of the component-level diagram at every scale.
    pub pi0_diagram: CheckResult,
    /// `i*`, `θ*` and both shifts preserve the order.
    pub monotone: CheckResult,
    /// Vertex-level properties of `θ`: fixes `X`, moves points at most `r`,
    /// lands on vertices and sends edges into components.
    pub theta: CheckResult,
}

impl Checks {
    fn all(&self) -> [&CheckResult; 7] {
        [
            &self.eq4,
            &self.eq5,
            &self.eq6,
            &self.join_compat,
            &self.pi0_diagram,
            &self.monotone,
            &self.theta,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterleavingReport {
    pub metric: Metric,
    pub k: usize,
    pub r: f64,
    pub config_hausdorff: f64,
    pub checks: Checks,
    pub max_shift: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InterleavingReport {
    /// A failing report for a pair on which the maps could not be built.
    pub fn construction_failure(
        metric: Metric,
        k: usize,
        r: f64,
        config_hausdorff: f64,
        error: &Error,
    ) -> Self {
        InterleavingReport {
            metric,
            k,
            r,
            config_hausdorff,
            checks: Checks::default(),
            max_shift: 0.0,
            pass: false,
            error: Some(error.to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `(name, result)` for every check, in report order.
    pub fn named_checks(&self) -> Vec<(&'static str, &CheckResult)> {
        let names = [
            "eq4",
            "eq5",
            "eq6",
            "join_compat",
            "pi0_diagram",
            "monotone",
            "theta",
        ];
        names.into_iter().zip(self.checks.all()).collect()
    }
}

pub fn verify_interleaving(pair: &NestedPair) -> Result<InterleavingReport> {
    verify_interleaving_with(pair, Execution::default())
}

pub fn verify_interleaving_with(pair: &NestedPair, exec: Execution) -> Result<InterleavingReport> {
    let il = Interleaving::new(pair, exec)?;
    let bx = extract_branch_points(il.gamma_x());
    let by = extract_branch_points(il.gamma_y());
    let (gx, gy) = (il.gamma_x(), il.gamma_y());
    let r = pair.r;

    let (i_map, i_err) = tabulate(&bx, exec, |b| il.i_star(&by, b));
    let (theta_map, theta_err) = tabulate(&by, exec, |c| il.theta_star(&bx, c));
    let (sigma_x, sx_err) = tabulate(&bx, exec, |b| sigma_image(&bx, b, r));
    let (sigma_y, sy_err) = tabulate(&by, exec, |c| sigma_image(&by, c, r));

    // vertex-level θ
    let y_scales = gy.grid().len();
    let mut theta_fail: Vec<String> = theta_err;
    theta_fail.extend(
        exec.map_range(y_scales, |ti| il.theta_failures(ti))
            .into_iter()
            .flatten(),
    );
    let theta_checked = il.thetas.iter().map(|t| t.assignments.len()).sum::<usize>();

    // θ* i* <= σ* on Br(X)
    let xs: Vec<GammaNode> = bx.nodes().collect();
    let ys: Vec<GammaNode> = by.nodes().collect();
    let eq4_fail: Vec<String> = exec
        .map(&xs, |&b| {
            let lhs = i_map.get(b).and_then(|ib| theta_map.get(ib));
            let rhs = sigma_x.get(b);
            match (lhs, rhs) {
                (Some(l), Some(s)) if gx.node_leq(l, s).unwrap_or(false) => None,
                (l, s) => Some(format!("{b}: θ*i* = {l:?}, σ* = {s:?}")),
            }
        })
        .into_iter()
        .flatten()
        .collect();

    // i* θ* <= σ* on Br(Y)
    let eq5_fail: Vec<String> = exec
        .map(&ys, |&c| {
            let lhs = theta_map.get(c).and_then(|tc| i_map.get(tc));
            let rhs = sigma_y.get(c);
            match (lhs, rhs) {
                (Some(l), Some(s)) if gy.node_leq(l, s).unwrap_or(false) => None,
                (l, s) => Some(format!("{c}: i*θ* = {l:?}, σ* = {s:?}")),
            }
        })
        .into_iter()
        .flatten()
        .collect();

    // b <= σ*(b) with the shift bound, on both trees
    let shift_check = |tree: &GammaTree, sigma: &PosetMap, b: GammaNode| -> (f64, Option<String>) {
        let s = tree.scale(b.scale_index);
        let Some(sb) = sigma.get(b) else {
            return (0.0, Some(format!("{b}: σ* undefined")));
        };
        let t = tree.scale(sb.scale_index);
        let top = tree
            .grid()
            .floor_index(s + 2.0 * r)
            .and_then(|j| tree.lift(b, j).ok());
        let ok = tree.node_leq(b, sb).unwrap_or(false)
            && top.is_some_and(|top| tree.node_leq(sb, top).unwrap_or(false))
            && t <= s + 2.0 * r;
        (
            t - s,
            (!ok).then(|| format!("{b}: σ* = {sb}, shift {}", t - s)),
        )
    };
    let mut max_shift: f64 = 0.0;
    let mut eq6_fail = Vec::new();
    for (shift, fail) in exec
        .map(&xs, |&b| shift_check(gx, &sigma_x, b))
        .into_iter()
        .chain(exec.map(&ys, |&c| shift_check(gy, &sigma_y, c)))
    {
        max_shift = max_shift.max(shift);
        eq6_fail.extend(fail);
    }
    eq6_fail.extend(sx_err);
    eq6_fail.extend(sy_err);

    // join compatibility of i*
    let pairs: Vec<(GammaNode, GammaNode)> = xs
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| xs[i..].iter().map(move |&b| (a, b)))
        .collect();
    let join_fail: Vec<String> = exec
        .map(&pairs, |&(a, b)| {
            let lhs = match (i_map.get(a), i_map.get(b)) {
                (Some(ia), Some(ib)) => by.branch_join(ia, ib).ok(),
                _ => None,
            };
            let rhs = bx.branch_join(a, b).ok().and_then(|j| i_map.get(j));
            match (lhs, rhs) {
                (Some(l), Some(rh)) if gy.node_leq(l, rh).unwrap_or(false) => None,
                (l, rh) => Some(format!("({a}, {b}): i*a ∪ i*b = {l:?}, i*(a ∪ b) = {rh:?}")),
            }
        })
        .into_iter()
        .flatten()
        .collect();

    // monotonicity
    let mut mono_fail = Vec::new();
    for (name, map, dom, cod) in [
        ("i*", &i_map, gx, gy),
        ("θ*", &theta_map, gy, gx),
        ("σ* on X", &sigma_x, gx, gx),
        ("σ* on Y", &sigma_y, gy, gy),
    ] {
        for (a, b) in map.monotonicity_violations(dom, cod) {
            mono_fail.push(format!("{name}: {a} <= {b} not preserved"));
        }
    }
    mono_fail.extend(i_err);
    let mono_checked = 2 * xs.len() * xs.len() + 2 * ys.len() * ys.len();

    // component-level diagram
    let mut pi0_checked = 0;
    let mut pi0_fail = Vec::new();
    for (c, f) in exec.map_range(y_scales, |ti| il.pi0_failures(ti)) {
        pi0_checked += c;
        pi0_fail.extend(f);
    }

    let checks = Checks {
        eq4: CheckResult::from_parts(xs.len(), eq4_fail),
        eq5: CheckResult::from_parts(ys.len(), eq5_fail),
        eq6: CheckResult::from_parts(xs.len() + ys.len(), eq6_fail),
        join_compat: CheckResult::from_parts(pairs.len(), join_fail),
        pi0_diagram: CheckResult::from_parts(pi0_checked, pi0_fail),
        monotone: CheckResult::from_parts(mono_checked, mono_fail),
        theta: CheckResult::from_parts(theta_checked, theta_fail),
    };
    let pass = checks.all().iter().all(|c| c.pass) && max_shift <= 2.0 * r;
    Ok(InterleavingReport {
        metric: pair.metric,
        k: pair.k,
        r,
        config_hausdorff: pair.config_distance,
        checks,
        max_shift,
        pass,
        error: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> PointCloud {
        PointCloud::from_line(v).unwrap()
    }

    fn worked(k: usize, r: Option<f64>) -> NestedPair {
        NestedPair::new(
            line(&[0.0, 1.0, 3.0]),
            line(&[0.0, 1.0, 1.5, 3.0]),
            k,
            Metric::Euclidean,
            r,
        )
        .unwrap()
    }

    fn n(i: usize, l: usize) -> GammaNode {
        GammaNode::new(i, l)
    }

    #[test]
    fn default_radius_exceeds() {
        assert_eq!(default_radius(1.0), 1.0 + 1e-9);
        let big = 1e12;
        assert!(default_radius(big) > big);
        let p = worked(1, None);
        assert_eq!(p.config_distance(), 1.0);
        assert!(p.r() > 1.0);
    }

    #[test]
    fn radius_and_nesting_validated() {
        let err = NestedPair::new(
            line(&[0.0, 1.0, 3.0]),
            line(&[0.0, 1.0, 1.5, 3.0]),
            1,
            Metric::Euclidean,
            Some(0.1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::RadiusTooSmall { .. }));
        let err = NestedPair::new(
            line(&[0.0, 2.0]),
            line(&[0.0, 1.0]),
            0,
            Metric::Euclidean,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotNested(1)));
    }

    #[test]
    fn theta_k0() {
        let p = worked(0, Some(0.6));
        let th = theta_vertex_map(&p, 1.0).unwrap();
        // Y indices: 0 -> 0, 1 -> 1, 1.5 -> 2, 3 -> 3; X indices 0, 1, 3 -> 0, 1, 2
        let got: Vec<(usize, usize)> = th.assignments.into_iter().collect();
        assert_eq!(got, vec![(0, 0), (1, 1), (2, 1), (3, 2)]);
    }

    #[test]
    fn theta_k1() {
        let p = worked(1, Some(1.1));
        let th = theta_vertex_map(&p, 1.0).unwrap();
        assert_eq!(
            th.assignments.keys().copied().collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        let w = &th.witnesses[&2];
        assert_eq!(w.pairs, vec![(2, 1), (1, 0)]);
        assert!(w.bottleneck <= 1.1);
        assert_eq!(th.get(2), Some(1));
    }

    #[test]
    fn undersized_radius_reports_hall_violator() {
        let p = NestedPair::with_radius_unchecked(
            line(&[0.0, 1.0, 3.0]),
            line(&[0.0, 1.0, 1.5, 3.0]),
            1,
            Metric::Euclidean,
            Some(0.1),
        )
        .unwrap();
        match theta_vertex_map(&p, 1.0) {
            Err(Error::WitnessUnavailable {
                subset, violator, ..
            }) => {
                assert_eq!(subset, vec![2, 1]);
                // 1.5 has no X point within 0.1 at all
                assert_eq!(violator, vec![2]);
            }
            other => panic!("expected witness failure, got {other:?}"),
        }
        assert!(verify_interleaving(&p).is_err());
    }

    #[test]
    fn worked_maps() {
        let p = worked(0, Some(0.6));
        let i = induced_map_i(&p).unwrap();
        // Y grid: 0, 0.5, 1, 1.5, 2, 3; X grid: 0, 1, 2, 3
        assert_eq!(i.get(n(1, 0)), Some(n(2, 0)));
        // both terminal: {0, 1, 1.5, 3} is already connected at 1.5 in Y
        assert_eq!(i.get(n(2, 0)), Some(n(3, 0)));
        let th = induced_map_theta(&p).unwrap();
        assert_eq!(th.get(n(2, 0)), Some(n(2, 0)));
        assert_eq!(th.get(n(3, 0)), Some(n(2, 0)));

        let dm = DistanceMatrix::new(p.x(), Metric::Euclidean);
        let gx = crate::hierarchy::build_gamma(&dm, 0);
        let bx = extract_branch_points(&gx);
        let sigma = induced_map_sigma(&bx, 0.6).unwrap();
        assert_eq!(sigma.get(n(0, 0)), Some(n(1, 0)));
        assert_eq!(sigma.get(n(1, 0)), Some(n(2, 0)));
        let ident = induced_map_sigma(&bx, 0.0).unwrap();
        assert!(ident.pairs.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn worked_report_passes() {
        let report = verify_interleaving(&worked(0, Some(0.6))).unwrap();
        for (name, c) in report.named_checks() {
            assert!(c.pass, "{name}: {:?}", c.failures);
        }
        assert!(report.pass);
        assert!(report.max_shift <= 1.2);
        let json = report.to_json();
        for key in [
            "eq4",
            "eq5",
            "eq6",
            "join_compat",
            "pi0_diagram",
            "max_shift",
        ] {
            assert!(json.contains(key));
        }
        let back: InterleavingReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn identical_sets() {
        let c = line(&[0.0, 1.0, 3.0, 4.5]);
        for k in 0..3 {
            let p = NestedPair::new(c.clone(), c.clone(), k, Metric::Euclidean, None).unwrap();
            assert_eq!(p.config_distance(), 0.0);
            let report = verify_interleaving(&p).unwrap();
            assert!(report.pass, "{report:?}");
            let i = induced_map_i(&p).unwrap();
            assert!(i.pairs.iter().all(|(a, b)| a == b));
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let p = worked(1, None);
        let a = verify_interleaving_with(&p, Execution::Sequential).unwrap();
        let b = verify_interleaving_with(&p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
