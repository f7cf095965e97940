//! Bottleneck injective matchings and the configuration-space Hausdorff
//! distance built on them.
//!
//! Under the sup metric on `Z^(k+1)`, the distance from a tuple of distinct
//! points to the nearest tuple of distinct target points only depends on the
//! underlying set, and equals the smallest threshold at which that set can
//! be matched injectively into the target. The directed Hausdorff distance
//! between configuration spaces is therefore the worst such threshold over
//! all `(k+1)`-subsets of the source.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::{Metric, PointCloud};

/// Distances from every source point (rows) to every target point (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct CrossDistances {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CrossDistances {
    pub fn new(source: &PointCloud, target: &PointCloud, metric: Metric) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                left: source.dim(),
                right: target.dim(),
            });
        }
        let entries = source
            .points()
            .flat_map(|p| target.points().map(move |q| metric.distance(p, q)))
            .collect();
        Ok(CrossDistances {
            rows: source.len(),
            cols: target.len(),
            entries,
        })
    }

    pub fn sources(&self) -> usize {
        self.rows
    }

    pub fn targets(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.entries[source * self.cols + target]
    }
}

/// An injective assignment of source points to target points.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetWitness {
    /// `(source, target)` pairs in the order the sources were given.
    pub pairs: Vec<(usize, usize)>,
    /// Largest assigned distance.
    pub bottleneck: f64,
}

impl SubsetWitness {
    pub fn target_of(&self, source: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|&&(s, _)| s == source)
            .map(|&(_, t)| t)
    }
}

/// Kuhn-style augmenting path matcher over a thresholded bipartite graph.
/// Candidate targets are tried in `(distance, target index)` order, which
/// fixes the assignment returned for a given threshold.
struct Matcher<'a> {
    cross: &'a CrossDistances,
    sources: &'a [usize],
    order: Vec<Vec<usize>>,
}

struct Matching {
    target_of: Vec<Option<usize>>,
    source_of: Vec<Option<usize>>,
}

impl<'a> Matcher<'a> {
    fn new(sources: &'a [usize], cross: &'a CrossDistances) -> Self {
        let order = sources
            .iter()
            .map(|&s| {
                let mut ts: Vec<usize> = (0..cross.cols).collect();
                ts.sort_by(|&a, &b| cross.get(s, a).total_cmp(&cross.get(s, b)).then(a.cmp(&b)));
                ts
            })
            .collect();
        Matcher {
            cross,
            sources,
            order,
        }
    }

    fn allowed(&self, pos: usize, threshold: f64) -> impl Iterator<Item = usize> + '_ {
        let s = self.sources[pos];
        self.order[pos]
            .iter()
            .copied()
            .take_while(move |&t| self.cross.get(s, t) <= threshold)
    }

    fn run(&self, threshold: f64) -> Matching {
        let mut m = Matching {
            target_of: vec![None; self.sources.len()],
            source_of: vec![None; self.cross.cols],
        };
        for pos in 0..self.sources.len() {
            let mut seen = vec![false; self.cross.cols];
            self.augment(pos, threshold, &mut seen, &mut m);
        }
        m
    }

    fn augment(&self, pos: usize, threshold: f64, seen: &mut [bool], m: &mut Matching) -> bool {
        for t in self.allowed(pos, threshold) {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            let free = match m.source_of[t] {
                None => true,
                Some(other) => self.augment(other, threshold, seen, m),
            };
            if free {
                m.source_of[t] = Some(pos);
                m.target_of[pos] = Some(t);
                return true;
            }
        }
        false
    }

    fn is_perfect(m: &Matching) -> bool {
        m.target_of.iter().all(Option::is_some)
    }
}

/// Minimum-bottleneck injective assignment of `sources` (row indices of
/// `cross`) into the targets. The optimal threshold is found by binary search
/// over the candidate distances; the assignment is the one the augmenting
/// path search produces at that threshold.
pub fn bottleneck_inject(sources: &[usize], cross: &CrossDistances) -> Result<SubsetWitness> {
    if sources.len() > cross.cols {
        return Err(Error::TupleTooLarge {
            needed: sources.len(),
            available: cross.cols,
        });
    }
    if sources.is_empty() {
        return Ok(SubsetWitness {
            pairs: Vec::new(),
            bottleneck: 0.0,
        });
    }
    let matcher = Matcher::new(sources, cross);

    // every source needs at least its nearest target
    let lower = sources
        .iter()
        .map(|&s| {
            (0..cross.cols)
                .map(|t| cross.get(s, t))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let mut candidates: Vec<f64> = sources
        .iter()
        .flat_map(|&s| (0..cross.cols).map(move |t| cross.get(s, t)))
        .filter(|&d| d >= lower)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // the largest candidate admits the complete bipartite graph, so it is feasible
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if Matcher::is_perfect(&matcher.run(candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    let m = matcher.run(candidates[lo]);
    let pairs: Vec<(usize, usize)> = sources
        .iter()
        .zip(&m.target_of)
        .map(|(&s, t)| (s, t.expect("threshold is feasible")))
        .collect();
    let bottleneck = pairs
        .iter()
        .map(|&(s, t)| cross.get(s, t))
        .fold(0.0, f64::max);
    Ok(SubsetWitness { pairs, bottleneck })
}

/// A subset of `sources` whose targets within `threshold` are too few to
/// match it injectively, or `None` when a full matching exists.
pub fn hall_violator(
    sources: &[usize],
    cross: &CrossDistances,
    threshold: f64,
) -> Option<Vec<usize>> {
    let matcher = Matcher::new(sources, cross);
    let m = matcher.run(threshold);
    let root = m.target_of.iter().position(Option::is_none)?;

    // alternating search from an unmatched source: every target reached is
    // matched, and the sources reached outnumber the targets by one
    let mut reached_source = vec![false; sources.len()];
    let mut reached_target = vec![false; cross.cols];
    let mut stack = vec![root];
    reached_source[root] = true;
    while let Some(pos) = stack.pop() {
        for t in matcher.allowed(pos, threshold) {
            if reached_target[t] {
                continue;
            }
            reached_target[t] = true;
            if let Some(next) = m.source_of[t] {
                if !reached_source[next] {
                    reached_source[next] = true;
                    stack.push(next);
                }
            }
        }
    }
    let mut violator: Vec<usize> = sources
        .iter()
        .zip(&reached_source)
        .filter_map(|(&s, &r)| r.then_some(s))
        .collect();
    violator.sort_unstable();
    Some(violator)
}

/// Directed Hausdorff distance from the `(k+1)`-configurations of `source`
/// to those of `target` under the sup product metric.
pub fn directed_config_hausdorff(
    source: &PointCloud,
    target: &PointCloud,
    k: usize,
    metric: Metric,
    exec: Execution,
) -> Result<f64> {
    let size = k + 1;
    for cloud in [source, target] {
        if size > cloud.len() {
            return Err(Error::TupleTooLarge {
                needed: size,
                available: cloud.len(),
            });
        }
    }
    let cross = CrossDistances::new(source, target, metric)?;
    let subsets: Vec<Vec<usize>> = (0..source.len()).combinations(size).collect();
    let value = exec.max_f64(&subsets, |s| {
        bottleneck_inject(s, &cross)
            .expect("subset fits in target")
            .bottleneck
    });
    Ok(value.unwrap_or(0.0))
}

pub fn config_hausdorff_distance(
    x: &PointCloud,
    y: &PointCloud,
    k: usize,
    metric: Metric,
) -> Result<f64> {
    config_hausdorff_distance_with(x, y, k, metric, Execution::default())
}

pub fn config_hausdorff_distance_with(
    x: &PointCloud,
    y: &PointCloud,
    k: usize,
    metric: Metric,
    exec: Execution,
) -> Result<f64> {
    let forward = directed_config_hausdorff(x, y, k, metric, exec)?;
    let backward = directed_config_hausdorff(y, x, k, metric, exec)?;
    Ok(forward.max(backward))
}
