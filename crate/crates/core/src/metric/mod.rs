//! Point clouds, distances, the phase-change scale grid and Hausdorff
//! distances between point sets and between their distinct-tuple
//! configuration spaces.

mod ingest;
mod matching;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{read_csv, read_csv_path, CsvOptions, Ingested};
pub use matching::{
    bottleneck_inject, config_hausdorff_distance, config_hausdorff_distance_with,
    directed_config_hausdorff, hall_violator, CrossDistances, SubsetWitness,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.sum(),
            Metric::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "manhattan" => Ok(Metric::Manhattan),
            "chebyshev" => Ok(Metric::Chebyshev),
            _ => Err(Error::UnknownMetric(s.to_owned())),
        }
    }
}

/// A finite set of distinct points sharing one dimension. Point ids are the
/// row positions `0..len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

/// Hashable identity of a coordinate vector; `-0.0` and `0.0` coincide.
fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|&x| (x + 0.0).to_bits()).collect()
}

impl PointCloud {
    /// Builds a cloud, rejecting ragged rows, non-finite values and repeated
    /// points.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (cloud, dropped) = Self::build(rows, false)?;
        debug_assert!(dropped.is_empty());
        Ok(cloud)
    }

    /// Like [`PointCloud::new`], but keeps only the first copy of a repeated
    /// point. Returns the dropped row positions alongside the cloud.
    pub fn dedup(rows: Vec<Vec<f64>>) -> Result<(Self, Vec<usize>)> {
        Self::build(rows, true)
    }

    fn build(rows: Vec<Vec<f64>>, dedup: bool) -> Result<(Self, Vec<usize>)> {
        let dim = rows.first().ok_or(Error::EmptyCloud)?.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(rows.len());
        let mut coords = Vec::with_capacity(rows.len() * dim);
        let mut dropped = Vec::new();
        for (row, p) in rows.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::RaggedRow {
                    row,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(column) = p.iter().position(|x| !x.is_finite()) {
                return Err(Error::BadValue {
                    row,
                    column,
                    reason: "coordinate is not finite".into(),
                });
            }
            match seen.get(&point_key(p)) {
                Some(&first) if !dedup => return Err(Error::DuplicatePoint { first, second: row }),
                Some(_) => dropped.push(row),
                None => {
                    seen.insert(point_key(p), row);
                    coords.extend_from_slice(p);
                }
            }
        }
        Ok((PointCloud { dim, coords }, dropped))
    }

    /// Points on the real line.
    pub fn from_line(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// For each point of `self`, its position in `other` (exact coordinate
    /// match). Fails on the first point of `self` missing from `other`.
    pub fn embed_into(&self, other: &PointCloud) -> Result<Vec<usize>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let index: HashMap<Vec<u64>, usize> = other
            .points()
            .enumerate()
            .map(|(i, p)| (point_key(p), i))
            .collect();
        self.points()
            .enumerate()
            .map(|(i, p)| index.get(&point_key(p)).copied().ok_or(Error::NotNested(i)))
            .collect()
    }
}

/// Symmetric matrix of pairwise distances within one cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    pub fn new(cloud: &PointCloud, metric: Metric) -> Self {
        let n = cloud.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = metric.distance(cloud.point(i), cloud.point(j));
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix { n, entries, metric }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Off-diagonal entries `d(i, j)` with `i < j`.
    pub fn pairwise(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }

    pub fn diameter(&self) -> f64 {
        self.pairwise().fold(0.0, f64::max)
    }
}

pub fn distance_matrix(cloud: &PointCloud, metric: Metric) -> DistanceMatrix {
    DistanceMatrix::new(cloud, metric)
}

/// Sorted, strictly increasing list of phase-change numbers: zero together
/// with every pairwise distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaleGrid {
    scales: Vec<f64>,
}

impl ScaleGrid {
    pub fn from_scales(scales: Vec<f64>) -> Result<Self> {
        if scales.first() != Some(&0.0) {
            return Err(Error::MalformedTree("scale grid must start at 0".into()));
        }
        if scales.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::MalformedTree(
                "scale grid must be strictly increasing".into(),
            ));
        }
        Ok(ScaleGrid { scales })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scales
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.scales.get(i).copied()
    }

    pub fn last_index(&self) -> usize {
        self.scales.len() - 1
    }

    /// Index of the largest grid value `<= s`, or `None` when `s < 0`.
    pub fn floor_index(&self, s: f64) -> Option<usize> {
        self.scales.partition_point(|&g| g <= s).checked_sub(1)
    }

    /// Index of the grid value exactly equal to `s`.
    pub fn index_of(&self, s: f64) -> Option<usize> {
        self.scales.binary_search_by(|g| g.total_cmp(&s)).ok()
    }
}

impl std::ops::Index<usize> for ScaleGrid {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.scales[i]
    }
}

pub fn phase_change_scales(dm: &DistanceMatrix) -> ScaleGrid {
    let mut scales: Vec<f64> = std::iter::once(0.0).chain(dm.pairwise()).collect();
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    ScaleGrid { scales }
}

/// Phase-change grid where positive distances closer than `epsilon` to their
/// predecessor are chained into one group, represented by the group's largest
/// value. Zero is never merged. `epsilon <= 0` gives the exact grid.
pub fn phase_change_scales_merged(dm: &DistanceMatrix, epsilon: f64) -> ScaleGrid {
    let exact = phase_change_scales(dm);
    if !(epsilon > 0.0) {
        return exact;
    }
    let mut scales = vec![0.0];
    let mut prev = None::<f64>;
    for &s in &exact.scales[1..] {
        match prev {
            Some(p) if s - p <= epsilon => *scales.last_mut().unwrap() = s,
            _ => scales.push(s),
        }
        prev = Some(s);
    }
    ScaleGrid { scales }
}

fn check_dims(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `max_{a in A} min_{b in B} d(a, b)`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud, metric: Metric) -> Result<f64> {
    check_dims(a, b)?;
    Ok(a.points()
        .map(|p| {
            b.points()
                .map(|q| metric.distance(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud, metric: Metric) -> Result<f64> {
    Ok(directed_hausdorff(a, b, metric)?.max(directed_hausdorff(b, a, metric)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> PointCloud {
        PointCloud::from_line(v).unwrap()
    }

    #[test]
    fn line_distances() {
        let dm = DistanceMatrix::new(&line(&[0.0, 1.0, 3.0]), Metric::Euclidean);
        assert_eq!(dm.get(0, 1), 1.0);
        assert_eq!(dm.get(0, 2), 3.0);
        assert_eq!(dm.get(1, 2), 2.0);
        assert_eq!(dm.get(2, 1), 2.0);
    }

    #[test]
    fn single_point_matrix() {
        let dm = DistanceMatrix::new(&line(&[4.0]), Metric::Euclidean);
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.get(0, 0), 0.0);
        assert_eq!(phase_change_scales(&dm).as_slice(), &[0.0]);
    }

    #[test]
    fn chebyshev_square() {
        let sq = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let dm = distance_matrix(&sq, "chebyshev".parse().unwrap());
        assert!(dm.pairwise().all(|d| d == 1.0));
        let dm = distance_matrix(&sq, Metric::Manhattan);
        assert_eq!(dm.get(0, 3), 2.0);
    }

    #[test]
    fn unknown_metric_label() {
        assert!(matches!(
            "cosine".parse::<Metric>(),
            Err(Error::UnknownMetric(_))
        ));
    }

    #[test]
    fn grids() {
        let dm = DistanceMatrix::new(&line(&[0.0, 1.0, 3.0]), Metric::Euclidean);
        assert_eq!(phase_change_scales(&dm).as_slice(), &[0.0, 1.0, 2.0, 3.0]);
        let dm = DistanceMatrix::new(&line(&[0.0, 1.0, 2.0]), Metric::Euclidean);
        assert_eq!(phase_change_scales(&dm).as_slice(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn merged_grid_keeps_group_maximum() {
        let dm = DistanceMatrix::new(&line(&[0.0, 1.0, 2.001, 5.0]), Metric::Euclidean);
        let exact = phase_change_scales(&dm);
        assert_eq!(exact.len(), 7);
        let merged = phase_change_scales_merged(&dm, 0.01);
        // only d(0,1) = 1 and d(1,2) ~ 1.001 are within epsilon
        assert_eq!(merged.as_slice()[1], dm.get(1, 2));
        assert_eq!(merged.len(), 6);
        assert_eq!(phase_change_scales_merged(&dm, 0.0), exact);
    }

    #[test]
    fn floor_lookup() {
        let g = ScaleGrid::from_scales(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.floor_index(2.2), Some(2));
        assert_eq!(g.floor_index(2.0), Some(2));
        assert_eq!(g.floor_index(99.0), Some(3));
        assert_eq!(g.floor_index(-1.0), None);
        assert_eq!(g.index_of(3.0), Some(3));
        assert_eq!(g.index_of(2.5), None);
        assert!(ScaleGrid::from_scales(vec![0.0, 1.0, 1.0]).is_err());
        assert!(ScaleGrid::from_scales(vec![1.0]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let a = line(&[0.0, 1.0, 3.0]);
        let b = line(&[0.0, 1.0, 1.5, 3.0]);
        assert_eq!(hausdorff_distance(&a, &b, Metric::Euclidean).unwrap(), 0.5);
        assert_eq!(hausdorff_distance(&b, &a, Metric::Euclidean).unwrap(), 0.5);
        assert_eq!(hausdorff_distance(&a, &a, Metric::Euclidean).unwrap(), 0.0);
        assert_eq!(
            hausdorff_distance(&line(&[0.0]), &line(&[5.0]), Metric::Euclidean).unwrap(),
            5.0
        );
        let plane = PointCloud::new(vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            hausdorff_distance(&a, &plane, Metric::Euclidean),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cloud_validation() {
        assert!(matches!(PointCloud::new(vec![]), Err(Error::EmptyCloud)));
        assert!(matches!(
            PointCloud::new(vec![vec![1.0, 2.0], vec![1.0]]),
            Err(Error::RaggedRow { row: 1, .. })
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![1.0], vec![2.0], vec![1.0]]),
            Err(Error::DuplicatePoint {
                first: 0,
                second: 2
            })
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![0.0], vec![-0.0]]),
            Err(Error::DuplicatePoint { .. })
        ));
        assert!(PointCloud::new(vec![vec![f64::NAN]]).is_err());
        let (c, dropped) = PointCloud::dedup(vec![vec![1.0], vec![2.0], vec![1.0]]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(dropped, vec![2]);
    }

    #[test]
    fn embedding() {
        let x = line(&[0.0, 1.0, 3.0]);
        let y = line(&[0.0, 1.0, 1.5, 3.0]);
        assert_eq!(x.embed_into(&y).unwrap(), vec![0, 1, 3]);
        assert!(matches!(y.embed_into(&x), Err(Error::NotNested(2))));
    }
}
