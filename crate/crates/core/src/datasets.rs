//! Seeded synthetic datasets, preprocessing and CSV interchange.
//!
//! Corners: four L-shaped clusters, one per quadrant. Cluster q lives in
//! quadrant q (counter-clockwise from the positive quadrant). Each L has its
//! elbow at (±1, ±1); half of the points lie on the horizontal arm
//! x = ±u, y = ±1 and half on the vertical arm x = ±1, y = ±u, with
//! u ~ U[0.2, 1], plus uniform jitter in ±0.05 on both coordinates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;

/// One applied preprocessing step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "step")]
pub enum Transform {
    Standardize { means: Vec<f64>, stddevs: Vec<f64> },
    MinMax { mins: Vec<f64>, maxs: Vec<f64>, lo: f64, hi: f64 },
    /// The feature had zero variance and was set to the range midpoint.
    ConstantFeature { feature: usize },
    Polar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    pub name: String,
    pub seed: u64,
    pub preprocessing: Vec<Transform>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, points: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Shape("rows have differing lengths".into()));
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::Shape(format!(
                    "{} points but {} labels",
                    points.len(),
                    l.len()
                )));
            }
        }
        Ok(Self {
            points,
            labels,
            name: name.into(),
            seed: 0,
            preprocessing: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Number of distinct classes implied by the labels (max label + 1).
    pub fn n_classes(&self) -> Option<usize> {
        self.labels.as_ref().and_then(|l| l.iter().max().map(|m| m + 1))
    }

    /// Per-feature minimum and maximum.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.dim())
            .map(|f| {
                self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[f]), hi.max(p[f]))
                })
            })
            .collect()
    }
}

fn normal(stddev: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, stddev).map_err(|e| Error::Argument(e.to_string()))
}

fn generator(seed: u64, tag: u64) -> ChaCha8Rng {
    stream(seed, &[0xda7a, tag])
}

/// Isotropic Gaussian clouds. Without `centers`, k centers are drawn
/// uniformly from [−10, 10]².
pub fn make_blobs(
    n_per_cluster: usize,
    k: usize,
    centers: Option<&[Vec<f64>]>,
    stddev: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(stddev > 0.0) {
        return Err(Error::Argument(format!("stddev must be positive, got {stddev}")));
    }
    if k == 0 {
        return Err(Error::Argument("k must be positive".into()));
    }
    let mut rng = generator(seed, 1);
    let centers: Vec<Vec<f64>> = match centers {
        Some(c) if c.len() != k => {
            return Err(Error::Shape(format!("{} centers given for k = {k}", c.len())))
        }
        Some(c) => c.to_vec(),
        None => (0..k)
            .map(|_| vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
            .collect(),
    };
    let noise = normal(stddev)?;
    let mut points = Vec::with_capacity(n_per_cluster * k);
    let mut labels = Vec::with_capacity(n_per_cluster * k);
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..n_per_cluster {
            points.push(c.iter().map(|v| v + noise.sample(&mut rng)).collect());
            labels.push(label);
        }
    }
    let mut ds = Dataset::new("blobs", points, Some(labels))?;
    ds.seed = seed;
    Ok(ds)
}

/// Concentric circles around the origin, one class per radius.
pub fn make_circles(n_per_cluster: usize, radii: &[f64], noise: f64, seed: u64) -> Result<Dataset> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return Err(Error::Argument(format!(
            "radii must be non-negative and strictly increasing, got {radii:?}"
        )));
    }
    if !(noise >= 0.0) {
        return Err(Error::Argument(format!("noise must be non-negative, got {noise}")));
    }
    let mut rng = generator(seed, 2);
    let jitter = if noise > 0.0 { Some(normal(noise)?) } else { None };
    let mut points = Vec::with_capacity(n_per_cluster * radii.len());
    let mut labels = Vec::with_capacity(n_per_cluster * radii.len());
    for (label, &r) in radii.iter().enumerate() {
        for _ in 0..n_per_cluster {
            let angle = rng.random_range(0.0..2.0 * PI);
            let radius = r + jitter.map_or(0.0, |d| d.sample(&mut rng));
            points.push(vec![radius * angle.cos(), radius * angle.sin()]);
            labels.push(label);
        }
    }
    let mut ds = Dataset::new("circles", points, Some(labels))?;
    ds.seed = seed;
    Ok(ds)
}

/// Two interleaving half circles: (cos t, sin t) and (1 − cos t, 0.5 − sin t)
/// for t ~ U[0, π], plus isotropic Gaussian noise.
pub fn make_moons(n_per_cluster: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if !(noise >= 0.0) {
        return Err(Error::Argument(format!("noise must be non-negative, got {noise}")));
    }
    let mut rng = generator(seed, 3);
    let jitter = if noise > 0.0 { Some(normal(noise)?) } else { None };
    let mut points = Vec::with_capacity(2 * n_per_cluster);
    let mut labels = Vec::with_capacity(2 * n_per_cluster);
    for label in 0..2 {
        for _ in 0..n_per_cluster {
            let t = rng.random_range(0.0..=PI);
            let (x, y) = if label == 0 {
                (t.cos(), t.sin())
            } else {
                (1.0 - t.cos(), 0.5 - t.sin())
            };
            let (dx, dy) = match jitter {
                Some(d) => (d.sample(&mut rng), d.sample(&mut rng)),
                None => (0.0, 0.0),
            };
            points.push(vec![x + dx, y + dy]);
            labels.push(label);
        }
    }
    let mut ds = Dataset::new("moons", points, Some(labels))?;
    ds.seed = seed;
    Ok(ds)
}

/// Four L-shaped clusters, one per quadrant (see module docs).
pub fn make_corners(n_per_cluster: usize, seed: u64) -> Result<Dataset> {
    if n_per_cluster == 0 {
        return Err(Error::Argument("n_per_cluster must be positive".into()));
    }
    let mut rng = generator(seed, 4);
    let signs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let mut points = Vec::with_capacity(4 * n_per_cluster);
    let mut labels = Vec::with_capacity(4 * n_per_cluster);
    for (label, (sx, sy)) in signs.iter().enumerate() {
        for i in 0..n_per_cluster {
            let u = rng.random_range(0.2..=1.0);
            let (x, y) = if i % 2 == 0 { (u, 1.0) } else { (1.0, u) };
            let jx = rng.random_range(-0.05..=0.05);
            let jy = rng.random_range(-0.05..=0.05);
            points.push(vec![sx * (x + jx), sy * (y + jy)]);
            labels.push(label);
        }
    }
    let mut ds = Dataset::new("corners", points, Some(labels))?;
    ds.seed = seed;
    Ok(ds)
}

/// Default target range for feature angles.
pub const DEFAULT_RANGE: (f64, f64) = (-FRAC_PI_2, FRAC_PI_2);

/// Per-feature standardization followed by a min-max map into `range`.
pub fn preprocess(dataset: &Dataset, range: (f64, f64)) -> Result<Dataset> {
    if dataset.is_empty() {
        return Err(Error::Argument("cannot preprocess an empty dataset".into()));
    }
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::Argument(format!("invalid target range [{lo}, {hi}]")));
    }
    let n = dataset.len() as f64;
    let dim = dataset.dim();
    let mut out = dataset.clone();
    let mut means = vec![0.0; dim];
    let mut stddevs = vec![0.0; dim];
    let mut constant = Vec::new();
    for f in 0..dim {
        let mean = dataset.points.iter().map(|p| p[f]).sum::<f64>() / n;
        let var = dataset.points.iter().map(|p| (p[f] - mean).powi(2)).sum::<f64>() / n;
        means[f] = mean;
        stddevs[f] = var.sqrt();
        if !(stddevs[f] > 0.0) {
            constant.push(f);
        }
    }
    for p in &mut out.points {
        for f in 0..dim {
            p[f] = if constant.contains(&f) { 0.0 } else { (p[f] - means[f]) / stddevs[f] };
        }
    }
    out.preprocessing.push(Transform::Standardize { means, stddevs });

    let bounds = out.bounds();
    let mid = 0.5 * (lo + hi);
    for p in &mut out.points {
        for (f, (min, max)) in bounds.iter().enumerate() {
            p[f] = if constant.contains(&f) || max <= min {
                mid
            } else {
                // pin the extremes so the endpoints land exactly on the bounds
                let t = (p[f] - min) / (max - min);
                if t <= 0.0 {
                    lo
                } else if t >= 1.0 {
                    hi
                } else {
                    lo + t * (hi - lo)
                }
            };
        }
    }
    out.preprocessing.push(Transform::MinMax {
        mins: bounds.iter().map(|b| b.0).collect(),
        maxs: bounds.iter().map(|b| b.1).collect(),
        lo,
        hi,
    });
    out.preprocessing
        .extend(constant.into_iter().map(|feature| Transform::ConstantFeature { feature }));
    Ok(out)
}

/// (x, y) → (r, φ) with φ = atan2(y, x) ∈ (−π, π].
pub fn to_polar(dataset: &Dataset) -> Result<Dataset> {
    if dataset.dim() != 2 {
        return Err(Error::Shape(format!(
            "polar transform needs 2 features, got {}",
            dataset.dim()
        )));
    }
    let mut out = dataset.clone();
    for p in &mut out.points {
        let (x, y) = (p[0], p[1]);
        let mut phi = y.atan2(x);
        if phi == -PI {
            phi = PI;
        }
        *p = vec![x.hypot(y), phi];
    }
    out.preprocessing.push(Transform::Polar);
    Ok(out)
}

/// Writes `x1,…,xd[,label]` rows; floats use the shortest exact representation.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=dataset.dim()).map(|i| format!("x{i}")).collect();
    if dataset.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, p) in dataset.points.iter().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        if let Some(l) = &dataset.labels {
            row.push(l[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R, name: &str) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers()?.clone();
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    let has_label = cols.last() == Some(&"label");
    let dim = cols.len() - usize::from(has_label);
    if dim == 0 || cols[..dim].iter().enumerate().any(|(i, c)| *c != format!("x{}", i + 1)) {
        return Err(Error::Parse(format!(
            "expected header x1,…,xd[,label], found '{}'",
            cols.join(",")
        )));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in r.records().enumerate() {
        let line = row + 2;
        let record = record?;
        if record.len() != cols.len() {
            return Err(Error::Parse(format!(
                "row {line}: expected {} fields, found {}",
                cols.len(),
                record.len()
            )));
        }
        let mut p = Vec::with_capacity(dim);
        for field in record.iter().take(dim) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {line}: '{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {line}: non-finite value")));
            }
            p.push(v);
        }
        points.push(p);
        if has_label {
            let field = record[dim].trim();
            labels.push(
                field
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {line}: '{field}' is not a label")))?,
            );
        }
    }
    Dataset::new(name, points, has_label.then_some(labels))
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(dataset, std::io::BufWriter::new(file))
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(std::io::BufReader::new(file), &name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_counts_and_degenerate_spread() {
        let ds = make_blobs(100, 3, None, 1.0, 4).unwrap();
        assert_eq!(ds.len(), 300);
        let labels = ds.labels.as_ref().unwrap();
        for c in 0..3 {
            assert_eq!(labels.iter().filter(|l| **l == c).count(), 100);
        }
        let centers = vec![vec![1.0, 2.0], vec![-3.0, 0.5]];
        let tight = make_blobs(20, 2, Some(&centers), 1e-9, 1).unwrap();
        for (p, l) in tight.points.iter().zip(tight.labels.unwrap()) {
            let c = &centers[l];
            assert!((p[0] - c[0]).abs() < 1e-6 && (p[1] - c[1]).abs() < 1e-6);
        }
        assert!(make_blobs(10, 2, None, 0.0, 1).is_err());
        assert_eq!(make_blobs(10, 2, None, 0.3, 8).unwrap(), make_blobs(10, 2, None, 0.3, 8).unwrap());
    }

    #[test]
    fn circles_without_noise_sit_on_their_radius() {
        let ds = make_circles(50, &[1.0, 2.0], 0.0, 3).unwrap();
        for (p, l) in ds.points.iter().zip(ds.labels.unwrap()) {
            let r = p[0].hypot(p[1]);
            assert!((r - [1.0, 2.0][l]).abs() < 1e-12);
        }
        assert!(make_circles(5, &[2.0, 1.0], 0.1, 0).is_err());
        assert!(make_circles(5, &[1.0, 1.0], 0.1, 0).is_err());
    }

    #[test]
    fn moons_construction() {
        let ds = make_moons(40, 0.0, 6).unwrap();
        let labels = ds.labels.as_ref().unwrap();
        assert_eq!(labels.iter().filter(|l| **l == 0).count(), 40);
        assert_eq!(labels.iter().filter(|l| **l == 1).count(), 40);
        for (p, l) in ds.points.iter().zip(labels) {
            if *l == 0 {
                assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(make_moons(40, 0.1, 6).unwrap(), make_moons(40, 0.1, 6).unwrap());
    }

    #[test]
    fn corners_occupy_their_quadrants() {
        let ds = make_corners(25, 2).unwrap();
        assert_eq!(ds.n_classes(), Some(4));
        let signs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        for (p, &l) in ds.points.iter().zip(ds.labels.as_ref().unwrap()) {
            let (sx, sy) = signs[l];
            assert!(p[0] * sx > 0.0 && p[1] * sy > 0.0);
        }
        assert_eq!(ds, make_corners(25, 2).unwrap());
    }

    #[test]
    fn preprocess_cases() {
        let ds = Dataset::new("t", vec![vec![-1.0, 5.0], vec![1.0, 5.0]], None).unwrap();
        let out = preprocess(&ds, DEFAULT_RANGE).unwrap();
        assert_eq!(out.points[0][0], -FRAC_PI_2);
        assert_eq!(out.points[1][0], FRAC_PI_2);
        assert_eq!(out.points[0][1], 0.0);
        assert!(out
            .preprocessing
            .contains(&Transform::ConstantFeature { feature: 1 }));
        let empty = Dataset::new("e", vec![], None).unwrap();
        assert!(preprocess(&empty, DEFAULT_RANGE).is_err());
    }

    #[test]
    fn polar_axis_points() {
        let ds = Dataset::new("p", vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, -0.0]], None)
            .unwrap();
        let out = to_polar(&ds).unwrap();
        assert_eq!(out.points[0], vec![1.0, 0.0]);
        assert_eq!(out.points[1], vec![2.0, FRAC_PI_2]);
        assert_eq!(out.points[2][1], PI);
        let three = Dataset::new("t", vec![vec![1.0, 2.0, 3.0]], None).unwrap();
        assert!(matches!(to_polar(&three), Err(Error::Shape(_))));
    }

    #[test]
    fn csv_rejects_malformed_input() {
        let bad = "x1,x2,label\n0.5,1.0,0\n0.25,oops,1\n";
        let err = read_csv(bad.as_bytes(), "bad").unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
        assert!(read_csv("a,b\n1,2\n".as_bytes(), "bad").is_err());
        let unlabeled = read_csv("x1,x2\n1,2\n3,4\n".as_bytes(), "ok").unwrap();
        assert_eq!(unlabeled.labels, None);
        assert_eq!(unlabeled.points, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
