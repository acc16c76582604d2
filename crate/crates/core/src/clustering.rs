//! Kernel k-means on embedded states, simulated exactly.
//!
//! Each iteration embeds the current centroids, evaluates the kernel
//! K(xᵢ, c_j) = |⟨xᵢ|c_j⟩|² (exactly or through a swap-test estimator),
//! labels every point by its largest kernel value and moves each centroid to
//! the mean of its members. Iteration stops once no centroid moves by more
//! than `eps3` in data space.
//!
//! Two centroid representations are available. [`CentroidMode::DataMean`]
//! re-embeds the data-space mean. [`CentroidMode::Ensemble`] keeps the
//! centroid in feature space as the member ensemble ρ_j, scores points by
//! ⟨x|ρ_j|x⟩ − ½tr(ρ_j²) (nearest ensemble in Hilbert–Schmidt distance), and
//! is the one that can separate clusters sharing a data-space mean, such as
//! concentric circles.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_map::{embed, embed_all, FeatureMapSpec, ThetaParams};
use crate::quantum::{estimate_kernel, fidelity, DensityMatrix, EstimationMode, Statevector};
use crate::rng::{derive_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CentroidMode {
    #[default]
    DataMean,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterConfig {
    pub k: usize,
    /// Largest centroid movement (data-space units) still counted as converged.
    pub eps3: f64,
    pub max_iterations: usize,
    pub estimation: EstimationMode,
    pub seed: u64,
    pub centroid_mode: CentroidMode,
    /// Independent k-means++ starts; the partition with the smallest
    /// feature-space scatter is kept.
    pub restarts: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k: 2,
            eps3: 1e-4,
            max_iterations: 100,
            estimation: EstimationMode::Exact,
            seed: 0,
            centroid_mode: CentroidMode::DataMean,
            restarts: 1,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Argument(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.eps3 > 0.0) {
            return Err(Error::Argument("eps3 must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Argument("max_iterations must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Argument("restarts must be positive".into()));
        }
        match self.estimation {
            EstimationMode::Shots { shots: 0 } => {
                Err(Error::Argument("shot count must be positive".into()))
            }
            EstimationMode::AmplitudeEstimation { iterations } if iterations < 2 => {
                Err(Error::Argument("amplitude estimation needs P >= 2".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A cluster that came out empty and was reseeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairEvent {
    pub iteration: usize,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub centroids_data: Vec<Vec<f64>>,
    /// Embeddings of `centroids_data`.
    pub centroid_states: Vec<Statevector>,
    pub labels: Vec<usize>,
    pub characteristic_states: Vec<Statevector>,
    /// N×k kernel values from the final labelling pass.
    pub gram: Vec<Vec<f64>>,
    pub iterations_run: usize,
    pub converged: bool,
    pub repairs: Vec<RepairEvent>,
    /// Σᵢ ‖|xᵢ⟩⟨xᵢ| − ρ_{lᵢ}‖²_HS for the final partition.
    pub scatter: f64,
    /// Index of the restart that produced this model.
    pub restart: usize,
}

/// k-means++ seeding in data space.
pub fn kmeans_pp_init(data: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("cannot pick {k} centroids from {n} points")));
    }
    let mut rng = stream(seed, &[0x6b70]);
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = data.iter().map(|x| sq_dist(x, &data[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, d) in nearest.iter().enumerate() {
                acc += d;
                if *d > 0.0 && target < acc {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave target just past the final partial sum
            pick.unwrap_or_else(|| nearest.iter().rposition(|d| *d > 0.0).unwrap())
        } else {
            // only duplicates of chosen points remain
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (d, x) in nearest.iter_mut().zip(data) {
            *d = d.min(sq_dist(x, &data[next]));
        }
    }
    Ok(chosen.into_iter().map(|i| data[i].clone()).collect())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Something a point can be compared against through the fidelity kernel.
pub trait KernelCentroid: Sync {
    fn register_dim(&self) -> usize;
    /// Exact kernel value against `x`.
    fn kernel(&self, x: &Statevector) -> Result<f64>;
}

impl KernelCentroid for Statevector {
    fn register_dim(&self) -> usize {
        self.dim()
    }

    fn kernel(&self, x: &Statevector) -> Result<f64> {
        fidelity(x, self)
    }
}

impl KernelCentroid for DensityMatrix {
    fn register_dim(&self) -> usize {
        self.dim()
    }

    fn kernel(&self, x: &Statevector) -> Result<f64> {
        self.expectation(x)
    }
}

/// N×k matrix of kernel values between points and centroids.
///
/// Sampled entries use the seed derived from `(seed, i, j)`, so the result
/// does not depend on evaluation order.
pub fn kernel_matrix<C: KernelCentroid>(
    points: &[Statevector],
    centroids: &[C],
    mode: EstimationMode,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if let Some(p) = points.iter().find(|p| centroids.iter().any(|c| c.register_dim() != p.dim())) {
        return Err(Error::Shape(format!(
            "point of dimension {} does not match every centroid",
            p.dim()
        )));
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            centroids
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let k = c.kernel(x)?.clamp(0.0, 1.0);
                    match mode {
                        EstimationMode::Exact => Ok(k),
                        _ => {
                            let entry_seed = derive_seed(seed, &[i as u64, j as u64]);
                            Ok(estimate_kernel((1.0 + k) / 2.0, mode, entry_seed)?.kernel_hat)
                        }
                    }
                })
                .collect()
        })
        .collect()
}

/// Row-wise argmax; ties go to the smallest column.
pub fn assign_labels(gram: &[Vec<f64>]) -> Vec<usize> {
    gram.iter()
        .map(|row| {
            let mut best = 0;
            for (j, v) in row.iter().enumerate().skip(1) {
                if *v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Normalized superposition of the members of cluster `j`.
///
/// The amplitude sum is divided by its own norm, which coincides with
/// 1/√|C_j| only when the members are mutually orthogonal.
pub fn characteristic_state(points: &[Statevector], labels: &[usize], j: usize) -> Result<Statevector> {
    if points.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    let mut members = points.iter().zip(labels).filter(|(_, l)| **l == j).map(|(p, _)| p);
    let first = members.next().ok_or(Error::EmptyCluster(j))?;
    let mut sum = first.amplitudes().to_vec();
    for p in members {
        if p.dim() != sum.len() {
            return Err(Error::Shape("cluster mixes register sizes".into()));
        }
        for (s, a) in sum.iter_mut().zip(p.amplitudes()) {
            *s += a;
        }
    }
    Statevector::from_amplitudes(sum).map_err(|e| match e {
        // members that cancel exactly leave no state to normalize
        Error::Argument(_) => Error::Argument(format!("members of cluster {j} sum to zero")),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidUpdate {
    pub centroids: Vec<Vec<f64>>,
    /// Clusters that had no members and were reseeded.
    pub reseeded: Vec<usize>,
}

/// Member means in data space. An empty cluster is reseeded to the point
/// farthest from its nearest centroid.
pub fn update_centroids(
    data: &[Vec<f64>],
    labels: &[usize],
    k: usize,
    current: &[Vec<f64>],
) -> Result<CentroidUpdate> {
    if data.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} points but {} labels",
            data.len(),
            labels.len()
        )));
    }
    if let Some(l) = labels.iter().find(|l| **l >= k) {
        return Err(Error::Argument(format!("label {l} out of range for k = {k}")));
    }
    let dim = data.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &l) in data.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut centroids: Vec<Option<Vec<f64>>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| (c > 0).then(|| s.into_iter().map(|v| v / c as f64).collect()))
        .collect();

    let mut reseeded = Vec::new();
    for j in 0..k {
        if centroids[j].is_some() {
            continue;
        }
        let reference: Vec<&Vec<f64>> = (0..k)
            .filter(|&i| i != j)
            .filter_map(|i| centroids[i].as_ref().or(current.get(i)))
            .collect();
        let far = data
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let d = reference
                    .iter()
                    .map(|c| sq_dist(x, c))
                    .fold(f64::INFINITY, f64::min);
                (i, d)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        centroids[j] = Some(data[far].clone());
        reseeded.push(j);
    }
    Ok(CentroidUpdate {
        centroids: centroids.into_iter().map(Option::unwrap).collect(),
        reseeded,
    })
}

/// Σᵢ (1 − 2⟨xᵢ|ρ_{lᵢ}|xᵢ⟩ + tr ρ_{lᵢ}²) over the exact member ensembles.
pub fn feature_scatter(points: &[Statevector], labels: &[usize], k: usize) -> Result<f64> {
    let ensembles = member_ensembles(points, labels, k)?;
    let mut total = 0.0;
    for (x, &l) in points.iter().zip(labels) {
        if let Some(rho) = &ensembles[l] {
            total += 1.0 - 2.0 * rho.expectation(x)? + rho.purity();
        }
    }
    Ok(total)
}

fn member_ensembles(
    points: &[Statevector],
    labels: &[usize],
    k: usize,
) -> Result<Vec<Option<DensityMatrix>>> {
    (0..k)
        .map(|j| {
            let members: Vec<&Statevector> = points
                .iter()
                .zip(labels)
                .filter(|(_, l)| **l == j)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                Ok(None)
            } else {
                DensityMatrix::from_ensemble(members).map(Some)
            }
        })
        .collect()
}

fn check_data(data: &[Vec<f64>], k: usize) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Argument("dataset is empty".into()));
    }
    if k > data.len() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the {} available points",
            data.len()
        )));
    }
    Ok(())
}

/// Runs q-means under the feature map `(spec, theta)`.
pub fn qmeans_run(
    data: &[Vec<f64>],
    theta: &ThetaParams,
    spec: &FeatureMapSpec,
    config: &ClusterConfig,
) -> Result<ClusterModel> {
    config.validate()?;
    check_data(data, config.k)?;
    let states = embed_all(data, theta, spec)?;
    let mut best: Option<ClusterModel> = None;
    for restart in 0..config.restarts {
        let init = kmeans_pp_init(data, config.k, derive_seed(config.seed, &[restart as u64]))?;
        let model = qmeans_from_centroids(data, &states, theta, spec, config, init, restart)?;
        if best.as_ref().is_none_or(|b| model.scatter < b.scatter) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// One q-means run from given initial data-space centroids.
///
/// `states` must be the embeddings of `data` under `(spec, theta)`.
pub fn qmeans_from_centroids(
    data: &[Vec<f64>],
    states: &[Statevector],
    theta: &ThetaParams,
    spec: &FeatureMapSpec,
    config: &ClusterConfig,
    initial: Vec<Vec<f64>>,
    restart: usize,
) -> Result<ClusterModel> {
    config.validate()?;
    check_data(data, config.k)?;
    let k = config.k;
    if initial.len() != k {
        return Err(Error::Shape(format!("{} initial centroids for k = {k}", initial.len())));
    }
    if states.len() != data.len() {
        return Err(Error::Shape(format!(
            "{} embedded states for {} points",
            states.len(),
            data.len()
        )));
    }

    let embed_centroids = |cs: &[Vec<f64>]| -> Result<Vec<Statevector>> {
        cs.iter().map(|c| embed(c, theta, spec)).collect()
    };

    let mut centroids = initial;
    let mut centroid_states = embed_centroids(&centroids)?;
    let mut ensembles: Vec<DensityMatrix> =
        centroid_states.iter().map(DensityMatrix::pure).collect();
    let mut labels = Vec::new();
    let mut gram = Vec::new();
    let mut repairs = Vec::new();
    let mut converged = false;
    let mut iterations_run = 0;

    for iteration in 1..=config.max_iterations {
        iterations_run = iteration;
        let pass_seed = derive_seed(config.seed, &[restart as u64, iteration as u64]);
        gram = match config.centroid_mode {
            CentroidMode::DataMean => {
                kernel_matrix(states, &centroid_states, config.estimation, pass_seed)?
            }
            CentroidMode::Ensemble => {
                kernel_matrix(states, &ensembles, config.estimation, pass_seed)?
            }
        };
        labels = match config.centroid_mode {
            CentroidMode::DataMean => assign_labels(&gram),
            CentroidMode::Ensemble => {
                let half_purity: Vec<f64> = ensembles.iter().map(|r| 0.5 * r.purity()).collect();
                let score: Vec<Vec<f64>> = gram
                    .iter()
                    .map(|row| row.iter().zip(&half_purity).map(|(g, h)| g - h).collect())
                    .collect();
                assign_labels(&score)
            }
        };

        let update = update_centroids(data, &labels, k, &centroids)?;
        repairs.extend(update.reseeded.iter().map(|&cluster| RepairEvent { iteration, cluster }));
        let movement = centroids
            .iter()
            .zip(&update.centroids)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = update.centroids;
        centroid_states = embed_centroids(&centroids)?;
        if config.centroid_mode == CentroidMode::Ensemble {
            let members = member_ensembles(states, &labels, k)?;
            ensembles = members
                .into_iter()
                .zip(&centroid_states)
                .map(|(m, c)| m.unwrap_or_else(|| DensityMatrix::pure(c)))
                .collect();
        }
        if movement < config.eps3 {
            converged = true;
            break;
        }
    }

    let mut characteristic_states = Vec::with_capacity(k);
    for (j, fallback) in centroid_states.iter().enumerate().take(k) {
        match characteristic_state(states, &labels, j) {
            Ok(s) => characteristic_states.push(s),
            Err(Error::EmptyCluster(_)) => {
                repairs.push(RepairEvent {
                    iteration: iterations_run,
                    cluster: j,
                });
                characteristic_states.push(fallback.clone());
            }
            Err(e) => return Err(e),
        }
    }
    let scatter = feature_scatter(states, &labels, k)?;

    Ok(ClusterModel {
        centroids_data: centroids,
        centroid_states,
        labels,
        characteristic_states,
        gram,
        iterations_run,
        converged,
        repairs,
        scatter,
        restart,
    })
}

/// Fraction of points whose predicted label matches the truth under the best
/// relabelling of predicted clusters (brute force over all k! permutations).
pub fn matched_accuracy(predicted: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if k == 0 || k > 8 {
        return Err(Error::Argument(format!("permutation matching supports 1..=8 clusters, got {k}")));
    }
    if predicted.iter().chain(truth).any(|&l| l >= k) {
        return Err(Error::Argument(format!("label out of range for k = {k}")));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits = (0..k).map(|i| confusion[i][p[i]]).sum::<usize>();
        best = best.max(hits);
    });
    Ok(best as f64 / predicted.len() as f64)
}

fn permute(perm: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == perm.len() {
        visit(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permute(perm, start + 1, visit);
        perm.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn two_qubit(amps: [f64; 4]) -> Statevector {
        Statevector::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect()).unwrap()
    }

    #[test]
    fn argmax_and_ties() {
        assert_eq!(assign_labels(&[vec![0.2, 0.9]]), vec![1]);
        assert_eq!(assign_labels(&[vec![0.5, 0.5]]), vec![0]);
        assert_eq!(assign_labels(&[vec![0.1, 0.7, 0.7]]), vec![1]);
    }

    #[test]
    fn characteristic_state_cases() {
        let a = two_qubit([1.0, 0.0, 0.0, 0.0]);
        let b = two_qubit([0.0, 1.0, 0.0, 0.0]);
        let single = characteristic_state(std::slice::from_ref(&a), &[0], 0).unwrap();
        assert_eq!(single, a);

        let same = characteristic_state(&[a.clone(), a.clone()], &[0, 0], 0).unwrap();
        assert!((fidelity(&same, &a).unwrap() - 1.0).abs() < 1e-12);

        let sup = characteristic_state(&[a.clone(), b.clone()], &[1, 1], 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sup.amplitudes()[0].re - h).abs() < 1e-12);
        assert!((sup.amplitudes()[1].re - h).abs() < 1e-12);

        assert_eq!(
            characteristic_state(&[a, b], &[0, 0], 1),
            Err(Error::EmptyCluster(1))
        );
    }

    #[test]
    fn centroid_update_cases() {
        let data = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![4.0, 6.0]];
        let all = update_centroids(&data, &[0, 0, 0], 1, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(all.centroids, vec![vec![2.0, 2.0]]);
        assert!(all.reseeded.is_empty());

        let each = update_centroids(&data, &[0, 1, 2], 3, &data).unwrap();
        assert_eq!(each.centroids, data);

        // cluster 1 empty: farthest point from centroid 0 at (1, 0) is (4, 6)
        let repaired =
            update_centroids(&data, &[0, 0, 0], 2, &[vec![1.0, 0.0], vec![9.0, 9.0]]).unwrap();
        assert_eq!(repaired.reseeded, vec![1]);
        assert_eq!(repaired.centroids[1], vec![4.0, 6.0]);

        assert!(update_centroids(&data, &[0, 3, 0], 2, &data[..2]).is_err());
    }

    #[test]
    fn kmeans_pp_edge_cases() {
        let data: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let mut all = kmeans_pp_init(&data, 5, 3).unwrap();
        all.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert_eq!(all, data);
        let one = kmeans_pp_init(&data, 1, 3).unwrap();
        assert!(data.contains(&one[0]));
        assert!(kmeans_pp_init(&data, 6, 3).is_err());

        let dup = vec![vec![1.0, 1.0]; 3];
        assert_eq!(kmeans_pp_init(&dup, 3, 0).unwrap().len(), 3);
    }

    #[test]
    fn config_validation() {
        let mut c = ClusterConfig::default();
        assert!(c.validate().is_ok());
        c.k = 1;
        assert!(c.validate().is_err());
        c = ClusterConfig {
            eps3: 0.0,
            ..ClusterConfig::default()
        };
        assert!(c.validate().is_err());
        c = ClusterConfig {
            estimation: EstimationMode::Shots { shots: 0 },
            ..ClusterConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn matched_accuracy_ignores_label_names() {
        assert_eq!(matched_accuracy(&[1, 1, 0, 0], &[0, 0, 1, 1], 2).unwrap(), 1.0);
        assert_eq!(matched_accuracy(&[2, 0, 1, 1], &[0, 1, 2, 0], 3).unwrap(), 0.75);
        assert!(matched_accuracy(&[0], &[0, 1], 2).is_err());
    }
}
