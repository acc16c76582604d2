//! Cost evaluation, gradients, RMSProp and the outer training loop.

mod cost;
mod gradient;
mod rmsprop;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cost::{
    characteristic_states, cost_hilbert_schmidt, cost_state_overlap, evaluate_cost, hs_distance,
    overlap_matrix, CostVariant,
};
pub use gradient::{finite_difference, gradient, GradMethod, Objective};
pub use rmsprop::{rmsprop_step, RmsProp};

use crate::clustering::{qmeans_run, ClusterConfig};
use crate::error::{Error, Result};
use crate::feature_map::{
    embed_all, embed_shifted, init_theta, param_occurrences, FeatureMapSpec, MapKind, ThetaParams,
};
use crate::quantum::DensityMatrix;
use std::f64::consts::FRAC_PI_2;

/// Where the cluster labels used by the cost come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// Ground-truth labels, fixed for the whole run.
    #[default]
    Supervised,
    /// Labels recomputed by q-means under the current θ every epoch.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub step_size: f64,
    /// Stop once |C_{t+1} − C_t| falls below this.
    pub eps4: f64,
    pub max_epochs: usize,
    pub label_mode: LabelMode,
    pub grad_method: GradMethod,
    pub rms_decay: f64,
    pub rms_epsilon: f64,
    pub seed: u64,
    pub cost: CostVariant,
    /// Half-width of the uniform initialization of θ.
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            eps4: 1e-6,
            max_epochs: 300,
            label_mode: LabelMode::Supervised,
            grad_method: GradMethod::default(),
            rms_decay: 0.9,
            rms_epsilon: 1e-8,
            seed: 0,
            cost: CostVariant::HilbertSchmidt,
            init_scale: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::Argument("step_size must be positive".into()));
        }
        if !(self.eps4 > 0.0) {
            return Err(Error::Argument("eps4 must be positive".into()));
        }
        if !(self.rms_decay > 0.0 && self.rms_decay < 1.0) {
            return Err(Error::Argument("rms_decay must lie in (0, 1)".into()));
        }
        if !(self.rms_epsilon > 0.0) {
            return Err(Error::Argument("rms_epsilon must be positive".into()));
        }
        if let GradMethod::FiniteDifference { step } = self.grad_method {
            if !(step > 0.0) {
                return Err(Error::Argument("finite-difference step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// How the labels of an epoch were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LabelEvent {
    Fixed,
    /// Fresh q-means labels; `changed` points differ from the previous epoch.
    Relabelled { changed: usize },
    /// q-means left a cluster empty; the previous labels were reused.
    KeptPrevious,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub cost: f64,
    pub grad_norm: f64,
    /// Wall-clock time since the start of training.
    pub elapsed_ms: f64,
    pub labels: LabelEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub records: Vec<EpochRecord>,
    /// Parameters after the last update.
    pub theta: ThetaParams,
    /// Parameters at the epoch of minimum cost.
    pub best_theta: ThetaParams,
    pub min_cost: f64,
    pub argmin_epoch: usize,
    /// True when the run stopped on the cost-change threshold.
    pub converged: bool,
    pub cost: CostVariant,
}

impl TrainingTrace {
    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost).collect()
    }
}

/// The clustering cost of a fixed labelling as a function of θ.
pub struct ClusterCost<'a> {
    pub data: &'a [Vec<f64>],
    pub labels: &'a [usize],
    pub k: usize,
    pub spec: &'a FeatureMapSpec,
    pub variant: CostVariant,
}

impl Objective for ClusterCost<'_> {
    fn value(&self, theta: &ThetaParams) -> Result<f64> {
        let states = embed_all(self.data, theta, self.spec)?;
        evaluate_cost(self.variant, &states, self.labels, self.k)
    }

    /// The Hilbert-Schmidt cost is linear in the cluster ensembles, and each
    /// embedded projector |x⟩⟨x| obeys ∂ρ = ½[ρ(+π/2) − ρ(−π/2)] per gate
    /// occurrence, so the product rule over bra and ket is carried by
    /// tr(∂ρ_A ρ_B) + tr(ρ_A ∂ρ_B).
    fn shift_gradient(&self, theta: &ThetaParams) -> Result<Vec<f64>> {
        if self.variant != CostVariant::HilbertSchmidt {
            return Err(Error::Unsupported(
                "parameter shift is available for the Hilbert-Schmidt cost only".into(),
            ));
        }
        if self.spec.kind != MapKind::QaoaEmbedding {
            return Ok(Vec::new());
        }
        let states = embed_all(self.data, theta, self.spec)?;
        let ensembles = cost::cluster_ensembles(&states, self.labels, self.k)?;
        let sizes: Vec<usize> = (0..self.k)
            .map(|j| self.labels.iter().filter(|l| **l == j).count())
            .collect();
        let dim = 1usize << self.spec.n_qubits;
        let occurrences = param_occurrences(self.spec)?;

        occurrences
            .par_iter()
            .map(|occ| {
                // ∂ρ_j for every cluster
                let mut terms: Vec<Vec<(f64, crate::quantum::Statevector)>> =
                    vec![Vec::new(); self.k];
                for (x, &l) in self.data.iter().zip(self.labels) {
                    let w = 0.5 / sizes[l] as f64;
                    for &o in occ {
                        terms[l].push((w, embed_shifted(x, theta, self.spec, o, FRAC_PI_2)?));
                        terms[l].push((-w, embed_shifted(x, theta, self.spec, o, -FRAC_PI_2)?));
                    }
                }
                let derivs: Vec<DensityMatrix> = terms
                    .iter()
                    .map(|t| DensityMatrix::weighted(dim, t.iter().map(|(w, s)| (*w, s))))
                    .collect();
                let mut g = 0.0;
                for j in 0..self.k {
                    for jj in j + 1..self.k {
                        g -= ensembles[j].trace_product(&derivs[j])?;
                        g -= ensembles[jj].trace_product(&derivs[jj])?;
                        g += derivs[j].trace_product(&ensembles[jj])?;
                        g += ensembles[j].trace_product(&derivs[jj])?;
                    }
                }
                Ok(g)
            })
            .collect()
    }
}

fn check_supervised(labels: &[usize], n: usize, k: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::Shape(format!("{n} points but {} labels", labels.len())));
    }
    if let Some(l) = labels.iter().find(|l| **l >= k) {
        return Err(Error::Argument(format!("label {l} out of range for k = {k}")));
    }
    Ok(())
}

fn has_empty_cluster(labels: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k];
    labels.iter().for_each(|&l| seen[l] = true);
    seen.iter().any(|s| !s)
}

/// Trains θ by RMSProp on the clustering cost.
pub fn train(
    data: &[Vec<f64>],
    ground_truth: Option<&[usize]>,
    spec: &FeatureMapSpec,
    cluster_config: &ClusterConfig,
    config: &TrainConfig,
) -> Result<TrainingTrace> {
    config.validate()?;
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::Argument("dataset is empty".into()));
    }
    let k = cluster_config.k;
    let supervised = match config.label_mode {
        LabelMode::Supervised => {
            let labels = ground_truth.ok_or_else(|| {
                Error::Argument("supervised training needs ground-truth labels".into())
            })?;
            check_supervised(labels, data.len(), k)?;
            Some(labels.to_vec())
        }
        LabelMode::Alternating => {
            cluster_config.validate()?;
            None
        }
    };

    let start = Instant::now();
    let mut theta = init_theta(spec, config.seed, config.init_scale)?;
    let mut optimizer = RmsProp::new(theta.len(), config.step_size, config.rms_decay, config.rms_epsilon);
    let mut records: Vec<EpochRecord> = Vec::new();
    let mut labels: Vec<usize> = supervised.clone().unwrap_or_default();
    let mut best = (f64::INFINITY, 0usize, theta.clone());
    let mut converged = false;

    for epoch in 0..=config.max_epochs {
        let event = match &supervised {
            Some(_) => LabelEvent::Fixed,
            None => {
                let model = qmeans_run(data, &theta, spec, cluster_config)?;
                if has_empty_cluster(&model.labels, k) {
                    if labels.is_empty() {
                        return Err(Error::EmptyCluster(
                            (0..k).find(|j| !model.labels.contains(j)).unwrap_or(0),
                        ));
                    }
                    LabelEvent::KeptPrevious
                } else {
                    let changed = if labels.is_empty() {
                        data.len()
                    } else {
                        labels.iter().zip(&model.labels).filter(|(a, b)| a != b).count()
                    };
                    labels = model.labels;
                    LabelEvent::Relabelled { changed }
                }
            }
        };

        let objective = ClusterCost {
            data,
            labels: &labels,
            k,
            spec,
            variant: config.cost,
        };
        let cost = objective.value(&theta)?;
        if !cost.is_finite() {
            return Err(Error::Numerical { coordinate: 0 });
        }
        let grad = gradient(&objective, &theta, config.grad_method)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();

        if cost < best.0 {
            best = (cost, epoch, theta.clone());
        }
        records.push(EpochRecord {
            epoch,
            cost,
            grad_norm,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            labels: event,
        });

        if epoch > 0 && (cost - records[epoch - 1].cost).abs() < config.eps4 {
            converged = true;
            break;
        }
        if epoch == config.max_epochs {
            break;
        }
        optimizer.step(&mut theta.0, &grad)?;
    }

    Ok(TrainingTrace {
        records,
        theta,
        best_theta: best.2,
        min_cost: best.0,
        argmin_epoch: best.1,
        converged,
        cost: config.cost,
    })
}
