use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{CentroidMode, ClusterConfig};
use crate::datasets::{
    load_csv, make_blobs, make_circles, make_corners, make_moons, preprocess, Dataset,
    DEFAULT_RANGE,
};
use crate::error::{Error, Result};
use crate::feature_map::FeatureMapSpec;
use crate::training::{CostVariant, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Blobs,
    Circles,
    Moons,
    Corners,
}

/// Named training setups with calibrated dataset defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Blobs,
    Circles,
    Moons,
}

/// Where the points come from and how they are scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSpec {
    pub generator: Generator,
    /// When set, points are read from this CSV and the generator is ignored.
    pub path: Option<PathBuf>,
    pub n_per_cluster: usize,
    /// Blob count.
    pub k: usize,
    pub centers: Option<Vec<Vec<f64>>>,
    pub stddev: f64,
    pub radii: Vec<f64>,
    pub noise: f64,
    pub preprocess: bool,
}

pub const BLOB_CENTERS: [[f64; 2]; 3] = [[-5.0, -5.0], [5.0, -5.0], [0.0, 5.0]];

impl Default for DatasetSpec {
    fn default() -> Self {
        Self::for_generator(Generator::Blobs)
    }
}

impl DatasetSpec {
    pub fn for_generator(generator: Generator) -> Self {
        let base = Self {
            generator,
            path: None,
            n_per_cluster: 100,
            k: 2,
            centers: None,
            stddev: 0.1,
            radii: vec![0.5, 1.0],
            noise: 0.0,
            preprocess: true,
        };
        match generator {
            Generator::Blobs => Self {
                k: 3,
                centers: Some(BLOB_CENTERS.iter().map(|c| c.to_vec()).collect()),
                ..base
            },
            Generator::Circles => Self { noise: 0.05, ..base },
            Generator::Moons => Self { noise: 0.1, ..base },
            Generator::Corners => Self { k: 4, ..base },
        }
    }

    pub fn from_csv(path: &Path) -> Self {
        Self {
            path: Some(path.to_path_buf()),
            ..Self::default()
        }
    }

    pub fn set_k(&mut self, k: usize) {
        self.k = k;
        if self.centers.as_ref().is_some_and(|c| c.len() != k) {
            self.centers = None;
        }
    }

    /// Number of classes the generator produces (None for CSV input).
    pub fn classes(&self) -> Option<usize> {
        if self.path.is_some() {
            return None;
        }
        Some(match self.generator {
            Generator::Blobs => self.k,
            Generator::Circles => self.radii.len(),
            Generator::Moons => 2,
            Generator::Corners => 4,
        })
    }

    /// Raw points, before preprocessing.
    pub fn generate(&self, seed: u64) -> Result<Dataset> {
        if let Some(path) = &self.path {
            return load_csv(path);
        }
        let n = self.n_per_cluster;
        match self.generator {
            Generator::Blobs => make_blobs(n, self.k, self.centers.as_deref(), self.stddev, seed),
            Generator::Circles => make_circles(n, &self.radii, self.noise, seed),
            Generator::Moons => make_moons(n, self.noise, seed),
            Generator::Corners => make_corners(n, seed),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Dataset> {
        let raw = self.generate(seed)?;
        if self.preprocess {
            preprocess(&raw, DEFAULT_RANGE)
        } else {
            Ok(raw)
        }
    }
}

/// Everything a run depends on; a run is reproducible from this alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dataset: DatasetSpec,
    pub feature_map: FeatureMapSpec,
    pub cluster: ClusterConfig,
    pub train: TrainConfig,
    /// Step sizes to train side by side; empty means a single run at `train.step_size`.
    pub sweep: Vec<f64>,
    pub out: PathBuf,
    /// Record wall-clock time per epoch in the trace; off keeps reruns byte-identical.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dataset: DatasetSpec::default(),
            feature_map: FeatureMapSpec::default(),
            cluster: ClusterConfig {
                k: 3,
                ..ClusterConfig::default()
            },
            train: TrainConfig::default(),
            sweep: Vec::new(),
            out: PathBuf::from("out"),
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut config = Self::default();
        let (generator, step_size, max_epochs) = match preset {
            Preset::Blobs => (Generator::Blobs, 0.1, 50),
            Preset::Circles => (Generator::Circles, 0.1, 100),
            Preset::Moons => (Generator::Moons, 0.15, 250),
        };
        config.dataset = DatasetSpec::for_generator(generator);
        config.cluster.k = config.dataset.classes().unwrap_or(2);
        if preset == Preset::Circles {
            // both rings share a data-space mean, so centroids live in feature space
            config.cluster.centroid_mode = CentroidMode::Ensemble;
            config.cluster.restarts = 10;
        }
        config.train = TrainConfig {
            step_size,
            max_epochs,
            cost: CostVariant::HilbertSchmidt,
            ..TrainConfig::default()
        };
        config
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
    }

    /// Propagates the master seed to the sub-configurations.
    pub fn synced(mut self) -> Self {
        self.train.seed = self.seed;
        self.cluster.seed = self.seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.feature_map.validate()?;
        self.cluster.validate()?;
        self.train.validate()?;
        if let Some(c) = self.dataset.classes() {
            if c != self.cluster.k {
                return Err(Error::Argument(format!(
                    "dataset has {c} classes but k = {}",
                    self.cluster.k
                )));
            }
        }
        if self.sweep.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Argument("sweep step sizes must be positive".into()));
        }
        Ok(())
    }
}
