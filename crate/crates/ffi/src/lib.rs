//! C ABI for `vqkm`.
//!
//! Every fallible function returns a [`VqkmStatus`]; on failure the message
//! is available from [`vqkm_last_error_message`] on the same thread. Handles
//! are opaque, created by `*_new`/`*_generate`/`vqkm_train` and released with
//! the matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vqkm::clustering::{qmeans_run, CentroidMode, ClusterConfig};
use vqkm::datasets::{
    make_blobs, make_circles, make_corners, make_moons, preprocess, Dataset, DEFAULT_RANGE,
};
use vqkm::feature_map::{embed, FeatureMapSpec, ThetaParams};
use vqkm::quantum::fidelity;
use vqkm::training::{train, CostVariant, TrainConfig, TrainingTrace};
use vqkm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqkmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    Capacity = 4,
    Io = 5,
    Parse = 6,
    Numerical = 7,
    EmptyCluster = 8,
    Unsupported = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqkmGenerator {
    Blobs = 0,
    Circles = 1,
    Moons = 2,
    Corners = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqkmCost {
    StateOverlap = 0,
    HilbertSchmidt = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqkmCentroidMode {
    DataMean = 0,
    Ensemble = 1,
}

/// Supervised training options; start from `vqkm_train_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqkmTrainOptions {
    pub k: usize,
    pub cost: VqkmCost,
    pub step_size: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

pub struct VqkmDataset {
    inner: Dataset,
}

pub struct VqkmFeatureMap {
    spec: FeatureMapSpec,
    theta: ThetaParams,
}

pub struct VqkmTrainResult {
    trace: TrainingTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(VqkmStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::Capacity(_) => VqkmStatus::Capacity,
            Error::Index { .. } | Error::Argument(_) => VqkmStatus::InvalidArgument,
            Error::Shape(_) => VqkmStatus::ShapeMismatch,
            Error::EmptyCluster(_) => VqkmStatus::EmptyCluster,
            Error::Numerical { .. } => VqkmStatus::Numerical,
            Error::Unsupported(_) => VqkmStatus::Unsupported,
            Error::Io(_) => VqkmStatus::Io,
            Error::Parse(_) => VqkmStatus::Parse,
        };
        Failure(status, err.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VqkmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            VqkmStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            VqkmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(VqkmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn output<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len < needed {
        return Err(Failure(
            VqkmStatus::BufferTooSmall,
            format!("{what} holds {len} values, {needed} needed"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn vqkm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Generates a labelled synthetic dataset with the default noise settings
/// (blobs: 3 clusters; circles: radii 0.5 and 1; moons; corners).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_generate(
    generator: VqkmGenerator,
    n_per_cluster: usize,
    seed: u64,
    out: *mut *mut VqkmDataset,
) -> VqkmStatus {
    guard(|| {
        let ds = match generator {
            VqkmGenerator::Blobs => {
                let centers: Vec<Vec<f64>> =
                    vqkm::cli::BLOB_CENTERS.iter().map(|c| c.to_vec()).collect();
                make_blobs(n_per_cluster, 3, Some(&centers), 0.1, seed)
            }
            VqkmGenerator::Circles => make_circles(n_per_cluster, &[0.5, 1.0], 0.05, seed),
            VqkmGenerator::Moons => make_moons(n_per_cluster, 0.1, seed),
            VqkmGenerator::Corners => make_corners(n_per_cluster, seed),
        }?;
        emit(out, VqkmDataset { inner: ds })
    })
}

/// Builds a dataset from a row-major `n_points × dim` array. `labels` may be
/// NULL; otherwise it holds `n_points` entries.
///
/// # Safety
/// Non-null pointers must reference arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_from_points(
    points: *const f64,
    n_points: usize,
    dim: usize,
    labels: *const u32,
    out: *mut *mut VqkmDataset,
) -> VqkmStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure(VqkmStatus::InvalidArgument, "dim must be positive".into()));
        }
        let total = n_points
            .checked_mul(dim)
            .ok_or_else(|| Failure(VqkmStatus::InvalidArgument, "size overflow".into()))?;
        let flat = input(points, total, "points")?;
        let rows = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        let labels = if labels.is_null() {
            None
        } else {
            Some(input(labels, n_points, "labels")?.iter().map(|&l| l as usize).collect())
        };
        emit(out, VqkmDataset { inner: Dataset::new("ffi", rows, labels)? })
    })
}

/// Standardizes each feature and scales it into [−π/2, π/2], in place.
///
/// # Safety
/// `dataset` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_preprocess(dataset: *mut VqkmDataset) -> VqkmStatus {
    guard(|| {
        let ds = handle_mut(dataset, "dataset")?;
        ds.inner = preprocess(&ds.inner, DEFAULT_RANGE)?;
        Ok(())
    })
}

/// Number of points; 0 for NULL.
///
/// # Safety
/// `dataset` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_len(dataset: *const VqkmDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// Features per point; 0 for NULL.
///
/// # Safety
/// `dataset` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_dim(dataset: *const VqkmDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.dim())
}

/// Copies the points row-major into `buf` (`len ≥ len·dim`).
///
/// # Safety
/// `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_points(
    dataset: *const VqkmDataset,
    buf: *mut f64,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        let dst = output(buf, len, ds.len() * ds.dim(), "buf")?;
        for (d, s) in dst.iter_mut().zip(ds.points.iter().flatten()) {
            *d = *s;
        }
        Ok(())
    })
}

/// Copies the ground-truth labels into `buf`.
///
/// # Safety
/// `buf` must hold `len` writable integers.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_labels(
    dataset: *const VqkmDataset,
    buf: *mut u32,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        let labels = ds
            .labels
            .as_ref()
            .ok_or_else(|| Failure(VqkmStatus::InvalidArgument, "dataset has no labels".into()))?;
        let dst = output(buf, len, labels.len(), "buf")?;
        for (d, &l) in dst.iter_mut().zip(labels) {
            *d = l as u32;
        }
        Ok(())
    })
}

/// # Safety
/// `dataset` must be a handle from this library or NULL, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn vqkm_dataset_free(dataset: *mut VqkmDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// QAOA-style feature map with all parameters zero.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_new(
    n_qubits: usize,
    n_layers: usize,
    feature_dim: usize,
    out: *mut *mut VqkmFeatureMap,
) -> VqkmStatus {
    guard(|| {
        let spec = FeatureMapSpec::qaoa(n_qubits, n_layers, feature_dim);
        spec.validate()?;
        let theta = ThetaParams::zeros(&spec);
        emit(out, VqkmFeatureMap { spec, theta })
    })
}

/// Number of trainable parameters; 0 for NULL.
///
/// # Safety
/// `map` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_param_count(map: *const VqkmFeatureMap) -> usize {
    map.as_ref().map_or(0, |m| m.theta.len())
}

/// # Safety
/// `theta` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_set_theta(
    map: *mut VqkmFeatureMap,
    theta: *const f64,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let m = handle_mut(map, "map")?;
        let values = ThetaParams(input(theta, len, "theta")?.to_vec());
        values.check(&m.spec)?;
        m.theta = values;
        Ok(())
    })
}

/// # Safety
/// `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_get_theta(
    map: *const VqkmFeatureMap,
    buf: *mut f64,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let m = handle(map, "map")?;
        output(buf, len, m.theta.len(), "buf")?.copy_from_slice(m.theta.values());
        Ok(())
    })
}

/// Embeds `x` and writes the 2^n amplitudes as separate real and imaginary parts.
///
/// # Safety
/// `x` must hold `dim` doubles; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_embed(
    map: *const VqkmFeatureMap,
    x: *const f64,
    dim: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let m = handle(map, "map")?;
        let state = embed(input(x, dim, "x")?, &m.theta, &m.spec)?;
        let n = state.dim();
        let re = output(re, len, n, "re")?;
        let im = output(im, len, n, "im")?;
        for (i, a) in state.amplitudes().iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// Kernel value |⟨x|y⟩|² under the map.
///
/// # Safety
/// `x` and `y` must hold `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_kernel(
    map: *const VqkmFeatureMap,
    x: *const f64,
    y: *const f64,
    dim: usize,
    out: *mut f64,
) -> VqkmStatus {
    guard(|| {
        let m = handle(map, "map")?;
        let a = embed(input(x, dim, "x")?, &m.theta, &m.spec)?;
        let b = embed(input(y, dim, "y")?, &m.theta, &m.spec)?;
        let value = fidelity(&a, &b)?;
        *handle_mut(out, "out")? = value;
        Ok(())
    })
}

/// # Safety
/// `map` must be a handle from this library or NULL, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn vqkm_feature_map_free(map: *mut VqkmFeatureMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

#[no_mangle]
pub extern "C" fn vqkm_train_options_default() -> VqkmTrainOptions {
    let d = TrainConfig::default();
    VqkmTrainOptions {
        k: 2,
        cost: VqkmCost::HilbertSchmidt,
        step_size: d.step_size,
        max_epochs: d.max_epochs,
        seed: 0,
    }
}

/// Supervised training on the dataset's labels. On success the map's
/// parameters are set to the minimum-cost θ.
///
/// # Safety
/// Handles must be live; `options` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train(
    dataset: *const VqkmDataset,
    map: *mut VqkmFeatureMap,
    options: *const VqkmTrainOptions,
    out: *mut *mut VqkmTrainResult,
) -> VqkmStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        let m = handle_mut(map, "map")?;
        let o = handle(options, "options")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = TrainConfig {
            step_size: o.step_size,
            max_epochs: o.max_epochs,
            seed: o.seed,
            cost: match o.cost {
                VqkmCost::StateOverlap => CostVariant::StateOverlap,
                VqkmCost::HilbertSchmidt => CostVariant::HilbertSchmidt,
            },
            ..TrainConfig::default()
        };
        let cluster = ClusterConfig { k: o.k, seed: o.seed, ..ClusterConfig::default() };
        let trace = train(&ds.points, ds.labels.as_deref(), &m.spec, &cluster, &config)?;
        m.theta = trace.best_theta.clone();
        emit(out, VqkmTrainResult { trace })
    })
}

/// Lowest cost seen; NaN for NULL.
///
/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train_result_min_cost(result: *const VqkmTrainResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.trace.min_cost)
}

/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train_result_argmin_epoch(result: *const VqkmTrainResult) -> usize {
    result.as_ref().map_or(0, |r| r.trace.argmin_epoch)
}

/// Number of recorded epochs (including epoch 0).
///
/// # Safety
/// `result` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train_result_len(result: *const VqkmTrainResult) -> usize {
    result.as_ref().map_or(0, |r| r.trace.records.len())
}

/// Copies the per-epoch costs into `buf`.
///
/// # Safety
/// `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train_result_costs(
    result: *const VqkmTrainResult,
    buf: *mut f64,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let r = handle(result, "result")?;
        let costs = r.trace.costs();
        output(buf, len, costs.len(), "buf")?.copy_from_slice(&costs);
        Ok(())
    })
}

/// # Safety
/// `result` must be a handle from this library or NULL, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn vqkm_train_result_free(result: *mut VqkmTrainResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Runs q-means with exact kernels and writes one label per point.
///
/// # Safety
/// Handles must be live; `labels` must hold `len` writable integers.
#[no_mangle]
pub unsafe extern "C" fn vqkm_cluster(
    dataset: *const VqkmDataset,
    map: *const VqkmFeatureMap,
    k: usize,
    mode: VqkmCentroidMode,
    restarts: usize,
    seed: u64,
    labels: *mut u32,
    len: usize,
) -> VqkmStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.inner;
        let m = handle(map, "map")?;
        let dst = output(labels, len, ds.len(), "labels")?;
        let config = ClusterConfig {
            k,
            seed,
            restarts,
            centroid_mode: match mode {
                VqkmCentroidMode::DataMean => CentroidMode::DataMean,
                VqkmCentroidMode::Ensemble => CentroidMode::Ensemble,
            },
            ..ClusterConfig::default()
        };
        let model = qmeans_run(&ds.points, &m.theta, &m.spec, &config)?;
        for (d, &l) in dst.iter_mut().zip(&model.labels) {
            *d = l as u32;
        }
        Ok(())
    })
}
