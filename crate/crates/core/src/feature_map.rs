//! Feature maps turning classical points into statevectors.
//!
//! The trainable map repeats, `n_layers` times,
//!
//! 1. `RX(x_w)` on every wire (wires beyond the feature dimension get angle 0),
//! 2. a ZZ entangler: a single `ZZ(0,1)` on two qubits, otherwise a ring
//!    `ZZ(w, w+1 mod n)`,
//! 3. `RY` on every wire,
//!
//! applied to |0…0⟩. Parameters are stored layer-major and, within a layer,
//! as `[zz…, ry…]`. There is no trailing encoding layer.
//!
//! The fixed map is U_φ(x) H⊗H U_φ(x) H⊗H |00⟩ with
//! U_φ(x) = exp(i[x₁ Z₁ + x₂ Z₂ + (π−x₁)(π−x₂) Z₁Z₂]).

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Gate, Statevector};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    #[default]
    QaoaEmbedding,
    Havlicek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureMapSpec {
    pub kind: MapKind,
    pub n_qubits: usize,
    /// Ignored by the fixed map, which always uses two repetitions.
    pub n_layers: usize,
    pub feature_dim: usize,
}

impl Default for FeatureMapSpec {
    fn default() -> Self {
        Self {
            kind: MapKind::QaoaEmbedding,
            n_qubits: 2,
            n_layers: 4,
            feature_dim: 2,
        }
    }
}

impl FeatureMapSpec {
    pub fn qaoa(n_qubits: usize, n_layers: usize, feature_dim: usize) -> Self {
        Self {
            kind: MapKind::QaoaEmbedding,
            n_qubits,
            n_layers,
            feature_dim,
        }
    }

    pub fn havlicek() -> Self {
        Self {
            kind: MapKind::Havlicek,
            n_qubits: 2,
            n_layers: 2,
            feature_dim: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature_dim == 0 || self.feature_dim > self.n_qubits {
            return Err(Error::Argument(format!(
                "feature_dim {} must be in 1..={}",
                self.feature_dim, self.n_qubits
            )));
        }
        match self.kind {
            MapKind::QaoaEmbedding => {
                if self.n_qubits < 2 {
                    return Err(Error::Argument(
                        "the QAOA embedding needs at least 2 qubits".into(),
                    ));
                }
                if self.n_layers == 0 {
                    return Err(Error::Argument("n_layers must be positive".into()));
                }
            }
            MapKind::Havlicek => {
                if self.n_qubits != 2 {
                    return Err(Error::Unsupported(format!(
                        "fixed feature map is implemented for 2 qubits, got {}",
                        self.n_qubits
                    )));
                }
            }
        }
        Ok(())
    }

    fn zz_per_layer(&self) -> usize {
        if self.n_qubits == 2 {
            1
        } else {
            self.n_qubits
        }
    }

    fn params_per_layer(&self) -> usize {
        self.zz_per_layer() + self.n_qubits
    }
}

/// Number of trainable parameters of the map.
pub fn param_count(spec: &FeatureMapSpec) -> usize {
    match spec.kind {
        MapKind::QaoaEmbedding => spec.params_per_layer() * spec.n_layers,
        MapKind::Havlicek => 0,
    }
}

/// Trainable angles θ, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaParams(pub Vec<f64>);

impl ThetaParams {
    pub fn zeros(spec: &FeatureMapSpec) -> Self {
        Self(vec![0.0; param_count(spec)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn check(&self, spec: &FeatureMapSpec) -> Result<()> {
        let expected = param_count(spec);
        if self.0.len() != expected {
            return Err(Error::Shape(format!(
                "theta has {} entries, map expects {expected}",
                self.0.len()
            )));
        }
        if self.0.iter().any(|t| !t.is_finite()) {
            return Err(Error::Argument("theta contains non-finite values".into()));
        }
        Ok(())
    }
}

/// i.i.d. uniform draws on [−scale, scale].
pub fn init_theta(spec: &FeatureMapSpec, seed: u64, scale: f64) -> Result<ThetaParams> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Argument(format!("init scale must be positive, got {scale}")));
    }
    let mut rng = stream(seed, &[0x7e7a]);
    Ok(ThetaParams(
        (0..param_count(spec))
            .map(|_| rng.random_range(-scale..=scale))
            .collect(),
    ))
}

/// A gate in a feature-map circuit, tagged with the θ index driving its angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitOp {
    pub gate: Gate,
    pub param: Option<usize>,
}

fn check_point(x: &[f64], spec: &FeatureMapSpec) -> Result<()> {
    if x.len() != spec.feature_dim {
        return Err(Error::Shape(format!(
            "point has {} features, map expects {}",
            x.len(),
            spec.feature_dim
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("point contains non-finite values".into()));
    }
    Ok(())
}

/// The gate list of the trainable map for point `x`.
pub fn qaoa_circuit(x: &[f64], theta: &ThetaParams, spec: &FeatureMapSpec) -> Result<Vec<CircuitOp>> {
    spec.validate()?;
    if spec.kind != MapKind::QaoaEmbedding {
        return Err(Error::Unsupported("circuit requested for the fixed map".into()));
    }
    check_point(x, spec)?;
    theta.check(spec)?;

    let n = spec.n_qubits;
    let zz = spec.zz_per_layer();
    let mut ops = Vec::with_capacity(spec.n_layers * (2 * n + zz));
    for layer in 0..spec.n_layers {
        let base = layer * spec.params_per_layer();
        for w in 0..n {
            let angle = x.get(w).copied().unwrap_or(0.0);
            ops.push(CircuitOp {
                gate: Gate::Rx(w, angle),
                param: None,
            });
        }
        for e in 0..zz {
            let p = base + e;
            ops.push(CircuitOp {
                gate: Gate::Zz(e, (e + 1) % n, theta.0[p]),
                param: Some(p),
            });
        }
        for w in 0..n {
            let p = base + zz + w;
            ops.push(CircuitOp {
                gate: Gate::Ry(w, theta.0[p]),
                param: Some(p),
            });
        }
    }
    Ok(ops)
}

/// For each θ index, the positions of the circuit ops it drives.
pub fn param_occurrences(spec: &FeatureMapSpec) -> Result<Vec<Vec<usize>>> {
    let x = vec![0.0; spec.feature_dim];
    let ops = qaoa_circuit(&x, &ThetaParams::zeros(spec), spec)?;
    let mut occ = vec![Vec::new(); param_count(spec)];
    for (i, op) in ops.iter().enumerate() {
        if let Some(p) = op.param {
            occ[p].push(i);
        }
    }
    Ok(occ)
}

fn run(ops: &[CircuitOp], n_qubits: usize, shift: Option<(usize, f64)>) -> Result<Statevector> {
    let mut state = Statevector::zero(n_qubits)?;
    for (i, op) in ops.iter().enumerate() {
        match shift {
            Some((at, delta)) if at == i => {
                let angle = op.gate.angle().unwrap_or(0.0) + delta;
                state.apply(&op.gate.with_angle(angle))?;
            }
            _ => state.apply(&op.gate)?,
        }
    }
    Ok(state)
}

/// |x⟩ = U(x, θ)|0…0⟩.
pub fn embed(x: &[f64], theta: &ThetaParams, spec: &FeatureMapSpec) -> Result<Statevector> {
    match spec.kind {
        MapKind::QaoaEmbedding => run(&qaoa_circuit(x, theta, spec)?, spec.n_qubits, None),
        MapKind::Havlicek => {
            theta.check(spec)?;
            havlicek_embed(x, spec)
        }
    }
}

/// Embedding with the angle of circuit op `occurrence` moved by `delta`.
pub fn embed_shifted(
    x: &[f64],
    theta: &ThetaParams,
    spec: &FeatureMapSpec,
    occurrence: usize,
    delta: f64,
) -> Result<Statevector> {
    let ops = qaoa_circuit(x, theta, spec)?;
    if ops.get(occurrence).and_then(|op| op.param).is_none() {
        return Err(Error::Argument(format!(
            "circuit op {occurrence} is not a trainable gate"
        )));
    }
    run(&ops, spec.n_qubits, Some((occurrence, delta)))
}

/// Embeds every point; rows are independent and evaluated in parallel.
pub fn embed_all(
    points: &[Vec<f64>],
    theta: &ThetaParams,
    spec: &FeatureMapSpec,
) -> Result<Vec<Statevector>> {
    points.par_iter().map(|x| embed(x, theta, spec)).collect()
}

/// The fixed two-qubit map with φᵢ = xᵢ and φ₁₂ = (π−x₁)(π−x₂).
pub fn havlicek_embed(x: &[f64], spec: &FeatureMapSpec) -> Result<Statevector> {
    if spec.n_qubits != 2 {
        return Err(Error::Unsupported(format!(
            "fixed feature map is implemented for 2 qubits, got {}",
            spec.n_qubits
        )));
    }
    if x.len() != 2 {
        return Err(Error::Shape(format!("fixed map takes 2 features, got {}", x.len())));
    }
    check_point(x, &FeatureMapSpec::havlicek())?;
    let (phi1, phi2) = (x[0], x[1]);
    let phi12 = (PI - x[0]) * (PI - x[1]);
    // exp(iφZ) = RZ(−2φ), exp(iφ Z⊗Z) = ZZ(−2φ)
    let layer = [
        Gate::H(0),
        Gate::H(1),
        Gate::Rz(0, -2.0 * phi1),
        Gate::Rz(1, -2.0 * phi2),
        Gate::Zz(0, 1, -2.0 * phi12),
    ];
    let mut state = Statevector::zero(2)?;
    for _ in 0..2 {
        for g in &layer {
            state.apply(g)?;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fidelity;

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(&FeatureMapSpec::qaoa(2, 4, 2)), 12);
        assert_eq!(param_count(&FeatureMapSpec::qaoa(3, 2, 2)), 12);
        assert_eq!(param_count(&FeatureMapSpec::havlicek()), 0);
    }

    #[test]
    fn zero_input_zero_theta_is_ground_state() {
        for layers in 1..5 {
            let spec = FeatureMapSpec::qaoa(2, layers, 2);
            let s = embed(&[0.0, 0.0], &ThetaParams::zeros(&spec), &spec).unwrap();
            assert!((fidelity(&s, &Statevector::zero(2).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        }
        let padded = FeatureMapSpec::qaoa(4, 3, 2);
        let s = embed(&[0.0, 0.0], &ThetaParams::zeros(&padded), &padded).unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pi_on_first_wire_flips_it() {
        let spec = FeatureMapSpec::qaoa(2, 1, 2);
        let s = embed(&[PI, 0.0], &ThetaParams::zeros(&spec), &spec).unwrap();
        let target = Statevector::basis(2, 0b10).unwrap();
        assert!((fidelity(&s, &target).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let spec = FeatureMapSpec::default();
        let theta = ThetaParams::zeros(&spec);
        assert!(matches!(embed(&[0.1], &theta, &spec), Err(Error::Shape(_))));
        assert!(matches!(
            embed(&[f64::NAN, 0.0], &theta, &spec),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            embed(&[0.1, 0.2], &ThetaParams(vec![0.0; 3]), &spec),
            Err(Error::Shape(_))
        ));
        let three = FeatureMapSpec {
            kind: MapKind::Havlicek,
            n_qubits: 3,
            n_layers: 2,
            feature_dim: 2,
        };
        assert!(matches!(havlicek_embed(&[0.1, 0.2], &three), Err(Error::Unsupported(_))));
    }

    #[test]
    fn init_theta_contract() {
        let spec = FeatureMapSpec::default();
        let a = init_theta(&spec, 1, 0.001).unwrap();
        assert_eq!(a.len(), 12);
        assert!(a.values().iter().all(|t| t.abs() <= 0.001));
        assert_eq!(a, init_theta(&spec, 1, 0.001).unwrap());
        assert_ne!(a, init_theta(&spec, 2, 0.001).unwrap());
        assert!(init_theta(&spec, 1, 0.0).is_err());
        assert!(init_theta(&spec, 1, -1.0).is_err());
    }

    #[test]
    fn occurrences_cover_each_parameter_once() {
        let spec = FeatureMapSpec::qaoa(3, 2, 2);
        let occ = param_occurrences(&spec).unwrap();
        assert_eq!(occ.len(), 12);
        assert!(occ.iter().all(|o| o.len() == 1));
    }

    #[test]
    fn shifting_an_occurrence_matches_shifting_theta() {
        let spec = FeatureMapSpec::default();
        let theta = init_theta(&spec, 9, 1.0).unwrap();
        let occ = param_occurrences(&spec).unwrap();
        let x = [0.3, -0.8];
        for (p, o) in occ.iter().enumerate() {
            let mut moved = theta.clone();
            moved.0[p] += 0.25;
            let a = embed(&x, &moved, &spec).unwrap();
            let b = embed_shifted(&x, &theta, &spec, o[0], 0.25).unwrap();
            assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(embed_shifted(&x, &theta, &spec, 0, 0.1).is_err());
    }
}
