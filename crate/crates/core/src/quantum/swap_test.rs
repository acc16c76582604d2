use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::amplitude::amplitude_estimation_sample;
use super::gate::Gate;
use super::state::{Statevector, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::rng::stream;

/// How a kernel value is obtained from the swap test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMode {
    /// Analytic ancilla probability.
    #[default]
    Exact,
    /// Repeated ancilla measurements.
    Shots { shots: u32 },
    /// Amplitude estimation with `iterations` applications of the swap-test circuit.
    AmplitudeEstimation { iterations: u32 },
}

impl fmt::Display for EstimationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimationMode::Exact => write!(f, "exact"),
            EstimationMode::Shots { shots } => write!(f, "shots:{shots}"),
            EstimationMode::AmplitudeEstimation { iterations } => write!(f, "ae:{iterations}"),
        }
    }
}

impl FromStr for EstimationMode {
    type Err = Error;

    /// Accepts `exact`, `shots:<count>` and `ae:<P>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("unrecognised estimation mode '{s}'"));
        match s.split_once(':') {
            None if s == "exact" => Ok(EstimationMode::Exact),
            Some(("shots", n)) => {
                let shots = n.parse().map_err(|_| bad())?;
                if shots == 0 {
                    return Err(Error::Argument("shot count must be positive".into()));
                }
                Ok(EstimationMode::Shots { shots })
            }
            Some(("ae", p)) => {
                let iterations = p.parse().map_err(|_| bad())?;
                if iterations < 2 {
                    return Err(Error::Argument("amplitude estimation needs P >= 2".into()));
                }
                Ok(EstimationMode::AmplitudeEstimation { iterations })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapTestEstimate {
    /// Estimated probability of reading the ancilla as 0.
    pub p0_hat: f64,
    /// max(0, 2·p0_hat − 1).
    pub kernel_hat: f64,
    /// Shots spent; 0 outside shot mode.
    pub shots: u32,
    pub mode: EstimationMode,
}

impl SwapTestEstimate {
    fn new(p0_hat: f64, shots: u32, mode: EstimationMode) -> Self {
        Self {
            p0_hat,
            kernel_hat: (2.0 * p0_hat - 1.0).max(0.0),
            shots,
            mode,
        }
    }
}

/// Ancilla-zero probability of the swap test between `a` and `b`.
///
/// The circuit is simulated explicitly on |0⟩⊗|a⟩⊗|b⟩: Hadamard on the
/// ancilla, one controlled swap per register qubit pair, Hadamard again.
pub fn swap_test_probability(a: &Statevector, b: &Statevector) -> Result<f64> {
    let n = a.n_qubits();
    if b.n_qubits() != n {
        return Err(Error::Shape(format!(
            "swap test between {}-qubit and {}-qubit registers",
            n,
            b.n_qubits()
        )));
    }
    if 2 * n + 1 > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "swap test on {n}-qubit registers needs {} qubits",
            2 * n + 1
        )));
    }
    let mut state = Statevector::zero(1)?.tensor(a)?.tensor(b)?;
    state.apply(&Gate::H(0))?;
    for k in 0..n {
        state.apply(&Gate::Cswap {
            control: 0,
            a: 1 + k,
            b: 1 + n + k,
        })?;
    }
    state.apply(&Gate::H(0))?;
    state.probability_zero(0)
}

pub fn exact_swap_test(a: &Statevector, b: &Statevector) -> Result<SwapTestEstimate> {
    Ok(SwapTestEstimate::new(
        swap_test_probability(a, b)?,
        0,
        EstimationMode::Exact,
    ))
}

/// Estimates the ancilla probability from `shots` seeded Bernoulli draws.
pub fn sample_swap_test(
    a: &Statevector,
    b: &Statevector,
    shots: u32,
    seed: u64,
) -> Result<SwapTestEstimate> {
    let p0 = swap_test_probability(a, b)?;
    estimate_kernel(p0, EstimationMode::Shots { shots }, seed)
}

/// Turns an exact ancilla-zero probability into an estimate under `mode`.
pub fn estimate_kernel(p0: f64, mode: EstimationMode, seed: u64) -> Result<SwapTestEstimate> {
    if !(0.0..=1.0 + 1e-9).contains(&p0) {
        return Err(Error::Argument(format!("probability {p0} outside [0, 1]")));
    }
    let p0 = p0.min(1.0);
    match mode {
        EstimationMode::Exact => Ok(SwapTestEstimate::new(p0, 0, mode)),
        EstimationMode::Shots { shots } => {
            if shots == 0 {
                return Err(Error::Argument("shot count must be positive".into()));
            }
            let mut rng = stream(seed, &[]);
            let zeros = (0..shots).filter(|_| rng.random::<f64>() < p0).count();
            Ok(SwapTestEstimate::new(zeros as f64 / shots as f64, shots, mode))
        }
        EstimationMode::AmplitudeEstimation { iterations } => {
            let p0_hat = amplitude_estimation_sample(p0, iterations, seed)?;
            Ok(SwapTestEstimate::new(p0_hat, 0, mode))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fidelity;

    #[test]
    fn identical_and_orthogonal_pairs() {
        let z = Statevector::basis(2, 0).unwrap();
        let o = Statevector::basis(2, 3).unwrap();
        assert!((swap_test_probability(&z, &z).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test_probability(&z, &o).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matches_closed_form() {
        let mut rng = stream(2, &[]);
        for _ in 0..50 {
            let a = Statevector::random(2, &mut rng).unwrap();
            let b = Statevector::random(2, &mut rng).unwrap();
            let p = swap_test_probability(&a, &b).unwrap();
            assert!((p - (1.0 + fidelity(&a, &b).unwrap()) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shot_sampling_guards_and_certainty() {
        let mut rng = stream(4, &[]);
        let a = Statevector::random(2, &mut rng).unwrap();
        assert!(matches!(
            sample_swap_test(&a, &a, 0, 1),
            Err(Error::Argument(_))
        ));
        for seed in 0..20 {
            let est = sample_swap_test(&a, &a, 500, seed).unwrap();
            assert_eq!(est.p0_hat, 1.0);
            assert_eq!(est.kernel_hat, 1.0);
            assert_eq!(est.shots, 500);
        }
    }

    #[test]
    fn kernel_hat_is_clipped() {
        let est = SwapTestEstimate::new(0.45, 100, EstimationMode::Shots { shots: 100 });
        assert_eq!(est.kernel_hat, 0.0);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<EstimationMode>().unwrap(), EstimationMode::Exact);
        assert_eq!(
            "shots:100".parse::<EstimationMode>().unwrap(),
            EstimationMode::Shots { shots: 100 }
        );
        assert_eq!(
            "ae:8".parse::<EstimationMode>().unwrap(),
            EstimationMode::AmplitudeEstimation { iterations: 8 }
        );
        assert!("ae:1".parse::<EstimationMode>().is_err());
        assert!("shots:0".parse::<EstimationMode>().is_err());
        assert!("bogus".parse::<EstimationMode>().is_err());
        for m in ["exact", "shots:7", "ae:16"] {
            assert_eq!(m.parse::<EstimationMode>().unwrap().to_string(), m);
        }
    }
}
