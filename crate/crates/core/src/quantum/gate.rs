use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::Statevector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    Rx,
    Ry,
    Rz,
    Zz,
    Cnot,
    Cswap,
}

/// One gate of the supported alphabet.
///
/// Rotations follow R_G(φ) = exp(−i φ G / 2); `Zz` is exp(−i φ Z⊗Z / 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Zz(usize, usize, f64),
    Cnot { control: usize, target: usize },
    Cswap { control: usize, a: usize, b: usize },
}

type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::Rx(..) => GateKind::Rx,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Zz(..) => GateKind::Zz,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cswap { .. } => GateKind::Cswap,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Zz(a, b, _) => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, t) | Gate::Ry(_, t) | Gate::Rz(_, t) | Gate::Zz(_, _, t) => Some(t),
            _ => None,
        }
    }

    /// Same gate with its rotation angle replaced. Fixed gates are returned unchanged.
    pub fn with_angle(&self, angle: f64) -> Gate {
        match *self {
            Gate::Rx(q, _) => Gate::Rx(q, angle),
            Gate::Ry(q, _) => Gate::Ry(q, angle),
            Gate::Rz(q, _) => Gate::Rz(q, angle),
            Gate::Zz(a, b, _) => Gate::Zz(a, b, angle),
            other => other,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self.angle() {
            Some(t) => self.with_angle(-t),
            None => *self,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= n_qubits {
                return Err(Error::Index { index: q, n_qubits });
            }
        }
        for (i, a) in qubits.iter().enumerate() {
            if qubits[i + 1..].contains(a) {
                return Err(Error::Argument(format!("repeated qubit {a} in {self:?}")));
            }
        }
        if let Some(t) = self.angle() {
            if !t.is_finite() {
                return Err(Error::Argument(format!("non-finite angle in {self:?}")));
            }
        }
        Ok(())
    }

    fn single_qubit_matrix(&self) -> Option<(usize, Matrix2)> {
        match *self {
            Gate::H(q) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                Some((q, [[h, h], [h, -h]]))
            }
            Gate::Rx(q, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Some((q, [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]))
            }
            Gate::Ry(q, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Some((q, [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]))
            }
            Gate::Rz(q, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Some((q, [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]))
            }
            _ => None,
        }
    }

    pub(crate) fn apply_to(&self, state: &mut Statevector) -> Result<()> {
        let n = state.n_qubits();
        self.validate(n)?;
        let bit = |q: usize| 1usize << (n - 1 - q);
        let amps = state.amplitudes_mut();

        if let Some((q, m)) = self.single_qubit_matrix() {
            let stride = bit(q);
            for i in 0..amps.len() {
                if i & stride == 0 {
                    let (a0, a1) = (amps[i], amps[i | stride]);
                    amps[i] = m[0][0] * a0 + m[0][1] * a1;
                    amps[i | stride] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
            return Ok(());
        }

        match *self {
            Gate::Zz(a, b, t) => {
                let (ma, mb) = (bit(a), bit(b));
                let (s, co) = (t / 2.0).sin_cos();
                let even = c(co, -s);
                let odd = c(co, s);
                for (i, amp) in amps.iter_mut().enumerate() {
                    let parity = ((i & ma) != 0) ^ ((i & mb) != 0);
                    *amp *= if parity { odd } else { even };
                }
            }
            Gate::Cnot { control, target } => {
                let (mc, mt) = (bit(control), bit(target));
                for i in 0..amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        amps.swap(i, i | mt);
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                let (mc, ma, mb) = (bit(control), bit(a), bit(b));
                for i in 0..amps.len() {
                    if i & mc != 0 && i & ma != 0 && i & mb == 0 {
                        amps.swap(i, (i & !ma) | mb);
                    }
                }
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
        Ok(())
    }
}

/// Returns the image of `state` under `gate`.
pub fn apply_gate(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}
