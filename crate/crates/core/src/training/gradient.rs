use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_map::ThetaParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMethod {
    /// Central differences with step `step`.
    FiniteDifference { step: f64 },
    /// Exact shift rule, ±π/2 per gate occurrence.
    ParameterShift,
}

impl Default for GradMethod {
    fn default() -> Self {
        GradMethod::FiniteDifference { step: 1e-3 }
    }
}

/// A scalar function of the feature-map parameters.
pub trait Objective: Sync {
    fn value(&self, theta: &ThetaParams) -> Result<f64>;

    /// Shift-rule gradient, for objectives whose structure supports it.
    fn shift_gradient(&self, _theta: &ThetaParams) -> Result<Vec<f64>> {
        Err(Error::Unsupported(
            "objective has no parameter-shift form".into(),
        ))
    }
}

impl<F> Objective for F
where
    F: Fn(&ThetaParams) -> Result<f64> + Sync,
{
    fn value(&self, theta: &ThetaParams) -> Result<f64> {
        self(theta)
    }
}

pub fn gradient<O: Objective + ?Sized>(
    objective: &O,
    theta: &ThetaParams,
    method: GradMethod,
) -> Result<Vec<f64>> {
    match method {
        GradMethod::FiniteDifference { step } => finite_difference(objective, theta, step),
        GradMethod::ParameterShift => objective.shift_gradient(theta),
    }
}

/// (f(θ + h eᵢ) − f(θ − h eᵢ)) / 2h for every coordinate.
pub fn finite_difference<O: Objective + ?Sized>(
    objective: &O,
    theta: &ThetaParams,
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Argument(format!("finite-difference step must be positive, got {step}")));
    }
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut plus = theta.clone();
            plus.0[i] += step;
            let mut minus = theta.clone();
            minus.0[i] -= step;
            let (fp, fm) = (objective.value(&plus)?, objective.value(&minus)?);
            let g = (fp - fm) / (2.0 * step);
            if g.is_finite() {
                Ok(g)
            } else {
                Err(Error::Numerical { coordinate: i })
            }
        })
        .collect()
}
