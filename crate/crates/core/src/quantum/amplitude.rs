//! Amplitude estimation modelled by its exact outcome distribution.
//!
//! With p₀ = sin²(θ_a), phase estimation over P applications of the Grover
//! iterate returns y ∈ {0, …, P−1} with probability
//!
//! ```text
//! Pr[y] = ½ (F(y/P − θ_a/π) + F(y/P + θ_a/π)),   F(δ) = sin²(Pπδ) / (P² sin²(πδ))
//! ```
//!
//! and the estimate is p̂₀ = sin²(πy/P).

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream;

fn fejer(p: u32, delta: f64) -> f64 {
    let pf = f64::from(p);
    // exact zeros/peaks of the kernel sit at rational δ; snap so that the
    // certainty cases come out exactly
    if (delta - delta.round()).abs() < 1e-12 {
        return 1.0;
    }
    let m = pf * delta;
    if (m - m.round()).abs() < 1e-12 {
        return 0.0;
    }
    let num = (PI * m).sin();
    let den = pf * (PI * delta).sin();
    (num * num) / (den * den)
}

fn check(p0: f64, iterations: u32) -> Result<()> {
    if iterations < 2 {
        return Err(Error::Argument(format!(
            "amplitude estimation needs P >= 2, got {iterations}"
        )));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Argument(format!("p0 = {p0} outside [0, 1]")));
    }
    Ok(())
}

/// Probability of each outcome y = 0..P.
pub fn amplitude_estimation_outcomes(p0: f64, iterations: u32) -> Result<Vec<f64>> {
    check(p0, iterations)?;
    let omega = p0.sqrt().asin() / PI;
    let pf = f64::from(iterations);
    let mut probs: Vec<f64> = (0..iterations)
        .map(|y| {
            let x = f64::from(y) / pf;
            0.5 * (fejer(iterations, x - omega) + fejer(iterations, x + omega))
        })
        .collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Draws one amplitude-estimation estimate p̂₀ = sin²(πy/P).
pub fn amplitude_estimation_sample(p0: f64, iterations: u32, seed: u64) -> Result<f64> {
    let probs = amplitude_estimation_outcomes(p0, iterations)?;
    let u: f64 = stream(seed, &[]).random();
    let mut acc = 0.0;
    let mut y = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            y = i;
            break;
        }
    }
    let s = (PI * y as f64 / f64::from(iterations)).sin();
    Ok(s * s)
}

/// Right-hand side of the amplitude estimation error guarantee,
/// 2π·√(p₀(1−p₀))/P + (π/P)².
pub fn amplitude_estimation_error_bound(p0: f64, iterations: u32) -> f64 {
    let pf = f64::from(iterations);
    2.0 * PI * (p0 * (1.0 - p0)).sqrt() / pf + (PI / pf).powi(2)
}
