use crate::error::{Error, Result};

/// One RMSProp update:
/// acc' = decay·acc + (1−decay)·g², θ' = θ − lr·g / (√acc' + ε).
pub fn rmsprop_step(
    theta: &[f64],
    grad: &[f64],
    accumulator: &[f64],
    step_size: f64,
    decay: f64,
    epsilon: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if theta.len() != grad.len() || theta.len() != accumulator.len() {
        return Err(Error::Shape(format!(
            "theta {}, gradient {}, accumulator {}",
            theta.len(),
            grad.len(),
            accumulator.len()
        )));
    }
    let acc: Vec<f64> = accumulator
        .iter()
        .zip(grad)
        .map(|(a, g)| decay * a + (1.0 - decay) * g * g)
        .collect();
    let next = theta
        .iter()
        .zip(grad)
        .zip(&acc)
        .map(|((t, g), a)| t - step_size * g / (a.sqrt() + epsilon))
        .collect();
    Ok((next, acc))
}

/// Optimizer state carried across epochs.
#[derive(Debug, Clone)]
pub struct RmsProp {
    pub step_size: f64,
    pub decay: f64,
    pub epsilon: f64,
    accumulator: Vec<f64>,
}

impl RmsProp {
    pub fn new(n_params: usize, step_size: f64, decay: f64, epsilon: f64) -> Self {
        Self {
            step_size,
            decay,
            epsilon,
            accumulator: vec![0.0; n_params],
        }
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.accumulator
    }

    pub fn step(&mut self, theta: &mut Vec<f64>, grad: &[f64]) -> Result<()> {
        let (next, acc) = rmsprop_step(
            theta,
            grad,
            &self.accumulator,
            self.step_size,
            self.decay,
            self.epsilon,
        )?;
        *theta = next;
        self.accumulator = acc;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_keeps_theta() {
        let (t, a) = rmsprop_step(&[0.3, -1.0], &[0.0, 0.0], &[0.5, 0.2], 0.1, 0.9, 1e-8).unwrap();
        assert_eq!(t, vec![0.3, -1.0]);
        assert!((a[0] - 0.45).abs() < 1e-15 && (a[1] - 0.18).abs() < 1e-15);
    }

    #[test]
    fn scalar_hand_computation() {
        let (t, a) = rmsprop_step(&[0.0], &[1.0], &[0.0], 0.1, 0.9, 1e-8).unwrap();
        assert!((a[0] - 0.1).abs() < 1e-15);
        // −0.1 / (√0.1 + 1e-8)
        assert!((t[0] + 0.316_227_756_016_838_3).abs() < 1e-12);
        assert_eq!(
            rmsprop_step(&[0.0], &[1.0], &[0.0], 0.1, 0.9, 1e-8).unwrap(),
            (t, a)
        );
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            rmsprop_step(&[0.0, 1.0], &[1.0], &[0.0, 0.0], 0.1, 0.9, 1e-8),
            Err(Error::Shape(_))
        ));
    }
}
