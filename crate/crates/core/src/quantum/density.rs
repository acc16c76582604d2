use num_complex::Complex64;

use super::state::Statevector;
use crate::error::{Error, Result};

/// Density operator of a uniform ensemble of pure states, ρ = (1/|S|) Σ |s⟩⟨s|.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    // row-major
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn pure(state: &Statevector) -> Self {
        Self::from_ensemble(std::iter::once(state)).expect("single state ensemble")
    }

    pub fn from_ensemble<'a, I>(states: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Statevector>,
    {
        let mut acc: Option<(usize, Vec<Complex64>)> = None;
        let mut count = 0usize;
        for s in states {
            let dim = s.dim();
            let (d, entries) = acc.get_or_insert_with(|| (dim, vec![Complex64::new(0.0, 0.0); dim * dim]));
            if *d != dim {
                return Err(Error::Shape(format!(
                    "ensemble mixes dimensions {d} and {dim}"
                )));
            }
            add_projector(entries, s.amplitudes(), 1.0);
            count += 1;
        }
        let (dim, mut entries) =
            acc.ok_or_else(|| Error::Argument("empty ensemble".into()))?;
        let w = 1.0 / count as f64;
        entries.iter_mut().for_each(|e| *e *= w);
        Ok(Self { dim, entries })
    }

    /// Builds Σ_i w_i |s_i⟩⟨s_i| without renormalizing.
    pub(crate) fn weighted<'a, I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a Statevector)>,
    {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, s) in terms {
            add_projector(&mut entries, s.amplitudes(), w);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    /// tr(ρσ) for Hermitian ρ, σ.
    pub fn trace_product(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "trace product of {}- and {}-dimensional operators",
                self.dim, other.dim
            )));
        }
        // tr(ρσ) = Σ_ij ρ_ij σ_ji = Σ_ij ρ_ij conj(σ_ij) for Hermitian σ
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// ⟨ψ|ρ|ψ⟩, the mean fidelity between ψ and the ensemble members.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.dim() != self.dim {
            return Err(Error::Shape(format!(
                "{}-dimensional state against {}-dimensional operator",
                state.dim(),
                self.dim
            )));
        }
        let amps = state.amplitudes();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, ai) in amps.iter().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            let r: Complex64 = row.iter().zip(amps).map(|(e, aj)| e * aj).sum();
            total += ai.conj() * r;
        }
        Ok(total.re)
    }
}

fn add_projector(entries: &mut [Complex64], amps: &[Complex64], weight: f64) {
    let dim = amps.len();
    for (i, ai) in amps.iter().enumerate() {
        for (j, aj) in amps.iter().enumerate() {
            entries[i * dim + j] += ai * aj.conj() * weight;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fidelity;
    use crate::rng::stream;

    #[test]
    fn ensemble_quantities_match_pairwise_fidelities() {
        let mut rng = stream(21, &[]);
        let a: Vec<_> = (0..3).map(|_| Statevector::random(2, &mut rng).unwrap()).collect();
        let b: Vec<_> = (0..2).map(|_| Statevector::random(2, &mut rng).unwrap()).collect();
        let ra = DensityMatrix::from_ensemble(&a).unwrap();
        let rb = DensityMatrix::from_ensemble(&b).unwrap();
        assert!((ra.trace() - 1.0).abs() < 1e-12);

        let mut cross = 0.0;
        for x in &a {
            for y in &b {
                cross += fidelity(x, y).unwrap();
            }
        }
        cross /= 6.0;
        assert!((ra.trace_product(&rb).unwrap() - cross).abs() < 1e-12);

        let mut intra = 0.0;
        for x in &a {
            for y in &a {
                intra += fidelity(x, y).unwrap();
            }
        }
        assert!((ra.purity() - intra / 9.0).abs() < 1e-12);

        let mean_fid: f64 = a.iter().map(|x| fidelity(x, &b[0]).unwrap()).sum::<f64>() / 3.0;
        assert!((ra.expectation(&b[0]).unwrap() - mean_fid).abs() < 1e-12);
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        let none: Vec<Statevector> = Vec::new();
        assert!(DensityMatrix::from_ensemble(&none).is_err());
    }
}
