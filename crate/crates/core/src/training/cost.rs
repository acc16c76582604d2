use serde::{Deserialize, Serialize};

use crate::clustering::characteristic_state;
use crate::error::{Error, Result};
use crate::quantum::{fidelity, DensityMatrix, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CostVariant {
    /// Σ_{j≠j'} |⟨χ_j|χ_j'⟩|² over ordered pairs.
    StateOverlap,
    /// Σ_{j<j'} (1 − D_hs(C_j, C_j')).
    #[default]
    HilbertSchmidt,
}

/// M(j, j') = |⟨χ_j|χ_j'⟩|².
pub fn overlap_matrix(states: &[Statevector]) -> Result<Vec<Vec<f64>>> {
    let k = states.len();
    let mut m = vec![vec![0.0; k]; k];
    for j in 0..k {
        for jj in j..k {
            let f = fidelity(&states[j], &states[jj])?;
            m[j][jj] = f;
            m[jj][j] = f;
        }
    }
    Ok(m)
}

/// Sum of the off-diagonal entries.
pub fn cost_state_overlap(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .enumerate()
        .map(|(j, row)| {
            row.iter()
                .enumerate()
                .filter(|(jj, _)| *jj != j)
                .map(|(_, v)| v)
                .sum::<f64>()
        })
        .sum()
}

/// ½tr(ρ_A²) + ½tr(ρ_B²) − tr(ρ_Aρ_B) for the uniform ensembles of the two
/// clusters, i.e. ½‖ρ_A − ρ_B‖²_HS.
pub fn hs_distance(cluster_a: &[Statevector], cluster_b: &[Statevector]) -> Result<f64> {
    if cluster_a.is_empty() || cluster_b.is_empty() {
        return Err(Error::Argument("Hilbert-Schmidt distance of an empty cluster".into()));
    }
    let ra = DensityMatrix::from_ensemble(cluster_a)?;
    let rb = DensityMatrix::from_ensemble(cluster_b)?;
    hs_from_ensembles(&ra, &rb)
}

pub(crate) fn hs_from_ensembles(ra: &DensityMatrix, rb: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * ra.purity() + 0.5 * rb.purity() - ra.trace_product(rb)?)
}

pub(crate) fn cluster_ensembles(
    points: &[Statevector],
    labels: &[usize],
    k: usize,
) -> Result<Vec<DensityMatrix>> {
    check_labels(points, labels, k)?;
    (0..k)
        .map(|j| {
            let members: Vec<&Statevector> = points
                .iter()
                .zip(labels)
                .filter(|(_, l)| **l == j)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                return Err(Error::EmptyCluster(j));
            }
            DensityMatrix::from_ensemble(members)
        })
        .collect()
}

fn check_labels(points: &[Statevector], labels: &[usize], k: usize) -> Result<()> {
    if points.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    if let Some(l) = labels.iter().find(|l| **l >= k) {
        return Err(Error::Argument(format!("label {l} out of range for k = {k}")));
    }
    Ok(())
}

/// Σ_{j<j'} (1 − D_hs(C_j, C_j')); equals 1 − D_hs for two clusters.
pub fn cost_hilbert_schmidt(points: &[Statevector], labels: &[usize], k: usize) -> Result<f64> {
    let ensembles = cluster_ensembles(points, labels, k)?;
    let mut total = 0.0;
    for j in 0..k {
        for jj in j + 1..k {
            total += 1.0 - hs_from_ensembles(&ensembles[j], &ensembles[jj])?;
        }
    }
    Ok(total)
}

/// Characteristic states of all k clusters.
pub fn characteristic_states(
    points: &[Statevector],
    labels: &[usize],
    k: usize,
) -> Result<Vec<Statevector>> {
    check_labels(points, labels, k)?;
    (0..k).map(|j| characteristic_state(points, labels, j)).collect()
}

/// Cost of a labelled set of embedded points.
pub fn evaluate_cost(
    variant: CostVariant,
    points: &[Statevector],
    labels: &[usize],
    k: usize,
) -> Result<f64> {
    match variant {
        CostVariant::StateOverlap => Ok(cost_state_overlap(&overlap_matrix(
            &characteristic_states(points, labels, k)?,
        )?)),
        CostVariant::HilbertSchmidt => cost_hilbert_schmidt(points, labels, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(i: usize) -> Statevector {
        Statevector::basis(2, i).unwrap()
    }

    #[test]
    fn overlap_matrix_cases() {
        assert_eq!(
            overlap_matrix(&[basis(1), basis(1)]).unwrap(),
            vec![vec![1.0, 1.0], vec![1.0, 1.0]]
        );
        assert_eq!(
            overlap_matrix(&[basis(0), basis(3)]).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn state_overlap_counts_ordered_pairs() {
        assert_eq!(cost_state_overlap(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 2.0);
        assert_eq!(cost_state_overlap(&[vec![1.0, 0.0], vec![0.0, 1.0]]), 0.0);
    }

    #[test]
    fn hs_distance_singletons() {
        assert!(hs_distance(&[basis(2)], &[basis(2)]).unwrap().abs() < 1e-15);
        assert!((hs_distance(&[basis(0)], &[basis(1)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(hs_distance(&[], &[basis(1)]).is_err());
    }

    #[test]
    fn hs_cost_singletons() {
        let same = [basis(0), basis(0)];
        assert!((cost_hilbert_schmidt(&same, &[0, 1], 2).unwrap() - 1.0).abs() < 1e-15);
        let orth = [basis(0), basis(1)];
        assert!(cost_hilbert_schmidt(&orth, &[0, 1], 2).unwrap().abs() < 1e-15);
        assert_eq!(
            cost_hilbert_schmidt(&orth, &[0, 0], 2),
            Err(Error::EmptyCluster(1))
        );
    }
}
