//! Independent dense-matrix and brute-force oracles shared by the test targets.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use vqkm::quantum::Statevector;

pub type Mat = Vec<Vec<C>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|r| r.iter().map(|v| v * s).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

/// exp(A) by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let n = a.len();
    let norm: f64 = a.iter().flatten().map(|v| v.norm()).sum();
    let squarings = norm.max(1.0).log2().ceil() as i32 + 4;
    let small = scale(a, c(0.5f64.powi(squarings), 0.0));
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = scale(&matmul(&term, &small), c(1.0 / k as f64, 0.0));
        result = add(&result, &term);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> Mat {
    vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn hadamard() -> Mat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]
}

/// `op` acting on `wires` (qubit 0 is the leftmost factor), identity elsewhere.
pub fn on_wires(n: usize, ops: &[(usize, Mat)]) -> Mat {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for w in 0..n {
        let factor = ops.iter().find(|(q, _)| *q == w).map_or_else(|| identity(2), |(_, m)| m.clone());
        out = kron(&out, &factor);
    }
    out
}

/// exp(−i φ G / 2) for a Hermitian generator G.
pub fn rotation(generator: &Mat, phi: f64) -> Mat {
    expm(&scale(generator, c(0.0, -phi / 2.0)))
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn zero_vec(n: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

/// Gate-by-gate dense construction of the layered QAOA embedding:
/// per layer RX(x_w) on every wire, ZZ entangler(s), RY on every wire.
pub fn dense_qaoa(x: &[f64], theta: &[f64], n: usize, layers: usize) -> Vec<C> {
    let pairs: Vec<(usize, usize)> = if n == 2 { vec![(0, 1)] } else { (0..n).map(|w| (w, (w + 1) % n)).collect() };
    let per_layer = pairs.len() + n;
    let mut v = zero_vec(n);
    for l in 0..layers {
        let p = &theta[l * per_layer..(l + 1) * per_layer];
        for w in 0..n {
            let angle = x.get(w).copied().unwrap_or(0.0);
            v = apply(&on_wires(n, &[(w, rotation(&pauli_x(), angle))]), &v);
        }
        for (i, &(a, b)) in pairs.iter().enumerate() {
            let zz = on_wires(n, &[(a, pauli_z()), (b, pauli_z())]);
            v = apply(&rotation(&zz, p[i]), &v);
        }
        for w in 0..n {
            v = apply(&on_wires(n, &[(w, rotation(&pauli_y(), p[pairs.len() + w]))]), &v);
        }
    }
    v
}

/// H⊗H, then exp(i[x₁Z₁ + x₂Z₂ + (π−x₁)(π−x₂)Z₁Z₂]), applied twice.
pub fn dense_havlicek(x: &[f64]) -> Vec<C> {
    use std::f64::consts::PI;
    let hh = kron(&hadamard(), &hadamard());
    let z1 = on_wires(2, &[(0, pauli_z())]);
    let z2 = on_wires(2, &[(1, pauli_z())]);
    let zz = on_wires(2, &[(0, pauli_z()), (1, pauli_z())]);
    let phase_gen = add(
        &add(&scale(&z1, c(x[0], 0.0)), &scale(&z2, c(x[1], 0.0))),
        &scale(&zz, c((PI - x[0]) * (PI - x[1]), 0.0)),
    );
    let phase = expm(&scale(&phase_gen, c(0.0, 1.0)));
    let layer = matmul(&phase, &hh);
    apply(&matmul(&layer, &layer), &zero_vec(2))
}

pub fn inner(a: &[C], b: &[C]) -> C {
    let mut s = c(0.0, 0.0);
    for i in 0..a.len() {
        s += a[i].conj() * b[i];
    }
    s
}

pub fn fid(a: &Statevector, b: &Statevector) -> f64 {
    inner(a.amplitudes(), b.amplitudes()).norm_sqr()
}

pub fn random_state(n: usize, r: &mut ChaCha8Rng) -> Statevector {
    let amps: Vec<C> = (0..1 << n).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
    Statevector::from_amplitudes(amps).unwrap()
}

/// Brute-force ½ tr ρ_A² + ½ tr ρ_B² − tr ρ_A ρ_B from pairwise fidelities.
pub fn hs_oracle(a: &[Statevector], b: &[Statevector]) -> f64 {
    let mut aa = 0.0;
    for x in a {
        for y in a {
            aa += fid(x, y);
        }
    }
    let mut bb = 0.0;
    for x in b {
        for y in b {
            bb += fid(x, y);
        }
    }
    let mut ab = 0.0;
    for x in a {
        for y in b {
            ab += fid(x, y);
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    0.5 * aa / (na * na) + 0.5 * bb / (nb * nb) - ab / (na * nb)
}

/// Normalized sum of member states, computed element by element.
pub fn chi_oracle(points: &[Statevector], labels: &[usize], j: usize) -> Vec<C> {
    let dim = points[0].dim();
    let mut sum = vec![c(0.0, 0.0); dim];
    for (p, &l) in points.iter().zip(labels) {
        if l == j {
            for (acc, a) in sum.iter_mut().zip(p.amplitudes()) {
                *acc += a;
            }
        }
    }
    let norm = sum.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    sum.iter().map(|v| v / norm).collect()
}

/// Labels where every cluster in 0..k is non-empty.
pub fn covering_labels(n: usize, k: usize, r: &mut ChaCha8Rng) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { r.random_range(0..k) }).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        labels.swap(i, j);
    }
    labels
}

/// Best matched accuracy by brute force over label permutations.
pub fn permutation_accuracy(pred: &[usize], truth: &[usize], k: usize) -> f64 {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    perms(k)
        .iter()
        .map(|p| pred.iter().zip(truth).filter(|(a, b)| p[**a] == **b).count())
        .max()
        .unwrap() as f64
        / pred.len() as f64
}
