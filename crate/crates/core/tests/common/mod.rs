//! Test-only reference computations that share no numerical code with the
//! library: eigenvalues come from nalgebra, SRM success from the Gram-matrix
//! square root formula, states from direct truth-table indexing.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use odx::linalg::DenseMatrix;
use odx::oracle::{BoolFunc, OracleFamily};

pub fn to_nalgebra(m: &DenseMatrix) -> DMatrix<Complex64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn reference_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `|x>|y> -> |x>|y xor f(x)>` applied by index arithmetic.
pub fn reference_oracle_image(f: &BoolFunc, amps: &[Complex64]) -> Vec<Complex64> {
    let out_dim = 1usize << f.m();
    let mut img = vec![Complex64::new(0.0, 0.0); amps.len()];
    let tail = amps.len() >> (f.n() + f.m());
    for (idx, a) in amps.iter().enumerate() {
        let x = idx / (out_dim * tail);
        let y = (idx / tail) % out_dim;
        let rest = idx % tail;
        let y2 = y ^ f.table()[x] as usize;
        img[(x * out_dim + y2) * tail + rest] = *a;
    }
    img
}

/// Square-root-measurement success `Σ_i ((G_p^{1/2})_ii)^2` with
/// `(G_p)_ij = sqrt(p_i p_j) <ψ_i|ψ_j>`. Eigenvalues below `1e-12` relative
/// are treated as exact zeros.
pub fn reference_srm_success(states: &[Vec<Complex64>], priors: &[f64]) -> f64 {
    let k = states.len();
    let g = DMatrix::from_fn(k, k, |i, j| {
        let ip: Complex64 = states[i]
            .iter()
            .zip(&states[j])
            .map(|(a, b)| a.conj() * b)
            .sum();
        ip * (priors[i] * priors[j]).sqrt()
    });
    let eig = SymmetricEigen::new(g);
    let floor = 1e-12 * eig.eigenvalues.amax().max(1.0);
    let roots = eig
        .eigenvalues
        .map(|l| if l > floor { l.sqrt() } else { 0.0 });
    let v = &eig.eigenvectors;
    (0..k)
        .map(|i| {
            let d: f64 = (0..k).map(|j| roots[j] * v[(i, j)].norm_sqr()).sum();
            d * d
        })
        .sum()
}

pub fn reference_family_srm(probe: &[Complex64], fam: &OracleFamily) -> f64 {
    let states: Vec<Vec<Complex64>> = fam
        .members()
        .iter()
        .map(|f| reference_oracle_image(f, probe))
        .collect();
    reference_srm_success(&states, fam.priors())
}

/// Exact Gram matrix of the canonical ensemble under the closed-form probe.
pub fn closed_form_gram() -> DenseMatrix {
    let t = 1.0 / 3.0;
    DenseMatrix::from_real_rows(&[
        vec![1.0, -t, t, t],
        vec![-t, 1.0, t, t],
        vec![t, t, 1.0, -t],
        vec![t, t, -t, 1.0],
    ])
    .unwrap()
}
