//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! spectral functions built on it.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Entrywise tolerance for the Hermitian precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero by PSD routines.
pub const PSD_CLAMP: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the eigenvector of `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V^H`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut out = DenseMatrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Eigenvalues are sorted ascending. Each eigenvector is rescaled so its first
/// nonzero component is real positive; equal eigenvalues are then ordered by
/// the lexicographic order of their eigenvectors. Inside a degenerate
/// eigenspace the basis is arbitrary, so callers should only rely on the
/// spectral projectors there.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<HermitianEigen> {
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) < threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) < threshold;
    }
    if !converged {
        return Err(Error::NoConvergence(sweeps));
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|i| {
            let mut col = v.column(i);
            fix_phase(&mut col);
            (a[(i, i)].re, col)
        })
        .collect();
    sort_eigenpairs(&mut pairs, threshold.max(1e-12));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with `J = diag(1, e^{-iφ}) R(θ)` on the (p, q) plane,
/// updating `a <- J^H a J` and `v <- v J`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    // Smaller root of t^2 + 2θt - 1 = 0; signum(0.0) is 1, giving t = 1.
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J entries (row, col) on the (p, q) plane.
    let conj_phase = phase.conj();
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = conj_phase * (-s);
    let jqq = conj_phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(first) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let rot = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn sort_eigenpairs(pairs: &mut [(f64, Vec<Complex64>)], tie_tol: f64) {
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie_tol {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lex_cmp(&x.1, &y.1));
        start = end;
    }
}

/// Square root of one eigenvalue out of `spectrum`, with values within
/// roundoff of zero (`16 * eps * len * max(1, |λ|max)`) snapped to zero: the
/// root would otherwise amplify a `1e-16` residue into a `1e-8` contribution.
pub fn spectral_sqrt(spectrum: &[f64]) -> impl Fn(f64) -> f64 {
    let scale = spectrum.iter().fold(1.0_f64, |a, l| a.max(l.abs()));
    let snap = 16.0 * f64::EPSILON * spectrum.len() as f64 * scale;
    move |l| if l <= snap { 0.0 } else { l.sqrt() }
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(m: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = hermitian_eig(m)?;
    check_psd(&eig)?;
    let root = spectral_sqrt(&eig.values);
    Ok(eig.reconstruct_with(root))
}

/// Pseudo-inverse square root: `λ^{-1/2}` on eigenvalues above `rank_tol`,
/// zero on the rest.
pub fn pinv_sqrt(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let eig = hermitian_eig(m)?;
    check_psd(&eig)?;
    Ok(eig.reconstruct_with(|l| if l > rank_tol { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Projector onto the eigenspace with eigenvalues at most `rank_tol`.
pub fn null_projector(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let eig = hermitian_eig(m)?;
    check_psd(&eig)?;
    Ok(eig.reconstruct_with(|l| if l > rank_tol { 0.0 } else { 1.0 }))
}

/// Number of eigenvalues above `rank_tol`.
pub fn numerical_rank(m: &DenseMatrix, rank_tol: f64) -> Result<usize> {
    Ok(hermitian_eig(m)?
        .values
        .iter()
        .filter(|&&l| l > rank_tol)
        .count())
}

fn check_psd(eig: &HermitianEigen) -> Result<()> {
    match eig.values.first() {
        Some(&l) if l < -PSD_CLAMP => Err(Error::NotPsd(l)),
        _ => Ok(()),
    }
}
