//! Minimum-error discrimination of pure-state ensembles.
//!
//! The decision rule is fixed: outcome `i` of a measurement means hypothesis
//! `i`. Everything here works on explicit ensembles; oracle-specific
//! construction lives in [`crate::oracle`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, spectral_sqrt, DenseMatrix, StateVector, PSD_CLAMP};
use crate::oracle::{oracle_unitary, validate_priors, OracleFamily};

/// Support threshold used by [`srm`] unless the caller overrides it.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Tolerance for POVM completeness and element positivity.
pub const POVM_TOL: f64 = 1e-10;
/// Tolerance for geometric-uniformity checks.
pub const GU_TOL: f64 = 1e-10;
/// Certification thresholds for the minimum-error optimality conditions.
pub const CERT_HERMITICITY_TOL: f64 = 1e-9;
pub const CERT_GAP_TOL: f64 = 1e-9;

/// Weighted set of pure-state hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, StateVector)>) -> Result<Self> {
        let Some((_, first)) = items.first() else {
            return Err(Error::EmptyEnsemble);
        };
        let width = first.num_qubits();
        if let Some((_, s)) = items.iter().find(|(_, s)| s.num_qubits() != width) {
            return Err(Error::WidthMismatch {
                expected: width,
                got: s.num_qubits(),
            });
        }
        let priors: Vec<f64> = items.iter().map(|(p, _)| *p).collect();
        validate_priors(&priors)?;
        Ok(Self { items })
    }

    /// Equal priors over `states`.
    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn items(&self) -> &[(f64, StateVector)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    pub fn priors(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().map(|(p, _)| *p)
    }

    pub fn states(&self) -> impl Iterator<Item = &StateVector> + '_ {
        self.items.iter().map(|(_, s)| s)
    }

    /// True when all priors agree to within 1e-12.
    pub fn is_equiprobable(&self) -> bool {
        let p0 = self.items[0].0;
        self.priors().all(|p| (p - p0).abs() <= 1e-12)
    }

    /// `ρ = Σ p_i |ψ_i><ψ_i|`.
    pub fn density(&self) -> DenseMatrix {
        let mut rho = DenseMatrix::zeros(self.dim());
        for (p, s) in &self.items {
            rho = &rho + &DenseMatrix::projector(s.amplitudes()).scale_real(*p);
        }
        rho
    }
}

/// Measurement with one element per hypothesis.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<DenseMatrix>,
}

impl Povm {
    /// Validates positivity of every element and completeness within
    /// [`POVM_TOL`].
    pub fn new(elements: Vec<DenseMatrix>) -> Result<Self> {
        let povm = Self { elements };
        povm.validate(POVM_TOL)?;
        Ok(povm)
    }

    pub(crate) fn from_trusted(elements: Vec<DenseMatrix>) -> Self {
        let povm = Self { elements };
        debug_assert!(povm.completeness_residual() < 1e-8);
        povm
    }

    pub fn elements(&self) -> &[DenseMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Max entry of `|Σ E_i - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = DenseMatrix::zeros(self.dim());
        for e in &self.elements {
            sum = &sum + e;
        }
        sum.max_abs_diff(&DenseMatrix::identity(self.dim()))
            .expect("same dim")
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let Some(first) = self.elements.first() else {
            return Err(Error::EmptyEnsemble);
        };
        if let Some(e) = self.elements.iter().find(|e| e.dim() != first.dim()) {
            return Err(Error::DimensionMismatch(first.dim(), e.dim()));
        }
        for e in &self.elements {
            let r = e.hermiticity_residual();
            if r > tol {
                return Err(Error::NotHermitian(r));
            }
            let lmin = hermitian_eig(&e.hermitian_part())?.values[0];
            if lmin < -tol {
                return Err(Error::NotPsd(lmin));
            }
        }
        let r = self.completeness_residual();
        if r > tol {
            return Err(Error::InvalidArgument(format!(
                "POVM elements do not sum to identity (residual {r:e})"
            )));
        }
        Ok(())
    }

    /// Reorders elements: new element `i` is old element `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                got: order.len(),
            });
        }
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "{order:?} is not a permutation"
                )));
            }
        }
        Ok(Self {
            elements: order.iter().map(|&i| self.elements[i].clone()).collect(),
        })
    }
}

/// Success statistics of a measurement on an ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationReport {
    pub per_hypothesis_success: Vec<f64>,
    pub average_success: f64,
    /// Ascending spectrum of the (unweighted) Gram matrix.
    pub gram_eigenvalues: Vec<f64>,
    /// `max(hermiticity residual, -min eigenvalue gap, 0)` of the optimality
    /// conditions; zero for a certified optimum up to roundoff.
    pub optimality_residual: f64,
    pub notes: String,
}

/// Gram matrix `G_ij = <ψ_i|ψ_j>`.
pub fn gram(e: &Ensemble) -> Result<DenseMatrix> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let k = e.len();
    let states: Vec<&StateVector> = e.states().collect();
    let mut g = DenseMatrix::zeros(k);
    for i in 0..k {
        for j in i..k {
            let v = states[i].inner(states[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Square-root measurement `E_i = p_i ρ^{-1/2}|ψ_i><ψ_i|ρ^{-1/2}`, with the
/// projector onto the kernel of `ρ` split equally across all elements.
pub fn srm(e: &Ensemble, rank_tol: f64) -> Result<Povm> {
    if e.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let eig = hermitian_eig(&e.density())?;
    if let Some(&l) = eig.values.first() {
        if l < -PSD_CLAMP {
            return Err(Error::NotPsd(l));
        }
    }
    let inv_sqrt = eig.reconstruct_with(|l| if l > rank_tol { 1.0 / l.sqrt() } else { 0.0 });
    let null = eig.reconstruct_with(|l| if l > rank_tol { 0.0 } else { 1.0 });
    let share = null.scale_real(1.0 / e.len() as f64);
    let elements = e
        .items()
        .iter()
        .map(|(p, s)| {
            let w = inv_sqrt.mul_vec(s.amplitudes())?;
            Ok(&DenseMatrix::projector(&w).scale_real(*p) + &share)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Povm::from_trusted(elements))
}

/// `<ψ_i|E_i|ψ_i>` for each hypothesis, clamped to `[0, 1]`.
pub fn per_hypothesis_success(e: &Ensemble, p: &Povm) -> Result<Vec<f64>> {
    if p.len() != e.len() {
        return Err(Error::SizeMismatch {
            expected: e.len(),
            got: p.len(),
        });
    }
    if p.dim() != e.dim() {
        return Err(Error::DimensionMismatch(e.dim(), p.dim()));
    }
    e.states()
        .zip(p.elements())
        .map(|(s, el)| Ok(el.expectation(s.amplitudes())?.re.clamp(0.0, 1.0)))
        .collect()
}

/// Prior-weighted average of [`per_hypothesis_success`].
pub fn average_success(e: &Ensemble, p: &Povm) -> Result<f64> {
    Ok(per_hypothesis_success(e, p)?
        .iter()
        .zip(e.priors())
        .map(|(s, q)| s * q)
        .sum())
}

pub fn success_probability(e: &Ensemble, p: &Povm) -> Result<DiscriminationReport> {
    let per = per_hypothesis_success(e, p)?;
    let average = per.iter().zip(e.priors()).map(|(s, q)| s * q).sum();
    let gram_eigenvalues = hermitian_eig(&gram(e)?)?.values;
    let cert = optimality_conditions(e, p)?;
    let rank = gram_eigenvalues
        .iter()
        .filter(|&&l| l > DEFAULT_RANK_TOL)
        .count();
    let notes = format!(
        "{} hypotheses, Gram rank {}, optimality {}",
        e.len(),
        rank,
        if cert.certified {
            "certified"
        } else {
            "not certified"
        }
    );
    Ok(DiscriminationReport {
        per_hypothesis_success: per,
        average_success: average,
        gram_eigenvalues,
        optimality_residual: cert.residual(),
        notes,
    })
}

/// Projective measurement "apply `u`, read out the computational basis":
/// `E_m = |χ_m><χ_m|` with `|χ_m> = u^H |m>`.
pub fn measurement_from_unitary(u: &DenseMatrix) -> Result<Povm> {
    let r = u.unitarity_residual();
    if r > POVM_TOL {
        return Err(Error::NotUnitary(r));
    }
    let elements = (0..u.dim())
        .map(|m| {
            let chi: Vec<Complex64> = u.row(m).iter().map(|z| z.conj()).collect();
            DenseMatrix::projector(&chi)
        })
        .collect();
    Ok(Povm::from_trusted(elements))
}

/// SRM success of an equiprobable geometrically uniform ensemble from its
/// Gram spectrum: `(Σ_i √λ_i)² / N²`.
pub fn srm_success_gu(gram_eigenvalues: &[f64], n_states: usize) -> Result<f64> {
    if gram_eigenvalues.len() != n_states || n_states == 0 {
        return Err(Error::SizeMismatch {
            expected: n_states,
            got: gram_eigenvalues.len(),
        });
    }
    if let Some(&l) = gram_eigenvalues.iter().find(|&&l| l < -PSD_CLAMP) {
        return Err(Error::NegativeEigenvalue(l));
    }
    let root = spectral_sqrt(gram_eigenvalues);
    let root_sum: f64 = gram_eigenvalues.iter().map(|&l| root(l)).sum();
    let n = n_states as f64;
    Ok(root_sum * root_sum / (n * n))
}

/// True iff `state_i = group_i state_0` for every `i` and the matrices are
/// closed under multiplication, both within [`GU_TOL`].
pub fn check_gu(e: &Ensemble, group: &[DenseMatrix]) -> Result<bool> {
    if group.len() != e.len() {
        return Err(Error::SizeMismatch {
            expected: e.len(),
            got: group.len(),
        });
    }
    let dim = e.dim();
    if let Some(g) = group.iter().find(|g| g.dim() != dim) {
        return Err(Error::DimensionMismatch(dim, g.dim()));
    }
    if group[0].max_abs_diff(&DenseMatrix::identity(dim))? > GU_TOL {
        return Err(Error::InvalidArgument(
            "first group element must be the identity".into(),
        ));
    }
    let states: Vec<&StateVector> = e.states().collect();
    let base = states[0].amplitudes();
    for (g, s) in group.iter().zip(&states) {
        let image = g.mul_vec(base)?;
        let dev = image
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if dev > GU_TOL {
            return Ok(false);
        }
    }
    for a in group {
        for b in group {
            let prod = a.matmul(b)?;
            let closed = group
                .iter()
                .any(|g| g.max_abs_diff(&prod).is_ok_and(|d| d <= GU_TOL));
            if !closed {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Covariance group of a family of XOR oracles relative to its first member:
/// `g_i = O_{f_i ⊕ f_0}`, so that `O_{f_i}|φ> = g_i O_{f_0}|φ>` for any probe.
pub fn oracle_covariance_group(fam: &OracleFamily) -> Result<Vec<DenseMatrix>> {
    let f0 = &fam.members()[0];
    fam.members()
        .iter()
        .map(|f| Ok(oracle_unitary(&f.xor(f0)?)))
        .collect()
}

/// Residuals of the minimum-error optimality conditions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimalityCertificate {
    /// Max entry of `|Γ - Γ^H|`, `Γ = Σ_i p_i |ψ_i><ψ_i| E_i`.
    pub hermiticity_residual: f64,
    /// `min_j λ_min((Γ + Γ^H)/2 - p_j |ψ_j><ψ_j|)`.
    pub min_eig_gap: f64,
    pub certified: bool,
}

impl OptimalityCertificate {
    pub fn residual(&self) -> f64 {
        self.hermiticity_residual.max(-self.min_eig_gap).max(0.0)
    }
}

pub fn optimality_conditions(e: &Ensemble, p: &Povm) -> Result<OptimalityCertificate> {
    if p.len() != e.len() {
        return Err(Error::SizeMismatch {
            expected: e.len(),
            got: p.len(),
        });
    }
    if p.dim() != e.dim() {
        return Err(Error::DimensionMismatch(e.dim(), p.dim()));
    }
    let weighted: Vec<DenseMatrix> = e
        .items()
        .iter()
        .map(|(q, s)| DenseMatrix::projector(s.amplitudes()).scale_real(*q))
        .collect();
    let mut gamma = DenseMatrix::zeros(e.dim());
    for (w, el) in weighted.iter().zip(p.elements()) {
        gamma = &gamma + &w.matmul(el)?;
    }
    let hermiticity_residual = gamma.hermiticity_residual();
    let sym = gamma.hermitian_part();
    let mut min_eig_gap = f64::INFINITY;
    for w in &weighted {
        let lmin = hermitian_eig(&(&sym - w))?.values[0];
        min_eig_gap = min_eig_gap.min(lmin);
    }
    Ok(OptimalityCertificate {
        hermiticity_residual,
        min_eig_gap,
        certified: hermiticity_residual < CERT_HERMITICITY_TOL && min_eig_gap > -CERT_GAP_TOL,
    })
}

/// Best average success of a deterministic classical strategy that queries
/// one input `x`, observes `f(x)`, and maps the observed bit to a guess.
/// Exhaustive over query points and guess maps.
pub fn classical_one_query_best(fam: &OracleFamily) -> Result<f64> {
    if fam.shape() != (1, 1) {
        let (n, m) = fam.shape();
        return Err(Error::UnsupportedShape(format!(
            "classical baseline needs n = m = 1, got n = {n}, m = {m}"
        )));
    }
    let k = fam.len();
    let mut best: f64 = 0.0;
    for x in 0..2 {
        for guess0 in 0..k {
            for guess1 in 0..k {
                let guess = [guess0, guess1];
                let value: f64 = fam
                    .members()
                    .iter()
                    .zip(fam.priors())
                    .enumerate()
                    .filter(|(i, (f, _))| guess[f.eval(x) as usize] == *i)
                    .map(|(_, (_, p))| p)
                    .sum();
                best = best.max(value);
            }
        }
    }
    Ok(best)
}
