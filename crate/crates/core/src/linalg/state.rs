use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the squared norm accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Pure state of an `n`-qubit register.
///
/// Basis index convention: qubit 0 is the most significant bit, so
/// `|q0 q1>` sits at index `2*q0 + q1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already be unit norm within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        check_finite(&amplitudes)?;
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        check_finite(&amplitudes)?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            num_qubits,
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index,
                width: num_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0).expect("index 0 always valid")
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Unchecked constructor for internal paths that preserve norm by
    /// construction (unitary evolution). Norm drift is asserted in debug builds.
    pub(crate) fn from_unitary_image(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << num_qubits);
        debug_assert!(
            (amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-9,
            "unitary image lost normalization"
        );
        Self {
            num_qubits,
            amplitudes,
        }
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_finite(amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite("state amplitudes"));
    }
    Ok(())
}

/// Schmidt coefficients `(s1, s2)`, `s1 >= s2`, of a two-qubit pure state.
///
/// Uses `s1 * s2 = |det M|` and `s1^2 + s2^2 = |M|_F^2` on the 2x2 amplitude
/// reshape, which keeps `s2` accurate down to roundoff for product states.
pub fn two_qubit_schmidt_coefficients(state: &StateVector) -> Result<(f64, f64)> {
    if state.num_qubits() != 2 {
        return Err(Error::WidthMismatch {
            expected: 2,
            got: state.num_qubits(),
        });
    }
    let a = state.amplitudes();
    let det = (a[0] * a[3] - a[1] * a[2]).norm();
    let fro2 = state.norm_sqr();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((fro2 + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    Ok((s1, s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(StateVector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
        let s = StateVector::normalized(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)])
            .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.num_qubits(), 1);
        assert!(StateVector::normalized(vec![Complex64::new(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn basis_ordering_q0_most_significant() {
        let s = StateVector::basis(2, 2).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn schmidt_of_bell_and_product() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let (s1, s2) = two_qubit_schmidt_coefficients(&bell).unwrap();
        assert!((s1 - h).abs() < 1e-15 && (s2 - h).abs() < 1e-15);
        let prod = StateVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let (s1, s2) = two_qubit_schmidt_coefficients(&prod).unwrap();
        assert!((s1 - 1.0).abs() < 1e-15 && s2 < 1e-15);
    }
}
