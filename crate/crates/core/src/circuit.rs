//! Gate lists and their statevector semantics.
//!
//! Gates apply in list order, so the circuit unitary is
//! `U = G_k ... G_2 G_1` for `gates = [G_1, G_2, ..., G_k]`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, DenseMatrix, StateVector};
use crate::oracle::{oracle_unitary, BoolFunc};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// `exp(-iθY/2) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry {
        qubit: usize,
        theta: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// XOR oracle on the leading `n + m` qubits of the register.
    Oracle(BoolFunc),
}

impl Gate {
    pub fn ry(qubit: usize, theta: f64) -> Self {
        Gate::Ry { qubit, theta }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    /// Checks qubit indices against a register of `width` qubits.
    pub fn validate(&self, width: usize) -> Result<()> {
        let check = |q: usize| {
            if q < width {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: q, width })
            }
        };
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Ry { qubit: q, .. } => check(*q),
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(Error::SameControlTarget(*control));
                }
                Ok(())
            }
            Gate::Oracle(f) => {
                if f.num_qubits() > width {
                    return Err(Error::IndexOutOfRange {
                        index: f.num_qubits() - 1,
                        width,
                    });
                }
                Ok(())
            }
        }
    }

    fn single_qubit_matrix(&self) -> Option<(usize, [[f64; 2]; 2])> {
        match *self {
            Gate::H(q) => Some((
                q,
                [
                    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
                    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
                ],
            )),
            Gate::X(q) => Some((q, [[0.0, 1.0], [1.0, 0.0]])),
            Gate::Ry { qubit, theta } => {
                let (s, c) = (theta / 2.0).sin_cos();
                Some((qubit, [[c, -s], [s, c]]))
            }
            _ => None,
        }
    }
}

/// 2x2 matrix of `R_y(θ)`.
pub fn ry_matrix(theta: f64) -> DenseMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    DenseMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).expect("2x2")
}

/// Embeds a gate into a `num_qubits` register (qubit 0 most significant).
pub fn gate_matrix(g: &Gate, num_qubits: usize) -> Result<DenseMatrix> {
    g.validate(num_qubits)?;
    let dim = 1usize << num_qubits;
    if let Some((q, m)) = g.single_qubit_matrix() {
        let small = DenseMatrix::from_real_rows(&[m[0].to_vec(), m[1].to_vec()])?;
        let left = DenseMatrix::identity(1 << q);
        let right = DenseMatrix::identity(1 << (num_qubits - q - 1));
        return Ok(kron(&kron(&left, &small), &right));
    }
    match g {
        Gate::Cnot { control, target } => {
            let cbit = num_qubits - 1 - control;
            let tbit = num_qubits - 1 - target;
            let mut u = DenseMatrix::zeros(dim);
            for i in 0..dim {
                let j = if (i >> cbit) & 1 == 1 {
                    i ^ (1 << tbit)
                } else {
                    i
                };
                u[(j, i)] = Complex64::new(1.0, 0.0);
            }
            Ok(u)
        }
        Gate::Oracle(f) => {
            let rest = DenseMatrix::identity(1 << (num_qubits - f.num_qubits()));
            Ok(kron(&oracle_unitary(f), &rest))
        }
        _ => unreachable!("single-qubit gates handled above"),
    }
}

/// Counts of each gate kind in a circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub h: usize,
    pub x: usize,
    pub ry: usize,
    pub cnot: usize,
    pub oracle: usize,
    pub single_qubit: usize,
    /// Two-qubit gates, not counting oracle calls.
    pub two_qubit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "circuit needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self> {
        g.validate(self.num_qubits)?;
        self.gates.push(g);
        Ok(self)
    }

    /// Appends all gates of `other` (same width).
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::H(_) => c.h += 1,
                Gate::X(_) => c.x += 1,
                Gate::Ry { .. } => c.ry += 1,
                Gate::Cnot { .. } => c.cnot += 1,
                Gate::Oracle(_) => c.oracle += 1,
            }
        }
        c.single_qubit = c.h + c.x + c.ry;
        c.two_qubit = c.cnot;
        c
    }
}

/// Product of the gate matrices, later gates on the left.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseMatrix> {
    let mut u = DenseMatrix::identity(1 << c.num_qubits);
    for g in &c.gates {
        u = gate_matrix(g, c.num_qubits)?.matmul(&u)?;
    }
    Ok(u)
}

/// Evolves `s` gate by gate without forming the full unitary.
pub fn apply(c: &Circuit, s: &StateVector) -> Result<StateVector> {
    if s.num_qubits() != c.num_qubits {
        return Err(Error::WidthMismatch {
            expected: c.num_qubits,
            got: s.num_qubits(),
        });
    }
    let n = c.num_qubits;
    let mut amps = s.amplitudes().to_vec();
    for g in &c.gates {
        if let Some((q, m)) = g.single_qubit_matrix() {
            let bit = 1usize << (n - 1 - q);
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let (a0, a1) = (amps[i], amps[i | bit]);
                    amps[i] = a0 * m[0][0] + a1 * m[0][1];
                    amps[i | bit] = a0 * m[1][0] + a1 * m[1][1];
                }
            }
            continue;
        }
        match g {
            Gate::Cnot { control, target } => {
                let cb = 1usize << (n - 1 - control);
                let tb = 1usize << (n - 1 - target);
                for i in 0..amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Oracle(f) => {
                let shift = n - f.num_qubits();
                let low = (1usize << shift) - 1;
                let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
                for (i, &a) in amps.iter().enumerate() {
                    let j = (f.oracle_image(i >> shift) << shift) | (i & low);
                    out[j] = a;
                }
                amps = out;
            }
            _ => unreachable!(),
        }
    }
    Ok(StateVector::from_unitary_image(n, amps))
}

/// Outcome of comparing two matrices modulo a global phase.
#[derive(Debug, Clone)]
pub struct PhaseComparison {
    /// Unit-modulus `c` chosen so that `u ≈ c v`.
    pub phase: Complex64,
    pub max_deviation: f64,
    /// `u - c v`, entrywise.
    pub discrepancy: DenseMatrix,
}

/// Aligns `u` to `v` by a global phase anchored at the largest-magnitude
/// entry of `v`, and reports the residual.
pub fn compare_up_to_global_phase(u: &DenseMatrix, v: &DenseMatrix) -> Result<PhaseComparison> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let (k, _) = v
        .as_slice()
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| {
            if z.norm() > best.1 {
                (i, z.norm())
            } else {
                best
            }
        });
    let (uk, vk) = (u.as_slice()[k], v.as_slice()[k]);
    let ratio = if vk.norm() > 0.0 {
        uk / vk
    } else {
        Complex64::new(0.0, 0.0)
    };
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let discrepancy = u - &v.scale(phase);
    Ok(PhaseComparison {
        phase,
        max_deviation: discrepancy.max_abs(),
        discrepancy,
    })
}

pub fn equal_up_to_global_phase(u: &DenseMatrix, v: &DenseMatrix, tol: f64) -> Result<bool> {
    Ok(compare_up_to_global_phase(u, v)?.max_deviation <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> DenseMatrix {
        gate_matrix(&Gate::H(0), 1).unwrap()
    }

    #[test]
    fn cnot_q0_control_swaps_2_and_3() {
        let u = gate_matrix(&Gate::cnot(0, 1), 2).unwrap();
        for (i, j) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            assert_eq!(u[(i, j)], Complex64::new(1.0, 0.0));
        }
        assert_eq!(u.as_slice().iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn h_on_q1_is_identity_kron_h() {
        let u = gate_matrix(&Gate::H(1), 2).unwrap();
        assert_eq!(u, kron(&DenseMatrix::identity(2), &h()));
    }

    #[test]
    fn invalid_gates() {
        assert_eq!(
            gate_matrix(&Gate::H(2), 2),
            Err(Error::IndexOutOfRange { index: 2, width: 2 })
        );
        assert_eq!(
            Circuit::from_gates(2, vec![Gate::cnot(1, 1)]),
            Err(Error::SameControlTarget(1))
        );
        let f = BoolFunc::new(2, 1, vec![0; 4]).unwrap();
        assert!(Circuit::from_gates(2, vec![Gate::Oracle(f)]).is_err());
    }

    #[test]
    fn empty_and_involution() {
        let empty = Circuit::new(2).unwrap();
        assert_eq!(circuit_unitary(&empty).unwrap(), DenseMatrix::identity(4));
        let hh = Circuit::from_gates(1, vec![Gate::H(0), Gate::H(0)]).unwrap();
        assert!(
            circuit_unitary(&hh)
                .unwrap()
                .max_abs_diff(&DenseMatrix::identity(2))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn order_is_temporal() {
        // X then H on |0> gives |->; H then X gives |+>.
        let c = Circuit::from_gates(1, vec![Gate::X(0), Gate::H(0)]).unwrap();
        let out = apply(&c, &StateVector::zero(1)).unwrap();
        assert!(out.amplitudes()[1].re < 0.0);
        let u = circuit_unitary(&c).unwrap();
        assert!(
            u.mul_vec(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
                .unwrap()[1]
                .re
                < 0.0
        );
    }

    #[test]
    fn x_on_q0() {
        let c = Circuit::from_gates(2, vec![Gate::X(0)]).unwrap();
        let out = apply(&c, &StateVector::zero(2)).unwrap();
        assert_eq!(out.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            apply(&c, &StateVector::zero(3)),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn oracle_gate_embeds_on_leading_qubits() {
        let f = BoolFunc::new(1, 1, vec![0, 1]).unwrap();
        let u = gate_matrix(&Gate::Oracle(f.clone()), 3).unwrap();
        let cn = gate_matrix(&Gate::cnot(0, 1), 3).unwrap();
        assert_eq!(u, cn);
        let c = Circuit::from_gates(3, vec![Gate::X(0), Gate::Oracle(f)]).unwrap();
        let out = apply(&c, &StateVector::zero(3)).unwrap();
        assert_eq!(out.probabilities()[0b110], 1.0);
    }

    #[test]
    fn global_phase_examples() {
        let h = h();
        assert!(equal_up_to_global_phase(&h.scale_real(-1.0), &h, 1e-12).unwrap());
        assert!(equal_up_to_global_phase(&h, &h, 1e-12).unwrap());
        let x = gate_matrix(&Gate::X(0), 1).unwrap();
        assert!(!equal_up_to_global_phase(&h, &x, 1e-12).unwrap());
        let i_h = h.scale(Complex64::new(0.0, 1.0));
        let cmp = compare_up_to_global_phase(&i_h, &h).unwrap();
        assert!((cmp.phase - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(equal_up_to_global_phase(&h, &DenseMatrix::identity(4), 1e-12).is_err());
    }

    #[test]
    fn counts() {
        let f = BoolFunc::new(1, 1, vec![0, 1]).unwrap();
        let c = Circuit::from_gates(
            2,
            vec![
                Gate::H(0),
                Gate::ry(1, 0.3),
                Gate::Oracle(f),
                Gate::cnot(1, 0),
                Gate::X(1),
            ],
        )
        .unwrap();
        let k = c.counts();
        assert_eq!((k.h, k.x, k.ry, k.cnot, k.oracle), (1, 1, 1, 1, 1));
        assert_eq!((k.single_qubit, k.two_qubit), (3, 1));
    }
}
