//! Closed-form optimal one-query protocol for the four one-bit functions.
//!
//! Preparation `U0 = H ⊗ R_y(θ0)` produces a product probe; the oracle acts;
//! the measurement unitary `U1` (two CNOTs, two Hadamards, four `R_y`) is
//! followed by a computational-basis readout where outcome `m` names `f_m`.
//! Every constant is evaluated from its closed form at runtime.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{apply, Circuit, Gate, GateCounts};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, StateVector};
use crate::oracle::BoolFunc;

/// Scalars of the closed-form protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolConstants {
    /// Probe amplitude on `|00>` and `|10>`.
    pub a: f64,
    /// Probe amplitude on `|01>` and `|11>`.
    pub b: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
}

impl ProtocolConstants {
    pub fn new() -> Self {
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let gamma = 1.0 / (2.0 * s2);
        Self {
            a: (1.0 + s2) / (2.0 * s3),
            b: (1.0 - s2) / (2.0 * s3),
            gamma,
            alpha: 0.5 + gamma,
            beta: 0.5 - gamma,
            theta0: 2.0 * ((s2 - 2.0) / (2.0 * s3)).asin(),
            theta1: -3.0 * PI / 4.0,
            theta2: -PI / 2.0,
            theta3: PI / 4.0,
            theta4: PI / 2.0,
        }
    }
}

impl Default for ProtocolConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// Optimal product probe `(a, b, a, b)`.
pub fn probe_state() -> StateVector {
    let k = ProtocolConstants::new();
    StateVector::from_real(&[k.a, k.b, k.a, k.b]).expect("closed-form probe is normalized")
}

/// `[H(0), Ry(1, θ0)]`.
pub fn u0_circuit() -> Circuit {
    let k = ProtocolConstants::new();
    Circuit::from_gates(2, vec![Gate::H(0), Gate::ry(1, k.theta0)]).expect("valid gates")
}

/// The 4x4 real measurement unitary.
pub fn u1_matrix() -> DenseMatrix {
    let ProtocolConstants {
        gamma: g,
        alpha: a,
        beta: b,
        ..
    } = ProtocolConstants::new();
    DenseMatrix::from_real_rows(&[
        vec![g, -g, a, b],
        vec![-g, g, b, a],
        vec![a, b, -g, g],
        vec![b, a, g, -g],
    ])
    .expect("4x4")
}

/// Two-CNOT decomposition of [`u1_matrix`].
pub fn u1_circuit() -> Circuit {
    u1_circuit_with_angles(&ProtocolConstants::new())
}

/// [`u1_circuit`] with caller-supplied rotation angles (`theta1..theta4`).
pub fn u1_circuit_with_angles(k: &ProtocolConstants) -> Circuit {
    Circuit::from_gates(
        2,
        vec![
            Gate::H(1),
            Gate::cnot(1, 0),
            Gate::ry(0, k.theta1),
            Gate::ry(1, k.theta2),
            Gate::cnot(0, 1),
            Gate::ry(0, k.theta3),
            Gate::ry(1, k.theta4),
            Gate::H(1),
        ],
    )
    .expect("valid gates")
}

/// `U0`, then the oracle, then the decomposed `U1`.
pub fn full_protocol_circuit(f: &BoolFunc) -> Result<Circuit> {
    full_protocol_circuit_with(f, &u1_circuit())
}

pub fn full_protocol_circuit_with(f: &BoolFunc, measurement: &Circuit) -> Result<Circuit> {
    if (f.n(), f.m()) != (1, 1) {
        return Err(Error::UnsupportedShape(format!(
            "protocol needs n = m = 1, got n = {}, m = {}",
            f.n(),
            f.m()
        )));
    }
    let mut c = u0_circuit();
    c.push(Gate::Oracle(f.clone()))?;
    c.extend(measurement)?;
    Ok(c)
}

/// Readout distribution `|<m| U1 O_f U0 |00>|²`, `m = 0..3`.
pub fn full_protocol_distribution(f: &BoolFunc) -> Result<Vec<f64>> {
    let c = full_protocol_circuit(f)?;
    Ok(apply(&c, &StateVector::zero(2))?.probabilities())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GateCountReport {
    pub preparation: GateCounts,
    pub measurement: GateCounts,
    /// Two-qubit gates outside the oracle.
    pub total_two_qubit: usize,
}

pub fn gate_count_report() -> GateCountReport {
    let preparation = u0_circuit().counts();
    let measurement = u1_circuit().counts();
    GateCountReport {
        preparation,
        measurement,
        total_two_qubit: preparation.two_qubit + measurement.two_qubit,
    }
}
