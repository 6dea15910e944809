//! Structured reports for the command-line tool.
//!
//! Every report has the same envelope (`schema`, `command`, `version`,
//! `inputs`, `results`, `checks`). A check always carries the measured
//! value, the reference value, and the tolerance it was judged against.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{apply, circuit_unitary, compare_up_to_global_phase};
use crate::discrim::{
    check_gu, classical_one_query_best, gram, measurement_from_unitary, optimality_conditions,
    oracle_covariance_group, per_hypothesis_success, srm, srm_success_gu, success_probability,
    DEFAULT_RANK_TOL, POVM_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, psd_sqrt, two_qubit_schmidt_coefficients, Complex64, DenseMatrix, StateVector,
};
use crate::optimize::optimize_probe;
use crate::oracle::{canonical_one_bit_family, oracle_unitary, post_oracle_states, OracleFamily};
use crate::protocol::{
    full_protocol_circuit_with, gate_count_report, probe_state, u0_circuit, u1_circuit_with_angles,
    u1_matrix, ProtocolConstants,
};
use crate::sample::{run_shots, run_shots_fixed};

pub const SCHEMA: &str = "odx-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Probe amplitudes whose norm is off by more than this trigger a warning.
pub const PROBE_NORM_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured - expected| <= tolerance`.
    AbsDiff,
    /// `measured >= expected - tolerance`.
    AtLeast,
    /// `measured <= expected + tolerance`.
    AtMost,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
}

impl Check {
    pub fn new(
        name: &str,
        measured: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let pass = match comparison {
            Comparison::AbsDiff => (measured - expected).abs() <= tolerance,
            Comparison::AtLeast => measured >= expected - tolerance,
            Comparison::AtMost => measured <= expected + tolerance,
        };
        Self {
            name: name.to_string(),
            pass: pass && measured.is_finite(),
            measured,
            expected,
            tolerance,
            comparison,
        }
    }

    pub fn close(name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, measured, expected, tolerance, Comparison::AbsDiff)
    }

    /// Residual-style check: `measured <= tolerance`.
    pub fn small(name: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(name, measured, 0.0, tolerance, Comparison::AtMost)
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self::close(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub command: String,
    pub version: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: Value, results: Value, checks: Vec<Check>) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            version: VERSION,
            inputs,
            results,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows of `kind,name,value,pass,expected,tolerance`: one `result` row
    /// per leaf of `results` (dotted path), one `check` row per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "name", "value", "pass", "expected", "tolerance"])
            .expect("in-memory write");
        let mut leaves = Vec::new();
        flatten(&self.results, String::new(), &mut leaves);
        for (path, value) in leaves {
            w.write_record(["result", &path, &value, "", "", ""])
                .expect("in-memory write");
        }
        for c in &self.checks {
            w.write_record([
                "check",
                &c.name,
                &c.measured.to_string(),
                &c.pass.to_string(),
                &c.expected.to_string(),
                &c.tolerance.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "odx {} ({})", self.command, self.version);
        let mut leaves = Vec::new();
        flatten(&self.results, String::new(), &mut leaves);
        for (path, value) in leaves {
            let _ = writeln!(s, "  {path} = {value}");
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "checks:");
        }
        for c in &self.checks {
            let rel = match c.comparison {
                Comparison::AbsDiff => "~",
                Comparison::AtLeast => ">=",
                Comparison::AtMost => "<=",
            };
            let _ = writeln!(
                s,
                "  [{}] {}: {:.15e} {} {:.15e} (tol {:e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                rel,
                c.expected,
                c.tolerance
            );
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "{passed}/{} checks passed", self.checks.len());
        s
    }
}

fn flatten(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((prefix, s.clone())),
        other => out.push((prefix, other.to_string())),
    }
}

fn matrix_json(m: &DenseMatrix) -> Value {
    Value::Array(
        (0..m.dim())
            .map(|i| Value::Array(m.row(i).iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn state_json(s: &StateVector) -> Value {
    Value::Array(s.amplitudes().iter().map(|z| json!([z.re, z.im])).collect())
}

/// Parses a probe file: one `re im` pair per line, `#` comments and blank
/// lines ignored, amplitude count a power of two. The state is normalized;
/// a warning is returned when the input norm is off by more than
/// [`PROBE_NORM_WARN`].
pub fn parse_probe(text: &str) -> Result<(StateVector, Option<String>)> {
    let mut amps = Vec::new();
    let mut first_line = 1;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if amps.is_empty() {
            first_line = line;
        }
        let mut fields = Vec::new();
        let mut col = 0;
        for tok in content.split_whitespace() {
            let start = content[col..].find(tok).map_or(col, |o| col + o);
            col = start + tok.len();
            fields.push((start + 1, tok));
        }
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                column: fields.get(2).map_or(content.len() + 1, |f| f.0),
                message: format!("expected `re im`, found {} field(s)", fields.len()),
            });
        }
        let mut parts = [0.0; 2];
        for (slot, (column, tok)) in parts.iter_mut().zip(&fields) {
            *slot = tok
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    column: *column,
                    message: format!("`{tok}` is not a finite number"),
                })?;
        }
        amps.push(Complex64::new(parts[0], parts[1]));
    }
    if amps.is_empty() || !amps.len().is_power_of_two() {
        return Err(Error::Parse {
            line: first_line,
            column: 1,
            message: format!("amplitude count {} is not a power of two", amps.len()),
        });
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Parse {
            line: first_line,
            column: 1,
            message: "probe has zero norm".into(),
        });
    }
    let warning = ((norm - 1.0).abs() > PROBE_NORM_WARN)
        .then(|| format!("probe norm {norm} differs from 1; normalized on load"));
    Ok((StateVector::normalized(amps)?, warning))
}

/// Fault injection for [`verify`]; zero fields leave the battery untouched.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Perturbations {
    /// Added to the first rotation angle of the measurement decomposition.
    pub theta1: f64,
    /// Added to the `|00>` amplitude of the probe before renormalizing.
    pub probe: f64,
}

/// Full check battery for the closed-form protocol.
pub fn verify(perturb: Perturbations) -> Result<ReportDocument> {
    let fam = canonical_one_bit_family();
    let k = ProtocolConstants::new();
    let k_circ = ProtocolConstants {
        theta1: k.theta1 + perturb.theta1,
        ..k
    };

    let mut probe = probe_state();
    if perturb.probe != 0.0 {
        let mut a = probe.amplitudes().to_vec();
        a[0] += perturb.probe;
        probe = StateVector::normalized(a)?;
    }

    let ensemble = post_oracle_states(&probe, &fam)?;
    let g = gram(&ensemble)?;
    let third = 1.0 / 3.0;
    let g_star = DenseMatrix::from_real_rows(&[
        vec![1.0, -third, third, third],
        vec![-third, 1.0, third, third],
        vec![third, third, 1.0, -third],
        vec![third, third, -third, 1.0],
    ])?;
    let eig = hermitian_eig(&g)?;
    let want_eigs = [0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0];
    let eig_dev = eig
        .values
        .iter()
        .zip(want_eigs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let trace_sqrt = psd_sqrt(&g)?.trace().re;

    let povm = srm(&ensemble, DEFAULT_RANK_TOL)?;
    let srm_report = success_probability(&ensemble, &povm)?;
    let spectral = srm_success_gu(&eig.values, ensemble.len())?;
    let cert = optimality_conditions(&ensemble, &povm)?;
    let swapped = povm.permuted(&[1, 0, 2, 3])?;
    let swapped_cert = optimality_conditions(&ensemble, &swapped)?;

    let u1 = u1_matrix();
    let u1_circ = u1_circuit_with_angles(&k_circ);
    let cmp = compare_up_to_global_phase(&circuit_unitary(&u1_circ)?, &u1)?;
    let u1_povm = measurement_from_unitary(&u1)?;
    let u1_per = per_hypothesis_success(&ensemble, &u1_povm)?;

    let prepared = apply(&u0_circuit(), &StateVector::zero(2))?;
    let prep_dev = prepared
        .amplitudes()
        .iter()
        .zip(probe.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let (_, schmidt2) = two_qubit_schmidt_coefficients(&probe)?;

    let protocol_per: Vec<f64> = fam
        .members()
        .iter()
        .enumerate()
        .map(|(m, f)| {
            let c = full_protocol_circuit_with(f, &u1_circ)?;
            Ok(apply(&c, &StateVector::zero(2))?.probabilities()[m])
        })
        .collect::<Result<_>>()?;
    let protocol_avg = protocol_per.iter().sum::<f64>() / protocol_per.len() as f64;

    let group = oracle_covariance_group(&fam)?;
    let gu = check_gu(&ensemble, &group)?;
    let oracle_group_exact = oracle_group_is_exact(&fam);
    let counts = gate_count_report();
    let classical = classical_one_query_best(&fam)?;

    let max_dev =
        |xs: &[f64], target: f64| xs.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    let srm_vs_u1 = srm_report
        .per_hypothesis_success
        .iter()
        .zip(&u1_per)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let checks = vec![
        Check::small("gram_matches_closed_form", g.max_abs_diff(&g_star)?, 1e-12),
        Check::small("gram_eigenvalues", eig_dev, 1e-10),
        Check::close("trace_sqrt_gram", trace_sqrt, 2.0 * 3f64.sqrt(), 1e-10),
        Check::close(
            "srm_average_success",
            srm_report.average_success,
            0.75,
            1e-12,
        ),
        Check::small(
            "srm_per_hypothesis_success",
            max_dev(&srm_report.per_hypothesis_success, 0.75),
            1e-12,
        ),
        Check::close("spectral_formula", spectral, 0.75, 1e-12),
        Check::close(
            "spectral_vs_direct_srm",
            spectral,
            srm_report.average_success,
            1e-9,
        ),
        Check::close("protocol_average_success", protocol_avg, 0.75, 1e-12),
        Check::small(
            "protocol_per_hypothesis_success",
            max_dev(&protocol_per, 0.75),
            1e-12,
        ),
        Check::small("u1_measurement_matches_srm", srm_vs_u1, 1e-9),
        Check::small("u1_unitarity", u1.unitarity_residual(), 1e-12),
        Check::small("decomposition_matches_u1", cmp.max_deviation, 1e-10),
        Check::small("u0_prepares_probe", prep_dev, 1e-12),
        Check::small("probe_second_schmidt_coefficient", schmidt2, 1e-12),
        Check::close("u1_cnot_count", counts.measurement.cnot as f64, 2.0, 0.0),
        Check::close("u1_hadamard_count", counts.measurement.h as f64, 2.0, 0.0),
        Check::close("u1_ry_count", counts.measurement.ry as f64, 4.0, 0.0),
        Check::close(
            "u0_entangling_gates",
            counts.preparation.two_qubit as f64,
            0.0,
            0.0,
        ),
        Check::close(
            "total_two_qubit_gates",
            counts.total_two_qubit as f64,
            2.0,
            0.0,
        ),
        Check::small(
            "optimality_hermiticity_residual",
            cert.hermiticity_residual,
            1e-10,
        ),
        Check::new(
            "optimality_min_eig_gap",
            cert.min_eig_gap,
            0.0,
            1e-10,
            Comparison::AtLeast,
        ),
        Check::new(
            "swapped_measurement_gap",
            swapped_cert.min_eig_gap,
            -0.01,
            0.0,
            Comparison::AtMost,
        ),
        Check::small("povm_completeness", povm.completeness_residual(), POVM_TOL),
        Check::flag("geometrically_uniform", gu),
        Check::flag("oracle_group_exact", oracle_group_exact),
        Check::close("classical_baseline", classical, 0.5, 0.0),
        Check::new(
            "quantum_advantage",
            srm_report.average_success - classical,
            0.0,
            0.0,
            Comparison::AtLeast,
        ),
    ];

    let results = json!({
        "average_success": srm_report.average_success,
        "per_hypothesis_success": srm_report.per_hypothesis_success,
        "protocol_per_hypothesis_success": protocol_per,
        "gram_eigenvalues": eig.values,
        "trace_sqrt_gram": trace_sqrt,
        "spectral_success": spectral,
        "classical_success": classical,
        "optimality": cert,
        "swapped_optimality": swapped_cert,
        "decomposition": {
            "phase": [cmp.phase.re, cmp.phase.im],
            "max_deviation": cmp.max_deviation,
            "discrepancy": matrix_json(&cmp.discrepancy),
        },
        "gate_counts": counts,
        "constants": k,
        "probe": state_json(&probe),
    });
    let inputs = json!({
        "perturb_theta1": perturb.theta1,
        "perturb_probe": perturb.probe,
    });
    Ok(ReportDocument::new("verify", inputs, results, checks))
}

/// The four oracle matrices are exactly 0/1, contain the identity, and are
/// closed under products.
fn oracle_group_is_exact(fam: &OracleFamily) -> bool {
    let mats: Vec<DenseMatrix> = fam.members().iter().map(oracle_unitary).collect();
    let exact = mats
        .iter()
        .flat_map(|m| m.as_slice())
        .all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0));
    let has_identity = mats.contains(&DenseMatrix::identity(mats[0].dim()));
    let closed = mats
        .iter()
        .all(|a| mats.iter().all(|b| mats.contains(&(a * b))));
    exact && has_identity && closed
}

fn family_inputs(fam: &OracleFamily, probe: Option<&StateVector>) -> Value {
    let mut v = json!({
        "family": fam.members().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "priors": fam.priors(),
    });
    if let Some(p) = probe {
        v["probe"] = state_json(p);
    }
    v
}

fn is_canonical(fam: &OracleFamily) -> bool {
    *fam == canonical_one_bit_family()
}

pub fn gram_report(fam: &OracleFamily, probe: &StateVector) -> Result<ReportDocument> {
    let e = post_oracle_states(probe, fam)?;
    let g = gram(&e)?;
    let eig = hermitian_eig(&g)?;
    let trace_sqrt = psd_sqrt(&g)?.trace().re;
    let diag_dev = (0..g.dim())
        .map(|i| (g[(i, i)] - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    let checks = vec![
        Check::small("gram_hermitian", g.hermiticity_residual(), 1e-12),
        Check::small("gram_unit_diagonal", diag_dev, 1e-12),
    ];
    let results = json!({
        "gram": matrix_json(&g),
        "eigenvalues": eig.values,
        "trace_sqrt_gram": trace_sqrt,
    });
    Ok(ReportDocument::new(
        "gram",
        family_inputs(fam, Some(probe)),
        results,
        checks,
    ))
}

pub fn srm_report(fam: &OracleFamily, probe: &StateVector) -> Result<ReportDocument> {
    let e = post_oracle_states(probe, fam)?;
    let povm = srm(&e, DEFAULT_RANK_TOL)?;
    let report = success_probability(&e, &povm)?;
    let cert = optimality_conditions(&e, &povm)?;
    let gu = check_gu(&e, &oracle_covariance_group(fam)?)?;

    let mut checks = vec![
        Check::small("povm_completeness", povm.completeness_residual(), POVM_TOL),
        Check::flag("povm_elements_psd", povm.validate(POVM_TOL).is_ok()),
        Check::small(
            "optimality_hermiticity_residual",
            cert.hermiticity_residual,
            1e-9,
        ),
        Check::new(
            "optimality_min_eig_gap",
            cert.min_eig_gap,
            0.0,
            1e-9,
            Comparison::AtLeast,
        ),
    ];
    let mut spectral = Value::Null;
    if gu && e.is_equiprobable() {
        let s = srm_success_gu(&report.gram_eigenvalues, e.len())?;
        spectral = json!(s);
        checks.push(Check::close(
            "spectral_vs_direct_srm",
            s,
            report.average_success,
            1e-9,
        ));
    }
    let results = json!({
        "report": report,
        "optimality": cert,
        "geometrically_uniform": gu,
        "spectral_success": spectral,
    });
    Ok(ReportDocument::new(
        "srm",
        family_inputs(fam, Some(probe)),
        results,
        checks,
    ))
}

pub fn optimize_report(
    fam: &OracleFamily,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<ReportDocument> {
    let r = optimize_probe(fam, restarts, seed, tol)?;
    let mut checks = vec![Check::new(
        "best_value_is_probability",
        r.best_value,
        1.0,
        1e-12,
        Comparison::AtMost,
    )];
    if is_canonical(fam) {
        checks.push(Check::new(
            "optimum_lower_bound",
            r.best_value,
            0.75,
            1e-6,
            Comparison::AtLeast,
        ));
        checks.push(Check::new(
            "optimum_upper_bound",
            r.best_value,
            0.75,
            1e-9,
            Comparison::AtMost,
        ));
    }
    let mut inputs = family_inputs(fam, None);
    inputs["restarts"] = json!(restarts);
    inputs["seed"] = json!(seed);
    inputs["tol"] = json!(tol);
    Ok(ReportDocument::new(
        "optimize",
        inputs,
        serde_json::to_value(&r).expect("serializes"),
        checks,
    ))
}

/// Binomial acceptance band for the sample command: 0.005 at 10^5 shots,
/// scaled as `1/sqrt(shots)`.
pub fn sample_tolerance(shots: u64) -> f64 {
    0.005 * (1e5 / shots as f64).sqrt()
}

pub fn sample_report(shots: u64, seed: u64) -> Result<ReportDocument> {
    let summary = run_shots(shots, seed)?;
    let fam = canonical_one_bit_family();
    let mut histograms = serde_json::Map::new();
    for (i, f) in fam.members().iter().enumerate() {
        let h = run_shots_fixed(f, shots, seed)?;
        histograms.insert(format!("f{i}"), json!(h));
    }
    let checks = vec![Check::close(
        "success_frequency",
        summary.frequency,
        0.75,
        sample_tolerance(shots),
    )];
    let results = json!({
        "summary": summary,
        "histograms": histograms,
    });
    Ok(ReportDocument::new(
        "sample",
        json!({"shots": shots, "seed": seed}),
        results,
        checks,
    ))
}

pub fn classical_report(fam: &OracleFamily) -> Result<ReportDocument> {
    let best = classical_one_query_best(fam)?;
    let mut checks = vec![Check::new(
        "classical_is_probability",
        best,
        1.0,
        0.0,
        Comparison::AtMost,
    )];
    if is_canonical(fam) {
        checks.push(Check::close("classical_baseline", best, 0.5, 0.0));
        checks.push(Check::new(
            "below_quantum_optimum",
            best,
            0.75,
            0.0,
            Comparison::AtMost,
        ));
    }
    Ok(ReportDocument::new(
        "classical",
        family_inputs(fam, None),
        json!({ "classical_success": best }),
        checks,
    ))
}
