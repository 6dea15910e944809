//! Numerical search for the best one-query probe.
//!
//! The success functional depends on the preparation unitary only through the
//! probe `U0|0...0>`, so the search runs over probe amplitudes directly. For
//! each candidate probe the induced ensemble is measured with its square-root
//! measurement.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrim::{average_success, srm, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{Complex64, StateVector};
use crate::oracle::{post_oracle_states, OracleFamily};
use crate::rng::CounterRng;

/// Parameters below this magnitude count as zero.
pub const ZERO_PARAM_TOL: f64 = 1e-14;
/// Objective evaluations allowed per restart.
pub const MAX_EVALUATIONS: usize = 20_000;
pub const DEFAULT_SPREAD_TOL: f64 = 1e-10;

// Stream domains, so optimizer and scan draws never coincide for equal seeds.
const RESTART_DOMAIN: u64 = 0x6f70_7469_6d69_7a65;
const SCAN_DOMAIN: u64 = 0x7363_616e_0000_0000;

/// Unnormalized probe amplitudes stored as interleaved `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeParams(pub Vec<f64>);

impl ProbeParams {
    pub fn from_state(s: &StateVector) -> Self {
        Self(s.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect())
    }

    /// Normalizes to a probe state.
    pub fn to_state(&self) -> Result<StateVector> {
        if !self.0.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "{} parameters do not form (re, im) pairs",
                self.0.len()
            )));
        }
        if self.0.iter().all(|x| x.abs() < ZERO_PARAM_TOL) {
            return Err(Error::ZeroVector(ZERO_PARAM_TOL));
        }
        StateVector::normalized(
            self.0
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }

    /// Gaussian components, which makes the normalized probe uniform on the
    /// unit sphere.
    fn random(len: usize, rng: CounterRng) -> Self {
        let mut s = rng.stream();
        Self((0..len).map(|_| s.next_gaussian()).collect())
    }
}

/// Number of real parameters for a family's register.
pub fn param_count(fam: &OracleFamily) -> usize {
    2 << fam.num_qubits()
}

/// Average square-root-measurement success of the ensemble produced by
/// sending the normalized probe through each oracle in `fam`.
pub fn objective(params: &ProbeParams, fam: &OracleFamily) -> Result<f64> {
    let want = param_count(fam);
    if params.0.len() != want {
        return Err(Error::SizeMismatch {
            expected: want,
            got: params.0.len(),
        });
    }
    let probe = params.to_state()?;
    let e = post_oracle_states(&probe, fam)?;
    let povm = srm(&e, DEFAULT_RANK_TOL)?;
    average_success(&e, &povm)
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    #[serde(serialize_with = "serialize_state")]
    pub best_probe: StateVector,
    pub best_value: f64,
    pub restarts_run: usize,
    pub evaluations: usize,
    pub per_restart_values: Vec<f64>,
    pub seed: u64,
}

fn serialize_state<S: serde::Serializer>(
    s: &StateVector,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(s.dim()))?;
    for z in s.amplitudes() {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

struct LocalResult {
    params: Vec<f64>,
    value: f64,
    evaluations: usize,
}

/// Maximizes `f` with an adaptive-coefficient Nelder-Mead simplex
/// (coefficients scale with dimension `n`: reflection 1, expansion
/// `1 + 2/n`, contraction `3/4 - 1/(2n)`, shrink `1 - 1/n`). Stops when the
/// spread of simplex values drops below `tol` or the budget is spent.
fn nelder_mead_max(
    f: impl Fn(&[f64]) -> f64,
    start: Vec<f64>,
    step: f64,
    tol: f64,
    budget: usize,
) -> LocalResult {
    let n = start.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        // Minimize the negated objective.
        -f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.clone());
    for i in 0..n {
        let mut v = start.clone();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] < tol || evaluations.get() >= budget {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(-alpha * gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for k in 0..n {
                simplex[i][k] = best[k] + sigma * (simplex[i][k] - best[k]);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    LocalResult {
        params: simplex.swap_remove(0),
        value: -values[0],
        evaluations: evaluations.get(),
    }
}

/// Best probe over `restarts` simplex searches from random starts.
///
/// Restart `r` draws its start from stream `r` of the master seed (see
/// [`CounterRng::derive`]). Restarts run in parallel; the winner is the
/// maximum value with ties going to the lowest restart index, so the result
/// does not depend on scheduling.
pub fn optimize_probe(
    fam: &OracleFamily,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<OptimizationResult> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be >= 1".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let len = param_count(fam);
    // Surface family/objective errors once rather than inside the search.
    let mut probe_start = vec![0.0; len];
    probe_start[0] = 1.0;
    objective(&ProbeParams(probe_start), fam)?;

    let score = |x: &[f64]| objective(&ProbeParams(x.to_vec()), fam).unwrap_or(0.0);
    let runs: Vec<LocalResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let rng = CounterRng::derive(seed ^ RESTART_DOMAIN, r as u64);
            let start = ProbeParams::random(len, rng)
                .to_state()
                .map_or_else(|_| vec![1.0; len], |s| ProbeParams::from_state(&s).0);
            nelder_mead_max(score, start, 0.25, tol, MAX_EVALUATIONS)
        })
        .collect();

    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| {
            if r.value > acc.1 {
                (i, r.value)
            } else {
                acc
            }
        });
    let best = &runs[best_idx];
    Ok(OptimizationResult {
        best_probe: ProbeParams(best.params.clone()).to_state()?,
        best_value: best.value,
        restarts_run: restarts,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        per_restart_values: runs.iter().map(|r| r.value).collect(),
        seed,
    })
}

/// Largest objective over `trials` random probes (Gaussian components,
/// normalized). Trial `t` uses stream `t` of the seed.
pub fn random_probe_scan(fam: &OracleFamily, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let len = param_count(fam);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let rng = CounterRng::derive(seed ^ SCAN_DOMAIN, t as u64);
            objective(&ProbeParams::random(len, rng), fam)
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{canonical_one_bit_family, BoolFunc};
    use crate::protocol::probe_state;

    #[test]
    fn objective_at_closed_form_probe() {
        let fam = canonical_one_bit_family();
        let v = objective(&ProbeParams::from_state(&probe_state()), &fam).unwrap();
        assert!((v - 0.75).abs() < 1e-12, "{v}");
    }

    #[test]
    fn objective_at_basis_probe_is_half() {
        let fam = canonical_one_bit_family();
        let v = objective(&ProbeParams::from_state(&StateVector::zero(2)), &fam).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn objective_errors() {
        let fam = canonical_one_bit_family();
        assert_eq!(
            objective(&ProbeParams(vec![0.0; 8]), &fam),
            Err(Error::ZeroVector(ZERO_PARAM_TOL))
        );
        assert!(matches!(
            objective(&ProbeParams(vec![1.0; 6]), &fam),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn single_member_family_is_perfect() {
        let fam = OracleFamily::uniform(vec![BoolFunc::new(1, 1, vec![1, 0]).unwrap()]).unwrap();
        let v = objective(
            &ProbeParams(vec![0.3, -0.1, 0.5, 0.2, 0.0, 1.0, 0.4, 0.4]),
            &fam,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let r = optimize_probe(&fam, 1, 3, 1e-10).unwrap();
        assert!((r.best_value - 1.0).abs() < 1e-12);
        assert_eq!(r.restarts_run, 1);
    }

    #[test]
    fn nelder_mead_on_quadratic() {
        let r = nelder_mead_max(
            |x| -((x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2)),
            vec![0.0, 0.0],
            0.5,
            1e-14,
            5000,
        );
        assert!((r.params[0] - 1.0).abs() < 1e-5 && (r.params[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn invalid_arguments() {
        let fam = canonical_one_bit_family();
        assert!(optimize_probe(&fam, 0, 1, 1e-10).is_err());
        assert!(optimize_probe(&fam, 1, 1, 0.0).is_err());
        assert!(random_probe_scan(&fam, 0, 1).is_err());
    }

    #[test]
    fn scan_is_reproducible() {
        let fam = canonical_one_bit_family();
        let a = random_probe_scan(&fam, 1, 11).unwrap();
        let b = random_probe_scan(&fam, 1, 11).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
