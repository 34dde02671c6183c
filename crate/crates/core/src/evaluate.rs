//! Failure-probability evaluation: exact order-truncated totals, Monte Carlo
//! validation, and the uncoded / infinite-extraction reference values.

use rand::Rng;

use crate::bernoulli::BernoulliModel;
use crate::code::StabilizerCode;
use crate::decoder::{correction_success, mass_to_f64, DecodingTable};
use crate::error::{Error, Result};
use crate::extraction::{fault_locations, ExtractionCircuit, PropagationTable};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact { omega_max: usize },
    MonteCarlo { samples: usize },
}

#[derive(Clone, Debug)]
pub struct EvaluationResult {
    pub p: f64,
    pub q: usize,
    /// Probability that correction fails outright.
    pub p_total: f64,
    /// `p_total` minus the estimated success mass hiding above the
    /// truncation order (clamped at zero).
    pub p_total_corrected: f64,
    pub method: Method,
    /// Binomial standard error, Monte Carlo only.
    pub std_error: Option<f64>,
}

/// Exact failure probability of a decoding table: one minus the summed mass
/// of every sequence's winning set. Mass above the truncation order is not
/// enumerated and therefore counts as failure; the corrected value credits
/// back the fraction expected to land in the winning sets by chance,
/// `P(w > omega_max) / 2^(n+k)`, since each sequence splits into
/// `2^(n-k) * 4^k` degenerate sets.
pub fn evaluate_exact(
    code: &StabilizerCode,
    table: &DecodingTable,
    model: &BernoulliModel,
    omega_max: usize,
) -> Result<EvaluationResult> {
    if table.q() != model.q {
        return Err(Error::Parameter(format!(
            "table built for q={} but model has q={}",
            table.q(),
            model.q
        )));
    }
    if let Some(table_omega) = table.omega_max() {
        if table_omega != omega_max {
            return Err(Error::Parameter(format!(
                "table truncated at order {table_omega}, evaluation requested {omega_max}"
            )));
        }
    }
    let success = mass_to_f64(table.winning_mass()).min(1.0);
    let p_total = (1.0 - success).max(0.0);
    let tail = model.p_order_above(omega_max);
    let correction = tail / 2f64.powi((code.n() + code.k()) as i32);
    let mut corrected = p_total - correction;
    if corrected < 0.0 {
        log::warn!(
            "truncation correction {correction:.3e} exceeded p_total {p_total:.3e}; clamped to 0"
        );
        corrected = 0.0;
    }
    Ok(EvaluationResult {
        p: model.p,
        q: model.q,
        p_total,
        p_total_corrected: corrected,
        method: Method::Exact { omega_max },
        std_error: None,
    })
}

/// Monte Carlo estimate: sample per-location faults, look the measured
/// sequence up in the table, and count a failure whenever the sequence is
/// unknown or the applied correction leaves a non-stabilizer residue.
pub fn evaluate_monte_carlo<R: Rng + ?Sized>(
    code: &StabilizerCode,
    circ: &ExtractionCircuit,
    table: &DecodingTable,
    model: &BernoulliModel,
    samples: usize,
    rng: &mut R,
) -> Result<EvaluationResult> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    if table.q() != model.q {
        return Err(Error::Parameter(format!(
            "table built for q={} but model has q={}",
            table.q(),
            model.q
        )));
    }
    let prop = PropagationTable::new(circ, code);
    let locations = fault_locations(circ, model.q);
    let mut failures = 0usize;
    let mut faults = Vec::new();
    for _ in 0..samples {
        faults.clear();
        for loc in &locations {
            if rng.gen_bool(model.p) {
                faults.push(loc.sample(rng));
            }
        }
        let (e, seq) = prop.compound(&faults, model.q, circ.n(), circ.n_ancilla());
        let ok = match table.lookup(&seq) {
            None => false,
            Some(entry) => correction_success(code, &entry.correction, &e)?,
        };
        if !ok {
            failures += 1;
        }
    }
    let f = failures as f64 / samples as f64;
    Ok(EvaluationResult {
        p: model.p,
        q: model.q,
        p_total: f,
        p_total_corrected: f,
        method: Method::MonteCarlo { samples },
        std_error: Some((f * (1.0 - f) / samples as f64).sqrt()),
    })
}

/// Failure probability without any encoding: any fault among the CNOTs of a
/// single extraction is fatal. Preparation and measurement faults are
/// excluded; they do not propagate.
pub fn uncoded_baseline(model: &BernoulliModel) -> f64 {
    1.0 - (1.0 - model.p).powi(model.n_cnot as i32)
}

/// Upper bound on the asymptotic per-extraction failure probability:
/// guessing among the 2^(2k) logical classes succeeds with at least 2^(-2k).
pub fn p_infinity_bound(k: usize) -> f64 {
    1.0 - 2f64.powi(-2 * (k as i32))
}
