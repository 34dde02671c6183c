//! Count-vector decoding tables for uniform per-location Bernoulli noise.
//!
//! Under the standard model every fault location carries one of K = 15
//! patterns with probability p/15 (preparation and measurement flips are
//! cloned 15-fold into pseudo-gate locations so all locations look alike).
//! Each degenerate set then only needs, per order w, the count of order-w
//! fault configurations landing in it: the set's probability is
//! sum_w n(w) P(w) with P(w) = (p/15)^w (1-p)^(L-w) over the L = q * (N_CNOT
//! + 2(n-k)) locations.
//!
//! Tables for higher orders come from convolving two lower-order tables.
//! The raw convolution overcounts: permuted splits of the same
//! configuration, pairs whose sides repeat a base error (cancelling, order
//! drops by 2 per repeat), and pairs whose sides hit the same location with
//! different patterns. The last case behaves differently per location
//! class: two distinct patterns at a gate location XOR into a third valid
//! pattern there (order drops by 1), while two distinct clones at a
//! preparation/measurement location cancel outright, because every clone
//! maps to the same bit flip. Counts are therefore kept per (order,
//! clone-order) pair, which makes the correction exact for both classes;
//! the single-class published form of the correction is exposed as
//! [`zeta`] for reference. Counts stay exact rationals end to end: the
//! divisions must not leak float noise into later merges.

use std::collections::BTreeMap;

use num::rational::Ratio;
use num::{One, Signed, Zero};

use crate::code::StabilizerCode;
use crate::decoder::{
    quantize_probability, representative, set_key, DecodingEntry, DecodingTable,
    DegenerateSetKey,
};
use crate::error::{Error, Result};
use crate::extraction::{
    enumerate_base_errors, syndrome_sequence, BaseErrorKind, ExtractionCircuit,
    PropagationTable, SyndromeSequence,
};
use crate::pauli::PauliOperator;

pub type Count = Ratio<i128>;

/// Error counts indexed by order, with an internal split by how many of the
/// constituent faults sit at cloned preparation/measurement locations.
/// Corrections can transiently produce non-integer values, hence rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    omega_max: usize,
    /// Triangular layout: entry (w, m) at w (w + 1) / 2 + m, 0 <= m <= w.
    data: Vec<Count>,
}

fn tri(w: usize, m: usize) -> usize {
    w * (w + 1) / 2 + m
}

impl CountVector {
    pub fn zeros(omega_max: usize) -> Self {
        CountVector {
            omega_max,
            data: vec![Count::zero(); tri(omega_max + 1, 0)],
        }
    }

    pub fn identity(omega_max: usize) -> Self {
        let mut v = Self::zeros(omega_max);
        v.data[0] = Count::one();
        v
    }

    pub fn order_max(&self) -> usize {
        self.omega_max
    }

    /// Total count at one order (marginal over the clone split).
    pub fn get(&self, omega: usize) -> Count {
        if omega > self.omega_max {
            return Count::zero();
        }
        (0..=omega).map(|m| self.data[tri(omega, m)]).sum()
    }

    pub fn get_split(&self, omega: usize, clones: usize) -> Count {
        if omega > self.omega_max || clones > omega {
            return Count::zero();
        }
        self.data[tri(omega, clones)]
    }

    pub fn add_split(&mut self, omega: usize, clones: usize, v: Count) {
        self.data[tri(omega, clones)] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Truncated convolution over both indices.
    pub fn convolve(&self, other: &CountVector, omega_max: usize) -> CountVector {
        let mut out = CountVector::zeros(omega_max);
        for wa in 0..=self.omega_max.min(omega_max) {
            for ma in 0..=wa {
                let a = self.data[tri(wa, ma)];
                if a.is_zero() {
                    continue;
                }
                for wb in 0..=other.omega_max {
                    if wa + wb > omega_max {
                        break;
                    }
                    for mb in 0..=wb {
                        let b = other.data[tri(wb, mb)];
                        if !b.is_zero() {
                            out.data[tri(wa + wb, ma + mb)] += a * b;
                        }
                    }
                }
            }
        }
        out
    }
}

/// The uniform Bernoulli noise model of a q-round experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliModel {
    /// Per-location error probability.
    pub p: f64,
    /// Patterns per location (15 for two-qubit depolarizing CNOT faults).
    pub k_patterns: u32,
    /// CNOT count of one extraction round.
    pub n_cnot: usize,
    /// Ancilla count, n - k.
    pub n_ancilla: usize,
    /// Number of extraction rounds.
    pub q: usize,
}

impl BernoulliModel {
    pub fn for_circuit(circ: &ExtractionCircuit, p: f64, q: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("probability {p} outside [0,1]")));
        }
        if q == 0 {
            return Err(Error::Parameter("need at least one extraction".into()));
        }
        Ok(BernoulliModel {
            p,
            k_patterns: 15,
            n_cnot: circ.n_cnot(),
            n_ancilla: circ.n_ancilla(),
            q,
        })
    }

    /// Effective locations per extraction once preparation and measurement
    /// are cloned into pseudo-gates.
    pub fn n_cnot_eff(&self) -> usize {
        self.n_cnot + 2 * self.n_ancilla
    }

    /// Total fault locations across all q extractions.
    pub fn total_sites(&self) -> usize {
        self.n_cnot_eff() * self.q
    }

    /// Gate locations across all q extractions.
    pub fn gate_sites(&self) -> usize {
        self.n_cnot * self.q
    }

    /// Cloned preparation/measurement locations across all q extractions.
    pub fn clone_sites(&self) -> usize {
        2 * self.n_ancilla * self.q
    }

    /// Probability of one specific order-w fault configuration.
    pub fn p_of_order(&self, omega: usize) -> Result<f64> {
        let total = self.total_sites();
        if omega > total {
            return Err(Error::Parameter(format!(
                "order {omega} exceeds the {total} fault locations"
            )));
        }
        let per = self.p / self.k_patterns as f64;
        Ok(per.powi(omega as i32) * (1.0 - self.p).powi((total - omega) as i32))
    }

    /// Probability that more than `omega_max` locations fault (binomial tail).
    pub fn p_order_above(&self, omega_max: usize) -> f64 {
        let total = self.total_sites();
        let mut cdf = 0.0;
        for w in 0..=omega_max.min(total) {
            cdf += binomial_f64(total, w)
                * self.p.powi(w as i32)
                * (1.0 - self.p).powi((total - w) as i32);
        }
        (1.0 - cdf).max(0.0)
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

fn binomial_i128(n: i128, k: i128) -> i128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: i128 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Invalid ordered pairs per valid order-c configuration when composing an
/// order-a with an order-b table over `sites` uniform locations with
/// `patterns` patterns each: k repeated base errors and r same-location
/// pattern collisions, c = a + b - 2k - r. This is the single-class form;
/// the merge itself applies the per-class refinement.
pub fn zeta(a: i128, b: i128, k: i128, r: i128, sites: i128, patterns: i128) -> i128 {
    let c = a + b - 2 * k - r;
    if c < 0 {
        return 0;
    }
    let xi = binomial_i128(sites - c, k)
        * binomial_i128(c, r)
        * binomial_i128(c - r, a - k - r);
    patterns.pow(k as u32) * (patterns - 1).pow(r as u32) * xi
}

/// Per-sequence, per-set count vectors, exact for all orders up to
/// `omega_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    q: usize,
    n_bits: usize,
    omega_max: usize,
    rows: BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, CountVector>>,
    /// Keys whose corrected count went negative and was clamped to zero.
    clamped_negative: u64,
}

impl CountTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn omega_max(&self) -> usize {
        self.omega_max
    }

    pub fn rows(
        &self,
    ) -> &BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, CountVector>> {
        &self.rows
    }

    pub fn clamped_negative(&self) -> u64 {
        self.clamped_negative
    }

    pub fn num_sets(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    /// Sum of counts at one order across every degenerate set.
    pub fn order_total(&self, omega: usize) -> Count {
        self.rows
            .values()
            .flat_map(|sets| sets.values())
            .map(|v| v.get(omega))
            .sum()
    }
}

/// Exact total number of order-w fault configurations: K^w C(L, w).
pub fn expected_order_total(model: &BernoulliModel, omega: usize) -> Count {
    let k = model.k_patterns as i128;
    Count::from_integer(
        k.pow(omega as u32) * binomial_i128(model.total_sites() as i128, omega as i128),
    )
}

/// Order-1 table: the identity configuration plus every base error of every
/// extraction, preparation and measurement flips counted 15-fold.
pub fn build_order1_table(
    code: &StabilizerCode,
    circ: &ExtractionCircuit,
    model: &BernoulliModel,
) -> Result<CountTable> {
    if model.n_cnot != circ.n_cnot() || model.n_ancilla != circ.n_ancilla() {
        return Err(Error::Parameter(
            "model location counts do not match the circuit".into(),
        ));
    }
    let q = model.q;
    let n_bits = circ.n_ancilla();
    let prop = PropagationTable::new(circ, code);

    let mut rows: BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, CountVector>> =
        BTreeMap::new();
    let identity_key = set_key(code, &PauliOperator::identity(circ.n()))?;
    rows.entry(SyndromeSequence::zeros(q, n_bits))
        .or_default()
        .insert(identity_key, CountVector::identity(1));

    for base in enumerate_base_errors(circ, q)? {
        let propagated = prop.get(base.kind);
        let seq = syndrome_sequence(propagated, base.extraction, q)?;
        let key = set_key(code, &propagated.e)?;
        let (count, clones) = match base.kind {
            BaseErrorKind::Cnot { .. } => (1, 0),
            BaseErrorKind::Prep { .. } | BaseErrorKind::Meas { .. } => {
                (model.k_patterns as i128, 1)
            }
        };
        rows.entry(seq)
            .or_default()
            .entry(key)
            .or_insert_with(|| CountVector::zeros(1))
            .add_split(1, clones, Count::from_integer(count));
    }

    Ok(CountTable {
        q,
        n_bits,
        omega_max: 1,
        rows,
        clamped_negative: 0,
    })
}

/// Correct one accumulated vector in ascending order. For output order w and
/// clone split m, the raw convolution counted each valid configuration once
/// per (alpha, beta) split and permutation, plus the invalid pairs that
/// collapse onto lower-order configurations of the same key: k_t gate-site
/// repeats (K pattern choices each), k_c clone-site coincidences (K^2
/// ordered clone pairs each, since distinct clones also cancel), and r
/// gate-site pattern collisions ((K-1) ordered pairs per surviving
/// pattern). For the top order with a single location class this reduces to
/// the published n(w) = (1/R)[raw - sum zeta n(c)].
#[allow(clippy::too_many_arguments)]
fn correct_vector(
    raw: &CountVector,
    a_max: usize,
    b_max: usize,
    gate_sites: i128,
    clone_sites: i128,
    patterns: i128,
    clamped: &mut u64,
) -> CountVector {
    let omega = a_max + b_max;
    let mut out = CountVector::zeros(omega);
    for w in 0..=omega {
        let alpha_lo = w.saturating_sub(b_max);
        let alpha_hi = a_max.min(w);
        let mut divisor: i128 = 0;
        for alpha in alpha_lo..=alpha_hi {
            divisor += binomial_i128(w as i128, alpha as i128);
        }
        debug_assert!(divisor > 0);
        for m in 0..=w {
            let mut subtract = Count::zero();
            for alpha in alpha_lo..=alpha_hi {
                let beta = w - alpha;
                let cap = alpha.min(beta);
                for k_t in 0..=cap {
                    for k_c in 0..=cap - k_t {
                        let k = k_t + k_c;
                        for r in 0..=cap - k {
                            if k + r == 0 {
                                continue;
                            }
                            // Reduced configuration: order c with j clones.
                            let c = w - 2 * k - r;
                            if 2 * k_c > m {
                                continue;
                            }
                            let j = m - 2 * k_c;
                            if j > c {
                                continue;
                            }
                            let c_gate = (c - j) as i128;
                            let weight = binomial_i128(gate_sites - c_gate, k_t as i128)
                                * patterns.pow(k_t as u32)
                                * binomial_i128(clone_sites - j as i128, k_c as i128)
                                * (patterns * patterns).pow(k_c as u32)
                                * (patterns - 1).pow(r as u32)
                                * binomial_i128(c_gate, r as i128)
                                * binomial_i128((c - r) as i128, (alpha - k - r) as i128);
                            if weight != 0 {
                                subtract +=
                                    Count::from_integer(weight) * out.get_split(c, j);
                            }
                        }
                    }
                }
            }
            let value =
                (raw.get_split(w, m) - subtract) / Count::from_integer(divisor);
            if value.is_negative() {
                *clamped += 1;
                log::warn!("clamped negative corrected count {value} at order {w} to zero");
            } else {
                out.add_split(w, m, value);
            }
        }
    }
    out
}

/// Merge two count tables into one covering orders up to the sum of their
/// orders (Cartesian product of rows, sequence XOR, key XOR, convolution,
/// then the overcounting correction per key).
pub fn merge_count_tables(
    a: &CountTable,
    b: &CountTable,
    model: &BernoulliModel,
) -> Result<CountTable> {
    merge_count_tables_parallel(a, b, model, 1)
}

/// Worker-partitioned merge. Rows of `a` are split across workers; partial
/// accumulations merge by exact rational addition, so the result is
/// identical for every worker count.
pub fn merge_count_tables_parallel(
    a: &CountTable,
    b: &CountTable,
    model: &BernoulliModel,
    workers: usize,
) -> Result<CountTable> {
    if a.q != b.q || a.n_bits != b.n_bits {
        return Err(Error::Parameter(format!(
            "count table shape mismatch: ({}, {}) vs ({}, {})",
            a.q, a.n_bits, b.q, b.n_bits
        )));
    }
    let omega = a.omega_max + b.omega_max;
    type Rows = BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, CountVector>>;

    let a_rows: Vec<(&SyndromeSequence, &BTreeMap<DegenerateSetKey, CountVector>)> =
        a.rows.iter().collect();
    let accumulate = |rows: &[(&SyndromeSequence, &BTreeMap<DegenerateSetKey, CountVector>)]| -> Rows {
        let mut acc: Rows = BTreeMap::new();
        for (seq_i, sets_i) in rows {
            for (key_i, n_i) in sets_i.iter() {
                for (seq_j, sets_j) in &b.rows {
                    let seq = {
                        let mut s = (*seq_i).clone();
                        s.xor_assign(seq_j);
                        s
                    };
                    let row = acc.entry(seq).or_default();
                    for (key_j, n_j) in sets_j {
                        let mut s_hat = key_i.s_hat.clone();
                        s_hat.xor_assign(&key_j.s_hat);
                        let mut logical_bits = key_i.logical_bits.clone();
                        logical_bits.xor_assign(&key_j.logical_bits);
                        let key = DegenerateSetKey { s_hat, logical_bits };
                        let conv = n_i.convolve(n_j, omega);
                        match row.get_mut(&key) {
                            Some(existing) => {
                                for w in 0..=omega {
                                    for m in 0..=w {
                                        existing.add_split(w, m, conv.get_split(w, m));
                                    }
                                }
                            }
                            None => {
                                row.insert(key, conv);
                            }
                        }
                    }
                }
            }
        }
        acc
    };

    let mut accumulated: Rows = if workers <= 1 || a_rows.len() < 2 * workers {
        accumulate(&a_rows)
    } else {
        let chunk = a_rows.len().div_ceil(workers);
        let partials: Vec<Rows> = std::thread::scope(|scope| {
            let handles: Vec<_> = a_rows
                .chunks(chunk)
                .map(|rows| scope.spawn(|| accumulate(rows)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("merge worker panicked"))
                .collect()
        });
        let mut total: Rows = BTreeMap::new();
        for part in partials {
            for (seq, sets) in part {
                let row = total.entry(seq).or_default();
                for (key, vec) in sets {
                    match row.get_mut(&key) {
                        Some(existing) => {
                            for w in 0..=omega {
                                for m in 0..=w {
                                    existing.add_split(w, m, vec.get_split(w, m));
                                }
                            }
                        }
                        None => {
                            row.insert(key, vec);
                        }
                    }
                }
            }
        }
        total
    };

    let mut clamped = a.clamped_negative + b.clamped_negative;
    for sets in accumulated.values_mut() {
        let keys: Vec<DegenerateSetKey> = sets.keys().cloned().collect();
        for key in keys {
            let corrected = correct_vector(
                &sets[&key],
                a.omega_max,
                b.omega_max,
                model.gate_sites() as i128,
                model.clone_sites() as i128,
                model.k_patterns as i128,
                &mut clamped,
            );
            if corrected.is_zero() {
                sets.remove(&key);
            } else {
                sets.insert(key, corrected);
            }
        }
    }
    accumulated.retain(|_, sets| !sets.is_empty());

    Ok(CountTable {
        q: a.q,
        n_bits: a.n_bits,
        omega_max: omega,
        rows: accumulated,
        clamped_negative: clamped,
    })
}

/// Reference merge that applies the single-class correction uniformly,
/// treating every one of the L locations as a gate with K patterns (the
/// closed form exposed as [`zeta`]). At cloned preparation/measurement
/// locations distinct clones cancel rather than XOR into a third pattern,
/// which this form cannot see, so its counts are inexact there; it exists to
/// quantify that discrepancy against exhaustive enumeration.
pub fn merge_count_tables_single_class(
    a: &CountTable,
    b: &CountTable,
    model: &BernoulliModel,
) -> Result<CountTable> {
    // Accumulate identically to the exact path, then correct marginals only.
    let mut merged = merge_raw(a, b)?;
    let omega = a.omega_max + b.omega_max;
    let sites = model.total_sites() as i128;
    let patterns = model.k_patterns as i128;
    let mut clamped = 0;
    for sets in merged.rows.values_mut() {
        let keys: Vec<DegenerateSetKey> = sets.keys().cloned().collect();
        for key in keys {
            let raw = &sets[&key];
            let mut out = CountVector::zeros(omega);
            for w in 0..=omega {
                let alpha_lo = w.saturating_sub(b.omega_max);
                let alpha_hi = a.omega_max.min(w);
                let mut divisor: i128 = 0;
                let mut subtract = Count::zero();
                for alpha in alpha_lo..=alpha_hi {
                    let beta = w - alpha;
                    divisor += binomial_i128(w as i128, alpha as i128);
                    let cap = alpha.min(beta);
                    for k in 0..=cap {
                        for r in 0..=cap - k {
                            if k + r == 0 {
                                continue;
                            }
                            let z = zeta(
                                alpha as i128,
                                beta as i128,
                                k as i128,
                                r as i128,
                                sites,
                                patterns,
                            );
                            if z != 0 {
                                let c = w - 2 * k - r;
                                subtract += Count::from_integer(z) * out.get(c);
                            }
                        }
                    }
                }
                let value = (raw.get(w) - subtract) / Count::from_integer(divisor);
                if value.is_negative() {
                    clamped += 1;
                } else {
                    out.add_split(w, 0, value);
                }
            }
            if out.is_zero() {
                sets.remove(&key);
            } else {
                sets.insert(key, out);
            }
        }
    }
    merged.rows.retain(|_, sets| !sets.is_empty());
    merged.clamped_negative = clamped;
    Ok(merged)
}

fn merge_raw(a: &CountTable, b: &CountTable) -> Result<CountTable> {
    if a.q != b.q || a.n_bits != b.n_bits {
        return Err(Error::Parameter("count table shape mismatch".into()));
    }
    let omega = a.omega_max + b.omega_max;
    let mut rows: BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, CountVector>> =
        BTreeMap::new();
    for (seq_i, sets_i) in &a.rows {
        for (key_i, n_i) in sets_i {
            for (seq_j, sets_j) in &b.rows {
                let mut seq = seq_i.clone();
                seq.xor_assign(seq_j);
                let row = rows.entry(seq).or_default();
                for (key_j, n_j) in sets_j {
                    let mut s_hat = key_i.s_hat.clone();
                    s_hat.xor_assign(&key_j.s_hat);
                    let mut logical_bits = key_i.logical_bits.clone();
                    logical_bits.xor_assign(&key_j.logical_bits);
                    let key = DegenerateSetKey { s_hat, logical_bits };
                    let conv = n_i.convolve(n_j, omega);
                    match row.get_mut(&key) {
                        Some(existing) => {
                            for w in 0..=omega {
                                for m in 0..=w {
                                    existing.add_split(w, m, conv.get_split(w, m));
                                }
                            }
                        }
                        None => {
                            row.insert(key, conv);
                        }
                    }
                }
            }
        }
    }
    Ok(CountTable {
        q: a.q,
        n_bits: a.n_bits,
        omega_max: omega,
        rows,
        clamped_negative: a.clamped_negative + b.clamped_negative,
    })
}

/// Build the table covering orders up to `omega_max` by repeated composition
/// of the order-1 table (binary doubling with a final remainder merge).
pub fn build_count_table(
    code: &StabilizerCode,
    circ: &ExtractionCircuit,
    model: &BernoulliModel,
    omega_max: usize,
    workers: usize,
) -> Result<CountTable> {
    if omega_max == 0 {
        return Err(Error::Parameter("omega_max must be at least 1".into()));
    }
    let base = build_order1_table(code, circ, model)?;
    let mut table = base.clone();
    while table.omega_max() < omega_max {
        let remaining = omega_max - table.omega_max();
        let other = if remaining >= table.omega_max() {
            table.clone()
        } else {
            build_count_table(code, circ, model, remaining, workers)?
        };
        table = merge_count_tables_parallel(&table, &other, model, workers)?;
    }
    Ok(table)
}

/// Pick the most probable degenerate set per sequence, evaluating each set's
/// probability from its counts at the model's p. Ties break to the
/// lexicographically smallest representative, as in the general decoder.
pub fn decode_from_counts(
    code: &StabilizerCode,
    table: &CountTable,
    model: &BernoulliModel,
) -> Result<DecodingTable> {
    let p_of: Vec<f64> = (0..=table.omega_max.min(model.total_sites()))
        .map(|w| model.p_of_order(w))
        .collect::<Result<_>>()?;
    let mut out = DecodingTable::new(table.q, table.n_bits);
    out.set_provenance(Some(table.omega_max), Some(model.p));
    for (seq, sets) in &table.rows {
        let mut best: Option<(&DegenerateSetKey, PauliOperator, f64)> = None;
        for (key, counts) in sets {
            let mut p_i = 0.0;
            for (w, pw) in p_of.iter().enumerate() {
                let c = counts.get(w);
                if !c.is_zero() {
                    p_i += ratio_to_f64(c) * pw;
                }
            }
            let rep = representative(code, key)?;
            let better = match &best {
                None => true,
                Some((_, best_rep, best_p)) => {
                    p_i > *best_p || (p_i == *best_p && rep < *best_rep)
                }
            };
            if better {
                best = Some((key, rep, p_i));
            }
        }
        let (key, rep, p_i) = best.ok_or_else(|| Error::Internal("empty row".into()))?;
        out.insert(
            seq.clone(),
            DecodingEntry {
                key: key.clone(),
                correction: rep,
                mass: quantize_probability(p_i.min(1.0))?,
            },
        );
    }
    Ok(out)
}

fn ratio_to_f64(r: Count) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
