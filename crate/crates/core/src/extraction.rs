//! The noisy syndrome-extraction circuit: gadget construction, fault
//! enumeration, and propagation of faults to error patterns and syndrome
//! sequences.
//!
//! One extraction round runs the stabilizer gadgets sequentially. Gadget i
//! preps ancilla i in |0>, sandwiches a chain of ancilla-controlled CNOTs
//! (with single-qubit basis changes for Z and Y components) between two
//! Hadamards, and measures the ancilla in Z. Only CNOTs are noisy; faults
//! also occur at ancilla preparation and measurement. A fault injected
//! mid-round is conjugated through the remainder of the round, so its
//! same-round syndrome can touch later gadgets' ancillas.

use std::collections::HashMap;

use rand::Rng;

use crate::bits::Bits;
use crate::clifford::CliffordGate;
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// One scheduled CNOT of the extraction round.
#[derive(Clone, Copy, Debug)]
pub struct CnotSite {
    /// Which stabilizer gadget the CNOT belongs to.
    pub gadget: usize,
    /// Absolute ancilla index (control).
    pub control: usize,
    /// Data qubit index (target).
    pub target: usize,
    /// Position in the round's gate list.
    pub gate_index: usize,
}

/// A full syndrome-extraction round over `n` data qubits and `n - k`
/// ancillas (data qubits first, ancillas from index `n` upward).
#[derive(Clone, Debug)]
pub struct ExtractionCircuit {
    n: usize,
    n_ancilla: usize,
    gates: Vec<CliffordGate>,
    cnot_sites: Vec<CnotSite>,
    /// Index into `gates` where each gadget's first gate sits.
    gadget_starts: Vec<usize>,
}

impl ExtractionCircuit {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn total_qubits(&self) -> usize {
        self.n + self.n_ancilla
    }

    /// CNOTs per extraction round.
    pub fn n_cnot(&self) -> usize {
        self.cnot_sites.len()
    }

    pub fn cnot_sites(&self) -> &[CnotSite] {
        &self.cnot_sites
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn gadget_start(&self, gadget: usize) -> usize {
        self.gadget_starts[gadget]
    }
}

/// Build the extraction round for a code, gadgets in stabilizer order,
/// support qubits of each stabilizer visited in increasing index.
pub fn build_extraction(code: &StabilizerCode) -> ExtractionCircuit {
    let n = code.n();
    let n_ancilla = code.n_stabilizers();
    let mut gates = Vec::new();
    let mut cnot_sites = Vec::new();
    let mut gadget_starts = Vec::new();

    for (i, stab) in code.stabilizers().iter().enumerate() {
        let ancilla = n + i;
        gadget_starts.push(gates.len());
        gates.push(CliffordGate::H { q: ancilla });
        for j in 0..n {
            let (x, z) = (stab.x_bit(j), stab.z_bit(j));
            if !x && !z {
                continue;
            }
            // Conjugate the CNOT so the controlled operation applies the
            // stabilizer's component at j: V CNOT V^dagger with V X V^dagger
            // equal to that component.
            let (pre, post) = match (x, z) {
                (true, false) => (None, None),
                (false, true) => (
                    Some(CliffordGate::H { q: j }),
                    Some(CliffordGate::H { q: j }),
                ),
                (true, true) => (
                    Some(CliffordGate::SqrtZInv { q: j }),
                    Some(CliffordGate::SqrtZ { q: j }),
                ),
                (false, false) => unreachable!(),
            };
            if let Some(g) = pre {
                gates.push(g);
            }
            cnot_sites.push(CnotSite {
                gadget: i,
                control: ancilla,
                target: j,
                gate_index: gates.len(),
            });
            gates.push(CliffordGate::Cnot {
                control: ancilla,
                target: j,
            });
            if let Some(g) = post {
                gates.push(g);
            }
        }
        gates.push(CliffordGate::H { q: ancilla });
    }

    ExtractionCircuit {
        n,
        n_ancilla,
        gates,
        cnot_sites,
        gadget_starts,
    }
}

/// The kind of a single fault, independent of which extraction it hits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BaseErrorKind {
    /// Two-qubit Pauli after CNOT `site`; `pattern` indexes the 15 non-identity
    /// pairs O_a O_b as 4*code(O_a) + code(O_b) with I,X,Y,Z = 0..3.
    Cnot { site: usize, pattern: u8 },
    /// Ancilla prepared flipped (index relative to the ancilla block).
    Prep { ancilla: usize },
    /// Ancilla measurement bit misread.
    Meas { ancilla: usize },
}

/// A located fault: a kind at a 1-based extraction index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BaseError {
    pub extraction: usize,
    pub kind: BaseErrorKind,
}

fn pattern_bits(code: u8) -> (bool, bool) {
    match code {
        0 => (false, false),
        1 => (true, false),
        2 => (true, true),
        3 => (false, true),
        _ => unreachable!("pattern code out of range"),
    }
}

/// Local Pauli of a CNOT fault pattern on the full register.
fn local_pattern(circ: &ExtractionCircuit, site: usize, pattern: u8) -> PauliOperator {
    debug_assert!((1..16).contains(&pattern));
    let s = circ.cnot_sites[site];
    let mut p = PauliOperator::identity(circ.total_qubits());
    let (ax, az) = pattern_bits(pattern / 4);
    let (bx, bz) = pattern_bits(pattern % 4);
    p.set_x(s.control, ax);
    p.set_z(s.control, az);
    p.set_x(s.target, bx);
    p.set_z(s.target, bz);
    p
}

/// A fault propagated to the end of its round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatedError {
    /// Residual pattern on the n data qubits; persists into later rounds.
    pub e: PauliOperator,
    /// Pattern on the ancilla block just before measurement.
    pub ancilla: PauliOperator,
    /// Syndrome read in the faulty round: X components of `ancilla`.
    pub s_tilde: Bits,
    /// Syndrome any later clean round reads: bin(e, [Z|X]) . A^T.
    pub s_hat: Bits,
}

/// Push a fault through the remainder of its extraction round.
pub fn propagate(
    circ: &ExtractionCircuit,
    code: &StabilizerCode,
    kind: BaseErrorKind,
) -> PropagatedError {
    match kind {
        BaseErrorKind::Cnot { site, pattern } => {
            let start = circ.cnot_sites[site].gate_index + 1;
            let mut p = local_pattern(circ, site, pattern);
            let mut neg = false;
            for g in &circ.gates[start..] {
                g.apply_raw(&mut p, &mut neg);
            }
            let e = p.restrict(0, circ.n);
            let ancilla = p.restrict(circ.n, circ.total_qubits());
            PropagatedError {
                s_tilde: ancilla.x_bits().clone(),
                s_hat: code.syndrome_of(&e),
                e,
                ancilla,
            }
        }
        // Preparation and measurement faults reduce to the same operational
        // effect: the round's own bit flips, nothing persists.
        BaseErrorKind::Prep { ancilla } | BaseErrorKind::Meas { ancilla } => {
            let mut anc = PauliOperator::identity(circ.n_ancilla);
            anc.set_x(ancilla, true);
            let mut s_tilde = Bits::zeros(circ.n_ancilla);
            s_tilde.set(ancilla, true);
            PropagatedError {
                e: PauliOperator::identity(circ.n),
                ancilla: anc,
                s_tilde,
                s_hat: Bits::zeros(circ.n_ancilla),
            }
        }
    }
}

/// Syndrome a fresh noiseless round reads when pattern `e` sits on the data
/// qubits: the X components of the ancilla part of the round's conjugation
/// of `e`. The same value must come out of the check-matrix product.
pub fn fresh_round_syndrome(circ: &ExtractionCircuit, e: &PauliOperator) -> Bits {
    let mut p = e.embed(circ.total_qubits(), 0);
    let mut neg = false;
    for g in &circ.gates {
        g.apply_raw(&mut p, &mut neg);
    }
    p.restrict(circ.n, circ.total_qubits()).x_bits().clone()
}

/// Ordered list of the q-round syndromes; the decoding-table key.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SyndromeSequence {
    q: usize,
    n_bits: usize,
    bits: Bits,
}

impl SyndromeSequence {
    pub fn zeros(q: usize, n_bits: usize) -> Self {
        SyndromeSequence {
            q,
            n_bits,
            bits: Bits::zeros(q * n_bits),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn from_bits(bits: Bits, q: usize, n_bits: usize) -> Result<Self> {
        if bits.len() != q * n_bits {
            return Err(Error::Dimension(format!(
                "sequence of {} bits cannot hold {q} syndromes of {n_bits}",
                bits.len()
            )));
        }
        Ok(SyndromeSequence { q, n_bits, bits })
    }

    /// Syndrome of round `g` (1-based).
    pub fn round(&self, g: usize) -> Bits {
        self.bits.slice((g - 1) * self.n_bits, g * self.n_bits)
    }

    fn set_round(&mut self, g: usize, s: &Bits) {
        debug_assert_eq!(s.len(), self.n_bits);
        for b in s.iter_ones() {
            self.bits.set((g - 1) * self.n_bits + b, true);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn xor_assign(&mut self, other: &SyndromeSequence) {
        assert_eq!(self.q, other.q);
        assert_eq!(self.n_bits, other.n_bits);
        self.bits.xor_assign(&other.bits);
    }
}

/// Element-wise XOR of two sequences (the compound-error rule).
pub fn compose_sequences(
    a: &SyndromeSequence,
    b: &SyndromeSequence,
) -> Result<SyndromeSequence> {
    if a.q != b.q || a.n_bits != b.n_bits {
        return Err(Error::Dimension(format!(
            "sequence shape mismatch: ({}, {}) vs ({}, {})",
            a.q, a.n_bits, b.q, b.n_bits
        )));
    }
    let mut out = a.clone();
    out.xor_assign(b);
    Ok(out)
}

/// Expected q-round sequence of a fault at round `g`: zeros before, the
/// same-round syndrome at `g`, the persistent syndrome afterwards.
pub fn syndrome_sequence(
    prop: &PropagatedError,
    g: usize,
    q: usize,
) -> Result<SyndromeSequence> {
    if g == 0 || g > q {
        return Err(Error::Parameter(format!(
            "extraction index {g} outside 1..={q}"
        )));
    }
    let n_bits = prop.s_tilde.len();
    let mut seq = SyndromeSequence::zeros(q, n_bits);
    seq.set_round(g, &prop.s_tilde);
    for h in g + 1..=q {
        seq.set_round(h, &prop.s_hat);
    }
    Ok(seq)
}

/// All base errors of a q-round experiment in deterministic order: per
/// extraction, CNOT sites in schedule order with their 15 patterns, then
/// preparation flips, then measurement flips.
pub fn enumerate_base_errors(circ: &ExtractionCircuit, q: usize) -> Result<Vec<BaseError>> {
    if q == 0 {
        return Err(Error::Parameter("need at least one extraction".into()));
    }
    let mut out =
        Vec::with_capacity(q * (15 * circ.n_cnot() + 2 * circ.n_ancilla()));
    for g in 1..=q {
        for site in 0..circ.n_cnot() {
            for pattern in 1..16u8 {
                out.push(BaseError {
                    extraction: g,
                    kind: BaseErrorKind::Cnot { site, pattern },
                });
            }
        }
        for ancilla in 0..circ.n_ancilla() {
            out.push(BaseError {
                extraction: g,
                kind: BaseErrorKind::Prep { ancilla },
            });
        }
        for ancilla in 0..circ.n_ancilla() {
            out.push(BaseError {
                extraction: g,
                kind: BaseErrorKind::Meas { ancilla },
            });
        }
    }
    Ok(out)
}

/// Memoized propagation for the kinds appearing in a round.
pub struct PropagationTable {
    cache: HashMap<BaseErrorKind, PropagatedError>,
}

impl PropagationTable {
    pub fn new(circ: &ExtractionCircuit, code: &StabilizerCode) -> Self {
        let mut cache = HashMap::new();
        for site in 0..circ.n_cnot() {
            for pattern in 1..16u8 {
                let kind = BaseErrorKind::Cnot { site, pattern };
                cache.insert(kind, propagate(circ, code, kind));
            }
        }
        for ancilla in 0..circ.n_ancilla() {
            for kind in [
                BaseErrorKind::Prep { ancilla },
                BaseErrorKind::Meas { ancilla },
            ] {
                cache.insert(kind, propagate(circ, code, kind));
            }
        }
        PropagationTable { cache }
    }

    pub fn get(&self, kind: BaseErrorKind) -> &PropagatedError {
        &self.cache[&kind]
    }

    /// Data-qubit pattern and full sequence of a fault multiset.
    pub fn compound(
        &self,
        faults: &[BaseError],
        q: usize,
        n: usize,
        n_bits: usize,
    ) -> (PauliOperator, SyndromeSequence) {
        let mut e = PauliOperator::identity(n);
        let mut seq = SyndromeSequence::zeros(q, n_bits);
        for f in faults {
            let prop = self.get(f.kind);
            e.mul_assign_ref(&prop.e);
            seq.xor_assign(&syndrome_sequence(prop, f.extraction, q).expect("g in range"));
        }
        (e, seq)
    }
}

/// A fault location in the q-round experiment, used by the explicit noise
/// enumeration and the Monte Carlo sampler. CNOT locations carry 15 possible
/// patterns, preparation/measurement locations a single flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultLocation {
    pub extraction: usize,
    pub slot: FaultSlot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultSlot {
    Cnot(usize),
    Prep(usize),
    Meas(usize),
}

pub fn fault_locations(circ: &ExtractionCircuit, q: usize) -> Vec<FaultLocation> {
    let mut out = Vec::new();
    for g in 1..=q {
        for site in 0..circ.n_cnot() {
            out.push(FaultLocation {
                extraction: g,
                slot: FaultSlot::Cnot(site),
            });
        }
        for a in 0..circ.n_ancilla() {
            out.push(FaultLocation {
                extraction: g,
                slot: FaultSlot::Prep(a),
            });
        }
        for a in 0..circ.n_ancilla() {
            out.push(FaultLocation {
                extraction: g,
                slot: FaultSlot::Meas(a),
            });
        }
    }
    out
}

impl FaultLocation {
    pub fn base_error(&self, pattern: u8) -> BaseError {
        let kind = match self.slot {
            FaultSlot::Cnot(site) => BaseErrorKind::Cnot { site, pattern },
            FaultSlot::Prep(ancilla) => BaseErrorKind::Prep { ancilla },
            FaultSlot::Meas(ancilla) => BaseErrorKind::Meas { ancilla },
        };
        BaseError {
            extraction: self.extraction,
            kind,
        }
    }

    pub fn pattern_count(&self) -> u8 {
        match self.slot {
            FaultSlot::Cnot(_) => 15,
            _ => 1,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BaseError {
        let pattern = match self.slot {
            FaultSlot::Cnot(_) => rng.gen_range(1..16u8),
            _ => 1,
        };
        self.base_error(pattern)
    }
}

/// One entry of an explicit noise list: a fault multiset with its exact
/// probability under the per-location Bernoulli model.
#[derive(Clone, Debug)]
pub struct NoiseEntry {
    pub probability: f64,
    pub faults: Vec<BaseError>,
}

/// Enumerate every fault configuration of order at most `omega_max` with its
/// true probability (preparation and measurement flips at probability p,
/// CNOT patterns at p/15), plus the explicit no-fault entry. Exponential in
/// `omega_max`; intended for desk-scale cross-checks.
pub fn enumerate_noise(
    circ: &ExtractionCircuit,
    q: usize,
    p: f64,
    omega_max: usize,
) -> Result<Vec<NoiseEntry>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("probability {p} outside [0,1]")));
    }
    let locations = fault_locations(circ, q);
    let survive = (1.0 - p).powi(locations.len() as i32);
    let mut out = vec![NoiseEntry {
        probability: survive,
        faults: Vec::new(),
    }];

    // One fault at a chosen location multiplies in p/15 (CNOT) or p
    // (prep/meas) and divides out that location's (1-p) survival factor.
    let mut stack: Vec<(usize, Vec<BaseError>, f64)> = vec![(0, Vec::new(), survive)];
    while let Some((start, faults, prob)) = stack.pop() {
        if faults.len() == omega_max {
            continue;
        }
        for (li, loc) in locations.iter().enumerate().skip(start) {
            let per_pattern = match loc.slot {
                FaultSlot::Cnot(_) => p / 15.0,
                _ => p,
            } / (1.0 - p);
            for pattern in 1..=loc.pattern_count() {
                let mut f = faults.clone();
                f.push(loc.base_error(pattern));
                let pr = prob * per_pattern;
                out.push(NoiseEntry {
                    probability: pr,
                    faults: f.clone(),
                });
                stack.push((li + 1, f, pr));
            }
        }
    }
    Ok(out)
}
