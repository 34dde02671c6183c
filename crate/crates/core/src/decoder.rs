//! The degeneracy-aware table decoder.
//!
//! Every propagated error splits uniquely as E * S * L: a deterministic
//! coset leader fixed by the syndrome, a stabilizer, and a logical
//! component. Errors sharing (syndrome, logical component) form a degenerate
//! set and are corrected by the same representative e^d = E * L. The data
//! table accumulates probability mass per syndrome sequence and degenerate
//! set; the decoding table keeps the heaviest set per sequence.
//!
//! Masses are kept in unsigned Q96 fixed point. Quantizing each input
//! probability once makes accumulation exact and associative, so parallel
//! workers produce bit-identical tables no matter how the noise list is
//! split.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::extraction::{
    ExtractionCircuit, NoiseEntry, PropagationTable, SyndromeSequence,
};
use crate::f2::matvec;
use crate::pauli::{BinaryVector, Format, PauliOperator};

/// The unique E * S * L split of an error pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub error_part: PauliOperator,
    pub stabilizer_part: PauliOperator,
    pub logical_part: PauliOperator,
}

/// Identifier of a degenerate set: the persistent syndrome plus the logical
/// component expressed in the reduced logical-generator basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DegenerateSetKey {
    pub s_hat: Bits,
    pub logical_bits: Bits,
}

/// Coset leader for a syndrome: map into the reduced-stabilizer basis with
/// J, then multiply the single-qubit basis errors of the set bits.
pub fn f_e(code: &StabilizerCode, s_hat: &Bits) -> Result<PauliOperator> {
    if s_hat.len() != code.n_stabilizers() {
        return Err(Error::Dimension(format!(
            "syndrome length {} vs n-k = {}",
            s_hat.len(),
            code.n_stabilizers()
        )));
    }
    let s_rre = code.syndrome_to_rre(s_hat);
    let mut e = PauliOperator::identity(code.n());
    for i in s_rre.iter_ones() {
        e.mul_assign_ref(&code.coset_basis()[i]);
    }
    Ok(e)
}

/// Logical component of an error: strip the coset leader, peel the [X|Z]
/// vector by the reduced stabilizer rows, then by the reduced logical rows.
/// A nonzero residual means the input was not a Pauli consistent with the
/// code structure.
pub fn f_l(code: &StabilizerCode, e: &PauliOperator) -> Result<(Bits, PauliOperator)> {
    let leader = f_e(code, &code.syndrome_of(e))?;
    let e_prime = e * &leader;
    let mut v = e_prime.to_binary(Format::Xz).bits;

    for (i, &h) in code.a_rre().pivots.iter().enumerate() {
        if v.get(h) {
            v.xor_assign(code.a_rre().rre.row(i));
        }
    }
    let mut u_l = Bits::zeros(2 * code.k());
    for (i, &h) in code.l_pivots().iter().enumerate() {
        if v.get(h) {
            v.xor_assign(code.l_rre().row(i));
            u_l.set(i, true);
        }
    }
    if !v.is_zero() {
        return Err(Error::Internal(format!(
            "nonzero residual {v:?} while peeling {e}"
        )));
    }
    let l = logical_from_bits(code, &u_l)?;
    Ok((u_l, l))
}

/// Logical operator selected by reduced-basis coefficients.
pub fn logical_from_bits(code: &StabilizerCode, u_l: &Bits) -> Result<PauliOperator> {
    let bits = matvec(u_l, code.l_rre(), false)?;
    PauliOperator::from_binary(&BinaryVector {
        bits,
        format: Format::Xz,
    })
}

/// Degenerate-set key of an error pattern.
pub fn set_key(code: &StabilizerCode, e: &PauliOperator) -> Result<DegenerateSetKey> {
    let s_hat = code.syndrome_of(e);
    let (logical_bits, _) = f_l(code, e)?;
    Ok(DegenerateSetKey { s_hat, logical_bits })
}

/// Correction representative e^d = E * L of a degenerate set.
pub fn representative(code: &StabilizerCode, key: &DegenerateSetKey) -> Result<PauliOperator> {
    let mut rep = f_e(code, &key.s_hat)?;
    rep.mul_assign_ref(&logical_from_bits(code, &key.logical_bits)?);
    Ok(rep)
}

/// Full decomposition via the main route; the stabilizer part is checked to
/// lie in the check-matrix row space.
pub fn decompose(code: &StabilizerCode, e: &PauliOperator) -> Result<Decomposition> {
    let error_part = f_e(code, &code.syndrome_of(e))?;
    let (_, logical_part) = f_l(code, e)?;
    let mut stabilizer_part = e.clone();
    stabilizer_part.mul_assign_ref(&error_part);
    stabilizer_part.mul_assign_ref(&logical_part);

    let mut v = stabilizer_part.to_binary(Format::Xz).bits;
    for (i, &h) in code.a_rre().pivots.iter().enumerate() {
        if v.get(h) {
            v.xor_assign(code.a_rre().rre.row(i));
        }
    }
    if !v.is_zero() {
        return Err(Error::Internal(format!(
            "stabilizer part {stabilizer_part} outside the stabilizer group"
        )));
    }
    Ok(Decomposition {
        error_part,
        stabilizer_part,
        logical_part,
    })
}

/// Alternative decomposition by unencoding: conjugate back through the
/// encoding, read the data-qubit part as the logical component and the
/// redundancy X/Z parts as error/stabilizer components, re-encode each.
/// The (E, S) split generally differs from [`decompose`]; the induced
/// degenerate-set partition must not.
pub fn decompose_alt(
    code: &StabilizerCode,
    e: &PauliOperator,
) -> Result<(Decomposition, Bits)> {
    use crate::clifford::Direction;
    let n = code.n();
    let k = code.k();
    let unencoded = code.encoding().conjugate(e, Direction::Inverse)?;

    // Key bits: data-qubit X components then Z components.
    let mut alt_bits = Bits::zeros(2 * k);
    for j in 0..k {
        if unencoded.x_bit(j) {
            alt_bits.set(j, true);
        }
        if unencoded.z_bit(j) {
            alt_bits.set(k + j, true);
        }
    }

    let mut logical_u = PauliOperator::identity(n);
    let mut error_u = PauliOperator::identity(n);
    let mut stabilizer_u = PauliOperator::identity(n);
    for j in 0..k {
        logical_u.set_x(j, unencoded.x_bit(j));
        logical_u.set_z(j, unencoded.z_bit(j));
    }
    for j in k..n {
        error_u.set_x(j, unencoded.x_bit(j));
        stabilizer_u.set_z(j, unencoded.z_bit(j));
    }

    let enc = |p: &PauliOperator| code.encoding().conjugate(p, Direction::Forward);
    Ok((
        Decomposition {
            error_part: enc(&error_u)?,
            stabilizer_part: enc(&stabilizer_u)?,
            logical_part: enc(&logical_u)?,
        },
        alt_bits,
    ))
}

/// True iff applying `applied` corrects `actual`: their product is a
/// stabilizer (zero syndrome and trivial logical component).
pub fn correction_success(
    code: &StabilizerCode,
    applied: &PauliOperator,
    actual: &PauliOperator,
) -> Result<bool> {
    let product = applied.try_mul(actual)?;
    if !code.syndrome_of(&product).is_zero() {
        return Ok(false);
    }
    let (u_l, _) = f_l(code, &product)?;
    Ok(u_l.is_zero())
}

// ---------------------------------------------------------------------------
// Probability masses in Q96 fixed point.

const MASS_FRAC_BITS: u32 = 96;
const MASS_ONE: f64 = 79228162514264337593543950336.0; // 2^96

/// Quantize a probability once; all later accumulation is exact.
pub fn quantize_probability(p: f64) -> Result<u128> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::Parameter(format!("probability {p} must be >= 0")));
    }
    if p > 1.0 + 1e-9 {
        return Err(Error::Parameter(format!("probability {p} exceeds 1")));
    }
    Ok((p.min(1.0) * MASS_ONE).round() as u128)
}

pub fn mass_to_f64(mass: u128) -> f64 {
    mass as f64 / MASS_ONE
}

pub fn mass_one() -> u128 {
    1u128 << MASS_FRAC_BITS
}

// ---------------------------------------------------------------------------
// Tables.

/// Accumulated mass per syndrome sequence and degenerate set, with the
/// representative of every set seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataTable {
    q: usize,
    n_bits: usize,
    rows: BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, u128>>,
    reps: BTreeMap<DegenerateSetKey, PauliOperator>,
}

impl DataTable {
    pub fn empty(q: usize, n_bits: usize) -> Self {
        DataTable {
            q,
            n_bits,
            rows: BTreeMap::new(),
            reps: BTreeMap::new(),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn rows(&self) -> &BTreeMap<SyndromeSequence, BTreeMap<DegenerateSetKey, u128>> {
        &self.rows
    }

    pub fn representative(&self, key: &DegenerateSetKey) -> Option<&PauliOperator> {
        self.reps.get(key)
    }

    pub fn total_mass(&self) -> u128 {
        self.rows
            .values()
            .flat_map(|sets| sets.values())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn add(&mut self, seq: SyndromeSequence, key: DegenerateSetKey, mass: u128) {
        *self
            .rows
            .entry(seq)
            .or_default()
            .entry(key)
            .or_insert(0) += mass;
    }
}

/// Process a noise list into a data table (serial).
pub fn build_data_table(
    code: &StabilizerCode,
    circ: &ExtractionCircuit,
    noise: &[NoiseEntry],
    q: usize,
) -> Result<DataTable> {
    let prop = PropagationTable::new(circ, code);
    build_chunk(code, &prop, noise, q, circ.n(), circ.n_ancilla())
}

fn build_chunk(
    code: &StabilizerCode,
    prop: &PropagationTable,
    noise: &[NoiseEntry],
    q: usize,
    n: usize,
    n_bits: usize,
) -> Result<DataTable> {
    let mut table = DataTable::empty(q, n_bits);
    for entry in noise {
        if let Some(f) = entry.faults.iter().find(|f| f.extraction == 0 || f.extraction > q) {
            return Err(Error::Parameter(format!(
                "fault at extraction {} outside 1..={q}",
                f.extraction
            )));
        }
        let mass = quantize_probability(entry.probability)?;
        let (e, seq) = prop.compound(&entry.faults, q, n, n_bits);
        let key = set_key(code, &e)?;
        if !table.reps.contains_key(&key) {
            let rep = representative(code, &key)?;
            table.reps.insert(key.clone(), rep);
        }
        table.add(seq, key, mass);
    }
    Ok(table)
}

/// Key-wise merge of worker tables. Representatives must agree exactly;
/// a mismatch means a worker decomposed against a different code.
pub fn merge_data_tables(parts: Vec<DataTable>) -> Result<DataTable> {
    let mut iter = parts.into_iter();
    let Some(mut merged) = iter.next() else {
        return Err(Error::Parameter("no tables to merge".into()));
    };
    for part in iter {
        if part.q != merged.q || part.n_bits != merged.n_bits {
            return Err(Error::Parameter(format!(
                "table shape mismatch: ({}, {}) vs ({}, {})",
                part.q, part.n_bits, merged.q, merged.n_bits
            )));
        }
        for (key, rep) in part.reps {
            match merged.reps.get(&key) {
                None => {
                    merged.reps.insert(key, rep);
                }
                Some(existing) if *existing == rep => {}
                Some(existing) => {
                    return Err(Error::Internal(format!(
                        "representative mismatch for degenerate set: {existing} vs {rep}"
                    )));
                }
            }
        }
        for (seq, sets) in part.rows {
            for (key, mass) in sets {
                merged.add(seq.clone(), key, mass);
            }
        }
    }
    Ok(merged)
}

/// Parallel table construction: the noise list is split into `workers`
/// contiguous chunks, each processed independently, then merged in chunk
/// order. Output is identical to the serial build.
pub fn parallel_build_data_table(
    code: &StabilizerCode,
    circ: &ExtractionCircuit,
    noise: &[NoiseEntry],
    q: usize,
    workers: usize,
) -> Result<DataTable> {
    if workers <= 1 || noise.len() < 2 * workers {
        return build_data_table(code, circ, noise, q);
    }
    let prop = PropagationTable::new(circ, code);
    let chunk_size = noise.len().div_ceil(workers);
    let parts: Vec<Result<DataTable>> = std::thread::scope(|scope| {
        let handles: Vec<_> = noise
            .chunks(chunk_size)
            .map(|chunk| {
                let prop = &prop;
                scope.spawn(move || {
                    build_chunk(code, prop, chunk, q, circ.n(), circ.n_ancilla())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    merge_data_tables(parts.into_iter().collect::<Result<Vec<_>>>()?)
}

/// One chosen correction per sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodingTable {
    q: usize,
    n_bits: usize,
    entries: BTreeMap<SyndromeSequence, DecodingEntry>,
    /// Truncation order of the generating noise, when known.
    omega_max: Option<usize>,
    /// Model probability the masses were evaluated at, when known.
    model_p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingEntry {
    pub key: DegenerateSetKey,
    pub correction: PauliOperator,
    pub mass: u128,
}

impl DecodingTable {
    pub fn new(q: usize, n_bits: usize) -> Self {
        DecodingTable {
            q,
            n_bits,
            entries: BTreeMap::new(),
            omega_max: None,
            model_p: None,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn omega_max(&self) -> Option<usize> {
        self.omega_max
    }

    pub fn model_p(&self) -> Option<f64> {
        self.model_p
    }

    pub fn set_provenance(&mut self, omega_max: Option<usize>, model_p: Option<f64>) {
        self.omega_max = omega_max;
        self.model_p = model_p;
    }

    pub fn entries(&self) -> &BTreeMap<SyndromeSequence, DecodingEntry> {
        &self.entries
    }

    pub fn lookup(&self, seq: &SyndromeSequence) -> Option<&DecodingEntry> {
        self.entries.get(seq)
    }

    pub fn insert(&mut self, seq: SyndromeSequence, entry: DecodingEntry) {
        self.entries.insert(seq, entry);
    }

    /// Sum of winning masses: the probability of successful correction over
    /// the enumerated noise.
    pub fn winning_mass(&self) -> u128 {
        self.entries.values().map(|e| e.mass).sum()
    }
}

/// Per sequence, keep the heaviest degenerate set. Ties break to the
/// lexicographically smallest representative in [X|Z] binary form, so the
/// outcome does not depend on enumeration or worker order.
pub fn build_decoding_table(data: &DataTable) -> Result<DecodingTable> {
    let mut table = DecodingTable::new(data.q, data.n_bits);
    for (seq, sets) in &data.rows {
        let mut best: Option<(&DegenerateSetKey, &PauliOperator, u128)> = None;
        for (key, &mass) in sets {
            let rep = data
                .reps
                .get(key)
                .ok_or_else(|| Error::Internal("set without representative".into()))?;
            let better = match best {
                None => true,
                Some((_, best_rep, best_mass)) => {
                    mass > best_mass || (mass == best_mass && rep < best_rep)
                }
            };
            if better {
                best = Some((key, rep, mass));
            }
        }
        let (key, rep, mass) = best.ok_or_else(|| Error::Internal("empty row".into()))?;
        table.insert(
            seq.clone(),
            DecodingEntry {
                key: key.clone(),
                correction: rep.clone(),
                mass,
            },
        );
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Serialization.

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DecodingTableFile {
    pub version: u32,
    pub code_hash: String,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub p: f64,
    /// Truncation order of the generating noise, when applicable.
    pub omega_max: Option<usize>,
    /// "exact" for explicit noise lists, "bernoulli" for count tables.
    pub source: String,
    /// Diagnostic from the count-table corrections, when applicable.
    pub clamped_negative_counts: Option<u64>,
    pub entries: Vec<DecodingFileEntry>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DecodingFileEntry {
    pub sequence_hex: String,
    pub correction: String,
    pub mass: f64,
}

impl DecodingTable {
    pub fn to_file(
        &self,
        code_hash: String,
        n: usize,
        k: usize,
        p: f64,
        omega_max: Option<usize>,
        source: &str,
        clamped_negative_counts: Option<u64>,
    ) -> DecodingTableFile {
        DecodingTableFile {
            version: 1,
            code_hash,
            n,
            k,
            q: self.q,
            p,
            omega_max,
            source: source.to_string(),
            clamped_negative_counts,
            entries: self
                .entries
                .iter()
                .map(|(seq, e)| DecodingFileEntry {
                    sequence_hex: seq.bits().to_hex(),
                    correction: e.correction.to_string(),
                    mass: mass_to_f64(e.mass),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::appendix_example_code;
    use crate::extraction::{build_extraction, enumerate_noise};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn random_code(n: usize, k: usize, seed: u64) -> StabilizerCode {
        let mut rng = StdRng::seed_from_u64(seed);
        let enc = crate::code::generate_encoding(n, k, None, &mut rng).unwrap();
        crate::code::derive_code(&enc, k).unwrap()
    }

    fn random_pauli(rng: &mut StdRng, n: usize) -> PauliOperator {
        use rand::Rng;
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            match rng.gen_range(0..4) {
                1 => p.set_x(q, true),
                2 => {
                    p.set_x(q, true);
                    p.set_z(q, true);
                }
                3 => p.set_z(q, true),
                _ => {}
            }
        }
        p
    }

    #[test]
    fn coset_leader_basics() {
        let code = appendix_example_code();
        let zero = Bits::zeros(1);
        assert!(f_e(&code, &zero).unwrap().is_identity());
        let one = Bits::from_bools(&[true]);
        assert_eq!(f_e(&code, &one).unwrap().to_string(), "Z1");
        assert!(f_e(&code, &Bits::zeros(2)).is_err());
    }

    #[test]
    fn coset_leader_syndrome_sweep() {
        for (n, k, seed) in [(5, 1, 1u64), (6, 2, 2), (8, 1, 3)] {
            let code = random_code(n, k, seed);
            let m = code.n_stabilizers();
            for mask in 0u32..1 << m {
                let mut s = Bits::zeros(m);
                for b in 0..m {
                    if mask >> b & 1 == 1 {
                        s.set(b, true);
                    }
                }
                let e = f_e(&code, &s).unwrap();
                assert_eq!(code.syndrome_of(&e), s);
            }
        }
    }

    #[test]
    fn logical_component_worked_example() {
        let code = appendix_example_code();
        let z1 = PauliOperator::parse("Z1", 2).unwrap();
        let (u_l, l) = f_l(&code, &z1).unwrap();
        assert!(u_l.is_zero());
        assert!(l.is_identity());
    }

    #[test]
    fn stabilizers_have_trivial_logical_part() {
        let code = random_code(6, 2, 5);
        for s in code.stabilizers() {
            let (u_l, l) = f_l(&code, s).unwrap();
            assert!(u_l.is_zero());
            assert!(l.is_identity());
        }
    }

    #[test]
    fn decompose_reassembles_and_separates() {
        let mut rng = StdRng::seed_from_u64(7);
        let code = random_code(5, 2, 6);
        assert_eq!(
            decompose(&code, &PauliOperator::identity(5)).unwrap(),
            Decomposition {
                error_part: PauliOperator::identity(5),
                stabilizer_part: PauliOperator::identity(5),
                logical_part: PauliOperator::identity(5),
            }
        );
        for _ in 0..200 {
            let e = random_pauli(&mut rng, 5);
            let d = decompose(&code, &e).unwrap();
            let mut product = d.error_part.clone();
            product.mul_assign_ref(&d.stabilizer_part);
            product.mul_assign_ref(&d.logical_part);
            assert_eq!(product, e);
            assert_eq!(code.syndrome_of(&d.error_part), code.syndrome_of(&e));
            assert!(code.syndrome_of(&d.stabilizer_part).is_zero());
            let (u_l, _) = f_l(&code, &d.stabilizer_part).unwrap();
            assert!(u_l.is_zero());
        }
    }

    #[test]
    fn alt_decomposition_identity_and_reassembly() {
        let code = random_code(5, 1, 8);
        let (d, bits) = decompose_alt(&code, &PauliOperator::identity(5)).unwrap();
        assert!(d.error_part.is_identity());
        assert!(d.stabilizer_part.is_identity());
        assert!(d.logical_part.is_identity());
        assert!(bits.is_zero());

        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let e = random_pauli(&mut rng, 5);
            let (d, _) = decompose_alt(&code, &e).unwrap();
            let mut product = d.error_part.clone();
            product.mul_assign_ref(&d.stabilizer_part);
            product.mul_assign_ref(&d.logical_part);
            assert_eq!(product, e);
        }
    }

    #[test]
    fn partitions_agree_between_decompositions() {
        let mut rng = StdRng::seed_from_u64(10);
        let code = random_code(4, 1, 11);
        let errors: Vec<PauliOperator> = (0..60).map(|_| random_pauli(&mut rng, 4)).collect();
        let main_keys: Vec<DegenerateSetKey> =
            errors.iter().map(|e| set_key(&code, e).unwrap()).collect();
        let alt_keys: Vec<(Bits, Bits)> = errors
            .iter()
            .map(|e| {
                let (_, bits) = decompose_alt(&code, e).unwrap();
                (code.syndrome_of(e), bits)
            })
            .collect();
        for i in 0..errors.len() {
            for j in i + 1..errors.len() {
                let same_main = main_keys[i] == main_keys[j];
                let same_alt = alt_keys[i] == alt_keys[j];
                assert_eq!(same_main, same_alt, "partition mismatch at ({i},{j})");
                let product = &errors[i] * &errors[j];
                let in_group = code.syndrome_of(&product).is_zero()
                    && f_l(&code, &product).unwrap().0.is_zero();
                assert_eq!(same_main, in_group);
            }
        }
    }

    #[test]
    fn correction_success_cases() {
        let code = random_code(4, 1, 12);
        let e = PauliOperator::parse("X2", 4).unwrap();
        assert!(correction_success(&code, &e, &e).unwrap());
        let mut degenerate = e.clone();
        degenerate.mul_assign_ref(&code.stabilizers()[0]);
        assert!(correction_success(&code, &degenerate, &e).unwrap());
        let mut logical = e.clone();
        logical.mul_assign_ref(&code.logical_x()[0]);
        assert!(!correction_success(&code, &logical, &e).unwrap());
    }

    #[test]
    fn empty_noise_gives_empty_table() {
        let code = appendix_example_code();
        let circ = build_extraction(&code);
        let table = build_data_table(&code, &circ, &[], 1).unwrap();
        assert!(table.is_empty());
        assert_eq!(table.total_mass(), 0);
    }

    #[test]
    fn mass_conservation() {
        let code = appendix_example_code();
        let circ = build_extraction(&code);
        let noise = enumerate_noise(&circ, 1, 0.05, 2).unwrap();
        let expected: u128 = noise
            .iter()
            .map(|e| quantize_probability(e.probability).unwrap())
            .sum();
        let table = build_data_table(&code, &circ, &noise, 1).unwrap();
        assert_eq!(table.total_mass(), expected);
    }

    #[test]
    fn merge_identity_and_order_independence() {
        let code = random_code(4, 1, 13);
        let circ = build_extraction(&code);
        let noise = enumerate_noise(&circ, 2, 0.02, 1).unwrap();
        let full = build_data_table(&code, &circ, &noise, 2).unwrap();

        let empty = DataTable::empty(full.q(), full.n_bits());
        let merged = merge_data_tables(vec![full.clone(), empty]).unwrap();
        assert_eq!(merged, full);

        let third = noise.len() / 3;
        let parts: Vec<DataTable> = [
            &noise[..third],
            &noise[third..2 * third],
            &noise[2 * third..],
        ]
        .iter()
        .map(|chunk| build_data_table(&code, &circ, chunk, 2).unwrap())
        .collect();
        let forward = merge_data_tables(parts.clone()).unwrap();
        let mut reversed = parts;
        reversed.reverse();
        let backward = merge_data_tables(reversed).unwrap();
        assert_eq!(forward, backward);
        assert_eq!(forward, full);
    }

    #[test]
    fn parallel_build_matches_serial() {
        let code = random_code(4, 1, 14);
        let circ = build_extraction(&code);
        let noise = enumerate_noise(&circ, 2, 0.03, 1).unwrap();
        let serial = build_data_table(&code, &circ, &noise, 2).unwrap();
        for workers in [2, 3, 4] {
            let par = parallel_build_data_table(&code, &circ, &noise, 2, workers).unwrap();
            assert_eq!(par, serial);
        }
    }

    #[test]
    fn argmax_scale_invariance_and_singleton() {
        let code = appendix_example_code();
        let circ = build_extraction(&code);
        let noise = enumerate_noise(&circ, 1, 0.2, 1).unwrap();
        let table = build_data_table(&code, &circ, &noise, 1).unwrap();
        let winners = build_decoding_table(&table).unwrap();

        let scaled: Vec<NoiseEntry> = noise
            .iter()
            .map(|e| NoiseEntry {
                probability: e.probability * 0.25,
                faults: e.faults.clone(),
            })
            .collect();
        let table2 = build_data_table(&code, &circ, &scaled, 1).unwrap();
        let winners2 = build_decoding_table(&table2).unwrap();
        for (seq, entry) in winners.entries() {
            assert_eq!(winners2.lookup(seq).unwrap().key, entry.key);
        }

        let single = &noise[..1];
        let t = build_data_table(&code, &circ, single, 1).unwrap();
        let d = build_decoding_table(&t).unwrap();
        assert_eq!(d.entries().len(), 1);
    }

    #[test]
    fn table_file_roundtrip() {
        let code = appendix_example_code();
        let circ = build_extraction(&code);
        let noise = enumerate_noise(&circ, 1, 0.9, 1).unwrap();
        let data = build_data_table(&code, &circ, &noise, 1).unwrap();
        let table = build_decoding_table(&data).unwrap();
        let desc = code.to_descriptor(None);
        let file = table.to_file(
            crate::code::descriptor_hash(&desc),
            2,
            1,
            0.9,
            Some(1),
            "exact",
            None,
        );
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: DecodingTableFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.entries.len(), file.entries.len());
        assert_eq!(parsed.code_hash, file.code_hash);
    }
}
