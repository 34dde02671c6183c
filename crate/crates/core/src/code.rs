//! Random stabilizer code construction and the decoder's precomputed
//! structures.
//!
//! An (n,k) code is generated by a random encoding circuit built from
//! uniformly drawn two-qubit Clifford elements. Stabilizers and logicals are
//! obtained by conjugating the unencoded Z and X operators through the
//! encoding; everything the decoder needs afterwards (reduced check matrix
//! with its transform, reduced logical generators, single-qubit coset basis)
//! is precomputed here once per code.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::Bits;
use crate::clifford::{CliffordCircuit, CliffordGate, Direction};
use crate::error::{Error, Result};
use crate::f2::{constrained_rref, matvec, rref, BinaryMatrix, RrefResult};
use crate::pauli::{Format, PauliOperator};

/// A stabilizer code together with the decoding structures derived from it.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    encoding: CliffordCircuit,
    stabilizers: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
    /// (n-k) x 2n check matrix; row i is the stabilizer in [X|Z] form.
    check_matrix: BinaryMatrix,
    a_rre: RrefResult,
    /// 2k x 2n logical generators reduced against `a_rre` and self-reduced.
    l_rre: BinaryMatrix,
    l_pivots: Vec<usize>,
    /// Single-qubit errors hitting exactly one reduced-stabilizer syndrome bit.
    coset_basis: Vec<PauliOperator>,
}

fn pauli_row(p: &PauliOperator) -> Bits {
    p.to_binary(Format::Xz).bits
}

impl StabilizerCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of minimal stabilizers / ancilla qubits, n - k.
    pub fn n_stabilizers(&self) -> usize {
        self.n - self.k
    }

    pub fn encoding(&self) -> &CliffordCircuit {
        &self.encoding
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    pub fn check_matrix(&self) -> &BinaryMatrix {
        &self.check_matrix
    }

    pub fn a_rre(&self) -> &RrefResult {
        &self.a_rre
    }

    pub fn l_rre(&self) -> &BinaryMatrix {
        &self.l_rre
    }

    pub fn l_pivots(&self) -> &[usize] {
        &self.l_pivots
    }

    pub fn coset_basis(&self) -> &[PauliOperator] {
        &self.coset_basis
    }

    /// Syndrome of an error pattern against the physical stabilizers:
    /// the [Z|X] encoding of `e` dotted with the [X|Z] check matrix rows.
    pub fn syndrome_of(&self, e: &PauliOperator) -> Bits {
        matvec(&e.to_binary(Format::Zx).bits, &self.check_matrix, true)
            .expect("check matrix width matches code")
    }

    /// Map a measured syndrome into the reduced-stabilizer basis (J * s).
    pub fn syndrome_to_rre(&self, s_hat: &Bits) -> Bits {
        matvec(s_hat, &self.a_rre.transform, true).expect("square transform")
    }

    /// Sum of stabilizer weights: CNOT count of one syndrome extraction.
    pub fn extraction_cnot_count(&self) -> usize {
        self.stabilizers.iter().map(PauliOperator::weight).sum()
    }
}

/// Default two-qubit-block count: ceil(n * log2(n)^2). The asymptotic order
/// comes with no constant attached; 1.0 is the exposed default.
pub fn default_gate_count(n: usize, c: f64) -> usize {
    let lg = (n as f64).log2();
    (c * n as f64 * lg * lg).ceil() as usize
}

/// A random encoding: `num_gates` uniformly drawn two-qubit Clifford
/// elements, each applied to a uniformly random ordered pair of distinct
/// qubits and expanded into its {H, sqrt(Z), CNOT} realization.
pub fn generate_encoding<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    num_gates: Option<usize>,
    rng: &mut R,
) -> Result<CliffordCircuit> {
    if k == 0 || n <= k {
        return Err(Error::Parameter(format!(
            "encoding requires n > k >= 1, got n={n}, k={k}"
        )));
    }
    let blocks = num_gates.unwrap_or_else(|| default_gate_count(n, 1.0));
    let mut gates = Vec::new();
    for _ in 0..blocks {
        let element = crate::clifford::random_c2(rng);
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n);
        while b == a {
            b = rng.gen_range(0..n);
        }
        let map = |q: usize| if q == 0 { a } else { b };
        for &g in &element.gates {
            gates.push(match g {
                CliffordGate::H { q } => CliffordGate::H { q: map(q) },
                CliffordGate::SqrtZ { q } => CliffordGate::SqrtZ { q: map(q) },
                CliffordGate::SqrtZInv { q } => CliffordGate::SqrtZInv { q: map(q) },
                CliffordGate::Cnot { control, target } => CliffordGate::Cnot {
                    control: map(control),
                    target: map(target),
                },
            });
        }
    }
    CliffordCircuit::new(n, gates)
}

/// Derive stabilizers, logicals and all decoder structures from an encoding.
///
/// Stabilizers are the conjugated Z operators of the n-k redundancy qubits;
/// logicals are the conjugated X and Z of the k data qubits. The coset basis
/// holds, per reduced-stabilizer row, the single-qubit error (Z at an X-block
/// pivot, X at a Z-block pivot) whose syndrome is the matching unit vector.
pub fn derive_code(encoding: &CliffordCircuit, k: usize) -> Result<StabilizerCode> {
    let n = encoding.n_qubits;
    if k == 0 || n <= k {
        return Err(Error::Parameter(format!(
            "code requires n > k >= 1, got n={n}, k={k}"
        )));
    }

    let conj = |p: &PauliOperator| encoding.conjugate(p, Direction::Forward);
    let stabilizers: Vec<PauliOperator> = (0..n - k)
        .map(|i| conj(&PauliOperator::z_at(n, k + i)))
        .collect::<Result<_>>()?;
    let logical_x: Vec<PauliOperator> = (0..k)
        .map(|j| conj(&PauliOperator::x_at(n, j)))
        .collect::<Result<_>>()?;
    let logical_z: Vec<PauliOperator> = (0..k)
        .map(|j| conj(&PauliOperator::z_at(n, j)))
        .collect::<Result<_>>()?;

    build_code(encoding.clone(), stabilizers, logical_x, logical_z)
}

fn build_code(
    encoding: CliffordCircuit,
    stabilizers: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
) -> Result<StabilizerCode> {
    let n = encoding.n_qubits;
    let k = logical_x.len();

    let check_matrix = BinaryMatrix::from_rows(stabilizers.iter().map(pauli_row).collect());
    let a_rre = rref(&check_matrix);
    if a_rre.pivots.len() != n - k {
        return Err(Error::Internal(format!(
            "check matrix rank {} != n-k = {}",
            a_rre.pivots.len(),
            n - k
        )));
    }

    let l_matrix = BinaryMatrix::from_rows(
        logical_x.iter().chain(&logical_z).map(pauli_row).collect(),
    );
    let reduced = constrained_rref(&a_rre.rre, &l_matrix)?;
    if reduced.pivots.len() != 2 * k {
        return Err(Error::Internal(format!(
            "logical generators rank {} != 2k = {}",
            reduced.pivots.len(),
            2 * k
        )));
    }

    let coset_basis = a_rre
        .pivots
        .iter()
        .map(|&h| {
            if h < n {
                PauliOperator::z_at(n, h)
            } else {
                PauliOperator::x_at(n, h - n)
            }
        })
        .collect();

    Ok(StabilizerCode {
        n,
        k,
        encoding,
        stabilizers,
        logical_x,
        logical_z,
        check_matrix,
        a_rre,
        l_rre: reduced.lower_rre,
        l_pivots: reduced.pivots,
        coset_basis,
    })
}

/// How the stabilizer weights changed when switching to the reduced set.
#[derive(Clone, Debug, Serialize)]
pub struct WeightReport {
    pub avg_weight_before: f64,
    pub avg_weight_after: f64,
    pub avg_non_z_weight_after: f64,
    /// The 1 + k/2 average non-Z bound only applies in this case.
    pub all_pivots_in_x_block: bool,
    pub cnot_count_before: usize,
    pub cnot_count_after: usize,
}

/// Swap the physical stabilizer set for the rows of the reduced check
/// matrix. The group is unchanged, so decoding statistics are equivalent,
/// but the extraction circuit gets cheaper on average.
pub fn reduce_stabilizer_weight(code: &StabilizerCode) -> Result<(StabilizerCode, WeightReport)> {
    let n = code.n;
    let avg = |ops: &[PauliOperator]| {
        ops.iter().map(|s| s.weight() as f64).sum::<f64>() / ops.len() as f64
    };

    let new_stabilizers: Vec<PauliOperator> = code
        .a_rre
        .rre
        .iter_rows()
        .map(|row| {
            PauliOperator::from_binary(&crate::pauli::BinaryVector {
                bits: row.clone(),
                format: Format::Xz,
            })
        })
        .collect::<Result<_>>()?;

    let report = WeightReport {
        avg_weight_before: avg(&code.stabilizers),
        avg_weight_after: avg(&new_stabilizers),
        avg_non_z_weight_after: new_stabilizers
            .iter()
            .map(|s| s.x_bits().count_ones() as f64)
            .sum::<f64>()
            / new_stabilizers.len() as f64,
        all_pivots_in_x_block: code.a_rre.pivots.iter().all(|&h| h < n),
        cnot_count_before: code.extraction_cnot_count(),
        cnot_count_after: new_stabilizers.iter().map(PauliOperator::weight).sum(),
    };

    let reduced = build_code(
        code.encoding.clone(),
        new_stabilizers,
        code.logical_x.clone(),
        code.logical_z.clone(),
    )?;
    Ok((reduced, report))
}

/// Serializable description of a code, sufficient to reload it bit-exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
    pub gates: Vec<CliffordGate>,
    pub stabilizers: Vec<String>,
    pub logical_x: Vec<String>,
    pub logical_z: Vec<String>,
}

impl StabilizerCode {
    pub fn to_descriptor(&self, seed: Option<u64>) -> CodeDescriptor {
        CodeDescriptor {
            version: 1,
            n: self.n,
            k: self.k,
            seed,
            gates: self.encoding.gates.clone(),
            stabilizers: self.stabilizers.iter().map(|p| p.to_string()).collect(),
            logical_x: self.logical_x.iter().map(|p| p.to_string()).collect(),
            logical_z: self.logical_z.iter().map(|p| p.to_string()).collect(),
        }
    }

    /// Rebuild from a descriptor and cross-check the recorded operator
    /// strings against the re-derived ones.
    pub fn from_descriptor(desc: &CodeDescriptor) -> Result<StabilizerCode> {
        let circuit = CliffordCircuit::new(desc.n, desc.gates.clone())?;
        let code = derive_code(&circuit, desc.k)?;
        let check = |ops: &[PauliOperator], strings: &[String], what: &str| {
            let derived: Vec<String> = ops.iter().map(|p| p.to_string()).collect();
            if derived != strings {
                return Err(Error::Internal(format!(
                    "descriptor {what} mismatch: derived {derived:?}, recorded {strings:?}"
                )));
            }
            Ok(())
        };
        if !desc.stabilizers.is_empty() {
            // A descriptor written after weight reduction records the reduced set.
            if code
                .stabilizers
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                != desc.stabilizers
            {
                let (reduced, _) = reduce_stabilizer_weight(&code)?;
                check(&reduced.stabilizers, &desc.stabilizers, "stabilizers")?;
                check(&reduced.logical_x, &desc.logical_x, "logical X")?;
                check(&reduced.logical_z, &desc.logical_z, "logical Z")?;
                return Ok(reduced);
            }
            check(&code.logical_x, &desc.logical_x, "logical X")?;
            check(&code.logical_z, &desc.logical_z, "logical Z")?;
        }
        Ok(code)
    }
}

/// Stable content hash of a descriptor; stamped into table files so a table
/// cannot be replayed against the wrong code.
pub fn descriptor_hash(desc: &CodeDescriptor) -> String {
    let bytes = serde_json::to_vec(desc).expect("descriptor serializes");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The worked two-qubit example: encoding CNOT(2,1) H_2 (H applied first),
/// with stabilizer X1X2 and reduced logicals I1X2, Z1Z2.
pub fn appendix_example_code() -> StabilizerCode {
    let circuit = CliffordCircuit::new(
        2,
        vec![
            CliffordGate::H { q: 1 },
            CliffordGate::Cnot { control: 1, target: 0 },
        ],
    )
    .expect("static circuit is valid");
    derive_code(&circuit, 1).expect("static code derives")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    pub(crate) fn random_code(n: usize, k: usize, seed: u64) -> StabilizerCode {
        let mut rng = StdRng::seed_from_u64(seed);
        let enc = generate_encoding(n, k, None, &mut rng).unwrap();
        derive_code(&enc, k).unwrap()
    }

    #[test]
    fn worked_example_structures() {
        let code = appendix_example_code();
        assert_eq!(code.stabilizers()[0].to_string(), "X1X2");
        assert_eq!(code.logical_z()[0].to_string(), "Z1Z2");
        // Raw logical X is X1 = S1 * (I1X2); the reduced generator is I1X2.
        let l0 = code.l_rre().row(0);
        let l1 = code.l_rre().row(1);
        assert_eq!(format!("{l0:?}"), "0100");
        assert_eq!(format!("{l1:?}"), "0011");
        // Coset basis: syndrome bit 1 is produced by Z1.
        assert_eq!(code.coset_basis().len(), 1);
        assert_eq!(code.coset_basis()[0].to_string(), "Z1");
        // A is already reduced: J = I.
        assert_eq!(code.a_rre().transform, BinaryMatrix::identity(1));
    }

    #[test]
    fn default_gate_count_formula() {
        assert_eq!(default_gate_count(8, 1.0), 72);
        assert_eq!(default_gate_count(2, 1.0), 2);
    }

    #[test]
    fn encoding_is_deterministic_per_seed() {
        let a = generate_encoding(4, 1, None, &mut StdRng::seed_from_u64(5)).unwrap();
        let b = generate_encoding(4, 1, None, &mut StdRng::seed_from_u64(5)).unwrap();
        assert_eq!(a.gates, b.gates);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = StdRng::seed_from_u64(0);
        assert!(generate_encoding(3, 3, None, &mut rng).is_err());
        assert!(generate_encoding(3, 0, None, &mut rng).is_err());
    }

    #[test]
    fn conjugation_roundtrip_recovers_unencoded_operator() {
        let code = random_code(5, 2, 17);
        for i in 0..3 {
            let z = PauliOperator::z_at(5, 2 + i);
            let s = code.encoding().conjugate(&z, Direction::Forward).unwrap();
            let back = code.encoding().conjugate(&s, Direction::Inverse).unwrap();
            assert_eq!(back, z);
        }
    }

    #[test]
    fn commutation_pattern_is_canonical() {
        let code = random_code(6, 2, 23);
        let stabs = code.stabilizers();
        for (i, s) in stabs.iter().enumerate() {
            for (j, t) in stabs.iter().enumerate() {
                assert!(s.commutes_with(t), "stabilizers {i},{j} anticommute");
            }
            for lx in code.logical_x() {
                assert!(s.commutes_with(lx));
            }
            for lz in code.logical_z() {
                assert!(s.commutes_with(lz));
            }
        }
        for a in 0..code.k() {
            for b in 0..code.k() {
                let expected = a != b;
                assert_eq!(
                    code.logical_x()[a].commutes_with(&code.logical_z()[b]),
                    expected
                );
                assert!(code.logical_x()[a].commutes_with(&code.logical_x()[b]));
                assert!(code.logical_z()[a].commutes_with(&code.logical_z()[b]));
            }
        }
    }

    #[test]
    fn coset_basis_syndromes_form_identity() {
        for seed in [1u64, 2, 3] {
            let code = random_code(6, 1, seed);
            for (i, e) in code.coset_basis().iter().enumerate() {
                // Syndrome against the REDUCED stabilizers is the unit vector i.
                let s = matvec(
                    &e.to_binary(Format::Zx).bits,
                    &code.a_rre().rre,
                    true,
                )
                .unwrap();
                assert_eq!(s.iter_ones().collect::<Vec<_>>(), vec![i]);
            }
        }
    }

    #[test]
    fn stabilizer_rows_have_zero_syndrome() {
        let code = random_code(7, 2, 31);
        for s in code.stabilizers() {
            assert!(code.syndrome_of(s).is_zero());
        }
        for row in code.a_rre().rre.iter_rows() {
            let p = PauliOperator::from_binary(&crate::pauli::BinaryVector {
                bits: row.clone(),
                format: Format::Xz,
            })
            .unwrap();
            assert!(code.syndrome_of(&p).is_zero());
        }
    }

    #[test]
    fn reduction_preserves_group_membership() {
        // Every reduced stabilizer must lie in the original group: enumerate
        // all products of the old generators (n-k small here).
        let code = random_code(6, 2, 41);
        let (reduced, report) = reduce_stabilizer_weight(&code).unwrap();
        let n_stab = code.n_stabilizers();
        let mut group = std::collections::HashSet::new();
        for mask in 0u32..1 << n_stab {
            let mut p = PauliOperator::identity(code.n());
            for i in 0..n_stab {
                if mask >> i & 1 == 1 {
                    p.mul_assign_ref(&code.stabilizers()[i]);
                }
            }
            group.insert(p.to_string());
        }
        for s in reduced.stabilizers() {
            assert!(group.contains(&s.to_string()), "{s} escaped the group");
        }
        assert!(report.avg_weight_after <= report.avg_weight_before + 1e-12);
    }

    #[test]
    fn reduction_lowers_average_weight_on_random_codes() {
        let mut before = 0.0;
        let mut after = 0.0;
        let mut non_z_sum = 0.0;
        let mut non_z_codes = 0usize;
        for seed in 0..50u64 {
            let code = random_code(12, 1, 1000 + seed);
            let (reduced, report) = reduce_stabilizer_weight(&code).unwrap();
            before += report.avg_weight_before;
            after += report.avg_weight_after;
            if report.all_pivots_in_x_block {
                // Hard per-row bound 1 + k on the non-Z weight; 1 + k/2 only
                // in expectation.
                for s in reduced.stabilizers() {
                    assert!(s.x_bits().count_ones() <= 1 + code.k());
                }
                non_z_sum += report.avg_non_z_weight_after;
                non_z_codes += 1;
            }
        }
        assert!(
            after < before,
            "mean weight did not drop: {after} vs {before}"
        );
        if non_z_codes >= 20 {
            let grand = non_z_sum / non_z_codes as f64;
            assert!(
                (grand - 1.5).abs() < 0.2,
                "mean non-Z weight {grand} far from 1 + k/2"
            );
        }
    }

    #[test]
    fn average_stabilizer_weight_near_three_quarters_n() {
        let n = 10;
        let mut total = 0.0;
        let mut count = 0usize;
        for seed in 0..50u64 {
            let code = random_code(n, 1, 2000 + seed);
            total += code
                .stabilizers()
                .iter()
                .map(|s| s.weight() as f64)
                .sum::<f64>();
            count += code.stabilizers().len();
        }
        let avg = total / count as f64;
        let expected = 0.75 * n as f64;
        assert!(
            (avg - expected).abs() < 0.1 * expected,
            "avg weight {avg} not within 10% of {expected}"
        );
    }

    #[test]
    fn descriptor_roundtrip() {
        let code = random_code(5, 1, 77);
        let desc = code.to_descriptor(Some(77));
        let json = serde_json::to_string(&desc).unwrap();
        let parsed: CodeDescriptor = serde_json::from_str(&json).unwrap();
        let reloaded = StabilizerCode::from_descriptor(&parsed).unwrap();
        assert_eq!(reloaded.stabilizers(), code.stabilizers());
        assert_eq!(reloaded.encoding().gates, code.encoding().gates);
        assert_eq!(descriptor_hash(&desc), descriptor_hash(&parsed));

        let fixture = appendix_example_code().to_descriptor(None);
        let reloaded = StabilizerCode::from_descriptor(&fixture).unwrap();
        assert_eq!(reloaded.stabilizers()[0].to_string(), "X1X2");
    }
}
