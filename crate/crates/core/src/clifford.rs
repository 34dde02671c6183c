//! Clifford circuits over {H, sqrt(Z), CNOT} and Pauli conjugation.
//!
//! Errors, stabilizers and logicals only ever need to be pushed through
//! circuits by conjugation, so no state is simulated: each gate updates the
//! X/Z bits of the operator directly (Heisenberg picture), O(1) per gate.
//!
//! The two-qubit Clifford group is enumerated once by breadth-first closure
//! of the generator set and cached. With signs of the four Pauli images
//! tracked, the closure has exactly 11 520 distinct elements; dropping signs
//! would identify elements differing by Pauli factors and collapse the count
//! to 720.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// A gate from the generating set. `SqrtZInv` appears so circuits containing
/// basis changes stay exactly invertible; its phase-free conjugation rule
/// coincides with `SqrtZ`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CliffordGate {
    H { q: usize },
    SqrtZ { q: usize },
    SqrtZInv { q: usize },
    Cnot { control: usize, target: usize },
}

impl CliffordGate {
    pub fn inverse(self) -> Self {
        match self {
            CliffordGate::SqrtZ { q } => CliffordGate::SqrtZInv { q },
            CliffordGate::SqrtZInv { q } => CliffordGate::SqrtZ { q },
            g => g,
        }
    }

    pub fn max_qubit(self) -> usize {
        match self {
            CliffordGate::H { q } | CliffordGate::SqrtZ { q } | CliffordGate::SqrtZInv { q } => q,
            CliffordGate::Cnot { control, target } => control.max(target),
        }
    }

    /// Conjugate `p` (with running sign) by this gate in place.
    pub(crate) fn apply_raw(self, p: &mut PauliOperator, neg: &mut bool) {
        match self {
            CliffordGate::H { q } => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                *neg ^= x && z;
                p.set_x(q, z);
                p.set_z(q, x);
            }
            CliffordGate::SqrtZ { q } => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                *neg ^= x && z;
                p.set_z(q, x ^ z);
            }
            CliffordGate::SqrtZInv { q } => {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                *neg ^= x && !z;
                p.set_z(q, x ^ z);
            }
            CliffordGate::Cnot { control, target } => {
                let (xc, zc) = (p.x_bit(control), p.z_bit(control));
                let (xt, zt) = (p.x_bit(target), p.z_bit(target));
                *neg ^= xc && zt && (xt == zc);
                p.set_x(target, xt ^ xc);
                p.set_z(control, zc ^ zt);
            }
        }
    }
}

/// Ordered gate list on a fixed-width register; gates apply left to right.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliffordCircuit {
    pub n_qubits: usize,
    pub gates: Vec<CliffordGate>,
}

/// Conjugation direction: `Forward` computes `c p c^dagger` (the image of an
/// error injected before the circuit), `Inverse` computes `c^dagger p c`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Inverse,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        for g in &gates {
            if g.max_qubit() >= n_qubits {
                return Err(Error::Parameter(format!(
                    "gate {g:?} outside circuit width {n_qubits}"
                )));
            }
            if let CliffordGate::Cnot { control, target } = g {
                if control == target {
                    return Err(Error::Parameter("CNOT control equals target".into()));
                }
            }
        }
        Ok(CliffordCircuit { n_qubits, gates })
    }

    pub fn conjugate(&self, p: &PauliOperator, direction: Direction) -> Result<PauliOperator> {
        let (out, _) = self.conjugate_signed(p, direction)?;
        Ok(out)
    }

    /// Conjugation that also reports the sign of the image; the decoding
    /// pipeline discards it, the group enumeration needs it.
    pub fn conjugate_signed(
        &self,
        p: &PauliOperator,
        direction: Direction,
    ) -> Result<(PauliOperator, bool)> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "operator on {} qubits vs circuit width {}",
                p.n_qubits(),
                self.n_qubits
            )));
        }
        let mut out = p.clone();
        let mut neg = false;
        match direction {
            Direction::Forward => {
                for g in &self.gates {
                    g.apply_raw(&mut out, &mut neg);
                }
            }
            Direction::Inverse => {
                for g in self.gates.iter().rev() {
                    g.inverse().apply_raw(&mut out, &mut neg);
                }
            }
        }
        Ok((out, neg))
    }
}

/// A Pauli image with its sign under conjugation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignedPauli {
    pub op: PauliOperator,
    pub neg: bool,
}

/// Images of the generators X_j, Z_j under conjugation by some Clifford.
/// Two circuits realize the same unitary up to global phase iff their
/// tableaus (including image signs) coincide.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CliffordTableau {
    n_qubits: usize,
    /// images[2j] is the image of X_{j+1}, images[2j+1] of Z_{j+1}.
    images: Vec<SignedPauli>,
}

impl CliffordTableau {
    pub fn identity(n_qubits: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n_qubits);
        for j in 0..n_qubits {
            images.push(SignedPauli {
                op: PauliOperator::x_at(n_qubits, j),
                neg: false,
            });
            images.push(SignedPauli {
                op: PauliOperator::z_at(n_qubits, j),
                neg: false,
            });
        }
        CliffordTableau { n_qubits, images }
    }

    pub fn from_circuit(c: &CliffordCircuit) -> Self {
        let mut t = Self::identity(c.n_qubits);
        for &g in &c.gates {
            t.apply_gate(g);
        }
        t
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn image_of_x(&self, j: usize) -> &SignedPauli {
        &self.images[2 * j]
    }

    pub fn image_of_z(&self, j: usize) -> &SignedPauli {
        &self.images[2 * j + 1]
    }

    pub fn apply_gate(&mut self, g: CliffordGate) {
        for img in &mut self.images {
            g.apply_raw(&mut img.op, &mut img.neg);
        }
    }

    /// Images preserve all pairwise commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n_qubits;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                // X_j and Z_j anticommute; all other generator pairs commute.
                let should_commute = !(a / 2 == b / 2 && a % 2 != b % 2);
                if self.images[a].op.commutes_with(&self.images[b].op) != should_commute {
                    return false;
                }
            }
        }
        true
    }

    /// Compact canonical key for two-qubit tableaus: 4 images x (4 bits + sign).
    fn key2(&self) -> u32 {
        debug_assert_eq!(self.n_qubits, 2);
        let mut key = 0u32;
        for (i, img) in self.images.iter().enumerate() {
            let mut bits = 0u32;
            for q in 0..2 {
                bits |= (img.op.x_bit(q) as u32) << (2 * q);
                bits |= (img.op.z_bit(q) as u32) << (2 * q + 1);
            }
            bits |= (img.neg as u32) << 4;
            key |= bits << (5 * i);
        }
        key
    }
}

/// One enumerated element of the two-qubit Clifford group: its tableau and a
/// gate sequence realizing it.
#[derive(Clone, Debug)]
pub struct C2Element {
    pub tableau: CliffordTableau,
    pub gates: Vec<CliffordGate>,
}

pub struct C2Group {
    elements: Vec<C2Element>,
    index: HashMap<u32, usize>,
}

impl C2Group {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[C2Element] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &C2Element {
        &self.elements[i]
    }

    pub fn index_of(&self, t: &CliffordTableau) -> Option<usize> {
        self.index.get(&t.key2()).copied()
    }

    pub fn contains(&self, t: &CliffordTableau) -> bool {
        self.index_of(t).is_some()
    }
}

const C2_GENERATORS: [CliffordGate; 6] = [
    CliffordGate::H { q: 0 },
    CliffordGate::H { q: 1 },
    CliffordGate::SqrtZ { q: 0 },
    CliffordGate::SqrtZ { q: 1 },
    CliffordGate::Cnot { control: 0, target: 1 },
    CliffordGate::Cnot { control: 1, target: 0 },
];

/// The full two-qubit Clifford group, enumerated once and cached. The first
/// element is the identity with an empty gate sequence.
pub fn enumerate_c2() -> &'static C2Group {
    static CACHE: OnceLock<C2Group> = OnceLock::new();
    CACHE.get_or_init(|| {
        let identity = CliffordTableau::identity(2);
        let mut elements = vec![C2Element {
            tableau: identity.clone(),
            gates: Vec::new(),
        }];
        let mut index = HashMap::new();
        index.insert(identity.key2(), 0);

        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &ei in &frontier {
                for &g in &C2_GENERATORS {
                    let mut t = elements[ei].tableau.clone();
                    t.apply_gate(g);
                    let key = t.key2();
                    if let std::collections::hash_map::Entry::Vacant(entry) = index.entry(key) {
                        let mut gates = elements[ei].gates.clone();
                        gates.push(g);
                        entry.insert(elements.len());
                        next.push(elements.len());
                        elements.push(C2Element { tableau: t, gates });
                    }
                }
            }
            frontier = next;
        }

        C2Group { elements, index }
    })
}

/// Uniform draw from the cached enumeration.
pub fn random_c2<R: Rng + ?Sized>(rng: &mut R) -> &'static C2Element {
    let group = enumerate_c2();
    group.get(rng.gen_range(0..group.len()))
}
