//! Phase-free Pauli strings in binary symplectic form.
//!
//! An n-qubit Pauli operator is stored as two n-bit vectors: `x` marks qubits
//! carrying an X component and `z` those carrying a Z component (a qubit with
//! both is Y). Phases are dropped throughout: every operator is its own
//! inverse and products are componentwise XOR.
//!
//! Binary encodings come in two component orders and both appear in the
//! decoding pipeline: check matrix rows are `[X|Z]` while error vectors feed
//! the syndrome product in `[Z|X]`. The order is carried as an explicit tag
//! on [`BinaryVector`] so the two cannot be confused silently.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Component order of a binary Pauli encoding.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Format {
    /// `[b^X_1 .. b^X_n | b^Z_1 .. b^Z_n]`
    Xz,
    /// `[b^Z_1 .. b^Z_n | b^X_1 .. b^X_n]`
    Zx,
}

/// Which Pauli component to extract from an encoded vector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Component {
    X,
    Z,
}

/// A length-2n bit vector encoding a Pauli operator, or a length-(n-k)
/// syndrome, tagged with its component order.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    pub bits: Bits,
    pub format: Format,
}

/// Phase-free n-qubit Pauli string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Bits,
    z: Bits,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            n,
            x: Bits::zeros(n),
            z: Bits::zeros(n),
        }
    }

    pub fn from_bits(x: Bits, z: Bits) -> Self {
        assert_eq!(x.len(), z.len(), "x and z bit vectors must match");
        PauliOperator { n: x.len(), x, z }
    }

    /// Single-qubit X at `qubit` (0-based).
    pub fn x_at(n: usize, qubit: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.set(qubit, true);
        p
    }

    /// Single-qubit Z at `qubit`.
    pub fn z_at(n: usize, qubit: usize) -> Self {
        let mut p = Self::identity(n);
        p.z.set(qubit, true);
        p
    }

    /// Single-qubit Y at `qubit`.
    pub fn y_at(n: usize, qubit: usize) -> Self {
        let mut p = Self::identity(n);
        p.x.set(qubit, true);
        p.z.set(qubit, true);
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        self.x.get(qubit)
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        self.z.get(qubit)
    }

    pub(crate) fn set_x(&mut self, qubit: usize, v: bool) {
        self.x.set(qubit, v);
    }

    pub(crate) fn set_z(&mut self, qubit: usize, v: bool) {
        self.z.set(qubit, v);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially (Y counts once).
    pub fn weight(&self) -> usize {
        (0..self.n)
            .filter(|&j| self.x.get(j) || self.z.get(j))
            .count()
    }

    /// In-place product (componentwise XOR).
    pub fn mul_assign_ref(&mut self, rhs: &PauliOperator) {
        assert_eq!(self.n, rhs.n, "qubit count mismatch in Pauli product");
        self.x.xor_assign(&rhs.x);
        self.z.xor_assign(&rhs.z);
    }

    /// Checked product, returning a dimension error on qubit-count mismatch.
    pub fn try_mul(&self, rhs: &PauliOperator) -> Result<PauliOperator> {
        if self.n != rhs.n {
            return Err(Error::Dimension(format!(
                "Pauli product on {} vs {} qubits",
                self.n, rhs.n
            )));
        }
        let mut out = self.clone();
        out.mul_assign_ref(rhs);
        Ok(out)
    }

    /// True iff the two operators commute (symplectic product is zero).
    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        assert_eq!(self.n, other.n);
        !(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// Binary encoding in the requested component order.
    pub fn to_binary(&self, format: Format) -> BinaryVector {
        let bits = match format {
            Format::Xz => self.x.concat(&self.z),
            Format::Zx => self.z.concat(&self.x),
        };
        BinaryVector { bits, format }
    }

    /// Decode a 2n-bit vector back into an operator (`op` of `bin`).
    pub fn from_binary(v: &BinaryVector) -> Result<PauliOperator> {
        if v.bits.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "operator encoding must have even length, got {}",
                v.bits.len()
            )));
        }
        let n = v.bits.len() / 2;
        let (first, second) = (v.bits.slice(0, n), v.bits.slice(n, 2 * n));
        Ok(match v.format {
            Format::Xz => PauliOperator { n, x: first, z: second },
            Format::Zx => PauliOperator { n, x: second, z: first },
        })
    }

    /// Restriction to the qubit range `[start, end)`.
    pub fn restrict(&self, start: usize, end: usize) -> PauliOperator {
        PauliOperator {
            n: end - start,
            x: self.x.slice(start, end),
            z: self.z.slice(start, end),
        }
    }

    /// Embed into a wider register with this operator's qubit 0 at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> PauliOperator {
        assert!(offset + self.n <= total);
        let mut out = PauliOperator::identity(total);
        for j in self.x.iter_ones() {
            out.x.set(offset + j, true);
        }
        for j in self.z.iter_ones() {
            out.z.set(offset + j, true);
        }
        out
    }
}

/// Extract the X or Z half of an encoded vector, respecting its format.
pub fn comp(v: &BinaryVector, which: Component) -> Result<Bits> {
    if v.bits.len() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "comp requires even length, got {}",
            v.bits.len()
        )));
    }
    let half = v.bits.len() / 2;
    let x_first = v.format == Format::Xz;
    let take_first = match which {
        Component::X => x_first,
        Component::Z => !x_first,
    };
    Ok(if take_first {
        v.bits.slice(0, half)
    } else {
        v.bits.slice(half, v.bits.len())
    })
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;

    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out.mul_assign_ref(rhs);
        out
    }
}

/// Order on the `[X|Z]` binary form; used for deterministic tie-breaking.
impl Ord for PauliOperator {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for PauliOperator {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders as e.g. "X1Z3" (1-based qubit indices) or "I" for the identity.
impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for j in 0..self.n {
            let c = match (self.x.get(j), self.z.get(j)) {
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
                (false, false) => continue,
            };
            write!(f, "{}{}", c, j + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses the `Display` form. The qubit count must be supplied separately via
/// [`PauliOperator::parse`] since "X1" alone does not determine it.
impl PauliOperator {
    pub fn parse(s: &str, n: usize) -> Result<PauliOperator> {
        let mut out = PauliOperator::identity(n);
        if s == "I" {
            return Ok(out);
        }
        let bad = |msg: &str| Error::Parameter(format!("cannot parse Pauli {s:?}: {msg}"));
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            let (x, z) = match c {
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => return Err(bad("expected X, Y or Z")),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let idx: usize = digits.parse().map_err(|_| bad("missing qubit index"))?;
            if idx == 0 || idx > n {
                return Err(bad("qubit index out of range"));
            }
            if x {
                out.x.set(idx - 1, true);
            }
            if z {
                out.z.set(idx - 1, true);
            }
        }
        Ok(out)
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    /// Parses "1010|xz"-style strings; test fixture convenience.
    fn from_str(s: &str) -> Result<Self> {
        let (bits_str, fmt_str) = s
            .split_once('|')
            .ok_or_else(|| Error::Parameter(format!("bad binary vector {s:?}")))?;
        let format = match fmt_str {
            "xz" => Format::Xz,
            "zx" => Format::Zx,
            _ => return Err(Error::Parameter(format!("bad format tag {fmt_str:?}"))),
        };
        let bools: Vec<bool> = bits_str
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c == '1')
            .collect();
        Ok(BinaryVector {
            bits: Bits::from_bools(&bools),
            format,
        })
    }
}
