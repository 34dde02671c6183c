//! Packed bit vectors over F2.
//!
//! Everything in the decoding pipeline (Pauli components, syndromes, check
//! matrix rows, syndrome sequences) is a bit string, and table construction
//! XORs millions of them. Bits are packed into `u64` words, least significant
//! bit first, so all F2 arithmetic is word-parallel.

use std::fmt;

const WORD_BITS: usize = 64;

/// A fixed-length bit string with word-parallel XOR.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Bits::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                out.set(i, true);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// `self ^= other`; lengths must match.
    pub fn xor_assign(&mut self, other: &Bits) {
        assert_eq!(self.len, other.len, "bit length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the AND with another bit string (F2 dot product).
    pub fn dot(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len, "bit length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// Copy of the half-open bit range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Bits {
        assert!(start <= end && end <= self.len);
        let mut out = Bits::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Bits::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Hex rendering of the packed words, low word first, zero padded to the
    /// full length. Stable across runs; used as the wire form of sequences.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(nibbles);
        for i in 0..nibbles {
            let word = self.words.get(i / 16).copied().unwrap_or(0);
            let nib = (word >> ((i % 16) * 4)) & 0xf;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(s: &str, len: usize) -> Option<Bits> {
        let mut out = Bits::zeros(len);
        for (i, c) in s.chars().enumerate() {
            let nib = c.to_digit(16)? as u64;
            if nib != 0 {
                if i / 16 >= out.words.len() {
                    return None;
                }
                out.words[i / 16] |= nib << ((i % 16) * 4);
            }
        }
        if out.words.last().is_some_and(|&w| {
            let tail = len % WORD_BITS;
            tail != 0 && w >> tail != 0
        }) {
            return None;
        }
        Some(out)
    }
}

/// Lexicographic order on the bit string read from index 0 upward, with `0 < 1`.
/// Shorter strings order first when lengths differ.
impl Ord for Bits {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let diff = a ^ b;
                let first = diff.trailing_zeros();
                // Whichever has 0 at the first differing position is smaller.
                return if a >> first & 1 == 0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}
