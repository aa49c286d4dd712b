//! Packed bit strings over GF(2).
//!
//! Message payloads, answer blocks, and store/wire encodings all share one
//! representation: bits packed most-significant-bit first into bytes, with any
//! unused low bits of the final byte held at zero. Keeping the padding zeroed
//! makes byte equality coincide with bit equality, which the transcript and
//! store round-trip checks rely on.

use std::fmt;

use rand::Rng;

/// Error returned when raw bytes cannot be reinterpreted as a bit string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PackingError {
    #[error("payload of {got} bytes cannot hold {expected_bits} bits")]
    LengthMismatch { expected_bits: u64, got: usize },
    #[error("padding bits after the final data bit must be zero")]
    NonZeroPadding,
}

/// A fixed-length sequence of bits with XOR as the group operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len_bits: usize,
    bytes: Vec<u8>,
}

/// Number of bytes needed to hold `len_bits` bits.
pub fn byte_len(len_bits: usize) -> usize {
    len_bits.div_ceil(8)
}

impl BitString {
    /// All-zero string of the given length.
    pub fn zeros(len_bits: usize) -> Self {
        Self { len_bits, bytes: vec![0; byte_len(len_bits)] }
    }

    /// Uniformly random string of the given length.
    pub fn random<R: Rng + ?Sized>(len_bits: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; byte_len(len_bits)];
        rng.fill(bytes.as_mut_slice());
        let mut out = Self { len_bits, bytes };
        out.clear_padding();
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set_bit(i, b);
        }
        out
    }

    /// Reinterprets packed bytes as exactly `len_bits` bits, rejecting
    /// payloads of the wrong size or with dirty padding.
    pub fn from_packed(bytes: Vec<u8>, len_bits: usize) -> Result<Self, PackingError> {
        if bytes.len() != byte_len(len_bits) {
            return Err(PackingError::LengthMismatch { expected_bits: len_bits as u64, got: bytes.len() });
        }
        let s = Self { len_bits, bytes };
        if !s.padding_is_zero() {
            return Err(PackingError::NonZeroPadding);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Packed form; padding bits in the final byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, idx: usize) -> bool {
        assert!(idx < self.len_bits, "bit index {idx} out of range for {} bits", self.len_bits);
        self.bytes[idx / 8] >> (7 - idx % 8) & 1 == 1
    }

    pub fn set_bit(&mut self, idx: usize, value: bool) {
        assert!(idx < self.len_bits, "bit index {idx} out of range for {} bits", self.len_bits);
        let mask = 1u8 << (7 - idx % 8);
        if value {
            self.bytes[idx / 8] |= mask;
        } else {
            self.bytes[idx / 8] &= !mask;
        }
    }

    pub fn flip_bit(&mut self, idx: usize) {
        let v = self.bit(idx);
        self.set_bit(idx, !v);
    }

    /// Copy of the bits in `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len_bits, "slice [{start}, {}) out of range for {} bits", start + len, self.len_bits);
        let mut out = Self::zeros(len);
        out.xor_from(0, self, start, len);
        out
    }

    /// The rightmost `len` bits.
    pub fn suffix(&self, len: usize) -> Self {
        assert!(len <= self.len_bits);
        self.slice(self.len_bits - len, len)
    }

    /// XORs `src[src_start .. src_start + len]` into `self[dest_start ..]`.
    pub fn xor_from(&mut self, dest_start: usize, src: &BitString, src_start: usize, len: usize) {
        assert!(dest_start + len <= self.len_bits && src_start + len <= src.len_bits);
        if dest_start % 8 == src_start % 8 {
            // Congruent offsets: handle the ragged head bit-by-bit, then whole bytes.
            let mut i = 0;
            while i < len && (dest_start + i) % 8 != 0 {
                let b = src.bit(src_start + i);
                if b {
                    self.flip_bit(dest_start + i);
                }
                i += 1;
            }
            let whole = (len - i) / 8;
            let d0 = (dest_start + i) / 8;
            let s0 = (src_start + i) / 8;
            for k in 0..whole {
                self.bytes[d0 + k] ^= src.bytes[s0 + k];
            }
            i += whole * 8;
            while i < len {
                if src.bit(src_start + i) {
                    self.flip_bit(dest_start + i);
                }
                i += 1;
            }
        } else {
            for i in 0..len {
                if src.bit(src_start + i) {
                    self.flip_bit(dest_start + i);
                }
            }
        }
        self.clear_padding();
    }

    /// XOR with both operands aligned at their right edges; the result is as
    /// long as the longer operand, the shorter one implicitly zero-extended on
    /// the left.
    pub fn xor_right_aligned(&self, other: &BitString) -> BitString {
        let (long, short) = if self.len_bits >= other.len_bits { (self, other) } else { (other, self) };
        let mut out = long.clone();
        out.xor_from(long.len_bits - short.len_bits, short, 0, short.len_bits);
        out
    }

    fn padding_is_zero(&self) -> bool {
        match self.len_bits % 8 {
            0 => true,
            r => self.bytes[self.bytes.len() - 1].trailing_zeros() >= 8 - r as u32,
        }
    }

    fn clear_padding(&mut self) {
        if self.len_bits % 8 != 0 {
            let keep = !0u8 << (8 - self.len_bits % 8);
            let last = self.bytes.len() - 1;
            self.bytes[last] &= keep;
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString[{}]", self.len_bits)?;
        let shown = self.len_bits.min(64);
        write!(f, " ")?;
        for i in 0..shown {
            write!(f, "{}", self.bit(i) as u8)?;
        }
        if shown < self.len_bits {
            write!(f, "..")?;
        }
        Ok(())
    }
}
