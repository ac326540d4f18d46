//! Packed bit vectors.
//!
//! The packing convention is fixed by the wire and file formats: 8 bits per
//! byte, most-significant bit first, final byte zero-padded. `BitVec` stores
//! bits in exactly that layout so serialization is a byte copy.

use rand::Rng;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct BitVec {
    bytes: Vec<u8>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// All-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            bytes: vec![0u8; len.div_ceil(8)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, f(i));
        }
        v
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill(bytes.as_mut_slice());
        let mut v = Self { bytes, len };
        v.mask_tail();
        v
    }

    /// Reinterprets packed bytes as the first `len` bits, MSB-first.
    /// Excess padding bits are cleared (lenient). Fails only if the byte
    /// slice is too short.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() < len.div_ceil(8) {
            return None;
        }
        let mut v = Self {
            bytes: bytes[..len.div_ceil(8)].to_vec(),
            len,
        };
        v.mask_tail();
        Some(v)
    }

    /// Strict variant for wire decoding: the slice must be exactly
    /// `ceil(len/8)` bytes and padding bits must be zero.
    pub fn from_bytes_strict(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let v = Self {
            bytes: bytes.to_vec(),
            len,
        };
        let mut masked = v.clone();
        masked.mask_tail();
        if masked.bytes != v.bytes {
            return None;
        }
        Some(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        let mask = 0x80 >> (i % 8);
        if v {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn push(&mut self, v: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Parity of the whole vector: true iff an odd number of bits is set.
    pub fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    /// Bitwise XOR; lengths must match.
    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "xor length mismatch");
        Self {
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xffu8 << (8 - rem);
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for b in self.iter().take(64) {
            write!(f, "{}", b as u8)?;
        }
        if self.len > 64 {
            write!(f, "… ({} bits)", self.len)?;
        }
        write!(f, "]")
    }
}

impl FromIterator<bool> for BitVec {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        let mut v = BitVec::new();
        for b in iter {
            v.push(b);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_packing() {
        // 0xA0 = 1010 0000 → first three bits (1, 0, 1)
        let v = BitVec::from_bytes(&[0xA0], 3).unwrap();
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![true, false, true]);
        assert_eq!(v.as_bytes(), &[0xA0]);
    }

    #[test]
    fn empty_vector() {
        let v = BitVec::from_bytes(&[], 0).unwrap();
        assert!(v.is_empty());
        assert_eq!(v.as_bytes().len(), 0);
    }

    #[test]
    fn strict_rejects_dirty_padding() {
        assert!(BitVec::from_bytes_strict(&[0xA1], 3).is_none());
        assert!(BitVec::from_bytes_strict(&[0xA0], 3).is_some());
        assert!(BitVec::from_bytes_strict(&[0xA0, 0x00], 3).is_none());
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..500)) {
            let v = BitVec::from_bools(&bits);
            prop_assert_eq!(v.len(), bits.len());
            let back = BitVec::from_bytes(v.as_bytes(), v.len()).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(back.iter().collect::<Vec<_>>(), bits);
        }

        #[test]
        fn xor_is_involution(bits in proptest::collection::vec(any::<(bool, bool)>(), 0..200)) {
            let a: BitVec = bits.iter().map(|p| p.0).collect();
            let b: BitVec = bits.iter().map(|p| p.1).collect();
            prop_assert_eq!(a.xor(&b).xor(&b), a);
        }
    }
}
