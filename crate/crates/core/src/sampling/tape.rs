use rand::RngCore;
use rug::integer::Order;
use rug::Integer;

use crate::error::SamplingError;

/// A finite bit string read front to back.
///
/// Bits are numbered from the most significant bit of the first byte. A block
/// of `k` bits is interpreted as a big-endian unsigned integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomTape {
    bytes: Vec<u8>,
    len_bits: usize,
    cursor: usize,
}

impl RandomTape {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len_bits = bytes.len() * 8;
        Self {
            bytes,
            len_bits,
            cursor: 0,
        }
    }

    /// Uses only the first `len_bits` bits of `bytes`.
    pub fn with_len(bytes: Vec<u8>, len_bits: usize) -> Result<Self, SamplingError> {
        if len_bits > bytes.len() * 8 {
            return Err(SamplingError::TapeExhausted {
                needed: len_bits,
                offset: 0,
                len: bytes.len() * 8,
            });
        }
        Ok(Self {
            bytes,
            len_bits,
            cursor: 0,
        })
    }

    pub fn from_hex(hex_str: &str) -> Result<Self, SamplingError> {
        let bytes = hex::decode(hex_str.trim())
            .map_err(|e| SamplingError::InvalidParameter(format!("tape hex: {e}")))?;
        Ok(Self::from_bytes(bytes))
    }

    pub fn from_rng<R: RngCore + ?Sized>(rng: &mut R, bits: usize) -> Self {
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self {
            bytes,
            len_bits: bits,
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.len_bits - self.cursor
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    fn check(&self, offset: usize, bits: usize) -> Result<(), SamplingError> {
        if offset.checked_add(bits).is_none_or(|end| end > self.len_bits) {
            return Err(SamplingError::TapeExhausted {
                needed: bits,
                offset,
                len: self.len_bits,
            });
        }
        Ok(())
    }

    /// Reads `bits` bits starting at absolute position `offset` without
    /// moving the cursor.
    pub fn bits_at(&self, offset: usize, bits: usize) -> Result<Integer, SamplingError> {
        self.check(offset, bits)?;
        if bits == 0 {
            return Ok(Integer::new());
        }
        let first = offset / 8;
        let last = (offset + bits - 1) / 8;
        let mut value = Integer::from_digits(&self.bytes[first..=last], Order::MsfBe);
        let trailing = (last + 1) * 8 - (offset + bits);
        value >>= trailing as u32;
        value.keep_bits_mut(bits as u32);
        Ok(value)
    }

    pub fn read(&mut self, bits: usize) -> Result<Integer, SamplingError> {
        let value = self.bits_at(self.cursor, bits)?;
        self.cursor += bits;
        Ok(value)
    }

    pub fn skip(&mut self, bits: usize) -> Result<(), SamplingError> {
        self.check(self.cursor, bits)?;
        self.cursor += bits;
        Ok(())
    }

    /// Claims the next `bits` bits as an independent tape and advances past them.
    pub fn split_off(&mut self, bits: usize) -> Result<RandomTape, SamplingError> {
        self.check(self.cursor, bits)?;
        let start = self.cursor;
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        let mut pos = 0;
        while pos < bits {
            let chunk = (bits - pos).min(64);
            let v = self.bits_at(start + pos, chunk)?.to_u64().unwrap_or(0) << (64 - chunk);
            let be = v.to_be_bytes();
            for (i, b) in be.iter().enumerate().take(chunk.div_ceil(8)) {
                bytes[pos / 8 + i] |= b;
            }
            pos += chunk;
        }
        self.cursor += bits;
        Ok(RandomTape {
            bytes,
            len_bits: bits,
            cursor: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_msb_first() {
        let mut tape = RandomTape::from_bytes(vec![0b1010_0000, 0xff]);
        assert_eq!(tape.read(1).unwrap(), 1);
        assert_eq!(tape.read(3).unwrap(), 0b010);
        assert_eq!(tape.read(8).unwrap(), 0b0000_1111);
        assert_eq!(tape.remaining(), 4);
        assert!(tape.read(5).is_err());
        assert_eq!(tape.read(4).unwrap(), 0xf);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let mut tape = RandomTape::from_bytes(vec![0]);
        let err = tape.read(9).unwrap_err();
        assert!(matches!(err, SamplingError::TapeExhausted { needed: 9, .. }));
        assert_eq!(tape.cursor(), 0);
    }

    #[test]
    fn wide_reads_span_bytes() {
        let bytes: Vec<u8> = (0u8..32).collect();
        let tape = RandomTape::from_bytes(bytes.clone());
        let all = tape.bits_at(0, 256).unwrap();
        assert_eq!(all, Integer::from_digits(&bytes, Order::MsfBe));
        let mid = tape.bits_at(4, 140).unwrap();
        let shifted: Integer = all >> (256 - 144);
        assert_eq!(mid, shifted.keep_bits(140));
    }

    #[test]
    fn split_off_matches_direct_reads() {
        let bytes: Vec<u8> = (0u8..40).map(|b| b.wrapping_mul(37)).collect();
        let mut tape = RandomTape::from_bytes(bytes);
        tape.skip(3).unwrap();
        let sub = tape.split_off(201).unwrap();
        assert_eq!(tape.cursor(), 204);
        assert_eq!(sub.len(), 201);
        let orig = RandomTape::from_bytes(tape.as_bytes().to_vec());
        assert_eq!(sub.bits_at(0, 201).unwrap(), orig.bits_at(3, 201).unwrap());
        assert_eq!(sub.bits_at(77, 100).unwrap(), orig.bits_at(80, 100).unwrap());
    }
}
