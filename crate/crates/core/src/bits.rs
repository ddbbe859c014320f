//! Fixed-length bit strings.
//!
//! Lengths here are desk-scale (at most a few thousand bits), so a plain
//! `Vec<bool>` keeps every operation obvious and cheap to audit. Ordering is
//! lexicographic with `0 < 1`, matching the textual form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Bits(vec![true; len])
    }

    /// Big-endian decode: bit 0 of the string is the most significant bit of
    /// `value`. Enumerating `value = 0, 1, 2, ...` therefore yields strings in
    /// lexicographic order.
    pub fn from_uint_be(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_uint_be supports at most 64 bits");
        let mut bits = vec![false; len];
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = (value >> (len - 1 - i)) & 1 == 1;
        }
        Bits(bits)
    }

    /// Inverse of [`Bits::from_uint_be`].
    pub fn to_uint_be(&self) -> u64 {
        assert!(self.len() <= 64);
        self.0
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Copy with position `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                context: "xor",
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Bits(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Bits(v)
    }

    /// `self` repeated `times` times back to back.
    pub fn repeat(&self, times: usize) -> Bits {
        let mut v = Vec::with_capacity(self.len() * times);
        for _ in 0..times {
            v.extend_from_slice(&self.0);
        }
        Bits(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Bits {
        Bits(self.0[range].to_vec())
    }

    /// Zero-extend on the right to `len` (no-op if already that long).
    pub fn pad_to(&self, len: usize) -> Bits {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), false);
        Bits(v)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::OutOfRange {
                        what: "bit string",
                        detail: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        Ok(Bits(bits))
    }
}

impl std::ops::Index<usize> for Bits {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uint_round_trip_is_lexicographic() {
        let mut prev: Option<Bits> = None;
        for v in 0..16u64 {
            let b = Bits::from_uint_be(v, 4);
            assert_eq!(b.to_uint_be(), v);
            if let Some(p) = prev {
                assert!(p < b, "{p} should sort before {b}");
            }
            prev = Some(b);
        }
    }

    #[test]
    fn display_parse_round_trip() {
        let b: Bits = "010110".parse().unwrap();
        assert_eq!(b.to_string(), "010110");
        assert_eq!(b.weight(), 3);
        assert!("01x".parse::<Bits>().is_err());
    }

    #[test]
    fn xor_checks_lengths() {
        let a = Bits::zeros(3);
        let b = Bits::zeros(4);
        assert!(a.xor(&b).is_err());
        assert_eq!(a.xor(&Bits::ones(3)).unwrap(), Bits::ones(3));
    }

    proptest! {
        #[test]
        fn xor_is_involutive(v in 0u64..1024, w in 0u64..1024) {
            let a = Bits::from_uint_be(v, 10);
            let b = Bits::from_uint_be(w, 10);
            let back = a.xor(&b).unwrap().xor(&b).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
