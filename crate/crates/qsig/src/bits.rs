//! Classical bit strings.
//!
//! Keys, messages, and check values are all sequences of classical bits.
//! [`BitString`] stores one bit per byte (values 0 or 1), displays as a
//! compact `"0101"` text form, and serializes to JSON as that same string
//! so transcripts stay human-readable.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A sequence of classical bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<u8>);

impl BitString {
    /// Empty bit string.
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Build from a slice of 0/1 values.
    ///
    /// # Panics
    /// Panics if any value is not 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(
            bits.iter().all(|&b| b <= 1),
            "bit values must be 0 or 1"
        );
        Self(bits.to_vec())
    }

    /// Uniformly random string of the given length; consumes `len` draws.
    pub fn random(len: usize, rng: &mut RandomStream) -> Self {
        Self((0..len).map(|_| rng.next_bit()).collect())
    }

    /// Number of bits.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the string is empty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at `index` (0 or 1).
    pub fn bit(&self, index: usize) -> u8 {
        self.0[index]
    }

    /// Underlying bits as a slice of 0/1 bytes.
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Iterator over the bits.
    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.0.iter()
    }

    /// Number of 1 bits.
    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Copy of the half-open range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self(self.0[start..end].to_vec())
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Append a single bit.
    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1, "bit values must be 0 or 1");
        self.0.push(bit);
    }

    /// Bitwise XOR with an equal-length string.
    ///
    /// # Errors
    /// Returns [`Error::Size`] if the lengths differ.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Size {
                what: "xor operand length",
                got: other.len(),
                min: self.len(),
                max: self.len(),
            });
        }
        Ok(Self(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a ^ b)
                .collect(),
        ))
    }
}

impl Index<usize> for BitString {
    type Output = u8;

    fn index(&self, index: usize) -> &u8 {
        &self.0[index]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Format(format!(
                    "bit string may only contain '0' and '1', found {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
