//! Integer partitions: the keys of Weingarten tables and the half-types of
//! commutator cycle structures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("malformed partition {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("partition {0} has zero or is empty")]
    Invalid(String),
}

/// Nonincreasing list of positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self, PartitionError> {
        if parts.contains(&0) {
            return Err(PartitionError::Invalid(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// `1^k`, the identity class.
    pub fn ones(k: usize) -> Self {
        Partition { parts: vec![1; k] }
    }

    /// The given long parts padded with 1s up to weight `k`, e.g. `padded(&[2], 5)` is
    /// `2,1,1,1`. `None` when the long parts already exceed `k`.
    pub fn padded(long_parts: &[usize], k: usize) -> Option<Self> {
        let used: usize = long_parts.iter().sum();
        if used > k {
            return None;
        }
        let mut parts = long_parts.to_vec();
        parts.extend(std::iter::repeat_n(1, k - used));
        Partition::new(parts).ok()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_ones(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    /// Multiplicity of parts equal to `length`.
    pub fn multiplicity(&self, length: usize) -> usize {
        self.parts.iter().filter(|&&p| p == length).count()
    }

    /// Remove one part equal to 1, if present.
    pub fn without_one(&self) -> Option<Self> {
        let pos = self.parts.iter().rposition(|&p| p == 1)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(Partition { parts })
    }

    /// Dash-joined parts, the key format of the on-disk Weingarten cache (`2-1-1`).
    pub fn dash_key(&self) -> String {
        join(&self.parts, "-")
    }

    pub fn from_dash_key(s: &str) -> Result<Self, PartitionError> {
        parse_parts(s, '-')
    }

    /// Exponential notation, e.g. `2^1 1^3`.
    pub fn exponent_notation(&self) -> String {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.parts.len() {
            let p = self.parts[i];
            let m = self.multiplicity(p);
            out.push(format!("{p}^{m}"));
            i += m;
        }
        if out.is_empty() {
            "∅".into()
        } else {
            out.join(" ")
        }
    }

    /// Pack into a `u32`: 4 bits of multiplicity per part length `1..=8`. Only valid for
    /// weights up to 8; used as a cheap map key in the enumeration hot loops.
    pub fn code(&self) -> PartitionCode {
        let mut c = 0u32;
        for &p in &self.parts {
            c += 1 << (4 * (p - 1));
        }
        PartitionCode(c)
    }

    pub fn from_code(code: PartitionCode) -> Self {
        let mut parts = Vec::new();
        for len in (1..=8usize).rev() {
            let m = (code.0 >> (4 * (len - 1))) & 0xF;
            parts.extend(std::iter::repeat_n(len, m as usize));
        }
        Partition { parts }
    }

    /// All partitions of `k`, in reverse lexicographic order (`k`, `k-1,1`, …, `1^k`).
    pub fn all(k: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, k, &mut Vec::new(), &mut out);
        out
    }
}

/// Packed multiplicity vector, see [`Partition::code`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionCode(pub u32);

fn join(parts: &[usize], sep: &str) -> String {
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(sep)
}

fn parse_parts(s: &str, sep: char) -> Result<Partition, PartitionError> {
    let err = |reason: &str| PartitionError::Parse { text: s.to_string(), reason: reason.to_string() };
    if s.trim().is_empty() {
        return Err(err("empty"));
    }
    let parts = s
        .split(sep)
        .map(|t| t.trim().parse::<usize>().map_err(|_| err(&format!("{t:?} is not a positive integer"))))
        .collect::<Result<Vec<_>, _>>()?;
    if parts.contains(&0) {
        return Err(err("parts must be positive"));
    }
    Partition::new(parts)
}

/// Comma-separated parts with every 1 spelled out: `3,1,1`.
impl FromStr for Partition {
    type Err = PartitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_parts(s, ',')
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join(&self.parts, ","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.dash_key())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Partition::from_dash_key(&s).map_err(serde::de::Error::custom)
    }
}
