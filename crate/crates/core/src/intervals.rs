//! Canonical finite integer sets stored as sorted disjoint intervals.
//!
//! All variable domains in the library are [`IntegerSet`]s. The canonical form
//! merges adjacent intervals, so two sets are equal as values exactly when they
//! are equal as sets of integers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite set of integers, kept as sorted, disjoint, non-adjacent
/// closed intervals `[lo..hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntegerSet {
    intervals: Vec<(i64, i64)>,
}

impl IntegerSet {
    /// The empty set.
    pub fn empty() -> Self {
        IntegerSet { intervals: Vec::new() }
    }

    /// The singleton `{v}`.
    pub fn singleton(v: i64) -> Self {
        IntegerSet { intervals: vec![(v, v)] }
    }

    /// The interval `[lo..hi]`. Errors when `lo > hi`.
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInterval(lo, hi));
        }
        Ok(IntegerSet { intervals: vec![(lo, hi)] })
    }

    /// Builds the canonical set from arbitrary (possibly overlapping,
    /// unsorted) pairs. Rejects any pair with `lo > hi`.
    pub fn normalize(pairs: &[(i64, i64)]) -> Result<Self> {
        for &(lo, hi) in pairs {
            if lo > hi {
                return Err(Error::InvalidInterval(lo, hi));
            }
        }
        let mut sorted: Vec<(i64, i64)> = pairs.to_vec();
        sorted.sort_unstable();
        let mut out: Vec<(i64, i64)> = Vec::with_capacity(sorted.len());
        for (lo, hi) in sorted {
            match out.last_mut() {
                // merge overlapping and adjacent intervals
                Some(last) if lo <= last.1.saturating_add(1) => {
                    last.1 = last.1.max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        Ok(IntegerSet { intervals: out })
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of elements.
    pub fn size(&self) -> u64 {
        self.intervals.iter().map(|&(lo, hi)| (hi - lo) as u64 + 1).sum()
    }

    pub fn min(&self) -> Option<i64> {
        self.intervals.first().map(|&(lo, _)| lo)
    }

    pub fn max(&self) -> Option<i64> {
        self.intervals.last().map(|&(_, hi)| hi)
    }

    pub fn contains(&self, v: i64) -> bool {
        self.intervals
            .binary_search_by(|&(lo, hi)| {
                if hi < v {
                    std::cmp::Ordering::Less
                } else if lo > v {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    /// Exact set intersection.
    pub fn intersect(&self, other: &IntegerSet) -> IntegerSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a_lo, a_hi) = self.intervals[i];
            let (b_lo, b_hi) = other.intervals[j];
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a_hi < b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces come out sorted and disjoint, but may be adjacent
        IntegerSet::normalize(&out).expect("intersection pieces are valid intervals")
    }

    /// Exact set union.
    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut pairs = self.intervals.clone();
        pairs.extend_from_slice(&other.intervals);
        IntegerSet::normalize(&pairs).expect("operands are valid intervals")
    }

    pub fn is_disjoint_from(&self, other: &IntegerSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Translates every element by `offset`.
    pub fn shift(&self, offset: i64) -> IntegerSet {
        IntegerSet {
            intervals: self.intervals.iter().map(|&(lo, hi)| (lo + offset, hi + offset)).collect(),
        }
    }

    /// The relation `self <=_lex other`: true iff some `d` in `self` and `e`
    /// in `other` satisfy `d <= e`, i.e. `min(self) <= max(other)`.
    /// Defined on non-empty sets only. Not antisymmetric, not transitive.
    pub fn lex_leq(&self, other: &IntegerSet) -> Result<bool> {
        match (self.min(), other.max()) {
            (Some(d), Some(e)) => Ok(d <= e),
            _ => Err(Error::EmptyLexOperand),
        }
    }

    /// Smallest element `>= x`, if any.
    pub fn least_geq(&self, x: i64) -> Option<i64> {
        for &(lo, hi) in &self.intervals {
            if hi >= x {
                return Some(lo.max(x));
            }
        }
        None
    }

    /// The interval hull `[min..max]`; empty for the empty set.
    pub fn hull(&self) -> IntegerSet {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => IntegerSet { intervals: vec![(lo, hi)] },
            _ => IntegerSet::empty(),
        }
    }

    /// Iterates over all elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|&(lo, hi)| lo..=hi)
    }
}

impl fmt::Display for IntegerSet {
    /// Renders as comma-separated items, each `a..b` or a single integer,
    /// e.g. `3..6,147..148,151..152`. The empty set renders as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "-");
        }
        for (idx, &(lo, hi)) in self.intervals.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntegerSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(IntegerSet::empty());
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            if let Some((lo, hi)) = item.split_once("..") {
                let lo: i64 = lo
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad interval bound in `{item}`")))?;
                let hi: i64 = hi
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad interval bound in `{item}`")))?;
                if lo > hi {
                    return Err(Error::InvalidInterval(lo, hi));
                }
                pairs.push((lo, hi));
            } else {
                let v: i64 =
                    item.parse().map_err(|_| Error::Parse(format!("bad integer `{item}`")))?;
                pairs.push((v, v));
            }
        }
        IntegerSet::normalize(&pairs)
    }
}

impl Serialize for IntegerSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IntegerSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
