use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Gen;

/// A group element, held as its ShortLex normal form.
///
/// Ordering is ShortLex: shorter words first, ties broken lexicographically
/// by generator rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GroupElement(pub(crate) Vec<Gen>);

impl GroupElement {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Wraps a word without normalising it. Callers must pass a normal form.
    pub fn from_normal_form(word: Vec<Gen>) -> Self {
        Self(word)
    }

    pub fn word(&self) -> &[Gen] {
        &self.0
    }

    /// Word length of the normal form, which is `d_S(g, 1)`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last_letter(&self) -> Option<Gen> {
        self.0.last().copied()
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite edge path `c : [start, start + len - 1] -> G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: i64,
    pub values: Vec<GroupElement>,
}

impl Segment {
    pub fn new(start: i64, values: Vec<GroupElement>) -> Self {
        Self { start, values }
    }

    pub fn first(&self) -> &GroupElement {
        &self.values[0]
    }

    pub fn last(&self) -> &GroupElement {
        self.values.last().expect("non-empty segment")
    }

    /// Number of edges.
    pub fn length(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn end_index(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    /// Value at parameter `t`, if `t` lies in the domain.
    pub fn at(&self, t: i64) -> Option<&GroupElement> {
        let i = t - self.start;
        if i < 0 {
            return None;
        }
        self.values.get(i as usize)
    }

    /// Restriction to the parameter window `[from, to]` (clamped).
    pub fn restrict(&self, from: i64, to: i64) -> Segment {
        let lo = from.max(self.start);
        let hi = to.min(self.end_index());
        if lo > hi {
            return Segment::new(lo, Vec::new());
        }
        let a = (lo - self.start) as usize;
        let b = (hi - self.start) as usize;
        Segment::new(lo, self.values[a..=b].to_vec())
    }
}
