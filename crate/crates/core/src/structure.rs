//! Labelled prime event structures.
//!
//! An [`EventStructure`] holds a finite set of events `0..n`, a label per
//! event, a strict causality order `<` and a symmetric conflict relation `#`.
//! Values are only created through [`EventStructure::build`], which closes
//! causality transitively and conflict under inheritance, so every value in
//! circulation satisfies the prime event structure axioms.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bits::{self, bit};
use crate::canon::{self, CanonicalForm};
use crate::label::Label;

/// Dense event identifier, `0..n` within one structure.
pub type EventId = usize;

/// Largest number of events a structure may hold. Event sets are `u64` masks.
pub const MAX_EVENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("event id {id} out of range for {count} events")]
    DanglingId { id: usize, count: usize },
    #[error("causality has a cycle through event {event}")]
    CycleInCausality { event: EventId },
    #[error("event {event} ends up in conflict with itself; the specification is not prime")]
    SelfConflict { event: EventId },
    #[error("events {0} and {1} are both causally ordered and in conflict")]
    CausalityConflictOverlap(EventId, EventId),
    #[error("{labels} labels given for {count} events")]
    LabelCount { labels: usize, count: usize },
    #[error("{0} events exceed the limit of {MAX_EVENTS}")]
    TooManyEvents(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureClass {
    /// Prime event structure; every valid structure is one.
    Pes,
    /// Coherence space: empty causality.
    Cs,
    /// Elementary event structure: empty conflict.
    Ees,
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureClass::Pes => "PES",
            StructureClass::Cs => "CS",
            StructureClass::Ees => "EES",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventStructure {
    labels: Vec<Label>,
    /// `below[e]`: strict causes of `e`.
    below: Vec<u64>,
    /// `above[e]`: strict consequences of `e`.
    above: Vec<u64>,
    conflict: Vec<u64>,
}

impl EventStructure {
    /// Builds a structure from possibly unclosed relations.
    ///
    /// `causes` may be any acyclic relation (a transitive reduction, the
    /// closure, or anything in between); `conflicts` may list only the
    /// minimal conflicts. Both are closed before validation.
    pub fn build(
        count: usize,
        labels: Vec<Label>,
        causes: &[(EventId, EventId)],
        conflicts: &[(EventId, EventId)],
    ) -> Result<Self, BuildError> {
        if count > MAX_EVENTS {
            return Err(BuildError::TooManyEvents(count));
        }
        if labels.len() != count {
            return Err(BuildError::LabelCount { labels: labels.len(), count });
        }
        let check = |id: usize| {
            if id < count {
                Ok(())
            } else {
                Err(BuildError::DanglingId { id, count })
            }
        };
        let mut below = vec![0u64; count];
        for &(a, b) in causes {
            check(a)?;
            check(b)?;
            below[b] |= bit(a);
        }
        // Warshall on bit rows.
        for k in 0..count {
            for row in 0..count {
                if below[row] & bit(k) != 0 {
                    below[row] |= below[k];
                }
            }
        }
        if let Some(event) = (0..count).find(|&e| bits::contains(below[e], e)) {
            return Err(BuildError::CycleInCausality { event });
        }
        let above = transpose(&below);

        let mut conflict = vec![0u64; count];
        for &(a, b) in conflicts {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(BuildError::SelfConflict { event: a });
            }
            if bits::contains(below[b], a) || bits::contains(below[a], b) {
                return Err(BuildError::CausalityConflictOverlap(a.min(b), a.max(b)));
            }
            let ups_a = above[a] | bit(a);
            let ups_b = above[b] | bit(b);
            for x in bits::iter(ups_a) {
                conflict[x] |= ups_b;
            }
            for y in bits::iter(ups_b) {
                conflict[y] |= ups_a;
            }
        }
        if let Some(event) = (0..count).find(|&e| bits::contains(conflict[e], e)) {
            return Err(BuildError::SelfConflict { event });
        }
        for e in 0..count {
            let clash = conflict[e] & (below[e] | above[e]);
            if clash != 0 {
                let other = clash.trailing_zeros() as usize;
                return Err(BuildError::CausalityConflictOverlap(e.min(other), e.max(other)));
            }
        }
        Ok(EventStructure { labels, below, above, conflict })
    }

    pub fn empty() -> Self {
        EventStructure { labels: Vec::new(), below: Vec::new(), above: Vec::new(), conflict: Vec::new() }
    }

    /// Assembles a structure from rows that are already closed and valid.
    pub(crate) fn from_closed_rows(labels: Vec<Label>, below: Vec<u64>, conflict: Vec<u64>) -> Self {
        let above = transpose(&below);
        EventStructure { labels, below, above, conflict }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn events(&self) -> std::ops::Range<EventId> {
        0..self.len()
    }

    pub fn all_events(&self) -> u64 {
        bits::full(self.len())
    }

    pub fn label(&self, e: EventId) -> &Label {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Strict causes of `e` as a mask.
    pub fn below(&self, e: EventId) -> u64 {
        self.below[e]
    }

    /// Strict consequences of `e` as a mask.
    pub fn above(&self, e: EventId) -> u64 {
        self.above[e]
    }

    /// Events in conflict with `e` as a mask.
    pub fn conflicts_with(&self, e: EventId) -> u64 {
        self.conflict[e]
    }

    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        bits::contains(self.below[b], a)
    }

    pub fn in_conflict(&self, a: EventId, b: EventId) -> bool {
        bits::contains(self.conflict[a], b)
    }

    pub fn concurrent(&self, a: EventId, b: EventId) -> bool {
        a != b && !self.precedes(a, b) && !self.precedes(b, a) && !self.in_conflict(a, b)
    }

    /// All pairs `(a, b)` with `a < b` in causality.
    pub fn causality(&self) -> Vec<(EventId, EventId)> {
        let mut pairs = Vec::new();
        for b in self.events() {
            pairs.extend(bits::iter(self.below[b]).map(|a| (a, b)));
        }
        pairs.sort_unstable();
        pairs
    }

    /// Conflict as unordered pairs `(a, b)` with `a < b` numerically.
    pub fn conflict_pairs(&self) -> Vec<(EventId, EventId)> {
        let mut pairs = Vec::new();
        for a in self.events() {
            pairs.extend(bits::iter(self.conflict[a] >> a >> 1).map(|d| (a, a + 1 + d)));
        }
        pairs
    }

    /// Unordered pairs of distinct events that are neither ordered nor in conflict.
    pub fn concurrency(&self) -> Vec<(EventId, EventId)> {
        let mut pairs = Vec::new();
        for a in self.events() {
            for b in a + 1..self.len() {
                if self.concurrent(a, b) {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Covering pairs of the causality order, i.e. its transitive reduction.
    pub fn hasse(&self) -> Vec<(EventId, EventId)> {
        let mut edges = Vec::new();
        for b in self.events() {
            let preds = self.below[b];
            // a is covered by b if no c strictly between.
            let mut indirect = 0u64;
            for c in bits::iter(preds) {
                indirect |= self.below[c];
            }
            edges.extend(bits::iter(preds & !indirect).map(|a| (a, b)));
        }
        edges.sort_unstable();
        edges
    }

    /// Conflicts not inherited from a conflict strictly below.
    pub fn minimal_conflicts(&self) -> Vec<(EventId, EventId)> {
        self.conflict_pairs()
            .into_iter()
            .filter(|&(a, b)| {
                let inherited_a = bits::iter(self.below[a]).any(|c| self.in_conflict(c, b));
                let inherited_b = bits::iter(self.below[b]).any(|c| self.in_conflict(a, c));
                !inherited_a && !inherited_b
            })
            .collect()
    }

    pub fn is_cs(&self) -> bool {
        self.below.iter().all(|&r| r == 0)
    }

    pub fn is_ees(&self) -> bool {
        self.conflict.iter().all(|&r| r == 0)
    }

    pub fn classify(&self) -> BTreeSet<StructureClass> {
        let mut tags = BTreeSet::from([StructureClass::Pes]);
        if self.is_cs() {
            tags.insert(StructureClass::Cs);
        }
        if self.is_ees() {
            tags.insert(StructureClass::Ees);
        }
        tags
    }

    /// Two distinct concurrent events carrying the same label.
    pub fn has_autoconcurrency(&self) -> bool {
        self.concurrency().into_iter().any(|(a, b)| self.labels[a] == self.labels[b])
    }

    /// Sorted multiset of labels.
    pub fn label_multiset(&self) -> Vec<Label> {
        let mut labels = self.labels.clone();
        labels.sort();
        labels
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canon::canonize(self).form
    }

    /// Decides isomorphism; on success returns `f` with `f[e]` the image of `e`.
    pub fn isomorphism(&self, other: &EventStructure) -> Option<Vec<EventId>> {
        if self.len() != other.len() || self.label_multiset() != other.label_multiset() {
            return None;
        }
        let left = canon::canonize(self);
        let right = canon::canonize(other);
        if left.form != right.form {
            return None;
        }
        // position -> event in `other`
        let mut at = vec![0; other.len()];
        for (e, &p) in right.position.iter().enumerate() {
            at[p] = e;
        }
        Some(left.position.iter().map(|&p| at[p]).collect())
    }

    pub fn is_isomorphic(&self, other: &EventStructure) -> bool {
        self.isomorphism(other).is_some()
    }

    /// Checks that `f` is a label-, order- and conflict-preserving bijection onto `other`.
    pub fn is_isomorphism(&self, other: &EventStructure, f: &[EventId]) -> bool {
        if self.len() != other.len() || f.len() != self.len() {
            return false;
        }
        let mut seen = 0u64;
        for &img in f {
            if img >= other.len() || bits::contains(seen, img) {
                return false;
            }
            seen |= bit(img);
        }
        self.events().all(|a| {
            self.labels[a] == other.labels[f[a]]
                && self.events().all(|b| {
                    self.precedes(a, b) == other.precedes(f[a], f[b])
                        && self.in_conflict(a, b) == other.in_conflict(f[a], f[b])
                })
        })
    }

    /// Relabels events by `perm`: event `e` becomes `perm[e]`.
    pub fn permuted(&self, perm: &[EventId]) -> EventStructure {
        let n = self.len();
        assert_eq!(perm.len(), n, "permutation length");
        let map_set = |set: u64| bits::iter(set).fold(0u64, |acc, e| acc | bit(perm[e]));
        let mut labels = self.labels.clone();
        let mut below = vec![0; n];
        let mut conflict = vec![0; n];
        for e in 0..n {
            labels[perm[e]] = self.labels[e].clone();
            below[perm[e]] = map_set(self.below[e]);
            conflict[perm[e]] = map_set(self.conflict[e]);
        }
        EventStructure::from_closed_rows(labels, below, conflict)
    }

    /// Replaces every label through `f`.
    pub fn relabeled(&self, mut f: impl FnMut(&Label) -> Label) -> EventStructure {
        let labels = self.labels.iter().map(&mut f).collect();
        EventStructure::from_closed_rows(labels, self.below.clone(), self.conflict.clone())
    }

    /// Sub-structure on the events of `keep`, renumbered in increasing order.
    pub fn restrict(&self, keep: u64) -> EventStructure {
        let members: Vec<EventId> = bits::iter(keep).collect();
        let mut index = [u8::MAX; MAX_EVENTS];
        for (i, &e) in members.iter().enumerate() {
            index[e] = i as u8;
        }
        let map_set = |set: u64| bits::iter(set & keep).fold(0u64, |acc, e| acc | bit(index[e] as usize));
        let labels = members.iter().map(|&e| self.labels[e].clone()).collect();
        let below = members.iter().map(|&e| map_set(self.below[e])).collect();
        let conflict = members.iter().map(|&e| map_set(self.conflict[e])).collect();
        EventStructure::from_closed_rows(labels, below, conflict)
    }

    /// Events with no strict causes.
    pub fn minimal_events(&self) -> u64 {
        self.events().filter(|&e| self.below[e] == 0).fold(0, |acc, e| acc | bit(e))
    }

    /// Disjoint union; events of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &EventStructure) -> Result<EventStructure, BuildError> {
        let n = self.len() + other.len();
        if n > MAX_EVENTS {
            return Err(BuildError::TooManyEvents(n));
        }
        let shift = self.len();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut below = self.below.clone();
        below.extend(other.below.iter().map(|&r| r << shift));
        let mut conflict = self.conflict.clone();
        conflict.extend(other.conflict.iter().map(|&r| r << shift));
        Ok(EventStructure::from_closed_rows(labels, below, conflict))
    }
}

fn transpose(rows: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; rows.len()];
    for (i, &row) in rows.iter().enumerate() {
        for j in bits::iter(row) {
            out[j] |= bit(i);
        }
    }
    out
}

impl fmt::Debug for EventStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EventStructure")
            .field("labels", &self.labels)
            .field("hasse", &self.hasse())
            .field("minimal_conflicts", &self.minimal_conflicts())
            .finish()
    }
}
