//! Exhaustive search over small elementary structures for minimal pairs
//! that one relation identifies and another separates.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::{self, bit};
use crate::canon::CanonicalForm;
use crate::equiv::{check_prepared, EquivError, Prepared, Relation, INCLUSIONS};
use crate::label::{alphabet_symbol, Label};
use crate::semantics::{configurations, Action, Lts, Mode};
use crate::structure::EventStructure;

/// Largest number of events the search accepts.
pub const SEARCH_EVENT_LIMIT: usize = 9;
/// Largest alphabet the search accepts.
pub const SEARCH_LABEL_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{0} events exceed the search limit of {SEARCH_EVENT_LIMIT}")]
    SizeLimit(usize),
    #[error("alphabet size must be between 1 and {SEARCH_LABEL_LIMIT}, got {0}")]
    AlphabetSize(usize),
    #[error("no pair found with at most {0} events")]
    NoPairFound(usize),
    #[error("the structure has conflicts; source deletion needs an elementary structure")]
    NotAnEes,
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

fn check_bounds(n: usize, labels: usize) -> Result<(), SearchError> {
    if n > SEARCH_EVENT_LIMIT {
        return Err(SearchError::SizeLimit(n));
    }
    if labels == 0 || labels > SEARCH_LABEL_LIMIT {
        return Err(SearchError::AlphabetSize(labels));
    }
    Ok(())
}

/// Classes on one more event than `previous`, sorted by canonical form.
///
/// Every poset arises from a smaller one by adding a maximal element above
/// some downset, so extending each class in every way and discarding
/// repeated canonical forms is complete.
fn extend_layer(previous: &[EventStructure], labels: usize) -> Vec<EventStructure> {
    let alphabet: Vec<Label> = (0..labels).map(alphabet_symbol).collect();
    let mut found: Vec<CanonicalForm> = previous
        .par_iter()
        .flat_map_iter(|p| {
            let mut out = Vec::new();
            for d in configurations(p) {
                for l in &alphabet {
                    let mut ls = p.labels().to_vec();
                    ls.push(l.clone());
                    let mut below: Vec<u64> = p.events().map(|e| p.below(e)).collect();
                    below.push(d.mask());
                    out.push(EventStructure::from_closed_rows(ls, below, vec![0; p.len() + 1]).canonical_form());
                }
            }
            out
        })
        .collect();
    found.par_sort_unstable();
    found.dedup();
    found.into_iter().map(|cf| cf.decode()).collect()
}

/// Representatives of all labelled posets with `0..=n` events, one list per size.
pub fn poset_layers(n: usize, labels: usize) -> Result<Vec<Vec<EventStructure>>, SearchError> {
    check_bounds(n, labels)?;
    let mut layers = vec![vec![EventStructure::empty()]];
    for _ in 1..=n {
        let next = extend_layer(layers.last().unwrap(), labels);
        layers.push(next);
    }
    Ok(layers)
}

/// One representative per isomorphism class of labelled posets on exactly `n` events.
pub fn enumerate_posets(n: usize, labels: usize) -> Result<Vec<EventStructure>, SearchError> {
    Ok(poset_layers(n, labels)?.pop().unwrap())
}

/// Canonical forms of the structures left after deleting each minimal
/// event, sorted.
pub fn source_deleted_multiset(s: &EventStructure) -> Result<Vec<CanonicalForm>, SearchError> {
    if !s.is_ees() {
        return Err(SearchError::NotAnEes);
    }
    let all = s.all_events();
    let mut out: Vec<CanonicalForm> =
        bits::iter(s.minimal_events()).map(|e| s.restrict(all & !bit(e)).canonical_form()).collect();
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Pairs related by `coarse` but not by `fine`.
    Separate { coarse: Relation, fine: Relation },
    /// Non-isomorphic pairs with equal source-deleted multisets.
    SourceDeleted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSpec {
    pub max_events: usize,
    pub labels: usize,
    pub criterion: Criterion,
    /// Bucket by invariants the coarse relation implies; when off, every
    /// class of a size is compared with every other.
    pub filters: bool,
    /// Also require equal source-deleted multisets.
    pub sdm_filter: bool,
}

impl SearchSpec {
    pub fn new(coarse: Relation, fine: Relation, max_events: usize, labels: usize) -> Self {
        SearchSpec {
            max_events,
            labels,
            criterion: Criterion::Separate { coarse, fine },
            filters: true,
            sdm_filter: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeStats {
    pub size: usize,
    pub classes: usize,
    pub buckets: usize,
    pub largest_bucket: usize,
    pub compared_pairs: usize,
    pub found: usize,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub spec: SearchSpec,
    /// Size of every returned pair.
    pub size: usize,
    /// Ordered by the canonical forms of left, then right.
    pub pairs: Vec<(EventStructure, EventStructure)>,
    /// One entry per size examined, including the one where pairs were found.
    pub stats: Vec<SizeStats>,
}

impl SearchOutcome {
    /// Human-readable minimality certificate.
    pub fn certificate(&self) -> String {
        let mut out = String::new();
        let what = match self.spec.criterion {
            Criterion::Separate { coarse, fine } => format!("related by {coarse}, not related by {fine}"),
            Criterion::SourceDeleted => "non-isomorphic with equal source-deleted multisets".to_string(),
        };
        out.push_str(&format!("criterion: {what}\n"));
        out.push_str(&format!(
            "alphabet size: {}; invariant buckets: {}; source-deleted filter: {}\n",
            self.spec.labels,
            if self.spec.filters { "on" } else { "off" },
            if self.spec.sdm_filter { "on" } else { "off" }
        ));
        for s in &self.stats {
            out.push_str(&format!(
                "size {}: {} classes, {} buckets (largest {}), {} pairs compared, {} found{}\n",
                s.size,
                s.classes,
                s.buckets,
                s.largest_bucket,
                s.compared_pairs,
                s.found,
                if s.size < self.size { ", exhausted" } else { "" }
            ));
        }
        out.push_str(&format!(
            "no pair exists below {} events; {} pair(s) found at {} events\n",
            self.size,
            self.pairs.len(),
            self.size
        ));
        out
    }
}

fn hash_of(value: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// Equal for transition systems with equal trace languages.
fn language_hash(lts: &Lts) -> u64 {
    fn go(lts: &Lts, set: Vec<usize>, memo: &mut HashMap<Vec<usize>, u64>) -> u64 {
        if let Some(&h) = memo.get(&set) {
            return h;
        }
        let mut next: BTreeMap<&Action, Vec<usize>> = BTreeMap::new();
        for &s in &set {
            for t in lts.outgoing(s) {
                next.entry(&t.action).or_default().push(t.target);
            }
        }
        let parts: Vec<(u64, u64)> = next
            .into_iter()
            .map(|(a, mut targets)| {
                targets.sort_unstable();
                targets.dedup();
                (hash_of(a), go(lts, targets, memo))
            })
            .collect();
        let h = hash_of(&parts);
        memo.insert(set, h);
        h
    }
    go(lts, vec![lts.initial()], &mut HashMap::new())
}

/// Equal for bisimilar transition systems.
fn bisimulation_hash(lts: &Lts) -> u64 {
    let n = lts.states().len();
    let mut h = vec![0u64; n];
    // States are ordered by size, and transitions only go to larger ones.
    for s in (0..n).rev() {
        let mut parts: Vec<(u64, u64)> = lts.outgoing(s).iter().map(|t| (hash_of(&t.action), h[t.target])).collect();
        parts.sort_unstable();
        parts.dedup();
        h[s] = hash_of(&parts);
    }
    h[lts.initial()]
}

/// Relations implied by `r`, including `r`.
fn implied(r: Relation) -> Vec<Relation> {
    let mut out = vec![r];
    let mut i = 0;
    while i < out.len() {
        for &(finer, coarser) in &INCLUSIONS {
            if finer == out[i] && !out.contains(&coarser) {
                out.push(coarser);
            }
        }
        i += 1;
    }
    out
}

/// On finite elementary structures these all coincide with isomorphism.
const ISO_CLASS: [Relation; 6] = [Relation::Pt, Relation::Pb, Relation::Whb, Relation::Hb, Relation::Hhb, Relation::Iso];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum KeyPart {
    Number(u64),
    Codes(Vec<CanonicalForm>),
}

/// Invariants of `s` that any two `coarse`-related structures share.
fn bucket_key(s: &EventStructure, spec: &SearchSpec) -> Vec<KeyPart> {
    let mut key = vec![KeyPart::Number(s.len() as u64)];
    if spec.sdm_filter || spec.criterion == Criterion::SourceDeleted {
        key.push(KeyPart::Codes(source_deleted_multiset(s).expect("posets are elementary")));
    }
    let Criterion::Separate { coarse, .. } = spec.criterion else {
        return key;
    };
    if !spec.filters {
        return key;
    }
    key.push(KeyPart::Number(hash_of(s.label_multiset())));
    if ISO_CLASS.contains(&coarse) {
        key.push(KeyPart::Number(configurations(s).len() as u64));
        key.push(KeyPart::Codes(vec![s.canonical_form()]));
        return key;
    }
    let p = Prepared::new(s.clone()).expect("search structures are small");
    for r in implied(coarse) {
        let h = match r {
            Relation::It => language_hash(p.lts(Mode::Interleaving)),
            Relation::St => language_hash(p.lts(Mode::Step)),
            Relation::Ib => bisimulation_hash(p.lts(Mode::Interleaving)),
            Relation::Sb => bisimulation_hash(p.lts(Mode::Step)),
            _ => continue,
        };
        key.push(KeyPart::Number(h));
    }
    key
}

fn pair_matches(spec: &SearchSpec, a: &Prepared, b: &Prepared) -> Result<bool, EquivError> {
    match spec.criterion {
        Criterion::SourceDeleted => Ok(true),
        Criterion::Separate { coarse, fine } => {
            Ok(check_prepared(coarse, a, b, false)?.related && !check_prepared(fine, a, b, false)?.related)
        }
    }
}

/// Searches sizes `1..=max_events` in order and returns every pair at the
/// first size that has one.
pub fn find_minimal_pairs(spec: &SearchSpec) -> Result<SearchOutcome, SearchError> {
    check_bounds(spec.max_events, spec.labels)?;
    let mut stats = Vec::new();
    let mut layer = vec![EventStructure::empty()];
    for size in 1..=spec.max_events {
        layer = extend_layer(&layer, spec.labels);
        let keys: Vec<Vec<KeyPart>> = layer.par_iter().map(|s| bucket_key(s, spec)).collect();
        let mut buckets: BTreeMap<Vec<KeyPart>, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            buckets.entry(k).or_default().push(i);
        }
        let groups: Vec<Vec<usize>> = buckets.into_values().filter(|m| m.len() > 1).collect();
        let compared: usize = groups.iter().map(|m| m.len() * (m.len() - 1) / 2).sum();
        let largest = groups.iter().map(Vec::len).max().unwrap_or(1);
        let found: Vec<(usize, usize)> = groups
            .par_iter()
            .map(|members| -> Result<Vec<(usize, usize)>, EquivError> {
                let prepared: Vec<Prepared> = members
                    .iter()
                    .map(|&i| Prepared::new(layer[i].clone()).expect("search structures are small"))
                    .collect();
                let mut out = Vec::new();
                for i in 0..members.len() {
                    for j in i + 1..members.len() {
                        if pair_matches(spec, &prepared[i], &prepared[j])? {
                            out.push((members[i], members[j]));
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        stats.push(SizeStats {
            size,
            classes: layer.len(),
            buckets: groups.len(),
            largest_bucket: largest,
            compared_pairs: compared,
            found: 0,
        });
        if !found.is_empty() {
            let mut pairs = found;
            pairs.sort_unstable();
            stats.last_mut().unwrap().found = pairs.len();
            let pairs = pairs.into_iter().map(|(i, j)| (layer[i].clone(), layer[j].clone())).collect();
            return Ok(SearchOutcome { spec: *spec, size, pairs, stats });
        }
    }
    Err(SearchError::NoPairFound(spec.max_events))
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.certificate())
    }
}
