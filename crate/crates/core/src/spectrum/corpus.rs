use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits;
use crate::label::{alphabet_symbol, Label};
use crate::structure::{BuildError, EventId, EventStructure, StructureClass};

const RETRIES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub class: StructureClass,
    pub min_size: usize,
    pub max_size: usize,
    /// Alphabet size; 1 labels every event alike.
    pub labels: usize,
    /// Probability of a direct cause between two events, ignored for coherence spaces.
    pub causality: f64,
    /// Probability of a direct conflict between two eligible events, ignored
    /// for elementary structures.
    pub conflict: f64,
    pub count: usize,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(class: StructureClass, max_size: usize, labels: usize, seed: u64) -> Self {
        CorpusSpec { class, min_size: 1, max_size, labels, causality: 0.3, conflict: 0.3, count: 100, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("no valid structure after {RETRIES} attempts; lower the densities")]
    UnsatisfiableSpec,
    #[error("invalid corpus specification: {0}")]
    InvalidSpec(String),
}

fn validate(spec: &CorpusSpec) -> Result<(), CorpusError> {
    let bad = |m: &str| Err(CorpusError::InvalidSpec(m.to_string()));
    if spec.min_size > spec.max_size {
        return bad("minimum size exceeds maximum size");
    }
    if spec.max_size > crate::semantics::LTS_EVENT_LIMIT {
        return bad("structures are limited to 30 events");
    }
    if spec.labels == 0 {
        return bad("the alphabet must not be empty");
    }
    if !(0.0..=1.0).contains(&spec.causality) || !(0.0..=1.0).contains(&spec.conflict) {
        return bad("densities must lie in [0, 1]");
    }
    Ok(())
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Label> {
    (0..n).map(|_| alphabet_symbol(rng.gen_range(0..k))).collect()
}

/// A random acyclic relation over a random vertex order.
fn random_order(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(EventId, EventId)> {
    let mut order: Vec<EventId> = (0..n).collect();
    order.shuffle(rng);
    let mut causes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                causes.push((order[i], order[j]));
            }
        }
    }
    causes
}

fn one(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> Result<EventStructure, CorpusError> {
    let n = rng.gen_range(spec.min_size..=spec.max_size);
    let labels = random_labels(rng, n, spec.labels);
    let pairs = |rng: &mut ChaCha8Rng, keep: &dyn Fn(EventId, EventId) -> bool, p: f64| {
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if keep(a, b) && rng.gen_bool(p) {
                    out.push((a, b));
                }
            }
        }
        out
    };
    let built = match spec.class {
        StructureClass::Cs => {
            let conflicts = pairs(rng, &|_, _| true, spec.conflict);
            EventStructure::build(n, labels, &[], &conflicts)
        }
        StructureClass::Ees => EventStructure::build(n, labels, &random_order(rng, n, spec.causality), &[]),
        StructureClass::Pes => {
            for _ in 0..RETRIES {
                let causes = random_order(rng, n, spec.causality);
                let order = EventStructure::build(n, labels.clone(), &causes, &[]).expect("acyclic by construction");
                let conflicts = pairs(rng, &|a, b| order.concurrent(a, b), spec.conflict);
                match EventStructure::build(n, labels.clone(), &causes, &conflicts) {
                    Ok(s) => return Ok(s),
                    Err(BuildError::SelfConflict { .. } | BuildError::CausalityConflictOverlap(..)) => continue,
                    Err(e) => panic!("unexpected build failure: {e}"),
                }
            }
            return Err(CorpusError::UnsatisfiableSpec);
        }
    };
    Ok(built.expect("generated relations are valid for the class"))
}

/// Random structures of the requested class, reproducible from the seed.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<EventStructure>, CorpusError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count).map(|_| one(&mut rng, spec)).collect()
}

#[derive(Debug, Clone)]
pub struct CorpusPair {
    pub name: String,
    pub left: EventStructure,
    pub right: EventStructure,
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<EventId> {
    let mut p: Vec<EventId> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A copy of `s` with a maximal event duplicated into a choice with itself;
/// this keeps every history preserving verdict but breaks isomorphism.
fn duplicate_maximal(rng: &mut ChaCha8Rng, s: &EventStructure) -> Option<EventStructure> {
    let maximal: Vec<EventId> = s.events().filter(|&e| s.above(e) == 0).collect();
    let &e = maximal.choose(rng)?;
    let n = s.len();
    let mut labels = s.labels().to_vec();
    labels.push(s.label(e).clone());
    let mut causes: Vec<(EventId, EventId)> = s.causality();
    causes.extend(bits::iter(s.below(e)).map(|c| (c, n)));
    let mut conflicts = s.conflict_pairs();
    conflicts.extend(bits::iter(s.conflicts_with(e)).map(|c| (c, n)));
    conflicts.push((e, n));
    EventStructure::build(n + 1, labels, &causes, &conflicts).ok()
}

/// A small random edit: flip one causal or conflict pair, or relabel an event.
fn mutate(rng: &mut ChaCha8Rng, s: &EventStructure, spec: &CorpusSpec) -> Option<EventStructure> {
    let n = s.len();
    if n < 2 {
        return None;
    }
    let (a, b) = {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        (a.min(b), a.max(b))
    };
    let mut causes = s.hasse();
    let mut conflicts = s.minimal_conflicts();
    let mut labels = s.labels().to_vec();
    let kinds: &[u8] = match spec.class {
        StructureClass::Cs => &[1, 2],
        StructureClass::Ees => &[0, 2],
        StructureClass::Pes => &[0, 1, 2],
    };
    match kinds.choose(rng)? {
        0 => {
            if let Some(i) = causes.iter().position(|&p| p == (a, b) || p == (b, a)) {
                causes.remove(i);
            } else if !s.in_conflict(a, b) {
                causes.push((a, b));
            } else {
                return None;
            }
        }
        1 => {
            if let Some(i) = conflicts.iter().position(|&p| p == (a, b)) {
                conflicts.remove(i);
            } else {
                conflicts.push((a, b));
            }
        }
        _ => labels[a] = alphabet_symbol(rng.gen_range(0..spec.labels)),
    }
    EventStructure::build(n, labels, &causes, &conflicts).ok()
}

/// Pairs mixing unrelated structures, renumbered copies, one-step edits and
/// choice duplications, so that both related and unrelated verdicts occur.
pub fn generate_pairs(spec: &CorpusSpec) -> Result<Vec<CorpusPair>, CorpusError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    while out.len() < spec.count {
        let i = out.len();
        let left = one(&mut rng, spec)?;
        let (kind, right) = match rng.gen_range(0..4) {
            0 => ("independent", Some(one(&mut rng, spec)?)),
            1 => ("renumbered", Some(left.permuted(&random_permutation(&mut rng, left.len())))),
            2 => ("edited", mutate(&mut rng, &left, spec)),
            _ if spec.class != StructureClass::Ees && left.len() < spec.max_size => {
                ("duplicated", duplicate_maximal(&mut rng, &left))
            }
            _ => ("edited", mutate(&mut rng, &left, spec)),
        };
        if let Some(right) = right {
            let right = right.permuted(&random_permutation(&mut rng, right.len()));
            out.push(CorpusPair { name: format!("{}-{i}-{kind}", spec.class.to_string().to_lowercase()), left, right });
        }
    }
    Ok(out)
}

fn chains(lengths: &[usize], labels: impl Fn(usize) -> Label) -> EventStructure {
    let n: usize = lengths.iter().sum();
    let mut causes = Vec::new();
    let mut all_labels = Vec::with_capacity(n);
    let mut next = 0;
    for &len in lengths {
        for j in 0..len {
            all_labels.push(labels(j));
            if j > 0 {
                causes.push((next + j - 1, next + j));
            }
        }
        next += len;
    }
    EventStructure::build(n, all_labels, &causes, &[]).expect("disjoint chains")
}

/// Chains of lengths 1..=k side by side, all labelled `a`.
pub fn triangle(k: usize) -> EventStructure {
    chains(&(1..=k).collect::<Vec<_>>(), |_| Label::new("a"))
}

/// `k` chains of length `d`, all labelled `a`.
pub fn grid(k: usize, d: usize) -> EventStructure {
    chains(&vec![d; k], |_| Label::new("a"))
}

/// A lone `a` beside `k` copies of `a;b`.
pub fn arow(k: usize) -> EventStructure {
    let mut lengths = vec![1];
    lengths.extend(std::iter::repeat_n(2, k));
    chains(&lengths, |j| if j == 0 { Label::new("a") } else { Label::new("b") })
}

/// `k` copies of `a;b` side by side.
pub fn abrow(k: usize) -> EventStructure {
    chains(&vec![2; k], |j| if j == 0 { Label::new("a") } else { Label::new("b") })
}
