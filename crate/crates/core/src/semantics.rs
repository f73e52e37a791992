//! Configurations and the three transition systems built on them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::algebra;
use crate::bits::{self, bit};
use crate::canon::CanonicalForm;
use crate::label::Label;
use crate::structure::{EventId, EventStructure};

/// Largest structure [`build_lts`] accepts.
pub const LTS_EVENT_LIMIT: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("{0} events exceed the transition-system limit of {LTS_EVENT_LIMIT}")]
    SizeLimit(usize),
    #[error("{0} is not a configuration")]
    NotAConfiguration(Configuration),
}

/// A conflict-free, causally closed set of events, as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration(pub u64);

impl Configuration {
    pub const EMPTY: Configuration = Configuration(0);

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: EventId) -> bool {
        bits::contains(self.0, e)
    }

    pub fn events(self) -> impl Iterator<Item = EventId> {
        bits::iter(self.0)
    }

    pub fn with(self, e: EventId) -> Configuration {
        Configuration(self.0 | bit(e))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.events().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "e{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether `set` is conflict-free and closed under causes.
pub fn is_configuration(s: &EventStructure, set: u64) -> bool {
    bits::iter(set).all(|e| s.below(e) & !set == 0 && s.conflicts_with(e) & set == 0)
}

/// Events that can be added to `x` one at a time.
pub fn enabled(s: &EventStructure, x: u64) -> u64 {
    s.events()
        .filter(|&e| !bits::contains(x, e) && s.below(e) & !x == 0 && s.conflicts_with(e) & x == 0)
        .fold(0, |acc, e| acc | bit(e))
}

/// All configurations, by size and then by mask.
pub fn configurations(s: &EventStructure) -> Vec<Configuration> {
    let mut all = vec![Configuration::EMPTY];
    let mut layer = vec![0u64];
    while !layer.is_empty() {
        let mut next: Vec<u64> =
            layer.iter().flat_map(|&x| bits::iter(enabled(s, x)).map(move |e| x | bit(e))).collect();
        next.sort_unstable();
        next.dedup();
        all.extend(next.iter().map(|&m| Configuration(m)));
        layer = next;
    }
    all
}

/// The causal order restricted to a set of events, renumbered `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPoset {
    labels: Vec<Label>,
    below: Vec<u64>,
}

impl LabeledPoset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        bits::contains(self.below[b], a)
    }

    pub fn as_structure(&self) -> EventStructure {
        EventStructure::from_closed_rows(self.labels.clone(), self.below.clone(), vec![0; self.len()])
    }
}

fn restrict_order(s: &EventStructure, set: u64) -> LabeledPoset {
    let r = s.restrict(set);
    LabeledPoset { labels: r.labels().to_vec(), below: r.events().map(|e| r.below(e)).collect() }
}

pub fn poset_of(s: &EventStructure, x: Configuration) -> Result<LabeledPoset, SemanticsError> {
    if x.0 & !s.all_events() != 0 || !is_configuration(s, x.0) {
        return Err(SemanticsError::NotAConfiguration(x));
    }
    Ok(restrict_order(s, x.0))
}

/// Isomorphism class of a labelled poset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PomsetCode(CanonicalForm);

impl PomsetCode {
    pub fn size(&self) -> usize {
        self.0.event_count()
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    /// A representative poset of the class.
    pub fn representative(&self) -> LabeledPoset {
        let s = self.0.decode();
        LabeledPoset { labels: s.labels().to_vec(), below: s.events().map(|e| s.below(e)).collect() }
    }

    pub fn is_antichain(&self) -> bool {
        self.representative().below.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for PomsetCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poset = self.representative();
        if poset.is_empty() {
            return f.write_str("()");
        }
        let s = poset.as_structure();
        match algebra::decompose(&s) {
            Some(term) => write!(f, "{term}"),
            None => {
                write!(f, "[")?;
                for (i, l) in s.labels().iter().enumerate() {
                    write!(f, "{}{i}:{l}", if i > 0 { " " } else { "" })?;
                }
                for (a, b) in s.hasse() {
                    write!(f, " {a}<{b}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for PomsetCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PomsetCode({self})")
    }
}

pub fn pomset_code(p: &LabeledPoset) -> PomsetCode {
    PomsetCode(p.as_structure().canonical_form())
}

/// Code of the order restricted to `set`; `set` need not be a configuration.
pub fn pomset_code_of_set(s: &EventStructure, set: u64) -> PomsetCode {
    pomset_code(&restrict_order(s, set))
}

/// Sorted multiset of labels observed by a step.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StepLabel(Vec<Label>);

impl StepLabel {
    pub fn new(mut labels: Vec<Label>) -> Self {
        labels.sort();
        StepLabel(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            write!(f, "{}{l}", if i > 0 { "," } else { "" })?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Interleaving,
    Step,
    Pomset,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Interleaving => "interleaving",
            Mode::Step => "step",
            Mode::Pomset => "pomset",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Action {
    Label(Label),
    Step(StepLabel),
    Pomset(PomsetCode),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Label(l) => write!(f, "{l}"),
            Action::Step(s) => write!(f, "{s}"),
            Action::Pomset(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub action: Action,
    pub target: usize,
}

/// Transition system over configurations; state 0 is the empty configuration.
#[derive(Debug, Clone)]
pub struct Lts {
    mode: Mode,
    states: Vec<Configuration>,
    transitions: Vec<Transition>,
    /// Outgoing transitions of state `i` are `transitions[first[i]..first[i + 1]]`.
    first: Vec<usize>,
}

impl Lts {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn outgoing(&self, state: usize) -> &[Transition] {
        &self.transitions[self.first[state]..self.first[state + 1]]
    }

    pub fn state_index(&self, x: Configuration) -> Option<usize> {
        self.states.binary_search_by(|c| (c.len(), c.0).cmp(&(x.len(), x.0))).ok()
    }

    /// Every label sequence from the initial state. Exponential in general;
    /// meant for small structures and reporting.
    pub fn traces(&self) -> BTreeSet<Vec<Action>> {
        let mut out = BTreeSet::new();
        let mut frontier: BTreeSet<(Vec<Action>, usize)> = BTreeSet::from([(Vec::new(), 0)]);
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for (trace, state) in frontier {
                for t in self.outgoing(state) {
                    let mut longer = trace.clone();
                    longer.push(t.action.clone());
                    next.insert((longer, t.target));
                }
                out.insert(trace);
            }
            frontier = next;
        }
        out
    }
}

/// Non-empty conflict-free subsets of `candidates`, in increasing mask order.
fn steps(s: &EventStructure, candidates: u64) -> Vec<u64> {
    let members: Vec<EventId> = bits::iter(candidates).collect();
    let mut out = Vec::new();
    fn grow(s: &EventStructure, members: &[EventId], i: usize, acc: u64, out: &mut Vec<u64>) {
        if i == members.len() {
            if acc != 0 {
                out.push(acc);
            }
            return;
        }
        grow(s, members, i + 1, acc, out);
        let e = members[i];
        if s.conflicts_with(e) & acc == 0 {
            grow(s, members, i + 1, acc | bit(e), out);
        }
    }
    grow(s, &members, 0, 0, &mut out);
    out.sort_unstable();
    out
}

pub fn build_lts(s: &EventStructure, mode: Mode) -> Result<Lts, SemanticsError> {
    if s.len() > LTS_EVENT_LIMIT {
        return Err(SemanticsError::SizeLimit(s.len()));
    }
    let states = configurations(s);
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, c)| (c.0, i)).collect();
    let mut transitions = Vec::new();
    let mut first = Vec::with_capacity(states.len() + 1);
    let mut codes: HashMap<u64, PomsetCode> = HashMap::new();
    for (i, x) in states.iter().enumerate() {
        first.push(transitions.len());
        let mut out: Vec<Transition> = Vec::new();
        match mode {
            Mode::Interleaving => {
                for e in bits::iter(enabled(s, x.0)) {
                    out.push(Transition {
                        source: i,
                        action: Action::Label(s.label(e).clone()),
                        target: index[&(x.0 | bit(e))],
                    });
                }
            }
            Mode::Step => {
                for g in steps(s, enabled(s, x.0)) {
                    let labels = bits::iter(g).map(|e| s.label(e).clone()).collect();
                    out.push(Transition {
                        source: i,
                        action: Action::Step(StepLabel::new(labels)),
                        target: index[&(x.0 | g)],
                    });
                }
            }
            Mode::Pomset => {
                for (j, y) in states.iter().enumerate().skip(i + 1) {
                    if y.0 & x.0 == x.0 && y.0 != x.0 {
                        let h = y.0 & !x.0;
                        let code = codes.entry(h).or_insert_with(|| pomset_code_of_set(s, h)).clone();
                        out.push(Transition { source: i, action: Action::Pomset(code), target: j });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.target.cmp(&b.target).then_with(|| a.action.cmp(&b.action)));
        transitions.extend(out);
    }
    first.push(transitions.len());
    Ok(Lts { mode, states, transitions, first })
}
