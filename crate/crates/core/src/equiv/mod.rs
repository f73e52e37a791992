//! Deciding the ten equivalences between two finite structures.

mod bisim;
mod history;
mod matrix;
mod traces;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::semantics::{self, Action, Configuration, Lts, Mode, PomsetCode, SemanticsError, LTS_EVENT_LIMIT};
use crate::structure::{EventId, EventStructure};

pub use bisim::bisim;
pub use history::{hb_equiv, hhb_equiv, whb_equiv};
pub use matrix::{
    check, check_prepared, compute_matrix, consistency_violation, full_matrix, full_matrix_prepared, MatrixOptions, VerdictMatrix,
    INCLUSIONS,
};
pub use traces::{pomset_trace_equiv, trace_equiv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    It,
    St,
    Ib,
    Pt,
    Sb,
    Whb,
    Pb,
    Hb,
    Hhb,
    Iso,
}

impl Relation {
    /// Coarsest first, the order used for printing.
    pub const ALL: [Relation; 10] = [
        Relation::It,
        Relation::St,
        Relation::Ib,
        Relation::Pt,
        Relation::Sb,
        Relation::Whb,
        Relation::Pb,
        Relation::Hb,
        Relation::Hhb,
        Relation::Iso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::It => "it",
            Relation::St => "st",
            Relation::Ib => "ib",
            Relation::Pt => "pt",
            Relation::Sb => "sb",
            Relation::Whb => "whb",
            Relation::Pb => "pb",
            Relation::Hb => "hb",
            Relation::Hhb => "hhb",
            Relation::Iso => "iso",
        }
    }

    pub fn index(self) -> usize {
        Relation::ALL.iter().position(|&r| r == self).unwrap()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown relation `{0}` (expected one of it, st, ib, pt, sb, whb, pb, hb, hhb, iso)")]
pub struct UnknownRelation(pub String);

impl FromStr for Relation {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Relation::ALL.into_iter().find(|r| r.name() == lower).ok_or(UnknownRelation(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("cannot compare a {0} transition system with a {1} one")]
    ModeMismatch(Mode, Mode),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("verdicts contradict a proven inclusion: {finer} holds but {coarser} does not")]
    SpectrumViolation { finer: Relation, coarser: Relation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A move one player makes that the other cannot answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenge {
    pub side: Side,
    pub action: Action,
    pub target: Configuration,
}

/// `(X, Y, f)` with `f` an isomorphism between the posets of `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HpTriple {
    pub left: Configuration,
    pub right: Configuration,
    pub map: Vec<(EventId, EventId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Related configuration pairs reachable from `(∅, ∅)`.
    Relation(Vec<(Configuration, Configuration)>),
    /// Surviving triples reachable from the empty triple, up to swapping
    /// interchangeable events.
    Triples(Vec<HpTriple>),
    /// A shortest trace only one side can perform.
    Trace { trace: Vec<Action>, side: Side },
    /// A pomset of one side only.
    Pomset { pomset: PomsetCode, side: Side },
    /// A position where the attacker wins with `challenge`.
    Position { left: Configuration, right: Configuration, challenge: Challenge },
    /// `map[e]` is the image of `e`.
    Isomorphism(Vec<EventId>),
}

fn write_trace(f: &mut fmt::Formatter<'_>, trace: &[Action]) -> fmt::Result {
    if trace.is_empty() {
        return f.write_str("(empty)");
    }
    for (i, a) in trace.iter().enumerate() {
        write!(f, "{}{a}", if i > 0 { " . " } else { "" })?;
    }
    Ok(())
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Relation(pairs) => {
                writeln!(f, "relation with {} pairs:", pairs.len())?;
                for (x, y) in pairs {
                    writeln!(f, "  {x} ~ {y}")?;
                }
                Ok(())
            }
            Witness::Triples(triples) => {
                writeln!(f, "relation with {} triples (up to interchangeable events):", triples.len())?;
                for t in triples {
                    write!(f, "  {} ~ {} via [", t.left, t.right)?;
                    for (i, (a, b)) in t.map.iter().enumerate() {
                        write!(f, "{}e{a}->e{b}", if i > 0 { ", " } else { "" })?;
                    }
                    writeln!(f, "]")?;
                }
                Ok(())
            }
            Witness::Trace { trace, side } => {
                write!(f, "only the {side} side can perform: ")?;
                write_trace(f, trace)?;
                writeln!(f)
            }
            Witness::Pomset { pomset, side } => writeln!(f, "only the {side} side has a configuration with pomset {pomset}"),
            Witness::Position { left, right, challenge } => writeln!(
                f,
                "at ({left}, {right}) the {} side plays {} to {}, which cannot be matched",
                challenge.side, challenge.action, challenge.target
            ),
            Witness::Isomorphism(map) => {
                write!(f, "isomorphism:")?;
                for (e, img) in map.iter().enumerate() {
                    write!(f, " e{e}->e{img}")?;
                }
                writeln!(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub related: bool,
    pub witness: Option<Witness>,
}

/// Interchangeable events: same label and relations, so swapping any two
/// of a class is an automorphism.
#[derive(Debug, Clone)]
pub(crate) struct Twins {
    class_of: Vec<usize>,
    members: Vec<Vec<EventId>>,
}

impl Twins {
    fn of(s: &EventStructure) -> Twins {
        let twins = |a: EventId, b: EventId| {
            s.label(a) == s.label(b)
                && s.below(a) == s.below(b)
                && s.above(a) == s.above(b)
                && s.conflicts_with(a) & !crate::bits::bit(b) == s.conflicts_with(b) & !crate::bits::bit(a)
        };
        let mut members: Vec<Vec<EventId>> = Vec::new();
        let mut class_of = Vec::with_capacity(s.len());
        for e in s.events() {
            match members.iter().position(|m| m.iter().all(|&o| twins(o, e))) {
                Some(c) => {
                    members[c].push(e);
                    class_of.push(c);
                }
                None => {
                    class_of.push(members.len());
                    members.push(vec![e]);
                }
            }
        }
        Twins { class_of, members }
    }
}

/// A structure with its configurations and lazily built semantic data.
#[derive(Debug)]
pub struct Prepared {
    structure: EventStructure,
    configurations: Vec<Configuration>,
    index: HashMap<u64, usize>,
    codes: OnceLock<Vec<PomsetCode>>,
    lts: [OnceLock<Lts>; 3],
    twins: OnceLock<Twins>,
}

impl Prepared {
    pub fn new(structure: EventStructure) -> Result<Prepared, SemanticsError> {
        if structure.len() > LTS_EVENT_LIMIT {
            return Err(SemanticsError::SizeLimit(structure.len()));
        }
        let configurations = semantics::configurations(&structure);
        let index = configurations.iter().enumerate().map(|(i, c)| (c.mask(), i)).collect();
        Ok(Prepared {
            structure,
            configurations,
            index,
            codes: OnceLock::new(),
            lts: Default::default(),
            twins: OnceLock::new(),
        })
    }

    pub fn structure(&self) -> &EventStructure {
        &self.structure
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configurations
    }

    pub fn configuration_index(&self, x: Configuration) -> Option<usize> {
        self.index.get(&x.mask()).copied()
    }

    /// Pomset code of each configuration, in configuration order.
    pub fn codes(&self) -> &[PomsetCode] {
        self.codes.get_or_init(|| {
            self.configurations.iter().map(|x| semantics::pomset_code_of_set(&self.structure, x.mask())).collect()
        })
    }

    pub fn code(&self, x: Configuration) -> &PomsetCode {
        &self.codes()[self.index[&x.mask()]]
    }

    pub fn lts(&self, mode: Mode) -> &Lts {
        let slot = match mode {
            Mode::Interleaving => 0,
            Mode::Step => 1,
            Mode::Pomset => 2,
        };
        self.lts[slot].get_or_init(|| semantics::build_lts(&self.structure, mode).expect("size checked in new"))
    }

    pub(crate) fn twins(&self) -> &Twins {
        self.twins.get_or_init(|| Twins::of(&self.structure))
    }
}
