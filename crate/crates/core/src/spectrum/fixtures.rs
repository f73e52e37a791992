use crate::algebra::structure_of;
use crate::equiv::{Relation, VerdictMatrix};
use crate::io::parse_es;
use crate::structure::{EventStructure, StructureClass};

use Relation::*;

pub const N_SHAPE: &str = include_str!("../../fixtures/n-shape.es");
pub const EIGHT_LEFT: &str = include_str!("../../fixtures/eight-left.es");
pub const EIGHT_RIGHT: &str = include_str!("../../fixtures/eight-right.es");
pub const DIAMOND_FIVE: &str = include_str!("../../fixtures/diamond-five.es");

/// A pair with known verdicts.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub left: EventStructure,
    pub right: EventStructure,
    pub expected: VerdictMatrix,
    /// What the pair separates, in words.
    pub source: &'static str,
}

impl Fixture {
    /// Whether both sides belong to `class`.
    pub fn in_class(&self, class: StructureClass) -> bool {
        self.left.classify().contains(&class) && self.right.classify().contains(&class)
    }
}

fn expr(text: &str) -> EventStructure {
    structure_of(text).expect("builtin expression compiles")
}

fn file(text: &str) -> EventStructure {
    parse_es(text).expect("builtin fixture parses")
}

/// Every relation except those listed.
fn all_but(failing: &[Relation]) -> VerdictMatrix {
    let holding: Vec<Relation> = Relation::ALL.into_iter().filter(|r| !failing.contains(r)).collect();
    VerdictMatrix::holding(&holding)
}

pub fn builtin_fixtures() -> Vec<Fixture> {
    let example = expr("(a||b)+(a;b)");
    vec![
        Fixture {
            name: "u-t-b",
            left: expr("a+(a||a)"),
            right: expr("a||a"),
            expected: VerdictMatrix::holding(&[It, St, Pt]),
            source: "one-label coherence spaces with traces {e, a, aa} where a choice gets stuck",
        },
        Fixture {
            name: "u-h-hh",
            left: expr("a||(a+(a||a))"),
            right: expr("(a||(a+(a||a)))+(a||a)"),
            expected: all_but(&[Hhb, Iso]),
            source: "coherence spaces separated only by backtracking",
        },
        Fixture {
            name: "hhp-isom",
            left: expr("a"),
            right: expr("a+a"),
            expected: all_but(&[Iso]),
            source: "a single event against a choice between two copies",
        },
        Fixture {
            name: "i-s",
            left: expr("a;a"),
            right: expr("a||a"),
            expected: VerdictMatrix::holding(&[It, Ib]),
            source: "one-label sequence against parallel composition",
        },
        Fixture {
            name: "it-ib",
            left: expr("(a||b);(a||b)"),
            right: expr("(a;b)||(b;a)"),
            expected: VerdictMatrix::holding(&[It]),
            source: "two-label elementary structures with the same thirteen interleaving traces",
        },
        Fixture {
            name: "st-i",
            left: file(N_SHAPE),
            right: expr("(a;b)||(a;b)"),
            expected: VerdictMatrix::holding(&[It, St]),
            source: "elementary structures with equal step traces but no interleaving bisimulation",
        },
        Fixture {
            name: "s-hh",
            left: file(EIGHT_LEFT),
            right: file(EIGHT_RIGHT),
            expected: VerdictMatrix::holding(&[It, Ib, St, Sb]),
            source: "eight-event one-label elementary structures that are step bisimilar but not isomorphic",
        },
        Fixture {
            name: "pes-isom",
            right: example.permuted(&[3, 1, 0, 2]),
            left: example,
            expected: all_but(&[]),
            source: "a small structure with conflict, causality and concurrency against a renumbered copy",
        },
    ]
}
