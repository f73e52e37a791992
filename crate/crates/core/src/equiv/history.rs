//! Weak, plain and hereditary history preserving bisimulation.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Challenge, HpTriple, Prepared, Side, Twins, Verdict, Witness};
use crate::bits::{self, bit};
use crate::semantics::{enabled, Action, Configuration, SemanticsError};
use crate::structure::{EventId, EventStructure};

/// Enabled events, keeping one representative per twin class: twins outside
/// `x` are swapped by an automorphism fixing `x` pointwise.
fn challenges(s: &EventStructure, twins: &Twins, x: u64) -> Vec<EventId> {
    let mut seen = 0u64;
    let mut out = Vec::new();
    for e in bits::iter(enabled(s, x)) {
        let c = twins.class_of[e];
        if seen & bit(c) == 0 {
            seen |= bit(c);
            out.push(e);
        }
    }
    out
}

struct Whb<'a> {
    a: &'a Prepared,
    b: &'a Prepared,
    memo: HashMap<(u64, u64), bool>,
}

impl Whb<'_> {
    fn good(&mut self, x: u64, y: u64) -> bool {
        if let Some(&v) = self.memo.get(&(x, y)) {
            return v;
        }
        let v = self.a.code(Configuration(x)) == self.b.code(Configuration(y))
            && self.unmatched(x, y).is_none();
        self.memo.insert((x, y), v);
        v
    }

    /// A single-event move from `(x, y)` with no good answer.
    fn unmatched(&mut self, x: u64, y: u64) -> Option<(Side, EventId)> {
        let (sa, sb) = (self.a.structure(), self.b.structure());
        let (ea, eb) = (enabled(sa, x), enabled(sb, y));
        for e in bits::iter(ea) {
            if !bits::iter(eb).any(|f| sa.label(e) == sb.label(f) && self.good(x | bit(e), y | bit(f))) {
                return Some((Side::Left, e));
            }
        }
        for f in bits::iter(eb) {
            if !bits::iter(ea).any(|e| sa.label(e) == sb.label(f) && self.good(x | bit(e), y | bit(f))) {
                return Some((Side::Right, f));
            }
        }
        None
    }
}

pub(crate) fn whb_verdict(a: &Prepared, b: &Prepared, witness: bool) -> Verdict {
    let mut game = Whb { a, b, memo: HashMap::new() };
    let related = game.good(0, 0);
    if !witness {
        return Verdict { related, witness: None };
    }
    let witness = if related {
        let (sa, sb) = (a.structure(), b.structure());
        let mut seen = BTreeSet::from([(0u64, 0u64)]);
        let mut queue = VecDeque::from([(0u64, 0u64)]);
        while let Some((x, y)) = queue.pop_front() {
            for e in bits::iter(enabled(sa, x)) {
                for f in bits::iter(enabled(sb, y)) {
                    let next = (x | bit(e), y | bit(f));
                    if sa.label(e) == sb.label(f) && game.good(next.0, next.1) && seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut pairs: Vec<_> = seen.into_iter().map(|(x, y)| (Configuration(x), Configuration(y))).collect();
        pairs.sort();
        Witness::Relation(pairs)
    } else {
        match game.unmatched(0, 0) {
            Some((side, e)) => position(a, b, 0, 0, side, e),
            // The empty configurations always have equal codes.
            None => unreachable!("root lost without an unmatched move"),
        }
    };
    Verdict { related, witness: Some(witness) }
}

fn position(a: &Prepared, b: &Prepared, x: u64, y: u64, side: Side, e: EventId) -> Witness {
    let (s, from) = match side {
        Side::Left => (a.structure(), x),
        Side::Right => (b.structure(), y),
    };
    Witness::Position {
        left: Configuration(x),
        right: Configuration(y),
        challenge: Challenge { side, action: Action::Label(s.label(e).clone()), target: Configuration(from | bit(e)) },
    }
}

pub fn whb_equiv(a: &EventStructure, b: &EventStructure) -> Result<bool, SemanticsError> {
    Ok(whb_verdict(&Prepared::new(a.clone())?, &Prepared::new(b.clone())?, false).related)
}

/// A challenge with the extensions that answer it.
type Move = ((Side, EventId), Vec<(EventId, EventId)>);

/// A triple in canonical form: `f[i]` is the image of the `i`-th member of `x`.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Triple {
    x: u64,
    y: u64,
    f: Box<[u8]>,
}

impl Triple {
    fn pairs(&self) -> impl Iterator<Item = (EventId, EventId)> + '_ {
        bits::iter(self.x).zip(self.f.iter().map(|&v| v as usize))
    }

    fn image(&self) -> [u8; 64] {
        let mut map = [u8::MAX; 64];
        for (e, img) in self.pairs() {
            map[e] = img as u8;
        }
        map
    }
}

struct Group {
    owner: usize,
    challenge: (Side, EventId),
    alive: usize,
}

/// The triple space reachable from `(∅, ∅, ∅)` under responses and, when
/// hereditary, backtracking.
struct Game<'a> {
    a: &'a Prepared,
    b: &'a Prepared,
    hereditary: bool,
    index: HashMap<Triple, usize>,
    triples: Vec<Triple>,
    groups: Vec<Group>,
    /// `groups[g]` for the groups of triple `t` are `group_range[t]`.
    group_range: Vec<std::ops::Range<usize>>,
    responses: Vec<Vec<usize>>,
    /// Groups that list a triple among their responses.
    answers: Vec<Vec<usize>>,
    /// Triples that backtrack to a triple.
    needed_by: Vec<Vec<usize>>,
    backtracks: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl<'a> Game<'a> {
    fn new(a: &'a Prepared, b: &'a Prepared, hereditary: bool) -> Self {
        Game {
            a,
            b,
            hereditary,
            index: HashMap::new(),
            triples: Vec::new(),
            groups: Vec::new(),
            group_range: Vec::new(),
            responses: Vec::new(),
            answers: Vec::new(),
            needed_by: Vec::new(),
            backtracks: Vec::new(),
            alive: Vec::new(),
        }
    }

    /// Canonical representative under permutations of twin classes on both sides.
    fn canonical(&self, pairs: impl Iterator<Item = (EventId, EventId)>) -> Triple {
        let (ta, tb) = (self.a.twins(), self.b.twins());
        let mut classes: Vec<(usize, usize)> = pairs.map(|(e, f)| (ta.class_of[e], tb.class_of[f])).collect();
        classes.sort_unstable();
        let mut next_a = vec![0usize; ta.members.len()];
        let mut next_b = vec![0usize; tb.members.len()];
        let mut map: Vec<(EventId, EventId)> = classes
            .into_iter()
            .map(|(c, d)| {
                let e = ta.members[c][next_a[c]];
                next_a[c] += 1;
                let f = tb.members[d][next_b[d]];
                next_b[d] += 1;
                (e, f)
            })
            .collect();
        map.sort_unstable();
        Triple {
            x: map.iter().fold(0, |m, &(e, _)| m | bit(e)),
            y: map.iter().fold(0, |m, &(_, f)| m | bit(f)),
            f: map.iter().map(|&(_, f)| f as u8).collect(),
        }
    }

    fn intern(&mut self, t: Triple, queue: &mut VecDeque<usize>) -> usize {
        if let Some(&i) = self.index.get(&t) {
            return i;
        }
        let i = self.triples.len();
        self.index.insert(t.clone(), i);
        self.triples.push(t);
        self.answers.push(Vec::new());
        self.needed_by.push(Vec::new());
        queue.push_back(i);
        i
    }

    fn explore(&mut self) {
        let (sa, sb) = (self.a.structure(), self.b.structure());
        let mut queue = VecDeque::new();
        let root = self.canonical(std::iter::empty());
        self.intern(root, &mut queue);
        while let Some(t) = queue.pop_front() {
            let triple = self.triples[t].clone();
            let img = triple.image();
            let image_of = |mask: u64| bits::iter(mask).fold(0u64, |m, e| m | bit(img[e] as usize));
            let extends = |e: EventId, f: EventId| sa.label(e) == sb.label(f) && image_of(sa.below(e)) == sb.below(f);

            let first_group = self.groups.len();
            let mut moves: Vec<Move> = Vec::new();
            let (ea, eb) = (enabled(sa, triple.x), enabled(sb, triple.y));
            for e in challenges(sa, self.a.twins(), triple.x) {
                moves.push(((Side::Left, e), bits::iter(eb).filter(|&f| extends(e, f)).map(|f| (e, f)).collect()));
            }
            for f in challenges(sb, self.b.twins(), triple.y) {
                moves.push(((Side::Right, f), bits::iter(ea).filter(|&e| extends(e, f)).map(|e| (e, f)).collect()));
            }
            for (challenge, answers) in moves {
                let g = self.groups.len();
                let mut resp: Vec<usize> = answers
                    .into_iter()
                    .map(|(e, f)| {
                        let next = self.canonical(triple.pairs().chain(std::iter::once((e, f))));
                        self.intern(next, &mut queue)
                    })
                    .collect();
                resp.sort_unstable();
                resp.dedup();
                for &r in &resp {
                    self.answers[r].push(g);
                }
                self.groups.push(Group { owner: t, challenge, alive: resp.len() });
                self.responses.push(resp);
            }
            self.group_range.push(first_group..self.groups.len());

            let mut back = Vec::new();
            if self.hereditary {
                for e in bits::iter(triple.x) {
                    if sa.above(e) & triple.x == 0 {
                        let prev = self.canonical(triple.pairs().filter(|&(d, _)| d != e));
                        let p = self.intern(prev, &mut queue);
                        self.needed_by[p].push(t);
                        back.push(p);
                    }
                }
            }
            self.backtracks.push(back);
        }
    }

    /// Removes triples until every survivor answers all challenges inside
    /// the survivors and, when hereditary, backtracks into them.
    fn solve(&mut self) {
        self.alive = vec![true; self.triples.len()];
        let mut dead: Vec<usize> = (0..self.groups.len())
            .filter(|&g| self.groups[g].alive == 0)
            .map(|g| self.groups[g].owner)
            .collect();
        while let Some(t) = dead.pop() {
            if !std::mem::replace(&mut self.alive[t], false) {
                continue;
            }
            for &g in &self.answers[t] {
                self.groups[g].alive -= 1;
                if self.groups[g].alive == 0 {
                    dead.push(self.groups[g].owner);
                }
            }
            dead.extend(self.needed_by[t].iter().copied());
        }
    }

    fn hp_triple(&self, t: usize) -> HpTriple {
        let triple = &self.triples[t];
        HpTriple { left: Configuration(triple.x), right: Configuration(triple.y), map: triple.pairs().collect() }
    }

    fn witness(&self) -> Witness {
        if self.alive[0] {
            let mut seen = BTreeSet::from([0usize]);
            let mut queue = VecDeque::from([0usize]);
            while let Some(t) = queue.pop_front() {
                let next = self.group_range[t]
                    .clone()
                    .flat_map(|g| self.responses[g].iter().copied())
                    .chain(self.backtracks[t].iter().copied());
                for n in next {
                    if self.alive[n] && seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
            let mut triples: Vec<HpTriple> = seen.into_iter().map(|t| self.hp_triple(t)).collect();
            triples.sort();
            Witness::Triples(triples)
        } else {
            let g = self.group_range[0]
                .clone()
                .find(|&g| self.groups[g].alive == 0)
                .expect("a dead root has a challenge without surviving answers");
            let (side, e) = self.groups[g].challenge;
            position(self.a, self.b, 0, 0, side, e)
        }
    }
}

pub(crate) fn history_verdict(a: &Prepared, b: &Prepared, hereditary: bool, witness: bool) -> Verdict {
    let mut game = Game::new(a, b, hereditary);
    game.explore();
    game.solve();
    let related = game.alive[0];
    Verdict { related, witness: witness.then(|| game.witness()) }
}

pub fn hb_equiv(a: &EventStructure, b: &EventStructure) -> Result<bool, SemanticsError> {
    Ok(history_verdict(&Prepared::new(a.clone())?, &Prepared::new(b.clone())?, false, false).related)
}

pub fn hhb_equiv(a: &EventStructure, b: &EventStructure) -> Result<bool, SemanticsError> {
    Ok(history_verdict(&Prepared::new(a.clone())?, &Prepared::new(b.clone())?, true, false).related)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_of;

    fn s(text: &str) -> EventStructure {
        structure_of(text).unwrap()
    }

    #[test]
    fn sequence_versus_parallel() {
        assert!(!whb_equiv(&s("a;a"), &s("a||a")).unwrap());
        assert!(!hb_equiv(&s("a;a"), &s("a||a")).unwrap());
        assert!(!hhb_equiv(&s("a;a"), &s("a||a")).unwrap());
    }

    #[test]
    fn single_versus_choice() {
        assert!(hb_equiv(&s("a"), &s("a+a")).unwrap());
        assert!(hhb_equiv(&s("a"), &s("a+a")).unwrap());
        assert!(whb_equiv(&s("a"), &s("a+a")).unwrap());
    }

    #[test]
    fn backtracking_separates() {
        let e = s("a||(a+(a||a))");
        let f = s("(a||(a+(a||a)))+(a||a)");
        assert!(hb_equiv(&e, &f).unwrap());
        assert!(whb_equiv(&e, &f).unwrap());
        assert!(!hhb_equiv(&e, &f).unwrap());
    }

    #[test]
    fn reflexive() {
        for text in ["(a||b)+(a;b)", "(a;b)||(b;a)", "a||a||a||(b+c)", "(a;b)+(c||d)"] {
            let x = s(text);
            assert!(whb_equiv(&x, &x).unwrap());
            assert!(hb_equiv(&x, &x).unwrap());
            assert!(hhb_equiv(&x, &x).unwrap());
        }
    }

    #[test]
    fn canonical_triples_respect_twins() {
        let a = Prepared::new(s("a||a||a")).unwrap();
        let b = Prepared::new(s("a||a||a")).unwrap();
        let game = Game::new(&a, &b, true);
        let t1 = game.canonical([(2, 0), (1, 2)].into_iter());
        let t2 = game.canonical([(0, 1), (1, 0)].into_iter());
        assert!(t1 == t2);
        assert_eq!(t1.x, 0b011);
        assert_eq!(t1.y, 0b011);
    }

    #[test]
    fn witnesses() {
        let a = Prepared::new(s("a")).unwrap();
        let b = Prepared::new(s("a+a")).unwrap();
        let v = history_verdict(&a, &b, true, true);
        let Some(Witness::Triples(triples)) = v.witness else { panic!() };
        assert_eq!(triples.len(), 2);
        let c = Prepared::new(s("a;a")).unwrap();
        let d = Prepared::new(s("a||a")).unwrap();
        let v = history_verdict(&c, &d, false, true);
        assert!(matches!(v.witness, Some(Witness::Position { .. })));
        let v = whb_verdict(&c, &d, true);
        assert!(!v.related);
        assert!(matches!(v.witness, Some(Witness::Position { .. })));
    }
}
