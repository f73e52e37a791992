use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::{EquivError, Prepared, Side, Verdict, Witness};
use crate::semantics::{Action, Lts};

type Subset = Vec<usize>;

/// Successor subsets per action; every state is accepting.
fn successors<'a>(lts: &'a Lts, set: &[usize]) -> BTreeMap<&'a Action, Subset> {
    let mut out: BTreeMap<&Action, BTreeSet<usize>> = BTreeMap::new();
    for &s in set {
        for t in lts.outgoing(s) {
            out.entry(&t.action).or_default().insert(t.target);
        }
    }
    out.into_iter().map(|(a, s)| (a, s.into_iter().collect())).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

#[derive(Default)]
struct Interner(HashMap<(Side, Subset), usize>);

impl Interner {
    fn id(&mut self, uf: &mut UnionFind, side: Side, set: Subset) -> usize {
        let next = self.0.len();
        let id = *self.0.entry((side, set)).or_insert(next);
        if id == next {
            uf.0.push(id);
        }
        id
    }
}

/// Language equality of the two transition systems, by union-find up to
/// congruence on the subset constructions.
fn languages_agree(a: &Lts, b: &Lts) -> bool {
    let mut uf = UnionFind(Vec::new());
    let mut names = Interner::default();
    let start = (vec![a.initial()], vec![b.initial()]);
    let (pa, pb) = (names.id(&mut uf, Side::Left, start.0.clone()), names.id(&mut uf, Side::Right, start.1.clone()));
    uf.0[pa] = pb;
    let mut todo = vec![start];
    while let Some((x, y)) = todo.pop() {
        let (sx, sy) = (successors(a, &x), successors(b, &y));
        if !sx.keys().eq(sy.keys()) {
            return false;
        }
        for ((_, nx), (_, ny)) in sx.into_iter().zip(sy) {
            let ix = names.id(&mut uf, Side::Left, nx.clone());
            let iy = names.id(&mut uf, Side::Right, ny.clone());
            let (rx, ry) = (uf.find(ix), uf.find(iy));
            if rx != ry {
                uf.0[rx] = ry;
                todo.push((nx, ny));
            }
        }
    }
    true
}

/// Shortest, then least, trace performable on exactly one side.
fn distinguishing_trace(a: &Lts, b: &Lts) -> Option<(Vec<Action>, Side)> {
    let start = (vec![a.initial()], vec![b.initial()]);
    let mut seen: HashSet<(Subset, Subset)> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, Vec::<Action>::new())]);
    while let Some(((x, y), trace)) = queue.pop_front() {
        let (sx, sy) = (successors(a, &x), successors(b, &y));
        let only = |from: &BTreeMap<&Action, Subset>, other: &BTreeMap<&Action, Subset>| {
            from.keys().find(|k| !other.contains_key(*k)).map(|k| (*k).clone())
        };
        let odd = match (only(&sx, &sy), only(&sy, &sx)) {
            (Some(l), Some(r)) if r < l => Some((r, Side::Right)),
            (Some(l), _) => Some((l, Side::Left)),
            (None, Some(r)) => Some((r, Side::Right)),
            (None, None) => None,
        };
        if let Some((action, side)) = odd {
            let mut trace = trace;
            trace.push(action);
            return Some((trace, side));
        }
        for ((action, nx), (_, ny)) in sx.into_iter().zip(sy) {
            let next = (nx, ny);
            if seen.insert(next.clone()) {
                let mut longer = trace.clone();
                longer.push(action.clone());
                queue.push_back((next, longer));
            }
        }
    }
    None
}

pub(crate) fn trace_verdict(a: &Lts, b: &Lts, witness: bool) -> Result<Verdict, EquivError> {
    if a.mode() != b.mode() {
        return Err(EquivError::ModeMismatch(a.mode(), b.mode()));
    }
    let related = languages_agree(a, b);
    let witness = if witness && !related {
        distinguishing_trace(a, b).map(|(trace, side)| Witness::Trace { trace, side })
    } else {
        None
    };
    Ok(Verdict { related, witness })
}

/// Interleaving or step trace equivalence, depending on the systems' mode.
pub fn trace_equiv(a: &Lts, b: &Lts) -> Result<bool, EquivError> {
    trace_verdict(a, b, false).map(|v| v.related)
}

pub(crate) fn pomset_trace_verdict(a: &Prepared, b: &Prepared, witness: bool) -> Verdict {
    let sa: BTreeSet<_> = a.codes().iter().collect();
    let sb: BTreeSet<_> = b.codes().iter().collect();
    let related = sa == sb;
    let witness = (witness && !related).then(|| {
        let l = sa.difference(&sb).next();
        let r = sb.difference(&sa).next();
        match (l, r) {
            (Some(l), Some(r)) if r < l => Witness::Pomset { pomset: (*r).clone(), side: Side::Right },
            (Some(l), _) => Witness::Pomset { pomset: (*l).clone(), side: Side::Left },
            (None, r) => Witness::Pomset { pomset: (*r.unwrap()).clone(), side: Side::Right },
        }
    });
    Verdict { related, witness }
}

pub fn pomset_trace_equiv(
    a: &crate::EventStructure,
    b: &crate::EventStructure,
) -> Result<bool, crate::semantics::SemanticsError> {
    Ok(pomset_trace_verdict(&Prepared::new(a.clone())?, &Prepared::new(b.clone())?, false).related)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_of;
    use crate::semantics::{build_lts, Mode};

    fn lts(text: &str, mode: Mode) -> Lts {
        build_lts(&structure_of(text).unwrap(), mode).unwrap()
    }

    fn trace_strings(l: &Lts) -> BTreeSet<String> {
        l.traces().into_iter().map(|t| t.iter().map(|a| a.to_string()).collect::<String>()).collect()
    }

    #[test]
    fn sum_versus_parallel_share_traces() {
        let a = lts("a+(a||a)", Mode::Interleaving);
        let b = lts("a||a", Mode::Interleaving);
        assert!(trace_equiv(&a, &b).unwrap());
        let expected: BTreeSet<String> = ["", "a", "aa"].into_iter().map(String::from).collect();
        assert_eq!(trace_strings(&a), expected);
        assert_eq!(trace_strings(&b), expected);
    }

    #[test]
    fn thirteen_common_traces() {
        let a = lts("(a||b);(a||b)", Mode::Interleaving);
        let b = lts("(a;b)||(b;a)", Mode::Interleaving);
        assert!(trace_equiv(&a, &b).unwrap());
        let expected: BTreeSet<String> =
            ["", "a", "b", "ab", "ba", "aba", "abb", "baa", "bab", "abab", "abba", "baab", "baba"]
                .into_iter()
                .map(String::from)
                .collect();
        assert_eq!(trace_strings(&a), expected);
        assert_eq!(trace_strings(&b), expected);
    }

    #[test]
    fn steps_separate_sequence_from_parallel() {
        let a = lts("a;a", Mode::Step);
        let b = lts("a||a", Mode::Step);
        assert!(!trace_equiv(&a, &b).unwrap());
        let v = trace_verdict(&a, &b, true).unwrap();
        let Some(Witness::Trace { trace, side }) = v.witness else { panic!() };
        assert_eq!(side, Side::Right);
        assert_eq!(trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(), vec!["{a,a}"]);
        assert!(trace_equiv(&lts("a;a", Mode::Interleaving), &lts("a||a", Mode::Interleaving)).unwrap());
    }

    #[test]
    fn shortest_witness() {
        let a = lts("a;b;c", Mode::Interleaving);
        let b = lts("a;b;d", Mode::Interleaving);
        let v = trace_verdict(&a, &b, true).unwrap();
        let Some(Witness::Trace { trace, side }) = v.witness else { panic!() };
        assert_eq!(trace.len(), 3);
        assert_eq!(side, Side::Left);
        assert_eq!(trace[2].to_string(), "c");
    }

    #[test]
    fn mode_mismatch() {
        let a = lts("a", Mode::Step);
        let b = lts("a", Mode::Interleaving);
        assert_eq!(trace_equiv(&a, &b), Err(EquivError::ModeMismatch(Mode::Step, Mode::Interleaving)));
    }

    #[test]
    fn pomset_traces() {
        let s = structure_of("a;a").unwrap();
        assert!(pomset_trace_equiv(&s, &s).unwrap());
        assert!(!pomset_trace_equiv(&s, &structure_of("a||a").unwrap()).unwrap());
        let v = pomset_trace_verdict(
            &Prepared::new(s).unwrap(),
            &Prepared::new(structure_of("a||a").unwrap()).unwrap(),
            true,
        );
        assert!(matches!(v.witness, Some(Witness::Pomset { .. })));
    }
}
