use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Challenge, EquivError, Side, Verdict, Witness};
use crate::semantics::{Action, Lts};

/// Coarsest bisimulation partition of the disjoint union; left states come
/// first, right states are offset by the left state count.
fn partition(a: &Lts, b: &Lts) -> Vec<usize> {
    let mut actions: HashMap<&Action, usize> = HashMap::new();
    let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
    for (offset, lts) in [(0, a), (a.states().len(), b)] {
        for s in 0..lts.states().len() {
            let out = lts
                .outgoing(s)
                .iter()
                .map(|t| {
                    let next = actions.len();
                    (*actions.entry(&t.action).or_insert(next), t.target + offset)
                })
                .collect();
            edges.push(out);
        }
    }
    let mut block = vec![0usize; edges.len()];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = edges
            .iter()
            .enumerate()
            .map(|(s, out)| {
                let mut sig: Vec<(usize, usize)> = out.iter().map(|&(act, t)| (act, block[t])).collect();
                sig.sort_unstable();
                sig.dedup();
                let fresh = ids.len();
                *ids.entry((block[s], sig)).or_insert(fresh)
            })
            .collect();
        block = next;
        if ids.len() == count {
            return block;
        }
        count = ids.len();
    }
}

pub(crate) fn bisim_verdict(a: &Lts, b: &Lts, witness: bool) -> Result<Verdict, EquivError> {
    if a.mode() != b.mode() {
        return Err(EquivError::ModeMismatch(a.mode(), b.mode()));
    }
    let block = partition(a, b);
    let off = a.states().len();
    let related = block[a.initial()] == block[b.initial() + off];
    if !witness {
        return Ok(Verdict { related, witness: None });
    }
    let witness = if related {
        let mut seen = BTreeSet::from([(a.initial(), b.initial())]);
        let mut queue = VecDeque::from([(a.initial(), b.initial())]);
        while let Some((x, y)) = queue.pop_front() {
            for tx in a.outgoing(x) {
                for ty in b.outgoing(y) {
                    if tx.action == ty.action
                        && block[tx.target] == block[ty.target + off]
                        && seen.insert((tx.target, ty.target))
                    {
                        queue.push_back((tx.target, ty.target));
                    }
                }
            }
        }
        let mut pairs: Vec<_> = seen.into_iter().map(|(x, y)| (a.states()[x], b.states()[y])).collect();
        pairs.sort();
        Witness::Relation(pairs)
    } else {
        let (x, y) = (a.initial(), b.initial());
        let left = a.outgoing(x).iter().find(|tx| {
            !b.outgoing(y).iter().any(|ty| ty.action == tx.action && block[ty.target + off] == block[tx.target])
        });
        let challenge = match left {
            Some(t) => Challenge { side: Side::Left, action: t.action.clone(), target: a.states()[t.target] },
            None => {
                let t = b
                    .outgoing(y)
                    .iter()
                    .find(|ty| {
                        !a.outgoing(x)
                            .iter()
                            .any(|tx| tx.action == ty.action && block[ty.target + off] == block[tx.target])
                    })
                    .expect("unrelated roots have an unmatched move");
                Challenge { side: Side::Right, action: t.action.clone(), target: b.states()[t.target] }
            }
        };
        Witness::Position { left: a.states()[x], right: b.states()[y], challenge }
    };
    Ok(Verdict { related, witness: Some(witness) })
}

/// Interleaving, step or pomset bisimilarity, by the systems' mode.
pub fn bisim(a: &Lts, b: &Lts) -> Result<bool, EquivError> {
    bisim_verdict(a, b, false).map(|v| v.related)
}
