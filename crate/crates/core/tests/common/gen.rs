//! Proptest strategies for small structures.

use espectrum::label::alphabet_symbol;
use espectrum::{EventStructure, StructureClass};
use proptest::prelude::*;

/// Random valid structures of `class` with at most `max` events over `k` labels.
pub fn structure(class: StructureClass, max: usize, k: usize) -> impl Strategy<Value = EventStructure> {
    (0..=max).prop_flat_map(move |n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (
            proptest::collection::vec(0..k, n),
            proptest::collection::vec(proptest::bool::weighted(0.35), pairs),
            proptest::collection::vec(proptest::bool::weighted(0.3), pairs),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(labels, causal, clash, perm)| assemble(class, n, &labels, &causal, &clash, &perm))
    })
}

fn assemble(
    class: StructureClass,
    n: usize,
    labels: &[usize],
    causal: &[bool],
    clash: &[bool],
    perm: &[usize],
) -> EventStructure {
    let labels: Vec<_> = labels.iter().map(|&i| alphabet_symbol(i)).collect();
    let mut upper = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            upper.push((perm[a], perm[b]));
        }
    }
    let causes: Vec<_> = match class {
        StructureClass::Cs => Vec::new(),
        _ => upper.iter().zip(causal).filter(|(_, &c)| c).map(|(&p, _)| p).collect(),
    };
    let mut conflicts = Vec::new();
    if class != StructureClass::Ees {
        // Keep every candidate conflict that still yields a valid structure.
        for (&p, _) in upper.iter().zip(clash).filter(|(_, &c)| c) {
            conflicts.push(p);
            if EventStructure::build(n, labels.clone(), &causes, &conflicts).is_err() {
                conflicts.pop();
            }
        }
    }
    EventStructure::build(n, labels, &causes, &conflicts).expect("assembled structure is valid")
}

/// Pairs that are often related: the right side is either unrelated, a
/// renumbering, or the left side with one event dropped or relabelled.
pub fn pair(class: StructureClass, max: usize, k: usize) -> impl Strategy<Value = (EventStructure, EventStructure)> {
    (structure(class, max, k), structure(class, max, k), 0..4u8, any::<prop::sample::Index>()).prop_flat_map(
        move |(a, b, kind, idx)| {
            let n = a.len();
            let right = match kind {
                0 => b,
                1 if n > 0 => {
                    let keep = ((1u64 << n) - 1) & !(1u64 << idx.index(n));
                    a.restrict(keep)
                }
                2 if n > 0 => {
                    let e = idx.index(n);
                    let mut i = 0;
                    a.relabeled(|l| {
                        i += 1;
                        if i - 1 == e {
                            alphabet_symbol((l.as_str().as_bytes()[0] - b'a' + 1) as usize % k.max(1))
                        } else {
                            l.clone()
                        }
                    })
                }
                _ => a.clone(),
            };
            let m = right.len();
            (Just(a), Just(right), Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
                .prop_map(|(a, r, perm)| (a, r.permuted(&perm)))
        },
    )
}
