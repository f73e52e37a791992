//! Canonical labelling of event structures.
//!
//! Colour refinement on labels and the three neighbourhoods (causes,
//! consequences, conflicts), followed by individualisation-refinement
//! backtracking. The smallest leaf encoding is the canonical form. Subtrees
//! that are images of one another under an automorphism found earlier are
//! skipped, which keeps highly symmetric inputs (antichains, repeated
//! components) polynomial in practice.

use std::fmt;

use crate::bits::{self, bit};
use crate::label::Label;
use crate::structure::EventStructure;

/// Byte string identifying an isomorphism class of labelled structures.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Number of events encoded.
    pub fn event_count(&self) -> usize {
        self.0.first().copied().unwrap_or(0) as usize
    }
}

impl CanonicalForm {
    /// Rebuilds the canonical representative: event `i` sits at position `i`.
    pub fn decode(&self) -> EventStructure {
        let bytes = &self.0;
        let n = bytes[0] as usize;
        let alphabet_len = bytes[1] as usize;
        let mut at = 2;
        let mut alphabet = Vec::with_capacity(alphabet_len);
        for _ in 0..alphabet_len {
            let len = u16::from_le_bytes([bytes[at], bytes[at + 1]]) as usize;
            at += 2;
            let name = std::str::from_utf8(&bytes[at..at + len]).expect("labels are utf-8");
            alphabet.push(Label::new(name));
            at += len;
        }
        let mut labels = Vec::with_capacity(n);
        for l in &alphabet {
            let count = bytes[at] as usize;
            at += 1;
            labels.extend(std::iter::repeat_n(l.clone(), count));
        }
        let width = n.div_ceil(8);
        let mut rows = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            let mut word = [0u8; 8];
            word[..width].copy_from_slice(&bytes[at..at + width]);
            rows.push(u64::from_le_bytes(word));
            at += width;
        }
        let conflict = rows.split_off(n);
        EventStructure::from_closed_rows(labels, rows, conflict)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// Canonical form plus the labelling that produced it.
#[derive(Debug, Clone)]
pub struct Canon {
    pub form: CanonicalForm,
    /// `position[e]`: index of event `e` in the canonical order.
    pub position: Vec<usize>,
}

pub fn canonize(s: &EventStructure) -> Canon {
    let n = s.len();
    let below: Vec<u64> = s.events().map(|e| s.below(e)).collect();
    let above: Vec<u64> = s.events().map(|e| s.above(e)).collect();
    let conflict: Vec<u64> = s.events().map(|e| s.conflicts_with(e)).collect();
    let graph = Graph { n, below: &below, above: &above, conflict: &conflict };

    let mut alphabet: Vec<&Label> = s.labels().iter().collect();
    alphabet.sort();
    alphabet.dedup();
    let initial: Vec<u32> = s
        .labels()
        .iter()
        .map(|l| alphabet.binary_search(&l).expect("label present") as u32)
        .collect();

    let mut search = Search { graph: &graph, best: None, first: None, automorphisms: Vec::new() };
    let mut prefix = Vec::new();
    search.explore(initial.clone(), &mut prefix);
    let (rows, position) = search.best.expect("at least one leaf");

    let mut bytes = Vec::with_capacity(2 + n * 4);
    bytes.push(n as u8);
    bytes.push(alphabet.len() as u8);
    for l in &alphabet {
        let name = l.as_str().as_bytes();
        bytes.extend_from_slice(&(name.len() as u16).to_le_bytes());
        bytes.extend_from_slice(name);
    }
    // Labels in canonical order are non-decreasing; the counts determine them.
    let mut counts = vec![0u8; alphabet.len()];
    for &c in &initial {
        counts[c as usize] += 1;
    }
    bytes.extend_from_slice(&counts);
    let width = n.div_ceil(8);
    for row in &rows {
        bytes.extend_from_slice(&row.to_le_bytes()[..width]);
    }
    Canon { form: CanonicalForm(bytes), position }
}

struct Graph<'a> {
    n: usize,
    below: &'a [u64],
    above: &'a [u64],
    conflict: &'a [u64],
}

impl Graph<'_> {
    /// Refines `colors` to the coarsest equitable partition below it.
    /// Colours stay ranks `0..k`, ordered consistently with the input.
    fn refine(&self, colors: &mut [u32]) {
        let mut classes = distinct(colors);
        let mut keyed: Vec<(Vec<u32>, usize)> = Vec::with_capacity(self.n);
        loop {
            keyed.clear();
            for v in 0..self.n {
                let mut key = vec![colors[v]];
                for rel in [self.below[v], self.above[v], self.conflict[v]] {
                    let start = key.len();
                    key.extend(bits::iter(rel).map(|u| colors[u]));
                    key[start..].sort_unstable();
                    key.push(u32::MAX);
                }
                keyed.push((key, v));
            }
            keyed.sort_unstable();
            let mut rank = 0u32;
            for i in 0..keyed.len() {
                if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                    rank += 1;
                }
                colors[keyed[i].1] = rank;
            }
            let now = rank as usize + 1;
            if now == classes || now == self.n {
                break;
            }
            classes = now;
        }
    }

    /// Relation rows re-indexed by position: first `below`, then `conflict`.
    fn encode(&self, position: &[usize]) -> Vec<u64> {
        let map = |set: u64| bits::iter(set).fold(0u64, |acc, u| acc | bit(position[u]));
        let mut rows = vec![0u64; 2 * self.n];
        for v in 0..self.n {
            rows[position[v]] = map(self.below[v]);
            rows[self.n + position[v]] = map(self.conflict[v]);
        }
        rows
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

struct Search<'a> {
    graph: &'a Graph<'a>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    first: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn explore(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) {
        self.graph.refine(&mut colors);
        let n = self.graph.n;
        // Target cell: the first non-singleton colour class.
        let mut count = vec![0usize; n];
        for &c in &colors {
            count[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| count[c] > 1) else {
            self.leaf(colors.iter().map(|&c| c as usize).collect());
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&v| colors[v] as usize == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(v, &explored, prefix) {
                continue;
            }
            explored.push(v);
            let child: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| 2 * c + u32::from(c as usize == target && u != v))
                .collect();
            prefix.push(v);
            self.explore(child, prefix);
            prefix.pop();
        }
    }

    fn same_orbit(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        let n = self.graph.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for (x, &y) in gamma.iter().enumerate() {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == root)
    }

    fn leaf(&mut self, position: Vec<usize>) {
        let rows = self.graph.encode(&position);
        for reference in [&self.first, &self.best].into_iter().flatten() {
            if reference.0 == rows {
                let gamma = automorphism(&reference.1, &position);
                if gamma.iter().enumerate().any(|(x, &y)| x != y) {
                    self.automorphisms.push(gamma);
                }
                return;
            }
        }
        if self.first.is_none() {
            self.first = Some((rows.clone(), position.clone()));
        }
        match &self.best {
            Some((best, _)) if *best <= rows => {}
            _ => self.best = Some((rows, position)),
        }
    }
}

/// Two leaves with equal encodings differ by the automorphism `v -> pos1^-1(pos2(v))`.
fn automorphism(pos1: &[usize], pos2: &[usize]) -> Vec<usize> {
    let mut at = vec![0; pos1.len()];
    for (u, &p) in pos1.iter().enumerate() {
        at[p] = u;
    }
    pos2.iter().map(|&p| at[p]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Label;
    use std::collections::HashSet;

    fn structure(labels: &[&str], causes: &[(usize, usize)], conflicts: &[(usize, usize)]) -> EventStructure {
        let labels: Vec<Label> = labels.iter().map(|l| Label::new(l)).collect();
        EventStructure::build(labels.len(), labels, causes, conflicts).unwrap()
    }

    #[test]
    fn symmetric_structures_agree() {
        let ab = structure(&["a", "b"], &[], &[]);
        let ba = structure(&["b", "a"], &[], &[]);
        assert_eq!(ab.canonical_form(), ba.canonical_form());
        let a_then_b = structure(&["a", "b"], &[(0, 1)], &[]);
        let b_then_a = structure(&["a", "b"], &[(1, 0)], &[]);
        assert_ne!(a_then_b.canonical_form(), b_then_a.canonical_form());
    }

    #[test]
    fn canonical_form_is_permutation_invariant() {
        let s = structure(
            &["a", "a", "a", "a", "a", "a"],
            &[(0, 2), (1, 2), (1, 3), (3, 4)],
            &[(4, 5)],
        );
        let base = s.canonical_form();
        let perms = [[5, 4, 3, 2, 1, 0], [1, 0, 3, 2, 5, 4], [2, 3, 4, 5, 0, 1]];
        for p in perms {
            assert_eq!(s.permuted(&p).canonical_form(), base);
        }
    }

    #[test]
    fn large_antichain_is_fast() {
        let labels = vec![Label::new("a"); 20];
        let s = EventStructure::build(20, labels, &[], &[]).unwrap();
        let c = canonize(&s);
        assert_eq!(c.form.event_count(), 20);
    }

    #[test]
    fn decode_gives_an_isomorphic_copy() {
        let s = structure(&["b", "a", "a", "c"], &[(1, 3), (2, 3)], &[(0, 1)]);
        let form = s.canonical_form();
        let back = form.decode();
        assert!(back.is_isomorphic(&s));
        assert_eq!(back.canonical_form(), form);
    }

    /// All strict orders on 4 labelled points, by brute force over relations.
    #[test]
    fn sixteen_posets_on_four_points() {
        let n = 4;
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
        let mut forms = HashSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let rel: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
            let has = |a: usize, b: usize| rel.contains(&(a, b));
            let transitive = rel.iter().all(|&(a, b)| (0..n).all(|c| !has(b, c) || has(a, c)));
            let antisymmetric = rel.iter().all(|&(a, b)| !has(b, a));
            if transitive && antisymmetric {
                let s = structure(&["a"; 4], &rel, &[]);
                forms.insert(s.canonical_form());
            }
        }
        assert_eq!(forms.len(), 16);
    }
}
