//! Brute-force reference implementations, written directly from the
//! definitions and sharing nothing with the library beyond the accessors of
//! `EventStructure`. Only usable for a handful of events.

#![allow(dead_code)]

pub mod gen;

use std::collections::{BTreeSet, HashSet};

use espectrum::EventStructure;

/// A structure as plain matrices.
#[derive(Debug, Clone)]
pub struct Plain {
    pub n: usize,
    pub labels: Vec<String>,
    pub lt: Vec<Vec<bool>>,
    pub cf: Vec<Vec<bool>>,
}

impl Plain {
    pub fn of(s: &EventStructure) -> Plain {
        let n = s.len();
        Plain {
            n,
            labels: (0..n).map(|e| s.label(e).as_str().to_string()).collect(),
            lt: (0..n).map(|a| (0..n).map(|b| s.precedes(a, b)).collect()).collect(),
            cf: (0..n).map(|a| (0..n).map(|b| s.in_conflict(a, b)).collect()).collect(),
        }
    }

    fn members(&self, x: u64) -> Vec<usize> {
        (0..self.n).filter(|&e| x >> e & 1 == 1).collect()
    }

    pub fn is_configuration(&self, x: u64) -> bool {
        let m = self.members(x);
        m.iter().all(|&b| (0..self.n).all(|a| !self.lt[a][b] || x >> a & 1 == 1))
            && m.iter().all(|&a| m.iter().all(|&b| !self.cf[a][b]))
    }

    /// All configurations, by scanning every subset.
    pub fn configurations(&self) -> Vec<u64> {
        (0..1u64 << self.n).filter(|&x| self.is_configuration(x)).collect()
    }

    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        a != b && !self.lt[a][b] && !self.lt[b][a] && !self.cf[a][b]
    }

    /// Canonical pomset of the events in `x`: the least relabelled order
    /// over every enumeration of `x`.
    pub fn pomset(&self, x: u64) -> Pomset {
        let m = self.members(x);
        let mut best: Option<Pomset> = None;
        for p in permutations(m.len()) {
            let order: Vec<usize> = p.iter().map(|&i| m[i]).collect();
            let labels: Vec<String> = order.iter().map(|&e| self.labels[e].clone()).collect();
            let mut edges = Vec::new();
            for i in 0..order.len() {
                for j in 0..order.len() {
                    if self.lt[order[i]][order[j]] {
                        edges.push((i, j));
                    }
                }
            }
            let cand = Pomset { labels, edges };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        best.unwrap_or(Pomset { labels: Vec::new(), edges: Vec::new() })
    }

    fn step_label(&self, g: u64) -> Vec<String> {
        let mut l: Vec<String> = self.members(g).iter().map(|&e| self.labels[e].clone()).collect();
        l.sort();
        l
    }

    pub fn transitions(&self, mode: Mode) -> Transitions {
        let confs = self.configurations();
        let mut out = vec![Vec::new(); confs.len()];
        for (i, &x) in confs.iter().enumerate() {
            for (j, &y) in confs.iter().enumerate() {
                if y & x != x || y == x {
                    continue;
                }
                let g = y & !x;
                let m = self.members(g);
                let label = match mode {
                    Mode::Interleaving if m.len() == 1 => Act::Label(self.labels[m[0]].clone()),
                    Mode::Interleaving => continue,
                    Mode::Step if m.iter().all(|&a| m.iter().all(|&b| a == b || self.concurrent(a, b))) => {
                        Act::Step(self.step_label(g))
                    }
                    Mode::Step => continue,
                    Mode::Pomset => Act::Pomset(self.pomset(g)),
                };
                out[i].push((label, j));
            }
        }
        Transitions { confs, out }
    }

    pub fn traces(&self, mode: Mode) -> BTreeSet<Vec<Act>> {
        let t = self.transitions(mode);
        let mut out = BTreeSet::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((state, trace)) = stack.pop() {
            for (a, next) in &t.out[state] {
                let mut longer = trace.clone();
                longer.push(a.clone());
                stack.push((*next, longer));
            }
            out.insert(trace);
        }
        out
    }

    pub fn pomsets(&self) -> BTreeSet<Pomset> {
        self.configurations().into_iter().map(|x| self.pomset(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pomset {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Interleaving,
    Step,
    Pomset,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Act {
    Label(String),
    Step(Vec<String>),
    Pomset(Pomset),
}

/// Transitions between configurations, state 0 being the empty one.
pub struct Transitions {
    pub confs: Vec<u64>,
    pub out: Vec<Vec<(Act, usize)>>,
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Isomorphism by trying every permutation.
pub fn isomorphic(a: &EventStructure, b: &EventStructure) -> bool {
    let (pa, pb) = (Plain::of(a), Plain::of(b));
    pa.n == pb.n
        && permutations(pa.n).into_iter().any(|f| {
            (0..pa.n).all(|i| pa.labels[i] == pb.labels[f[i]])
                && (0..pa.n).all(|i| {
                    (0..pa.n).all(|j| pa.lt[i][j] == pb.lt[f[i]][f[j]] && pa.cf[i][j] == pb.cf[f[i]][f[j]])
                })
        })
}

/// Greatest fixpoint of a transfer condition over all state pairs; answers
/// whether the initial pair survives.
fn bisimilar(a: &Transitions, b: &Transitions, admissible: impl Fn(usize, usize) -> bool) -> bool {
    let mut rel: HashSet<(usize, usize)> = (0..a.confs.len())
        .flat_map(|i| (0..b.confs.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| admissible(i, j))
        .collect();
    loop {
        let keep: HashSet<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(i, j)| {
                a.out[i].iter().all(|(l, x)| b.out[j].iter().any(|(m, y)| l == m && rel.contains(&(*x, *y))))
                    && b.out[j].iter().all(|(m, y)| a.out[i].iter().any(|(l, x)| l == m && rel.contains(&(*x, *y))))
            })
            .collect();
        if keep.len() == rel.len() {
            return rel.contains(&(0, 0));
        }
        rel = keep;
    }
}

type Triple = (u64, u64, Vec<(usize, usize)>);

/// Every label and order preserving bijection between configurations of equal size.
fn triples(pa: &Plain, pb: &Plain) -> Vec<Triple> {
    let mut out = Vec::new();
    for x in pa.configurations() {
        for y in pb.configurations() {
            let (mx, my) = (pa.members(x), pb.members(y));
            if mx.len() != my.len() {
                continue;
            }
            for p in permutations(mx.len()) {
                let ok = (0..mx.len()).all(|i| pa.labels[mx[i]] == pb.labels[my[p[i]]])
                    && (0..mx.len()).all(|i| (0..mx.len()).all(|j| pa.lt[mx[i]][mx[j]] == pb.lt[my[p[i]]][my[p[j]]]));
                if ok {
                    out.push((x, y, (0..mx.len()).map(|i| (mx[i], my[p[i]])).collect()));
                }
            }
        }
    }
    out
}

fn history(a: &EventStructure, b: &EventStructure, hereditary: bool) -> bool {
    let (pa, pb) = (Plain::of(a), Plain::of(b));
    let mut rel: HashSet<Triple> = triples(&pa, &pb).into_iter().collect();
    let extend = |map: &[(usize, usize)], e: usize, f: usize| {
        let mut m = map.to_vec();
        m.push((e, f));
        m.sort();
        m
    };
    loop {
        let keep: HashSet<Triple> = rel
            .iter()
            .filter(|(x, y, map)| {
                let forward = (0..pa.n).filter(|&e| x >> e & 1 == 0 && pa.is_configuration(x | 1 << e)).all(|e| {
                    (0..pb.n).filter(|&f| y >> f & 1 == 0 && pb.is_configuration(y | 1 << f)).any(|f| {
                        pa.labels[e] == pb.labels[f] && rel.contains(&(x | 1 << e, y | 1 << f, extend(map, e, f)))
                    })
                });
                let backward = (0..pb.n).filter(|&f| y >> f & 1 == 0 && pb.is_configuration(y | 1 << f)).all(|f| {
                    (0..pa.n).filter(|&e| x >> e & 1 == 0 && pa.is_configuration(x | 1 << e)).any(|e| {
                        pa.labels[e] == pb.labels[f] && rel.contains(&(x | 1 << e, y | 1 << f, extend(map, e, f)))
                    })
                });
                let undo = !hereditary
                    || map.iter().all(|&(e, f)| {
                        !pa.is_configuration(x & !(1 << e)) || {
                            let smaller: Vec<(usize, usize)> = map.iter().copied().filter(|&(d, _)| d != e).collect();
                            rel.contains(&(x & !(1 << e), y & !(1 << f), smaller))
                        }
                    });
                forward && backward && undo
            })
            .cloned()
            .collect();
        if keep.len() == rel.len() {
            return rel.contains(&(0, 0, Vec::new()));
        }
        rel = keep;
    }
}

/// All ten verdicts in the library's print order:
/// it, st, ib, pt, sb, whb, pb, hb, hhb, iso.
pub fn verdicts(a: &EventStructure, b: &EventStructure) -> [bool; 10] {
    let (pa, pb) = (Plain::of(a), Plain::of(b));
    let ti = (pa.transitions(Mode::Interleaving), pb.transitions(Mode::Interleaving));
    let ts = (pa.transitions(Mode::Step), pb.transitions(Mode::Step));
    let tp = (pa.transitions(Mode::Pomset), pb.transitions(Mode::Pomset));
    let (ca, cb) = (ti.0.confs.clone(), ti.1.confs.clone());
    [
        pa.traces(Mode::Interleaving) == pb.traces(Mode::Interleaving),
        pa.traces(Mode::Step) == pb.traces(Mode::Step),
        bisimilar(&ti.0, &ti.1, |_, _| true),
        pa.pomsets() == pb.pomsets(),
        bisimilar(&ts.0, &ts.1, |_, _| true),
        bisimilar(&ti.0, &ti.1, |i, j| pa.pomset(ca[i]) == pb.pomset(cb[j])),
        bisimilar(&tp.0, &tp.1, |_, _| true),
        history(a, b, false),
        history(a, b, true),
        isomorphic(a, b),
    ]
}
