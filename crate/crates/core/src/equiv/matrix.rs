use std::fmt;

use rayon::prelude::*;

use super::bisim::bisim_verdict;
use super::history::{history_verdict, whb_verdict};
use super::traces::{pomset_trace_verdict, trace_verdict};
use super::{EquivError, Prepared, Relation, Verdict, Witness};
use crate::semantics::Mode;
use crate::structure::EventStructure;

/// Proven inclusions `(finer, coarser)`: relating by `finer` implies relating by `coarser`.
pub const INCLUSIONS: [(Relation, Relation); 13] = [
    (Relation::Ib, Relation::It),
    (Relation::St, Relation::It),
    (Relation::Sb, Relation::Ib),
    (Relation::Sb, Relation::St),
    (Relation::Pt, Relation::St),
    (Relation::Pb, Relation::Sb),
    (Relation::Pb, Relation::Pt),
    (Relation::Whb, Relation::Sb),
    (Relation::Whb, Relation::Pt),
    (Relation::Hb, Relation::Pb),
    (Relation::Hb, Relation::Whb),
    (Relation::Hhb, Relation::Hb),
    (Relation::Iso, Relation::Hhb),
];

/// The first inclusion the verdicts break. Without autoconcurrency on
/// either side, weak history preservation also implies the plain one.
pub fn consistency_violation(verdicts: &[bool; 10], autoconcurrency: bool) -> Option<(Relation, Relation)> {
    let holds = |r: Relation| verdicts[r.index()];
    let extra = (!autoconcurrency).then_some((Relation::Whb, Relation::Hb));
    INCLUSIONS.into_iter().chain(extra).find(|&(finer, coarser)| holds(finer) && !holds(coarser))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixOptions {
    pub witnesses: bool,
    pub parallel: bool,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        MatrixOptions { witnesses: false, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictMatrix {
    verdicts: [bool; 10],
    witnesses: Vec<Option<Witness>>,
}

impl VerdictMatrix {
    pub fn from_verdicts(verdicts: [bool; 10]) -> Self {
        VerdictMatrix { verdicts, witnesses: vec![None; 10] }
    }

    /// Verdicts from the set of relations that hold.
    pub fn holding(related: &[Relation]) -> Self {
        let mut verdicts = [false; 10];
        for r in related {
            verdicts[r.index()] = true;
        }
        Self::from_verdicts(verdicts)
    }

    pub fn get(&self, r: Relation) -> bool {
        self.verdicts[r.index()]
    }

    pub fn verdicts(&self) -> &[bool; 10] {
        &self.verdicts
    }

    pub fn witness(&self, r: Relation) -> Option<&Witness> {
        self.witnesses[r.index()].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Relation, bool)> + '_ {
        Relation::ALL.into_iter().map(|r| (r, self.get(r)))
    }

    /// Ten characters, `1` for related, in printing order.
    pub fn bits(&self) -> String {
        self.verdicts.iter().map(|&v| if v { '1' } else { '0' }).collect()
    }

    /// Whether two matrices agree on every verdict, ignoring witnesses.
    pub fn same_verdicts(&self, other: &VerdictMatrix) -> bool {
        self.verdicts == other.verdicts
    }
}

impl fmt::Display for VerdictMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, v) in self.iter() {
            writeln!(f, "{:<4} {}", r.name(), if v { "yes" } else { "no" })?;
        }
        Ok(())
    }
}

pub fn check_prepared(rel: Relation, a: &Prepared, b: &Prepared, witness: bool) -> Result<Verdict, EquivError> {
    Ok(match rel {
        Relation::It => trace_verdict(a.lts(Mode::Interleaving), b.lts(Mode::Interleaving), witness)?,
        Relation::St => trace_verdict(a.lts(Mode::Step), b.lts(Mode::Step), witness)?,
        Relation::Ib => bisim_verdict(a.lts(Mode::Interleaving), b.lts(Mode::Interleaving), witness)?,
        Relation::Sb => bisim_verdict(a.lts(Mode::Step), b.lts(Mode::Step), witness)?,
        Relation::Pb => bisim_verdict(a.lts(Mode::Pomset), b.lts(Mode::Pomset), witness)?,
        Relation::Pt => pomset_trace_verdict(a, b, witness),
        Relation::Whb => whb_verdict(a, b, witness),
        Relation::Hb => history_verdict(a, b, false, witness),
        Relation::Hhb => history_verdict(a, b, true, witness),
        Relation::Iso => {
            let map = a.structure().isomorphism(b.structure());
            Verdict { related: map.is_some(), witness: map.filter(|_| witness).map(Witness::Isomorphism) }
        }
    })
}

pub fn check(rel: Relation, a: &EventStructure, b: &EventStructure, witness: bool) -> Result<Verdict, EquivError> {
    check_prepared(rel, &Prepared::new(a.clone())?, &Prepared::new(b.clone())?, witness)
}

/// All ten verdicts, without checking them against the inclusions.
pub fn compute_matrix(a: &Prepared, b: &Prepared, options: MatrixOptions) -> Result<VerdictMatrix, EquivError> {
    let run = |r: Relation| check_prepared(r, a, b, options.witnesses);
    let results: Vec<Verdict> = if options.parallel {
        Relation::ALL.par_iter().map(|&r| run(r)).collect::<Result<_, _>>()?
    } else {
        Relation::ALL.iter().map(|&r| run(r)).collect::<Result<_, _>>()?
    };
    let mut verdicts = [false; 10];
    let mut witnesses = Vec::with_capacity(10);
    for (i, v) in results.into_iter().enumerate() {
        verdicts[i] = v.related;
        witnesses.push(v.witness);
    }
    Ok(VerdictMatrix { verdicts, witnesses })
}

pub fn full_matrix_prepared(a: &Prepared, b: &Prepared, options: MatrixOptions) -> Result<VerdictMatrix, EquivError> {
    let m = compute_matrix(a, b, options)?;
    let auto = a.structure().has_autoconcurrency() || b.structure().has_autoconcurrency();
    if let Some((finer, coarser)) = consistency_violation(&m.verdicts, auto) {
        return Err(EquivError::SpectrumViolation { finer, coarser });
    }
    Ok(m)
}

pub fn full_matrix(a: &EventStructure, b: &EventStructure) -> Result<VerdictMatrix, EquivError> {
    full_matrix_prepared(&Prepared::new(a.clone())?, &Prepared::new(b.clone())?, MatrixOptions::default())
}
