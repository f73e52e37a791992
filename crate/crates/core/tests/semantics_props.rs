mod common;

use std::collections::BTreeSet;

use common::gen::structure;
use common::{Act, Plain};
use espectrum::semantics::{
    build_lts, configurations, enabled, is_configuration, pomset_code_of_set, Action, Configuration, Lts, Mode,
};
use espectrum::{bits, StructureClass};
use proptest::prelude::*;

fn edges(lts: &Lts, keep: impl Fn(&Action) -> bool) -> BTreeSet<(u64, u64)> {
    lts.transitions()
        .iter()
        .filter(|t| keep(&t.action))
        .map(|t| (lts.states()[t.source].mask(), lts.states()[t.target].mask()))
        .collect()
}

fn as_oracle(a: &Action) -> Vec<String> {
    match a {
        Action::Label(l) => vec![l.as_str().to_string()],
        Action::Step(s) => s.labels().iter().map(|l| l.as_str().to_string()).collect(),
        Action::Pomset(_) => unreachable!("pomset actions are compared by code"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn configurations_match_subset_scan(s in structure(StructureClass::Pes, 9, 2)) {
        let ours: BTreeSet<u64> = configurations(&s).iter().map(|c| c.mask()).collect();
        let naive: BTreeSet<u64> = Plain::of(&s).configurations().into_iter().collect();
        prop_assert_eq!(ours, naive);
        for x in 0..1u64 << s.len() {
            prop_assert_eq!(is_configuration(&s, x), Plain::of(&s).is_configuration(x));
        }
    }

    #[test]
    fn singleton_edges_agree_across_modes(s in structure(StructureClass::Pes, 7, 2)) {
        let i = build_lts(&s, Mode::Interleaving).unwrap();
        let st = build_lts(&s, Mode::Step).unwrap();
        let p = build_lts(&s, Mode::Pomset).unwrap();
        let single = edges(&i, |_| true);
        prop_assert_eq!(&single, &edges(&st, |a| matches!(a, Action::Step(l) if l.len() == 1)));
        prop_assert_eq!(&single, &edges(&p, |a| matches!(a, Action::Pomset(c) if c.size() == 1)));
    }

    #[test]
    fn traces_match_the_oracle(s in structure(StructureClass::Pes, 6, 2)) {
        let plain = Plain::of(&s);
        for (mode, oracle_mode) in [(Mode::Interleaving, common::Mode::Interleaving), (Mode::Step, common::Mode::Step)] {
            let ours: BTreeSet<Vec<Act>> = build_lts(&s, mode)
                .unwrap()
                .traces()
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|a| match mode {
                            Mode::Interleaving => Act::Label(as_oracle(a).remove(0)),
                            _ => Act::Step(as_oracle(a)),
                        })
                        .collect()
                })
                .collect();
            prop_assert_eq!(ours, plain.traces(oracle_mode));
        }
    }

    #[test]
    fn pomset_edges_are_all_strict_inclusions(s in structure(StructureClass::Pes, 7, 2)) {
        let confs = configurations(&s);
        let pairs = confs
            .iter()
            .flat_map(|x| confs.iter().map(move |y| (x.mask(), y.mask())))
            .filter(|&(x, y)| x != y && y & x == x)
            .count();
        prop_assert_eq!(build_lts(&s, Mode::Pomset).unwrap().transitions().len(), pairs);
    }

    #[test]
    fn coherence_spaces_only_see_antichains(s in structure(StructureClass::Cs, 6, 2)) {
        let st = build_lts(&s, Mode::Step).unwrap();
        let p = build_lts(&s, Mode::Pomset).unwrap();
        prop_assert_eq!(st.transitions().len(), p.transitions().len());
        for (a, b) in st.transitions().iter().zip(p.transitions()) {
            prop_assert_eq!((a.source, a.target), (b.source, b.target));
            let Action::Pomset(code) = &b.action else { unreachable!() };
            prop_assert!(code.is_antichain());
            let mut labels = code.representative().labels().to_vec();
            labels.sort();
            let Action::Step(step) = &a.action else { unreachable!() };
            prop_assert_eq!(step.labels(), &labels[..]);
        }
    }

    #[test]
    fn elementary_structures_never_get_stuck(s in structure(StructureClass::Ees, 10, 2)) {
        let all = bits::full(s.len());
        prop_assert!(is_configuration(&s, all));
        for x in configurations(&s) {
            prop_assert_eq!(enabled(&s, x.mask()) == 0, x.mask() == all);
        }
    }

    #[test]
    fn pomset_codes_decide_poset_isomorphism(
        a in structure(StructureClass::Pes, 7, 2),
        b in structure(StructureClass::Pes, 7, 2),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let (ca, cb) = (configurations(&a), configurations(&b));
        let (x, y) = (ca[i.index(ca.len())].mask(), cb[j.index(cb.len())].mask());
        let (pa, pb) = (Plain::of(&a), Plain::of(&b));
        // Compare a configuration with one of another structure and with a
        // configuration of its own.
        let z = ca[j.index(ca.len())].mask();
        prop_assert_eq!(pomset_code_of_set(&a, x) == pomset_code_of_set(&b, y), pa.pomset(x) == pb.pomset(y));
        prop_assert_eq!(pomset_code_of_set(&a, x) == pomset_code_of_set(&a, z), pa.pomset(x) == pa.pomset(z));
    }
}

#[test]
fn configuration_display() {
    assert_eq!(Configuration(0b101).to_string(), "{e0,e2}");
    assert_eq!(Configuration::EMPTY.to_string(), "{}");
}
