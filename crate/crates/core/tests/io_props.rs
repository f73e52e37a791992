mod common;

use common::gen::structure;
use espectrum::io::{export_dot, format_es, parse_es, read_es, write_es, DotSource};
use espectrum::semantics::{build_lts, Mode};
use espectrum::{EventStructure, StructureClass};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn text_round_trip(s in structure(StructureClass::Pes, 12, 4)) {
        let text = format_es(&s);
        prop_assert_eq!(parse_es(&text).unwrap(), s.clone());
        prop_assert_eq!(format_es(&parse_es(&text).unwrap()), text);
    }

    #[test]
    fn written_causality_is_the_reduction(s in structure(StructureClass::Ees, 10, 1)) {
        let text = format_es(&s);
        let written: Vec<(usize, usize)> = text
            .lines()
            .filter_map(|l| l.strip_prefix("cause "))
            .map(|rest| {
                let mut it = rest.split_whitespace().map(|x| x.parse::<usize>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        prop_assert_eq!(written.clone(), s.hasse());
        let closed = EventStructure::build(s.len(), s.labels().to_vec(), &written, &[]).unwrap();
        prop_assert_eq!(closed.causality(), s.causality());
    }

    #[test]
    fn dot_is_stable(s in structure(StructureClass::Pes, 7, 2)) {
        prop_assert_eq!(export_dot(DotSource::Structure(&s)), export_dot(DotSource::Structure(&s.clone())));
        let lts = build_lts(&s, Mode::Step).unwrap();
        let again = build_lts(&s, Mode::Step).unwrap();
        prop_assert_eq!(export_dot(DotSource::Lts(&lts)), export_dot(DotSource::Lts(&again)));
    }
}

#[test]
fn file_round_trip() {
    let dir = std::env::temp_dir().join(format!("espectrum-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x.es");
    let s = espectrum::algebra::structure_of("(a||b)+(a;b)").unwrap();
    write_es(&s, &path).unwrap();
    assert_eq!(read_es(&path).unwrap(), s);
    std::fs::remove_dir_all(&dir).unwrap();
}
