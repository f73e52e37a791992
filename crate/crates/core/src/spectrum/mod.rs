//! Known separating pairs, random corpora and empirical checks of the spectra.

pub mod corpus;
pub mod fixtures;
pub mod verify;

pub use corpus::{abrow, arow, generate_corpus, generate_pairs, grid, triangle, CorpusError, CorpusPair, CorpusSpec};
pub use fixtures::{builtin_fixtures, Fixture};
pub use verify::{verify_spectrum, Diagram, PairResult, SpectrumReport, Strictness, OPEN_QUESTIONS_NOTE};
