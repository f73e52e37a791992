pub mod bits;
pub mod canon;
pub mod label;
pub mod structure;

pub use canon::CanonicalForm;
pub use label::Label;
pub use structure::{BuildError, EventId, EventStructure, StructureClass};
pub mod algebra;
pub mod semantics;
pub mod io;
pub mod equiv;
pub mod spectrum;
pub mod search;
