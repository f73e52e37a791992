use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// An action name attached to events.
///
/// Labels are interned: every distinct name is stored once for the lifetime
/// of the process. Ordering and equality are by name, so results never depend
/// on interning order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

fn interner() -> &'static Mutex<HashSet<Arc<str>>> {
    static INTERNER: OnceLock<Mutex<HashSet<Arc<str>>>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl Label {
    pub fn new(name: &str) -> Self {
        let mut table = interner().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(existing) = table.get(name) {
            return Label(existing.clone());
        }
        let symbol: Arc<str> = Arc::from(name);
        table.insert(symbol.clone());
        Label(symbol)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(name: &str) -> Self {
        Label::new(name)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Name of the `i`-th symbol of a generated alphabet: `a`, `b`, ..., `z`, `l26`, ...
pub fn alphabet_symbol(i: usize) -> Label {
    if i < 26 {
        let c = (b'a' + i as u8) as char;
        Label::new(c.encode_utf8(&mut [0; 4]))
    } else {
        Label::new(&format!("l{i}"))
    }
}
