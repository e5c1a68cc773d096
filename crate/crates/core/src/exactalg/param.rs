use std::fmt;
use std::sync::{LazyLock, RwLock};

static NAMES: LazyLock<RwLock<Vec<String>>> = LazyLock::new(|| RwLock::new(Vec::new()));

/// Interned parameter name. Ids are process-global and assigned in order of
/// first use, so the monomial order among parameters is deterministic for a
/// given sequence of declarations.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(pub(crate) u32);

impl Param {
    pub fn new(name: &str) -> Param {
        {
            let names = NAMES.read().unwrap();
            if let Some(i) = names.iter().position(|n| n == name) {
                return Param(i as u32);
            }
        }
        let mut names = NAMES.write().unwrap();
        if let Some(i) = names.iter().position(|n| n == name) {
            return Param(i as u32);
        }
        names.push(name.to_string());
        Param((names.len() - 1) as u32)
    }

    pub fn lookup(name: &str) -> Option<Param> {
        let names = NAMES.read().unwrap();
        names.iter().position(|n| n == name).map(|i| Param(i as u32))
    }

    pub fn name(&self) -> String {
        NAMES.read().unwrap()[self.0 as usize].clone()
    }
}

impl fmt::Debug for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
