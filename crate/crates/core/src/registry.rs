//! Name-keyed registries of interchangeable algorithm variants.
//!
//! Each registry maps a stable name to a constructor taking a context value
//! `C` (parameters, configuration) and returning a boxed trait object.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub type Constructor<C, T> = fn(&C) -> Result<Box<T>>;

struct Entry<C, T: ?Sized> {
    description: &'static str,
    build: Constructor<C, T>,
}

pub struct Registry<C, T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<C, T>>,
}

impl<C, T: ?Sized> Registry<C, T> {
    /// `kind` names the strategy family in error messages ("reaction", ...).
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `build` under `name`, replacing any previous entry.
    pub fn register(
        &mut self,
        name: &'static str,
        description: &'static str,
        build: Constructor<C, T>,
    ) -> &mut Self {
        self.entries.insert(name, Entry { description, build });
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .iter()
            .map(|(name, e)| (*name, e.description))
            .collect()
    }

    pub fn build(&self, name: &str, ctx: &C) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(entry) => (entry.build)(ctx),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl<C, T: ?Sized> fmt::Debug for Registry<C, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names().collect::<Vec<_>>())
            .finish()
    }
}
