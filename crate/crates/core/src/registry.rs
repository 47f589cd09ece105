//! Name-keyed registries of interchangeable strategies.
//!
//! A registry maps a name to a factory that builds a boxed trait object from
//! some shared context. The CLI and the entropy layer pick strategies by
//! name at runtime; unknown names report the available choices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Factory<Ctx, T> = fn(&Ctx) -> Result<Box<T>>;

struct Entry<Ctx: ?Sized, T: ?Sized> {
    description: &'static str,
    factory: Factory<Ctx, T>,
}

pub struct Registry<Ctx: ?Sized, T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<Ctx, T>>,
}

impl<Ctx: ?Sized, T: ?Sized> Registry<Ctx, T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers a factory; a later registration under the same name wins.
    pub fn register(&mut self, name: &'static str, description: &'static str, factory: Factory<Ctx, T>) {
        self.entries.insert(name, Entry { description, factory });
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn describe(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, e.description))
    }

    pub fn create(&self, name: &str, ctx: &Ctx) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(entry) => (entry.factory)(ctx),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}
