//! Interned-ish identifiers and the session-scoped fresh-name supply.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::borrow::Borrow;
use core::fmt;

/// Character reserved for generated names. The surface lexer never accepts
/// it inside an identifier, so generated names cannot capture user names.
pub const RESERVED: char = '#';

/// An immutable, cheaply clonable identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for names produced by a [`NameGen`].
    pub fn is_generated(&self) -> bool {
        self.0.contains(RESERVED)
    }

    /// The user-facing stem: everything before the reserved marker.
    pub fn stem(&self) -> &str {
        match self.0.find(RESERVED) {
            Some(i) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Name {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for Name {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

/// Monotone fresh-name counter. One per checking session.
#[derive(Debug, Default, Clone)]
pub struct NameGen {
    next: u64,
}

impl NameGen {
    pub fn new() -> Self {
        NameGen { next: 0 }
    }

    /// `stem#N` for the next counter value.
    pub fn fresh(&mut self, stem: &str) -> Name {
        let n = self.next;
        self.next += 1;
        let stem = match stem.find(RESERVED) {
            Some(i) => &stem[..i],
            None => stem,
        };
        Name::from(format!("{stem}{RESERVED}{n}"))
    }

    pub fn counter(&self) -> u64 {
        self.next
    }
}
