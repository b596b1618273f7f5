//! Symbol identifiers of the form `namespace?module?name` and the
//! namespace-prefix table that assigns each symbol to a library.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UriError {
    #[error("malformed URI `{uri}`: {reason}")]
    Malformed { uri: String, reason: &'static str },
}

/// Globally unique name of a constant.
///
/// The name component is everything after the second `?`, so PVS names such
/// as `open?` keep their trailing question marks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SymbolUri {
    namespace: String,
    module: String,
    name: String,
}

fn bad_char(c: char) -> bool {
    c.is_whitespace() || c == '"' || c.is_control()
}

impl SymbolUri {
    pub fn new(
        namespace: impl Into<String>,
        module: impl Into<String>,
        name: impl Into<String>,
    ) -> Result<Self, UriError> {
        let uri = SymbolUri {
            namespace: namespace.into(),
            module: module.into(),
            name: name.into(),
        };
        uri.validate()?;
        Ok(uri)
    }

    fn validate(&self) -> Result<(), UriError> {
        let fail = |reason| {
            Err(UriError::Malformed {
                uri: self.to_string(),
                reason,
            })
        };
        if self.namespace.is_empty() || self.module.is_empty() || self.name.is_empty() {
            return fail("empty component");
        }
        if self.namespace.contains('?') || self.module.contains('?') {
            return fail("`?` inside namespace or module");
        }
        // A name may only carry `?` as trailing characters.
        if self.name.trim_end_matches('?').contains('?') || self.name.starts_with('?') {
            return fail("`?` inside symbol name");
        }
        let all = [&self.namespace, &self.module, &self.name];
        if all.iter().any(|s| s.chars().any(bad_char)) {
            return fail("whitespace, quote or control character");
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, UriError> {
        let malformed = |reason| UriError::Malformed {
            uri: text.to_string(),
            reason,
        };
        let (namespace, rest) = text
            .split_once('?')
            .ok_or(malformed("missing `?` separators"))?;
        let (module, name) = rest
            .split_once('?')
            .ok_or(malformed("missing second `?`"))?;
        SymbolUri::new(namespace, module, name)
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn module(&self) -> &str {
        &self.module
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `namespace?module`, the URI of the containing theory.
    pub fn theory(&self) -> TheoryRef {
        TheoryRef {
            namespace: self.namespace.clone(),
            module: self.module.clone(),
        }
    }
}

impl fmt::Display for SymbolUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}?{}?{}", self.namespace, self.module, self.name)
    }
}

impl FromStr for SymbolUri {
    type Err = UriError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SymbolUri::parse(s)
    }
}

impl TryFrom<String> for SymbolUri {
    type Error = UriError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        SymbolUri::parse(&s)
    }
}

impl From<SymbolUri> for String {
    fn from(u: SymbolUri) -> String {
        u.to_string()
    }
}

pub fn parse_uri(text: &str) -> Result<SymbolUri, UriError> {
    SymbolUri::parse(text)
}

pub fn format_uri(uri: &SymbolUri) -> String {
    uri.to_string()
}

/// A theory URI: `namespace?module`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TheoryRef {
    pub namespace: String,
    pub module: String,
}

impl TheoryRef {
    pub fn parse(text: &str) -> Result<Self, UriError> {
        let malformed = |reason| UriError::Malformed {
            uri: text.to_string(),
            reason,
        };
        let (namespace, module) = text
            .split_once('?')
            .ok_or(malformed("missing `?` separator"))?;
        if namespace.is_empty() || module.is_empty() {
            return Err(malformed("empty component"));
        }
        if module.contains('?') {
            return Err(malformed("theory URI has more than one `?`"));
        }
        if text.chars().any(bad_char) {
            return Err(malformed("whitespace, quote or control character"));
        }
        Ok(TheoryRef {
            namespace: namespace.to_string(),
            module: module.to_string(),
        })
    }

    pub fn symbol(&self, name: &str) -> Result<SymbolUri, UriError> {
        SymbolUri::new(self.namespace.clone(), self.module.clone(), name)
    }
}

impl fmt::Display for TheoryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}?{}", self.namespace, self.module)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LibraryId(pub String);

impl LibraryId {
    pub fn new(id: impl Into<String>) -> Self {
        LibraryId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LibraryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for LibraryId {
    fn from(s: &str) -> Self {
        LibraryId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NamespaceError {
    #[error("namespace prefix `{0}` is assigned to more than one library")]
    DuplicatePrefix(String),
    #[error("empty namespace prefix for library `{0}`")]
    EmptyPrefix(String),
}

/// Assigns symbols to libraries by longest matching namespace prefix.
#[derive(Debug, Clone, Default)]
pub struct NamespaceTable {
    entries: Vec<(String, LibraryId)>,
}

impl NamespaceTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        prefix: impl Into<String>,
        lib: LibraryId,
    ) -> Result<(), NamespaceError> {
        let prefix = prefix.into();
        if prefix.is_empty() {
            return Err(NamespaceError::EmptyPrefix(lib.0));
        }
        if self.entries.iter().any(|(p, _)| *p == prefix) {
            return Err(NamespaceError::DuplicatePrefix(prefix));
        }
        self.entries.push((prefix, lib));
        // Longest prefix first so lookup can stop at the first hit.
        self.entries
            .sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(())
    }

    pub fn library_of(&self, uri: &SymbolUri) -> Option<&LibraryId> {
        self.entries
            .iter()
            .find(|(p, _)| uri.namespace().starts_with(p.as_str()))
            .map(|(_, lib)| lib)
    }

    pub fn libraries(&self) -> impl Iterator<Item = &LibraryId> {
        self.entries.iter().map(|(_, l)| l)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
