//! Interface theories: named collections of constant declarations that act
//! as hubs between library dialects.
//!
//! Surface syntax, one item per line:
//!
//! ```text
//! // comment
//! namespace http://mathhub.info/MitM/Foundation
//! theory Logic : http://cds.omdoc.org/urtheories?LF =
//!   bool : (sym "http://cds.omdoc.org/urtheories?LF?type")
//!   ded : (sym "...") # ⊢ 1
//!   include http://mathhub.info/MitM/Foundation?Other
//! end
//! ```
//!
//! A declaration is `NAME` followed by optional `: TYPE`, `= DEF` and
//! `# NOTATION` components in any order. Types and definitions use the term
//! syntax; a notation runs until the next component marker or end of line.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::term::{parse_term_prefix, ParseError, Term};
use crate::uri::{SymbolUri, TheoryRef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constant {
    pub name: String,
    pub ty: Option<Term>,
    pub definition: Option<Term>,
    pub notation: Option<String>,
}

impl Constant {
    pub fn new(name: impl Into<String>) -> Self {
        Constant {
            name: name.into(),
            ty: None,
            definition: None,
            notation: None,
        }
    }

    /// Arity declared by the notation: the largest argument number it
    /// mentions (`# 2 ∪ 3` declares three arguments, the first implicit).
    pub fn declared_arity(&self) -> Option<usize> {
        self.notation
            .as_deref()?
            .split_whitespace()
            .filter_map(|w| w.parse::<usize>().ok())
            .max()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceTheory {
    pub uri: TheoryRef,
    pub meta: Option<TheoryRef>,
    pub constants: Vec<Constant>,
    pub includes: Vec<TheoryRef>,
}

impl InterfaceTheory {
    pub fn name(&self) -> &str {
        &self.uri.module
    }

    pub fn constant(&self, name: &str) -> Option<&Constant> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn symbol(&self, c: &Constant) -> SymbolUri {
        self.uri
            .symbol(&c.name)
            .expect("constant names are validated at parse time")
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolUri> + '_ {
        self.constants.iter().map(|c| self.symbol(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterfaceError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Term { line: usize, source: ParseError },
    #[error("theory {theory}: constant `{name}` declared twice")]
    DuplicateConstant { theory: String, name: String },
    #[error("theory {theory} declared twice")]
    DuplicateTheory { theory: String },
    #[error("theory {theory}: unknown include {include}")]
    UnknownInclude { theory: String, include: String },
    #[error("include cycle through theory {theory}")]
    IncludeCycle { theory: String },
    #[error("theory {theory}: definition of `{constant}` refers to `{reference}` before its declaration")]
    ForwardReference {
        theory: String,
        constant: String,
        reference: String,
    },
    #[error("theory {theory}: definition of `{constant}` has free variables")]
    OpenDefinition { theory: String, constant: String },
}

impl InterfaceError {
    pub fn line(&self) -> Option<usize> {
        match self {
            InterfaceError::Syntax { line, .. } | InterfaceError::Term { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Position of the next ` : (` or ` = (` component marker in a notation.
fn next_marker(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    (0..bytes.len()).find(|&i| {
        (bytes[i] == b':' || bytes[i] == b'=')
            && (i == 0 || bytes[i - 1].is_ascii_whitespace())
            && s[i + 1..].trim_start().starts_with('(')
    })
}

fn parse_declaration(text: &str, line: usize) -> Result<Constant, InterfaceError> {
    let syntax = |message: String| InterfaceError::Syntax { line, message };
    let text = text.trim();
    let end = text
        .find(|c: char| c.is_whitespace() || c == ':' || c == '=' || c == '#')
        .unwrap_or(text.len());
    let name = &text[..end];
    TheoryRef {
        namespace: "x".into(),
        module: "x".into(),
    }
    .symbol(name)
    .map_err(|e| syntax(format!("bad constant name: {e}")))?;
    let mut c = Constant::new(name);
    let mut rest = text[end..].trim_start();
    while !rest.is_empty() {
        let marker = rest.chars().next().unwrap();
        let body = rest[1..].trim_start();
        match marker {
            ':' | '=' => {
                let (term, after) = parse_term_prefix(body)
                    .map_err(|source| InterfaceError::Term { line, source })?;
                let slot = if marker == ':' {
                    &mut c.ty
                } else {
                    &mut c.definition
                };
                if slot.is_some() {
                    return Err(syntax(format!(
                        "`{marker}` component given twice for `{name}`"
                    )));
                }
                *slot = Some(term);
                rest = after.trim_start();
            }
            '#' => {
                if c.notation.is_some() {
                    return Err(syntax(format!("notation given twice for `{name}`")));
                }
                let stop = next_marker(body).unwrap_or(body.len());
                let notation = body[..stop].trim();
                if notation.is_empty() {
                    return Err(syntax(format!("empty notation for `{name}`")));
                }
                c.notation = Some(notation.to_string());
                rest = body[stop..].trim_start();
            }
            other => {
                return Err(syntax(format!(
                    "unexpected `{other}` in declaration of `{name}`"
                )))
            }
        }
    }
    Ok(c)
}

fn parse_theory_header(
    rest: &str,
    line: usize,
) -> Result<(String, Option<TheoryRef>), InterfaceError> {
    let syntax = |message: String| InterfaceError::Syntax { line, message };
    let rest = rest
        .trim()
        .strip_suffix('=')
        .ok_or_else(|| syntax("theory header must end with `=`".into()))?
        .trim();
    let (name, meta) = match rest.split_once(char::is_whitespace) {
        Some((name, meta)) => {
            let meta = meta
                .trim()
                .strip_prefix(':')
                .ok_or_else(|| {
                    syntax(format!(
                        "expected `: META` after theory name, found `{meta}`"
                    ))
                })?
                .trim();
            let meta = TheoryRef::parse(meta).map_err(|e| syntax(e.to_string()))?;
            (name, Some(meta))
        }
        None => (rest, None),
    };
    if name.is_empty() || name.contains('?') {
        return Err(syntax(format!("bad theory name `{name}`")));
    }
    Ok((name.to_string(), meta))
}

fn check_definitions(theory: &InterfaceTheory) -> Result<(), InterfaceError> {
    for (i, c) in theory.constants.iter().enumerate() {
        let Some(def) = &c.definition else { continue };
        if !def.free_vars().is_empty() {
            return Err(InterfaceError::OpenDefinition {
                theory: theory.uri.to_string(),
                constant: c.name.clone(),
            });
        }
        for s in def.symbols() {
            if s.theory() == theory.uri && !theory.constants[..i].iter().any(|d| d.name == s.name())
            {
                return Err(InterfaceError::ForwardReference {
                    theory: theory.uri.to_string(),
                    constant: c.name.clone(),
                    reference: s.name().to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Parse every theory in a file.
pub fn parse_interface_file(text: &str) -> Result<Vec<InterfaceTheory>, InterfaceError> {
    let mut namespace: Option<String> = None;
    let mut current: Option<InterfaceTheory> = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| InterfaceError::Syntax { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with("//") {
            continue;
        }
        let (keyword, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (trimmed, ""),
        };
        match (keyword, current.as_mut()) {
            ("namespace", None) => {
                if rest.is_empty() || rest.contains('?') || rest.contains(char::is_whitespace) {
                    return Err(syntax(format!("bad namespace `{rest}`")));
                }
                namespace = Some(rest.to_string());
            }
            ("theory", None) => {
                let ns = namespace
                    .clone()
                    .ok_or_else(|| syntax("theory declared before any namespace".into()))?;
                let (name, meta) = parse_theory_header(rest, line)?;
                current = Some(InterfaceTheory {
                    uri: TheoryRef {
                        namespace: ns,
                        module: name,
                    },
                    meta,
                    constants: Vec::new(),
                    includes: Vec::new(),
                });
            }
            ("end", Some(_)) if rest.is_empty() => {
                let theory = current.take().unwrap();
                check_definitions(&theory)?;
                out.push(theory);
            }
            ("include", Some(theory)) => {
                let r = TheoryRef::parse(rest).map_err(|e| syntax(e.to_string()))?;
                theory.includes.push(r);
            }
            (_, Some(theory)) => {
                let c = parse_declaration(trimmed, line)?;
                if theory.constant(&c.name).is_some() {
                    return Err(InterfaceError::DuplicateConstant {
                        theory: theory.uri.to_string(),
                        name: c.name,
                    });
                }
                theory.constants.push(c);
            }
            (other, None) => {
                return Err(syntax(format!(
                    "expected `namespace` or `theory`, found `{other}`"
                )))
            }
        }
    }
    if let Some(t) = current {
        return Err(InterfaceError::Syntax {
            line: text.lines().count(),
            message: format!("theory {} is missing `end`", t.uri),
        });
    }
    Ok(out)
}

/// Parse a file holding exactly one theory.
pub fn parse_interface(text: &str) -> Result<InterfaceTheory, InterfaceError> {
    let mut all = parse_interface_file(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        n => Err(InterfaceError::Syntax {
            line: 1,
            message: format!("expected one theory, found {n}"),
        }),
    }
}

/// All loaded theories, indexed by constant URI.
#[derive(Debug, Clone, Default)]
pub struct TheoryRegistry {
    theories: Vec<InterfaceTheory>,
    by_theory: BTreeMap<TheoryRef, usize>,
    by_symbol: HashMap<SymbolUri, (usize, usize)>,
}

impl TheoryRegistry {
    pub fn new(theories: Vec<InterfaceTheory>) -> Result<Self, InterfaceError> {
        let mut reg = TheoryRegistry::default();
        for (ti, t) in theories.iter().enumerate() {
            if reg.by_theory.insert(t.uri.clone(), ti).is_some() {
                return Err(InterfaceError::DuplicateTheory {
                    theory: t.uri.to_string(),
                });
            }
            for (ci, c) in t.constants.iter().enumerate() {
                reg.by_symbol.insert(t.symbol(c), (ti, ci));
            }
        }
        for t in &theories {
            for inc in &t.includes {
                if !reg.by_theory.contains_key(inc) {
                    return Err(InterfaceError::UnknownInclude {
                        theory: t.uri.to_string(),
                        include: inc.to_string(),
                    });
                }
            }
        }
        reg.theories = theories;
        reg.check_acyclic()?;
        Ok(reg)
    }

    fn check_acyclic(&self) -> Result<(), InterfaceError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.theories.len()];
        fn dfs(reg: &TheoryRegistry, i: usize, state: &mut [u8]) -> Result<(), InterfaceError> {
            match state[i] {
                1 => {
                    return Err(InterfaceError::IncludeCycle {
                        theory: reg.theories[i].uri.to_string(),
                    })
                }
                2 => return Ok(()),
                _ => {}
            }
            state[i] = 1;
            for inc in &reg.theories[i].includes {
                dfs(reg, reg.by_theory[inc], state)?;
            }
            state[i] = 2;
            Ok(())
        }
        for i in 0..self.theories.len() {
            dfs(self, i, &mut state)?;
        }
        Ok(())
    }

    pub fn theories(&self) -> &[InterfaceTheory] {
        &self.theories
    }

    pub fn theory(&self, uri: &TheoryRef) -> Option<&InterfaceTheory> {
        self.by_theory.get(uri).map(|&i| &self.theories[i])
    }

    pub fn lookup(&self, uri: &SymbolUri) -> Option<&Constant> {
        self.by_symbol
            .get(uri)
            .map(|&(t, c)| &self.theories[t].constants[c])
    }

    pub fn theory_of(&self, uri: &SymbolUri) -> Option<&InterfaceTheory> {
        self.by_symbol.get(uri).map(|&(t, _)| &self.theories[t])
    }

    pub fn declared_arity(&self, uri: &SymbolUri) -> Option<usize> {
        self.lookup(uri).and_then(Constant::declared_arity)
    }

    pub fn contains(&self, uri: &SymbolUri) -> bool {
        self.by_symbol.contains_key(uri)
    }

    pub fn len(&self) -> usize {
        self.by_symbol.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_symbol.is_empty()
    }
}
