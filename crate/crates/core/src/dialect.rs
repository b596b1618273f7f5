//! Wrapper normalization between formalization levels, such as the
//! type-as-term coercions `tp` and `tm`.
//!
//! Rule file, one rule per line:
//!
//! ```text
//! eliminate <URI>
//! insert <URI> <bound-type|app-arg|bind-body>
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{BoundVar, Term};
use crate::uri::SymbolUri;

/// Where an `insert` rule places its wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContextTag {
    /// Type annotation of a bound variable.
    BoundType,
    /// Argument of an application.
    AppArg,
    /// Body of a binder.
    BindBody,
}

impl FromStr for ContextTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bound-type" => Ok(ContextTag::BoundType),
            "app-arg" => Ok(ContextTag::AppArg),
            "bind-body" => Ok(ContextTag::BindBody),
            _ => Err(format!("unknown context tag `{s}`")),
        }
    }
}

impl fmt::Display for ContextTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextTag::BoundType => "bound-type",
            ContextTag::AppArg => "app-arg",
            ContextTag::BindBody => "bind-body",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DialectMode {
    Eliminate,
    Insert(ContextTag),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DialectRule {
    pub wrapper: SymbolUri,
    pub mode: DialectMode,
}

impl DialectRule {
    pub fn eliminate(wrapper: SymbolUri) -> Self {
        DialectRule {
            wrapper,
            mode: DialectMode::Eliminate,
        }
    }

    pub fn insert(wrapper: SymbolUri, tag: ContextTag) -> Self {
        DialectRule {
            wrapper,
            mode: DialectMode::Insert(tag),
        }
    }

    pub fn is_eliminate(&self) -> bool {
        self.mode == DialectMode::Eliminate
    }
}

impl fmt::Display for DialectRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            DialectMode::Eliminate => write!(f, "eliminate {}", self.wrapper),
            DialectMode::Insert(tag) => write!(f, "insert {} {tag}", self.wrapper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DialectError {
    pub line: usize,
    pub message: String,
}

pub fn parse_dialect_file(text: &str) -> (Vec<DialectRule>, Vec<DialectError>) {
    let mut rules = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with("//") {
            continue;
        }
        let words: Vec<&str> = t.split_whitespace().collect();
        let err = |message: String| DialectError {
            line: i + 1,
            message,
        };
        let parsed = match words.as_slice() {
            ["eliminate", uri] => SymbolUri::parse(uri)
                .map(DialectRule::eliminate)
                .map_err(|e| err(e.to_string())),
            ["insert", uri, tag] => SymbolUri::parse(uri)
                .map_err(|e| err(e.to_string()))
                .and_then(|u| {
                    tag.parse()
                        .map(|tag| DialectRule::insert(u, tag))
                        .map_err(err)
                }),
            _ => Err(err(format!(
                "expected `eliminate URI` or `insert URI TAG`, found `{t}`"
            ))),
        };
        match parsed {
            Ok(r) => rules.push(r),
            Err(e) => errors.push(e),
        }
    }
    (rules, errors)
}

fn is_wrapped(t: &Term, wrapper: &SymbolUri) -> bool {
    match t {
        Term::App(head, args) => {
            args.len() == 1 && matches!(head.as_ref(), Term::Sym(s) if s == wrapper)
        }
        _ => false,
    }
}

struct Normalizer<'a> {
    rules: &'a [DialectRule],
}

impl Normalizer<'_> {
    fn wrap(&self, t: Term, tag: ContextTag) -> Term {
        let mut t = t;
        for r in self.rules {
            if r.mode == DialectMode::Insert(tag) && !is_wrapped(&t, &r.wrapper) {
                t = Term::app(Term::Sym(r.wrapper.clone()), vec![t]);
            }
        }
        t
    }

    fn eliminates(&self, s: &SymbolUri) -> bool {
        self.rules
            .iter()
            .any(|r| r.is_eliminate() && r.wrapper == *s)
    }

    fn run(&self, t: &Term) -> Term {
        match t {
            Term::App(head, args) => {
                let head = self.run(head);
                let args: Vec<Term> = args
                    .iter()
                    .map(|a| self.wrap(self.run(a), ContextTag::AppArg))
                    .collect();
                if args.len() == 1 {
                    if let Term::Sym(s) = &head {
                        if self.eliminates(s) {
                            return args.into_iter().next().unwrap();
                        }
                    }
                }
                Term::App(Box::new(head), args)
            }
            Term::Bind { binder, vars, body } => Term::Bind {
                binder: binder.clone(),
                vars: vars
                    .iter()
                    .map(|v| {
                        BoundVar::new(
                            v.name.clone(),
                            v.ty.as_ref()
                                .map(|ty| self.wrap(self.run(ty), ContextTag::BoundType)),
                        )
                    })
                    .collect(),
                body: Box::new(self.wrap(self.run(body), ContextTag::BindBody)),
            },
            other => other.clone(),
        }
    }
}

/// One bottom-up pass: `eliminate` rules strip unary applications of their
/// wrapper, `insert` rules wrap subterms in their context position.
pub fn normalize_dialect(term: &Term, rules: &[DialectRule]) -> Term {
    if rules.is_empty() {
        return term.clone();
    }
    Normalizer { rules }.run(term)
}
