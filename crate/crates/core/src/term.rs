//! Expression trees and their s-expression syntax.
//!
//! ```text
//! term  := (sym "URI") | (var IDENT) | (lit IDENT "TEXT") | (hole N)
//!        | (app term term+) | (bind "URI" (bvar+) term)
//! bvar  := (IDENT) | (IDENT term)
//! ```
//!
//! `;` starts a line comment. `Display` emits the canonical single-line form.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::uri::{SymbolUri, UriError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Sym(SymbolUri),
    Var(String),
    /// Application; `args` is never empty.
    App(Box<Term>, Vec<Term>),
    Bind {
        binder: SymbolUri,
        vars: Vec<BoundVar>,
        body: Box<Term>,
    },
    Lit {
        kind: String,
        value: String,
    },
    /// Numbered placeholder: a template parameter, or a target argument slot
    /// the source expression could not fill.
    Hole(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundVar {
    pub name: String,
    pub ty: Option<Term>,
}

impl BoundVar {
    pub fn new(name: impl Into<String>, ty: Option<Term>) -> Self {
        BoundVar {
            name: name.into(),
            ty,
        }
    }
}

impl Term {
    pub fn sym(uri: SymbolUri) -> Term {
        Term::Sym(uri)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// # Panics
    /// If `args` is empty.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "application without arguments");
        Term::App(Box::new(head), args)
    }

    pub fn bind(binder: SymbolUri, vars: Vec<BoundVar>, body: Term) -> Term {
        Term::Bind {
            binder,
            vars,
            body: Box::new(body),
        }
    }

    pub fn lit(kind: impl Into<String>, value: impl Into<String>) -> Term {
        Term::Lit {
            kind: kind.into(),
            value: value.into(),
        }
    }

    pub fn head_symbol(&self) -> Option<&SymbolUri> {
        match self {
            Term::App(head, _) => match head.as_ref() {
                Term::Sym(s) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Sym(_) | Term::Var(_) | Term::Lit { .. } | Term::Hole(_) => 1,
            Term::App(head, args) => {
                1 + head.node_count() + args.iter().map(Term::node_count).sum::<usize>()
            }
            Term::Bind { vars, body, .. } => {
                1 + vars
                    .iter()
                    .filter_map(|v| v.ty.as_ref())
                    .map(Term::node_count)
                    .sum::<usize>()
                    + body.node_count()
            }
        }
    }

    pub fn symbols(&self) -> BTreeSet<SymbolUri> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<SymbolUri>) {
        match self {
            Term::Sym(s) => {
                out.insert(s.clone());
            }
            Term::App(head, args) => {
                head.collect_symbols(out);
                args.iter().for_each(|a| a.collect_symbols(out));
            }
            Term::Bind {
                binder, vars, body, ..
            } => {
                out.insert(binder.clone());
                for v in vars {
                    if let Some(ty) = &v.ty {
                        ty.collect_symbols(out);
                    }
                }
                body.collect_symbols(out);
            }
            Term::Var(_) | Term::Lit { .. } | Term::Hole(_) => {}
        }
    }

    /// Free variables. Binders scope like telescopes: the type of a bound
    /// variable sees the variables bound before it.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, scope: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !scope.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::App(head, args) => {
                head.collect_free(scope, out);
                args.iter().for_each(|a| a.collect_free(scope, out));
            }
            Term::Bind { vars, body, .. } => {
                let depth = scope.len();
                for v in vars {
                    if let Some(ty) = &v.ty {
                        ty.collect_free(scope, out);
                    }
                    scope.push(v.name.clone());
                }
                body.collect_free(scope, out);
                scope.truncate(depth);
            }
            Term::Sym(_) | Term::Lit { .. } | Term::Hole(_) => {}
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| match t {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Bind { vars, .. } => {
                out.extend(vars.iter().map(|v| v.name.clone()));
            }
            _ => {}
        });
        out
    }

    pub fn contains_hole(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Hole(_)));
        found
    }

    /// Pre-order walk over every subterm.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match self {
            Term::App(head, args) => {
                head.visit(f);
                args.iter().for_each(|a| a.visit(f));
            }
            Term::Bind { vars, body, .. } => {
                for v in vars {
                    if let Some(ty) = &v.ty {
                        ty.visit(f);
                    }
                }
                body.visit(f);
            }
            _ => {}
        }
    }
}

pub fn symbols_of(term: &Term) -> BTreeSet<SymbolUri> {
    term.symbols()
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sym(s) => {
                f.write_str("(sym ")?;
                write_quoted(f, &s.to_string())?;
                f.write_str(")")
            }
            Term::Var(v) => write!(f, "(var {v})"),
            Term::Lit { kind, value } => {
                write!(f, "(lit {kind} ")?;
                write_quoted(f, value)?;
                f.write_str(")")
            }
            Term::Hole(n) => write!(f, "(hole {n})"),
            Term::App(head, args) => {
                write!(f, "(app {head}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Term::Bind { binder, vars, body } => {
                f.write_str("(bind ")?;
                write_quoted(f, &binder.to_string())?;
                f.write_str(" (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match &v.ty {
                        Some(ty) => write!(f, "({} {ty})", v.name)?,
                        None => write!(f, "({})", v.name)?,
                    }
                }
                write!(f, ") {body})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown node keyword `{keyword}`")]
    UnknownHeadKeyword {
        keyword: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: {source}")]
    Uri {
        line: usize,
        col: usize,
        source: UriError,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::UnknownHeadKeyword { line, col, .. }
            | ParseError::Uri { line, col, .. } => (*line, *col),
        }
    }

    /// Shift the reported position, for terms embedded in a larger file.
    pub fn offset(self, line_offset: usize, col_offset: usize) -> ParseError {
        let col_shift = |line: usize, col: usize| if line == 1 { col + col_offset } else { col };
        match self {
            ParseError::Syntax { line, col, message } => ParseError::Syntax {
                line: line + line_offset,
                col: col_shift(line, col),
                message,
            },
            ParseError::UnknownHeadKeyword { keyword, line, col } => {
                ParseError::UnknownHeadKeyword {
                    keyword,
                    line: line + line_offset,
                    col: col_shift(line, col),
                }
            }
            ParseError::Uri { line, col, source } => ParseError::Uri {
                line: line + line_offset,
                col: col_shift(line, col),
                source,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Str(String),
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        loop {
            let Some(c) = self.peek_char() else {
                return Ok(None);
            };
            let (line, col) = (self.line, self.col);
            let tok = match c {
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                ';' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    continue;
                }
                '(' => {
                    self.bump();
                    Tok::Open
                }
                ')' => {
                    self.bump();
                    Tok::Close
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None => return Err(Self::error(line, col, "unterminated string")),
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                _ => return Err(Self::error(self.line, self.col, "bad escape")),
                            },
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Str(s)
                }
                _ => {
                    let mut s = String::new();
                    while let Some(c) = self.peek_char() {
                        if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                            break;
                        }
                        s.push(c);
                        self.bump();
                    }
                    Tok::Atom(s)
                }
            };
            return Ok(Some(Token { tok, line, col }));
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Token>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(text),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<Option<&Token>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next_token()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        if let Some(t) = self.peeked.take() {
            return Ok(t);
        }
        let (line, col) = (self.lexer.line, self.lexer.col);
        self.lexer.next_token()?.ok_or(ParseError::Syntax {
            line,
            col,
            message: "unexpected end of input".into(),
        })
    }

    fn err(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect_open(&mut self) -> Result<Token, ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Open => Ok(t),
            _ => Err(Self::err(&t, "expected `(`")),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Close => Ok(()),
            _ => Err(Self::err(&t, "expected `)`")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Atom(s) => Ok(s),
            _ => Err(Self::err(&t, format!("expected {what}"))),
        }
    }

    fn uri(&mut self) -> Result<SymbolUri, ParseError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Str(s) => SymbolUri::parse(s).map_err(|source| ParseError::Uri {
                line: t.line,
                col: t.col,
                source,
            }),
            _ => Err(Self::err(&t, "expected quoted URI")),
        }
    }

    fn at_close(&mut self) -> Result<bool, ParseError> {
        Ok(matches!(
            self.peek()?,
            Some(Token {
                tok: Tok::Close,
                ..
            })
        ))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let open = self.expect_open()?;
        let kw = self.next()?;
        let keyword = match &kw.tok {
            Tok::Atom(s) => s.clone(),
            _ => return Err(Self::err(&kw, "expected node keyword")),
        };
        let term = match keyword.as_str() {
            "sym" => Term::Sym(self.uri()?),
            "var" => Term::Var(self.ident("variable name")?),
            "lit" => {
                let kind = self.ident("literal kind")?;
                let t = self.next()?;
                match t.tok {
                    Tok::Str(value) => Term::Lit { kind, value },
                    _ => return Err(Self::err(&t, "expected quoted literal value")),
                }
            }
            "hole" => {
                let t = self.next()?;
                match &t.tok {
                    Tok::Atom(n) => match n.parse::<usize>() {
                        Ok(n) if n >= 1 => Term::Hole(n),
                        _ => return Err(Self::err(&t, "hole index must be a positive integer")),
                    },
                    _ => return Err(Self::err(&t, "expected hole index")),
                }
            }
            "app" => {
                let head = self.term()?;
                let mut args = Vec::new();
                while !self.at_close()? {
                    args.push(self.term()?);
                }
                if args.is_empty() {
                    return Err(Self::err(&open, "application needs at least one argument"));
                }
                Term::App(Box::new(head), args)
            }
            "bind" => {
                let binder = self.uri()?;
                let list = self.expect_open()?;
                let mut vars: Vec<BoundVar> = Vec::new();
                while !self.at_close()? {
                    let bv = self.expect_open()?;
                    let name = self.ident("bound variable name")?;
                    let ty = if self.at_close()? {
                        None
                    } else {
                        Some(self.term()?)
                    };
                    self.expect_close()?;
                    if vars.iter().any(|v| v.name == name) {
                        return Err(Self::err(&bv, format!("variable `{name}` bound twice")));
                    }
                    vars.push(BoundVar { name, ty });
                }
                self.expect_close()?;
                if vars.is_empty() {
                    return Err(Self::err(&list, "binder needs at least one variable"));
                }
                let body = self.term()?;
                Term::Bind {
                    binder,
                    vars,
                    body: Box::new(body),
                }
            }
            _ => {
                return Err(ParseError::UnknownHeadKeyword {
                    keyword,
                    line: kw.line,
                    col: kw.col,
                })
            }
        };
        self.expect_close()?;
        Ok(term)
    }
}

/// Parse exactly one term; trailing input other than comments is an error.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    if let Some(extra) = p.peek()? {
        return Err(Parser::err(extra, "trailing input after term"));
    }
    Ok(t)
}

/// Parse a leading term from `text`, returning it with the unconsumed rest.
/// Used by line-oriented formats that embed terms.
pub(crate) fn parse_term_prefix(text: &str) -> Result<(Term, &str), ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    debug_assert!(p.peeked.is_none());
    Ok((t, &text[p.lexer.pos..]))
}
