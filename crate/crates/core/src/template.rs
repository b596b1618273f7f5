//! Template rules: definitional expansion of one symbol applied to arguments
//! into a target term with numbered holes.
//!
//! File format, one rule per line:
//!
//! ```text
//! template <URI> <ARITY> [drop N[,N]*] -> <term with (hole N)>
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{parse_term, BoundVar, ParseError, Term};
use crate::uri::SymbolUri;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TemplateRule {
    pub source: SymbolUri,
    pub arity: usize,
    pub template: Term,
    /// Holes that are intentionally unused.
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template for `{symbol}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: SymbolUri,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Term { line: usize, source: ParseError },
    #[error("template for `{symbol}`: {message}")]
    Invalid { symbol: SymbolUri, message: String },
}

impl TemplateRule {
    pub fn new(
        source: SymbolUri,
        arity: usize,
        template: Term,
        dropped: Vec<usize>,
    ) -> Result<Self, TemplateError> {
        let rule = TemplateRule {
            source,
            arity,
            template,
            dropped,
        };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<(), TemplateError> {
        let invalid = |message: String| TemplateError::Invalid {
            symbol: self.source.clone(),
            message,
        };
        let mut used = BTreeSet::new();
        self.template.visit(&mut |t| {
            if let Term::Hole(n) = t {
                used.insert(*n);
            }
        });
        if let Some(&n) = used.iter().find(|&&n| n > self.arity) {
            return Err(invalid(format!("hole {n} exceeds arity {}", self.arity)));
        }
        for i in 1..=self.arity {
            let dropped = self.dropped.contains(&i);
            if used.contains(&i) == dropped {
                return Err(invalid(if dropped {
                    format!("hole {i} is marked dropped but used")
                } else {
                    format!("hole {i} is neither used nor marked dropped")
                }));
            }
        }
        if self.principal().is_none() {
            return Err(invalid(
                "template must be headed by a symbol or binder".into(),
            ));
        }
        Ok(())
    }

    /// The symbol the expansion is headed by: the template symbol, the head
    /// of an application, or the binder.
    pub fn principal(&self) -> Option<&SymbolUri> {
        match &self.template {
            Term::Sym(s) => Some(s),
            Term::Bind { binder, .. } => Some(binder),
            Term::App(head, _) => {
                let mut h = head.as_ref();
                while let Term::App(inner, _) = h {
                    h = inner;
                }
                match h {
                    Term::Sym(s) => Some(s),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for TemplateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "template {} {}", self.source, self.arity)?;
        if !self.dropped.is_empty() {
            let d: Vec<String> = self.dropped.iter().map(|n| n.to_string()).collect();
            write!(f, " drop {}", d.join(","))?;
        }
        write!(f, " -> {}", self.template)
    }
}

fn parse_rule_line(line: &str, lineno: usize) -> Result<TemplateRule, TemplateError> {
    let syntax = |message: String| TemplateError::Syntax {
        line: lineno,
        message,
    };
    let (lhs, rhs) = line
        .split_once("->")
        .ok_or_else(|| syntax("expected `->`".into()))?;
    let mut words = lhs.split_whitespace();
    if words.next() != Some("template") {
        return Err(syntax("rule must start with `template`".into()));
    }
    let source = words
        .next()
        .ok_or_else(|| syntax("missing source URI".into()))?;
    let source = SymbolUri::parse(source).map_err(|e| syntax(e.to_string()))?;
    let arity = words
        .next()
        .and_then(|w| w.parse::<usize>().ok())
        .ok_or_else(|| syntax("missing or bad arity".into()))?;
    let mut dropped = Vec::new();
    match words.next() {
        None => {}
        Some("drop") => {
            let list = words
                .next()
                .ok_or_else(|| syntax("`drop` needs a list".into()))?;
            for n in list.split(',') {
                dropped.push(
                    n.parse()
                        .map_err(|_| syntax(format!("bad hole index `{n}`")))?,
                );
            }
        }
        Some(other) => return Err(syntax(format!("unexpected `{other}`"))),
    }
    if let Some(extra) = words.next() {
        return Err(syntax(format!("unexpected `{extra}`")));
    }
    let template = parse_term(rhs).map_err(|source| TemplateError::Term {
        line: lineno,
        source,
    })?;
    TemplateRule::new(source, arity, template, dropped)
}

/// Parse a rule file. Returns rules and per-line errors; bad lines are skipped.
pub fn parse_template_file(text: &str) -> (Vec<TemplateRule>, Vec<TemplateError>) {
    let mut rules = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with("//") {
            continue;
        }
        match parse_rule_line(t, i + 1) {
            Ok(r) => rules.push(r),
            Err(e) => errors.push(e),
        }
    }
    (rules, errors)
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Rename bound occurrences of `old` to `new`, stopping at rebinding.
fn rename_var(t: &Term, old: &str, new: &str) -> Term {
    match t {
        Term::Var(v) if v == old => Term::Var(new.to_string()),
        Term::App(head, args) => Term::App(
            Box::new(rename_var(head, old, new)),
            args.iter().map(|a| rename_var(a, old, new)).collect(),
        ),
        Term::Bind { binder, vars, body } => {
            let mut shadowed = false;
            let mut out = Vec::with_capacity(vars.len());
            for v in vars {
                let ty = if shadowed {
                    v.ty.clone()
                } else {
                    v.ty.as_ref().map(|ty| rename_var(ty, old, new))
                };
                out.push(BoundVar::new(v.name.clone(), ty));
                shadowed |= v.name == old;
            }
            let body = if shadowed {
                body.as_ref().clone()
            } else {
                rename_var(body, old, new)
            };
            Term::Bind {
                binder: binder.clone(),
                vars: out,
                body: Box::new(body),
            }
        }
        other => other.clone(),
    }
}

/// Rename every binder in `template` whose name is in `clash` so the
/// filled-in arguments cannot be captured.
pub(crate) fn freshen(template: &Term, clash: &BTreeSet<String>) -> Term {
    let mut avoid: BTreeSet<String> = clash.clone();
    avoid.extend(template.all_var_names());
    freshen_in(template, clash, &mut avoid)
}

fn freshen_in(t: &Term, clash: &BTreeSet<String>, avoid: &mut BTreeSet<String>) -> Term {
    match t {
        Term::App(head, args) => Term::App(
            Box::new(freshen_in(head, clash, avoid)),
            args.iter().map(|a| freshen_in(a, clash, avoid)).collect(),
        ),
        Term::Bind { binder, vars, body } => {
            let mut vars = vars.clone();
            let mut body = body.as_ref().clone();
            for i in 0..vars.len() {
                if !clash.contains(&vars[i].name) {
                    continue;
                }
                let old = vars[i].name.clone();
                let new = fresh_name(&old, avoid);
                avoid.insert(new.clone());
                // Later telescope entries and the body see the new name.
                for v in vars.iter_mut().skip(i + 1) {
                    if let Some(ty) = &v.ty {
                        v.ty = Some(rename_var(ty, &old, &new));
                    }
                }
                if !vars[i + 1..].iter().any(|v| v.name == old) {
                    body = rename_var(&body, &old, &new);
                }
                vars[i].name = new;
            }
            let vars = vars
                .into_iter()
                .map(|v| BoundVar::new(v.name, v.ty.map(|ty| freshen_in(&ty, clash, avoid))))
                .collect();
            Term::Bind {
                binder: binder.clone(),
                vars,
                body: Box::new(freshen_in(&body, clash, avoid)),
            }
        }
        other => other.clone(),
    }
}

/// Replace `(hole i)` by `args[i-1]`; holes without an argument stay.
pub(crate) fn fill_holes(t: &Term, args: &[Term]) -> Term {
    match t {
        Term::Hole(n) => args.get(n - 1).cloned().unwrap_or(Term::Hole(*n)),
        Term::App(head, a) => Term::App(
            Box::new(fill_holes(head, args)),
            a.iter().map(|x| fill_holes(x, args)).collect(),
        ),
        Term::Bind { binder, vars, body } => Term::Bind {
            binder: binder.clone(),
            vars: vars
                .iter()
                .map(|v| {
                    BoundVar::new(v.name.clone(), v.ty.as_ref().map(|ty| fill_holes(ty, args)))
                })
                .collect(),
            body: Box::new(fill_holes(body, args)),
        },
        other => other.clone(),
    }
}

pub(crate) fn free_names(args: &[Term]) -> BTreeSet<String> {
    args.iter().flat_map(|a| a.free_vars()).collect()
}

pub fn expand_template(rule: &TemplateRule, args: &[Term]) -> Result<Term, TemplateError> {
    if args.len() != rule.arity {
        return Err(TemplateError::ArityMismatch {
            symbol: rule.source.clone(),
            expected: rule.arity,
            got: args.len(),
        });
    }
    let fresh = freshen(&rule.template, &free_names(args));
    Ok(fill_holes(&fresh, args))
}
