//! Bottom-up rewriting of a term into a target library.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::argmap::apply_argmap;
use crate::dialect::{normalize_dialect, DialectRule};
use crate::graph::{find_path_constrained, AlignmentGraph, EdgeKind, Path};
use crate::interface::TheoryRegistry;
use crate::template::{free_names, freshen, TemplateRule};
use crate::term::{BoundVar, Term};
use crate::uri::{LibraryId, SymbolUri};

/// Why a symbol occurrence was left in place or left a gap.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    NoPath,
    GroupConflict {
        groups: Vec<String>,
    },
    ArityMismatch {
        message: String,
    },
    TemplateUnavailable {
        reason: String,
    },
    /// Target slot with no source argument; the output holds `(hole slot)`.
    MissingArgument {
        slot: usize,
    },
    /// A symbol outside the target library survived, e.g. an inserted wrapper.
    ForeignSymbol,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Issue {
    pub symbol: SymbolUri,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IssueKind::NoPath => write!(f, "{}: no path to target library", self.symbol),
            IssueKind::GroupConflict { groups } => {
                write!(
                    f,
                    "{}: conflicts with group(s) {}",
                    self.symbol,
                    groups.join(",")
                )
            }
            IssueKind::ArityMismatch { message } => write!(f, "{}: {message}", self.symbol),
            IssueKind::TemplateUnavailable { reason } => {
                write!(f, "{}: template not applicable: {reason}", self.symbol)
            }
            IssueKind::MissingArgument { slot } => {
                write!(f, "{}: no argument for target slot {slot}", self.symbol)
            }
            IssueKind::ForeignSymbol => {
                write!(f, "{}: result symbol outside target library", self.symbol)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TranslationResult {
    pub term: Term,
    pub target: LibraryId,
    /// Input symbols left in place.
    pub untranslated: BTreeSet<SymbolUri>,
    /// Non-empty paths that were applied, per source symbol.
    pub paths_used: BTreeMap<SymbolUri, Path>,
    pub complete: bool,
    pub issues: Vec<Issue>,
}

/// Translation settings beyond the graph itself.
#[derive(Debug, Clone, Copy)]
pub struct Translator<'a> {
    pub graph: &'a AlignmentGraph,
    /// Supplies declared arities of interface targets.
    pub registry: Option<&'a TheoryRegistry>,
    pub dialect: &'a [DialectRule],
    pub max_template_depth: usize,
}

impl<'a> Translator<'a> {
    pub fn new(graph: &'a AlignmentGraph) -> Self {
        Translator {
            graph,
            registry: None,
            dialect: &[],
            max_template_depth: 16,
        }
    }

    pub fn with_registry(mut self, registry: &'a TheoryRegistry) -> Self {
        self.registry = Some(registry);
        self
    }

    pub fn with_dialect(mut self, rules: &'a [DialectRule]) -> Self {
        self.dialect = rules;
        self
    }

    pub fn translate(&self, term: &Term, target: &LibraryId) -> TranslationResult {
        let eliminate: Vec<DialectRule> = self
            .dialect
            .iter()
            .filter(|r| r.is_eliminate())
            .cloned()
            .collect();
        let pre = normalize_dialect(term, &eliminate);
        let mut run = Run {
            tr: self,
            target,
            committed: BTreeSet::new(),
            resolved: HashMap::new(),
            untranslated: BTreeSet::new(),
            issues: BTreeSet::new(),
            paths_used: BTreeMap::new(),
        };
        run.resolve_all(&pre.symbols());
        let rewritten = run.rewrite(&pre, 0);
        // Inserted wrappers must belong to the output vocabulary.
        let post: Vec<DialectRule> = self
            .dialect
            .iter()
            .filter(|r| r.is_eliminate() || self.graph.library_of(&r.wrapper) == Some(target))
            .cloned()
            .collect();
        let out = normalize_dialect(&rewritten, &post);
        for s in out.symbols() {
            if self.graph.library_of(&s) != Some(target) && !run.untranslated.contains(&s) {
                run.issues.insert(Issue {
                    symbol: s,
                    kind: IssueKind::ForeignSymbol,
                });
            }
        }
        let complete = run.untranslated.is_empty()
            && !out.contains_hole()
            && run
                .issues
                .iter()
                .all(|i| i.kind != IssueKind::ForeignSymbol);
        TranslationResult {
            term: out,
            target: target.clone(),
            untranslated: run.untranslated,
            paths_used: run.paths_used,
            complete,
            issues: run.issues.into_iter().collect(),
        }
    }
}

/// Translate with default settings: no interface arities, no dialect rules.
pub fn translate(term: &Term, target: &LibraryId, graph: &AlignmentGraph) -> TranslationResult {
    Translator::new(graph).translate(term, target)
}

type Resolution = Result<Path, IssueKind>;

struct Run<'a, 'b> {
    tr: &'b Translator<'a>,
    target: &'b LibraryId,
    committed: BTreeSet<String>,
    resolved: HashMap<SymbolUri, Resolution>,
    untranslated: BTreeSet<SymbolUri>,
    issues: BTreeSet<Issue>,
    paths_used: BTreeMap<SymbolUri, Path>,
}

/// Names no parsed term can contain, standing in for template holes while the
/// template body is itself rewritten.
fn placeholder(n: usize) -> String {
    format!("\0hole{n}")
}

fn holes_to_placeholders(t: &Term) -> Term {
    map_leaves(t, &|leaf| match leaf {
        Term::Hole(n) => Some(Term::Var(placeholder(*n))),
        _ => None,
    })
}

fn fill_placeholders(t: &Term, slots: &[Term]) -> Term {
    map_leaves(t, &|leaf| match leaf {
        Term::Var(v) => v
            .strip_prefix("\0hole")
            .and_then(|n| n.parse::<usize>().ok())
            .map(|n| slots[n - 1].clone()),
        _ => None,
    })
}

fn map_leaves(t: &Term, f: &impl Fn(&Term) -> Option<Term>) -> Term {
    match t {
        Term::App(h, args) => Term::App(
            Box::new(map_leaves(h, f)),
            args.iter().map(|a| map_leaves(a, f)).collect(),
        ),
        Term::Bind { binder, vars, body } => Term::Bind {
            binder: binder.clone(),
            vars: vars
                .iter()
                .map(|v| BoundVar::new(v.name.clone(), v.ty.as_ref().map(|ty| map_leaves(ty, f))))
                .collect(),
            body: Box::new(map_leaves(body, f)),
        },
        leaf => f(leaf).unwrap_or_else(|| leaf.clone()),
    }
}

fn template_rule(path: &Path, at: usize) -> &TemplateRule {
    match &path.edges[at].kind {
        EdgeKind::Template { rule } => rule,
        EdgeKind::Align { .. } => unreachable!("template_at points at a template edge"),
    }
}

impl Run<'_, '_> {
    /// Paths for the input's symbols, with group commitments iterated to a
    /// fixpoint. Symbols blocked by a committed group are reported together
    /// with the symbols that committed it.
    fn resolve_all(&mut self, symbols: &BTreeSet<SymbolUri>) {
        let graph = self.tr.graph;
        let mut found: BTreeMap<&SymbolUri, Option<Path>>;
        loop {
            found = symbols
                .iter()
                .map(|s| {
                    (
                        s,
                        find_path_constrained(s, self.target, graph, &self.committed),
                    )
                })
                .collect();
            let used: BTreeSet<String> = found.values().flatten().flat_map(Path::groups).collect();
            if used.is_subset(&self.committed) {
                break;
            }
            self.committed.extend(used);
        }
        let mut blocked: BTreeMap<&SymbolUri, Vec<String>> = BTreeMap::new();
        for (s, p) in &found {
            if p.is_some() {
                continue;
            }
            if find_path_constrained(s, self.target, graph, &BTreeSet::new()).is_none() {
                continue;
            }
            let mut groups: Vec<String> = self
                .committed
                .iter()
                .filter(|g| {
                    let one = BTreeSet::from([(*g).clone()]);
                    find_path_constrained(s, self.target, graph, &one).is_none()
                })
                .cloned()
                .collect();
            if groups.is_empty() {
                groups = self.committed.iter().cloned().collect();
            }
            blocked.insert(s, groups);
        }
        let mut committers: BTreeMap<&SymbolUri, BTreeSet<String>> = BTreeMap::new();
        for groups in blocked.values() {
            for (s, p) in &found {
                if let Some(p) = p {
                    let hit: BTreeSet<String> = p
                        .groups()
                        .into_iter()
                        .filter(|g| groups.contains(g))
                        .collect();
                    if !hit.is_empty() {
                        committers.entry(s).or_default().extend(hit);
                    }
                }
            }
        }
        for (s, p) in found {
            let res = if let Some(groups) = blocked.get(s) {
                Err(IssueKind::GroupConflict {
                    groups: groups.clone(),
                })
            } else if let Some(groups) = committers.get(s) {
                Err(IssueKind::GroupConflict {
                    groups: groups.iter().cloned().collect(),
                })
            } else {
                p.ok_or(IssueKind::NoPath)
            };
            self.resolved.insert(s.clone(), res);
        }
    }

    fn resolve(&mut self, s: &SymbolUri) -> Resolution {
        if let Some(r) = self.resolved.get(s) {
            return r.clone();
        }
        let graph = self.tr.graph;
        let r = match find_path_constrained(s, self.target, graph, &self.committed) {
            Some(p) => Ok(p),
            None if find_path_constrained(s, self.target, graph, &BTreeSet::new()).is_some() => {
                Err(IssueKind::GroupConflict {
                    groups: self.committed.iter().cloned().collect(),
                })
            }
            None => Err(IssueKind::NoPath),
        };
        self.resolved.insert(s.clone(), r.clone());
        r
    }

    fn fail(&mut self, s: &SymbolUri, kind: IssueKind) {
        self.untranslated.insert(s.clone());
        self.issues.insert(Issue {
            symbol: s.clone(),
            kind,
        });
    }

    fn used(&mut self, s: &SymbolUri, p: Path) {
        if !p.is_empty() {
            self.paths_used.entry(s.clone()).or_insert(p);
        }
    }

    fn rewrite(&mut self, t: &Term, depth: usize) -> Term {
        match t {
            Term::Sym(s) => self.rewrite_sym(s, depth),
            Term::App(head, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.rewrite(a, depth)).collect();
                match head.as_ref() {
                    Term::Sym(s) => self.rewrite_app(s, args, depth),
                    other => Term::App(Box::new(self.rewrite(other, depth)), args),
                }
            }
            Term::Bind { binder, vars, body } => {
                let vars = vars
                    .iter()
                    .map(|v| {
                        BoundVar::new(
                            v.name.clone(),
                            v.ty.as_ref().map(|ty| self.rewrite(ty, depth)),
                        )
                    })
                    .collect();
                let body = Box::new(self.rewrite(body, depth));
                let binder = match self.resolve(binder) {
                    Ok(p) if p.template_at().is_some() => {
                        self.fail(
                            binder,
                            IssueKind::TemplateUnavailable {
                                reason: "binders are only translated through alignments".into(),
                            },
                        );
                        binder.clone()
                    }
                    Ok(p) => {
                        let to = p.target().clone();
                        self.used(binder, p);
                        to
                    }
                    Err(kind) => {
                        self.fail(binder, kind);
                        binder.clone()
                    }
                };
                Term::Bind { binder, vars, body }
            }
            leaf => leaf.clone(),
        }
    }

    fn rewrite_sym(&mut self, s: &SymbolUri, depth: usize) -> Term {
        let keep = Term::Sym(s.clone());
        let p = match self.resolve(s) {
            Ok(p) => p,
            Err(kind) => {
                self.fail(s, kind);
                return keep;
            }
        };
        match p.template_at() {
            None => {
                let to = p.target().clone();
                self.used(s, p);
                Term::Sym(to)
            }
            Some(at) => {
                let rule = template_rule(&p, at).clone();
                if rule.arity > 0 {
                    self.fail(
                        s,
                        IssueKind::TemplateUnavailable {
                            reason: format!("needs {} arguments, symbol is unapplied", rule.arity),
                        },
                    );
                    return keep;
                }
                match self.expand(&rule, &[], depth) {
                    Ok(t) => {
                        self.used(s, p);
                        t
                    }
                    Err(reason) => {
                        self.fail(s, IssueKind::TemplateUnavailable { reason });
                        keep
                    }
                }
            }
        }
    }

    fn rewrite_app(&mut self, s: &SymbolUri, args: Vec<Term>, depth: usize) -> Term {
        let p = match self.resolve(s) {
            Ok(p) => p,
            Err(kind) => {
                self.fail(s, kind);
                return Term::App(Box::new(Term::Sym(s.clone())), args);
            }
        };
        if p.is_empty() {
            return Term::App(Box::new(Term::Sym(s.clone())), args);
        }
        let map = p.argmap();
        let template = p.template_at().map(|at| template_rule(&p, at).clone());
        let observed = map.observed_arity(args.len());
        let arity = match &template {
            Some(rule) => observed.max(rule.arity),
            None => self
                .tr
                .registry
                .and_then(|r| r.declared_arity(p.target()))
                .unwrap_or(observed),
        };
        let slots = match apply_argmap(&map, &args, arity) {
            Ok(slots) => slots,
            Err(e) => {
                self.fail(
                    s,
                    IssueKind::ArityMismatch {
                        message: e.to_string(),
                    },
                );
                return Term::App(Box::new(Term::Sym(s.clone())), args);
            }
        };
        let mut missing = Vec::new();
        let slots: Vec<Term> = slots
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                slot.unwrap_or_else(|| {
                    missing.push(i + 1);
                    Term::Hole(i + 1)
                })
            })
            .collect();
        let result = match template {
            None => {
                let head = Term::Sym(p.target().clone());
                if slots.is_empty() {
                    head
                } else {
                    Term::App(Box::new(head), slots)
                }
            }
            Some(rule) => {
                let (inner, extra) = slots.split_at(rule.arity);
                match self.expand(&rule, inner, depth) {
                    Ok(t) if extra.is_empty() => t,
                    Ok(t) => Term::App(Box::new(t), extra.to_vec()),
                    Err(reason) => {
                        self.fail(s, IssueKind::TemplateUnavailable { reason });
                        return Term::App(Box::new(Term::Sym(s.clone())), args);
                    }
                }
            }
        };
        for slot in missing {
            self.issues.insert(Issue {
                symbol: s.clone(),
                kind: IssueKind::MissingArgument { slot },
            });
        }
        self.used(s, p);
        result
    }

    /// Rewrite the template body into the target, then plug in the arguments.
    /// Fails if any symbol introduced by the template cannot be translated.
    fn expand(
        &mut self,
        rule: &TemplateRule,
        slots: &[Term],
        depth: usize,
    ) -> Result<Term, String> {
        if depth >= self.tr.max_template_depth {
            return Err("template expansion depth exceeded".into());
        }
        let body = holes_to_placeholders(&freshen(&rule.template, &free_names(slots)));
        let saved_untranslated = std::mem::take(&mut self.untranslated);
        let saved_issues = std::mem::take(&mut self.issues);
        let rewritten = self.rewrite(&body, depth + 1);
        let inner_untranslated = std::mem::replace(&mut self.untranslated, saved_untranslated);
        let inner_issues = std::mem::replace(&mut self.issues, saved_issues);
        if !inner_untranslated.is_empty() {
            let names: Vec<String> = inner_untranslated.iter().map(|s| s.to_string()).collect();
            return Err(format!(
                "expansion symbol(s) untranslatable: {}",
                names.join(", ")
            ));
        }
        self.issues.extend(inner_issues);
        Ok(fill_placeholders(&rewritten, slots))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::parse_alignment_file;
    use crate::graph::build_graph;
    use crate::template::parse_template_file;
    use crate::term::parse_term;
    use crate::uri::{parse_uri, NamespaceTable};

    fn ns() -> NamespaceTable {
        let mut t = NamespaceTable::new();
        for (p, l) in [("a:", "A"), ("b:", "B"), ("i:", "I")] {
            t.insert(p, LibraryId::new(l)).unwrap();
        }
        t
    }

    fn setup(aligns: &str, templates: &str) -> AlignmentGraph {
        let parsed = parse_alignment_file(aligns);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        let (rules, errs) = parse_template_file(templates);
        assert!(errs.is_empty(), "{errs:?}");
        build_graph(&parsed.alignments, &rules, ns())
    }

    fn b() -> LibraryId {
        LibraryId::new("B")
    }

    #[test]
    fn swaps_arguments_through_interface() {
        let g = setup(
            "a:?M?f i:?T?f\ni:?T?f b:?N?g arguments=\"(1,2)(2,1)\"\n",
            "",
        );
        let t = parse_term(r#"(app (sym "a:?M?f") (var x) (var y))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(r.complete, "{:?}", r.issues);
        assert_eq!(
            r.term.to_string(),
            r#"(app (sym "b:?N?g") (var y) (var x))"#
        );
        assert_eq!(r.paths_used[&parse_uri("a:?M?f").unwrap()].len(), 2);
    }

    #[test]
    fn missing_symbol_left_in_place() {
        let g = setup("a:?M?f b:?N?f\n", "");
        let t = parse_term(r#"(app (sym "a:?M?f") (sym "a:?M?c"))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(!r.complete);
        assert_eq!(r.term.to_string(), r#"(app (sym "b:?N?f") (sym "a:?M?c"))"#);
        assert_eq!(r.untranslated.len(), 1);
        assert_eq!(r.issues[0].kind, IssueKind::NoPath);
    }

    #[test]
    fn dropped_slot_becomes_hole() {
        let g = setup("a:?M?eq b:?N?eq arguments=\"(1,2)(2,3)\"\n", "");
        let t = parse_term(r#"(app (sym "a:?M?eq") (var x) (var y))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(!r.complete);
        assert!(r.untranslated.is_empty());
        assert_eq!(
            r.term.to_string(),
            r#"(app (sym "b:?N?eq") (hole 1) (var x) (var y))"#
        );
        assert_eq!(r.issues[0].kind, IssueKind::MissingArgument { slot: 1 });
    }

    #[test]
    fn arity_mismatch_reported() {
        let g = setup("a:?M?f b:?N?f arguments=\"(3,1)(1,3)\"\n", "");
        let t = parse_term(r#"(app (sym "a:?M?f") (var x))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(matches!(r.issues[0].kind, IssueKind::ArityMismatch { .. }));
        assert_eq!(r.term, t);
    }

    #[test]
    fn template_then_alignment() {
        let g = setup(
            "a:?M?arrow i:?T?arrow\ni:?T?Pi b:?N?pi\n",
            "template i:?T?arrow 2 -> (bind \"i:?T?Pi\" ((x (hole 1))) (hole 2))\n",
        );
        let t = parse_term(r#"(app (sym "a:?M?arrow") (var x) (var B))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(r.complete, "{:?}", r.issues);
        assert_eq!(
            r.term.to_string(),
            r#"(bind "b:?N?pi" ((x1 (var x))) (var B))"#
        );
        let path = &r.paths_used[&parse_uri("a:?M?arrow").unwrap()];
        assert_eq!(path.template_at(), Some(1));
    }

    #[test]
    fn template_with_untranslatable_expansion_keeps_source() {
        let g = setup(
            "a:?M?arrow i:?T?arrow\n",
            "template i:?T?arrow 2 -> (bind \"i:?T?Pi\" ((x (hole 1))) (hole 2))\ntemplate i:?T?Pi 0 -> (sym \"b:?N?never\")\n",
        );
        let g2 = setup(
            "a:?M?arrow i:?T?arrow\n",
            "template i:?T?arrow 2 -> (bind \"i:?T?Pi\" ((x (hole 1))) (hole 2))\n",
        );
        let t = parse_term(r#"(app (sym "a:?M?arrow") (var A) (var B))"#).unwrap();
        for g in [g, g2] {
            let r = translate(&t, &b(), &g);
            assert_eq!(r.term, t);
            assert!(r.untranslated.contains(&parse_uri("a:?M?arrow").unwrap()));
            assert_eq!(r.untranslated.len(), 1);
        }
    }

    #[test]
    fn group_conflict_reports_both() {
        // f's only route commits group g; at i:?T?h group g offers an edge
        // into a dead end, so h cannot reach B consistently.
        let g = setup(
            "a:?M?f i:?T?f group=\"g\" direction=\"forward\"\n\
             i:?T?f b:?N?f group=\"g\" direction=\"forward\"\n\
             a:?M?h i:?T?h direction=\"forward\"\n\
             i:?T?h i:?T?dead group=\"g\" direction=\"forward\"\n\
             i:?T?h b:?N?h direction=\"forward\"\n",
            "",
        );
        let only_h = parse_term(r#"(app (sym "a:?M?h") (var x))"#).unwrap();
        assert!(translate(&only_h, &b(), &g).complete);
        let both = parse_term(r#"(app (sym "a:?M?f") (app (sym "a:?M?h") (var x)))"#).unwrap();
        let r = translate(&both, &b(), &g);
        assert_eq!(r.term, both);
        assert_eq!(r.untranslated.len(), 2);
        assert!(r
            .issues
            .iter()
            .all(|i| matches!(&i.kind, IssueKind::GroupConflict { groups } if groups == &["g"])));
    }

    #[test]
    fn binder_translated_by_alignment() {
        let g = setup("a:?M?lam b:?N?lambda\na:?M?nat b:?N?nat\n", "");
        let t = parse_term(r#"(bind "a:?M?lam" ((x (sym "a:?M?nat"))) (var x))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(r.complete);
        assert_eq!(
            r.term.to_string(),
            r#"(bind "b:?N?lambda" ((x (sym "b:?N?nat"))) (var x))"#
        );
    }

    #[test]
    fn target_symbols_untouched() {
        let g = setup("a:?M?f b:?N?f\n", "");
        let t = parse_term(r#"(app (sym "b:?N?f") (var x))"#).unwrap();
        let r = translate(&t, &b(), &g);
        assert!(r.complete);
        assert_eq!(r.term, t);
        assert!(r.paths_used.is_empty());
    }
}
