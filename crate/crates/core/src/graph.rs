//! The alignment graph and shortest-path search into a target library.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::alignment::{classify, Alignment, AlignmentClass, Direction};
use crate::argmap::{compose_argmaps, invert_argmap, ArgMap};
use crate::template::TemplateRule;
use crate::uri::{LibraryId, NamespaceTable, SymbolUri};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeKind {
    /// One direction of an alignment. `argmap` is already oriented along the
    /// edge (inverted for backward use).
    Align {
        alignment: Arc<Alignment>,
        used: Direction,
        argmap: ArgMap,
    },
    /// Definitional expansion; the edge ends at the expansion's principal
    /// symbol.
    Template { rule: Arc<TemplateRule> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: SymbolUri,
    pub to: SymbolUri,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn priority(&self) -> i64 {
        match &self.kind {
            EdgeKind::Align { alignment, .. } => alignment.priority,
            EdgeKind::Template { .. } => 0,
        }
    }

    pub fn group(&self) -> Option<&str> {
        match &self.kind {
            EdgeKind::Align { alignment, .. } => alignment.group.as_deref(),
            EdgeKind::Template { .. } => None,
        }
    }

    pub fn is_template(&self) -> bool {
        matches!(self.kind, EdgeKind::Template { .. })
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EdgeKind::Align {
                used,
                argmap,
                alignment,
            } => {
                write!(f, "{} -> {} [align {used}", self.from, self.to)?;
                if !argmap.is_identity() {
                    write!(f, " arguments={argmap}")?;
                }
                if let Some(g) = &alignment.group {
                    write!(f, " group={g}")?;
                }
                f.write_str("]")
            }
            EdgeKind::Template { rule } => {
                write!(
                    f,
                    "{} -> {} [template arity {}]",
                    self.from, self.to, rule.arity
                )
            }
        }
    }
}

/// A route from a symbol into the target library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub source: SymbolUri,
    pub edges: Vec<Edge>,
}

impl Path {
    /// Final symbol, or the source for an empty path.
    pub fn target(&self) -> &SymbolUri {
        self.edges.last().map(|e| &e.to).unwrap_or(&self.source)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn priority(&self) -> i64 {
        self.edges.iter().map(Edge::priority).sum()
    }

    /// Index of the first template edge.
    pub fn template_at(&self) -> Option<usize> {
        self.edges.iter().position(Edge::is_template)
    }

    /// Composition of the alignment maps before the first template edge.
    pub fn argmap(&self) -> ArgMap {
        let end = self.template_at().unwrap_or(self.edges.len());
        self.edges[..end]
            .iter()
            .fold(ArgMap::identity(), |acc, e| match &e.kind {
                EdgeKind::Align { argmap, .. } => compose_argmaps(&acc, argmap),
                EdgeKind::Template { .. } => acc,
            })
    }

    pub fn groups(&self) -> BTreeSet<String> {
        self.edges
            .iter()
            .filter_map(|e| e.group().map(str::to_string))
            .collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "{} (already in target)", self.source);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphWarning {
    DuplicateEdge(String),
    UnknownLibrary(SymbolUri),
}

impl fmt::Display for GraphWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphWarning::DuplicateEdge(e) => write!(f, "duplicate edge dropped: {e}"),
            GraphWarning::UnknownLibrary(s) => write!(f, "no library owns `{s}`"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AlignmentGraph {
    edges: Vec<Edge>,
    adjacency: HashMap<SymbolUri, Vec<usize>>,
    nodes: BTreeSet<SymbolUri>,
    namespaces: NamespaceTable,
    group_members: BTreeMap<String, Vec<usize>>,
    excluded: Vec<(Alignment, String)>,
    warnings: Vec<GraphWarning>,
}

impl AlignmentGraph {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> &BTreeSet<SymbolUri> {
        &self.nodes
    }

    /// Outgoing edges in search order: descending priority, then insertion.
    pub fn out_edges<'a>(&'a self, node: &SymbolUri) -> impl Iterator<Item = &'a Edge> + 'a {
        self.adjacency
            .get(node)
            .into_iter()
            .flatten()
            .map(|&i| &self.edges[i])
    }

    pub fn namespaces(&self) -> &NamespaceTable {
        &self.namespaces
    }

    pub fn library_of(&self, uri: &SymbolUri) -> Option<&LibraryId> {
        self.namespaces.library_of(uri)
    }

    pub fn excluded(&self) -> &[(Alignment, String)] {
        &self.excluded
    }

    pub fn warnings(&self) -> &[GraphWarning] {
        &self.warnings
    }

    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.group_members.keys().map(String::as_str)
    }

    fn group_has_out_edge(&self, group: &str, node: &SymbolUri) -> bool {
        self.group_members
            .get(group)
            .is_some_and(|m| m.iter().any(|&i| self.edges[i].from == *node))
    }

    fn add_edge(&mut self, edge: Edge) {
        let same_route = |a: &Edge| {
            a.from == edge.from
                && a.to == edge.to
                && match (&a.kind, &edge.kind) {
                    (EdgeKind::Align { argmap: x, .. }, EdgeKind::Align { argmap: y, .. }) => {
                        x == y
                    }
                    (EdgeKind::Template { rule: x }, EdgeKind::Template { rule: y }) => x == y,
                    _ => false,
                }
        };
        if self.out_edges(&edge.from).any(same_route) {
            self.warnings
                .push(GraphWarning::DuplicateEdge(edge.to_string()));
            return;
        }
        for s in [&edge.from, &edge.to] {
            if self.nodes.insert(s.clone()) && self.namespaces.library_of(s).is_none() {
                self.warnings.push(GraphWarning::UnknownLibrary(s.clone()));
            }
        }
        let idx = self.edges.len();
        if let Some(g) = edge.group() {
            self.group_members
                .entry(g.to_string())
                .or_default()
                .push(idx);
        }
        let prio = edge.priority();
        let list = self.adjacency.entry(edge.from.clone()).or_default();
        let at = list
            .iter()
            .position(|&j| self.edges[j].priority() < prio)
            .unwrap_or(list.len());
        list.insert(at, idx);
        self.edges.push(edge);
    }
}

/// Usable alignments become one edge per usable direction; unusable ones are
/// recorded in [`AlignmentGraph::excluded`]. Each template rule adds an edge
/// from its source to its principal symbol.
pub fn build_graph(
    alignments: &[Alignment],
    templates: &[TemplateRule],
    namespaces: NamespaceTable,
) -> AlignmentGraph {
    let mut g = AlignmentGraph {
        namespaces,
        ..AlignmentGraph::default()
    };
    for a in alignments {
        let (fwd, bwd) = match classify(a) {
            AlignmentClass::Unusable { reason } => {
                g.excluded.push((a.clone(), reason));
                continue;
            }
            AlignmentClass::Bidirectional => (true, true),
            AlignmentClass::Unidirectional { usable } => {
                (usable == Direction::Forward, usable == Direction::Backward)
            }
        };
        let shared = Arc::new(a.clone());
        if fwd {
            g.add_edge(Edge {
                from: a.from.clone(),
                to: a.to.clone(),
                kind: EdgeKind::Align {
                    alignment: shared.clone(),
                    used: Direction::Forward,
                    argmap: a.argmap.clone(),
                },
            });
        }
        if bwd {
            g.add_edge(Edge {
                from: a.to.clone(),
                to: a.from.clone(),
                kind: EdgeKind::Align {
                    alignment: shared,
                    used: Direction::Backward,
                    argmap: invert_argmap(&a.argmap),
                },
            });
        }
    }
    for rule in templates {
        let to = rule
            .principal()
            .expect("validated templates have a principal symbol")
            .clone();
        g.add_edge(Edge {
            from: rule.source.clone(),
            to,
            kind: EdgeKind::Template {
                rule: Arc::new(rule.clone()),
            },
        });
    }
    g
}

/// Shortest path under a set of committed groups: at any node where a
/// committed group has out-edges, only edges of committed groups may be taken.
///
/// Ties: fewest edges, then highest summed priority, then the
/// lexicographically smallest endpoint URI.
pub fn find_path_constrained(
    from: &SymbolUri,
    target: &LibraryId,
    graph: &AlignmentGraph,
    committed: &BTreeSet<String>,
) -> Option<Path> {
    if graph.library_of(from) == Some(target) {
        return Some(Path {
            source: from.clone(),
            edges: Vec::new(),
        });
    }
    // Per reached node: best priority sum and the edge that got there.
    let mut best: HashMap<&SymbolUri, (i64, Option<usize>)> = HashMap::new();
    best.insert(from, (0, None));
    let mut frontier: Vec<&SymbolUri> = vec![from];
    while !frontier.is_empty() {
        let mut next: Vec<&SymbolUri> = Vec::new();
        let mut layer: HashMap<&SymbolUri, (i64, usize)> = HashMap::new();
        for &u in &frontier {
            let base = best[u].0;
            let restricted: Vec<&String> = committed
                .iter()
                .filter(|g| graph.group_has_out_edge(g, u))
                .collect();
            for &ei in graph.adjacency.get(u).into_iter().flatten() {
                let e = &graph.edges[ei];
                if !restricted.is_empty()
                    && !e
                        .group()
                        .is_some_and(|g| restricted.iter().any(|r| *r == g))
                {
                    continue;
                }
                if best.contains_key(&e.to) {
                    continue;
                }
                let score = base + e.priority();
                match layer.get_mut(&e.to) {
                    None => {
                        layer.insert(&e.to, (score, ei));
                        next.push(&e.to);
                    }
                    Some(slot) if score > slot.0 => *slot = (score, ei),
                    Some(_) => {}
                }
            }
        }
        for &v in &next {
            let (s, e) = layer[v];
            best.insert(v, (s, Some(e)));
        }
        let winner = next
            .iter()
            .filter(|v| graph.library_of(v) == Some(target))
            .max_by(|a, b| {
                best[*a]
                    .0
                    .cmp(&best[*b].0)
                    .then_with(|| b.to_string().cmp(&a.to_string()))
            });
        if let Some(&end) = winner {
            let mut edges = Vec::new();
            let mut cur = end;
            while let Some(ei) = best[cur].1 {
                edges.push(graph.edges[ei].clone());
                cur = &graph.edges[ei].from;
            }
            edges.reverse();
            return Some(Path {
                source: from.clone(),
                edges,
            });
        }
        frontier = next;
    }
    None
}

/// Shortest path from `from` into `target`, consistent with the groups it
/// uses: once a path takes an edge of group `g`, every node on it where `g`
/// offers an edge must leave through `g`.
pub fn find_path(from: &SymbolUri, target: &LibraryId, graph: &AlignmentGraph) -> Option<Path> {
    let mut committed = BTreeSet::new();
    loop {
        let path = find_path_constrained(from, target, graph, &committed)?;
        let used = path.groups();
        if used.is_subset(&committed) {
            return Some(path);
        }
        committed.extend(used);
    }
}

/// Libraries reachable from `from` along directed edges, including its own.
pub fn reachable_libraries(from: &SymbolUri, graph: &AlignmentGraph) -> BTreeSet<LibraryId> {
    let mut seen: BTreeSet<&SymbolUri> = BTreeSet::new();
    let mut stack = vec![from];
    let mut libs = BTreeSet::new();
    while let Some(u) = stack.pop() {
        if !seen.insert(u) {
            continue;
        }
        if let Some(l) = graph.library_of(u) {
            libs.insert(l.clone());
        }
        stack.extend(graph.out_edges(u).map(|e| &e.to));
    }
    libs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::parse_alignment_file;
    use crate::uri::parse_uri;

    fn ns() -> NamespaceTable {
        let mut t = NamespaceTable::new();
        for (p, l) in [("a:", "A"), ("b:", "B"), ("i:", "I"), ("c:", "C")] {
            t.insert(p, LibraryId::new(l)).unwrap();
        }
        t
    }

    fn graph(text: &str) -> AlignmentGraph {
        let parsed = parse_alignment_file(text);
        assert!(parsed.diagnostics.is_empty(), "{:?}", parsed.diagnostics);
        build_graph(&parsed.alignments, &[], ns())
    }

    fn u(s: &str) -> SymbolUri {
        parse_uri(s).unwrap()
    }

    #[test]
    fn two_hop_through_interface() {
        let g = graph("a:?M?f i:?T?f\ni:?T?f b:?N?f arguments=\"(1,2)(2,1)\"\n");
        let p = find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.target(), &u("b:?N?f"));
        assert_eq!(p.argmap().to_string(), "(1,2)(2,1)");
        let back = find_path(&u("b:?N?f"), &LibraryId::new("A"), &g).unwrap();
        assert_eq!(back.argmap().to_string(), "(1,2)(2,1)");
    }

    #[test]
    fn empty_path_in_target() {
        let g = graph("a:?M?f i:?T?f\n");
        let p = find_path(&u("a:?M?f"), &LibraryId::new("A"), &g).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.argmap(), ArgMap::identity());
    }

    #[test]
    fn directions_respected() {
        let g =
            graph("a:?M?f b:?N?f direction=\"forward\"\nc:?K?f a:?M?f direction=\"backward\"\n");
        assert!(find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).is_some());
        assert!(find_path(&u("b:?N?f"), &LibraryId::new("A"), &g).is_none());
        assert!(find_path(&u("a:?M?f"), &LibraryId::new("C"), &g).is_some());
        assert!(find_path(&u("c:?K?f"), &LibraryId::new("A"), &g).is_none());
    }

    #[test]
    fn negated_excluded() {
        let g = graph("a:?M?f b:?N?g negated=\"true\"\n");
        assert_eq!(g.excluded().len(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn priority_breaks_length_ties() {
        let g =
            graph("a:?M?f i:?T?p\ni:?T?p b:?N?z\na:?M?f i:?T?q priority=\"2\"\ni:?T?q b:?N?y\n");
        let p = find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).unwrap();
        assert_eq!(p.target(), &u("b:?N?y"));
    }

    #[test]
    fn shorter_beats_priority() {
        let g = graph("a:?M?f b:?N?z\na:?M?f i:?T?q priority=\"9\"\ni:?T?q b:?N?y\n");
        let p = find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).unwrap();
        assert_eq!(p.target(), &u("b:?N?z"));
    }

    #[test]
    fn lexicographic_last_resort() {
        let g = graph("a:?M?f b:?N?z\na:?M?f b:?N?m\n");
        let p = find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).unwrap();
        assert_eq!(p.target(), &u("b:?N?m"));
    }

    #[test]
    fn duplicates_warned() {
        let g = graph("a:?M?f b:?N?f\na:?M?f b:?N?f\n");
        assert_eq!(g.edges().len(), 2);
        assert_eq!(
            g.warnings()
                .iter()
                .filter(|w| matches!(w, GraphWarning::DuplicateEdge(_)))
                .count(),
            2
        );
    }

    #[test]
    fn group_forces_consistent_edges() {
        // At i:?T?mid the ungrouped edge is shorter-tied and lexicographically
        // first, but the path already committed to group g.
        let g = graph(
            "a:?M?f i:?T?mid group=\"g\" direction=\"forward\"\n\
             i:?T?mid b:?N?a direction=\"forward\"\n\
             i:?T?mid b:?N?z group=\"g\" direction=\"forward\"\n",
        );
        let p = find_path(&u("a:?M?f"), &LibraryId::new("B"), &g).unwrap();
        assert_eq!(p.target(), &u("b:?N?z"));
        let free = find_path_constrained(&u("a:?M?f"), &LibraryId::new("B"), &g, &BTreeSet::new())
            .unwrap();
        assert_eq!(free.target(), &u("b:?N?a"));
    }

    #[test]
    fn reachability() {
        let g = graph("a:?M?f i:?T?f direction=\"forward\"\ni:?T?f b:?N?f\n");
        let libs: Vec<String> = reachable_libraries(&u("a:?M?f"), &g)
            .into_iter()
            .map(|l| l.0)
            .collect();
        assert_eq!(libs, ["A", "B", "I"]);
        let libs = reachable_libraries(&u("b:?N?f"), &g);
        assert_eq!(libs.len(), 2);
    }
}
