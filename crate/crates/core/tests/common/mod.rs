//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use mathalign::alignment::{Alignment, Direction};
use mathalign::argmap::ArgMap;
use mathalign::config::Config;
use mathalign::term::{BoundVar, Term};
use mathalign::uri::{LibraryId, NamespaceTable, SymbolUri};
use mathalign::workspace::Workspace;
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_workspace(conf: &str) -> Workspace {
    let cfg = Config::load(&fixtures().join(conf)).expect("fixture config loads");
    let ws = Workspace::load(cfg).expect("fixture workspace loads");
    assert_eq!(ws.report.error_count(), 0, "fixture corpus has errors");
    ws
}

pub fn uri(s: &str) -> SymbolUri {
    SymbolUri::parse(s).unwrap()
}

// ---------------------------------------------------------------------------
// Argument maps, modelled as raw pair lists.

/// Every partial injection on `1..=n`, as raw pair lists.
pub fn all_injections(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; n + 1];
    fn go(
        s: usize,
        n: usize,
        cur: &mut Vec<(usize, usize)>,
        used: &mut [bool],
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if s > n {
            out.push(cur.clone());
            return;
        }
        go(s + 1, n, cur, used, out);
        for t in 1..=n {
            if !used[t] {
                used[t] = true;
                cur.push((s, t));
                go(s + 1, n, cur, used, out);
                cur.pop();
                used[t] = false;
            }
        }
    }
    go(1, n, &mut cur, &mut used, &mut out);
    out
}

/// Identity completion on raw pairs: listed sources follow their pair,
/// positions that are only targets vanish, everything else is fixed.
pub fn raw_image(pairs: &[(usize, usize)], s: usize) -> Option<usize> {
    if let Some(&(_, t)) = pairs.iter().find(|p| p.0 == s) {
        return Some(t);
    }
    if pairs.iter().any(|p| p.1 == s) {
        return None;
    }
    Some(s)
}

/// Apply a position function to arguments, one slot at a time.
pub fn raw_apply<T: Clone>(
    image: impl Fn(usize) -> Option<usize>,
    args: &[Option<T>],
    arity: usize,
) -> Vec<Option<T>> {
    let mut slots = vec![None; arity];
    for (i, a) in args.iter().enumerate() {
        if let Some(t) = image(i + 1) {
            if t <= arity {
                slots[t - 1] = a.clone();
            }
        }
    }
    slots
}

// ---------------------------------------------------------------------------
// Graphs.

pub const LIBS: [&str; 4] = ["A", "B", "C", "I"];

pub fn namespaces() -> NamespaceTable {
    let mut t = NamespaceTable::new();
    for l in LIBS {
        t.insert(format!("{}:", l.to_lowercase()), LibraryId::new(l))
            .unwrap();
    }
    t
}

#[derive(Debug, Clone)]
pub struct RandomGraph {
    pub nodes: Vec<SymbolUri>,
    /// (from index, to index, direction, priority)
    pub raw: Vec<(usize, usize, Direction, i64)>,
}

impl RandomGraph {
    pub fn generate(rng: &mut impl Rng) -> Self {
        let n = rng.random_range(2..=30);
        let nodes: Vec<SymbolUri> = (0..n)
            .map(|i| {
                let lib = LIBS.choose(rng).unwrap().to_lowercase();
                uri(&format!("{lib}:?M?n{i:02}"))
            })
            .collect();
        let m = rng.random_range(0..=2 * n);
        let mut raw: Vec<(usize, usize, Direction, i64)> = Vec::new();
        for _ in 0..m {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            // One alignment per unordered pair keeps edges unique.
            if a == b
                || raw
                    .iter()
                    .any(|&(x, y, _, _)| (x, y) == (a, b) || (x, y) == (b, a))
            {
                continue;
            }
            let dir = *[Direction::Forward, Direction::Backward, Direction::Both]
                .choose(rng)
                .unwrap();
            raw.push((a, b, dir, rng.random_range(0..3)));
        }
        RandomGraph { nodes, raw }
    }

    pub fn alignments(&self) -> Vec<Alignment> {
        self.raw
            .iter()
            .map(|&(a, b, d, p)| {
                let mut al =
                    Alignment::new(self.nodes[a].clone(), self.nodes[b].clone()).with_direction(d);
                al.priority = p;
                al
            })
            .collect()
    }

    pub fn library(&self, i: usize) -> &str {
        self.nodes[i].namespace().trim_end_matches(':')
    }

    /// Directed successor lists with priorities, deduplicated by endpoint.
    pub fn successors(&self) -> Vec<Vec<(usize, i64)>> {
        let mut adj: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); self.nodes.len()];
        let mut add = |u: usize, v: usize, p: i64| {
            let e = adj[u].entry(v).or_insert(p);
            *e = (*e).max(p);
        };
        for &(a, b, d, p) in &self.raw {
            if d != Direction::Backward {
                add(a, b, p);
            }
            if d != Direction::Forward {
                add(b, a, p);
            }
        }
        adj.into_iter().map(|m| m.into_iter().collect()).collect()
    }

    /// Plain breadth-first distance from `src` to the nearest node of `lib`.
    pub fn bfs_distance(&self, src: usize, lib: &str) -> Option<usize> {
        let adj = self.successors();
        let mut dist = vec![usize::MAX; self.nodes.len()];
        let mut q = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = q.pop_front() {
            if self.library(u).eq_ignore_ascii_case(lib) {
                return Some(dist[u]);
            }
            for &(v, _) in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        None
    }

    /// Among all walks of length `d` from `src` ending in `lib`: the best
    /// priority sum and, for that sum, the smallest endpoint URI.
    pub fn best_shortest(&self, src: usize, lib: &str, d: usize) -> (i64, String) {
        let adj = self.successors();
        let mut best: Option<(i64, String)> = None;
        fn walk(
            g: &RandomGraph,
            adj: &[Vec<(usize, i64)>],
            u: usize,
            left: usize,
            score: i64,
            lib: &str,
            best: &mut Option<(i64, String)>,
        ) {
            if left == 0 {
                if g.library(u).eq_ignore_ascii_case(lib) {
                    let cand = (score, g.nodes[u].to_string());
                    let better = match best {
                        None => true,
                        Some((s, n)) => cand.0 > *s || (cand.0 == *s && cand.1 < *n),
                    };
                    if better {
                        *best = Some(cand);
                    }
                }
                return;
            }
            for &(v, p) in &adj[u] {
                walk(g, adj, v, left - 1, score + p, lib, best);
            }
        }
        walk(self, &adj, src, d, 0, lib, &mut best);
        best.expect("a walk of the BFS distance exists")
    }

    /// Reflexive-transitive closure by Floyd–Warshall.
    pub fn closure(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for (u, succ) in self.successors().iter().enumerate() {
            for &(v, _) in succ {
                r[u][v] = true;
            }
        }
        for k in 0..n {
            let via = r[k].clone();
            for row in r.iter_mut() {
                if row[k] {
                    for (cell, &reach) in row.iter_mut().zip(&via) {
                        *cell |= reach;
                    }
                }
            }
        }
        r
    }
}

// ---------------------------------------------------------------------------
// Terms over the shipped fixture vocabulary.

pub const HOL: &str = "hol:?HOLLight";

/// HOL Light symbols whose alignments are bidirectional and free of
/// templates. `(name, fixed arity)`; `None` means any arity.
pub const HOL_SYMBOLS: [(&str, Option<usize>); 9] = [
    ("hol:?HOLLight?bool", None),
    ("hol:?HOLLight?apply", None),
    ("hol:?HOLLight?ded", None),
    ("hol:?HOLLight?holtype", None),
    ("hol:?HOLLight?term", None),
    ("hol:?HOLLight/Sets?IN", None),
    ("hol:?HOLLight/Lists?CONS", None),
    ("hol:?HOLLight/Lists?NIL", None),
    ("hol:?HOLLight/Lists?FILTER", Some(3)),
];

pub const HOL_BINDERS: [&str; 2] = ["hol:?HOLLight?Abs", "hol:?HOLLight?context"];

/// Symbols that make translation partial or go through templates.
pub const EXTRA_SYMBOLS: [&str; 5] = [
    "hol:?HOLLight?fun",
    "hol:?HOLLight/Sets?UNIONS",
    "pvs:?PVS/sets?member",
    "http://mathhub.info/MitM/interfaces?Lists?filter",
    "zzz:?Unknown?thing",
];

pub const EXTRA_BINDERS: [&str; 2] = ["pvs:?PVS?pi", "hol:?HOLLight?Exists"];

const VARS: [&str; 5] = ["x", "y", "a", "A", "x1"];

pub struct TermGen {
    pub extras: bool,
}

impl TermGen {
    fn symbol(&self, rng: &mut impl Rng) -> (SymbolUri, Option<usize>) {
        if self.extras && rng.random_bool(0.3) {
            (uri(EXTRA_SYMBOLS.choose(rng).unwrap()), None)
        } else {
            let (s, a) = HOL_SYMBOLS.choose(rng).unwrap();
            (uri(s), *a)
        }
    }

    fn binder(&self, rng: &mut impl Rng) -> SymbolUri {
        if self.extras && rng.random_bool(0.3) {
            uri(EXTRA_BINDERS.choose(rng).unwrap())
        } else {
            uri(HOL_BINDERS.choose(rng).unwrap())
        }
    }

    pub fn term(&self, rng: &mut impl Rng, depth: usize) -> Term {
        let leaf = depth == 0 || rng.random_bool(0.3);
        if leaf {
            return match rng.random_range(0..3) {
                0 => Term::Var(VARS.choose(rng).unwrap().to_string()),
                1 => Term::lit("nat", rng.random_range(0..10u32).to_string()),
                _ => Term::Sym(self.symbol(rng).0),
            };
        }
        match rng.random_range(0..5) {
            0 => {
                let binder = self.binder(rng);
                let n = rng.random_range(1..=2);
                let mut names: Vec<&str> = VARS.to_vec();
                let vars = (0..n)
                    .map(|_| {
                        let i = rng.random_range(0..names.len());
                        let name = names.remove(i);
                        let ty = rng.random_bool(0.6).then(|| self.term(rng, depth - 1));
                        BoundVar::new(name, ty)
                    })
                    .collect();
                Term::bind(binder, vars, self.term(rng, depth - 1))
            }
            1 => {
                let head = Term::Var(VARS.choose(rng).unwrap().to_string());
                let n = rng.random_range(1..=3);
                Term::app(head, (0..n).map(|_| self.term(rng, depth - 1)).collect())
            }
            _ => {
                let (s, fixed) = self.symbol(rng);
                let n = fixed.unwrap_or_else(|| rng.random_range(1..=4));
                Term::app(
                    Term::Sym(s),
                    (0..n).map(|_| self.term(rng, depth - 1)).collect(),
                )
            }
        }
    }
}

pub fn library_symbols(term: &Term, ns: &NamespaceTable) -> BTreeSet<Option<LibraryId>> {
    term.symbols()
        .iter()
        .map(|s| ns.library_of(s).cloned())
        .collect()
}

/// Count each symbol's occurrences.
pub fn occurrence_counts(term: &Term) -> HashMap<SymbolUri, usize> {
    let mut m = HashMap::new();
    term.visit(&mut |t| {
        let s = match t {
            Term::Sym(s) => Some(s),
            Term::Bind { binder, .. } => Some(binder),
            _ => None,
        };
        if let Some(s) = s {
            *m.entry(s.clone()).or_default() += 1;
        }
    });
    m
}

pub fn argmap(pairs: &[(usize, usize)]) -> ArgMap {
    ArgMap::new(pairs.iter().copied()).unwrap()
}

// ---------------------------------------------------------------------------
// Checks shared by the property tests and the acceptance suite.

/// Positions probed beyond the largest index a map mentions.
const PROBE: usize = 12;

/// Compose, invert and apply against the raw-pair semantics for every pair of
/// partial injections on at most `n` positions. Returns the number of maps.
pub fn argmap_exhaustive(n: usize) -> Result<usize, String> {
    use mathalign::argmap::{apply_argmap, compose_argmaps, invert_argmap};
    let raws = all_injections(n);
    let maps: Vec<ArgMap> = raws.iter().map(|r| argmap(r)).collect();
    let args: Vec<u32> = (1..=6).collect();

    for (raw, m) in raws.iter().zip(&maps) {
        for s in 1..=PROBE {
            if m.image(s) != raw_image(raw, s) {
                return Err(format!("image({s}) of {raw:?}"));
            }
        }
        let inv = invert_argmap(m);
        for t in 1..=PROBE {
            let pre = (1..=PROBE).find(|&s| raw_image(raw, s) == Some(t));
            if inv.image(t) != pre {
                return Err(format!("inverse of {raw:?} at {t}"));
            }
        }
        if invert_argmap(&inv) != *m {
            return Err(format!("double inverse of {raw:?}"));
        }
        let needs = raw
            .iter()
            .filter(|p| p.0 != p.1)
            .map(|p| p.0)
            .max()
            .unwrap_or(0);
        for len in 0..=args.len() {
            let got = apply_argmap(m, &args[..len], 8);
            match got {
                Err(_) if needs > len => {}
                Ok(slots) if needs <= len => {
                    let opt: Vec<Option<u32>> = args[..len].iter().copied().map(Some).collect();
                    if slots != raw_apply(|s| raw_image(raw, s), &opt, 8) {
                        return Err(format!("apply {raw:?} to {len} args"));
                    }
                }
                _ => return Err(format!("arity check of {raw:?} with {len} args")),
            }
        }
    }

    // Raw images tabulated once per map; index 0 is unused.
    let tables: Vec<Vec<Option<usize>>> = raws
        .iter()
        .map(|r| (0..=PROBE).map(|s| raw_image(r, s)).collect())
        .collect();
    let look = |tab: &[Option<usize>], s: usize| tab.get(s).copied().unwrap_or(Some(s));
    let full: Vec<Option<u32>> = args.iter().copied().map(Some).collect();
    for (i, a) in maps.iter().enumerate() {
        let first = raw_apply(|s| look(&tables[i], s), &full, 8);
        for (j, b) in maps.iter().enumerate() {
            let c = compose_argmaps(a, b);
            for s in 1..=PROBE {
                let want = look(&tables[i], s).and_then(|m| look(&tables[j], m));
                if c.image(s) != want {
                    return Err(format!("compose {:?} then {:?} at {s}", raws[i], raws[j]));
                }
            }
            let seq = raw_apply(|s| look(&tables[j], s), &first, 8);
            match apply_argmap(&c, &args, 8) {
                Ok(slots) if slots == seq => {}
                other => {
                    return Err(format!(
                        "sequential apply {:?} then {:?}: {other:?} vs {seq:?}",
                        raws[i], raws[j]
                    ))
                }
            }
        }
    }
    Ok(maps.len())
}

/// Path search on random graphs against plain BFS plus brute-force tie
/// breaking, and reachability against Floyd–Warshall.
pub fn graph_oracle(seed: u64, graphs: usize) -> Result<(), String> {
    use mathalign::graph::{build_graph, find_path, reachable_libraries};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for gi in 0..graphs {
        let g = RandomGraph::generate(&mut rng);
        let graph = build_graph(&g.alignments(), &[], namespaces());
        let closure = g.closure();
        for (src, node) in g.nodes.iter().enumerate() {
            for lib in LIBS {
                let target = LibraryId::new(lib);
                let got = find_path(node, &target, &graph);
                let want = g.bfs_distance(src, lib);
                match (&got, want) {
                    (None, None) => {}
                    (Some(p), Some(d)) => {
                        if p.len() != d {
                            return Err(format!(
                                "graph {gi}: {node} to {lib}: {} edges, BFS {d}",
                                p.len()
                            ));
                        }
                        let (score, end) = g.best_shortest(src, lib, d);
                        let got_score: i64 = p.edges.iter().map(|e| e.priority()).sum();
                        if got_score != score || p.target().to_string() != end {
                            return Err(format!(
                                "graph {gi}: {node} to {lib}: tie broken to {} ({got_score}), want {end} ({score})",
                                p.target()
                            ));
                        }
                        for w in p.edges.windows(2) {
                            if w[0].to != w[1].from {
                                return Err(format!("graph {gi}: path is not connected"));
                            }
                        }
                    }
                    _ => {
                        return Err(format!(
                            "graph {gi}: {node} to {lib}: found {}, BFS {want:?}",
                            got.is_some()
                        ))
                    }
                }
            }
            let want: BTreeSet<LibraryId> = (0..g.nodes.len())
                .filter(|&v| closure[src][v])
                .map(|v| {
                    LibraryId::new(
                        LIBS.iter()
                            .find(|l| l.eq_ignore_ascii_case(g.library(v)))
                            .unwrap()
                            .to_string(),
                    )
                })
                .collect();
            let got = reachable_libraries(node, &graph);
            if got != want {
                return Err(format!(
                    "graph {gi}: reachable from {node}: {got:?} vs {want:?}"
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Default)]
pub struct InvariantStats {
    pub terms: usize,
    pub complete: usize,
    pub round_trips: usize,
}

/// Invariants of one translation of `term` into `target`.
pub fn check_translation(ws: &Workspace, term: &Term, target: &LibraryId) -> Result<bool, String> {
    use mathalign::term::parse_term;
    let tr = ws.translator();
    let r = tr.translate(term, target);
    let inputs = term.symbols();
    for u in &r.untranslated {
        if !inputs.contains(u) {
            return Err(format!("untranslated {u} is not in the input {term}"));
        }
    }
    if r.complete {
        for s in r.term.symbols() {
            if ws.config.namespaces.library_of(&s) != Some(target) {
                return Err(format!("complete result {} contains {s}", r.term));
            }
        }
        if r.term.contains_hole() {
            return Err(format!("complete result {} has a hole", r.term));
        }
    }
    let again = tr.translate(&r.term, target);
    if again.term != r.term {
        return Err(format!(
            "not idempotent on {term}: {} then {}",
            r.term, again.term
        ));
    }
    match parse_term(&r.term.to_string()) {
        Ok(t) if t == r.term => {}
        other => return Err(format!("output {} does not re-parse: {other:?}", r.term)),
    }
    Ok(r.complete)
}

/// Run the invariants over `count` generated terms. With `extras` off the
/// vocabulary is bidirectional, so HOL Light to PVS and back must restore
/// every completely translated term.
pub fn translator_invariants(
    ws: &Workspace,
    seed: u64,
    count: usize,
    extras: bool,
) -> Result<InvariantStats, String> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let generator = TermGen { extras };
    let pvs = LibraryId::new("PVS");
    let hol = LibraryId::new("HOLLight");
    let mut stats = InvariantStats::default();
    for _ in 0..count {
        let depth = rng.random_range(1..=4);
        let term = generator.term(&mut rng, depth);
        stats.terms += 1;
        let to_pvs = check_translation(ws, &term, &pvs)?;
        check_translation(ws, &term, &hol)?;
        if to_pvs {
            stats.complete += 1;
        }
        if !extras {
            if !to_pvs {
                return Err(format!("bidirectional term {term} did not translate"));
            }
            let tr = ws.translator();
            let there = tr.translate(&term, &pvs);
            let back = tr.translate(&there.term, &hol);
            if !back.complete || back.term != term {
                return Err(format!(
                    "round trip of {term} gave {} via {}",
                    back.term, there.term
                ));
            }
            stats.round_trips += 1;
        }
    }
    Ok(stats)
}

// ---------------------------------------------------------------------------
// The command-line binary.

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run the binary inside the fixture directory without any inherited
/// config override.
pub fn mathalign(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_mathalign"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("MATHALIGN_CONFIG")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("terms").join(name)).unwrap()
}
