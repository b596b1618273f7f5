//! Browser bindings over the shipped fixture corpus: translate a term, show
//! the path of one symbol, classify an alignment line.

use std::fmt::Write as _;
use std::sync::OnceLock;

use mathalign::alignment::{classify, parse_alignment_file, parse_alignment_line, AlignmentClass};
use mathalign::cli::render_translation;
use mathalign::graph::{build_graph, find_path, AlignmentGraph, EdgeKind};
use mathalign::interface::{parse_interface_file, TheoryRegistry};
use mathalign::template::parse_template_file;
use mathalign::term::parse_term;
use mathalign::translate::Translator;
use mathalign::uri::{LibraryId, NamespaceTable, SymbolUri};
use wasm_bindgen::prelude::*;

const INTERFACES: [&str; 4] = [
    include_str!("../../core/fixtures/interfaces/foundation.thy"),
    include_str!("../../core/fixtures/interfaces/sets.thy"),
    include_str!("../../core/fixtures/interfaces/natural_numbers.thy"),
    include_str!("../../core/fixtures/interfaces/topology.thy"),
];

const ALIGNMENTS: [&str; 4] = [
    include_str!("../../core/fixtures/alignments/foundation.align"),
    include_str!("../../core/fixtures/alignments/sets_lists.align"),
    include_str!("../../core/fixtures/alignments/natural_numbers.align"),
    include_str!("../../core/fixtures/alignments/topology.align"),
];

const TEMPLATES: &str = include_str!("../../core/fixtures/templates/functions.tpl");

pub const LIBRARIES: [(&str, &str); 5] = [
    ("Interface", "http://mathhub.info/MitM"),
    ("HOLLight", "hol:"),
    ("PVS", "pvs:"),
    ("Mizar", "mizar:"),
    ("Coq", "coq:"),
];

/// Example inputs offered by the page.
pub const EXAMPLES: [(&str, &str); 3] = [
    (
        "row1",
        include_str!("../../core/fixtures/terms/row1.hol.term"),
    ),
    (
        "row3",
        include_str!("../../core/fixtures/terms/row3.pvs.term"),
    ),
    (
        "member",
        include_str!("../../core/fixtures/terms/member.pvs.term"),
    ),
];

struct Corpus {
    registry: TheoryRegistry,
    graph: AlignmentGraph,
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut theories = Vec::new();
        for text in INTERFACES {
            theories.extend(parse_interface_file(text).expect("shipped interfaces parse"));
        }
        let registry = TheoryRegistry::new(theories).expect("shipped interfaces are consistent");
        let alignments: Vec<_> = ALIGNMENTS
            .iter()
            .flat_map(|t| parse_alignment_file(t).alignments)
            .collect();
        let (templates, _) = parse_template_file(TEMPLATES);
        let mut namespaces = NamespaceTable::new();
        for (lib, prefix) in LIBRARIES {
            namespaces
                .insert(prefix, LibraryId::new(lib))
                .expect("distinct prefixes");
        }
        let graph = build_graph(&alignments, &templates, namespaces);
        Corpus { registry, graph }
    })
}

fn target_library(target: &str) -> Result<LibraryId, String> {
    LIBRARIES
        .iter()
        .find(|(l, _)| *l == target)
        .map(|(l, _)| LibraryId::new(*l))
        .ok_or_else(|| format!("unknown target library `{target}`"))
}

/// Translate term text, returning the term followed by `;` report lines.
pub fn translate_text(term: &str, target: &str) -> Result<String, String> {
    let term = parse_term(term).map_err(|e| e.to_string())?;
    let target = target_library(target)?;
    let c = corpus();
    let r = Translator::new(&c.graph)
        .with_registry(&c.registry)
        .translate(&term, &target);
    Ok(render_translation(&r, true))
}

/// One line per edge: from, to, how it is used, argument map.
pub fn path_text(symbol: &str, target: &str) -> Result<String, String> {
    let sym = SymbolUri::parse(symbol).map_err(|e| e.to_string())?;
    let target = target_library(target)?;
    let c = corpus();
    if c.graph.library_of(&sym).is_none() {
        return Err(format!("no library owns the namespace of `{sym}`"));
    }
    let Some(path) = find_path(&sym, &target, &c.graph) else {
        return Ok("no path\n".into());
    };
    let mut out = String::new();
    for e in &path.edges {
        let (how, map) = match &e.kind {
            EdgeKind::Align { used, argmap, .. } => (used.to_string(), argmap.to_string()),
            EdgeKind::Template { rule } => ("template".into(), format!("arity {}", rule.arity)),
        };
        let map = if map.is_empty() { "-".into() } else { map };
        let _ = writeln!(out, "{}\t{}\t{how}\t{map}", e.from, e.to);
    }
    if path.edges.is_empty() {
        out.push_str("already in the target library\n");
    }
    Ok(out)
}

pub fn classify_text(line: &str) -> Result<String, String> {
    let a = parse_alignment_line(line.trim())?;
    Ok(match classify(&a) {
        AlignmentClass::Bidirectional => "bidirectional".into(),
        AlignmentClass::Unidirectional { usable } => format!("unidirectional ({usable})"),
        AlignmentClass::Unusable { reason } => format!("unusable: {reason}"),
    })
}

#[wasm_bindgen]
pub fn translate(term: &str, target: &str) -> Result<String, JsValue> {
    translate_text(term, target).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn path(symbol: &str, target: &str) -> Result<String, JsValue> {
    path_text(symbol, target).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify_alignment(line: &str) -> Result<String, JsValue> {
    classify_text(line).map_err(|e| JsValue::from_str(&e))
}

/// Example inputs as `name\tterm` records separated by form feeds.
#[wasm_bindgen]
pub fn examples() -> String {
    EXAMPLES
        .iter()
        .map(|(n, t)| format!("{n}\t{t}"))
        .collect::<Vec<_>>()
        .join("\u{c}")
}
