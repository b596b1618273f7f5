//! Translation of formal mathematical expressions between theorem-prover
//! library dialects, routed through symbol alignments and interface theories.
//!
//! The pipeline: parse [`term::Term`]s and alignment files, build an
//! [`graph::AlignmentGraph`] from usable alignments and template rules, then
//! [`translate::translate`] rewrites every symbol occurrence along the
//! shortest path into the target library. Symbols with no path stay put and
//! are reported, so partial translations are first-class results.

pub mod alignment;
pub mod analytics;
pub mod argmap;
pub mod cli;
pub mod config;
pub mod dialect;
pub mod graph;
pub mod interface;
pub mod template;
pub mod term;
pub mod translate;
pub mod uri;
pub mod workspace;

pub use alignment::{classify, parse_alignment_file, Alignment, AlignmentClass, Direction};
pub use argmap::{apply_argmap, compose_argmaps, invert_argmap, ArgMap};
pub use graph::{build_graph, find_path, reachable_libraries, AlignmentGraph, Edge};
pub use term::{parse_term, symbols_of, Term};
pub use translate::{translate, TranslationResult};
pub use uri::{format_uri, parse_uri, LibraryId, SymbolUri};
