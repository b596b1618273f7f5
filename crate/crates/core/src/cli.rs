//! Command implementations behind the `mathalign` binary. Each command
//! returns its exit code and the text destined for stdout and stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::alignment::parse_alignment_file;
use crate::analytics::{
    compare_directions, compare_intersections, direction_counts, intersection_counts,
    parse_reference, Corpus, ReferenceSums,
};
use crate::config::{expand_paths, Config, ConfigError};
use crate::graph::{find_path, EdgeKind};
use crate::term::parse_term;
use crate::translate::TranslationResult;
use crate::uri::{LibraryId, SymbolUri};
use crate::workspace::Workspace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Environment variable overriding the config file location.
pub const CONFIG_ENV: &str = "MATHALIGN_CONFIG";
pub const DEFAULT_CONFIG: &str = "mathalign.conf";

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        stderr.push('\n');
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsMode {
    Directions,
    Intersections,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsFormat {
    Tsv,
    Json,
}

/// `--config`, else the environment override, else `./mathalign.conf`.
pub fn config_path(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CONFIG))
}

fn load(config: &Path) -> Result<Workspace, Outcome> {
    let cfg = Config::load(config).map_err(|e| Outcome::fail(EXIT_CONFIG, e.to_string()))?;
    Workspace::load(cfg).map_err(|e| Outcome::fail(EXIT_CONFIG, e.to_string()))
}

fn known_target(ws: &Workspace, target: &str) -> Result<LibraryId, Outcome> {
    let lib = LibraryId::new(target);
    if ws.config.namespaces.libraries().any(|l| *l == lib) {
        Ok(lib)
    } else {
        Err(Outcome::fail(
            EXIT_CONFIG,
            format!("unknown target library `{target}`"),
        ))
    }
}

pub fn cmd_validate(config: &Path) -> Outcome {
    let ws = match load(config) {
        Ok(ws) => ws,
        Err(o) => return o,
    };
    let mut out = Outcome::default();
    for f in &ws.report.files {
        let _ = writeln!(
            out.stdout,
            "{}\t{}\tloaded {}\terrors {}\twarnings {}",
            f.path.display(),
            f.kind,
            f.loaded,
            f.errors.len(),
            f.warnings.len()
        );
        for e in &f.errors {
            let _ = writeln!(out.stderr, "error: {}: {e}", f.path.display());
        }
        for w in &f.warnings {
            let _ = writeln!(out.stderr, "warning: {}: {w}", f.path.display());
        }
    }
    for e in &ws.report.errors {
        let _ = writeln!(out.stderr, "error: {e}");
    }
    for w in &ws.report.warnings {
        let _ = writeln!(out.stderr, "warning: {w}");
    }
    let _ = writeln!(
        out.stdout,
        "total\terrors {}\twarnings {}",
        ws.report.error_count(),
        ws.report.warning_count()
    );
    out.code = if ws.report.error_count() == 0 {
        EXIT_OK
    } else {
        EXIT_PARSE
    };
    out
}

/// Render a result. Report lines start with `;`, so the whole output still
/// parses as a term.
pub fn render_translation(r: &TranslationResult, report: bool) -> String {
    let mut s = format!("{}\n", r.term);
    if report {
        let _ = writeln!(s, "; target {}", r.target);
        let _ = writeln!(s, "; complete {}", r.complete);
        for u in &r.untranslated {
            let _ = writeln!(s, "; untranslated {u}");
        }
        for (sym, path) in &r.paths_used {
            let _ = writeln!(s, "; path {sym}");
            for e in &path.edges {
                let _ = writeln!(s, ";   {e}");
            }
        }
        for i in &r.issues {
            let _ = writeln!(s, "; issue {i}");
        }
    }
    s
}

pub fn cmd_translate(config: &Path, files: &[PathBuf], target: &str, report: bool) -> Outcome {
    let ws = match load(config) {
        Ok(ws) => ws,
        Err(o) => return o,
    };
    let target = match known_target(&ws, target) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let mut terms = Vec::new();
    for f in files {
        let text = match std::fs::read_to_string(f) {
            Ok(t) => t,
            Err(e) => return Outcome::fail(EXIT_PARSE, format!("{}: {e}", f.display())),
        };
        match parse_term(&text) {
            Ok(t) => terms.push(t),
            Err(e) => return Outcome::fail(EXIT_PARSE, format!("{}: {e}", f.display())),
        }
    }
    let tr = ws.translator();
    // Inputs translate independently over the shared graph.
    let results: Vec<TranslationResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = terms
            .iter()
            .map(|t| scope.spawn(|| tr.translate(t, &target)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("translation panicked"))
            .collect()
    });
    let mut out = Outcome::default();
    for (f, r) in files.iter().zip(&results) {
        out.stdout.push_str(&render_translation(r, report));
        if !r.complete {
            out.code = EXIT_PARTIAL;
            let _ = writeln!(out.stderr, "{}: partial translation", f.display());
            for i in &r.issues {
                let _ = writeln!(out.stderr, "  {i}");
            }
        }
    }
    out
}

pub fn cmd_paths(config: &Path, symbol: &str, target: &str) -> Outcome {
    let ws = match load(config) {
        Ok(ws) => ws,
        Err(o) => return o,
    };
    let sym = match SymbolUri::parse(symbol) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(EXIT_PARSE, e.to_string()),
    };
    if ws.graph.library_of(&sym).is_none() {
        return Outcome::fail(
            EXIT_PARSE,
            format!("no library owns the namespace of `{sym}`"),
        );
    }
    let target = match known_target(&ws, target) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let Some(path) = find_path(&sym, &target, &ws.graph) else {
        return Outcome {
            code: EXIT_PARTIAL,
            stdout: "no path\n".into(),
            stderr: String::new(),
        };
    };
    let mut out = Outcome::default();
    let _ = writeln!(
        out.stdout,
        "# {} edge(s) from {} to {}",
        path.len(),
        sym,
        path.target()
    );
    for e in &path.edges {
        let (how, map) = match &e.kind {
            EdgeKind::Align { used, argmap, .. } => (used.to_string(), argmap.to_string()),
            EdgeKind::Template { rule } => {
                ("template".to_string(), format!("arity {}", rule.arity))
            }
        };
        let map = if map.is_empty() { "-".to_string() } else { map };
        let _ = writeln!(out.stdout, "{}\t{}\t{how}\t{map}", e.from, e.to);
    }
    out
}

pub fn cmd_stats(
    config: &Path,
    mode: StatsMode,
    format: StatsFormat,
    reference: Option<&Path>,
) -> Outcome {
    let ws = match load(config) {
        Ok(ws) => ws,
        Err(o) => return o,
    };
    let refs: Option<ReferenceSums> = match reference {
        None => None,
        Some(p) => match std::fs::read_to_string(p)
            .map_err(|e| e.to_string())
            .and_then(|t| parse_reference(&t))
        {
            Ok(r) => Some(r),
            Err(e) => return Outcome::fail(EXIT_PARSE, format!("{}: {e}", p.display())),
        },
    };
    let corpus = Corpus {
        alignments: &ws.alignments,
        registry: &ws.registry,
        namespaces: &ws.config.namespaces,
        interface_library: &ws.config.interface_library,
    };
    let mut out = Outcome::default();
    let discrepancies = match mode {
        StatsMode::Directions => {
            let r = direction_counts(&corpus);
            out.stdout = match format {
                StatsFormat::Tsv => r.to_tsv(),
                StatsFormat::Json => serde_json::to_string_pretty(&r).unwrap() + "\n",
            };
            refs.map(|refs| compare_directions(&r, &refs))
        }
        StatsMode::Intersections => {
            let r = intersection_counts(&corpus);
            out.stdout = match format {
                StatsFormat::Tsv => r.to_tsv(),
                StatsFormat::Json => serde_json::to_string_pretty(&r).unwrap() + "\n",
            };
            refs.map(|refs| compare_intersections(&r, &refs))
        }
    };
    if let Some(d) = discrepancies {
        if d.is_empty() {
            out.stderr.push_str("reference sums match\n");
        }
        for line in d {
            let _ = writeln!(out.stderr, "discrepancy: {line}");
        }
    }
    out
}

/// Copy alignment files from `dir` into the workspace ingest directory,
/// reporting malformed lines. Exit 1 if any line is malformed.
pub fn cmd_ingest(config: &Path, dir: &Path) -> Outcome {
    let cfg = match Config::load(config) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_CONFIG, e.to_string()),
    };
    if !dir.is_dir() {
        return Outcome::fail(
            EXIT_CONFIG,
            ConfigError::MissingPath(dir.to_path_buf()).to_string(),
        );
    }
    let files = match expand_paths(&[dir.to_path_buf()]) {
        Ok(f) => f,
        Err(e) => return Outcome::fail(EXIT_CONFIG, format!("{}: {e}", dir.display())),
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.ingest_dir) {
        return Outcome::fail(EXIT_CONFIG, format!("{}: {e}", cfg.ingest_dir.display()));
    }
    let mut out = Outcome::default();
    let mut bad = 0;
    for f in files {
        let text = match std::fs::read_to_string(&f) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(out.stderr, "skipped {}: {e}", f.display());
                continue;
            }
        };
        let parsed = parse_alignment_file(&text);
        let dest = cfg.ingest_dir.join(f.file_name().unwrap());
        if let Err(e) = std::fs::write(&dest, &text) {
            return Outcome::fail(EXIT_CONFIG, format!("{}: {e}", dest.display()));
        }
        let _ = writeln!(
            out.stdout,
            "{}\talignments {}\tdiagnostics {}",
            dest.display(),
            parsed.alignments.len(),
            parsed.diagnostics.len()
        );
        for d in &parsed.diagnostics {
            let _ = writeln!(out.stderr, "{}: {d}", f.display());
        }
        bad += parsed.diagnostics.len();
    }
    out.code = if bad == 0 { EXIT_OK } else { EXIT_PARSE };
    out
}
