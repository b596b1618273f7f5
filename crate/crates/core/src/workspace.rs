//! Loading every file a configuration names into one immutable workspace.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::alignment::{parse_alignment_file, Alignment};
use crate::config::{expand_paths, Config, ConfigError};
use crate::dialect::{parse_dialect_file, DialectRule};
use crate::graph::{build_graph, AlignmentGraph};
use crate::interface::{parse_interface_file, InterfaceTheory, TheoryRegistry};
use crate::template::{parse_template_file, TemplateRule};
use crate::translate::Translator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Alignments,
    Interfaces,
    Templates,
    Dialect,
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileKind::Alignments => "alignments",
            FileKind::Interfaces => "interfaces",
            FileKind::Templates => "templates",
            FileKind::Dialect => "dialect",
        })
    }
}

#[derive(Debug, Clone)]
pub struct FileReport {
    pub path: PathBuf,
    pub kind: FileKind,
    /// Items loaded from the file.
    pub loaded: usize,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub files: Vec<FileReport>,
    /// Problems that belong to no single file.
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl LoadReport {
    pub fn error_count(&self) -> usize {
        self.errors.len() + self.files.iter().map(|f| f.errors.len()).sum::<usize>()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings.len() + self.files.iter().map(|f| f.warnings.len()).sum::<usize>()
    }
}

/// Where an alignment came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub path: PathBuf,
    pub line: usize,
}

#[derive(Debug)]
pub struct Workspace {
    pub config: Config,
    pub alignments: Vec<Alignment>,
    pub sources: Vec<Source>,
    pub registry: TheoryRegistry,
    pub templates: Vec<TemplateRule>,
    pub dialect: Vec<DialectRule>,
    pub graph: AlignmentGraph,
    pub report: LoadReport,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, ConfigError> {
    for p in paths {
        if !p.exists() {
            return Err(ConfigError::MissingPath(p.clone()));
        }
    }
    expand_paths(paths).map_err(|source| ConfigError::Io {
        path: paths.first().cloned().unwrap_or_default(),
        source,
    })
}

impl Workspace {
    /// Load all files. Unreadable or missing files are configuration errors;
    /// content problems are collected in [`Workspace::report`].
    pub fn load(config: Config) -> Result<Self, ConfigError> {
        let mut report = LoadReport::default();

        let mut theories: Vec<InterfaceTheory> = Vec::new();
        for path in expand(&config.interfaces)? {
            let mut fr = file_report(&path, FileKind::Interfaces);
            match parse_interface_file(&read(&path)?) {
                Ok(ts) => {
                    fr.loaded = ts.len();
                    theories.extend(ts);
                }
                Err(e) => fr.errors.push(e.to_string()),
            }
            report.files.push(fr);
        }
        let registry = TheoryRegistry::new(theories).unwrap_or_else(|e| {
            report.errors.push(e.to_string());
            TheoryRegistry::default()
        });

        let mut alignment_paths = expand(&config.alignments)?;
        if config.ingest_dir.is_dir() {
            alignment_paths.extend(expand(std::slice::from_ref(&config.ingest_dir))?);
        }
        let mut alignments = Vec::new();
        let mut sources = Vec::new();
        for path in alignment_paths {
            let mut fr = file_report(&path, FileKind::Alignments);
            let parsed = parse_alignment_file(&read(&path)?);
            fr.loaded = parsed.alignments.len();
            fr.errors
                .extend(parsed.diagnostics.iter().map(|d| d.to_string()));
            for (a, line) in parsed.alignments.into_iter().zip(parsed.lines) {
                if let Some(w) = arity_warning(&a, &registry) {
                    fr.warnings.push(format!("line {line}: {w}"));
                }
                alignments.push(a);
                sources.push(Source {
                    path: path.clone(),
                    line,
                });
            }
            report.files.push(fr);
        }

        let mut templates = Vec::new();
        for path in expand(&config.templates)? {
            let mut fr = file_report(&path, FileKind::Templates);
            let (rules, errors) = parse_template_file(&read(&path)?);
            fr.loaded = rules.len();
            fr.errors.extend(errors.iter().map(|e| e.to_string()));
            templates.extend(rules);
            report.files.push(fr);
        }

        let mut dialect = Vec::new();
        for path in expand(&config.dialect_rules)? {
            let mut fr = file_report(&path, FileKind::Dialect);
            let (rules, errors) = parse_dialect_file(&read(&path)?);
            fr.loaded = rules.len();
            fr.errors.extend(errors.iter().map(|e| e.to_string()));
            dialect.extend(rules);
            report.files.push(fr);
        }

        let graph = build_graph(&alignments, &templates, config.namespaces.clone());
        report
            .warnings
            .extend(graph.warnings().iter().map(|w| w.to_string()));
        for (a, reason) in graph.excluded() {
            report
                .warnings
                .push(format!("excluded {} -> {}: {reason}", a.from, a.to));
        }

        Ok(Workspace {
            config,
            alignments,
            sources,
            registry,
            templates,
            dialect,
            graph,
            report,
        })
    }

    pub fn translator(&self) -> Translator<'_> {
        Translator::new(&self.graph)
            .with_registry(&self.registry)
            .with_dialect(&self.dialect)
    }
}

fn file_report(path: &Path, kind: FileKind) -> FileReport {
    FileReport {
        path: path.to_path_buf(),
        kind,
        loaded: 0,
        errors: Vec::new(),
        warnings: Vec::new(),
    }
}

/// Argument maps must stay within the declared arity of interface endpoints.
fn arity_warning(a: &Alignment, registry: &TheoryRegistry) -> Option<String> {
    let check = |uri, used: usize| {
        registry
            .declared_arity(uri)
            .filter(|&d| used > d)
            .map(|d| format!("argument map uses position {used} but `{uri}` declares arity {d}"))
    };
    let max_tgt = a.argmap.pairs().iter().map(|p| p.1).max().unwrap_or(0);
    let max_src = a.argmap.pairs().iter().map(|p| p.0).max().unwrap_or(0);
    check(&a.to, max_tgt).or_else(|| check(&a.from, max_src))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn loads_and_reports() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        std::fs::write(
            d.join("i.thy"),
            "namespace i:\ntheory Sets =\n  member # 1 ∈ 2\nend\n",
        )
        .unwrap();
        std::fs::write(
            d.join("a.align"),
            "i:?Sets?member p:?sets?member arguments=\"(1,3)(3,1)\"\nbroken\n",
        )
        .unwrap();
        let config = parse_config(
            "interfaces = i.thy\nalignments = a.align\nlibrary.Interface = i:\nlibrary.P = p:\n",
            d,
        )
        .unwrap();
        let ws = Workspace::load(config).unwrap();
        assert_eq!(ws.alignments.len(), 1);
        assert_eq!(ws.sources[0].line, 1);
        assert_eq!(ws.report.error_count(), 1);
        // (3,1) reads position 3 of a two-argument interface symbol.
        assert_eq!(ws.report.warning_count(), 1);
        assert_eq!(ws.graph.edges().len(), 2);
    }

    #[test]
    fn ingest_dir_loaded() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        std::fs::create_dir(d.join("ingested")).unwrap();
        std::fs::write(d.join("ingested/x.align"), "p:?a?f q:?b?f\n").unwrap();
        let config = parse_config("library.P = p:\nlibrary.Q = q:\n", d).unwrap();
        let ws = Workspace::load(config).unwrap();
        assert_eq!(ws.alignments.len(), 1);
    }

    #[test]
    fn missing_file_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = parse_config("interfaces = gone.thy\n", dir.path()).unwrap();
        assert!(matches!(
            Workspace::load(config),
            Err(ConfigError::MissingPath(_))
        ));
    }
}
