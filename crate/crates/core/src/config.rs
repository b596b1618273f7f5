//! Workspace configuration: a `key = value` file, list values comma-separated.
//!
//! ```text
//! alignments = alignments/core.align, alignments/extra.align
//! interfaces = interfaces
//! templates = templates.tpl
//! dialect_rules = dialect.rules
//! library.PVS = pvs:
//! library.HOLLight = hol:, hol-extra:
//! interface_library = Interface
//! ingest_dir = ingested
//! ```
//!
//! Relative paths resolve against the directory holding the config file. A
//! directory in a path list stands for the files inside it, in name order.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::uri::{LibraryId, NamespaceError, NamespaceTable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config line {line}: {source}")]
    Namespace { line: usize, source: NamespaceError },
    #[error("referenced path `{0}` does not exist")]
    MissingPath(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub base_dir: PathBuf,
    pub alignments: Vec<PathBuf>,
    pub interfaces: Vec<PathBuf>,
    pub templates: Vec<PathBuf>,
    pub dialect_rules: Vec<PathBuf>,
    pub namespaces: NamespaceTable,
    pub interface_library: LibraryId,
    pub ingest_dir: PathBuf,
}

impl Config {
    pub fn empty(base_dir: impl Into<PathBuf>) -> Self {
        let base_dir = base_dir.into();
        Config {
            ingest_dir: base_dir.join("ingested"),
            base_dir,
            alignments: Vec::new(),
            interfaces: Vec::new(),
            templates: Vec::new(),
            dialect_rules: Vec::new(),
            namespaces: NamespaceTable::new(),
            interface_library: LibraryId::new("Interface"),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let base = if base.as_os_str().is_empty() {
            Path::new(".")
        } else {
            base
        };
        let config = parse_config(&text, base)?;
        config.check_paths()?;
        Ok(config)
    }

    /// Every listed path must exist; the ingest directory is optional.
    pub fn check_paths(&self) -> Result<(), ConfigError> {
        for p in self
            .alignments
            .iter()
            .chain(&self.interfaces)
            .chain(&self.templates)
            .chain(&self.dialect_rules)
        {
            if !p.exists() {
                return Err(ConfigError::MissingPath(p.clone()));
            }
        }
        Ok(())
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty())
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<Config, ConfigError> {
    let mut c = Config::empty(base_dir);
    let resolve = |p: &str| base_dir.join(p);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("//") {
            continue;
        }
        let syntax = |message: String| ConfigError::Syntax { line, message };
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, found `{t}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "alignments" => c.alignments.extend(list(value).map(resolve)),
            "interfaces" => c.interfaces.extend(list(value).map(resolve)),
            "templates" => c.templates.extend(list(value).map(resolve)),
            "dialect_rules" => c.dialect_rules.extend(list(value).map(resolve)),
            "interface_library" if !value.is_empty() => c.interface_library = LibraryId::new(value),
            "ingest_dir" if !value.is_empty() => c.ingest_dir = resolve(value),
            k => match k.strip_prefix("library.") {
                Some(lib) if !lib.is_empty() => {
                    let prefixes: Vec<&str> = list(value).collect();
                    if prefixes.is_empty() {
                        return Err(syntax(format!("library `{lib}` has no namespace prefix")));
                    }
                    for p in prefixes {
                        c.namespaces
                            .insert(p, LibraryId::new(lib))
                            .map_err(|source| ConfigError::Namespace { line, source })?;
                    }
                }
                _ => return Err(syntax(format!("unknown key `{k}`"))),
            },
        }
    }
    Ok(c)
}

/// Expand directories into their files, sorted by name.
pub fn expand_paths(paths: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}
