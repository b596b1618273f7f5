//! Alignment records and the line-oriented alignment file format.
//!
//! ```text
//! // comment
//! <from-uri> <to-uri> [key="value"]*
//! ```
//!
//! Reserved keys are `arguments`, `direction`, `priority` and `group`; any
//! other key is kept verbatim in [`Alignment::props`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::argmap::ArgMap;
use crate::uri::SymbolUri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Both => "both",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            "both" => Ok(Direction::Both),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub from: SymbolUri,
    pub to: SymbolUri,
    pub direction: Direction,
    pub argmap: ArgMap,
    pub priority: i64,
    pub group: Option<String>,
    /// Unreserved `key="value"` pairs in file order.
    pub props: Vec<(String, String)>,
}

impl Alignment {
    pub fn new(from: SymbolUri, to: SymbolUri) -> Self {
        Alignment {
            from,
            to,
            direction: Direction::Both,
            argmap: ArgMap::identity(),
            priority: 0,
            group: None,
            props: Vec::new(),
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_argmap(mut self, argmap: ArgMap) -> Self {
        self.argmap = argmap;
        self
    }

    pub fn prop(&self, key: &str) -> Option<&str> {
        self.props
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn is_negated(&self) -> bool {
        self.prop("negated") == Some("true")
    }
}

impl fmt::Display for Alignment {
    /// One alignment line. Defaults (`both`, identity, priority 0) are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.from, self.to)?;
        if !self.argmap.is_identity() {
            write!(f, " arguments=\"{}\"", self.argmap)?;
        }
        if self.direction != Direction::Both {
            write!(f, " direction=\"{}\"", self.direction)?;
        }
        if self.priority != 0 {
            write!(f, " priority=\"{}\"", self.priority)?;
        }
        if let Some(g) = &self.group {
            write!(f, " group=\"{g}\"")?;
        }
        for (k, v) in &self.props {
            write!(f, " {k}=\"{v}\"")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum AlignmentClass {
    Bidirectional,
    Unidirectional { usable: Direction },
    Unusable { reason: String },
}

pub fn classify(a: &Alignment) -> AlignmentClass {
    if a.is_negated() {
        return AlignmentClass::Unusable {
            reason: "negation not supported".into(),
        };
    }
    match a.direction {
        Direction::Both => AlignmentClass::Bidirectional,
        usable => AlignmentClass::Unidirectional { usable },
    }
}

/// A problem found on one line of an alignment file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDiagnostic {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for LineDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedAlignments {
    pub alignments: Vec<Alignment>,
    /// Source line of each alignment, parallel to `alignments`.
    pub lines: Vec<usize>,
    pub diagnostics: Vec<LineDiagnostic>,
}

fn is_comment_or_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with("//")
}

/// Split `key="value"` pairs. Values may contain whitespace but not quotes.
fn split_props(mut rest: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        let eq = rest
            .find('=')
            .ok_or_else(|| format!("expected key=\"value\" at `{rest}`"))?;
        let key = &rest[..eq];
        if key.is_empty() || key.chars().any(|c| c.is_whitespace() || c == '"') {
            return Err(format!("malformed key `{key}`"));
        }
        let after = rest[eq + 1..]
            .strip_prefix('"')
            .ok_or_else(|| format!("value of `{key}` must be quoted"))?;
        let close = after
            .find('"')
            .ok_or_else(|| format!("unterminated value for `{key}`"))?;
        if out.iter().any(|(k, _): &(String, String)| k == key) {
            return Err(format!("duplicate key `{key}`"));
        }
        out.push((key.to_string(), after[..close].to_string()));
        rest = &after[close + 1..];
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            return Err(format!("missing whitespace after value of `{key}`"));
        }
    }
}

pub fn parse_alignment_line(line: &str) -> Result<Alignment, String> {
    fn word(s: &str) -> (&str, &str) {
        let s = s.trim_start();
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        (&s[..end], &s[end..])
    }
    let (from, rest) = word(line);
    let (to, rest) = word(rest);
    if to.is_empty() {
        return Err("expected two URIs".into());
    }
    let from = SymbolUri::parse(from).map_err(|e| e.to_string())?;
    let to = SymbolUri::parse(to).map_err(|e| e.to_string())?;
    if from == to {
        return Err(format!("alignment of `{from}` with itself"));
    }
    let mut a = Alignment::new(from, to);
    for (key, value) in split_props(rest)? {
        match key.as_str() {
            "arguments" => {
                a.argmap = value
                    .parse::<ArgMap>()
                    .map_err(|e| format!("arguments: {e}"))?;
            }
            "direction" => a.direction = value.parse()?,
            "priority" => {
                a.priority = value
                    .parse()
                    .map_err(|_| format!("priority `{value}` is not an integer"))?;
            }
            "group" => {
                if value.is_empty() {
                    return Err("empty group name".into());
                }
                a.group = Some(value);
            }
            _ => a.props.push((key, value)),
        }
    }
    Ok(a)
}

/// Parse a whole file. Malformed lines become diagnostics and are skipped;
/// nothing aborts the file.
pub fn parse_alignment_file(text: &str) -> ParsedAlignments {
    let mut out = ParsedAlignments::default();
    for (i, line) in text.lines().enumerate() {
        if is_comment_or_blank(line) {
            continue;
        }
        match parse_alignment_line(line) {
            Ok(a) => {
                out.alignments.push(a);
                out.lines.push(i + 1);
            }
            Err(reason) => out.diagnostics.push(LineDiagnostic {
                line: i + 1,
                reason,
            }),
        }
    }
    out
}

/// Number of lines that are neither blank nor comments.
pub fn content_line_count(text: &str) -> usize {
    text.lines().filter(|l| !is_comment_or_blank(l)).count()
}
