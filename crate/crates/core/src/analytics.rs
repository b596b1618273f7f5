//! Corpus statistics: direction counts per topic and library, and how many
//! systems each interface symbol is aligned to.
//!
//! The topic of an alignment is the module of its interface endpoint, or
//! `unclassified` when neither endpoint is an interface symbol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::alignment::{classify, Alignment, AlignmentClass};
use crate::interface::TheoryRegistry;
use crate::uri::{LibraryId, NamespaceTable, SymbolUri};

pub const UNCLASSIFIED: &str = "unclassified";

/// Largest intersection bucket reported in its own column.
pub const MAX_BUCKET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DirectionCounts {
    pub bidirectional: usize,
    pub unidirectional: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionRow {
    pub topic: String,
    pub library: String,
    pub bidirectional: usize,
    pub unidirectional: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DirectionReport {
    pub rows: Vec<DirectionRow>,
    pub totals: BTreeMap<String, DirectionCounts>,
    /// Unusable alignments per library; not part of `rows`.
    pub unusable: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionRow {
    pub topic: String,
    /// `counts[k-1]` symbols are aligned to exactly `k` systems, k = 1..=4.
    pub counts: [usize; MAX_BUCKET],
    /// Symbols aligned to more than four systems.
    pub beyond: usize,
    /// Interface symbols with no alignment at all.
    pub unaligned: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IntersectionReport {
    pub rows: Vec<IntersectionRow>,
    pub totals: [usize; MAX_BUCKET],
    pub beyond: usize,
    pub unaligned: usize,
}

/// What the analytics need to know about symbols.
pub struct Corpus<'a> {
    pub alignments: &'a [Alignment],
    pub registry: &'a TheoryRegistry,
    pub namespaces: &'a NamespaceTable,
    pub interface_library: &'a LibraryId,
}

impl Corpus<'_> {
    fn is_interface(&self, s: &SymbolUri) -> bool {
        self.namespaces.library_of(s) == Some(self.interface_library) || self.registry.contains(s)
    }

    fn topic(&self, s: &SymbolUri) -> String {
        self.registry
            .theory_of(s)
            .map(|t| t.uri.module.clone())
            .unwrap_or_else(|| s.module().to_string())
    }

    fn alignment_topic(&self, a: &Alignment) -> String {
        [&a.from, &a.to]
            .into_iter()
            .find(|s| self.is_interface(s))
            .map(|s| self.topic(s))
            .unwrap_or_else(|| UNCLASSIFIED.to_string())
    }

    /// Non-interface libraries of the endpoints, each once.
    fn libraries(&self, a: &Alignment) -> BTreeSet<String> {
        [&a.from, &a.to]
            .into_iter()
            .filter(|s| !self.is_interface(s))
            .filter_map(|s| self.namespaces.library_of(s))
            .map(|l| l.0.clone())
            .collect()
    }
}

pub fn direction_counts(corpus: &Corpus) -> DirectionReport {
    let mut cells: BTreeMap<(String, String), DirectionCounts> = BTreeMap::new();
    let mut report = DirectionReport::default();
    for a in corpus.alignments {
        let class = classify(a);
        let topic = corpus.alignment_topic(a);
        for lib in corpus.libraries(a) {
            match class {
                AlignmentClass::Unusable { .. } => *report.unusable.entry(lib).or_default() += 1,
                AlignmentClass::Bidirectional => {
                    cells.entry((topic.clone(), lib)).or_default().bidirectional += 1
                }
                AlignmentClass::Unidirectional { .. } => {
                    cells
                        .entry((topic.clone(), lib))
                        .or_default()
                        .unidirectional += 1
                }
            }
        }
    }
    for ((topic, library), c) in cells {
        let t = report.totals.entry(library.clone()).or_default();
        t.bidirectional += c.bidirectional;
        t.unidirectional += c.unidirectional;
        report.rows.push(DirectionRow {
            topic,
            library,
            bidirectional: c.bidirectional,
            unidirectional: c.unidirectional,
        });
    }
    report
}

pub fn intersection_counts(corpus: &Corpus) -> IntersectionReport {
    let mut systems: BTreeMap<SymbolUri, BTreeSet<String>> = corpus
        .registry
        .theories()
        .iter()
        .flat_map(|t| t.symbols())
        .map(|s| (s, BTreeSet::new()))
        .collect();
    for a in corpus.alignments {
        for (i, o) in [(&a.from, &a.to), (&a.to, &a.from)] {
            if corpus.is_interface(i) && !corpus.is_interface(o) {
                let set = systems.entry(i.clone()).or_default();
                if let Some(lib) = corpus.namespaces.library_of(o) {
                    set.insert(lib.0.clone());
                }
            }
        }
    }
    let mut by_topic: BTreeMap<String, IntersectionRow> = BTreeMap::new();
    for (s, libs) in systems {
        let topic = corpus.topic(&s);
        let row = by_topic.entry(topic.clone()).or_insert(IntersectionRow {
            topic,
            counts: [0; MAX_BUCKET],
            beyond: 0,
            unaligned: 0,
        });
        match libs.len() {
            0 => row.unaligned += 1,
            k if k <= MAX_BUCKET => row.counts[k - 1] += 1,
            _ => row.beyond += 1,
        }
    }
    let mut report = IntersectionReport::default();
    for row in by_topic.into_values() {
        for k in 0..MAX_BUCKET {
            report.totals[k] += row.counts[k];
        }
        report.beyond += row.beyond;
        report.unaligned += row.unaligned;
        report.rows.push(row);
    }
    report
}

impl DirectionReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("# alignments incident to each library, whatever the other endpoint\n");
        out.push_str("topic\tlibrary\tbidirectional\tunidirectional\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                r.topic, r.library, r.bidirectional, r.unidirectional
            );
        }
        for (lib, t) in &self.totals {
            let _ = writeln!(
                out,
                "TOTAL\t{lib}\t{}\t{}",
                t.bidirectional, t.unidirectional
            );
        }
        for (lib, n) in &self.unusable {
            let _ = writeln!(out, "# unusable\t{lib}\t{n}");
        }
        out
    }
}

impl IntersectionReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("# interface symbols aligned to exactly k systems\n");
        out.push_str("topic\tk=1\tk=2\tk=3\tk=4\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.topic, r.counts[0], r.counts[1], r.counts[2], r.counts[3]
            );
        }
        let t = &self.totals;
        let _ = writeln!(out, "TOTAL\t{}\t{}\t{}\t{}", t[0], t[1], t[2], t[3]);
        let _ = writeln!(out, "# unaligned (k=0)\t{}", self.unaligned);
        if self.beyond > 0 {
            let _ = writeln!(
                out,
                "# aligned to more than {MAX_BUCKET} systems\t{}",
                self.beyond
            );
        }
        out
    }
}

/// Published per-library sums to compare a report against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceSums {
    pub directions: BTreeMap<String, DirectionCounts>,
    pub intersections: BTreeMap<usize, usize>,
}

/// Lines `directions<TAB>LIB<TAB>BI<TAB>UNI` and `intersections<TAB>K<TAB>N`;
/// `#` starts a comment.
pub fn parse_reference(text: &str) -> Result<ReferenceSums, String> {
    let mut refs = ReferenceSums::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("line {}: `{s}` is not a count", i + 1))
        };
        match f.as_slice() {
            ["directions", lib, b, u] => {
                refs.directions.insert(
                    lib.to_string(),
                    DirectionCounts {
                        bidirectional: num(b)?,
                        unidirectional: num(u)?,
                    },
                );
            }
            ["intersections", k, n] => {
                refs.intersections.insert(num(k)?, num(n)?);
            }
            _ => return Err(format!("line {}: unrecognized reference row", i + 1)),
        }
    }
    Ok(refs)
}

/// Human-readable differences between computed and reference sums.
pub fn compare_directions(report: &DirectionReport, refs: &ReferenceSums) -> Vec<String> {
    let mut out = Vec::new();
    for (lib, want) in &refs.directions {
        let got = report.totals.get(lib).copied().unwrap_or_default();
        if got != *want {
            out.push(format!(
                "{lib}: computed {}/{}, reference {}/{}",
                got.bidirectional, got.unidirectional, want.bidirectional, want.unidirectional
            ));
        }
    }
    out
}

pub fn compare_intersections(report: &IntersectionReport, refs: &ReferenceSums) -> Vec<String> {
    let mut out = Vec::new();
    for (&k, &want) in &refs.intersections {
        let got = match k {
            1..=MAX_BUCKET => report.totals[k - 1],
            _ => continue,
        };
        if got != want {
            out.push(format!("k={k}: computed {got}, reference {want}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::parse_alignment_file;
    use crate::interface::parse_interface_file;

    const IFACE: &str =
        "namespace i:\ntheory Sets =\n  union # 1 ∪ 2\n  member # 1 ∈ 2\n  empty\nend\n";

    fn ns() -> NamespaceTable {
        let mut t = NamespaceTable::new();
        for (p, l) in [("i:", "Interface"), ("pvs:", "PVS"), ("hol:", "HOLLight")] {
            t.insert(p, LibraryId::new(l)).unwrap();
        }
        t
    }

    fn run(aligns: &str) -> (DirectionReport, IntersectionReport) {
        let reg = TheoryRegistry::new(parse_interface_file(IFACE).unwrap()).unwrap();
        let parsed = parse_alignment_file(aligns);
        assert!(parsed.diagnostics.is_empty());
        let ns = ns();
        let lib = LibraryId::new("Interface");
        let c = Corpus {
            alignments: &parsed.alignments,
            registry: &reg,
            namespaces: &ns,
            interface_library: &lib,
        };
        (direction_counts(&c), intersection_counts(&c))
    }

    #[test]
    fn two_both_one_forward() {
        let (d, _) = run(
            "i:?Sets?union pvs:?sets?union\ni:?Sets?member pvs:?sets?member\n\
             pvs:?sets?emptyset i:?Sets?empty direction=\"forward\"\n",
        );
        assert_eq!(
            d.rows,
            [DirectionRow {
                topic: "Sets".into(),
                library: "PVS".into(),
                bidirectional: 2,
                unidirectional: 1
            }]
        );
        assert_eq!(d.totals["PVS"].bidirectional, 2);
    }

    #[test]
    fn empty_corpus() {
        let (d, x) = run("");
        assert!(d.rows.is_empty() && d.totals.is_empty());
        assert_eq!(x.totals, [0; 4]);
        assert_eq!(x.unaligned, 3);
        assert_eq!(
            d.to_tsv().lines().filter(|l| !l.starts_with('#')).count(),
            1
        );
    }

    #[test]
    fn library_counted_once_per_symbol() {
        let (_, x) = run(
            "i:?Sets?union pvs:?sets?union\ni:?Sets?union pvs:?sets?union2\ni:?Sets?union hol:?S?UNION\n",
        );
        assert_eq!(x.totals, [0, 1, 0, 0]);
        assert_eq!(x.unaligned, 2);
    }

    #[test]
    fn unusable_and_unclassified() {
        let (d, _) = run("pvs:?reals?gt hol:?R?lt negated=\"true\"\npvs:?a?f hol:?b?f\n");
        assert_eq!(d.unusable["PVS"], 1);
        assert_eq!(d.unusable["HOLLight"], 1);
        assert!(d.rows.iter().all(|r| r.topic == UNCLASSIFIED));
        assert_eq!(d.rows.len(), 2);
    }

    #[test]
    fn reference_comparison() {
        let refs = parse_reference("# sums\ndirections\tPVS\t2\t0\nintersections\t1\t7\n").unwrap();
        let (d, x) = run("i:?Sets?union pvs:?sets?union\ni:?Sets?member pvs:?sets?member\n");
        assert!(compare_directions(&d, &refs).is_empty());
        assert_eq!(
            compare_intersections(&x, &refs),
            ["k=1: computed 2, reference 7"]
        );
        assert!(parse_reference("nonsense\n").is_err());
    }
}
