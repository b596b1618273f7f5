//! Argument maps: partial injective maps from source argument positions to
//! target argument positions.
//!
//! Positions are 1-based. A position that is neither a source nor a target of
//! any listed pair maps to itself (identity completion). Composition and
//! inversion can also produce positions that are explicitly dropped; those
//! never pick up the identity.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArgMapError {
    #[error("malformed argument map `{0}`")]
    Syntax(String),
    #[error("argument positions are 1-based, got 0")]
    ZeroPosition,
    #[error("argument position {0} is used twice as a {1}")]
    NotInjective(usize, &'static str),
    #[error("argument map reads position {position} but only {available} arguments were supplied")]
    ArityMismatch { position: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ArgMap {
    /// Sorted by source position; no fixed points.
    pairs: Vec<(usize, usize)>,
    /// Source positions with no image that completion would otherwise fill.
    dropped: Vec<usize>,
}

impl ArgMap {
    pub fn identity() -> Self {
        ArgMap::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ArgMapError> {
        Self::with_dropped(pairs, std::iter::empty())
    }

    fn with_dropped(
        pairs: impl IntoIterator<Item = (usize, usize)>,
        dropped: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ArgMapError> {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        let mut dropped: Vec<_> = dropped.into_iter().collect();
        if pairs.iter().any(|&(s, t)| s == 0 || t == 0) || dropped.contains(&0) {
            return Err(ArgMapError::ZeroPosition);
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ArgMapError::NotInjective(w[0].0, "source"));
            }
        }
        let mut tgts: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        tgts.sort_unstable();
        for w in tgts.windows(2) {
            if w[0] == w[1] {
                return Err(ArgMapError::NotInjective(w[0], "target"));
            }
        }
        dropped.sort_unstable();
        dropped.dedup();
        if let Some(&d) = dropped.iter().find(|d| pairs.iter().any(|p| p.0 == **d)) {
            return Err(ArgMapError::NotInjective(d, "source"));
        }
        // Canonical form: fixed points and drops of target positions are
        // implied by completion.
        pairs.retain(|&(s, t)| s != t);
        dropped.retain(|d| tgts.binary_search(d).is_err());
        Ok(ArgMap { pairs, dropped })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.is_empty() && self.dropped.is_empty()
    }

    /// Largest position mentioned; every position above it maps to itself.
    pub fn max_index(&self) -> usize {
        self.pairs
            .iter()
            .flat_map(|&(s, t)| [s, t])
            .chain(self.dropped.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn is_src(&self, p: usize) -> bool {
        self.pairs.iter().any(|&(s, _)| s == p)
    }

    fn is_tgt(&self, p: usize) -> bool {
        self.pairs.iter().any(|&(_, t)| t == p)
    }

    /// Where source position `s` ends up, under identity completion.
    pub fn image(&self, s: usize) -> Option<usize> {
        if let Some(&(_, t)) = self.pairs.iter().find(|&&(src, _)| src == s) {
            return Some(t);
        }
        if self.dropped.contains(&s) || self.is_tgt(s) {
            return None;
        }
        Some(s)
    }

    /// Which source position fills target slot `t`, under identity completion.
    pub fn preimage(&self, t: usize) -> Option<usize> {
        if let Some(&(s, _)) = self.pairs.iter().find(|&&(_, tgt)| tgt == t) {
            return Some(s);
        }
        if self.is_src(t) || self.dropped.contains(&t) {
            return None;
        }
        Some(t)
    }

    /// Number of target slots needed to hold `available` source arguments.
    pub fn observed_arity(&self, available: usize) -> usize {
        (1..=available)
            .filter_map(|s| self.image(s))
            .max()
            .unwrap_or(0)
    }

    /// Positions this map reads explicitly; all must be supplied.
    pub fn max_source(&self) -> usize {
        self.pairs.iter().map(|p| p.0).max().unwrap_or(0)
    }
}

/// Rearrange `args` into `target_arity` slots. Unfilled slots are `None`;
/// arguments that land beyond `target_arity` or nowhere are dropped.
pub fn apply_argmap<T: Clone>(
    map: &ArgMap,
    args: &[T],
    target_arity: usize,
) -> Result<Vec<Option<T>>, ArgMapError> {
    let max_src = map.max_source();
    if max_src > args.len() {
        return Err(ArgMapError::ArityMismatch {
            position: max_src,
            available: args.len(),
        });
    }
    Ok((1..=target_arity)
        .map(|t| {
            map.preimage(t)
                .filter(|&s| s <= args.len())
                .map(|s| args[s - 1].clone())
        })
        .collect())
}

/// `first` then `second`: the result sends `s` to `second(first(s))`.
pub fn compose_argmaps(first: &ArgMap, second: &ArgMap) -> ArgMap {
    let n = first.max_index().max(second.max_index());
    let mut pairs = Vec::new();
    let mut dropped = Vec::new();
    for s in 1..=n {
        match first.image(s).and_then(|m| second.image(m)) {
            Some(t) => pairs.push((s, t)),
            None => dropped.push(s),
        }
    }
    ArgMap::with_dropped(pairs, dropped).expect("composition of injective maps is injective")
}

pub fn invert_argmap(map: &ArgMap) -> ArgMap {
    let n = map.max_index();
    let mut pairs = Vec::new();
    let mut dropped = Vec::new();
    for t in 1..=n {
        match map.preimage(t) {
            Some(s) => pairs.push((t, s)),
            None => dropped.push(t),
        }
    }
    ArgMap::with_dropped(pairs, dropped).expect("inverse of an injective map is injective")
}

impl fmt::Display for ArgMap {
    /// `(1,2)(2,3)`; dropped positions print as `(3,_)`. Identity is empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<(usize, Option<usize>)> =
            self.pairs.iter().map(|&(s, t)| (s, Some(t))).collect();
        items.extend(self.dropped.iter().map(|&d| (d, None)));
        items.sort_unstable();
        for (s, t) in items {
            match t {
                Some(t) => write!(f, "({s},{t})")?,
                None => write!(f, "({s},_)")?,
            }
        }
        Ok(())
    }
}

impl FromStr for ArgMap {
    type Err = ArgMapError;

    /// Accepts `(INT,INT)` groups with no separators.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let syntax = || ArgMapError::Syntax(text.to_string());
        let mut rest = text.trim();
        let mut pairs = Vec::new();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(syntax)?;
            let close = body.find(')').ok_or_else(syntax)?;
            let (s, t) = body[..close].split_once(',').ok_or_else(syntax)?;
            let s: usize = s.trim().parse().map_err(|_| syntax())?;
            let t: usize = t.trim().parse().map_err(|_| syntax())?;
            pairs.push((s, t));
            rest = &body[close + 1..];
        }
        ArgMap::new(pairs)
    }
}
