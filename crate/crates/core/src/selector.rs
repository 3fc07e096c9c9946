//! Channel selection and the sidecar selector file.
//!
//! Selector file syntax, one declaration per line:
//!
//! ```text
//! # comment
//! triple head: hx, hy, hz
//! hands: lh*, rh*
//! first_five: 0..5
//! ```
//!
//! Group entries are channel names, `*` globs, 0-based index ranges `a..b`
//! (end-exclusive), bare indices, or triple names.

use std::collections::HashSet;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::series::{ChannelTriple, MultiChannelSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectorEntry {
    Index(usize),
    Range(Range<usize>),
    Glob(String),
    /// Exact channel name; falls back to a triple name, then to a bare index.
    Name(String),
    Triple(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChannelSelector {
    pub entries: Vec<SelectorEntry>,
}

impl ChannelSelector {
    pub fn new(entries: Vec<SelectorEntry>) -> Self {
        Self { entries }
    }

    /// Parses a comma-separated entry list such as `hx, f*, 3..6`.
    pub fn parse(list: &str) -> Result<Self> {
        parse_entries(list, 0)
    }

    /// Column indices in selector order.
    pub fn resolve(&self, series: &MultiChannelSeries) -> Result<Vec<usize>> {
        let n = series.n_channels();
        let mut cols = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |c: usize, cols: &mut Vec<usize>| -> Result<()> {
            if !seen.insert(c) {
                return Err(Error::DuplicateChannel(series.channel_names()[c].clone()));
            }
            cols.push(c);
            Ok(())
        };
        let triple = |name: &str| series.triples().iter().find(|t| t.name == name);
        for entry in &self.entries {
            match entry {
                SelectorEntry::Index(i) => {
                    if *i >= n {
                        return Err(Error::UnknownName(format!("index {i} (series has {n} channels)")));
                    }
                    push(*i, &mut cols)?;
                }
                SelectorEntry::Range(r) => {
                    if r.end > n || r.start > r.end {
                        return Err(Error::UnknownName(format!(
                            "range {}..{} (series has {n} channels)",
                            r.start, r.end
                        )));
                    }
                    for c in r.clone() {
                        push(c, &mut cols)?;
                    }
                }
                SelectorEntry::Glob(pat) => {
                    for (c, name) in series.channel_names().iter().enumerate() {
                        if glob_match(pat, name) {
                            push(c, &mut cols)?;
                        }
                    }
                }
                SelectorEntry::Name(name) => {
                    if let Some(c) = series.channel_index(name) {
                        push(c, &mut cols)?;
                    } else if let Some(tr) = triple(name) {
                        for c in tr.columns {
                            push(c, &mut cols)?;
                        }
                    } else if let Ok(i) = name.parse::<usize>() {
                        if i >= n {
                            return Err(Error::UnknownName(format!("index {i} (series has {n} channels)")));
                        }
                        push(i, &mut cols)?;
                    } else {
                        return Err(Error::UnknownName(name.clone()));
                    }
                }
                SelectorEntry::Triple(name) => {
                    let tr = triple(name).ok_or_else(|| Error::UnknownName(format!("triple {name}")))?;
                    for c in tr.columns {
                        push(c, &mut cols)?;
                    }
                }
            }
        }
        if cols.is_empty() {
            return Err(Error::NoMatch(format!("{:?}", self.entries)));
        }
        Ok(cols)
    }
}

/// `*` matches any run of characters (including none); everything else is literal.
pub fn glob_match(pattern: &str, name: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let s: Vec<char> = name.chars().collect();
    let (mut pi, mut si) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while si < s.len() {
        if pi < p.len() && p[pi] == '*' {
            star = Some((pi, si));
            pi += 1;
        } else if pi < p.len() && p[pi] == s[si] {
            pi += 1;
            si += 1;
        } else if let Some((sp, ss)) = star {
            pi = sp + 1;
            si = ss + 1;
            star = Some((sp, ss + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

fn parse_entry(raw: &str, line: usize) -> Result<SelectorEntry> {
    let tok = raw.trim();
    if tok.is_empty() {
        return Err(Error::SelectorSyntax {
            line,
            msg: "empty entry".into(),
        });
    }
    if tok.contains('*') {
        return Ok(SelectorEntry::Glob(tok.to_owned()));
    }
    if let Some((a, b)) = tok.split_once("..") {
        let parse = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| Error::SelectorSyntax {
                line,
                msg: format!("bad index range {tok:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a >= b {
            return Err(Error::SelectorSyntax {
                line,
                msg: format!("empty index range {tok:?}"),
            });
        }
        return Ok(SelectorEntry::Range(a..b));
    }
    Ok(SelectorEntry::Name(tok.to_owned()))
}

fn parse_entries(list: &str, line: usize) -> Result<ChannelSelector> {
    let entries = list
        .split(',')
        .map(|e| parse_entry(e, line))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelSelector::new(entries))
}

/// A declared triple before resolution against a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleDecl {
    pub name: String,
    pub members: [SelectorEntry; 3],
}

/// Parsed contents of a selector file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelectorFile {
    pub groups: Vec<(String, ChannelSelector)>,
    pub triples: Vec<TripleDecl>,
}

impl SelectorFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = SelectorFile::default();
        let mut names = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (head, rest) = body.split_once(':').ok_or_else(|| Error::SelectorSyntax {
                line,
                msg: "expected `name: entries`".into(),
            })?;
            let head = head.trim();
            let (is_triple, name) = match head.strip_prefix("triple ") {
                Some(n) => (true, n.trim()),
                None => (false, head),
            };
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::SelectorSyntax {
                    line,
                    msg: format!("bad name {name:?}"),
                });
            }
            if !names.insert(name.to_owned()) {
                return Err(Error::SelectorSyntax {
                    line,
                    msg: format!("duplicate name {name:?}"),
                });
            }
            let sel = parse_entries(rest, line)?;
            if is_triple {
                let members: [SelectorEntry; 3] = sel.entries.try_into().map_err(|_| Error::SelectorSyntax {
                    line,
                    msg: "a triple needs exactly three entries".into(),
                })?;
                if members
                    .iter()
                    .any(|m| matches!(m, SelectorEntry::Glob(_) | SelectorEntry::Range(_)))
                {
                    return Err(Error::SelectorSyntax {
                        line,
                        msg: "triple members must be single channels".into(),
                    });
                }
                file.triples.push(TripleDecl {
                    name: name.to_owned(),
                    members,
                });
            } else {
                file.groups.push((name.to_owned(), sel));
            }
        }
        Ok(file)
    }

    pub fn group(&self, name: &str) -> Option<&ChannelSelector> {
        self.groups.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    /// Resolves the declared triples against `series` and attaches them.
    pub fn apply_triples(&self, series: MultiChannelSeries) -> Result<MultiChannelSeries> {
        let mut triples = Vec::with_capacity(self.triples.len());
        for decl in &self.triples {
            let mut columns = [0usize; 3];
            for (slot, member) in columns.iter_mut().zip(&decl.members) {
                let cols = ChannelSelector::new(vec![member.clone()]).resolve(&series)?;
                *slot = cols[0];
            }
            triples.push(ChannelTriple {
                name: decl.name.clone(),
                columns,
            });
        }
        series.with_triples(triples)
    }
}
