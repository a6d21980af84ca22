//! The `.fm` structure format.
//!
//! ```text
//! # a path on three vertices
//! signature: R/2
//! universe: 3
//! relation R: (0,1) (1,0) (1,2) (2,1)
//! set A: (1) (2)
//! seq I: (0) (1) (2)
//! submodel M0: 0 1
//! ```
//!
//! One section per line. A line that does not start with a section keyword
//! continues the tuple list of the previous `relation`, `set` or `seq`
//! section. `signature:` and `universe:` must precede everything else.
//! Duplicate tuples in relations and sets are dropped with a warning.

use std::collections::BTreeMap;

use fmlab_core::{Elem, Signature, Structure, Tuple, TupleSequence};

use crate::diag::Diagnostic;

/// A parsed `.fm` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureDocument {
    pub structure: Structure,
    /// Named tuple sets, sorted and without duplicates.
    pub sets: BTreeMap<String, Vec<Tuple>>,
    pub seqs: BTreeMap<String, TupleSequence>,
    /// Vertex lists, sorted and without duplicates.
    pub submodels: BTreeMap<String, Vec<Elem>>,
}

impl StructureDocument {
    pub fn new(structure: Structure) -> Self {
        StructureDocument { structure, sets: BTreeMap::new(), seqs: BTreeMap::new(), submodels: BTreeMap::new() }
    }

    pub fn set(&self, name: &str) -> Result<&[Tuple], String> {
        self.sets.get(name).map(Vec::as_slice).ok_or_else(|| format!("no set named {name}"))
    }

    /// A set of 1-tuples as elements.
    pub fn element_set(&self, name: &str) -> Result<Vec<Elem>, String> {
        let set = self.set(name)?;
        if set.iter().any(|t| t.len() != 1) {
            return Err(format!("set {name} does not consist of single elements"));
        }
        Ok(set.iter().map(|t| t[0]).collect())
    }

    pub fn seq(&self, name: &str) -> Result<&TupleSequence, String> {
        self.seqs.get(name).ok_or_else(|| format!("no sequence named {name}"))
    }

    pub fn submodel(&self, name: &str) -> Result<&[Elem], String> {
        self.submodels.get(name).map(Vec::as_slice).ok_or_else(|| format!("no submodel named {name}"))
    }

    /// Canonical text: signature, universe, relations in signature order,
    /// then sets, sequences and submodels by name.
    pub fn to_text(&self) -> String {
        let st = &self.structure;
        let mut out = String::from("signature:");
        for (name, arity) in st.signature().relations() {
            out.push_str(&format!(" {name}/{arity}"));
        }
        out.push_str(&format!("\nuniverse: {}\n", st.size()));
        for (i, (name, _)) in st.signature().relations().iter().enumerate() {
            out.push_str(&format!("relation {name}:"));
            push_tuples(&mut out, st.relation_at(i).tuples());
        }
        for (name, set) in &self.sets {
            out.push_str(&format!("set {name}:"));
            push_tuples(&mut out, set);
        }
        for (name, seq) in &self.seqs {
            out.push_str(&format!("seq {name}:"));
            push_tuples(&mut out, seq.tuples());
        }
        for (name, verts) in &self.submodels {
            out.push_str(&format!("submodel {name}:"));
            for v in verts {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}

fn push_tuples<'a>(out: &mut String, tuples: impl IntoIterator<Item = &'a Tuple>) {
    for t in tuples {
        out.push(' ');
        out.push_str(&format_tuple(t));
    }
    out.push('\n');
}

pub fn format_tuple(t: &[Elem]) -> String {
    let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Parse result: the document plus any warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub document: StructureDocument,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Clone, Copy)]
enum Section {
    Relation(usize),
    Set,
    Seq,
}

struct Open {
    kind: Section,
    name: String,
    line: usize,
    tuples: Vec<(Tuple, usize, usize)>,
}

pub fn parse_structure(text: &str) -> Result<Parsed, Diagnostic> {
    let mut sig: Option<Signature> = None;
    let mut universe: Option<usize> = None;
    let mut st: Option<Structure> = None;
    let mut doc_sets = BTreeMap::new();
    let mut doc_seqs = BTreeMap::new();
    let mut submodels = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut open: Option<Open> = None;
    let mut last_line = 0;

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let body = line.trim_start();
        let (head, rest, rest_col) = match body.find(':') {
            Some(i) if is_header(&body[..i]) => (Some(body[..i].trim()), &body[i + 1..], indent + i + 2),
            _ => (None, body, indent + 1),
        };
        let Some(head) = head else {
            let Some(sec) = open.as_mut() else {
                return Err(Diagnostic::new(ln, indent + 1, "expected a section header"));
            };
            sec.tuples.extend(parse_tuples(rest, ln, rest_col)?);
            continue;
        };
        if let Some(sec) = open.take() {
            close(sec, st.as_mut().expect("structure exists once sections open"), &mut doc_sets, &mut doc_seqs, &mut warnings)?;
        }
        let mut words = head.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let name = words.next();
        let head_col = indent + 1;
        match (keyword, name) {
            ("signature", None) => {
                if sig.is_some() {
                    return Err(Diagnostic::new(ln, head_col, "duplicate signature"));
                }
                sig = Some(parse_signature(rest, ln, rest_col)?);
            }
            ("universe", None) => {
                if universe.is_some() {
                    return Err(Diagnostic::new(ln, head_col, "duplicate universe"));
                }
                let Some(s) = sig.as_ref() else {
                    return Err(Diagnostic::new(ln, head_col, "missing signature"));
                };
                let v = rest.trim();
                let n: usize = v.parse().map_err(|_| Diagnostic::new(ln, rest_col + leading_ws(rest), format!("bad universe size {v:?}")))?;
                universe = Some(n);
                st = Some(Structure::new(s.clone(), n));
            }
            (kw @ ("relation" | "set" | "seq" | "submodel"), Some(name)) => {
                let Some(s) = st.as_ref() else {
                    let what = if sig.is_none() { "missing signature" } else { "missing universe" };
                    return Err(Diagnostic::new(ln, head_col, what));
                };
                let kind = match kw {
                    "relation" => {
                        let Some(idx) = s.signature().index_of(name) else {
                            return Err(Diagnostic::new(ln, head_col, format!("unknown relation {name}")));
                        };
                        Section::Relation(idx)
                    }
                    "set" => Section::Set,
                    "seq" => Section::Seq,
                    _ => {
                        let verts = parse_vertices(rest, ln, rest_col, s.size())?;
                        let mut sorted = verts.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        if sorted.len() != verts.len() {
                            warnings.push(Diagnostic::new(ln, head_col, format!("duplicate vertices in submodel {name}")));
                        }
                        if submodels.insert(name.to_string(), sorted).is_some() {
                            return Err(Diagnostic::new(ln, head_col, format!("duplicate submodel {name}")));
                        }
                        continue;
                    }
                };
                if matches!(kind, Section::Set | Section::Seq) && (doc_sets.contains_key(name) || doc_seqs.contains_key(name)) {
                    return Err(Diagnostic::new(ln, head_col, format!("duplicate name {name}")));
                }
                let tuples = parse_tuples(rest, ln, rest_col)?;
                open = Some(Open { kind, name: name.to_string(), line: ln, tuples });
            }
            _ => return Err(Diagnostic::new(ln, head_col, format!("unknown section {head:?}"))),
        }
    }
    if let Some(sec) = open.take() {
        close(sec, st.as_mut().expect("structure exists"), &mut doc_sets, &mut doc_seqs, &mut warnings)?;
    }
    let Some(structure) = st else {
        let what = if sig.is_none() { "missing signature" } else { "missing universe" };
        return Err(Diagnostic::new(last_line.max(1), 1, what));
    };
    Ok(Parsed { document: StructureDocument { structure, sets: doc_sets, seqs: doc_seqs, submodels }, warnings })
}

fn is_header(s: &str) -> bool {
    let mut w = s.split_whitespace();
    matches!(w.next(), Some("signature" | "universe" | "relation" | "set" | "seq" | "submodel")) && w.count() <= 1
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

fn close(
    sec: Open,
    st: &mut Structure,
    sets: &mut BTreeMap<String, Vec<Tuple>>,
    seqs: &mut BTreeMap<String, TupleSequence>,
    warnings: &mut Vec<Diagnostic>,
) -> Result<(), Diagnostic> {
    let n = st.size();
    let want = match sec.kind {
        Section::Relation(i) => Some(st.signature().relations()[i].1),
        _ => sec.tuples.first().map(|t| t.0.len()),
    };
    for (t, line, col) in &sec.tuples {
        if Some(t.len()) != want {
            return Err(Diagnostic::new(*line, *col, format!("arity mismatch: expected {} elements, found {}", want.unwrap_or(0), t.len())));
        }
        if let Some(&e) = t.iter().find(|&&e| e as usize >= n) {
            return Err(Diagnostic::new(*line, *col, format!("element {e} out of range for universe of size {n}")));
        }
    }
    match sec.kind {
        Section::Relation(i) => {
            let name = st.signature().relations()[i].0.clone();
            for (t, line, col) in sec.tuples {
                if !st.insert(&name, &t).map_err(|e| Diagnostic::new(line, col, e.to_string()))? {
                    warnings.push(Diagnostic::new(line, col, format!("duplicate tuple {} in {name}", format_tuple(&t))));
                }
            }
        }
        Section::Set => {
            let mut out: Vec<Tuple> = Vec::new();
            for (t, line, col) in sec.tuples {
                if out.contains(&t) {
                    warnings.push(Diagnostic::new(line, col, format!("duplicate tuple {} in {}", format_tuple(&t), sec.name)));
                } else {
                    out.push(t);
                }
            }
            out.sort();
            sets.insert(sec.name, out);
        }
        Section::Seq => {
            let arity = want.unwrap_or(1);
            let seq = TupleSequence::new(arity, sec.tuples.into_iter().map(|t| t.0).collect()).map_err(|e| Diagnostic::new(sec.line, 1, e.to_string()))?;
            seqs.insert(sec.name, seq);
        }
    }
    Ok(())
}

fn parse_signature(rest: &str, line: usize, col0: usize) -> Result<Signature, Diagnostic> {
    let mut rels = Vec::new();
    for (off, word) in words(rest) {
        let col = col0 + off;
        let (name, arity) = word.split_once('/').ok_or_else(|| Diagnostic::new(line, col, format!("expected NAME/ARITY, found {word:?}")))?;
        let arity: usize = arity.parse().map_err(|_| Diagnostic::new(line, col, format!("bad arity in {word:?}")))?;
        rels.push((name.to_string(), arity));
    }
    Signature::new(rels).map_err(|e| Diagnostic::new(line, col0, e.to_string()))
}

fn parse_vertices(rest: &str, line: usize, col0: usize, n: usize) -> Result<Vec<Elem>, Diagnostic> {
    words(rest)
        .map(|(off, w)| {
            let col = col0 + off;
            let v: Elem = w.parse().map_err(|_| Diagnostic::new(line, col, format!("expected a vertex, found {w:?}")))?;
            if v as usize >= n {
                return Err(Diagnostic::new(line, col, format!("element {v} out of range for universe of size {n}")));
            }
            Ok(v)
        })
        .collect()
}

/// Whitespace-separated words with their character offsets.
fn words(s: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (ci, (bi, c)) in s.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((ci, bi)),
            (true, Some((sc, sb))) => {
                out.push((sc, &s[sb..bi]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((sc, sb)) = start {
        out.push((sc, &s[sb..]));
    }
    out.into_iter()
}

/// Tuples `(e0,e1,…)`, whitespace allowed anywhere between tokens. Each
/// tuple carries the position of its opening parenthesis.
fn parse_tuples(s: &str, line: usize, col0: usize) -> Result<Vec<(Tuple, usize, usize)>, Diagnostic> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |i: usize, msg: String| Diagnostic::new(line, col0 + i, msg);
    let skip = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip(&mut i);
        if i == chars.len() {
            return Ok(out);
        }
        if chars[i] != '(' {
            return Err(err(i, format!("expected '(', found {:?}", chars[i])));
        }
        let open = i;
        i += 1;
        let mut t = Vec::new();
        skip(&mut i);
        if i < chars.len() && chars[i] == ')' {
            return Err(err(i, "empty tuple".into()));
        }
        loop {
            skip(&mut i);
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(err(i, if i == chars.len() { "expected an element, found end of line".into() } else { format!("expected an element, found {:?}", chars[i]) }));
            }
            let digits: String = chars[start..i].iter().collect();
            t.push(digits.parse::<Elem>().map_err(|_| err(start, format!("element {digits} too large")))?);
            skip(&mut i);
            match chars.get(i) {
                Some(',') => i += 1,
                Some(')') => {
                    i += 1;
                    break;
                }
                Some(c) => return Err(err(i, format!("expected ',' or ')', found {c:?}"))),
                None => return Err(err(i, "expected ')', found end of line".into())),
            }
        }
        out.push((t, line, col0 + open));
    }
}
