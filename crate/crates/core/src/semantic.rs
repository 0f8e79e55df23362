//! Semantic sets: nodes whose text is a recognizable value, mapped to the
//! root of the smallest subtree carrying it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use regex::Regex;

use crate::corpus::Page;
use crate::dom::{Document, NodeKind};
use crate::eval::{EvalError, Evaluator, NodeSet};
use crate::xpath::Expr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticError {
    #[error("recognizer {name:?}: {message}")]
    Pattern { name: String, message: String },
    #[error("scope expression does not yield a node-set")]
    Scope,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
enum Matcher {
    Pattern(Regex),
    Json,
}

#[derive(Clone, Debug)]
pub struct Recognizer {
    name: String,
    pattern: String,
    whole_match: bool,
    matcher: Matcher,
}

pub const NUMBER: &str = r"[+-]?\d+(\.\d+)?";
pub const CURRENCY: &str = r"[$€£¥]\s?\d[\d,]*(\.\d+)?|\d[\d,]*(\.\d+)?\s?(USD|EUR|GBP|JPY)";
pub const HTTP_METHOD: &str = "GET|POST|PUT|DELETE|PATCH|HEAD|OPTIONS";

impl Recognizer {
    pub fn new(name: &str, pattern: &str, whole_match: bool) -> Result<Self, SemanticError> {
        let source = if whole_match { alloc::format!("^(?:{pattern})$") } else { String::from(pattern) };
        let regex = Regex::new(&source).map_err(|e| SemanticError::Pattern { name: name.into(), message: alloc::format!("{e}") })?;
        Ok(Recognizer { name: name.into(), pattern: pattern.into(), whole_match, matcher: Matcher::Pattern(regex) })
    }

    /// Balanced `{...}` or `[...]` text that parses as JSON.
    pub fn json() -> Self {
        Recognizer { name: "json".into(), pattern: String::new(), whole_match: false, matcher: Matcher::Json }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn whole_match(&self) -> bool {
        self.whole_match
    }

    /// Values recognized in already-normalized text.
    pub fn values(&self, text: &str) -> BTreeSet<String> {
        match &self.matcher {
            Matcher::Pattern(re) if self.whole_match => {
                if re.is_match(text) {
                    BTreeSet::from([String::from(text)])
                } else {
                    BTreeSet::new()
                }
            }
            Matcher::Pattern(re) => re.find_iter(text).filter(|m| !m.is_empty()).map(|m| m.as_str().into()).collect(),
            Matcher::Json => json_values(text),
        }
    }
}

fn json_values(text: &str) -> BTreeSet<String> {
    let bytes = text.as_bytes();
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'{' | b'[') {
            if let Some(end) = balanced_end(bytes, i) {
                let candidate = &text[i..end];
                if serde_json::from_str::<serde_json::Value>(candidate).is_ok() {
                    out.insert(String::from(candidate));
                    i = end;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}

/// Exclusive end of the bracketed region opening at `start`, skipping string literals.
fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut stack: Vec<u8> = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    for (k, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => stack.push(b'}'),
            b'[' => stack.push(b']'),
            b'}' | b']' => {
                if stack.pop() != Some(b) {
                    return None;
                }
                if stack.is_empty() {
                    return Some(k + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Recognizers by name. Later insertions replace earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: BTreeMap<String, Recognizer>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// number, currency, http-method and json.
    pub fn builtin() -> Self {
        let mut r = Registry::new();
        for (name, pattern) in [("number", NUMBER), ("currency", CURRENCY), ("http-method", HTTP_METHOD)] {
            r.insert(Recognizer::new(name, pattern, true).expect("built-in pattern compiles"));
        }
        r.insert(Recognizer::json());
        r
    }

    pub fn insert(&mut self, r: Recognizer) {
        self.entries.insert(r.name.clone(), r);
    }

    pub fn get(&self, name: &str) -> Option<&Recognizer> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Recognizer(String),
    XPath(Expr),
    /// A subset produced by [`partition_by_structure`].
    Partition {
        parent: String,
        signature: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemanticSet {
    pub name: String,
    pub members: NodeSet,
    pub provenance: Provenance,
}

/// Minimal matching subtree roots of `r` over `pages`.
///
/// Only elements are candidates; text nodes are represented by their parent.
/// An element qualifies for a value when its text yields the value and no
/// child element yields the same value. With a scope, only elements inside
/// the scope's subtrees are considered.
pub fn recognize<'p, I>(r: &Recognizer, pages: I, scope: Option<&NodeSet>) -> SemanticSet
where
    I: IntoIterator<Item = &'p Page>,
{
    let mut members = Vec::new();
    for page in pages {
        let doc = &page.document;
        let roots: Vec<u32> = match scope {
            None => alloc::vec![doc.root().index],
            Some(s) => s.iter().filter(|id| id.page == *doc.url()).map(|id| id.index).collect(),
        };
        let mut seen = BTreeSet::new();
        for root in roots {
            for idx in core::iter::once(root).chain(doc.descendant_range(root)) {
                if seen.insert(idx) && doc.node(idx).kind == NodeKind::Element && is_minimal(r, doc, idx) {
                    members.push(doc.id(idx));
                }
            }
        }
    }
    SemanticSet { name: r.name.clone(), members: NodeSet::from_unsorted(members), provenance: Provenance::Recognizer(r.name.clone()) }
}

fn is_minimal(r: &Recognizer, doc: &Document, idx: u32) -> bool {
    let mut own = r.values(&doc.text_content(idx));
    if own.is_empty() {
        return false;
    }
    for c in doc.visible_children(idx) {
        if doc.node(c).kind == NodeKind::Element {
            for v in r.values(&doc.text_content(c)) {
                own.remove(&v);
            }
            if own.is_empty() {
                return false;
            }
        }
    }
    true
}

/// `recognize` with a scope given as an expression evaluated from `context`.
pub fn recognize_scoped<'p, I>(
    r: &Recognizer,
    pages: I,
    scope: &Expr,
    evaluator: &Evaluator<'_>,
    context: &NodeSet,
) -> Result<SemanticSet, SemanticError>
where
    I: IntoIterator<Item = &'p Page>,
{
    let scope = evaluator.evaluate(scope, context)?.into_node_set().ok_or(SemanticError::Scope)?;
    Ok(recognize(r, pages, Some(&scope)))
}

/// The answer set of `e` from `context`, which is usually the seed roots.
pub fn set_from_xpath(e: &Expr, evaluator: &Evaluator<'_>, context: &NodeSet) -> Result<SemanticSet, EvalError> {
    let members = evaluator.evaluate_node_set(e, context)?;
    Ok(SemanticSet { name: crate::xpath::pretty_print(e), members, provenance: Provenance::XPath(e.clone()) })
}

/// Splits a set by the tag path of each member.
pub fn partition_by_structure(s: &SemanticSet, evaluator: &Evaluator<'_>) -> Result<Vec<SemanticSet>, EvalError> {
    let mut groups: Vec<(String, Vec<crate::dom::NodeId>)> = Vec::new();
    let mut by_sig: BTreeMap<String, usize> = BTreeMap::new();
    for id in &s.members {
        let sig = evaluator.page(&id.page)?.document.tag_path(id.index);
        let slot = *by_sig.entry(sig.clone()).or_insert_with(|| {
            groups.push((sig, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(id.clone());
    }
    Ok(groups
        .into_iter()
        .map(|(signature, ids)| SemanticSet {
            name: alloc::format!("{}#{signature}", s.name),
            members: NodeSet::from_unsorted(ids),
            provenance: Provenance::Partition { parent: s.name.clone(), signature },
        })
        .collect())
}
