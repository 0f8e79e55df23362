//! Pages, corpora and the page-source abstraction used for link traversal.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::annotations::Annotations;
use crate::dom::{Document, NodeId, PageUrl};

/// A parsed document together with its sidecar annotations.
#[derive(Clone, Debug, PartialEq)]
pub struct Page {
    pub document: Document,
    pub annotations: Annotations,
}

impl Page {
    pub fn new(document: Document) -> Self {
        Page { document, annotations: Annotations::default() }
    }

    pub fn with_annotations(document: Document, annotations: Annotations) -> Self {
        Page { document, annotations }
    }

    pub fn url(&self) -> &PageUrl {
        self.document.url()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("fetch budget exhausted")]
    BudgetExhausted,
    #[error("host not allowed: {0}")]
    HostDenied(String),
    #[error("network error: {0}")]
    Network(String),
}

/// Cache state of a URL as seen by a [`PageSource`].
#[derive(Clone, Debug)]
pub enum Lookup {
    Resident(Arc<Page>),
    /// A previous load failed; the failure is remembered for the run.
    Failed,
    Absent,
}

/// Where the evaluator finds pages.
///
/// `resident` never loads anything; `fetch` may. Implementations must return
/// the same `Arc<Page>` for repeated requests of one URL.
pub trait PageSource {
    fn resident(&self, url: &str) -> Lookup;

    /// Turn a raw attribute or text value into the URL of a page, if it is one.
    fn resolve(&self, base: &str, reference: &str) -> Option<String>;

    fn fetch(&self, url: &str) -> Result<Arc<Page>, FetchError>;
}

/// A closed set of already-parsed pages.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pages: BTreeMap<PageUrl, Arc<Page>>,
    seeds: Vec<PageUrl>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    /// Adds a page and marks it as a seed.
    pub fn insert(&mut self, page: Page) -> Arc<Page> {
        let url = page.url().clone();
        let page = Arc::new(page);
        if self.pages.insert(url.clone(), page.clone()).is_none() {
            self.seeds.push(url);
        }
        page
    }

    /// Adds a page that is reachable by links but is not a seed.
    pub fn insert_linked(&mut self, page: Page) -> Arc<Page> {
        let url = page.url().clone();
        let page = Arc::new(page);
        self.pages.insert(url, page.clone());
        page
    }

    pub fn get(&self, url: &str) -> Option<&Arc<Page>> {
        self.pages.get(url)
    }

    pub fn pages(&self) -> impl Iterator<Item = &Arc<Page>> {
        self.pages.values()
    }

    pub fn seeds(&self) -> &[PageUrl] {
        &self.seeds
    }

    pub fn seed_pages(&self) -> impl Iterator<Item = &Arc<Page>> {
        self.seeds.iter().filter_map(|u| self.pages.get(u))
    }

    /// Root elements of all seed pages, in URL order.
    pub fn seed_roots(&self) -> crate::eval::NodeSet {
        crate::eval::NodeSet::from_unsorted(self.seed_pages().map(|p| p.document.root()).collect())
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    /// True when the node's page is in the corpus and the index exists.
    pub fn contains(&self, id: &NodeId) -> bool {
        self.pages.get(id.page.as_str()).is_some_and(|p| (id.index as usize) < p.document.len())
    }
}

impl PageSource for Corpus {
    fn resident(&self, url: &str) -> Lookup {
        match self.pages.get(url) {
            Some(p) => Lookup::Resident(p.clone()),
            None => Lookup::Absent,
        }
    }

    fn resolve(&self, base: &str, reference: &str) -> Option<String> {
        resolve_reference(base, reference)
    }

    fn fetch(&self, url: &str) -> Result<Arc<Page>, FetchError> {
        self.pages.get(url).cloned().ok_or_else(|| FetchError::Network(alloc::format!("not in corpus: {url}")))
    }
}

/// Minimal reference resolution: absolute URLs pass through, relative ones
/// are joined to `base`, dot segments are removed and fragments stripped.
///
/// Values containing whitespace, `javascript:`/`mailto:` references and
/// empty values are not links.
pub fn resolve_reference(base: &str, reference: &str) -> Option<String> {
    let r = reference.trim();
    let r = r.split('#').next().unwrap_or("");
    if r.is_empty() && !reference.trim().starts_with('#') {
        return None;
    }
    if r.chars().any(char::is_whitespace) {
        return None;
    }
    let lower = r.to_ascii_lowercase();
    if lower.starts_with("javascript:") || lower.starts_with("mailto:") || lower.starts_with("data:") {
        return None;
    }
    let base = base.split('#').next().unwrap_or("");
    if let Some((scheme, _)) = split_scheme(r) {
        return Some(normalize_path_of(&alloc::format!("{}{}", scheme.to_ascii_lowercase(), &r[scheme.len()..])));
    }
    if r.is_empty() {
        return Some(String::from(base));
    }
    let (origin, base_path) = match split_scheme(base) {
        Some((scheme, rest)) if rest.starts_with("//") => {
            let after = &rest[2..];
            let slash = after.find('/').unwrap_or(after.len());
            let origin_len = scheme.len() + 1 + 2 + slash;
            (&base[..origin_len], &base[origin_len..])
        }
        _ => ("", base),
    };
    if let Some(net) = r.strip_prefix("//") {
        let scheme = split_scheme(base).map_or("http", |(s, _)| s);
        return Some(normalize_path_of(&alloc::format!("{scheme}://{net}")));
    }
    let base_path = base_path.split('?').next().unwrap_or("");
    let joined = if r.starts_with('/') {
        String::from(r)
    } else if r.starts_with('?') {
        alloc::format!("{base_path}{r}")
    } else {
        let dir = base_path.rfind('/').map_or("", |i| &base_path[..=i]);
        alloc::format!("{dir}{r}")
    };
    Some(alloc::format!("{origin}{}", remove_dot_segments(&joined)))
}

fn split_scheme(s: &str) -> Option<(&str, &str)> {
    let colon = s.find(':')?;
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    let first = chars.next()?;
    if !first.is_ascii_alphabetic() || !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return None;
    }
    Some((scheme, &s[colon + 1..]))
}

fn normalize_path_of(url: &str) -> String {
    match split_scheme(url) {
        Some((scheme, rest)) if rest.starts_with("//") => {
            let after = &rest[2..];
            let slash = after.find('/').unwrap_or(after.len());
            let host = after[..slash].to_ascii_lowercase();
            let path = &after[slash..];
            alloc::format!("{scheme}://{host}{}", remove_dot_segments(path))
        }
        _ => String::from(url),
    }
}

fn remove_dot_segments(path: &str) -> String {
    let (path, query) = match path.find('?') {
        Some(i) => (&path[..i], &path[i..]),
        None => (path, ""),
    };
    let absolute = path.starts_with('/');
    let mut out: Vec<&str> = Vec::new();
    let segments: Vec<&str> = path.split('/').collect();
    let last = segments.len().saturating_sub(1);
    let mut trailing_dir = false;
    for (i, seg) in segments.iter().enumerate() {
        match *seg {
            "." => trailing_dir = i == last,
            ".." => {
                if out.len() > usize::from(absolute) {
                    out.pop();
                }
                trailing_dir = i == last;
            }
            "" if i != 0 && i != last => {}
            s => {
                out.push(s);
                trailing_dir = false;
            }
        }
    }
    let mut joined = out.join("/");
    if absolute && !joined.starts_with('/') {
        joined.insert(0, '/');
    }
    if trailing_dir && !joined.ends_with('/') {
        joined.push('/');
    }
    joined.push_str(query);
    joined
}
