//! Lazy page acquisition: manifest files first, then optionally HTTP.
//!
//! Each URL is loaded at most once per [`Fetcher`]. Failures are remembered
//! as well, so dead links are not retried. Concurrent requests for the same
//! URL wait for a single load.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use inferxpath_core::corpus::{FetchError, Lookup, Page, PageSource};
use inferxpath_core::eval::NodeSet;
use url::Url;

use crate::html::{parse_page, Syntax};
use crate::manifest::{Manifest, ManifestPage};
use crate::sidecar::load_annotations;

pub const USER_AGENT: &str = "inferxpath/0.1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum FetchMode {
    #[default]
    CorpusOnly,
    CorpusThenHttp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchPolicy {
    pub mode: FetchMode,
    /// Loads allowed beyond the seed pages.
    pub max_fetch: u32,
    /// Hosts HTTP may contact; `None` allows any.
    pub allow_hosts: Option<Vec<String>>,
    pub timeout_ms: u64,
    pub per_host_delay_ms: u64,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        FetchPolicy { mode: FetchMode::CorpusOnly, max_fetch: 100, allow_hosts: None, timeout_ms: 10_000, per_host_delay_ms: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FetchStatus {
    HitCorpus,
    Fetched,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchRecord {
    pub url: String,
    pub status: FetchStatus,
    /// Raw bytes of pages obtained over HTTP.
    pub bytes: Option<Vec<u8>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("page {url}: {message}")]
    Page { url: String, message: String },
}

type Slot = Arc<OnceLock<Result<Arc<Page>, FetchError>>>;

pub struct Fetcher {
    policy: FetchPolicy,
    files: BTreeMap<String, ManifestPage>,
    seeds: Vec<Arc<Page>>,
    cache: Mutex<HashMap<String, Slot>>,
    loads: AtomicU32,
    records: Mutex<Vec<FetchRecord>>,
    last_contact: Mutex<HashMap<String, Instant>>,
    client: OnceLock<Result<reqwest::blocking::Client, String>>,
}

/// Absolute URL without fragment, scheme and host lowercased, dot segments removed.
pub fn canonicalize(raw: &str) -> Option<String> {
    let mut u = Url::parse(raw.trim()).ok()?;
    u.set_fragment(None);
    Some(u.into())
}

fn read_page(entry: &ManifestPage) -> Result<Page, LoadError> {
    let bytes = std::fs::read(&entry.file).map_err(|source| LoadError::Io { path: entry.file.display().to_string(), source })?;
    let page_err = |message: String| LoadError::Page { url: entry.url.clone(), message };
    let doc = parse_page(&entry.url, &bytes, Syntax::for_path(&entry.file)).map_err(|e| page_err(e.to_string()))?;
    let annotations = match &entry.annotations {
        Some(path) => {
            let raw = std::fs::read(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
            load_annotations(&doc, &raw).map_err(|e| page_err(format!("{}: {e}", path.display())))?
        }
        None => Default::default(),
    };
    Ok(Page::with_annotations(doc, annotations))
}

impl Fetcher {
    /// Reads every seed page. Seeds do not count against the budget.
    pub fn open(manifest: &Manifest, policy: FetchPolicy) -> Result<Fetcher, LoadError> {
        let files: BTreeMap<String, ManifestPage> = manifest.pages.iter().map(|p| (p.url.clone(), p.clone())).collect();
        let mut cache = HashMap::new();
        let mut seeds = Vec::new();
        let mut records = Vec::new();
        for url in &manifest.seeds {
            let page = Arc::new(read_page(&files[url])?);
            let slot: Slot = Arc::new(OnceLock::new());
            let _ = slot.set(Ok(page.clone()));
            cache.insert(url.clone(), slot);
            records.push(FetchRecord { url: url.clone(), status: FetchStatus::HitCorpus, bytes: None });
            seeds.push(page);
        }
        Ok(Fetcher {
            policy,
            files,
            seeds,
            cache: Mutex::new(cache),
            loads: AtomicU32::new(0),
            records: Mutex::new(records),
            last_contact: Mutex::new(HashMap::new()),
            client: OnceLock::new(),
        })
    }

    pub fn policy(&self) -> &FetchPolicy {
        &self.policy
    }

    /// Loads performed after opening, successful or not.
    pub fn load_count(&self) -> u32 {
        self.loads.load(Ordering::SeqCst)
    }

    pub fn records(&self) -> Vec<FetchRecord> {
        self.records.lock().expect("records lock").clone()
    }

    pub fn seed_pages(&self) -> &[Arc<Page>] {
        &self.seeds
    }

    pub fn seed_roots(&self) -> NodeSet {
        self.seeds.iter().map(|p| p.document.root()).collect()
    }

    /// Fetches `url` unless it was fetched before; returns the cached outcome otherwise.
    pub fn get(&self, url: &str) -> Result<Arc<Page>, FetchError> {
        let url = canonicalize(url).ok_or_else(|| FetchError::Network(format!("not an absolute URL: {url}")))?;
        let slot = {
            let mut cache = self.cache.lock().expect("cache lock");
            match cache.get(&url) {
                Some(slot) => slot.clone(),
                None => {
                    if self.loads.load(Ordering::SeqCst) >= self.policy.max_fetch {
                        return Err(FetchError::BudgetExhausted);
                    }
                    self.loads.fetch_add(1, Ordering::SeqCst);
                    let slot: Slot = Arc::new(OnceLock::new());
                    cache.insert(url.clone(), slot.clone());
                    slot
                }
            }
        };
        slot.get_or_init(|| self.load(&url)).clone()
    }

    fn record(&self, url: &str, status: FetchStatus, bytes: Option<Vec<u8>>) {
        self.records.lock().expect("records lock").push(FetchRecord { url: url.into(), status, bytes });
    }

    fn load(&self, url: &str) -> Result<Arc<Page>, FetchError> {
        let result = self.load_uncached(url);
        match &result {
            Ok(_) => {}
            Err(e) => self.record(url, FetchStatus::Failed(e.to_string()), None),
        }
        result
    }

    fn load_uncached(&self, url: &str) -> Result<Arc<Page>, FetchError> {
        if let Some(entry) = self.files.get(url) {
            let page = read_page(entry).map_err(|e| FetchError::Network(e.to_string()))?;
            self.record(url, FetchStatus::HitCorpus, None);
            return Ok(Arc::new(page));
        }
        if self.policy.mode == FetchMode::CorpusOnly {
            return Err(FetchError::Network("corpus-only miss".into()));
        }
        let parsed = Url::parse(url).map_err(|e| FetchError::Network(e.to_string()))?;
        if !matches!(parsed.scheme(), "http" | "https") {
            return Err(FetchError::Network(format!("unsupported scheme {}", parsed.scheme())));
        }
        let host = parsed.host_str().unwrap_or_default().to_owned();
        if let Some(allowed) = &self.policy.allow_hosts {
            if !allowed.iter().any(|h| h.eq_ignore_ascii_case(&host)) {
                return Err(FetchError::HostDenied(host));
            }
        }
        self.wait_for_host(&host);
        let client = self
            .client
            .get_or_init(|| {
                reqwest::blocking::Client::builder()
                    .user_agent(USER_AGENT)
                    .timeout(Duration::from_millis(self.policy.timeout_ms.max(1)))
                    .build()
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| FetchError::Network(e.clone()))?;
        let response = client.get(url).send().and_then(|r| r.error_for_status()).map_err(|e| FetchError::Network(e.to_string()))?;
        let bytes = response.bytes().map_err(|e| FetchError::Network(e.to_string()))?.to_vec();
        let doc = parse_page(url, &bytes, Syntax::Html).map_err(|e| FetchError::Network(e.to_string()))?;
        self.record(url, FetchStatus::Fetched, Some(bytes));
        Ok(Arc::new(Page::new(doc)))
    }

    fn wait_for_host(&self, host: &str) {
        if self.policy.per_host_delay_ms == 0 {
            return;
        }
        let delay = Duration::from_millis(self.policy.per_host_delay_ms);
        let mut last = self.last_contact.lock().expect("host lock");
        if let Some(t) = last.get(host) {
            let elapsed = t.elapsed();
            if elapsed < delay {
                std::thread::sleep(delay - elapsed);
            }
        }
        last.insert(host.to_owned(), Instant::now());
    }
}

impl PageSource for Fetcher {
    fn resident(&self, url: &str) -> Lookup {
        let cache = self.cache.lock().expect("cache lock");
        match cache.get(url).and_then(|slot| slot.get()) {
            Some(Ok(page)) => Lookup::Resident(page.clone()),
            Some(Err(_)) => Lookup::Failed,
            None => Lookup::Absent,
        }
    }

    fn resolve(&self, base: &str, reference: &str) -> Option<String> {
        let reference = reference.trim();
        if reference.is_empty() || reference.chars().any(char::is_whitespace) {
            return None;
        }
        let joined = Url::parse(base).ok()?.join(reference).ok()?;
        if !matches!(joined.scheme(), "http" | "https" | "file") {
            return None;
        }
        canonicalize(joined.as_str())
    }

    fn fetch(&self, url: &str) -> Result<Arc<Page>, FetchError> {
        self.get(url)
    }
}
