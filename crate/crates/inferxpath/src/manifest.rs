//! Corpus manifest: which files hold which page URLs, and which pages seed a run.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::fetcher::canonicalize;

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed manifest {path}: {message}")]
    Format { path: PathBuf, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    pages: Vec<RawPage>,
    seeds: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPage {
    url: String,
    file: PathBuf,
    annotations: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestPage {
    /// Canonical URL.
    pub url: String,
    pub file: PathBuf,
    /// Explicit sidecar, or `<stem>.ann.json` next to the page when that exists.
    pub annotations: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub pages: Vec<ManifestPage>,
    /// Canonical seed URLs; every page when the manifest lists none.
    pub seeds: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let bytes = std::fs::read(path).map_err(|source| ManifestError::Io { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Manifest::from_json(&bytes, base).map_err(|message| ManifestError::Format { path: path.into(), message })
    }

    /// Relative file paths are taken relative to `base`.
    pub fn from_json(bytes: &[u8], base: &Path) -> Result<Manifest, String> {
        let raw: RawManifest = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        let mut pages = Vec::with_capacity(raw.pages.len());
        for p in raw.pages {
            let url = canonicalize(&p.url).ok_or_else(|| format!("page url {:?} is not a URL", p.url))?;
            if pages.iter().any(|q: &ManifestPage| q.url == url) {
                return Err(format!("page {url} is listed twice"));
            }
            let file = base.join(&p.file);
            let annotations = match p.annotations {
                Some(a) => Some(base.join(a)),
                None => {
                    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let guess = file.with_file_name(format!("{stem}.ann.json"));
                    guess.is_file().then_some(guess)
                }
            };
            pages.push(ManifestPage { url, file, annotations });
        }
        let seeds = match raw.seeds {
            None => pages.iter().map(|p| p.url.clone()).collect(),
            Some(list) => {
                let mut out = Vec::with_capacity(list.len());
                for s in list {
                    let url = canonicalize(&s).ok_or_else(|| format!("seed {s:?} is not a URL"))?;
                    if !pages.iter().any(|p| p.url == url) {
                        return Err(format!("seed {url} is not among the pages"));
                    }
                    if !out.contains(&url) {
                        out.push(url);
                    }
                }
                out
            }
        };
        Ok(Manifest { pages, seeds })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_and_default_seeds() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.ann.json"), "{}").unwrap();
        let m = Manifest::from_json(
            br#"{"pages":[{"url":"HTTP://Example.test/x/../a.html#top","file":"a.html"},{"url":"http://example.test/b.html","file":"sub/b.html"}]}"#,
            dir.path(),
        )
        .unwrap();
        assert_eq!(m.pages[0].url, "http://example.test/a.html");
        assert_eq!(m.pages[0].annotations.as_deref(), Some(dir.path().join("a.ann.json").as_path()));
        assert_eq!(m.pages[1].file, dir.path().join("sub/b.html"));
        assert_eq!(m.pages[1].annotations, None);
        assert_eq!(m.seeds.len(), 2);
    }

    #[test]
    fn unknown_seed_is_rejected() {
        let err = Manifest::from_json(br#"{"pages":[],"seeds":["http://x/a"]}"#, Path::new(".")).unwrap_err();
        assert!(err.contains("not among the pages"));
    }
}
