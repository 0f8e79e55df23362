//! Recognizer registry files: `[{"name", "pattern", "wholeMatch"}]`.

use std::path::Path;

use inferxpath_core::semantic::{Recognizer, Registry, SemanticError};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot read registry {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("registry format: {0}")]
    Format(#[from] serde_json::Error),
    #[error(transparent)]
    Pattern(#[from] SemanticError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Entry {
    name: String,
    pattern: String,
    #[serde(default)]
    whole_match: bool,
}

/// Built-ins, then the file's entries. A file entry replaces a built-in of the same name.
pub fn load_registry(path: Option<&Path>) -> Result<Registry, RegistryError> {
    let mut registry = Registry::builtin();
    if let Some(path) = path {
        let bytes = std::fs::read(path).map_err(|source| RegistryError::Io { path: path.display().to_string(), source })?;
        extend_registry(&mut registry, &bytes)?;
    }
    Ok(registry)
}

pub fn extend_registry(registry: &mut Registry, bytes: &[u8]) -> Result<(), RegistryError> {
    let entries: Vec<Entry> = serde_json::from_slice(bytes)?;
    let mut seen = std::collections::BTreeSet::new();
    for e in entries {
        if !seen.insert(e.name.clone()) {
            return Err(RegistryError::Pattern(SemanticError::Pattern { name: e.name, message: "name appears twice in the file".into() }));
        }
        registry.insert(Recognizer::new(&e.name, &e.pattern, e.whole_match)?);
    }
    Ok(())
}
