//! Annotation sidecar files (`<page>.ann.json`).

use inferxpath_core::annotations::{AnnotationError, Annotations, BoundingBox, ImageTag, NodeAddress};
use inferxpath_core::dom::Document;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    #[serde(default)]
    boxes: Vec<BoxEntry>,
    #[serde(default)]
    fonts: Vec<FontEntry>,
    #[serde(default, rename = "imageTags")]
    image_tags: Vec<ImageEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxEntry {
    node: u32,
    tag: Option<String>,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FontEntry {
    node: u32,
    tag: Option<String>,
    family: String,
    style: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImageEntry {
    node: u32,
    tag: Option<String>,
    model: String,
    tags: Vec<TagEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TagEntry {
    tag: String,
    confidence: f64,
}

fn addr(node: u32, tag: Option<String>) -> NodeAddress {
    NodeAddress { index: node, tag }
}

/// Resolves every entry against `doc`; the first bad entry is an error.
pub fn load_annotations(doc: &Document, bytes: &[u8]) -> Result<Annotations, AnnotationError> {
    let sidecar: Sidecar = serde_json::from_slice(bytes).map_err(|e| AnnotationError::Format(e.to_string()))?;
    let mut b = Annotations::builder(doc);
    for e in sidecar.boxes {
        let bbox = BoundingBox::new(e.x0, e.y0, e.x1, e.y1)?;
        b.add_box(&addr(e.node, e.tag), bbox)?;
    }
    for e in sidecar.fonts {
        b.add_font(&addr(e.node, e.tag), &e.family, &e.style)?;
    }
    for e in sidecar.image_tags {
        let tags = e.tags.into_iter().map(|t| ImageTag { tag: t.tag, confidence: t.confidence });
        b.add_image_tags(&addr(e.node, e.tag), &e.model, tags)?;
    }
    Ok(b.finish())
}
