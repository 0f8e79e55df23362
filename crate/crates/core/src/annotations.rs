//! Per-page sidecar data: bounding boxes, fonts and image tags.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dom::{Document, NodeKind};

/// Screen rectangle in CSS pixels; `y` grows downward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BoundingBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, AnnotationError> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(AnnotationError::Format("bounding box coordinates must be finite".into()));
        }
        if x1 < x0 || y1 < y0 {
            return Err(AnnotationError::Format(alloc::format!("inverted bounding box ({x0}, {y0}, {x1}, {y1})")));
        }
        Ok(BoundingBox { x0, y0, x1, y1 })
    }

    pub fn contains(&self, inner: &BoundingBox) -> bool {
        self.x0 <= inner.x0 && self.y0 <= inner.y0 && self.x1 >= inner.x1 && self.y1 >= inner.y1
    }

    /// True when the intersection has positive area.
    pub fn overlaps(&self, other: &BoundingBox) -> bool {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        w > 0.0 && h > 0.0
    }

    pub(crate) fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox { x0: self.x0.min(other.x0), y0: self.y0.min(other.y0), x1: self.x1.max(other.x1), y1: self.y1.max(other.y1) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageTag {
    pub tag: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnnotationError {
    #[error("malformed annotation: {0}")]
    Format(String),
    #[error("cannot resolve node {index}: {reason}")]
    Resolve { index: u32, reason: String },
}

/// Sidecar address of a node: pre-order index plus an optional tag-name check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAddress {
    pub index: u32,
    pub tag: Option<String>,
}

impl NodeAddress {
    pub fn index(index: u32) -> Self {
        NodeAddress { index, tag: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Annotations {
    boxes: BTreeMap<u32, BoundingBox>,
    font_family: BTreeMap<u32, String>,
    font_style: BTreeMap<u32, String>,
    image_tags: BTreeMap<(String, u32), Vec<ImageTag>>,
}

impl Annotations {
    pub fn builder(doc: &Document) -> AnnotationsBuilder<'_> {
        AnnotationsBuilder { doc, ann: Annotations::default() }
    }

    pub fn bounding_box(&self, node: u32) -> Option<&BoundingBox> {
        self.boxes.get(&node)
    }

    pub fn boxes(&self) -> impl Iterator<Item = (u32, &BoundingBox)> {
        self.boxes.iter().map(|(&k, v)| (k, v))
    }

    pub fn font_family(&self, node: u32) -> Option<&str> {
        self.font_family.get(&node).map(String::as_str)
    }

    pub fn font_style(&self, node: u32) -> Option<&str> {
        self.font_style.get(&node).map(String::as_str)
    }

    pub fn image_tags(&self, model: &str, node: u32) -> &[ImageTag] {
        // BTreeMap lookups on tuple keys need an owned key
        self.image_tags.get(&(String::from(model), node)).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty() && self.font_family.is_empty() && self.font_style.is_empty() && self.image_tags.is_empty()
    }
}

pub struct AnnotationsBuilder<'a> {
    doc: &'a Document,
    ann: Annotations,
}

impl AnnotationsBuilder<'_> {
    fn resolve(&self, addr: &NodeAddress) -> Result<u32, AnnotationError> {
        let node = self.doc.get(addr.index).ok_or_else(|| AnnotationError::Resolve {
            index: addr.index,
            reason: alloc::format!("page has only {} nodes", self.doc.len()),
        })?;
        if let Some(tag) = &addr.tag {
            if !node.name.eq_ignore_ascii_case(tag) {
                return Err(AnnotationError::Resolve {
                    index: addr.index,
                    reason: alloc::format!("expected <{tag}>, found {:?} {:?}", node.kind, node.name),
                });
            }
        }
        Ok(addr.index)
    }

    pub fn add_box(&mut self, addr: &NodeAddress, bbox: BoundingBox) -> Result<(), AnnotationError> {
        let idx = self.resolve(addr)?;
        self.ann.boxes.insert(idx, bbox);
        Ok(())
    }

    pub fn add_font(&mut self, addr: &NodeAddress, family: &str, style: &str) -> Result<(), AnnotationError> {
        let idx = self.resolve(addr)?;
        self.ann.font_family.insert(idx, family.into());
        self.ann.font_style.insert(idx, style.into());
        Ok(())
    }

    pub fn add_image_tags<I>(&mut self, addr: &NodeAddress, model: &str, tags: I) -> Result<(), AnnotationError>
    where
        I: IntoIterator<Item = ImageTag>,
    {
        let idx = self.resolve(addr)?;
        let node = self.doc.node(idx);
        if node.kind != NodeKind::Element || !node.name.eq_ignore_ascii_case("img") {
            return Err(AnnotationError::Resolve { index: idx, reason: "image tags require an <img> element".into() });
        }
        let entry = self.ann.image_tags.entry((model.into(), idx)).or_default();
        for t in tags {
            if !(0.0..=1.0).contains(&t.confidence) {
                return Err(AnnotationError::Format(alloc::format!("confidence {} for tag {:?} is outside [0, 1]", t.confidence, t.tag)));
            }
            entry.push(t);
        }
        Ok(())
    }

    pub fn finish(self) -> Annotations {
        self.ann
    }
}
