//! Immutable document model.
//!
//! Nodes are stored in a flat arena in pre-order. An element's attribute
//! nodes are numbered directly after the element and before its children, so
//! comparing arena indices is the same as comparing document order.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Range;

/// URL of a page, shared by every [`NodeId`] on that page.
#[derive(Clone)]
pub struct PageUrl(Arc<str>);

impl PageUrl {
    pub fn new(url: &str) -> Self {
        PageUrl(Arc::from(url))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for PageUrl {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for PageUrl {}

impl PartialOrd for PageUrl {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PageUrl {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl core::hash::Hash for PageUrl {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl core::borrow::Borrow<str> for PageUrl {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for PageUrl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for PageUrl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A node address: page plus pre-order index (0 is the root element).
///
/// The derived order sorts by page URL first, then by document order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub page: PageUrl,
    pub index: u32,
}

impl NodeId {
    pub fn new(page: PageUrl, index: u32) -> Self {
        NodeId { page, index }
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.page, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Element,
    Text,
    Attribute,
    Comment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Tag or attribute name; empty for text and comments.
    pub name: String,
    /// Text, comment or attribute value; empty for elements.
    pub value: String,
    pub parent: Option<u32>,
    pub children: Vec<u32>,
    pub attributes: Vec<u32>,
}

impl Node {
    pub fn is_element(&self) -> bool {
        self.kind == NodeKind::Element
    }

    pub fn is_element_named(&self, name: &str) -> bool {
        self.kind == NodeKind::Element && self.name.eq_ignore_ascii_case(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot order nodes of different pages ({left} vs {right})")]
pub struct CrossPageError {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("document has no root element")]
    NoRoot,
    #[error("document has more than one root element")]
    MultipleRoots,
    #[error("close_element called with no open element")]
    Unbalanced,
    #[error("document exceeds the node limit")]
    TooLarge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    url: PageUrl,
    nodes: Vec<Node>,
    subtree_end: Vec<u32>,
}

impl Document {
    pub fn url(&self) -> &PageUrl {
        &self.url
    }

    pub fn root(&self) -> NodeId {
        self.id(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id(&self, index: u32) -> NodeId {
        NodeId::new(self.url.clone(), index)
    }

    pub fn node(&self, index: u32) -> &Node {
        &self.nodes[index as usize]
    }

    pub fn get(&self, index: u32) -> Option<&Node> {
        self.nodes.get(index as usize)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (u32, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (i as u32, n))
    }

    /// Indices strictly inside the subtree of `index`, attributes included.
    pub fn descendant_range(&self, index: u32) -> Range<u32> {
        index + 1..self.subtree_end[index as usize]
    }

    pub fn is_ancestor_or_self(&self, ancestor: u32, node: u32) -> bool {
        ancestor <= node && node < self.subtree_end[ancestor as usize]
    }

    pub fn ancestors(&self, index: u32) -> Ancestors<'_> {
        Ancestors { doc: self, next: self.node(index).parent }
    }

    /// Children visible to axes (comments skipped).
    pub fn visible_children(&self, index: u32) -> impl Iterator<Item = u32> + '_ {
        self.node(index).children.iter().copied().filter(move |&c| self.node(c).kind != NodeKind::Comment)
    }

    pub fn attribute(&self, element: u32, name: &str) -> Option<&str> {
        self.node(element).attributes.iter().map(|&a| self.node(a)).find(|a| a.name.eq_ignore_ascii_case(name)).map(|a| a.value.as_str())
    }

    /// Whitespace-normalized concatenation of the text beneath a node.
    ///
    /// Attributes yield their raw value; comments their own text.
    pub fn text_content(&self, index: u32) -> String {
        let node = self.node(index);
        match node.kind {
            NodeKind::Attribute => node.value.clone(),
            NodeKind::Text | NodeKind::Comment => normalize_whitespace(&node.value),
            NodeKind::Element => {
                let mut raw = String::new();
                for i in self.descendant_range(index) {
                    let n = self.node(i);
                    if n.kind == NodeKind::Text {
                        raw.push_str(&n.value);
                    }
                }
                normalize_whitespace(&raw)
            }
        }
    }

    /// Tag path from the root element, e.g. `html/body/table/tr/td`.
    pub fn tag_path(&self, index: u32) -> String {
        let mut names: Vec<&str> = self.ancestors(index).map(|a| self.node(a).name.as_str()).collect();
        names.reverse();
        let node = self.node(index);
        let own = match node.kind {
            NodeKind::Element => node.name.clone(),
            NodeKind::Attribute => alloc::format!("@{}", node.name),
            NodeKind::Text => String::from("text()"),
            NodeKind::Comment => String::from("comment()"),
        };
        let mut out = String::new();
        for n in names {
            out.push_str(n);
            out.push('/');
        }
        out.push_str(&own);
        out
    }

    pub fn compare(&self, a: &NodeId, b: &NodeId) -> Result<Ordering, CrossPageError> {
        document_order_compare(a, b)
    }
}

/// Document-order comparison of two nodes on the same page.
pub fn document_order_compare(a: &NodeId, b: &NodeId) -> Result<Ordering, CrossPageError> {
    if a.page != b.page {
        return Err(CrossPageError { left: a.page.as_str().into(), right: b.page.as_str().into() });
    }
    Ok(a.index.cmp(&b.index))
}

pub struct Ancestors<'a> {
    doc: &'a Document,
    next: Option<u32>,
}

impl Iterator for Ancestors<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let cur = self.next?;
        self.next = self.doc.node(cur).parent;
        Some(cur)
    }
}

/// Collapse whitespace runs to one space and trim both ends.
pub fn normalize_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Incremental pre-order construction of a [`Document`].
///
/// Text and comments outside the root element are dropped. A second
/// top-level element makes [`DocumentBuilder::finish`] fail.
pub struct DocumentBuilder {
    url: PageUrl,
    nodes: Vec<Node>,
    open: Vec<u32>,
    roots: usize,
}

impl DocumentBuilder {
    pub fn new(url: &str) -> Self {
        DocumentBuilder { url: PageUrl::new(url), nodes: Vec::new(), open: Vec::new(), roots: 0 }
    }

    fn push(&mut self, node: Node) -> u32 {
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        idx
    }

    pub fn open_element<'a, I>(&mut self, name: &str, attributes: I) -> u32
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let parent = self.open.last().copied();
        if parent.is_none() {
            self.roots += 1;
        }
        let idx = self.push(Node {
            kind: NodeKind::Element,
            name: name.into(),
            value: String::new(),
            parent,
            children: Vec::new(),
            attributes: Vec::new(),
        });
        if let Some(p) = parent {
            self.nodes[p as usize].children.push(idx);
        }
        for (k, v) in attributes {
            if self.nodes[idx as usize].attributes.iter().any(|&a| self.nodes[a as usize].name == k) {
                continue;
            }
            let a = self.push(Node {
                kind: NodeKind::Attribute,
                name: k.into(),
                value: v.into(),
                parent: Some(idx),
                children: Vec::new(),
                attributes: Vec::new(),
            });
            self.nodes[idx as usize].attributes.push(a);
        }
        self.open.push(idx);
        idx
    }

    pub fn close_element(&mut self) -> Result<(), BuildError> {
        self.open.pop().map(|_| ()).ok_or(BuildError::Unbalanced)
    }

    fn leaf(&mut self, kind: NodeKind, value: &str) -> Option<u32> {
        let parent = *self.open.last()?;
        // adjacent text merges, mirroring HTML tree construction
        if kind == NodeKind::Text {
            if let Some(&last) = self.nodes[parent as usize].children.last() {
                if last as usize == self.nodes.len() - 1 && self.nodes[last as usize].kind == NodeKind::Text {
                    self.nodes[last as usize].value.push_str(value);
                    return Some(last);
                }
            }
        }
        let idx = self.push(Node {
            kind,
            name: String::new(),
            value: value.into(),
            parent: Some(parent),
            children: Vec::new(),
            attributes: Vec::new(),
        });
        self.nodes[parent as usize].children.push(idx);
        Some(idx)
    }

    pub fn text(&mut self, value: &str) -> Option<u32> {
        if value.is_empty() {
            return None;
        }
        self.leaf(NodeKind::Text, value)
    }

    pub fn comment(&mut self, value: &str) -> Option<u32> {
        self.leaf(NodeKind::Comment, value)
    }

    /// Closes any elements still open and freezes the tree.
    pub fn finish(mut self) -> Result<Document, BuildError> {
        self.open.clear();
        match self.roots {
            0 => return Err(BuildError::NoRoot),
            1 => {}
            _ => return Err(BuildError::MultipleRoots),
        }
        if self.nodes.len() >= u32::MAX as usize {
            return Err(BuildError::TooLarge);
        }
        let mut subtree_end = alloc::vec![0u32; self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            let node = &self.nodes[i];
            let last_child = node.children.last().map(|&c| subtree_end[c as usize]);
            let last_attr = node.attributes.last().map(|&a| a + 1);
            subtree_end[i] = last_child.or(last_attr).unwrap_or(i as u32 + 1);
        }
        Ok(Document { url: self.url, nodes: self.nodes, subtree_end })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut b = DocumentBuilder::new("p1");
        b.open_element("html", []);
        b.open_element("body", [("class", "x"), ("id", "b")]);
        b.open_element("h1", []);
        b.text("  Hello\n ");
        b.close_element().unwrap();
        b.comment("note");
        b.open_element("p", []);
        b.text("a");
        b.open_element("b", []);
        b.text("  b ");
        b.close_element().unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn preorder_indices_put_attributes_before_children() {
        let d = sample();
        let names: Vec<_> = d.nodes().map(|(_, n)| (n.kind, n.name.clone())).collect();
        assert_eq!(names[0], (NodeKind::Element, "html".into()));
        assert_eq!(names[1], (NodeKind::Element, "body".into()));
        assert_eq!(names[2], (NodeKind::Attribute, "class".into()));
        assert_eq!(names[3], (NodeKind::Attribute, "id".into()));
        assert_eq!(names[4], (NodeKind::Element, "h1".into()));
        assert_eq!(d.descendant_range(1), 2..d.len() as u32);
    }

    #[test]
    fn text_content_is_normalized() {
        let d = sample();
        assert_eq!(d.text_content(4), "Hello");
        let p = d.nodes().find(|(_, n)| n.name == "p").unwrap().0;
        assert_eq!(d.text_content(p), "a b");
        assert_eq!(d.text_content(1), "Hello a b");
    }

    #[test]
    fn comments_are_hidden_from_visible_children() {
        let d = sample();
        assert_eq!(d.node(1).children.len(), 3);
        assert_eq!(d.visible_children(1).count(), 2);
    }

    #[test]
    fn cross_page_compare_is_an_error() {
        let a = NodeId::new(PageUrl::new("a"), 0);
        let b = NodeId::new(PageUrl::new("b"), 0);
        assert!(document_order_compare(&a, &b).is_err());
        assert_eq!(document_order_compare(&a, &a.clone()), Ok(Ordering::Equal));
    }

    #[test]
    fn element_precedes_its_attribute() {
        let d = sample();
        assert_eq!(d.compare(&d.id(1), &d.id(2)), Ok(Ordering::Less));
    }

    #[test]
    fn builder_rejects_empty_and_double_roots() {
        assert_eq!(DocumentBuilder::new("x").finish().unwrap_err(), BuildError::NoRoot);
        let mut b = DocumentBuilder::new("x");
        b.open_element("a", []);
        b.close_element().unwrap();
        b.open_element("b", []);
        assert_eq!(b.finish().unwrap_err(), BuildError::MultipleRoots);
    }

    #[test]
    fn tag_path_lists_ancestors() {
        let d = sample();
        assert_eq!(d.tag_path(4), "html/body/h1");
        assert_eq!(d.tag_path(2), "html/body/@class");
    }
}
