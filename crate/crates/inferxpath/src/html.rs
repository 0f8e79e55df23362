//! Page bytes to [`Document`]: HTML5 tree construction for `.html`, the
//! strict reader for `.xhtml`/`.xml`.

use std::path::Path;

use encoding_rs::Encoding;
use html5ever::tendril::TendrilSink;
use html5ever::{parse_document, ParseOpts};
use inferxpath_core::dom::{BuildError, Document, DocumentBuilder};
use inferxpath_core::markup::{parse_markup, MarkupError};
use markup5ever_rcdom::{Handle, NodeData, RcDom};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("cannot decode page bytes: {0}")]
    Charset(String),
    #[error(transparent)]
    Markup(#[from] MarkupError),
    #[error("tree construction failed: {0}")]
    Build(#[from] BuildError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Syntax {
    Html,
    /// Well-formed markup read as written.
    Strict,
}

impl Syntax {
    pub fn for_path(path: &Path) -> Syntax {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("xhtml" | "xml") => Syntax::Strict,
            _ => Syntax::Html,
        }
    }
}

pub fn parse_page(url: &str, bytes: &[u8], syntax: Syntax) -> Result<Document, ParseError> {
    let text = decode(bytes)?;
    match syntax {
        Syntax::Html => parse_html(url, &text),
        Syntax::Strict => Ok(parse_markup(url, &text)?),
    }
}

/// BOM, then UTF-8, then the charset a `<meta>` tag declares.
pub fn decode(bytes: &[u8]) -> Result<String, ParseError> {
    if let Some((enc, bom)) = Encoding::for_bom(bytes) {
        let (text, had_errors) = enc.decode_without_bom_handling(&bytes[bom..]);
        if had_errors {
            return Err(ParseError::Charset(format!("invalid {} after byte-order mark", enc.name())));
        }
        return Ok(text.into_owned());
    }
    if let Ok(s) = std::str::from_utf8(bytes) {
        return Ok(s.to_owned());
    }
    let label = declared_charset(bytes).ok_or_else(|| ParseError::Charset("not UTF-8 and no charset declared".into()))?;
    let enc = Encoding::for_label(label.as_bytes()).ok_or_else(|| ParseError::Charset(format!("unknown charset {label:?}")))?;
    let (text, had_errors) = enc.decode_without_bom_handling(bytes);
    if had_errors {
        return Err(ParseError::Charset(format!("bytes are not valid {}", enc.name())));
    }
    Ok(text.into_owned())
}

fn declared_charset(bytes: &[u8]) -> Option<String> {
    let head = &bytes[..bytes.len().min(4096)];
    let lower: Vec<u8> = head.iter().map(u8::to_ascii_lowercase).collect();
    let at = lower.windows(8).position(|w| w == b"charset=")? + 8;
    let rest = &lower[at..];
    let rest = rest.strip_prefix(b"\"").or_else(|| rest.strip_prefix(b"'")).unwrap_or(rest);
    let end = rest.iter().position(|&b| !(b.is_ascii_alphanumeric() || b == b'-' || b == b'_')).unwrap_or(rest.len());
    (end > 0).then(|| String::from_utf8_lossy(&rest[..end]).into_owned())
}

pub fn parse_html(url: &str, text: &str) -> Result<Document, ParseError> {
    let dom = parse_document(RcDom::default(), ParseOpts::default()).one(text);
    let mut b = DocumentBuilder::new(url);
    for child in dom.document.children.borrow().iter() {
        walk(child, &mut b)?;
    }
    Ok(b.finish()?)
}

fn walk(node: &Handle, b: &mut DocumentBuilder) -> Result<(), ParseError> {
    match &node.data {
        NodeData::Element { name, attrs, .. } => {
            let attrs = attrs.borrow();
            let pairs: Vec<(&str, &str)> = attrs.iter().map(|a| (&*a.name.local, &*a.value)).collect();
            b.open_element(&name.local, pairs);
            for c in node.children.borrow().iter() {
                walk(c, b)?;
            }
            b.close_element()?;
        }
        NodeData::Text { contents } => {
            b.text(&contents.borrow());
        }
        NodeData::Comment { contents } => {
            b.comment(contents);
        }
        _ => {}
    }
    Ok(())
}
