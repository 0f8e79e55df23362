//! Well-formed markup reader.
//!
//! Builds the tree exactly as written: no implied `tbody`/`tr`, no
//! foster-parenting. HTML void elements (`br`, `img`, ...) may omit their
//! closing tag. Use this for XHTML-style pages and hand-written fixtures;
//! real-world HTML goes through an HTML5 tree builder instead.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dom::{Document, DocumentBuilder};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("markup error at byte {offset}: {message}")]
pub struct MarkupError {
    pub offset: usize,
    pub message: String,
}

const VOID: &[&str] = &["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr"];

fn err(offset: usize, message: &str) -> MarkupError {
    MarkupError { offset, message: message.into() }
}

pub fn parse_markup(url: &str, src: &str) -> Result<Document, MarkupError> {
    let bytes = src.as_bytes();
    let mut b = DocumentBuilder::new(url);
    let mut stack: Vec<String> = Vec::new();
    let mut pos = 0;
    let mut seen_root = false;
    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            let end = src[pos..].find('<').map_or(bytes.len(), |i| pos + i);
            let text = decode_entities(&src[pos..end], pos)?;
            if !stack.is_empty() {
                b.text(&text);
            } else if !text.trim().is_empty() {
                return Err(err(pos, "text outside the root element"));
            }
            pos = end;
            continue;
        }
        let rest = &src[pos..];
        if let Some(body) = rest.strip_prefix("<!--") {
            let end = body.find("-->").ok_or_else(|| err(pos, "unterminated comment"))?;
            if !stack.is_empty() {
                b.comment(&body[..end]);
            }
            pos += 4 + end + 3;
        } else if rest.starts_with("<!") || rest.starts_with("<?") {
            let end = rest.find('>').ok_or_else(|| err(pos, "unterminated declaration"))?;
            pos += end + 1;
        } else if let Some(body) = rest.strip_prefix("</") {
            let end = body.find('>').ok_or_else(|| err(pos, "unterminated end tag"))?;
            let name = body[..end].trim();
            match stack.pop() {
                Some(open) if open.eq_ignore_ascii_case(name) => {
                    b.close_element().map_err(|_| err(pos, "unbalanced end tag"))?;
                }
                Some(open) => {
                    return Err(MarkupError { offset: pos, message: alloc::format!("end tag </{name}> does not match <{open}>") })
                }
                None => return Err(err(pos, "end tag without open element")),
            }
            pos += 2 + end + 1;
        } else {
            let (tag, consumed) = read_start_tag(src, pos)?;
            if stack.is_empty() {
                if seen_root {
                    return Err(err(pos, "second root element"));
                }
                seen_root = true;
            }
            b.open_element(&tag.name, tag.attributes.iter().map(|(k, v)| (k.as_str(), v.as_str())));
            let void = VOID.iter().any(|v| v.eq_ignore_ascii_case(&tag.name));
            if tag.self_closing || void {
                b.close_element().map_err(|_| err(pos, "unbalanced tag"))?;
            } else {
                stack.push(tag.name);
            }
            pos += consumed;
        }
    }
    if let Some(open) = stack.last() {
        return Err(MarkupError { offset: bytes.len(), message: alloc::format!("unclosed element <{open}>") });
    }
    b.finish().map_err(|e| MarkupError { offset: 0, message: alloc::format!("{e}") })
}

struct StartTag {
    name: String,
    attributes: Vec<(String, String)>,
    self_closing: bool,
}

fn is_name_byte(c: u8) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, b'-' | b'_' | b':' | b'.')
}

fn read_start_tag(src: &str, start: usize) -> Result<(StartTag, usize), MarkupError> {
    let bytes = src.as_bytes();
    let mut pos = start + 1;
    let name_start = pos;
    while pos < bytes.len() && is_name_byte(bytes[pos]) {
        pos += 1;
    }
    if pos == name_start {
        return Err(err(start, "expected a tag name"));
    }
    let name = String::from(&src[name_start..pos]);
    let mut attributes = Vec::new();
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        match bytes.get(pos) {
            None => return Err(err(start, "unterminated start tag")),
            Some(b'>') => {
                return Ok((StartTag { name, attributes, self_closing: false }, pos + 1 - start));
            }
            Some(b'/') if bytes.get(pos + 1) == Some(&b'>') => {
                return Ok((StartTag { name, attributes, self_closing: true }, pos + 2 - start));
            }
            Some(_) => {}
        }
        let attr_start = pos;
        while pos < bytes.len() && is_name_byte(bytes[pos]) {
            pos += 1;
        }
        if pos == attr_start {
            return Err(err(pos, "expected an attribute name"));
        }
        let key = String::from(&src[attr_start..pos]);
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if bytes.get(pos) != Some(&b'=') {
            attributes.push((key, String::new()));
            continue;
        }
        pos += 1;
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let value = match bytes.get(pos) {
            Some(&q @ (b'"' | b'\'')) => {
                let body = &src[pos + 1..];
                let end = body.find(q as char).ok_or_else(|| err(pos, "unterminated attribute value"))?;
                let raw = &body[..end];
                let v = decode_entities(raw, pos + 1)?;
                pos += 1 + end + 1;
                v
            }
            Some(_) => {
                let vstart = pos;
                while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'>' {
                    pos += 1;
                }
                decode_entities(&src[vstart..pos], vstart)?
            }
            None => return Err(err(pos, "unterminated start tag")),
        };
        attributes.push((key, value));
    }
}

fn decode_entities(raw: &str, offset: usize) -> Result<String, MarkupError> {
    if !raw.contains('&') {
        return Ok(raw.into());
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let Some(semi) = after.find(';').filter(|&s| s <= 10) else {
            out.push('&');
            rest = after;
            continue;
        };
        let entity = &after[..semi];
        let decoded = match entity {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some('\u{a0}'),
            _ => {
                let code = if let Some(hex) = entity.strip_prefix("#x").or_else(|| entity.strip_prefix("#X")) {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = entity.strip_prefix('#') {
                    dec.parse::<u32>().ok()
                } else {
                    None
                };
                match code {
                    Some(c) => Some(char::from_u32(c).ok_or_else(|| err(offset, "invalid character reference"))?),
                    None => None,
                }
            }
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &after[semi + 1..];
            }
            None => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}
