//! Minimal well-formedness-checking XML scanner.
//!
//! Records every element with byte-exact spans for the element, its start
//! tag and each attribute value, so that rewrites can splice new text in
//! without touching anything around it. Namespaces are not resolved
//! (`android:name` is just a name) and DTDs are skipped.

use serde::{Deserialize, Serialize};

use super::IndexFailure;
use crate::project::SourceFile;
use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XmlAttribute {
    pub name: String,
    pub name_span: Span,
    /// Excludes the quotes.
    pub value_span: Span,
    pub value_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XmlElement {
    pub tag_name: String,
    pub full_span: Span,
    pub start_tag_span: Span,
    pub attributes: Vec<XmlAttribute>,
    pub parent_index: Option<usize>,
}

impl XmlElement {
    pub fn attribute(&self, name: &str) -> Option<&XmlAttribute> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XmlIndex {
    pub file_path: String,
    /// Document order (by start offset).
    pub elements: Vec<XmlElement>,
}

impl XmlIndex {
    pub fn children(&self, parent: usize) -> impl Iterator<Item = (usize, &XmlElement)> {
        self.elements
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.parent_index == Some(parent))
    }

    pub fn descendants(&self, ancestor: usize) -> impl Iterator<Item = (usize, &XmlElement)> {
        let span = self.elements[ancestor].full_span;
        self.elements
            .iter()
            .enumerate()
            .skip(ancestor + 1)
            .take_while(move |(_, e)| span.contains(e.full_span))
    }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == ':'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '.')
}

struct Scanner<'a> {
    file: &'a SourceFile,
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn fail(&self, offset: usize, msg: &str) -> IndexFailure {
        IndexFailure::new(self.file, offset, msg)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let n = self.rest().len() - self.rest().trim_start().len();
        self.pos += n;
    }

    fn skip_past(&mut self, terminator: &str, what: &str) -> Result<(), IndexFailure> {
        match self.rest().find(terminator) {
            Some(i) => {
                self.pos += i + terminator.len();
                Ok(())
            }
            None => Err(self.fail(self.pos, what)),
        }
    }

    fn name(&mut self) -> Result<(String, Span), IndexFailure> {
        let start = self.pos;
        let mut chars = self.rest().char_indices();
        match chars.next() {
            Some((_, c)) if is_name_start(c) => {}
            _ => return Err(self.fail(start, "expected a name")),
        }
        let len = self
            .rest()
            .char_indices()
            .find(|(_, c)| !is_name_char(*c))
            .map(|(i, _)| i)
            .unwrap_or(self.rest().len());
        self.pos += len;
        Ok((self.src[start..self.pos].to_string(), Span::new(start, self.pos)))
    }

    fn skip_doctype(&mut self) -> Result<(), IndexFailure> {
        let start = self.pos;
        let mut depth = 0i32;
        for (i, c) in self.rest().char_indices() {
            match c {
                '[' => depth += 1,
                ']' => depth -= 1,
                '>' if depth <= 0 => {
                    self.pos += i + 1;
                    return Ok(());
                }
                _ => {}
            }
        }
        Err(self.fail(start, "unterminated DOCTYPE"))
    }
}

/// Indexes a resource or manifest XML file, checking well-formedness.
pub fn index_xml(file: &SourceFile) -> Result<XmlIndex, IndexFailure> {
    let mut s = Scanner {
        file,
        src: file.content(),
        pos: 0,
    };
    let mut elements: Vec<XmlElement> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut root_done = false;

    while s.pos < s.src.len() {
        let Some(lt) = s.rest().find('<') else {
            let text = s.rest();
            if stack.is_empty() && !text.trim().is_empty() {
                return Err(s.fail(s.pos, "text outside the root element"));
            }
            s.pos = s.src.len();
            break;
        };
        let text = &s.rest()[..lt];
        if stack.is_empty() && !text.trim().is_empty() {
            return Err(s.fail(s.pos, "text outside the root element"));
        }
        s.pos += lt;
        let start = s.pos;
        let rest = s.rest();
        if rest.starts_with("<?") {
            s.skip_past("?>", "unterminated processing instruction")?;
        } else if rest.starts_with("<!--") {
            s.pos += 4;
            s.skip_past("-->", "unterminated comment")?;
        } else if rest.starts_with("<![CDATA[") {
            if stack.is_empty() {
                return Err(s.fail(start, "CDATA outside the root element"));
            }
            s.skip_past("]]>", "unterminated CDATA section")?;
        } else if rest.starts_with("<!DOCTYPE") {
            if root_done || !stack.is_empty() {
                return Err(s.fail(start, "misplaced DOCTYPE"));
            }
            s.skip_doctype()?;
        } else if rest.starts_with("</") {
            s.pos += 2;
            let (name, _) = s.name()?;
            s.skip_ws();
            if !s.rest().starts_with('>') {
                return Err(s.fail(s.pos, "expected '>' to close end tag"));
            }
            s.pos += 1;
            let Some(open) = stack.pop() else {
                return Err(s.fail(start, "end tag without a start tag"));
            };
            if elements[open].tag_name != name {
                return Err(s.fail(start, "mismatched end tag"));
            }
            elements[open].full_span.end = s.pos;
            if stack.is_empty() {
                root_done = true;
            }
        } else {
            if stack.is_empty() && root_done {
                return Err(s.fail(start, "more than one root element"));
            }
            s.pos += 1;
            let (tag_name, _) = s.name()?;
            let mut attributes: Vec<XmlAttribute> = Vec::new();
            let self_closing = loop {
                let before = s.pos;
                s.skip_ws();
                let rest = s.rest();
                if rest.starts_with("/>") {
                    s.pos += 2;
                    break true;
                }
                if rest.starts_with('>') {
                    s.pos += 1;
                    break false;
                }
                if rest.is_empty() {
                    return Err(s.fail(start, "unterminated start tag"));
                }
                if s.pos == before {
                    return Err(s.fail(s.pos, "expected whitespace before attribute"));
                }
                let (name, name_span) = s.name()?;
                s.skip_ws();
                if !s.rest().starts_with('=') {
                    return Err(s.fail(s.pos, "expected '=' after attribute name"));
                }
                s.pos += 1;
                s.skip_ws();
                let quote = match s.rest().chars().next() {
                    Some(q @ ('"' | '\'')) => q,
                    _ => return Err(s.fail(s.pos, "expected a quoted attribute value")),
                };
                s.pos += 1;
                let Some(close) = s.rest().find(quote) else {
                    return Err(s.fail(s.pos, "unterminated attribute value"));
                };
                let value_span = Span::new(s.pos, s.pos + close);
                let value_text = s.src[value_span.start..value_span.end].to_string();
                if value_text.contains('<') {
                    return Err(s.fail(value_span.start, "'<' in attribute value"));
                }
                s.pos = value_span.end + 1;
                if attributes.iter().any(|a| a.name == name) {
                    return Err(s.fail(name_span.start, "duplicate attribute"));
                }
                attributes.push(XmlAttribute {
                    name,
                    name_span,
                    value_span,
                    value_text,
                });
            };
            let idx = elements.len();
            elements.push(XmlElement {
                tag_name,
                full_span: Span::new(start, s.pos),
                start_tag_span: Span::new(start, s.pos),
                attributes,
                parent_index: stack.last().copied(),
            });
            if self_closing {
                if stack.is_empty() {
                    root_done = true;
                }
            } else {
                stack.push(idx);
            }
        }
    }
    if let Some(&open) = stack.last() {
        return Err(s.fail(elements[open].full_span.start, "unclosed element"));
    }
    if elements.is_empty() {
        return Err(s.fail(0, "no root element"));
    }
    Ok(XmlIndex {
        file_path: file.relative_path().to_string(),
        elements,
    })
}
