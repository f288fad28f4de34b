//! Text-based detection over XML indexes: attribute and element predicates.

use regex::Regex;

use crate::parsing::XmlIndex;
use crate::span::Span;

#[derive(Debug, Clone)]
pub enum NameMatch {
    Any,
    Exact(String),
    Suffix(String),
}

impl NameMatch {
    pub fn matches(&self, name: &str) -> bool {
        match self {
            NameMatch::Any => true,
            NameMatch::Exact(n) => name == n,
            NameMatch::Suffix(s) => name.ends_with(s.as_str()),
        }
    }
}

/// Predicate over the elements and attributes of an XML file.
#[derive(Debug, Clone)]
pub enum XmlPattern {
    /// Every element with this tag; the match span is the whole element.
    Element { tag: String },
    /// Every attribute whose name (and optionally value) matches, on
    /// elements with one of `tags` (any element when empty); the match span
    /// is the attribute value.
    Attribute {
        name: NameMatch,
        value: Option<Regex>,
        tags: Vec<String>,
    },
}

impl XmlPattern {
    pub fn element(tag: &str) -> Self {
        XmlPattern::Element { tag: tag.to_string() }
    }

    pub fn attribute(name: NameMatch, value: Option<&str>, tags: &[&str]) -> Self {
        XmlPattern::Attribute {
            name,
            value: value.map(|v| Regex::new(v).expect("valid attribute value pattern")),
            tags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }
}

/// One element or attribute satisfying a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XmlMatch {
    pub element: usize,
    pub attribute: Option<usize>,
    pub span: Span,
}

/// Returns every element or attribute of `index` that satisfies `pattern`,
/// in document order.
pub fn match_text_pattern(index: &XmlIndex, pattern: &XmlPattern) -> Vec<XmlMatch> {
    let mut out = Vec::new();
    for (ei, element) in index.elements.iter().enumerate() {
        match pattern {
            XmlPattern::Element { tag } => {
                if &element.tag_name == tag {
                    out.push(XmlMatch {
                        element: ei,
                        attribute: None,
                        span: element.full_span,
                    });
                }
            }
            XmlPattern::Attribute { name, value, tags } => {
                if !tags.is_empty() && !tags.contains(&element.tag_name) {
                    continue;
                }
                for (ai, attr) in element.attributes.iter().enumerate() {
                    if name.matches(&attr.name) && value.as_ref().is_none_or(|re| re.is_match(&attr.value_text)) {
                        out.push(XmlMatch {
                            element: ei,
                            attribute: Some(ai),
                            span: attr.value_span,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Extension point for operators that target XML: supply a pattern, or
/// override `detect` for matching that a single pattern cannot express.
pub trait TextBasedDetector {
    fn pattern(&self) -> &XmlPattern;

    fn detect(&self, index: &XmlIndex) -> Vec<XmlMatch> {
        match_text_pattern(index, self.pattern())
    }
}

impl TextBasedDetector for XmlPattern {
    fn pattern(&self) -> &XmlPattern {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsing::index_xml;
    use crate::project::{FileKind, SourceFile};

    fn xml(src: &str) -> XmlIndex {
        index_xml(&SourceFile::new("res/a.xml", FileKind::ResourceXml, src)).unwrap()
    }

    #[test]
    fn empty_index_has_no_matches() {
        let index = XmlIndex {
            file_path: "x.xml".into(),
            elements: vec![],
        };
        assert!(match_text_pattern(&index, &XmlPattern::element("a")).is_empty());
    }

    #[test]
    fn attribute_filters() {
        let src =
            r##"<L a:background="#112233" b:textColor="#112233"><V a:background="#FFF" c:background="#abcdef"/></L>"##;
        let i = xml(src);
        let p = XmlPattern::attribute(NameMatch::Suffix(":background".into()), Some("^#[0-9A-Fa-f]{6}$"), &[]);
        let m = p.detect(&i);
        let values: Vec<_> = m.iter().map(|m| &src[m.span.start..m.span.end]).collect();
        assert_eq!(values, ["#112233", "#abcdef"]);
        let only_v = XmlPattern::attribute(NameMatch::Any, None, &["V"]);
        assert_eq!(match_text_pattern(&i, &only_v).len(), 2);
    }
}
