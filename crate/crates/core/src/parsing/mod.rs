//! Per-file syntactic indexes: call sites, declarations, statements and
//! literals for subject sources; elements and attributes for XML.

pub mod java;
pub mod lexer;
pub mod visit;
pub mod xml;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::project::{FileKind, SourceFile};

pub use java::{
    index_source, CallSite, MethodDecl, Statement, StatementKind, StringLiteral, SyntaxIndex, TypeDecl, VarDecl,
    VarKind,
};
pub use visit::{walk_index, SyntaxVisitor};
pub use xml::{index_xml, XmlAttribute, XmlElement, XmlIndex};

/// A file that could not be indexed. Other files are unaffected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexFailure {
    pub path: String,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl IndexFailure {
    pub(crate) fn new(file: &SourceFile, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(file.content().len());
        let (line, column) = file.line_col(offset);
        IndexFailure {
            path: file.relative_path().to_string(),
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for IndexFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path, self.line, self.column, self.message)
    }
}

impl std::error::Error for IndexFailure {}

/// Index of either flavour, by file kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileIndex {
    Source(SyntaxIndex),
    Xml(XmlIndex),
}

pub fn index_file(file: &SourceFile) -> Result<FileIndex, IndexFailure> {
    match file.kind() {
        FileKind::SubjectSource => index_source(file).map(FileIndex::Source),
        FileKind::ResourceXml | FileKind::Manifest => index_xml(file).map(FileIndex::Xml),
    }
}
