//! Mutation testing for Android-style projects: ingest a project, derive the
//! potential fault profile of every place a domain-specific operator can
//! inject a fault, generate one cloned mutant project per location, and
//! evaluate the resulting corpus.

pub mod exec;
pub mod harness;
pub mod mutagen;
pub mod operators;
pub mod parsing;
pub mod pfp;
pub mod project;
pub mod span;

pub use project::{ingest_project, FileKind, SourceFile, SubjectProject};
pub use span::Span;
