//! The operator catalog.
//!
//! An operator pairs a [`Locator`] (which refines syntactic candidates into
//! exact [`MutationLocation`]s) with a [`Transformation`] (which rewrites the
//! file at such a location). Operators are created through the factory in
//! [`catalog`].

pub mod catalog;
mod locators;
mod transforms;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::parsing::{index_file, CallSite, IndexFailure, MethodDecl, StringLiteral, SyntaxIndex, XmlIndex};
use crate::pfp::{locate_in_file, MutationLocation, XmlMatch, XmlPattern};
use crate::project::{FileKind, SourceFile};
use crate::span::Span;

pub use catalog::{instantiate_operator, instantiate_operator_with, list_operators, CATALOG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    ActivitiesIntents,
    GuiComponents,
    Responsiveness,
    Io,
    Database,
    Connectivity,
    DataFormat,
    BackEndServices,
    ManifestPermissions,
    Resources,
}

impl Category {
    pub const ALL: [Category; 10] = [
        Category::ActivitiesIntents,
        Category::GuiComponents,
        Category::Responsiveness,
        Category::Io,
        Category::Database,
        Category::Connectivity,
        Category::DataFormat,
        Category::BackEndServices,
        Category::ManifestPermissions,
        Category::Resources,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Category::ActivitiesIntents => "Activities/Intents",
            Category::GuiComponents => "GUI components",
            Category::Responsiveness => "Responsiveness",
            Category::Io => "I/O",
            Category::Database => "Database",
            Category::Connectivity => "Connectivity",
            Category::DataFormat => "Data/format",
            Category::BackEndServices => "Back-end services",
            Category::ManifestPermissions => "Manifest/permissions",
            Category::Resources => "Resources",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorDescriptor {
    pub id: &'static str,
    pub category: Category,
    #[serde(rename = "target", serialize_with = "serialize_domain")]
    pub target_domain: FileKind,
    pub summary: &'static str,
    pub captures_required: &'static [&'static str],
    pub deterministic_seed_sensitive: bool,
}

/// Short name of an operator's target domain: `source`, `resource-xml` or
/// `manifest`.
pub fn domain_label(kind: FileKind) -> &'static str {
    match kind {
        FileKind::SubjectSource => "source",
        FileKind::ResourceXml => "resource-xml",
        FileKind::Manifest => "manifest",
    }
}

fn serialize_domain<S: serde::Serializer>(kind: &FileKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(domain_label(*kind))
}

/// Tunables for locator keyword lists and injected magnitudes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorConfig {
    pub gui_listener_sleep_ms: u64,
    pub back_end_sleep_ms: u64,
    pub busy_loop_iterations: u64,
    pub random_key_len: usize,
    pub input_stream_types: Vec<String>,
    pub output_stream_types: Vec<String>,
    pub cursor_types: Vec<String>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        let words = |w: &[&str]| w.iter().map(|s| s.to_string()).collect();
        OperatorConfig {
            gui_listener_sleep_ms: 3000,
            back_end_sleep_ms: 5000,
            busy_loop_iterations: 1_000_000_000,
            random_key_len: 8,
            input_stream_types: words(&["InputStream", "Reader"]),
            output_stream_types: words(&["OutputStream", "Writer"]),
            cursor_types: words(&["Cursor"]),
        }
    }
}

/// Which syntactic elements a locator wants to see.
#[derive(Debug, Clone)]
pub enum Target {
    /// Call sites with one of these names; `constructor` restricts to
    /// `new X(..)` (`Some(true)`) or plain calls (`Some(false)`).
    Calls {
        names: &'static [&'static str],
        constructor: Option<bool>,
    },
    StringLiterals,
    MethodBodies {
        names: &'static [&'static str],
    },
    Xml(XmlPattern),
}

/// A coarse match handed to a locator.
#[derive(Debug, Clone, Copy)]
pub enum Candidate<'a> {
    Call(&'a CallSite),
    Literal(&'a StringLiteral),
    Method(&'a MethodDecl),
    Xml(XmlMatch),
}

pub struct LocateContext<'a> {
    pub file: &'a SourceFile,
    pub source: Option<&'a SyntaxIndex>,
    pub xml: Option<&'a XmlIndex>,
    /// `R.id` names across the whole project; `None` when re-locating inside
    /// a single file, where the recorded captures are authoritative.
    pub project_ids: Option<&'a BTreeSet<String>>,
}

/// A refined location together with the byte region it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub location: MutationLocation,
    pub region: Span,
}

pub trait Locator: Send + Sync {
    fn target(&self) -> Target;

    /// Zero or more exact locations for a candidate; an empty result rejects
    /// the candidate.
    fn find_exact_locations(&self, candidate: &Candidate<'_>, ctx: &LocateContext<'_>) -> Vec<Located>;
}

/// A single splice of the original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub span: Span,
    pub replacement: String,
    pub description: String,
}

pub struct TransformInput<'a> {
    pub file: &'a SourceFile,
    pub source: Option<&'a SyntaxIndex>,
    pub region: Span,
    pub location: &'a MutationLocation,
    pub seed: u64,
}

pub trait Transformation: Send + Sync {
    fn edit(&self, input: &TransformInput<'_>) -> Result<Edit, MutationError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationResult {
    pub new_content: String,
    pub edit_span: Span,
    pub description: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("{0}: location no longer matches the operator's pattern")]
    StaleLocation(String),
    #[error("location is missing capture `{0}`")]
    MissingCapture(String),
    #[error("file cannot be indexed: {0}")]
    Unindexable(IndexFailure),
    #[error("transformation would not change the file")]
    NoChange,
}

pub struct Operator {
    descriptor: &'static OperatorDescriptor,
    locator: Box<dyn Locator>,
    transformation: Box<dyn Transformation>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator").field("id", &self.descriptor.id).finish()
    }
}

impl Operator {
    pub(crate) fn new(
        descriptor: &'static OperatorDescriptor,
        locator: Box<dyn Locator>,
        transformation: Box<dyn Transformation>,
    ) -> Self {
        Operator {
            descriptor,
            locator,
            transformation,
        }
    }

    pub fn id(&self) -> &'static str {
        self.descriptor.id
    }

    pub fn descriptor(&self) -> &'static OperatorDescriptor {
        self.descriptor
    }

    pub fn locator(&self) -> &dyn Locator {
        self.locator.as_ref()
    }

    pub fn transformation(&self) -> &dyn Transformation {
        self.transformation.as_ref()
    }

    /// Rewrites `content` at `location`.
    ///
    /// The location is re-derived from `content` first; if this operator
    /// would no longer report it, the location is stale.
    pub fn perform_mutation(
        &self,
        location: &MutationLocation,
        content: &str,
        seed: u64,
    ) -> Result<TransformationResult, MutationError> {
        let file = SourceFile::new(location.file_path.clone(), self.descriptor.target_domain, content);
        let index = index_file(&file).map_err(MutationError::Unindexable)?;
        let located = locate_in_file(std::slice::from_ref(self), &file, &index, None)
            .into_iter()
            .find(|l| {
                l.location.line == location.line
                    && l.location.start_column == location.start_column
                    && l.location.length == location.length
            })
            .ok_or_else(|| MutationError::StaleLocation(self.id().to_string()))?;
        for name in self.descriptor.captures_required {
            if !location.captures.contains_key(*name) {
                return Err(MutationError::MissingCapture(name.to_string()));
            }
        }
        let source = match &index {
            crate::parsing::FileIndex::Source(s) => Some(s),
            crate::parsing::FileIndex::Xml(_) => None,
        };
        let edit = self.transformation.edit(&TransformInput {
            file: &file,
            source,
            region: located.region,
            location,
            seed,
        })?;
        let mut new_content = String::with_capacity(content.len() + edit.replacement.len());
        new_content.push_str(&content[..edit.span.start]);
        new_content.push_str(&edit.replacement);
        new_content.push_str(&content[edit.span.end..]);
        if new_content == content {
            return Err(MutationError::NoChange);
        }
        Ok(TransformationResult {
            new_content,
            edit_span: edit.span,
            description: edit.description,
        })
    }
}

/// Turns a matched region into an exact location. The candidate column is
/// 0-based; the start column is fixed up by one and the end column follows
/// from the region's length.
pub(crate) fn exact_location(
    operator_id: &str,
    file: &SourceFile,
    region: Span,
    captures: BTreeMap<String, String>,
) -> Located {
    let (line, column) = file.line_col(region.start);
    let mut location = MutationLocation {
        operator_id: operator_id.to_string(),
        file_path: file.relative_path().to_string(),
        line,
        start_column: column - 1,
        end_column: 0,
        length: file.slice(region).chars().count(),
        captures,
    };
    // Fix start column
    location.start_column += 1;
    // Build exact mutation location
    location.end_column = location.start_column + location.length;
    Located { location, region }
}

/// Seeded generator for randomized replacements, keyed by the location so
/// that different mutants draw different values under the same seed.
pub(crate) fn location_rng(seed: u64, location: &MutationLocation) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut hasher = Sha256::new();
    hasher.update(location.operator_id.as_bytes());
    hasher.update([0]);
    hasher.update(location.file_path.as_bytes());
    hasher.update([0]);
    hasher.update((location.line as u64).to_le_bytes());
    hasher.update((location.start_column as u64).to_le_bytes());
    hasher.update((location.length as u64).to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 8];
    key.copy_from_slice(&digest[..8]);
    rand_chacha::ChaCha8Rng::seed_from_u64(u64::from_le_bytes(key) ^ seed)
}

/// Category that marks an activity as the app's entry point.
pub const LAUNCHER_CATEGORY: &str = "android.intent.category.LAUNCHER";

/// Operators whose transformation inserts `<var> = null;` somewhere.
pub const NULL_ASSIGNING_OPERATORS: &[&str] = &[
    "NullIntent",
    "FindViewByIdReturnsNull",
    "NullInputStream",
    "NullOutputStream",
    "ClosingNullCursor",
];
