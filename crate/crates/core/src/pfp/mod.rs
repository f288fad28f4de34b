//! Potential fault profile derivation.
//!
//! Every file is indexed once. A visitor then walks each source index and
//! hands matching call sites, literals and method bodies to the locators of
//! the selected operators; XML operators go through text-based detection.
//! Locators refine those candidates into exact locations, which are
//! deduplicated and merged into one canonical order.

pub mod detect;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::operators::{
    instantiate_operator_with, Candidate, LocateContext, Located, Operator, OperatorConfig, OperatorError, Target,
};
use crate::parsing::{index_file, walk_index, FileIndex, IndexFailure, SyntaxIndex, SyntaxVisitor};
use crate::project::{FileKind, SourceFile, SubjectProject};

pub use detect::{match_text_pattern, NameMatch, TextBasedDetector, XmlMatch, XmlPattern};

/// Files carrying this suffix are indexed but never contribute locations.
pub const DISABLED_SUFFIX: &str = ".disabled.java";

/// An exact injection point.
///
/// `start_column` is 1-based and `end_column = start_column + length`,
/// where `length` counts characters of the matched region.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MutationLocation {
    #[serde(rename = "operator")]
    pub operator_id: String,
    #[serde(rename = "file")]
    pub file_path: String,
    pub line: usize,
    #[serde(rename = "start_col")]
    pub start_column: usize,
    #[serde(rename = "end_col")]
    pub end_column: usize,
    pub length: usize,
    #[serde(default)]
    pub captures: BTreeMap<String, String>,
}

impl MutationLocation {
    pub fn capture(&self, name: &str) -> Option<&str> {
        self.captures.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialFaultProfile {
    pub project_fingerprint: String,
    pub entries: Vec<MutationLocation>,
    pub per_operator_counts: BTreeMap<String, usize>,
    /// Files that could not be indexed; they contribute no entries.
    pub diagnostics: Vec<IndexFailure>,
}

impl PotentialFaultProfile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One JSON object per entry, newline-terminated.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for entry in &self.entries {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    /// Parses entries written by [`write_jsonl`](Self::write_jsonl).
    pub fn parse_jsonl(text: &str) -> Result<Vec<MutationLocation>, serde_json::Error> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum PfpError {
    #[error("no operators selected")]
    EmptySelection,
    #[error("unknown operator(s): {}", .0.join(", "))]
    UnknownOperators(Vec<String>),
}

/// Canonical sort key of an entry.
fn entry_key(loc: &MutationLocation) -> (&[u8], usize, usize, &str) {
    (
        loc.file_path.as_bytes(),
        loc.line,
        loc.start_column,
        loc.operator_id.as_str(),
    )
}

/// Derives the profile with the default operator configuration.
pub fn derive_pfp(
    project: &SubjectProject,
    selection: &BTreeSet<String>,
    execution: Execution,
) -> Result<PotentialFaultProfile, PfpError> {
    derive_pfp_with(project, selection, &OperatorConfig::default(), execution)
}

pub fn derive_pfp_with(
    project: &SubjectProject,
    selection: &BTreeSet<String>,
    config: &OperatorConfig,
    execution: Execution,
) -> Result<PotentialFaultProfile, PfpError> {
    if selection.is_empty() {
        return Err(PfpError::EmptySelection);
    }
    let mut operators = Vec::new();
    let mut unknown = Vec::new();
    for id in selection {
        match instantiate_operator_with(id, config) {
            Ok(op) => operators.push(op),
            Err(OperatorError::UnknownOperator(id)) => unknown.push(id),
        }
    }
    if !unknown.is_empty() {
        return Err(PfpError::UnknownOperators(unknown));
    }

    let files: Vec<&SourceFile> = project.classified_files().collect();
    let indexes = execution.map(&files, |_, f| index_file(f));
    let project_ids = project_id_names(&files, &indexes);

    let per_file = execution.map(&files, |i, file| match &indexes[i] {
        Ok(index) => locate_in_file(&operators, file, index, Some(&project_ids)),
        Err(_) => Vec::new(),
    });

    let diagnostics = indexes.iter().filter_map(|r| r.as_ref().err().cloned()).collect();

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (file, located) in files.iter().zip(per_file) {
        for l in located {
            if seen.insert((l.location.operator_id.clone(), file.relative_path(), l.region.start)) {
                entries.push(l.location);
            }
        }
    }
    entries.sort_by(|a, b| entry_key(a).cmp(&entry_key(b)));
    let mut per_operator_counts: BTreeMap<String, usize> = selection.iter().map(|id| (id.clone(), 0)).collect();
    for e in &entries {
        *per_operator_counts.entry(e.operator_id.clone()).or_default() += 1;
    }
    Ok(PotentialFaultProfile {
        project_fingerprint: project.fingerprint().to_string(),
        entries,
        per_operator_counts,
        diagnostics,
    })
}

/// Every `R.id` name the project mentions, in sources (`R.id.x`) or
/// resources (`@+id/x`, `@id/x`).
fn project_id_names(files: &[&SourceFile], indexes: &[Result<FileIndex, IndexFailure>]) -> BTreeSet<String> {
    let mut ids = BTreeSet::new();
    for (file, index) in files.iter().zip(indexes) {
        match index {
            Ok(FileIndex::Source(s)) => ids.extend(s.id_references.iter().cloned()),
            Ok(FileIndex::Xml(x)) if file.kind() == FileKind::ResourceXml => {
                for attr in x.elements.iter().flat_map(|e| &e.attributes) {
                    let v = attr.value_text.as_str();
                    if let Some(name) = v.strip_prefix("@+id/").or_else(|| v.strip_prefix("@id/")) {
                        ids.insert(name.to_string());
                    }
                }
            }
            _ => {}
        }
    }
    ids
}

/// Runs every applicable operator over one indexed file.
pub(crate) fn locate_in_file(
    operators: &[Operator],
    file: &SourceFile,
    index: &FileIndex,
    project_ids: Option<&BTreeSet<String>>,
) -> Vec<Located> {
    let applicable: Vec<&Operator> = operators
        .iter()
        .filter(|op| op.descriptor().target_domain == file.kind())
        .collect();
    if applicable.is_empty() {
        return Vec::new();
    }
    match index {
        FileIndex::Source(source) => {
            if file.relative_path().ends_with(DISABLED_SUFFIX) {
                return Vec::new();
            }
            let ctx = LocateContext {
                file,
                source: Some(source),
                xml: None,
                project_ids,
            };
            let mut dispatcher = Dispatcher {
                targets: applicable.iter().map(|op| (*op, op.locator().target())).collect(),
                ctx,
                out: Vec::new(),
            };
            walk_index(source, &mut dispatcher);
            dispatcher.out
        }
        FileIndex::Xml(xml) => {
            let ctx = LocateContext {
                file,
                source: None,
                xml: Some(xml),
                project_ids,
            };
            let mut out = Vec::new();
            for op in applicable {
                if let Target::Xml(pattern) = op.locator().target() {
                    for m in pattern.detect(xml) {
                        out.extend(op.locator().find_exact_locations(&Candidate::Xml(m), &ctx));
                    }
                }
            }
            out
        }
    }
}

/// Visitor that routes each syntactic element to the locators whose target
/// it matches.
struct Dispatcher<'a> {
    targets: Vec<(&'a Operator, Target)>,
    ctx: LocateContext<'a>,
    out: Vec<Located>,
}

impl SyntaxVisitor for Dispatcher<'_> {
    fn visit_call_site(&mut self, _index: &SyntaxIndex, call: &crate::parsing::CallSite) {
        for (op, target) in &self.targets {
            if let Target::Calls { names, constructor } = target {
                if constructor.is_none_or(|c| c == call.constructor) && names.iter().any(|n| *n == call.method_name) {
                    self.out
                        .extend(op.locator().find_exact_locations(&Candidate::Call(call), &self.ctx));
                }
            }
        }
    }

    fn visit_string_literal(&mut self, _index: &SyntaxIndex, literal: &crate::parsing::StringLiteral) {
        for (op, target) in &self.targets {
            if matches!(target, Target::StringLiterals) {
                self.out.extend(
                    op.locator()
                        .find_exact_locations(&Candidate::Literal(literal), &self.ctx),
                );
            }
        }
    }

    fn visit_method(&mut self, _index: &SyntaxIndex, method: &crate::parsing::MethodDecl) {
        for (op, target) in &self.targets {
            if let Target::MethodBodies { names } = target {
                if names.iter().any(|n| *n == method.name) {
                    self.out
                        .extend(op.locator().find_exact_locations(&Candidate::Method(method), &self.ctx));
                }
            }
        }
    }
}
