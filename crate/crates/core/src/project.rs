//! Project ingestion: walk a project tree and classify the files the
//! operators care about.

use std::fmt;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::span::Span;

pub const MANIFEST_NAME: &str = "AndroidManifest.xml";

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("{0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("no subject-source (.java) files found under {0}")]
    EmptyProject(PathBuf),
    #[error("failed to walk {path}: {source}")]
    Walk {
        path: PathBuf,
        #[source]
        source: walkdir::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    SubjectSource,
    ResourceXml,
    Manifest,
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileKind::SubjectSource => "subject-source",
            FileKind::ResourceXml => "resource-xml",
            FileKind::Manifest => "manifest",
        })
    }
}

/// A classified file held in memory, with a line-start table for
/// translating between byte offsets and 1-based line/column positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    relative_path: String,
    kind: FileKind,
    content: String,
    line_index: Vec<usize>,
}

impl SourceFile {
    pub fn new(relative_path: impl Into<String>, kind: FileKind, content: impl Into<String>) -> Self {
        let content = content.into();
        let line_index = build_line_index(&content);
        SourceFile {
            relative_path: relative_path.into(),
            kind,
            content,
            line_index,
        }
    }

    pub fn relative_path(&self) -> &str {
        &self.relative_path
    }

    pub fn kind(&self) -> FileKind {
        self.kind
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    pub fn line_index(&self) -> &[usize] {
        &self.line_index
    }

    pub fn line_count(&self) -> usize {
        self.line_index.len()
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.content[span.start..span.end]
    }

    /// 1-based (line, column) of a byte offset. Columns count characters;
    /// a tab is one column.
    pub fn line_col(&self, offset: usize) -> (usize, usize) {
        let line = match self.line_index.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_index[line];
        let col = self.content[start..offset].chars().count();
        (line + 1, col + 1)
    }

    /// Byte offset of a 1-based (line, column) position, if it lies inside
    /// the file.
    pub fn offset_of(&self, line: usize, column: usize) -> Option<usize> {
        if line == 0 || column == 0 || line > self.line_index.len() {
            return None;
        }
        let start = self.line_index[line - 1];
        let end = self.line_index.get(line).copied().unwrap_or(self.content.len());
        let text = &self.content[start..end];
        let mut chars = text.char_indices();
        let mut remaining = column - 1;
        loop {
            if remaining == 0 {
                return Some(start + chars.next().map(|(i, _)| i).unwrap_or(text.len()));
            }
            chars.next()?;
            remaining -= 1;
        }
    }

    /// Byte offset reached by advancing `chars` characters from `offset`.
    pub fn advance_chars(&self, offset: usize, chars: usize) -> Option<usize> {
        let rest = self.content.get(offset..)?;
        if chars == 0 {
            return Some(offset);
        }
        let mut it = rest.char_indices();
        for _ in 0..chars {
            it.next()?;
        }
        Some(offset + it.next().map(|(i, _)| i).unwrap_or(rest.len()))
    }

    /// Preferred line terminator for inserted lines.
    pub fn line_ending(&self) -> &'static str {
        if self.content.contains("\r\n") {
            "\r\n"
        } else {
            "\n"
        }
    }
}

fn build_line_index(content: &str) -> Vec<usize> {
    let mut index = vec![0];
    index.extend(content.match_indices('\n').map(|(i, _)| i + 1));
    // A trailing newline does not open a line of its own.
    if index.len() > 1 && *index.last().unwrap() == content.len() {
        index.pop();
    }
    index
}

/// Something that went wrong with one file during ingestion. Ingestion
/// carries on past these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestWarning {
    pub path: String,
    pub message: String,
}

/// An ingested project tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectProject {
    root_path: PathBuf,
    source_files: Vec<SourceFile>,
    resource_files: Vec<SourceFile>,
    manifest: Option<SourceFile>,
    other_files: Vec<String>,
    fingerprint: String,
    warnings: Vec<IngestWarning>,
}

impl SubjectProject {
    /// Builds a project from already classified files. Lists are sorted and
    /// the fingerprint computed here.
    pub fn from_files(
        root_path: impl Into<PathBuf>,
        mut source_files: Vec<SourceFile>,
        mut resource_files: Vec<SourceFile>,
        manifest: Option<SourceFile>,
        mut other_files: Vec<String>,
    ) -> Self {
        source_files.sort_by(|a, b| a.relative_path.as_bytes().cmp(b.relative_path.as_bytes()));
        resource_files.sort_by(|a, b| a.relative_path.as_bytes().cmp(b.relative_path.as_bytes()));
        other_files.sort();
        let fingerprint = fingerprint(source_files.iter().chain(resource_files.iter()).chain(manifest.iter()));
        SubjectProject {
            root_path: root_path.into(),
            source_files,
            resource_files,
            manifest,
            other_files,
            fingerprint,
            warnings: Vec::new(),
        }
    }

    pub fn root_path(&self) -> &Path {
        &self.root_path
    }

    pub fn source_files(&self) -> &[SourceFile] {
        &self.source_files
    }

    pub fn resource_files(&self) -> &[SourceFile] {
        &self.resource_files
    }

    pub fn manifest(&self) -> Option<&SourceFile> {
        self.manifest.as_ref()
    }

    /// Relative paths of files that are not classified but still belong to
    /// the tree.
    pub fn other_files(&self) -> &[String] {
        &self.other_files
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn warnings(&self) -> &[IngestWarning] {
        &self.warnings
    }

    /// Every classified file: sources, then resources, then the manifest.
    pub fn classified_files(&self) -> impl Iterator<Item = &SourceFile> {
        self.source_files
            .iter()
            .chain(self.resource_files.iter())
            .chain(self.manifest.iter())
    }

    pub fn file(&self, relative_path: &str) -> Option<&SourceFile> {
        self.classified_files().find(|f| f.relative_path == relative_path)
    }
}

fn fingerprint<'a>(files: impl Iterator<Item = &'a SourceFile>) -> String {
    let mut hasher = Sha256::new();
    for file in files {
        hasher.update(file.kind.to_string().as_bytes());
        hasher.update([0]);
        hasher.update(file.relative_path.as_bytes());
        hasher.update([0]);
        hasher.update((file.content.len() as u64).to_le_bytes());
        hasher.update(file.content.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Project-relative path with `/` separators.
pub fn relative_slash_path(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| match c {
            Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            _ => None,
        })
        .collect::<Option<_>>()?;
    Some(parts.join("/"))
}

fn is_resource_xml(rel: &str) -> bool {
    let mut parts = rel.split('/').collect::<Vec<_>>();
    let file = parts.pop().unwrap_or_default();
    file.ends_with(".xml") && parts.contains(&"res")
}

fn depth(rel: &str) -> usize {
    rel.matches('/').count()
}

/// Ingests a project directory, classifying `.java` sources, `res/**.xml`
/// resources and the shallowest `AndroidManifest.xml`.
pub fn ingest_project(root_path: impl AsRef<Path>) -> Result<SubjectProject, ProjectError> {
    let root = root_path.as_ref();
    if !root.is_dir() {
        return Err(ProjectError::NotADirectory(root.to_path_buf()));
    }
    let mut warnings = Vec::new();
    let mut sources = Vec::new();
    let mut resources = Vec::new();
    let mut manifests: Vec<(String, String)> = Vec::new();
    let mut others = Vec::new();

    for entry in WalkDir::new(root).follow_links(false).sort_by_file_name() {
        let entry = entry.map_err(|source| ProjectError::Walk {
            path: root.to_path_buf(),
            source,
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(rel) = relative_slash_path(root, entry.path()) else {
            continue;
        };
        let file_name = entry.file_name().to_string_lossy();
        let kind = if file_name.ends_with(".java") {
            Some(FileKind::SubjectSource)
        } else if file_name == MANIFEST_NAME {
            Some(FileKind::Manifest)
        } else if is_resource_xml(&rel) {
            Some(FileKind::ResourceXml)
        } else {
            None
        };
        let Some(kind) = kind else {
            others.push(rel);
            continue;
        };
        let bytes = match std::fs::read(entry.path()) {
            Ok(b) => b,
            Err(e) => {
                warnings.push(IngestWarning {
                    path: rel.clone(),
                    message: format!("unreadable: {e}"),
                });
                others.push(rel);
                continue;
            }
        };
        let content = match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(_) => {
                log::warn!("skipping non-UTF-8 file {rel}");
                warnings.push(IngestWarning {
                    path: rel.clone(),
                    message: "not valid UTF-8; skipped".into(),
                });
                others.push(rel);
                continue;
            }
        };
        match kind {
            FileKind::SubjectSource => sources.push(SourceFile::new(rel, kind, content)),
            FileKind::ResourceXml => resources.push(SourceFile::new(rel, kind, content)),
            FileKind::Manifest => manifests.push((rel, content)),
        }
    }

    if sources.is_empty() {
        return Err(ProjectError::EmptyProject(root.to_path_buf()));
    }

    // Nearest the root wins; remaining manifests are either resources (when
    // under res/) or plain files.
    manifests.sort_by(|a, b| (depth(&a.0), a.0.as_bytes()).cmp(&(depth(&b.0), b.0.as_bytes())));
    let mut manifests = manifests.into_iter();
    let manifest = manifests
        .next()
        .map(|(rel, content)| SourceFile::new(rel, FileKind::Manifest, content));
    for (rel, content) in manifests {
        if is_resource_xml(&rel) {
            resources.push(SourceFile::new(rel, FileKind::ResourceXml, content));
        } else {
            others.push(rel);
        }
    }

    let mut project = SubjectProject::from_files(root, sources, resources, manifest, others);
    project.warnings = warnings;
    Ok(project)
}
