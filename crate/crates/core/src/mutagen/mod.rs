//! Mutant generation: one full project clone per profile entry, with exactly
//! one file rewritten, plus a log of every entry's outcome.

mod mutation_log;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

pub use mutation_log::{read_mutation_log, LogEntry, LogFormat, MUTATION_LOG_CSV, MUTATION_LOG_JSONL};

use crate::exec::Execution;
use crate::operators::instantiate_operator;
use crate::parsing::{index_source, index_xml};
use crate::pfp::{MutationLocation, PotentialFaultProfile};
use crate::project::SubjectProject;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantStatus {
    Generated,
    /// Left out by a filter (see [`GenerationOptions::exclude_main_activity`]).
    Skipped,
    TransformationFailed,
}

impl std::fmt::Display for MutantStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MutantStatus::Generated => "generated",
            MutantStatus::Skipped => "skipped",
            MutantStatus::TransformationFailed => "transformation-failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantRecord {
    pub mutant_id: String,
    pub operator_id: String,
    pub location: MutationLocation,
    /// Clone directory relative to the output directory; `None` when no
    /// clone was kept.
    pub clone_dir: Option<PathBuf>,
    pub status: MutantStatus,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationOptions {
    pub output_dir: PathBuf,
    pub parallelism: usize,
    pub seed: u64,
    /// Skip entries in the file that defines the manifest's launcher
    /// activity.
    pub exclude_main_activity: bool,
    pub operator_selection: BTreeSet<String>,
    pub log_format: LogFormat,
}

impl GenerationOptions {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        GenerationOptions {
            output_dir: output_dir.into(),
            parallelism: 1,
            seed: 0,
            exclude_main_activity: false,
            operator_selection: BTreeSet::new(),
            log_format: LogFormat::Jsonl,
        }
    }
}

#[derive(Debug)]
pub struct GenerationReport {
    /// One record per profile entry, in profile order.
    pub records: Vec<MutantRecord>,
    pub log_path: PathBuf,
    pub csv_path: Option<PathBuf>,
}

impl GenerationReport {
    pub fn count(&self, status: MutantStatus) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("parallelism must be at least 1")]
    ZeroParallelism,
    #[error("output directory {0} lies inside the project")]
    OutputInsideProject(PathBuf),
    #[error("output directory {0} is not empty")]
    OutputNotEmpty(PathBuf),
    #[error("profile was derived from a different project (fingerprint {expected}, project has {actual})")]
    FingerprintMismatch { expected: String, actual: String },
    #[error("profile entry for {0} names a file the project does not have")]
    UnknownFile(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum CloneError {
    #[error("destination {0} already exists")]
    DestinationExists(PathBuf),
    #[error("copying {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> GenerationError {
    let context = context.into();
    move |source| GenerationError::Io { context, source }
}

/// Copies the whole tree under `source_root` to `dest`, which must not exist.
pub fn clone_project(source_root: &Path, dest: &Path) -> Result<PathBuf, CloneError> {
    if dest.exists() {
        return Err(CloneError::DestinationExists(dest.to_path_buf()));
    }
    let wrap = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CloneError::Io { path, source }
    };
    fs::create_dir_all(dest).map_err(wrap(dest))?;
    for entry in WalkDir::new(source_root).min_depth(1).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(source_root).to_path_buf();
            CloneError::Io {
                path,
                source: e.into_io_error().unwrap_or_else(|| io::Error::other("filesystem loop")),
            }
        })?;
        let relative = entry
            .path()
            .strip_prefix(source_root)
            .expect("walkdir yields paths under its root");
        let target = dest.join(relative);
        let kind = entry.file_type();
        if kind.is_dir() {
            fs::create_dir_all(&target).map_err(wrap(&target))?;
        } else if kind.is_file() {
            fs::copy(entry.path(), &target).map_err(wrap(entry.path()))?;
        } else if kind.is_symlink() {
            copy_symlink(entry.path(), &target).map_err(wrap(entry.path()))?;
        }
    }
    Ok(dest.to_path_buf())
}

#[cfg(unix)]
fn copy_symlink(link: &Path, target: &Path) -> io::Result<()> {
    std::os::unix::fs::symlink(fs::read_link(link)?, target)
}

#[cfg(not(unix))]
fn copy_symlink(link: &Path, target: &Path) -> io::Result<()> {
    fs::copy(link, target).map(|_| ())
}

/// Zero-padded id for the entry at `index` (0-based) of `total`.
pub fn mutant_id(index: usize, total: usize) -> String {
    let width = total.to_string().len().max(4);
    format!("{:0width$}", index + 1)
}

/// Absolute path with `.`/`..` resolved against the deepest existing
/// ancestor, so that not-yet-created directories can be compared.
fn resolved(path: &Path) -> io::Result<PathBuf> {
    let absolute = std::path::absolute(path)?;
    let mut existing = absolute.as_path();
    let mut rest = Vec::new();
    while !existing.exists() {
        match (existing.parent(), existing.file_name()) {
            (Some(parent), Some(name)) => {
                rest.push(name.to_os_string());
                existing = parent;
            }
            _ => break,
        }
    }
    let mut out = existing.canonicalize()?;
    for name in rest.into_iter().rev() {
        out.push(name);
    }
    Ok(out)
}

/// Checks the options against the project before anything is written.
pub fn validate_options(project: &SubjectProject, options: &GenerationOptions) -> Result<(), GenerationError> {
    if options.parallelism == 0 {
        return Err(GenerationError::ZeroParallelism);
    }
    let root = resolved(project.root_path()).map_err(io_err("resolving the project root"))?;
    let out = resolved(&options.output_dir).map_err(io_err("resolving the output directory"))?;
    if out.starts_with(&root) {
        return Err(GenerationError::OutputInsideProject(options.output_dir.clone()));
    }
    if options.output_dir.exists() {
        let mut entries = fs::read_dir(&options.output_dir).map_err(io_err("reading the output directory"))?;
        if entries.next().is_some() {
            return Err(GenerationError::OutputNotEmpty(options.output_dir.clone()));
        }
    }
    Ok(())
}

/// Fully qualified name of the launcher activity, if the manifest has one.
pub fn launcher_activity(project: &SubjectProject) -> Option<String> {
    let manifest = project.manifest()?;
    let xml = index_xml(manifest).ok()?;
    let package = xml
        .elements
        .first()
        .filter(|e| e.tag_name == "manifest")
        .and_then(|e| e.attribute("package"))
        .map(|a| a.value_text.clone())
        .unwrap_or_default();
    let (index, _) = xml.elements.iter().enumerate().find(|(i, e)| {
        e.tag_name == "activity"
            && xml.descendants(*i).any(|(_, d)| {
                d.tag_name == "category"
                    && d.attribute("android:name")
                        .is_some_and(|a| a.value_text == crate::operators::LAUNCHER_CATEGORY)
            })
    })?;
    let name = &xml.elements[index].attribute("android:name")?.value_text;
    Some(if let Some(rest) = name.strip_prefix('.') {
        format!("{package}.{rest}")
    } else if !name.contains('.') && !package.is_empty() {
        format!("{package}.{name}")
    } else {
        name.clone()
    })
}

/// Source files that define `activity` (a fully qualified name). Falls back
/// to matching the simple name when no package-qualified match exists.
pub fn files_defining(project: &SubjectProject, activity: &str) -> BTreeSet<String> {
    let simple = activity.rsplit('.').next().unwrap_or(activity);
    let mut exact = BTreeSet::new();
    let mut by_name = BTreeSet::new();
    for file in project.source_files() {
        let Ok(index) = index_source(file) else { continue };
        for ty in index.type_declarations.iter().filter(|t| t.top_level) {
            let fqn = match &index.package_name {
                Some(p) => format!("{p}.{}", ty.name),
                None => ty.name.clone(),
            };
            if fqn == activity {
                exact.insert(file.relative_path().to_string());
            }
            if ty.name == simple {
                by_name.insert(file.relative_path().to_string());
            }
        }
    }
    if exact.is_empty() {
        by_name
    } else {
        exact
    }
}

enum Plan {
    Generate,
    Skip(String),
}

/// Generates one mutant per profile entry under `options.output_dir` and
/// writes the mutation log there.
pub fn generate_mutants(
    project: &SubjectProject,
    pfp: &PotentialFaultProfile,
    options: &GenerationOptions,
) -> Result<GenerationReport, GenerationError> {
    if pfp.project_fingerprint != project.fingerprint() {
        return Err(GenerationError::FingerprintMismatch {
            expected: pfp.project_fingerprint.clone(),
            actual: project.fingerprint().to_string(),
        });
    }
    validate_options(project, options)?;
    for entry in &pfp.entries {
        if project.file(&entry.file_path).is_none() {
            return Err(GenerationError::UnknownFile(entry.file_path.clone()));
        }
    }
    fs::create_dir_all(&options.output_dir).map_err(io_err("creating the output directory"))?;

    let excluded: BTreeSet<String> = if options.exclude_main_activity {
        launcher_activity(project)
            .map(|a| files_defining(project, &a))
            .unwrap_or_default()
    } else {
        BTreeSet::new()
    };

    let total = pfp.entries.len();
    let plans: Vec<(String, &MutationLocation, Plan)> = pfp
        .entries
        .iter()
        .enumerate()
        .map(|(i, loc)| {
            let plan = if excluded.contains(&loc.file_path) {
                Plan::Skip(format!("skipped: {} defines the launcher activity", loc.file_path))
            } else {
                Plan::Generate
            };
            (mutant_id(i, total), loc, plan)
        })
        .collect();

    let execution = Execution::with_workers(options.parallelism);
    let records = execution.map(&plans, |_, (id, loc, plan)| match plan {
        Plan::Skip(why) => MutantRecord {
            mutant_id: id.clone(),
            operator_id: loc.operator_id.clone(),
            location: (*loc).clone(),
            clone_dir: None,
            status: MutantStatus::Skipped,
            description: why.clone(),
        },
        Plan::Generate => generate_one(project, id, loc, options),
    });

    let (log_path, csv_path) = mutation_log::write_logs(&options.output_dir, &records, options.log_format)
        .map_err(io_err("writing the mutation log"))?;
    Ok(GenerationReport {
        records,
        log_path,
        csv_path,
    })
}

fn generate_one(
    project: &SubjectProject,
    id: &str,
    loc: &MutationLocation,
    options: &GenerationOptions,
) -> MutantRecord {
    let relative = PathBuf::from(format!("mutant-{id}"));
    let clone_dir = options.output_dir.join(&relative);
    let mut record = MutantRecord {
        mutant_id: id.to_string(),
        operator_id: loc.operator_id.clone(),
        location: loc.clone(),
        clone_dir: None,
        status: MutantStatus::TransformationFailed,
        description: String::new(),
    };
    let outcome = (|| -> Result<String, String> {
        let operator = instantiate_operator(&loc.operator_id).map_err(|e| e.to_string())?;
        let file = project.file(&loc.file_path).ok_or("file not in project")?;
        let result = operator
            .perform_mutation(loc, file.content(), options.seed)
            .map_err(|e| e.to_string())?;
        clone_project(project.root_path(), &clone_dir).map_err(|e| e.to_string())?;
        fs::write(clone_dir.join(&loc.file_path), result.new_content)
            .map_err(|e| format!("writing {}: {e}", loc.file_path))?;
        Ok(result.description)
    })();
    match outcome {
        Ok(description) => {
            record.status = MutantStatus::Generated;
            record.clone_dir = Some(relative);
            record.description = format!("{}: {description}", loc.operator_id);
        }
        Err(why) => {
            if clone_dir.exists() {
                let _ = fs::remove_dir_all(&clone_dir);
            }
            log::warn!("mutant {id} ({}) failed: {why}", loc.operator_id);
            record.description = format!("{}: transformation failed: {why}", loc.operator_id);
        }
    }
    record
}

/// Records rebuilt from a mutation log; captures are not logged, and the
/// length is recovered from the columns.
pub fn records_from_log(entries: &[LogEntry]) -> Vec<MutantRecord> {
    entries.iter().map(LogEntry::to_record).collect()
}

/// Per-operator count of records with the given status.
pub fn count_by_operator(records: &[MutantRecord], status: MutantStatus) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in records.iter().filter(|r| r.status == status) {
        *out.entry(r.operator_id.clone()).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_padded_to_four_or_more() {
        assert_eq!(mutant_id(0, 3), "0001");
        assert_eq!(mutant_id(41, 9999), "0042");
        assert_eq!(mutant_id(41, 12345), "00042");
    }
}
