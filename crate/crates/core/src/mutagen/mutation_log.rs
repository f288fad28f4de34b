//! The mutation log: one line per profile entry, in profile order.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{MutantRecord, MutantStatus};
use crate::pfp::MutationLocation;

pub const MUTATION_LOG_JSONL: &str = "mutation-log.jsonl";
pub const MUTATION_LOG_CSV: &str = "mutation-log.csv";

/// Which renderings to write. The JSON Lines log is always written, since
/// evaluation reads it; `Csv` adds a CSV rendering next to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogFormat {
    #[default]
    Jsonl,
    Csv,
}

/// One line of the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub mutant_id: String,
    pub operator: String,
    pub file: String,
    pub line: usize,
    pub start_col: usize,
    pub end_col: usize,
    pub status: MutantStatus,
    pub description: String,
    pub clone_dir: Option<String>,
}

impl From<&MutantRecord> for LogEntry {
    fn from(r: &MutantRecord) -> Self {
        LogEntry {
            mutant_id: r.mutant_id.clone(),
            operator: r.operator_id.clone(),
            file: r.location.file_path.clone(),
            line: r.location.line,
            start_col: r.location.start_column,
            end_col: r.location.end_column,
            status: r.status,
            description: r.description.clone(),
            clone_dir: r.clone_dir.as_ref().map(|d| d.to_string_lossy().replace('\\', "/")),
        }
    }
}

impl LogEntry {
    pub fn to_record(&self) -> MutantRecord {
        MutantRecord {
            mutant_id: self.mutant_id.clone(),
            operator_id: self.operator.clone(),
            location: MutationLocation {
                operator_id: self.operator.clone(),
                file_path: self.file.clone(),
                line: self.line,
                start_column: self.start_col,
                end_column: self.end_col,
                length: self.end_col.saturating_sub(self.start_col),
                captures: Default::default(),
            },
            clone_dir: self.clone_dir.as_ref().map(PathBuf::from),
            status: self.status,
            description: self.description.clone(),
        }
    }
}

pub(crate) fn write_logs(
    dir: &Path,
    records: &[MutantRecord],
    format: LogFormat,
) -> io::Result<(PathBuf, Option<PathBuf>)> {
    let jsonl = dir.join(MUTATION_LOG_JSONL);
    let mut out = BufWriter::new(File::create(&jsonl)?);
    for r in records {
        serde_json::to_writer(&mut out, &LogEntry::from(r))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    let csv_path = match format {
        LogFormat::Jsonl => None,
        LogFormat::Csv => {
            let path = dir.join(MUTATION_LOG_CSV);
            let mut w = csv::Writer::from_path(&path)?;
            for r in records {
                w.serialize(LogEntry::from(r))?;
            }
            w.flush()?;
            Some(path)
        }
    };
    Ok((jsonl, csv_path))
}

/// Reads a JSON Lines mutation log.
pub fn read_mutation_log(path: &Path) -> io::Result<Vec<LogEntry>> {
    let reader = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), n + 1)))?;
        entries.push(entry);
    }
    Ok(entries)
}
