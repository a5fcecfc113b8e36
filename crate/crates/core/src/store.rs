//! One JSON file per session. Files are written canonically (sorted keys,
//! two-space indent, LF, trailing newline) so saving a log is byte-stable.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::RecordedSession;
use crate::history::{HistoryError, SessionEvent, SessionLog};
use crate::session::{Lineage, SessionConfig, SessionId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionFile {
    pub format_version: u32,
    pub session_id: SessionId,
    pub lineage: Lineage,
    pub config: SessionConfig,
    pub events: Vec<SessionEvent>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format_version {found} (supported: {FORMAT_VERSION})")]
    UnsupportedVersion { found: u64 },
    #[error("corrupt session file at byte {offset}: {reason}")]
    CorruptLog { offset: usize, reason: String },
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("no session {0}")]
    NotFound(SessionId),
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::Io { .. } => "io-error",
            StoreError::UnsupportedVersion { .. } => "unsupported-version",
            StoreError::CorruptLog { .. } | StoreError::History(_) => "corrupt-log",
            StoreError::NotFound(_) => "unknown-session",
        }
    }
}

impl SessionFile {
    pub fn from_recorded(recorded: &RecordedSession) -> Self {
        let session = recorded.session();
        SessionFile {
            format_version: FORMAT_VERSION,
            session_id: session.id.clone(),
            lineage: session.lineage.clone(),
            config: session.config.clone(),
            events: recorded.log().events().to_vec(),
        }
    }

    /// Replay the events and check the header agrees with them.
    pub fn into_recorded(self) -> Result<RecordedSession, StoreError> {
        let log = SessionLog::from_events(self.events)?;
        let recorded = RecordedSession::from_log(log)?;
        let session = recorded.session();
        let mismatch = if session.id != self.session_id {
            Some("session_id")
        } else if session.lineage != self.lineage {
            Some("lineage")
        } else if session.config != self.config {
            Some("config")
        } else {
            None
        };
        if let Some(field) = mismatch {
            return Err(StoreError::History(HistoryError::CorruptLog {
                seq: recorded.log().len(),
                reason: format!("header {field} disagrees with the event log"),
            }));
        }
        Ok(recorded)
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_json(self)
    }

    /// Parse a file's text. The version is checked before the strict parse
    /// so a newer file is reported as such rather than as unknown fields.
    pub fn parse(text: &str) -> Result<Self, StoreError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| corrupt_at(text, &e))?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(found) => return Err(StoreError::UnsupportedVersion { found }),
            None => {
                return Err(StoreError::CorruptLog {
                    offset: 0,
                    reason: "missing integer format_version".into(),
                })
            }
        }
        serde_json::from_str(text).map_err(|e| corrupt_at(text, &e))
    }
}

fn corrupt_at(text: &str, err: &serde_json::Error) -> StoreError {
    StoreError::CorruptLog {
        offset: byte_offset(text, err.line(), err.column()),
        reason: err.to_string(),
    }
}

/// Byte offset of a 1-based line and column as reported by serde_json.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

/// Pretty JSON with object keys sorted at every level, LF line endings and a
/// trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's Map is a BTreeMap without the preserve_order feature, so
    // a round trip through Value sorts keys.
    let value = serde_json::to_value(value).expect("serializable");
    let mut out = serde_json::to_string_pretty(&value).expect("serializable");
    out.push('\n');
    out
}

/// Directory of `<session_id>.json` files.
#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, id: &SessionId) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Write atomically: a temp file in the same directory, then rename.
    pub fn save(&self, recorded: &RecordedSession) -> Result<PathBuf, StoreError> {
        let path = self.path(&recorded.session().id);
        write_atomic(&path, SessionFile::from_recorded(recorded).to_canonical_string().as_bytes())?;
        Ok(path)
    }

    pub fn load(&self, id: &SessionId) -> Result<RecordedSession, StoreError> {
        let path = self.path(id);
        if !is_safe_id(id) || !path.exists() {
            return Err(StoreError::NotFound(id.clone()));
        }
        load_file(&path)
    }

    /// Ids of every session file in the directory, sorted.
    pub fn list(&self) -> Result<Vec<SessionId>, StoreError> {
        let io = |source| StoreError::Io {
            path: self.dir.clone(),
            source,
        };
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(SessionId(stem.to_string()));
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

/// Ids double as file names, so only a conservative character set is accepted.
pub fn is_safe_id(id: &SessionId) -> bool {
    !id.as_str().is_empty()
        && id.as_str().len() <= 128
        && id
            .as_str()
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn load_file(path: &Path) -> Result<RecordedSession, StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SessionFile::parse(&text)?.into_recorded()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}
