//! File-backed persistence: line-delimited JSON logs for feedback and retained questions.
//!
//! `feedback.jsonl` holds one [`FeedbackRecord`] per line and `retained_questions.jsonl`
//! one [`RetainedQuestion`] per line. Sessions themselves live only in memory.

use crate::intent::Intent;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

pub const FEEDBACK_FILE: &str = "feedback.jsonl";
pub const RETAINED_FILE: &str = "retained_questions.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub receipt_id: String,
    /// Cleared when the session is deleted.
    pub session_id: Option<String>,
    pub stars: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    /// Unix milliseconds.
    pub created_at: u64,
}

/// A user question kept after its session is gone, without any session link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetainedQuestion {
    pub text: String,
    pub intent: Intent,
    pub created_at: u64,
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    lock: Mutex<()>,
}

fn append_lines<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    let mut buf = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    // one write per batch keeps each append whole
    f.write_all(&buf)?;
    f.sync_data()
}

fn read_lines<T: DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn guard(&self) -> std::sync::MutexGuard<'_, ()> {
        self.lock.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn append_feedback(&self, rec: &FeedbackRecord) -> io::Result<()> {
        let _g = self.guard();
        append_lines(&self.dir.join(FEEDBACK_FILE), std::slice::from_ref(rec))
    }

    pub fn append_retained(&self, rows: &[RetainedQuestion]) -> io::Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let _g = self.guard();
        append_lines(&self.dir.join(RETAINED_FILE), rows)
    }

    pub fn feedback(&self) -> io::Result<Vec<FeedbackRecord>> {
        let _g = self.guard();
        read_lines(&self.dir.join(FEEDBACK_FILE))
    }

    pub fn retained(&self) -> io::Result<Vec<RetainedQuestion>> {
        let _g = self.guard();
        read_lines(&self.dir.join(RETAINED_FILE))
    }

    /// Drops the session link from its feedback rows, rewriting the log atomically.
    pub fn unlink_feedback(&self, session_id: &str) -> io::Result<usize> {
        let _g = self.guard();
        let path = self.dir.join(FEEDBACK_FILE);
        let mut rows: Vec<FeedbackRecord> = read_lines(&path)?;
        let mut changed = 0;
        for r in rows.iter_mut() {
            if r.session_id.as_deref() == Some(session_id) {
                r.session_id = None;
                changed += 1;
            }
        }
        if changed > 0 {
            let tmp = self.dir.join(format!("{FEEDBACK_FILE}.tmp"));
            let _ = fs::remove_file(&tmp);
            append_lines(&tmp, &rows)?;
            fs::rename(&tmp, &path)?;
        }
        Ok(changed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs_round_trip_and_unlink() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert!(store.feedback().unwrap().is_empty());
        for (i, sid) in ["a", "b", "a"].iter().enumerate() {
            store
                .append_feedback(&FeedbackRecord {
                    receipt_id: i.to_string(),
                    session_id: Some(sid.to_string()),
                    stars: 4,
                    comment: None,
                    created_at: i as u64,
                })
                .unwrap();
        }
        assert_eq!(store.unlink_feedback("a").unwrap(), 2);
        let rows = store.feedback().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows.iter().filter(|r| r.session_id.is_none()).count(), 2);
        let text = fs::read_to_string(dir.path().join(FEEDBACK_FILE)).unwrap();
        assert!(!text.contains("\"a\""));

        store
            .append_retained(&[RetainedQuestion {
                text: "Draw the CNOT gate".into(),
                intent: Intent::DrawGate,
                created_at: 1,
            }])
            .unwrap();
        assert_eq!(store.retained().unwrap()[0].intent, Intent::DrawGate);
    }
}
