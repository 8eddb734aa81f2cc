//! Line-delimited change journal.
//!
//! Every line is one JSON object: the change record's own fields, a `kind`
//! tag, the transaction number `txn` and a `commit` flag. A transaction is
//! one or more consecutive lines sharing `txn`; only its last line carries
//! `"commit":true`. Replay applies a transaction only once its commit line
//! has been read, so a journal cut between lines never exposes a partial
//! operation. A line that does not parse is reported with its 1-based number.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{FeedbackRecord, ProductAggregate, ReviewSession, Timestamp, UserRecord, Vote};
use crate::error::StoreError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JournalEntry {
    User(UserRecord),
    Feedback(FeedbackRecord),
    Vote(Vote),
    Aggregate(ProductAggregate),
    Session(ReviewSession),
    Blacklist {
        user_id: String,
        blacklist_until: Timestamp,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalLine {
    #[serde(flatten)]
    pub entry: JournalEntry,
    pub txn: u64,
    pub commit: bool,
}

/// Encodes one transaction as journal text, newline-terminated.
pub fn encode_transaction(txn: u64, entries: &[JournalEntry]) -> String {
    let mut out = String::new();
    let last = entries.len().saturating_sub(1);
    for (i, entry) in entries.iter().enumerate() {
        let line = JournalLine {
            entry: entry.clone(),
            txn,
            commit: i == last,
        };
        out.push_str(&serde_json::to_string(&line).expect("journal records serialize"));
        out.push('\n');
    }
    out
}

/// Committed transactions read back from a journal.
#[derive(Debug, Default)]
pub struct Replay {
    pub transactions: Vec<Vec<JournalEntry>>,
    pub last_txn: u64,
}

pub fn read_transactions(reader: impl BufRead) -> Result<Replay, StoreError> {
    let mut replay = Replay::default();
    let mut pending: Vec<JournalEntry> = Vec::new();
    let mut pending_txn: Option<u64> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JournalLine =
            serde_json::from_str(&line).map_err(|e| StoreError::CorruptJournal {
                line: line_no,
                reason: e.to_string(),
            })?;
        if pending_txn.is_some_and(|t| t != parsed.txn) {
            // an earlier writer died mid-transaction; its lines never took effect
            pending.clear();
        }
        pending_txn = Some(parsed.txn);
        replay.last_txn = replay.last_txn.max(parsed.txn);
        pending.push(parsed.entry);
        if parsed.commit {
            replay.transactions.push(std::mem::take(&mut pending));
            pending_txn = None;
        }
    }
    Ok(replay)
}

/// Where committed transactions are written.
#[derive(Debug)]
pub enum JournalSink {
    Memory(Vec<u8>),
    File {
        path: PathBuf,
        writer: BufWriter<File>,
    },
}

impl JournalSink {
    pub fn memory() -> Self {
        JournalSink::Memory(Vec::new())
    }

    pub fn append_to(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(JournalSink::File {
            path,
            writer: BufWriter::new(file),
        })
    }

    pub fn write(&mut self, text: &str) -> io::Result<()> {
        match self {
            JournalSink::Memory(buf) => {
                buf.extend_from_slice(text.as_bytes());
                Ok(())
            }
            JournalSink::File { writer, .. } => {
                writer.write_all(text.as_bytes())?;
                writer.flush()
            }
        }
    }

    /// Full journal text; reads the file back for file sinks.
    pub fn contents(&self) -> io::Result<String> {
        match self {
            JournalSink::Memory(buf) => Ok(String::from_utf8_lossy(buf).into_owned()),
            JournalSink::File { path, .. } => std::fs::read_to_string(path),
        }
    }
}

pub fn open_reader(path: &Path) -> io::Result<Option<BufReader<File>>> {
    match File::open(path) {
        Ok(f) => Ok(Some(BufReader::new(f))),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::UserRecord;

    #[test]
    fn line_shape_is_flat_and_tagged() {
        let text = encode_transaction(7, &[JournalEntry::User(UserRecord::new("u1", 42).unwrap())]);
        assert_eq!(
            text,
            "{\"kind\":\"user\",\"user_id\":\"u1\",\"trust_degree\":0.0,\"blacklist_until\":null,\"created_at\":42,\"txn\":7,\"commit\":true}\n"
        );
    }

    #[test]
    fn only_last_line_commits() {
        let entries = vec![
            JournalEntry::Blacklist {
                user_id: "a".into(),
                blacklist_until: 5,
            },
            JournalEntry::Blacklist {
                user_id: "b".into(),
                blacklist_until: 6,
            },
        ];
        let text = encode_transaction(1, &entries);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].ends_with("\"commit\":false}"));
        assert!(lines[1].ends_with("\"commit\":true}"));

        let replay = read_transactions(text.as_bytes()).unwrap();
        assert_eq!(replay.transactions, vec![entries.clone()]);

        // drop the commit line: nothing survives
        let cut = format!("{}\n", lines[0]);
        assert!(read_transactions(cut.as_bytes())
            .unwrap()
            .transactions
            .is_empty());
    }

    #[test]
    fn abandoned_transaction_is_discarded_when_next_starts() {
        let a = encode_transaction(
            1,
            &[
                JournalEntry::Blacklist {
                    user_id: "a".into(),
                    blacklist_until: 1,
                },
                JournalEntry::Blacklist {
                    user_id: "a".into(),
                    blacklist_until: 2,
                },
            ],
        );
        let first_line = a.lines().next().unwrap();
        let b = encode_transaction(
            2,
            &[JournalEntry::Blacklist {
                user_id: "b".into(),
                blacklist_until: 3,
            }],
        );
        let text = format!("{first_line}\n{b}");
        let replay = read_transactions(text.as_bytes()).unwrap();
        assert_eq!(replay.transactions.len(), 1);
        assert_eq!(replay.last_txn, 2);
    }

    #[test]
    fn corrupt_line_reports_its_number() {
        let mut text =
            encode_transaction(1, &[JournalEntry::User(UserRecord::new("u1", 0).unwrap())]);
        text.push_str("{\"kind\":\"user\",\"user_id\":\"u2\",\"trust_de");
        match read_transactions(text.as_bytes()) {
            Err(StoreError::CorruptJournal { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corrupt journal error, got {other:?}"),
        }
    }
}
