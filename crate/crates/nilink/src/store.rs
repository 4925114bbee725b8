//! On-disk annotation sessions.
//!
//! Each session lives in `<root>/<id>/`: `session.json` holds the session
//! definition (annotators, expert, entries, candidate entities) and
//! `events.jsonl` an append-only log of committed annotations and
//! adjudications. Every commit is flushed to disk before it is acknowledged,
//! and reopening replays the log. Compaction rewrites the log with only the
//! surviving events.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use nilink_core::annotate::{create_session, ConsensusState, Event, Session};
use nilink_core::{Entity, EntityId};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_text, write_atomic, EntryRecord};
use crate::wire::EventRecord;

const SNAPSHOT: &str = "session.json";
const EVENTS: &str = "events.jsonl";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityRecord {
    id: String,
    title: String,
    description: String,
    url: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionFile {
    id: String,
    annotators: Vec<String>,
    expert: String,
    entries: Vec<EntryRecord>,
    entities: Vec<EntityRecord>,
}

fn snapshot_json(session: &Session) -> String {
    let file = SessionFile {
        id: session.id().to_string(),
        annotators: session.annotators().to_vec(),
        expert: session.expert().to_string(),
        entries: session.entries().map(EntryRecord::from).collect(),
        entities: session
            .kb()
            .iter()
            .map(|e| EntityRecord {
                id: e.id.to_string(),
                title: e.title.clone(),
                description: e.description.clone(),
                url: e.url.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("session files serialize")
}

fn events_jsonl(events: &[Event]) -> String {
    events
        .iter()
        .map(|e| serde_json::to_string(&EventRecord::from(e)).expect("events serialize") + "\n")
        .collect()
}

/// Writes the definition and a compacted log for `session`.
pub fn save_session(dir: &Path, session: &Session) -> Result<()> {
    write_atomic(&dir.join(SNAPSHOT), snapshot_json(session).as_bytes())?;
    write_atomic(
        &dir.join(EVENTS),
        events_jsonl(&session.events()).as_bytes(),
    )
}

/// Rebuilds a session from its definition and replays its log. A torn final
/// line (an interrupted append) is ignored.
pub fn load_session(dir: &Path) -> Result<Session> {
    let snap_path = dir.join(SNAPSHOT);
    let file: SessionFile = serde_json::from_str(&read_text(&snap_path)?)
        .map_err(|e| Error::format(&snap_path, e.line(), e.to_string()))?;
    let entries = file
        .entries
        .into_iter()
        .map(EntryRecord::into_entry)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|m| Error::format(&snap_path, 0, m))?;
    let kb = file
        .entities
        .into_iter()
        .map(|e| Entity {
            id: EntityId::new(e.id),
            title: e.title,
            description: e.description,
            url: e.url,
        })
        .collect();
    let mut session = create_session(&file.id, entries, &file.annotators, &file.expert, kb)?;

    let log_path = dir.join(EVENTS);
    let text = match fs::read_to_string(&log_path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(Error::io(&log_path, e)),
    };
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: EventRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(_) if i + 1 == lines.len() && !text.ends_with('\n') => {
                log::warn!("{}: ignoring torn final line", log_path.display());
                break;
            }
            Err(e) => return Err(Error::format(&log_path, i + 1, e.to_string())),
        };
        let event = rec
            .into_event()
            .map_err(|m| Error::format(&log_path, i + 1, m))?;
        session.apply(event)?;
    }
    Ok(session)
}

struct Stored {
    session: Session,
    dir: PathBuf,
    log: File,
}

/// Open sessions under one root directory.
pub struct SessionStore {
    root: PathBuf,
    sessions: BTreeMap<String, Stored>,
}

fn open_log(dir: &Path) -> Result<File> {
    let path = dir.join(EVENTS);
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| Error::io(path, e))
}

impl SessionStore {
    /// Opens every session directory under `root`, creating `root` if needed.
    pub fn open(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let mut sessions = BTreeMap::new();
        let mut dirs: Vec<PathBuf> = fs::read_dir(root)
            .map_err(|e| Error::io(root, e))?
            .filter_map(|d| d.ok().map(|d| d.path()))
            .filter(|p| p.join(SNAPSHOT).is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let session = load_session(&dir)?;
            let log = open_log(&dir)?;
            log::info!(
                "opened session {} ({} entries)",
                session.id(),
                session.entries().count()
            );
            sessions.insert(session.id().to_string(), Stored { session, dir, log });
        }
        Ok(Self {
            root: root.to_path_buf(),
            sessions,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Persists a new session. Fails if the id is taken.
    pub fn create(&mut self, session: Session) -> Result<()> {
        let id = session.id().to_string();
        if id.is_empty() || id.contains(['/', '\\']) || id.starts_with('.') {
            return Err(Error::Invalid(format!("invalid session id {id:?}")));
        }
        let dir = self.root.join(&id);
        if self.sessions.contains_key(&id) || dir.exists() {
            return Err(Error::Invalid(format!("session {id} already exists")));
        }
        save_session(&dir, &session)?;
        let log = open_log(&dir)?;
        self.sessions.insert(id, Stored { session, dir, log });
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id).map(|s| &s.session)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.sessions.keys().map(String::as_str)
    }

    /// Applies `event` and appends it to the log. On a write failure the
    /// session is reloaded from disk so memory never runs ahead of the log.
    /// Returns `None` for an unknown session.
    pub fn commit(&mut self, id: &str, event: Event) -> Option<Result<ConsensusState>> {
        let stored = self.sessions.get_mut(id)?;
        let state = match stored.session.apply(event.clone()) {
            Ok(s) => s,
            Err(e) => return Some(Err(e.into())),
        };
        let line =
            serde_json::to_string(&EventRecord::from(&event)).expect("events serialize") + "\n";
        let written = stored
            .log
            .write_all(line.as_bytes())
            .and_then(|_| stored.log.sync_data());
        if let Err(e) = written {
            let path = stored.dir.join(EVENTS);
            if let Ok(s) = load_session(&stored.dir) {
                stored.session = s;
            }
            return Some(Err(Error::io(path, e)));
        }
        Some(Ok(state))
    }

    pub fn compact(&mut self, id: &str) -> Result<()> {
        let Some(stored) = self.sessions.get_mut(id) else {
            return Err(Error::Invalid(format!("unknown session {id}")));
        };
        let path = stored.dir.join(EVENTS);
        write_atomic(&path, events_jsonl(&stored.session.events()).as_bytes())?;
        stored.log = open_log(&stored.dir)?;
        Ok(())
    }

    /// Compacts every session; called on shutdown.
    pub fn close(mut self) -> Result<()> {
        let ids: Vec<String> = self.sessions.keys().cloned().collect();
        for id in ids {
            self.compact(&id)?;
        }
        Ok(())
    }
}
