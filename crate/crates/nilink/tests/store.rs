mod common;

use std::fs::OpenOptions;
use std::io::Write;

use nilink::store::{load_session, SessionStore};
use nilink_core::annotate::{AnnotationRecord, Choice, ConsensusStatus, Event};
use nilink_core::EntityId;

fn vote(entry_id: u64, who: &str, choice: &str) -> Event {
    Event::Annotation(AnnotationRecord {
        entry_id,
        annotator_id: who.into(),
        choice: Choice::Entity(EntityId::from(choice)),
        nil_pattern: None,
        timestamp: 5,
    })
}

#[test]
fn commits_persist_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = SessionStore::open(dir.path()).unwrap();
    store.create(common::session("s", 2)).unwrap();
    assert!(store.create(common::session("s", 2)).is_err());
    for who in ["ann", "bob", "cat"] {
        store.commit("s", vote(0, who, "Apple")).unwrap().unwrap();
    }
    assert!(store.commit("missing", vote(0, "ann", "Apple")).is_none());
    assert!(store.commit("s", vote(0, "zed", "Apple")).unwrap().is_err());
    let before = store.get("s").unwrap().events();

    let reloaded = load_session(&dir.path().join("s")).unwrap();
    assert_eq!(reloaded.events(), before);
    assert_eq!(
        reloaded.consensus(0).unwrap().status,
        ConsensusStatus::Agreed(Choice::Entity(EntityId::from("Apple")))
    );
}

#[test]
fn torn_final_line_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = SessionStore::open(dir.path()).unwrap();
    store.create(common::session("s", 1)).unwrap();
    store.commit("s", vote(0, "ann", "Apple")).unwrap().unwrap();
    let mut log = OpenOptions::new()
        .append(true)
        .open(dir.path().join("s").join("events.jsonl"))
        .unwrap();
    log.write_all(b"{\"kind\":\"annotation\",\"entry_id\":0,\"ac")
        .unwrap();
    drop(log);
    let reopened = SessionStore::open(dir.path()).unwrap();
    assert_eq!(reopened.get("s").unwrap().events().len(), 1);
}

#[test]
fn compaction_keeps_state() {
    let dir = tempfile::tempdir().unwrap();
    let mut store = SessionStore::open(dir.path()).unwrap();
    store.create(common::session("s", 2)).unwrap();
    store.commit("s", vote(0, "ann", "Apple")).unwrap().unwrap();
    store
        .commit("s", vote(0, "ann", "Apple Inc."))
        .unwrap()
        .unwrap();
    store.commit("s", vote(1, "bob", "Apple")).unwrap().unwrap();
    let before = store.get("s").unwrap().events();
    store.close().unwrap();
    let reopened = SessionStore::open(dir.path()).unwrap();
    assert_eq!(reopened.get("s").unwrap().events(), before);
    assert_eq!(reopened.ids().collect::<Vec<_>>(), vec!["s"]);
}
