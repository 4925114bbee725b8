#![allow(dead_code)]

use nilink_core::annotate::{create_session, Session};
use nilink_core::corpus::ContextWindow;
use nilink_core::dataset::Entry;
use nilink_core::{Answer, Entity, EntityId, KnowledgeBase, Provenance};

pub fn entry(id: u64) -> Entry {
    Entry {
        id,
        context: ContextWindow::from_text("Shares of", "Apple", "rose on Monday ."),
        candidates: vec![EntityId::from("Apple Inc."), EntityId::from("Apple")],
        answer: Answer::Unannotated,
        provenance: Provenance::PlainText,
        masked: false,
        nil_pattern: None,
        seed: None,
    }
}

pub fn kb() -> KnowledgeBase {
    [
        Entity {
            id: EntityId::from("Apple Inc."),
            title: "Apple Inc.".into(),
            description: "American technology company".into(),
            url: "https://en.wikipedia.org/wiki/Apple_Inc.".into(),
        },
        Entity {
            id: EntityId::from("Apple"),
            title: "Apple".into(),
            description: "Fruit".into(),
            url: "https://en.wikipedia.org/wiki/Apple".into(),
        },
    ]
    .into_iter()
    .collect()
}

pub fn session(id: &str, n: u64) -> Session {
    let names = ["ann".to_string(), "bob".to_string(), "cat".to_string()];
    create_session(id, (0..n).map(entry).collect(), &names, "exp", kb()).unwrap()
}
