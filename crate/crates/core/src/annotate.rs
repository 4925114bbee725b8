//! Three-annotator labelling with expert adjudication.
//!
//! A [`Session`] owns the entries under annotation and every submitted
//! record. All mutations go through [`Session::apply`], so replaying a stored
//! event log reproduces the in-memory state exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::detokenize;
use crate::dataset::Entry;
use crate::error::{Error, Result};
use crate::kb::{Answer, EntityId, EntryId, KnowledgeBase, NilPattern};

pub const ANNOTATORS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    Entity(EntityId),
    Nil,
}

impl Choice {
    pub fn to_answer(&self) -> Answer {
        match self {
            Choice::Entity(e) => Answer::Entity(e.clone()),
            Choice::Nil => Answer::Nil,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Choice::Entity(e) => e.as_str(),
            Choice::Nil => "NIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub entry_id: EntryId,
    pub annotator_id: String,
    pub choice: Choice,
    /// Required for NIL choices, ignored otherwise.
    pub nil_pattern: Option<NilPattern>,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjudication {
    pub entry_id: EntryId,
    pub expert_id: String,
    pub choice: Choice,
    pub nil_pattern: Option<NilPattern>,
    pub timestamp: u64,
}

/// One committed mutation of a session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Annotation(AnnotationRecord),
    Adjudication(Adjudication),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsensusStatus {
    Pending,
    Agreed(Choice),
    Disputed,
    Adjudicated(Choice),
}

impl ConsensusStatus {
    pub fn name(&self) -> &'static str {
        match self {
            ConsensusStatus::Pending => "Pending",
            ConsensusStatus::Agreed(_) => "Agreed",
            ConsensusStatus::Disputed => "Disputed",
            ConsensusStatus::Adjudicated(_) => "Adjudicated",
        }
    }

    pub fn answer(&self) -> Option<&Choice> {
        match self {
            ConsensusStatus::Agreed(c) | ConsensusStatus::Adjudicated(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusState {
    pub entry_id: EntryId,
    pub status: ConsensusStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateCard {
    pub id: EntityId,
    pub title: String,
    pub description: String,
    pub url: String,
}

/// What an annotator sees for one entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub entry_id: EntryId,
    pub left: String,
    pub mention: String,
    pub right: String,
    pub candidates: Vec<CandidateCard>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Progress {
    pub pending: usize,
    pub agreed: usize,
    pub disputed: usize,
    pub adjudicated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispute {
    pub entry_id: EntryId,
    pub records: Vec<AnnotationRecord>,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    annotators: [String; ANNOTATORS],
    expert: String,
    entries: BTreeMap<EntryId, Entry>,
    kb: KnowledgeBase,
    records: BTreeMap<(EntryId, usize), AnnotationRecord>,
    adjudications: BTreeMap<EntryId, Adjudication>,
}

/// Starts a session in which every entry is assigned to all three annotators.
pub fn create_session(
    id: &str,
    entries: Vec<Entry>,
    annotators: &[String],
    expert: &str,
    kb: KnowledgeBase,
) -> Result<Session> {
    let annotators: [String; ANNOTATORS] =
        annotators.to_vec().try_into().map_err(|v: Vec<String>| {
            Error::InvalidAnnotators(format!("got {} annotators", v.len()))
        })?;
    let mut seen: Vec<&str> = annotators.iter().map(String::as_str).collect();
    seen.push(expert);
    if seen.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidAnnotators("empty id".to_string()));
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidAnnotators(format!(
            "duplicate id in {seen:?}"
        )));
    }
    let mut by_id = BTreeMap::new();
    for e in entries {
        let id = e.id;
        if by_id.insert(id, e).is_some() {
            return Err(Error::InvalidAnnotators(format!("duplicate entry id {id}")));
        }
    }
    Ok(Session {
        id: id.to_string(),
        annotators,
        expert: expert.to_string(),
        entries: by_id,
        kb,
        records: BTreeMap::new(),
        adjudications: BTreeMap::new(),
    })
}

impl Session {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn annotators(&self) -> &[String; ANNOTATORS] {
        &self.annotators
    }

    pub fn expert(&self) -> &str {
        &self.expert
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.entries.values()
    }

    pub fn entry(&self, id: EntryId) -> Option<&Entry> {
        self.entries.get(&id)
    }

    pub fn records(&self) -> impl Iterator<Item = &AnnotationRecord> {
        self.records.values()
    }

    pub fn adjudications(&self) -> impl Iterator<Item = &Adjudication> {
        self.adjudications.values()
    }

    /// Every committed event, annotations first, in a stable order. Replaying
    /// them on a fresh session reproduces this one.
    pub fn events(&self) -> Vec<Event> {
        self.records
            .values()
            .cloned()
            .map(Event::Annotation)
            .chain(
                self.adjudications
                    .values()
                    .cloned()
                    .map(Event::Adjudication),
            )
            .collect()
    }

    /// Tasks not yet labelled by anyone, counted per (entry, annotator).
    pub fn pending_tasks(&self) -> usize {
        self.entries.len() * ANNOTATORS - self.records.len()
    }

    fn annotator_slot(&self, annotator: &str) -> Result<usize> {
        self.annotators
            .iter()
            .position(|a| a == annotator)
            .ok_or_else(|| Error::UnknownAnnotator(annotator.to_string()))
    }

    fn task_for(&self, entry: &Entry) -> Task {
        Task {
            entry_id: entry.id,
            left: detokenize(&entry.context.left),
            mention: detokenize(&entry.context.mention),
            right: detokenize(&entry.context.right),
            candidates: entry
                .candidates
                .iter()
                .map(|c| {
                    let ent = self.kb.get_or_bare(c);
                    CandidateCard {
                        id: ent.id,
                        title: ent.title,
                        description: ent.description,
                        url: ent.url,
                    }
                })
                .collect(),
        }
    }

    /// Lowest-id entry the annotator has not labelled yet, or `None` when done.
    pub fn next_task(&self, annotator: &str) -> Result<Option<Task>> {
        let slot = self.annotator_slot(annotator)?;
        Ok(self
            .entries
            .values()
            .find(|e| !self.records.contains_key(&(e.id, slot)))
            .map(|e| self.task_for(e)))
    }

    pub fn task(&self, entry_id: EntryId) -> Result<Task> {
        self.entries
            .get(&entry_id)
            .map(|e| self.task_for(e))
            .ok_or(Error::UnknownEntry(entry_id))
    }

    fn validate_choice(
        &self,
        entry_id: EntryId,
        choice: &Choice,
        pattern: Option<NilPattern>,
    ) -> Result<()> {
        let entry = self
            .entries
            .get(&entry_id)
            .ok_or(Error::UnknownEntry(entry_id))?;
        match choice {
            Choice::Entity(e) if !entry.candidates.contains(e) => Err(Error::InvalidChoice {
                entry: entry_id,
                choice: e.0.clone(),
            }),
            Choice::Nil if pattern.is_none() => Err(Error::MissingNilPattern(entry_id)),
            _ => Ok(()),
        }
    }

    /// Stores a label (the latest submission per annotator and entry wins)
    /// and returns the entry's updated consensus. Adjudicated entries are
    /// closed.
    pub fn submit(&mut self, mut record: AnnotationRecord) -> Result<ConsensusState> {
        let slot = self.annotator_slot(&record.annotator_id)?;
        self.validate_choice(record.entry_id, &record.choice, record.nil_pattern)?;
        if self.adjudications.contains_key(&record.entry_id) {
            return Err(Error::AlreadyAdjudicated(record.entry_id));
        }
        if record.choice != Choice::Nil {
            record.nil_pattern = None;
        }
        let entry_id = record.entry_id;
        self.records.insert((entry_id, slot), record);
        self.consensus(entry_id)
    }

    /// Expert decision on a disputed entry. The decision is written back to
    /// the entry's answer.
    pub fn adjudicate(&mut self, mut decision: Adjudication) -> Result<ConsensusState> {
        if decision.expert_id != self.expert {
            return Err(Error::NotExpert(decision.expert_id));
        }
        let entry_id = decision.entry_id;
        let status = self.consensus(entry_id)?.status;
        if status != ConsensusStatus::Disputed {
            return Err(Error::NotDisputed {
                entry: entry_id,
                status: status.name(),
            });
        }
        self.validate_choice(entry_id, &decision.choice, decision.nil_pattern)?;
        if decision.choice != Choice::Nil {
            decision.nil_pattern = None;
        }
        let entry = self.entries.get_mut(&entry_id).expect("validated above");
        entry.answer = decision.choice.to_answer();
        entry.nil_pattern = decision.nil_pattern;
        self.adjudications.insert(entry_id, decision);
        self.consensus(entry_id)
    }

    pub fn apply(&mut self, event: Event) -> Result<ConsensusState> {
        match event {
            Event::Annotation(r) => self.submit(r),
            Event::Adjudication(a) => self.adjudicate(a),
        }
    }

    fn entry_records(&self, entry_id: EntryId) -> impl Iterator<Item = &AnnotationRecord> {
        (0..ANNOTATORS).filter_map(move |slot| self.records.get(&(entry_id, slot)))
    }

    pub fn consensus(&self, entry_id: EntryId) -> Result<ConsensusState> {
        if !self.entries.contains_key(&entry_id) {
            return Err(Error::UnknownEntry(entry_id));
        }
        let status = if let Some(adj) = self.adjudications.get(&entry_id) {
            ConsensusStatus::Adjudicated(adj.choice.clone())
        } else {
            let choices: Vec<&Choice> = self.entry_records(entry_id).map(|r| &r.choice).collect();
            if choices.len() < ANNOTATORS {
                ConsensusStatus::Pending
            } else if choices.iter().all(|c| *c == choices[0]) {
                ConsensusStatus::Agreed(choices[0].clone())
            } else {
                ConsensusStatus::Disputed
            }
        };
        Ok(ConsensusState { entry_id, status })
    }

    pub fn progress(&self) -> Progress {
        let mut p = Progress::default();
        for id in self.entries.keys() {
            match self.consensus(*id).expect("known entry").status {
                ConsensusStatus::Pending => p.pending += 1,
                ConsensusStatus::Agreed(_) => p.agreed += 1,
                ConsensusStatus::Disputed => p.disputed += 1,
                ConsensusStatus::Adjudicated(_) => p.adjudicated += 1,
            }
        }
        p
    }

    pub fn disputes(&self) -> Vec<Dispute> {
        self.entries
            .keys()
            .filter(|id| self.consensus(**id).map(|s| s.status) == Ok(ConsensusStatus::Disputed))
            .map(|id| Dispute {
                entry_id: *id,
                records: self.entry_records(*id).cloned().collect(),
            })
            .collect()
    }

    /// Fraction of entries on which all three annotators chose the same
    /// answer. Adjudication does not affect it. An empty session scores 1.
    pub fn agreement_rate(&self) -> Result<f64> {
        let missing = self.pending_tasks();
        if missing > 0 {
            return Err(Error::IncompleteSession {
                missing,
                entries: self.entries.len(),
            });
        }
        if self.entries.is_empty() {
            return Ok(1.0);
        }
        let unanimous = self
            .entries
            .keys()
            .filter(|id| {
                let mut choices = self.entry_records(**id).map(|r| &r.choice);
                let first = choices.next();
                choices.all(|c| Some(c) == first)
            })
            .count();
        Ok(unanimous as f64 / self.entries.len() as f64)
    }

    /// Final entry for an agreed or adjudicated entry; `None` while pending or
    /// disputed. A unanimous NIL takes the majority NIL pattern.
    pub fn finalize(&self, entry_id: EntryId) -> Result<Option<Entry>> {
        let status = self.consensus(entry_id)?.status;
        let mut entry = self.entries[&entry_id].clone();
        match status {
            ConsensusStatus::Agreed(choice) => {
                entry.answer = choice.to_answer();
                entry.nil_pattern = match choice {
                    Choice::Nil => {
                        majority_pattern(self.entry_records(entry_id).filter_map(|r| r.nil_pattern))
                    }
                    Choice::Entity(_) => None,
                };
                Ok(Some(entry))
            }
            ConsensusStatus::Adjudicated(_) => Ok(Some(entry)),
            _ => Ok(None),
        }
    }

    /// Every finalized entry in id order.
    pub fn export(&self) -> Vec<Entry> {
        self.entries
            .keys()
            .filter_map(|id| self.finalize(*id).ok().flatten())
            .collect()
    }
}

fn majority_pattern(patterns: impl Iterator<Item = NilPattern>) -> Option<NilPattern> {
    let mut counts: BTreeMap<NilPattern, usize> = BTreeMap::new();
    for p in patterns {
        *counts.entry(p).or_default() += 1;
    }
    // ties go to the first pattern in declaration order
    let mut best: Option<(NilPattern, usize)> = None;
    for (p, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((p, c));
        }
    }
    best.map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ContextWindow;
    use crate::kb::{Entity, Provenance};
    use alloc::vec;

    fn entry(id: EntryId) -> Entry {
        Entry {
            id,
            context: ContextWindow::from_text("EU rejects", "Peter Blackburn", "BRUSSELS"),
            candidates: vec![
                EntityId::from("e1"),
                EntityId::from("e2"),
                EntityId::from("e3"),
            ],
            answer: Answer::Unannotated,
            provenance: Provenance::PlainText,
            masked: false,
            nil_pattern: None,
            seed: None,
        }
    }

    fn names() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    fn session(n: u64) -> Session {
        let kb: KnowledgeBase = [Entity {
            id: EntityId::from("e1"),
            title: "Peter Blackburn (MP)".into(),
            description: "British Conservative Party politician".into(),
            url: "https://en.wikipedia.org/wiki/Peter_Blackburn_(MP)".into(),
        }]
        .into_iter()
        .collect();
        create_session("s", (0..n).map(entry).collect(), &names(), "x", kb).unwrap()
    }

    fn rec(entry_id: EntryId, who: &str, choice: Choice) -> AnnotationRecord {
        let nil_pattern = (choice == Choice::Nil).then_some(NilPattern::NonEntityPhrase);
        AnnotationRecord {
            entry_id,
            annotator_id: who.into(),
            choice,
            nil_pattern,
            timestamp: 0,
        }
    }

    fn ent(s: &str) -> Choice {
        Choice::Entity(EntityId::from(s))
    }

    #[test]
    fn session_setup() {
        let s = session(10);
        assert_eq!(s.pending_tasks(), 30);
        let empty = session(0);
        assert_eq!(empty.pending_tasks(), 0);
        assert_eq!(empty.next_task("a").unwrap(), None);
        assert!(create_session(
            "s",
            vec![],
            &["a".into(), "a".into(), "b".into()],
            "x",
            KnowledgeBase::new()
        )
        .is_err());
        assert!(create_session(
            "s",
            vec![],
            &["a".into(), "b".into()],
            "x",
            KnowledgeBase::new()
        )
        .is_err());
        assert!(create_session("s", vec![], &names(), "a", KnowledgeBase::new()).is_err());
    }

    #[test]
    fn tasks_in_id_order_with_cards() {
        let mut s = session(3);
        let t = s.next_task("a").unwrap().unwrap();
        assert_eq!(t.entry_id, 0);
        assert_eq!(t.mention, "Peter Blackburn");
        assert_eq!(t.candidates.len(), 3);
        assert_eq!(t.candidates[0].title, "Peter Blackburn (MP)");
        assert_eq!(
            t.candidates[0].description,
            "British Conservative Party politician"
        );
        for id in 0..3 {
            s.submit(rec(id, "a", ent("e1"))).unwrap();
        }
        assert_eq!(s.next_task("a").unwrap(), None);
        assert_eq!(s.next_task("b").unwrap().unwrap().entry_id, 0);
        assert!(matches!(
            s.next_task("zed"),
            Err(Error::UnknownAnnotator(_))
        ));
    }

    #[test]
    fn consensus_transitions() {
        let mut s = session(1);
        assert_eq!(
            s.submit(rec(0, "a", ent("e1"))).unwrap().status,
            ConsensusStatus::Pending
        );
        assert_eq!(
            s.submit(rec(0, "b", ent("e1"))).unwrap().status,
            ConsensusStatus::Pending
        );
        assert_eq!(
            s.submit(rec(0, "c", ent("e1"))).unwrap().status,
            ConsensusStatus::Agreed(ent("e1"))
        );
        // last write wins
        assert_eq!(
            s.submit(rec(0, "b", Choice::Nil)).unwrap().status,
            ConsensusStatus::Disputed
        );
    }

    #[test]
    fn validation_errors() {
        let mut s = session(1);
        assert!(matches!(
            s.submit(rec(0, "a", ent("zz"))),
            Err(Error::InvalidChoice { .. })
        ));
        let mut no_pattern = rec(0, "a", Choice::Nil);
        no_pattern.nil_pattern = None;
        assert_eq!(s.submit(no_pattern), Err(Error::MissingNilPattern(0)));
        assert!(matches!(
            s.submit(rec(9, "a", ent("e1"))),
            Err(Error::UnknownEntry(9))
        ));
        assert!(matches!(
            s.submit(rec(0, "q", ent("e1"))),
            Err(Error::UnknownAnnotator(_))
        ));
        assert_eq!(s.pending_tasks(), 3);
    }

    fn adj(entry_id: EntryId, who: &str, choice: Choice) -> Adjudication {
        let nil_pattern = (choice == Choice::Nil).then_some(NilPattern::MissingEntity);
        Adjudication {
            entry_id,
            expert_id: who.into(),
            choice,
            nil_pattern,
            timestamp: 1,
        }
    }

    #[test]
    fn adjudication_flow() {
        let mut s = session(2);
        for (w, c) in [("a", ent("e1")), ("b", Choice::Nil), ("c", ent("e1"))] {
            s.submit(rec(0, w, c)).unwrap();
        }
        for w in ["a", "b", "c"] {
            s.submit(rec(1, w, ent("e2"))).unwrap();
        }
        assert_eq!(s.disputes().len(), 1);
        assert_eq!(s.disputes()[0].records.len(), 3);
        assert!(matches!(
            s.adjudicate(adj(1, "x", Choice::Nil)),
            Err(Error::NotDisputed { .. })
        ));
        assert!(matches!(
            s.adjudicate(adj(0, "a", Choice::Nil)),
            Err(Error::NotExpert(_))
        ));
        assert!(matches!(
            s.adjudicate(adj(0, "x", ent("nope"))),
            Err(Error::InvalidChoice { .. })
        ));
        let state = s.adjudicate(adj(0, "x", Choice::Nil)).unwrap();
        assert_eq!(state.status, ConsensusStatus::Adjudicated(Choice::Nil));
        assert_eq!(s.entry(0).unwrap().answer, Answer::Nil);
        assert!(matches!(
            s.adjudicate(adj(0, "x", Choice::Nil)),
            Err(Error::NotDisputed { .. })
        ));
        assert!(matches!(
            s.submit(rec(0, "a", Choice::Nil)),
            Err(Error::AlreadyAdjudicated(0))
        ));

        let exported = s.export();
        assert_eq!(exported.len(), 2);
        assert_eq!(exported[0].answer, Answer::Nil);
        assert_eq!(exported[0].nil_pattern, Some(NilPattern::MissingEntity));
        assert_eq!(exported[1].answer, Answer::Entity(EntityId::from("e2")));
        assert_eq!(
            s.progress(),
            Progress {
                pending: 0,
                agreed: 1,
                disputed: 0,
                adjudicated: 1
            }
        );
    }

    #[test]
    fn agreement_rate_counts_unanimous_entries() {
        let mut s = session(10);
        for id in 0..10 {
            for w in ["a", "b", "c"] {
                let c = if id == 3 && w == "b" {
                    Choice::Nil
                } else {
                    ent("e1")
                };
                s.submit(rec(id, w, c)).unwrap();
            }
        }
        assert!((s.agreement_rate().unwrap() - 0.9).abs() < 1e-12);
        s.adjudicate(adj(3, "x", ent("e1"))).unwrap();
        assert!((s.agreement_rate().unwrap() - 0.9).abs() < 1e-12);
        let fresh = session(2);
        assert_eq!(
            fresh.agreement_rate(),
            Err(Error::IncompleteSession {
                missing: 6,
                entries: 2
            })
        );
    }

    #[test]
    fn replay_reproduces_state() {
        let mut s = session(3);
        s.submit(rec(0, "a", ent("e1"))).unwrap();
        s.submit(rec(0, "b", ent("e2"))).unwrap();
        s.submit(rec(0, "c", ent("e1"))).unwrap();
        s.submit(rec(1, "a", Choice::Nil)).unwrap();
        s.adjudicate(adj(0, "x", ent("e2"))).unwrap();
        let mut replay = session(3);
        for ev in s.events() {
            replay.apply(ev).unwrap();
        }
        assert_eq!(replay.events(), s.events());
        assert_eq!(replay.export(), s.export());
        assert_eq!(replay.progress(), s.progress());
    }
}
