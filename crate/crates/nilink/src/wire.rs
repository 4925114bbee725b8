//! JSON shapes shared by the HTTP API and the session event log.

use nilink_core::annotate::{
    Adjudication, AnnotationRecord, CandidateCard, Choice, ConsensusState, Dispute, Event,
    Progress, Task,
};
use nilink_core::{EntityId, NilPattern};
use serde::{Deserialize, Serialize};

use crate::formats::NIL_LITERAL;

pub fn choice_from_str(s: &str) -> Choice {
    if s == NIL_LITERAL {
        Choice::Nil
    } else {
        Choice::Entity(EntityId::new(s))
    }
}

fn pattern_from_str(p: &Option<String>) -> Result<Option<NilPattern>, String> {
    match p {
        None => Ok(None),
        Some(s) => NilPattern::parse(s)
            .map(Some)
            .ok_or_else(|| format!("unknown nil_pattern {s:?}")),
    }
}

fn pattern_to_string(p: Option<NilPattern>) -> Option<String> {
    p.map(|p| p.as_str().to_string())
}

/// `POST /annotation` body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationBody {
    pub entry_id: u64,
    pub annotator_id: String,
    /// Candidate entity id or `"NIL"`.
    pub choice: String,
    #[serde(default)]
    pub nil_pattern: Option<String>,
}

impl AnnotationBody {
    pub fn into_record(self, timestamp: u64) -> Result<AnnotationRecord, String> {
        Ok(AnnotationRecord {
            entry_id: self.entry_id,
            nil_pattern: pattern_from_str(&self.nil_pattern)?,
            choice: choice_from_str(&self.choice),
            annotator_id: self.annotator_id,
            timestamp,
        })
    }
}

/// `POST /adjudication` body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjudicationBody {
    pub entry_id: u64,
    pub expert_id: String,
    pub choice: String,
    #[serde(default)]
    pub nil_pattern: Option<String>,
}

impl AdjudicationBody {
    pub fn into_decision(self, timestamp: u64) -> Result<Adjudication, String> {
        Ok(Adjudication {
            entry_id: self.entry_id,
            nil_pattern: pattern_from_str(&self.nil_pattern)?,
            choice: choice_from_str(&self.choice),
            expert_id: self.expert_id,
            timestamp,
        })
    }
}

/// One line of a session event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    /// `annotation` or `adjudication`.
    pub kind: String,
    pub entry_id: u64,
    pub actor: String,
    pub choice: String,
    pub nil_pattern: Option<String>,
    pub timestamp: u64,
}

impl From<&Event> for EventRecord {
    fn from(e: &Event) -> Self {
        match e {
            Event::Annotation(r) => EventRecord {
                kind: "annotation".into(),
                entry_id: r.entry_id,
                actor: r.annotator_id.clone(),
                choice: r.choice.label().to_string(),
                nil_pattern: pattern_to_string(r.nil_pattern),
                timestamp: r.timestamp,
            },
            Event::Adjudication(a) => EventRecord {
                kind: "adjudication".into(),
                entry_id: a.entry_id,
                actor: a.expert_id.clone(),
                choice: a.choice.label().to_string(),
                nil_pattern: pattern_to_string(a.nil_pattern),
                timestamp: a.timestamp,
            },
        }
    }
}

impl EventRecord {
    pub fn into_event(self) -> Result<Event, String> {
        let nil_pattern = pattern_from_str(&self.nil_pattern)?;
        let choice = choice_from_str(&self.choice);
        match self.kind.as_str() {
            "annotation" => Ok(Event::Annotation(AnnotationRecord {
                entry_id: self.entry_id,
                annotator_id: self.actor,
                choice,
                nil_pattern,
                timestamp: self.timestamp,
            })),
            "adjudication" => Ok(Event::Adjudication(Adjudication {
                entry_id: self.entry_id,
                expert_id: self.actor,
                choice,
                nil_pattern,
                timestamp: self.timestamp,
            })),
            k => Err(format!("unknown event kind {k:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateView {
    pub id: String,
    pub title: String,
    pub description: String,
    pub url: String,
}

impl From<&CandidateCard> for CandidateView {
    fn from(c: &CandidateCard) -> Self {
        CandidateView {
            id: c.id.to_string(),
            title: c.title.clone(),
            description: c.description.clone(),
            url: c.url.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub entry_id: u64,
    pub left: String,
    pub mention: String,
    pub right: String,
    pub candidates: Vec<CandidateView>,
}

impl From<&Task> for TaskView {
    fn from(t: &Task) -> Self {
        TaskView {
            entry_id: t.entry_id,
            left: t.left.clone(),
            mention: t.mention.clone(),
            right: t.right.clone(),
            candidates: t.candidates.iter().map(CandidateView::from).collect(),
        }
    }
}

/// `GET /next` response; `task` is absent once the annotator is done.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextView {
    pub done: bool,
    pub task: Option<TaskView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusView {
    pub entry_id: u64,
    /// `Pending`, `Agreed`, `Disputed` or `Adjudicated`.
    pub status: String,
    pub answer: Option<String>,
}

impl From<&ConsensusState> for ConsensusView {
    fn from(c: &ConsensusState) -> Self {
        ConsensusView {
            entry_id: c.entry_id,
            status: c.status.name().to_string(),
            answer: c.status.answer().map(|a| a.label().to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressView {
    pub pending: usize,
    pub agreed: usize,
    pub disputed: usize,
    pub adjudicated: usize,
}

impl From<Progress> for ProgressView {
    fn from(p: Progress) -> Self {
        ProgressView {
            pending: p.pending,
            agreed: p.agreed,
            disputed: p.disputed,
            adjudicated: p.adjudicated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteView {
    pub annotator_id: String,
    pub choice: String,
    pub nil_pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisputeView {
    pub entry_id: u64,
    pub task: TaskView,
    pub votes: Vec<VoteView>,
}

impl DisputeView {
    pub fn new(d: &Dispute, task: &Task) -> Self {
        DisputeView {
            entry_id: d.entry_id,
            task: task.into(),
            votes: d
                .records
                .iter()
                .map(|r| VoteView {
                    annotator_id: r.annotator_id.clone(),
                    choice: r.choice.label().to_string(),
                    nil_pattern: pattern_to_string(r.nil_pattern),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementView {
    pub agreement_rate: f64,
    pub entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorView {
    pub error: String,
}
