use alloc::vec::Vec;

use super::encoder::{Encoder, HashedMeanPool};
use super::render::{render_context, render_entity};
use crate::corpus::ContextWindow;
use crate::dataset::Entry;
use crate::error::{Error, Result};
use crate::kb::{Answer, Entity, EntryId, KnowledgeBase};
use crate::typesys::{type_vector, TypeAssignment, TypeSystem, OTHER};

/// One supervised context–candidate example.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub entry_id: EntryId,
    pub context: ContextWindow,
    pub entity: Entity,
    /// 1 for the gold candidate, 0 otherwise.
    pub label: f64,
    /// Multi-hot type line the context implies.
    pub context_types: Vec<f64>,
    /// Multi-hot type line of the candidate.
    pub entity_types: Vec<f64>,
}

/// A training pair reduced to hashed table rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPair {
    pub entry_id: EntryId,
    pub context: Vec<usize>,
    pub entity: Vec<usize>,
    pub label: f64,
    pub context_types: Vec<f64>,
    pub entity_types: Vec<f64>,
}

/// Expands entries into one pair per candidate.
///
/// The context type target is the gold entity's line. NIL entries use the
/// line of their seed entity (the removed gold entity for masked entries), or [`OTHER`] when there is none.
pub fn make_training_pairs(
    entries: &[Entry],
    kb: &KnowledgeBase,
    system: &TypeSystem,
    assignment: &TypeAssignment,
) -> Result<Vec<TrainingPair>> {
    let mut out = Vec::new();
    for entry in entries {
        let context_types = match &entry.answer {
            Answer::Entity(gold) => type_vector(gold, system, assignment),
            Answer::Nil => match &entry.seed {
                Some(seed) => type_vector(seed, system, assignment),
                None => system.line_vector(OTHER),
            },
            Answer::Unannotated => return Err(Error::Unannotated(entry.id)),
        };
        let gold = entry.answer.entity();
        for cand in &entry.candidates {
            out.push(TrainingPair {
                entry_id: entry.id,
                context: entry.context.clone(),
                entity: kb.get_or_bare(cand),
                label: if gold == Some(cand) { 1.0 } else { 0.0 },
                context_types: context_types.clone(),
                entity_types: type_vector(cand, system, assignment),
            });
        }
    }
    Ok(out)
}

pub fn encode_pair(pair: &TrainingPair, encoder: &HashedMeanPool) -> EncodedPair {
    EncodedPair {
        entry_id: pair.entry_id,
        context: encoder.ids(&render_context(&pair.context)),
        entity: encoder.ids(&render_entity(&pair.entity)),
        label: pair.label,
        context_types: pair.context_types.clone(),
        entity_types: pair.entity_types.clone(),
    }
}
