//! Accuracy metrics and ablation runners.
//!
//! Accuracies are percentages. NAC is the share of gold-NIL entries predicted
//! NIL, Non-NAC the share of gold-entity entries predicted exactly, OAC the
//! share of all entries predicted exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::dataset::Entry;
use crate::error::{Error, Result};
use crate::kb::{Answer, KnowledgeBase, NilPattern};
use crate::model::render::{render_context, render_entity};
use crate::model::{link_entry, train, Encoder, LinkerConfig, LinkerModel};
use crate::rng::{round_half_away, stage_rng};
use crate::typesys::{type_vector, TypeAssignment, TypeSystem};

/// Knowledge base and type system shared by training and evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Knowledge<'a> {
    pub kb: &'a KnowledgeBase,
    pub system: &'a TypeSystem,
    pub assignment: &'a TypeAssignment,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.correct += ok as usize;
    }

    /// Percentage correct, `None` when empty.
    pub fn percent(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_nil_gold: usize,
    pub n_nonnil_gold: usize,
    /// `None` when the split has no gold-NIL entries.
    pub nac: Option<f64>,
    /// `None` when the split has no gold-entity entries.
    pub non_nac: Option<f64>,
    pub oac: f64,
    pub per_pattern: BTreeMap<NilPattern, Tally>,
    pub context_type_accuracy: Option<f64>,
    pub candidate_type_accuracy: Option<f64>,
}

/// Metrics for `predictions[i]` against `entries[i].answer`.
pub fn accuracy_report(entries: &[Entry], predictions: &[Answer]) -> Result<EvalReport> {
    if entries.is_empty() {
        return Err(Error::EmptySplit);
    }
    if entries.len() != predictions.len() {
        return Err(Error::Shape(format!(
            "{} entries but {} predictions",
            entries.len(),
            predictions.len()
        )));
    }
    let mut nil = Tally::default();
    let mut nonnil = Tally::default();
    let mut per_pattern = BTreeMap::new();
    for (entry, pred) in entries.iter().zip(predictions) {
        match &entry.answer {
            Answer::Nil => {
                let ok = pred.is_nil();
                nil.add(ok);
                if let Some(p) = entry.nil_pattern {
                    per_pattern.entry(p).or_insert_with(Tally::default).add(ok);
                }
            }
            Answer::Entity(gold) => nonnil.add(pred.entity() == Some(gold)),
            Answer::Unannotated => return Err(Error::Unannotated(entry.id)),
        }
    }
    let overall = Tally {
        correct: nil.correct + nonnil.correct,
        total: nil.total + nonnil.total,
    };
    Ok(EvalReport {
        n_nil_gold: nil.total,
        n_nonnil_gold: nonnil.total,
        nac: nil.percent(),
        non_nac: nonnil.percent(),
        oac: overall.percent().unwrap_or(0.0),
        per_pattern,
        context_type_accuracy: None,
        candidate_type_accuracy: None,
    })
}

fn thresholded_match(pred: &[f64], gold: &[f64]) -> bool {
    pred.len() == gold.len()
        && pred
            .iter()
            .zip(gold)
            .all(|(p, g)| (*p >= 0.5) == (*g >= 0.5))
}

/// Links every entry and scores the result. Type accuracy is exact match of
/// the thresholded type vectors: context types over gold-entity entries
/// (scored on the gold pair), candidate types over every candidate pair.
pub fn evaluate_split(
    model: &LinkerModel,
    entries: &[Entry],
    knowledge: Knowledge<'_>,
    config: &LinkerConfig,
) -> Result<EvalReport> {
    if entries.is_empty() {
        return Err(Error::EmptySplit);
    }
    let predictions: Vec<Answer> = entries
        .iter()
        .map(|e| link_entry(model, e, knowledge.kb, config).answer)
        .collect();
    let mut report = accuracy_report(entries, &predictions)?;
    if model.n_types() == 0 {
        return Ok(report);
    }

    let enc = model.encoder();
    let mut ctx_tally = Tally::default();
    let mut cand_tally = Tally::default();
    for entry in entries {
        let ctx = enc.ids(&render_context(&entry.context));
        for cand in &entry.candidates {
            let ent = enc.ids(&render_entity(&knowledge.kb.get_or_bare(cand)));
            let scores = model.score_ids(&ctx, &ent);
            let gold_e = type_vector(cand, knowledge.system, knowledge.assignment);
            cand_tally.add(thresholded_match(&scores.entity_types, &gold_e));
            if entry.answer.entity() == Some(cand) {
                ctx_tally.add(thresholded_match(&scores.context_types, &gold_e));
            }
        }
    }
    report.context_type_accuracy = ctx_tally.percent();
    report.candidate_type_accuracy = cand_tally.percent();
    Ok(report)
}

/// Which NIL training entries an ablation subsamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilFilter {
    AllNil,
    NonEntityPhraseOnly,
}

impl NilFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            NilFilter::AllNil => "all-nil",
            NilFilter::NonEntityPhraseOnly => "non-entity-phrase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all-nil" => Some(NilFilter::AllNil),
            "non-entity-phrase" => Some(NilFilter::NonEntityPhraseOnly),
            _ => None,
        }
    }

    fn matches(self, entry: &Entry) -> bool {
        entry.answer.is_nil()
            && match self {
                NilFilter::AllNil => true,
                NilFilter::NonEntityPhraseOnly => {
                    entry.nil_pattern == Some(NilPattern::NonEntityPhrase)
                }
            }
    }
}

/// Keeps `round(fraction × matching)` of the matching NIL entries, chosen by
/// seed, and every other entry. Order is preserved.
pub fn subsample_nil(
    train: &[Entry],
    fraction: f64,
    filter: NilFilter,
    seed: u64,
) -> Result<Vec<Entry>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidRate(fraction));
    }
    let mut matching: Vec<usize> = (0..train.len())
        .filter(|&i| filter.matches(&train[i]))
        .collect();
    let keep = round_half_away(fraction * matching.len() as f64) as usize;
    matching.shuffle(&mut stage_rng(seed, "ablate"));
    let mut dropped = alloc::vec![false; train.len()];
    for &i in &matching[keep..] {
        dropped[i] = true;
    }
    Ok(train
        .iter()
        .zip(dropped)
        .filter(|(_, d)| !d)
        .map(|(e, _)| e.clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AblationPoint {
    pub fraction: f64,
    pub nac: Option<f64>,
    pub non_nac: Option<f64>,
    pub oac: f64,
}

/// Retrains from scratch on each subsampled training set and evaluates on
/// `test`.
pub fn ablate_nil_fraction(
    train_set: &[Entry],
    test: &[Entry],
    fractions: &[f64],
    filter: NilFilter,
    knowledge: Knowledge<'_>,
    config: &LinkerConfig,
) -> Result<Vec<AblationPoint>> {
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidRate(*f));
    }
    let mut curve = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let subset = subsample_nil(train_set, fraction, filter, config.rng_seed)?;
        let trained = train(
            &subset,
            knowledge.kb,
            knowledge.system,
            knowledge.assignment,
            config,
        )?;
        let report = evaluate_split(&trained.model, test, knowledge, config)?;
        curve.push(AblationPoint {
            fraction,
            nac: report.nac,
            non_nac: report.non_nac,
            oac: report.oac,
        });
    }
    Ok(curve)
}

/// Typing ablation in the layout of a `Ctxt Type Acc. | Cand Type Acc. |
/// OAC w/ Typing | OAC w/o Typing` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypingAblation {
    pub context_type_accuracy: Option<f64>,
    pub candidate_type_accuracy: Option<f64>,
    pub oac_with_typing: f64,
    pub oac_without_typing: f64,
}

impl TypingAblation {
    pub fn delta(&self) -> f64 {
        self.oac_with_typing - self.oac_without_typing
    }
}

/// Compares two models at `λ = 1`, so only the semantic score decides.
pub fn ablate_typing(
    with_typing: &LinkerModel,
    without_typing: &LinkerModel,
    test: &[Entry],
    knowledge: Knowledge<'_>,
    config: &LinkerConfig,
) -> Result<TypingAblation> {
    let mut semantic_only = *config;
    semantic_only.lambda = 1.0;
    let with = evaluate_split(with_typing, test, knowledge, &semantic_only)?;
    let without = evaluate_split(without_typing, test, knowledge, &semantic_only)?;
    Ok(TypingAblation {
        context_type_accuracy: with.context_type_accuracy,
        candidate_type_accuracy: with.candidate_type_accuracy,
        oac_with_typing: with.oac,
        oac_without_typing: without.oac,
    })
}

/// Trains one model with and one without the typing loss from the same seed,
/// then runs [`ablate_typing`].
pub fn run_typing_ablation(
    train_set: &[Entry],
    test: &[Entry],
    knowledge: Knowledge<'_>,
    config: &LinkerConfig,
) -> Result<TypingAblation> {
    let mut with_cfg = *config;
    with_cfg.typing = true;
    let mut without_cfg = *config;
    without_cfg.typing = false;
    let with = train(
        train_set,
        knowledge.kb,
        knowledge.system,
        knowledge.assignment,
        &with_cfg,
    )?;
    let without = train(
        train_set,
        knowledge.kb,
        knowledge.system,
        knowledge.assignment,
        &without_cfg,
    )?;
    ablate_typing(&with.model, &without.model, test, knowledge, config)
}
