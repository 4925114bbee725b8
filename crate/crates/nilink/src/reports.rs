//! Tab-separated report tables. Accuracies print with two decimals; an
//! undefined accuracy (empty denominator) prints as `-`.

use nilink_core::dataset::DatasetStats;
use nilink_core::eval::{AblationPoint, EvalReport, TypingAblation};
use nilink_core::model::EpochLog;
use nilink_core::NilPattern;

pub fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

pub fn training_log(log: &[EpochLog]) -> String {
    log.iter()
        .map(|e| {
            format!(
                "{}\t{:.6}\t{:.6}\t{:.6}\n",
                e.epoch, e.mean_loss, e.mean_semantic, e.mean_typing
            )
        })
        .collect()
}

/// `Model | Non-NAC | NAC | OAC` row.
pub fn accuracy_table(name: &str, r: &EvalReport) -> String {
    format!(
        "Model\tNon-NAC\tNAC\tOAC\n{name}\t{}\t{}\t{}\n",
        pct(r.non_nac),
        pct(r.nac),
        pct(Some(r.oac))
    )
}

/// Counts, per-pattern NIL accuracy and type accuracy for one evaluation.
pub fn eval_details(r: &EvalReport) -> String {
    let mut out = format!(
        "gold_nil\t{}\ngold_entity\t{}\n",
        r.n_nil_gold, r.n_nonnil_gold
    );
    for p in [NilPattern::MissingEntity, NilPattern::NonEntityPhrase] {
        let v = r.per_pattern.get(&p).and_then(|t| t.percent());
        out.push_str(&format!("nac_{}\t{}\n", p.as_str(), pct(v)));
    }
    out.push_str(&format!(
        "context_type_accuracy\t{}\n",
        pct(r.context_type_accuracy)
    ));
    out.push_str(&format!(
        "candidate_type_accuracy\t{}\n",
        pct(r.candidate_type_accuracy)
    ));
    out
}

/// `Model | Ctxt Type Acc. | Cand Type Acc. | OAC w/ Typing | OAC w/o Typing` row.
pub fn typing_table(name: &str, t: &TypingAblation) -> String {
    format!(
        "Model\tCtxt Type Acc.\tCand Type Acc.\tOAC w/ Typing\tOAC w/o Typing\n{name}\t{}\t{}\t{}\t{}\n",
        pct(t.context_type_accuracy),
        pct(t.candidate_type_accuracy),
        pct(Some(t.oac_with_typing)),
        pct(Some(t.oac_without_typing))
    )
}

pub fn ablation_curve(points: &[AblationPoint]) -> String {
    let mut out = String::from("fraction\tNAC\tOAC\n");
    for p in points {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            p.fraction,
            pct(p.nac),
            pct(Some(p.oac))
        ));
    }
    out
}

pub fn stats_table(s: &DatasetStats) -> String {
    format!(
        "entries\t{}\npositive\t{}\nnil\t{}\nunannotated\t{}\nnil_percentage\t{:.2}\n\
         missing_entity\t{}\nnon_entity_phrase\t{}\nmentions\t{}\nentities\t{}\navg_candidates\t{:.2}\n",
        s.entry_count,
        s.positive_count,
        s.nil_count,
        s.unannotated_count,
        s.nil_percentage,
        s.missing_entity_count,
        s.non_entity_phrase_count,
        s.mention_count,
        s.entity_count,
        s.avg_candidates
    )
}
