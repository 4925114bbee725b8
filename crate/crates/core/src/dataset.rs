//! Seed selection, entry discovery, noise filtering, entity masking, splits
//! and statistics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::seq::SliceRandom;

use crate::corpus::{extract_context, find_occurrences, AliasTable, ContextWindow, Document};
use crate::error::{Error, Result};
use crate::kb::{Answer, EntityId, EntryId, NilPattern, Provenance};
use crate::rng::{round_half_away, stage_rng};

/// Entities with fewer incoming hyperlinks are not used as seeds.
pub const MIN_SEED_LINKS: u64 = 5;
/// A mention or entity whose link probability exceeds this is unambiguous.
pub const MAX_LINK_PROBABILITY: f64 = 0.5;
pub const MIN_CANDIDATES: usize = 2;
pub const MAX_CANDIDATES: usize = 20;
pub const STAR_TOKEN: &str = "*";

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub id: EntryId,
    pub context: ContextWindow,
    /// Candidate set `E_m`, in alias-table order.
    pub candidates: Vec<EntityId>,
    pub answer: Answer,
    pub provenance: Provenance,
    pub masked: bool,
    pub nil_pattern: Option<NilPattern>,
    /// Seed entity whose alias produced this entry; for masked entries, the
    /// removed gold entity.
    pub seed: Option<EntityId>,
}

impl Entry {
    pub fn mention(&self) -> String {
        self.context.mention_text()
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.answer, Answer::Entity(_))
    }

    pub fn is_nil(&self) -> bool {
        self.answer.is_nil()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSelection {
    /// Selected seeds in id order.
    pub seeds: Vec<EntityId>,
    /// Entities that passed every filter before sampling.
    pub survivors: usize,
}

impl SeedSelection {
    /// True when fewer than the requested number of seeds survived.
    pub fn is_short(&self, k: usize) -> bool {
        self.survivors < k
    }
}

/// Picks `k` ambiguous seed entities.
///
/// An entity qualifies when it shares an alias with another entity, receives
/// at least [`MIN_SEED_LINKS`] hyperlinks, and never takes more than half of
/// the links of any alias it shares. Aliases that name a single entity do not
/// count towards that probability.
pub fn select_seed_entities(
    table: &AliasTable,
    hyperlink_counts: &BTreeMap<EntityId, u64>,
    k: usize,
    seed: u64,
) -> SeedSelection {
    let mut max_prob: BTreeMap<&EntityId, f64> = BTreeMap::new();
    for (alias, list) in table.iter() {
        if list.len() < 2 {
            continue;
        }
        for (e, _) in list {
            let p = table.probability(alias, e);
            let slot = max_prob.entry(e).or_insert(0.0);
            if p > *slot {
                *slot = p;
            }
        }
    }
    let survivors: Vec<EntityId> = max_prob
        .into_iter()
        .filter(|(e, p)| {
            hyperlink_counts.get(*e).copied().unwrap_or(0) >= MIN_SEED_LINKS
                && *p <= MAX_LINK_PROBABILITY
        })
        .map(|(e, _)| e.clone())
        .collect();
    let n = survivors.len();
    let seeds = if n <= k {
        survivors
    } else {
        let mut rng = stage_rng(seed, "seeds");
        let mut picked: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| survivors[i].clone()).collect()
    };
    SeedSelection {
        seeds,
        survivors: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoveryConfig {
    /// Entries sampled per mention and provenance.
    pub max_per_provenance: usize,
    pub seed: u64,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            max_per_provenance: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Discovery {
    pub entries: Vec<Entry>,
    /// Mention aliases that never occur in the corpus.
    pub mentions_without_occurrences: usize,
    pub mentions: usize,
}

/// Mention set `M`: every alias naming at least one seed, each paired with the
/// first seed (in candidate order) it names.
pub fn mention_set(seeds: &[EntityId], table: &AliasTable) -> Vec<(String, EntityId)> {
    let seed_set: BTreeSet<&EntityId> = seeds.iter().collect();
    table
        .iter()
        .filter_map(|(alias, list)| {
            list.iter()
                .find(|(e, _)| seed_set.contains(e))
                .map(|(e, _)| (String::from(alias), e.clone()))
        })
        .collect()
}

/// Collects entries for every mention of the seeds: up to
/// `max_per_provenance` hyperlinked and as many plain-text occurrences per
/// mention. Hyperlinked entries are pre-labelled with their link target;
/// plain-text entries are left unannotated. Entry ids are sequential.
pub fn discover_entries(
    seeds: &[EntityId],
    documents: &[Document],
    table: &AliasTable,
    config: DiscoveryConfig,
) -> Discovery {
    let mut out = Discovery::default();
    for (alias, seed_entity) in mention_set(seeds, table) {
        out.mentions += 1;
        let occurrences = find_occurrences(&alias, documents);
        if occurrences.is_empty() {
            out.mentions_without_occurrences += 1;
            continue;
        }
        let candidates: Vec<EntityId> = table
            .entities(&alias)
            .iter()
            .map(|(e, _)| e.clone())
            .collect();
        let mut rng = stage_rng(config.seed, &format!("discover\u{1f}{alias}"));
        for provenance in [Provenance::Hyperlink, Provenance::PlainText] {
            let pool: Vec<_> = occurrences
                .iter()
                .filter(|o| o.is_hyperlink == (provenance == Provenance::Hyperlink))
                .collect();
            let take = pool.len().min(config.max_per_provenance);
            let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), take).into_vec();
            picked.sort_unstable();
            for i in picked {
                let occ = pool[i];
                let Ok(context) = extract_context(&documents[occ.doc_index], occ.start, occ.end)
                else {
                    continue;
                };
                let answer = match &occ.linked_target {
                    Some(t) => Answer::Entity(t.clone()),
                    None => Answer::Unannotated,
                };
                out.entries.push(Entry {
                    id: out.entries.len() as EntryId,
                    context,
                    candidates: candidates.clone(),
                    answer,
                    provenance,
                    masked: false,
                    nil_pattern: None,
                    seed: Some(seed_entity.clone()),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscardReason {
    StarToken,
    TooFewCandidates,
    TooManyCandidates,
    InsideWord,
    Unambiguous,
}

impl DiscardReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DiscardReason::StarToken => "StarToken",
            DiscardReason::TooFewCandidates => "TooFewCandidates",
            DiscardReason::TooManyCandidates => "TooManyCandidates",
            DiscardReason::InsideWord => "InsideWord",
            DiscardReason::Unambiguous => "Unambiguous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Discard(DiscardReason),
}

/// Noise filter. Checks run in a fixed order and the first hit wins.
pub fn filter_entry(entry: &Entry, table: &AliasTable) -> FilterDecision {
    use DiscardReason::*;
    let reason = if entry.context.all_tokens().any(|t| t.text == STAR_TOKEN) {
        Some(StarToken)
    } else if entry.candidates.len() < MIN_CANDIDATES {
        Some(TooFewCandidates)
    } else if entry.candidates.len() > MAX_CANDIDATES {
        Some(TooManyCandidates)
    } else if entry.context.mention_inside_word() {
        Some(InsideWord)
    } else if table.max_probability(&entry.mention()) > MAX_LINK_PROBABILITY {
        Some(Unambiguous)
    } else {
        None
    };
    reason.map_or(FilterDecision::Keep, FilterDecision::Discard)
}

/// Keeps entries passing [`filter_entry`] and renumbers them from 0.
pub fn filter_entries(
    entries: Vec<Entry>,
    table: &AliasTable,
) -> (Vec<Entry>, BTreeMap<DiscardReason, usize>) {
    let mut discarded = BTreeMap::new();
    let mut kept = Vec::new();
    for entry in entries {
        match filter_entry(&entry, table) {
            FilterDecision::Keep => kept.push(entry),
            FilterDecision::Discard(r) => *discarded.entry(r).or_insert(0) += 1,
        }
    }
    for (i, e) in kept.iter_mut().enumerate() {
        e.id = i as EntryId;
    }
    (kept, discarded)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetConfig {
    pub seed_count: usize,
    pub max_per_provenance: usize,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            seed_count: 1000,
            max_per_provenance: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetBuild {
    pub selection: SeedSelection,
    pub discovery_mentions: usize,
    pub mentions_without_occurrences: usize,
    pub discovered: usize,
    pub discarded: BTreeMap<DiscardReason, usize>,
    pub entries: Vec<Entry>,
}

/// Seed selection, discovery and filtering in one pass.
pub fn build_dataset(
    documents: &[Document],
    table: &AliasTable,
    config: DatasetConfig,
) -> DatasetBuild {
    let counts = table.entity_link_counts();
    let selection = select_seed_entities(table, &counts, config.seed_count, config.seed);
    let discovery = discover_entries(
        &selection.seeds,
        documents,
        table,
        DiscoveryConfig {
            max_per_provenance: config.max_per_provenance,
            seed: config.seed,
        },
    );
    let discovered = discovery.entries.len();
    let (entries, discarded) = filter_entries(discovery.entries, table);
    DatasetBuild {
        selection,
        discovery_mentions: discovery.mentions,
        mentions_without_occurrences: discovery.mentions_without_occurrences,
        discovered,
        discarded,
        entries,
    }
}

/// Turns `round(rate × positives)` randomly chosen positive entries into
/// missing-entity NIL entries by removing the gold entity from their
/// candidates and recording it as the seed. Returns the ids of the masked entries.
pub fn mask_positives(entries: &mut [Entry], rate: f64, seed: u64) -> Result<Vec<EntryId>> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidRate(rate));
    }
    let positives: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_positive())
        .map(|(i, _)| i)
        .collect();
    let n = round_half_away(rate * positives.len() as f64) as usize;
    let mut rng = stage_rng(seed, "mask");
    let mut picked: Vec<usize> = index::sample(&mut rng, positives.len(), n)
        .into_iter()
        .map(|i| positives[i])
        .collect();
    picked.sort_unstable();
    let mut ids = Vec::with_capacity(n);
    for i in picked {
        let entry = &mut entries[i];
        let Answer::Entity(gold) = core::mem::replace(&mut entry.answer, Answer::Nil) else {
            unreachable!("only positives are sampled")
        };
        entry.candidates.retain(|c| *c != gold);
        entry.masked = true;
        entry.nil_pattern = Some(NilPattern::MissingEntity);
        entry.seed = Some(gold);
        ids.push(entry.id);
    }
    Ok(ids)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<Entry>,
    pub validation: Vec<Entry>,
    pub test: Vec<Entry>,
}

fn check_ratios(ratios: [f64; 3]) -> Result<()> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidRatios(format!("{ratios:?}")));
    }
    Ok(())
}

/// Validation and test sizes are `floor(ratio × n)`; train takes the rest.
fn split_sizes(n: usize, ratios: [f64; 3]) -> (usize, usize, usize) {
    let floor = |r: f64| libm::floor(r * n as f64 + 1e-9) as usize;
    let validation = floor(ratios[1]);
    let test = floor(ratios[2]).min(n - validation);
    (n - validation - test, validation, test)
}

/// Seeded shuffle followed by a contiguous train / validation / test cut.
///
/// With `group_by_mention`, entries sharing a mention surface move together:
/// the shuffle and cut apply to mention groups instead of single entries.
pub fn split_dataset(
    entries: Vec<Entry>,
    ratios: [f64; 3],
    seed: u64,
    group_by_mention: bool,
) -> Result<Splits> {
    check_ratios(ratios)?;
    let mut rng = stage_rng(seed, "split");
    let mut groups: Vec<Vec<Entry>> = if group_by_mention {
        let mut by_mention: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
        for e in entries {
            by_mention.entry(e.mention()).or_default().push(e);
        }
        by_mention.into_values().collect()
    } else {
        entries.into_iter().map(|e| alloc::vec![e]).collect()
    };
    groups.shuffle(&mut rng);
    let (train_n, val_n, _) = split_sizes(groups.len(), ratios);
    let mut splits = Splits::default();
    for (i, group) in groups.into_iter().enumerate() {
        let target = if i < train_n {
            &mut splits.train
        } else if i < train_n + val_n {
            &mut splits.validation
        } else {
            &mut splits.test
        };
        target.extend(group);
    }
    Ok(splits)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetStats {
    pub entry_count: usize,
    pub positive_count: usize,
    pub nil_count: usize,
    pub unannotated_count: usize,
    /// NIL entries as a percentage of all entries.
    pub nil_percentage: f64,
    pub missing_entity_count: usize,
    pub non_entity_phrase_count: usize,
    /// Distinct mention surfaces.
    pub mention_count: usize,
    /// Distinct entities over all candidate sets.
    pub entity_count: usize,
    pub avg_candidates: f64,
}

pub fn dataset_stats(entries: &[Entry]) -> DatasetStats {
    let mut s = DatasetStats {
        entry_count: entries.len(),
        ..DatasetStats::default()
    };
    if entries.is_empty() {
        return s;
    }
    let mut mentions = BTreeSet::new();
    let mut entities = BTreeSet::new();
    let mut candidate_total = 0usize;
    for e in entries {
        match &e.answer {
            Answer::Entity(_) => s.positive_count += 1,
            Answer::Nil => {
                s.nil_count += 1;
                match e.nil_pattern {
                    Some(NilPattern::MissingEntity) => s.missing_entity_count += 1,
                    Some(NilPattern::NonEntityPhrase) => s.non_entity_phrase_count += 1,
                    None => {}
                }
            }
            Answer::Unannotated => s.unannotated_count += 1,
        }
        mentions.insert(e.mention());
        entities.extend(e.candidates.iter());
        candidate_total += e.candidates.len();
    }
    s.nil_percentage = 100.0 * s.nil_count as f64 / s.entry_count as f64;
    s.mention_count = mentions.len();
    s.entity_count = entities.len();
    s.avg_candidates = candidate_total as f64 / s.entry_count as f64;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_alias_table, parse_documents};
    use alloc::string::ToString;
    use alloc::vec;

    fn e(s: &str) -> EntityId {
        EntityId::from(s)
    }

    fn entry(id: EntryId, candidates: &[&str], answer: Answer) -> Entry {
        Entry {
            id,
            context: ContextWindow::from_text("left side", "Mention", "right side"),
            candidates: candidates.iter().map(|c| e(c)).collect(),
            answer,
            provenance: Provenance::Hyperlink,
            masked: false,
            nil_pattern: None,
            seed: None,
        }
    }

    fn table(rows: &[(&str, &str, u64)]) -> AliasTable {
        let mut t = AliasTable::new();
        for (a, ent, c) in rows {
            t.add(a, &e(ent), *c);
        }
        t.finish();
        t
    }

    fn select(t: &AliasTable, k: usize) -> Vec<EntityId> {
        select_seed_entities(t, &t.entity_link_counts(), k, 1).seeds
    }

    #[test]
    fn seeds_need_five_links() {
        let t = table(&[("M", "a", 4), ("M", "b", 5), ("M", "c", 5)]);
        assert_eq!(select(&t, 10), vec![e("b"), e("c")]);
    }

    #[test]
    fn seeds_drop_dominant_entities() {
        let t = table(&[("M", "a", 6), ("M", "b", 4)]);
        assert!(!select(&t, 10).contains(&e("a")));
    }

    #[test]
    fn half_probability_is_kept() {
        let t = table(&[("M", "a", 5), ("M", "b", 5)]);
        assert_eq!(select(&t, 10), vec![e("a"), e("b")]);
    }

    #[test]
    fn unshared_aliases_do_not_count() {
        let t = table(&[("M", "a", 5), ("M", "b", 5), ("a", "a", 50)]);
        assert!(select(&t, 10).contains(&e("a")));
        let t = table(&[("solo", "x", 20)]);
        assert!(select(&t, 10).is_empty());
    }

    #[test]
    fn seed_sampling_is_seeded() {
        let rows: Vec<(String, String, u64)> = (0..30)
            .map(|i| ("M".to_string(), format!("e{i:02}"), 5))
            .collect();
        let mut t = AliasTable::new();
        for (a, x, c) in &rows {
            t.add(a, &e(x), *c);
        }
        t.finish();
        let counts = t.entity_link_counts();
        let a = select_seed_entities(&t, &counts, 10, 3);
        assert_eq!(a.seeds.len(), 10);
        assert_eq!(a.survivors, 30);
        assert_eq!(a, select_seed_entities(&t, &counts, 10, 3));
        assert_ne!(a.seeds, select_seed_entities(&t, &counts, 10, 4).seeds);
        assert!(select_seed_entities(&t, &counts, 40, 3).is_short(40));
    }

    fn numbered_corpus(hyper: usize, plain: usize) -> Vec<Document> {
        let mut lines = Vec::new();
        for i in 0..hyper {
            lines.push(format!(
                "h{i}\tsome text about [[Mercury (planet)|Mercury]] here"
            ));
        }
        for i in 0..plain {
            lines.push(format!("p{i}\tthe word Mercury appears plainly"));
        }
        lines.push("x\tand [[Mercury (element)|Mercury]] too".to_string());
        parse_documents(&lines.join("\n")).documents
    }

    #[test]
    fn discovery_caps_each_provenance() {
        let docs = numbered_corpus(11, 2);
        let t = build_alias_table(&docs);
        let cfg = DiscoveryConfig {
            max_per_provenance: 5,
            seed: 9,
        };
        let found = discover_entries(&[e("Mercury (planet)")], &docs, &t, cfg);
        let hyper = found
            .entries
            .iter()
            .filter(|x| x.provenance == Provenance::Hyperlink)
            .count();
        let plain = found
            .entries
            .iter()
            .filter(|x| x.provenance == Provenance::PlainText)
            .count();
        assert_eq!((hyper, plain), (5, 2));
        for x in &found.entries {
            assert_eq!(
                x.candidates,
                vec![e("Mercury (planet)"), e("Mercury (element)")]
            );
            match x.provenance {
                Provenance::Hyperlink => assert!(x.is_positive()),
                Provenance::PlainText => assert_eq!(x.answer, Answer::Unannotated),
            }
        }
        let ids: Vec<EntryId> = found.entries.iter().map(|x| x.id).collect();
        assert_eq!(ids, (0..7).collect::<Vec<_>>());
        assert_eq!(
            found.entries,
            discover_entries(&[e("Mercury (planet)")], &docs, &t, cfg).entries
        );
    }

    #[test]
    fn discovery_skips_absent_mentions() {
        let docs = numbered_corpus(1, 0);
        let mut t = build_alias_table(&docs);
        t.add("Quicksilver", &e("Mercury (planet)"), 1);
        t.add("Quicksilver", &e("Mercury (element)"), 1);
        t.finish();
        let found = discover_entries(
            &[e("Mercury (planet)")],
            &docs[..1],
            &t,
            DiscoveryConfig::default(),
        );
        assert_eq!(found.mentions, 2);
        assert_eq!(found.mentions_without_occurrences, 1);
    }

    #[test]
    fn filter_rules() {
        let t = table(&[("Mention", "a", 3), ("Mention", "b", 3)]);
        let keep = entry(0, &["a", "b"], Answer::Unannotated);
        assert_eq!(filter_entry(&keep, &t), FilterDecision::Keep);

        let mut star = keep.clone();
        star.context = ContextWindow::from_text("* item", "Mention", "x");
        assert_eq!(
            filter_entry(&star, &t),
            FilterDecision::Discard(DiscardReason::StarToken)
        );

        let one = entry(0, &["a"], Answer::Unannotated);
        assert_eq!(
            filter_entry(&one, &t),
            FilterDecision::Discard(DiscardReason::TooFewCandidates)
        );

        let names: Vec<String> = (0..21).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let many = entry(0, &refs, Answer::Unannotated);
        assert_eq!(
            filter_entry(&many, &t),
            FilterDecision::Discard(DiscardReason::TooManyCandidates)
        );
        let twenty = entry(0, &refs[..20], Answer::Unannotated);
        assert_eq!(filter_entry(&twenty, &t), FilterDecision::Keep);

        let mut glued = keep.clone();
        glued.context = ContextWindow::from_text("the pro-", "Mention", "camp");
        glued.context.mention[0].space_before = false;
        assert_eq!(
            filter_entry(&glued, &t),
            FilterDecision::Discard(DiscardReason::InsideWord)
        );

        let skewed = table(&[("Mention", "a", 6), ("Mention", "b", 4)]);
        assert_eq!(
            filter_entry(&keep, &skewed),
            FilterDecision::Discard(DiscardReason::Unambiguous)
        );
    }

    fn positives(n: usize) -> Vec<Entry> {
        (0..n as u64)
            .map(|i| {
                entry(
                    i,
                    &["e1", "e2", "e3"],
                    Answer::Entity(e(["e1", "e2", "e3"][i as usize % 3])),
                )
            })
            .collect()
    }

    #[test]
    fn masking_counts_and_membership() {
        let mut entries = positives(100);
        let before = entries.clone();
        let masked = mask_positives(&mut entries, 0.1, 5).unwrap();
        assert_eq!(masked.len(), 10);
        for id in &masked {
            let now = &entries[*id as usize];
            let Answer::Entity(gold) = &before[*id as usize].answer else {
                panic!()
            };
            assert!(now.masked && now.is_nil());
            assert_eq!(now.nil_pattern, Some(NilPattern::MissingEntity));
            assert!(!now.candidates.contains(gold));
            assert_eq!(now.seed.as_ref(), Some(gold));
            assert_eq!(now.candidates.len(), 2);
        }
        assert_eq!(entries.iter().filter(|x| x.is_nil()).count(), 10);
    }

    #[test]
    fn masking_rate_zero_is_identity() {
        let mut entries = positives(10);
        let before = entries.clone();
        assert!(mask_positives(&mut entries, 0.0, 1).unwrap().is_empty());
        assert_eq!(entries, before);
    }

    #[test]
    fn masking_two_candidates() {
        let mut entries = vec![entry(0, &["e1", "e2"], Answer::Entity(e("e1")))];
        mask_positives(&mut entries, 1.0, 0).unwrap();
        assert_eq!(entries[0].candidates, vec![e("e2")]);
        assert_eq!(entries[0].answer, Answer::Nil);
    }

    #[test]
    fn masking_leaves_nil_entries_alone() {
        let mut entries = positives(7);
        entries.push(entry(7, &["e1", "e2"], Answer::Nil));
        let masked = mask_positives(&mut entries, 0.5, 2).unwrap();
        // round(3.5) = 4
        assert_eq!(masked.len(), 4);
        assert!(!entries[7].masked);
        assert!(matches!(
            mask_positives(&mut entries, 1.5, 0),
            Err(Error::InvalidRate(_))
        ));
        assert!(mask_positives(&mut entries, -0.1, 0).is_err());
    }

    fn many(n: usize) -> Vec<Entry> {
        (0..n as u64)
            .map(|i| entry(i, &["a", "b"], Answer::Nil))
            .collect()
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        assert_eq!(split_sizes(9924, [0.8, 0.1, 0.1]), (7940, 992, 992));
        let s = split_dataset(many(10), [0.8, 0.1, 0.1], 1, false).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (8, 1, 1));
    }

    #[test]
    fn split_is_deterministic_and_exhaustive() {
        let a = split_dataset(many(57), [0.8, 0.1, 0.1], 11, false).unwrap();
        let b = split_dataset(many(57), [0.8, 0.1, 0.1], 11, false).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<EntryId> = a
            .train
            .iter()
            .chain(&a.validation)
            .chain(&a.test)
            .map(|x| x.id)
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..57).collect::<Vec<_>>());
        let empty = split_dataset(Vec::new(), [0.8, 0.1, 0.1], 0, false).unwrap();
        assert_eq!(empty, Splits::default());
        assert!(split_dataset(many(3), [0.5, 0.1, 0.1], 0, false).is_err());
    }

    #[test]
    fn grouped_split_keeps_mentions_together() {
        let mut entries = many(40);
        for (i, x) in entries.iter_mut().enumerate() {
            x.context = ContextWindow::from_text("l", &format!("m{}", i % 8), "r");
        }
        let s = split_dataset(entries, [0.5, 0.25, 0.25], 3, true).unwrap();
        let ms = |v: &[Entry]| v.iter().map(Entry::mention).collect::<BTreeSet<_>>();
        assert!(ms(&s.train).is_disjoint(&ms(&s.test)));
        assert!(ms(&s.train).is_disjoint(&ms(&s.validation)));
        assert_eq!(s.train.len(), 20);
    }

    #[test]
    fn stats_on_published_counts() {
        let mut entries: Vec<Entry> = (0..6593)
            .map(|i| entry(i, &["a", "b"], Answer::Entity(e("a"))))
            .collect();
        entries.extend((6593..9924).map(|i| entry(i, &["a", "b"], Answer::Nil)));
        let s = dataset_stats(&entries);
        assert_eq!(s.entry_count, 9924);
        assert_eq!(format!("{:.2}", s.nil_percentage), "33.57");
    }

    #[test]
    fn stats_mean_candidates() {
        let entries = vec![
            entry(0, &["a", "b"], Answer::Nil),
            entry(1, &["a", "b", "c", "d"], Answer::Entity(e("a"))),
            entry(2, &["a", "b", "c", "d", "e", "f"], Answer::Unannotated),
        ];
        let s = dataset_stats(&entries);
        assert_eq!(s.avg_candidates, 4.0);
        assert_eq!(
            (s.positive_count, s.nil_count, s.unannotated_count),
            (1, 1, 1)
        );
        assert_eq!(s.entity_count, 6);
        assert_eq!(s.mention_count, 1);
        assert_eq!(dataset_stats(&[]), DatasetStats::default());
    }
}
