//! Seeded synthetic linking benchmark.
//!
//! Aliases are shared by three entities of different top-level types. Each
//! entity owns a few unique keywords that appear in its description and in
//! the contexts of its positive mentions, next to a type cue word. NIL
//! contexts carry the keywords of a wrong candidate plus NIL cue words, so a
//! linker only learns to abstain when it sees NIL examples during training.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::ContextWindow;
use crate::dataset::Entry;
use crate::kb::{Answer, Entity, EntityId, KnowledgeBase, NilPattern, Provenance};
use crate::rng::{stage_rng, StageRng};
use crate::typesys::{build_type_system, TypeAssignment, TypeSystem};

/// (root, subtype, cue word)
const SUBTYPES: [(&str, &str, &str); 6] = [
    ("Person", "Politician", "senator"),
    ("Person", "Athlete", "striker"),
    ("Location", "City", "downtown"),
    ("Location", "River", "upstream"),
    ("Organization", "Company", "shares"),
    ("Organization", "Band", "album"),
];

const FILLERS: [&str; 24] = [
    "the", "a", "of", "in", "and", "was", "to", "with", "on", "for", "by", "from", "at", "its",
    "an", "as", "that", "this", "which", "after", "before", "near", "about", "over",
];

const NIL_CUES: [&str; 6] = [
    "vaguely",
    "somewhat",
    "kinda",
    "whatever",
    "lowercase",
    "generic",
];

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ter", "vus", "ran", "pel", "dor", "zi", "qua", "ben", "sol", "tri", "mok",
    "fa", "gen",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyConfig {
    /// Alias groups; each holds three entities.
    pub groups: usize,
    pub entries: usize,
    pub nil_rate: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            groups: 40,
            entries: 600,
            nil_rate: 0.3,
            test_fraction: 0.2,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ToyBenchmark {
    pub kb: KnowledgeBase,
    pub system: TypeSystem,
    pub assignment: TypeAssignment,
    pub train: Vec<Entry>,
    pub test: Vec<Entry>,
}

impl ToyBenchmark {
    pub fn all_entries(&self) -> impl Iterator<Item = &Entry> {
        self.train.iter().chain(&self.test)
    }
}

struct ToyEntity {
    id: EntityId,
    cue: &'static str,
    keywords: Vec<String>,
}

fn fresh_word(rng: &mut StageRng, used: &mut BTreeSet<String>) -> String {
    loop {
        let n = rng.gen_range(2..=3);
        let w: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
        if used.insert(w.clone()) {
            return w;
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn context(rng: &mut StageRng, words: Vec<String>, mention: &str) -> ContextWindow {
    let mut tokens = words;
    for _ in 0..rng.gen_range(3..=5) {
        tokens.push(FILLERS.choose(rng).unwrap().to_string());
    }
    tokens.shuffle(rng);
    let cut = rng.gen_range(0..=tokens.len());
    let (l, r) = tokens.split_at(cut);
    ContextWindow::from_text(&l.join(" "), mention, &r.join(" "))
}

fn pick(rng: &mut StageRng, words: &[String], n: usize) -> Vec<String> {
    words.choose_multiple(rng, n).cloned().collect()
}

/// Builds the benchmark deterministically from `config.seed`.
pub fn toy_benchmark(config: &ToyConfig) -> ToyBenchmark {
    let mut rng = stage_rng(config.seed, "toy");
    let mut used: BTreeSet<String> = FILLERS
        .iter()
        .chain(&NIL_CUES)
        .map(|w| w.to_string())
        .collect();
    used.extend(SUBTYPES.iter().map(|s| s.2.to_string()));

    let mut subclass_of = Vec::new();
    for (root, sub, _) in SUBTYPES {
        subclass_of.push((sub.to_string(), root.to_string()));
    }
    let mut instance_of = Vec::new();
    let mut kb = KnowledgeBase::new();
    let mut groups: Vec<(String, Vec<ToyEntity>)> = Vec::new();
    for _ in 0..config.groups {
        let alias = capitalize(&fresh_word(&mut rng, &mut used));
        let mut members = Vec::new();
        for root in 0..3 {
            let (_, sub, cue) = SUBTYPES[2 * root + rng.gen_range(0..2)];
            let keywords: Vec<String> = (0..3).map(|_| fresh_word(&mut rng, &mut used)).collect();
            let id = EntityId::new(format!("{alias} ({})", sub.to_lowercase()));
            kb.insert(Entity {
                id: id.clone(),
                title: id.as_str().to_string(),
                description: format!("{} {cue} {}", keywords[..2].join(" "), keywords[2]),
                url: String::new(),
            });
            instance_of.push((id.clone(), sub.to_string()));
            members.push(ToyEntity { id, cue, keywords });
        }
        groups.push((alias, members));
    }
    let (system, assignment) = build_type_system(&instance_of, &subclass_of);

    let n_nil = crate::rng::round_half_away(config.nil_rate * config.entries as f64) as usize;
    let mut entries = Vec::with_capacity(config.entries);
    for i in 0..config.entries {
        let (alias, members) = &groups[rng.gen_range(0..groups.len())];
        let mut candidates: Vec<EntityId> = members.iter().map(|m| m.id.clone()).collect();
        candidates.shuffle(&mut rng);
        let gold = rng.gen_range(0..3);
        let nil_kind = if i < n_nil { Some(i % 2 == 0) } else { None };
        let entry = match nil_kind {
            None => {
                let m = &members[gold];
                let mut words = pick(&mut rng, &m.keywords, 2);
                words.push(m.cue.to_string());
                Entry {
                    id: 0,
                    context: context(&mut rng, words, alias),
                    candidates,
                    answer: Answer::Entity(m.id.clone()),
                    provenance: Provenance::Hyperlink,
                    masked: false,
                    nil_pattern: None,
                    seed: Some(m.id.clone()),
                }
            }
            Some(missing) => {
                let distractor = &members[(gold + 1) % 3];
                let mut words = pick(&mut rng, &distractor.keywords, 2);
                words.extend(pick_cues(&mut rng));
                let (seed, pattern, provenance) = if missing {
                    let masked = &members[gold];
                    candidates.retain(|c| *c != masked.id);
                    words.extend(pick(&mut rng, &masked.keywords, 1));
                    words.push(masked.cue.to_string());
                    (
                        Some(masked.id.clone()),
                        NilPattern::MissingEntity,
                        Provenance::Hyperlink,
                    )
                } else {
                    (None, NilPattern::NonEntityPhrase, Provenance::PlainText)
                };
                let mention = if missing {
                    alias.clone()
                } else {
                    alias.to_lowercase()
                };
                Entry {
                    id: 0,
                    context: context(&mut rng, words, &mention),
                    candidates,
                    answer: Answer::Nil,
                    provenance,
                    masked: missing,
                    nil_pattern: Some(pattern),
                    seed,
                }
            }
        };
        entries.push(entry);
    }
    entries.shuffle(&mut rng);
    for (i, e) in entries.iter_mut().enumerate() {
        e.id = i as u64;
    }
    let n_test = crate::rng::round_half_away(config.test_fraction * entries.len() as f64) as usize;
    let train = entries.split_off(n_test);
    ToyBenchmark {
        kb,
        system,
        assignment,
        train,
        test: entries,
    }
}

fn pick_cues(rng: &mut StageRng) -> Vec<String> {
    NIL_CUES
        .choose_multiple(rng, 2)
        .map(|w| w.to_string())
        .collect()
}
