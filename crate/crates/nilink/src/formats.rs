//! Line-oriented file formats.
//!
//! | file | layout |
//! |------|--------|
//! | corpus | `doc_id<TAB>body` |
//! | alias table | `alias<TAB>entity_id<TAB>count`, sorted by alias then count desc |
//! | entities | `id<TAB>title<TAB>description<TAB>url` |
//! | relations | `child<TAB>parent` (subclass-of) or `entity<TAB>type` (instance-of) |
//! | type system | `type<TAB>name<TAB>parent` and `entity<TAB>id<TAB>type` records |
//! | entries | one JSON object per line, see [`EntryRecord`] |

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nilink_core::corpus::{parse_documents, AliasTable, ContextWindow, ParsedCorpus};
use nilink_core::dataset::Entry;
use nilink_core::typesys::{build_type_system, TypeAssignment, TypeSystem};
use nilink_core::{Answer, Entity, EntityId, KnowledgeBase, NilPattern, Provenance};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NIL_LITERAL: &str = "NIL";
pub const UNANNOTATED_LITERAL: &str = "UNANNOTATED";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary sibling and renames, so readers never observe
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp~");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes)
        .and_then(|_| f.sync_all())
        .map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn columns<'a>(path: &Path, line_no: usize, line: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != n {
        return Err(Error::format(
            path,
            line_no,
            format!("expected {n} tab-separated columns, found {}", cols.len()),
        ));
    }
    Ok(cols)
}

pub fn read_corpus(path: &Path) -> Result<ParsedCorpus> {
    Ok(parse_documents(&read_text(path)?))
}

pub fn alias_table_to_string(table: &AliasTable) -> String {
    let mut out = String::new();
    for (alias, list) in table.iter() {
        for (entity, count) in list {
            out.push_str(&format!("{alias}\t{entity}\t{count}\n"));
        }
    }
    out
}

pub fn read_alias_table(path: &Path) -> Result<AliasTable> {
    let text = read_text(path)?;
    let mut table = AliasTable::new();
    for (n, line) in data_lines(&text) {
        let c = columns(path, n, line, 3)?;
        let count: u64 = c[2]
            .parse()
            .map_err(|_| Error::format(path, n, format!("bad count {:?}", c[2])))?;
        table.add(c[0], &EntityId::new(c[1]), count);
    }
    table.finish();
    Ok(table)
}

pub fn read_entities(path: &Path) -> Result<KnowledgeBase> {
    let text = read_text(path)?;
    let mut kb = KnowledgeBase::new();
    for (n, line) in data_lines(&text) {
        let c = columns(path, n, line, 4)?;
        kb.insert(Entity {
            id: EntityId::new(c[0]),
            title: c[1].to_string(),
            description: c[2].to_string(),
            url: c[3].to_string(),
        });
    }
    Ok(kb)
}

pub fn entities_to_string<'a>(entities: impl IntoIterator<Item = &'a Entity>) -> String {
    entities
        .into_iter()
        .map(|e| format!("{}\t{}\t{}\t{}\n", e.id, e.title, e.description, e.url))
        .collect()
}

/// Two-column relation file.
pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read_text(path)?;
    data_lines(&text)
        .map(|(n, line)| {
            let c = columns(path, n, line, 2)?;
            Ok((c[0].to_string(), c[1].to_string()))
        })
        .collect()
}

pub fn type_system_to_string(system: &TypeSystem, assignment: &TypeAssignment) -> String {
    let mut out = String::new();
    for (name, node) in system.types() {
        out.push_str(&format!(
            "type\t{name}\t{}\n",
            node.parent.as_deref().unwrap_or("")
        ));
    }
    for (entity, ty) in assignment.iter() {
        out.push_str(&format!("entity\t{entity}\t{ty}\n"));
    }
    out
}

pub fn read_type_system(path: &Path) -> Result<(TypeSystem, TypeAssignment)> {
    let text = read_text(path)?;
    let mut subclass = Vec::new();
    let mut instance = Vec::new();
    let mut roots = Vec::new();
    for (n, line) in data_lines(&text) {
        let c = columns(path, n, line, 3)?;
        match c[0] {
            "type" if c[2].is_empty() => roots.push(c[1].to_string()),
            "type" => subclass.push((c[1].to_string(), c[2].to_string())),
            "entity" => instance.push((EntityId::new(c[1]), c[2].to_string())),
            other => {
                return Err(Error::format(
                    path,
                    n,
                    format!("unknown record kind {other:?}"),
                ))
            }
        }
    }
    let (system, assignment) = build_type_system(&instance, &subclass);
    Ok((system.with_roots(roots), assignment))
}

/// One line of an entry file. Field order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub id: u64,
    pub left: String,
    pub mention: String,
    pub right: String,
    pub candidates: Vec<String>,
    /// Entity id, `"NIL"` or `"UNANNOTATED"`.
    pub answer: String,
    pub provenance: String,
    pub masked: bool,
    pub nil_pattern: Option<String>,
    #[serde(default)]
    pub seed: Option<String>,
}

pub fn answer_to_string(answer: &Answer) -> String {
    match answer {
        Answer::Entity(e) => e.to_string(),
        Answer::Nil => NIL_LITERAL.to_string(),
        Answer::Unannotated => UNANNOTATED_LITERAL.to_string(),
    }
}

pub fn answer_from_string(s: &str) -> Answer {
    match s {
        NIL_LITERAL => Answer::Nil,
        UNANNOTATED_LITERAL => Answer::Unannotated,
        id => Answer::Entity(EntityId::new(id)),
    }
}

impl From<&Entry> for EntryRecord {
    fn from(e: &Entry) -> Self {
        let (left, mention, right) = e.context.to_raw_parts();
        EntryRecord {
            id: e.id,
            left,
            mention,
            right,
            candidates: e.candidates.iter().map(|c| c.to_string()).collect(),
            answer: answer_to_string(&e.answer),
            provenance: e.provenance.as_str().to_string(),
            masked: e.masked,
            nil_pattern: e.nil_pattern.map(|p| p.as_str().to_string()),
            seed: e.seed.as_ref().map(|s| s.to_string()),
        }
    }
}

impl EntryRecord {
    pub fn into_entry(self) -> std::result::Result<Entry, String> {
        let provenance = Provenance::parse(&self.provenance)
            .ok_or_else(|| format!("unknown provenance {:?}", self.provenance))?;
        let nil_pattern = match self.nil_pattern {
            None => None,
            Some(p) => {
                Some(NilPattern::parse(&p).ok_or_else(|| format!("unknown nil_pattern {p:?}"))?)
            }
        };
        Ok(Entry {
            id: self.id,
            context: ContextWindow::from_raw_parts(&self.left, &self.mention, &self.right),
            candidates: self.candidates.into_iter().map(EntityId::new).collect(),
            answer: answer_from_string(&self.answer),
            provenance,
            masked: self.masked,
            nil_pattern,
            seed: self.seed.map(EntityId::new),
        })
    }
}

pub fn entries_to_string(entries: &[Entry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(
            &serde_json::to_string(&EntryRecord::from(e)).expect("entry records serialize"),
        );
        out.push('\n');
    }
    out
}

pub fn parse_entries(path: &Path, text: &str) -> Result<Vec<Entry>> {
    data_lines(text)
        .map(|(n, line)| {
            let rec: EntryRecord =
                serde_json::from_str(line).map_err(|e| Error::format(path, n, e.to_string()))?;
            rec.into_entry().map_err(|m| Error::format(path, n, m))
        })
        .collect()
}

pub fn read_entries(path: &Path) -> Result<Vec<Entry>> {
    parse_entries(path, &read_text(path)?)
}

pub fn write_entries(path: &Path, entries: &[Entry]) -> Result<()> {
    write_atomic(path, entries_to_string(entries).as_bytes())
}

/// Candidate entities missing from `kb` get a bare entry derived from their id.
pub fn kb_covering(kb: &KnowledgeBase, entries: &[Entry]) -> KnowledgeBase {
    let mut out: BTreeMap<EntityId, Entity> = BTreeMap::new();
    for e in entries {
        for c in &e.candidates {
            out.entry(c.clone()).or_insert_with(|| kb.get_or_bare(c));
        }
    }
    out.into_values().collect()
}
