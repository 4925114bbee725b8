//! Knowledge-base records and the answer vocabulary shared by every stage.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

/// Knowledge-base identifier, usually the page title with underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self(String::from(s))
    }
}

pub type EntryId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub title: String,
    pub description: String,
    pub url: String,
}

impl Entity {
    /// Entity with a title derived from its id and no description.
    pub fn bare(id: impl Into<String>) -> Self {
        let id = EntityId::new(id);
        let title = id.0.replace('_', " ");
        Self {
            url: alloc::format!("https://en.wikipedia.org/wiki/{}", id.0),
            id,
            title,
            description: String::new(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    entities: BTreeMap<EntityId, Entity>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entity: Entity) {
        self.entities.insert(entity.id.clone(), entity);
    }

    pub fn get(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    /// Known record, or a bare placeholder for ids missing from the KB file.
    pub fn get_or_bare(&self, id: &EntityId) -> Entity {
        self.get(id)
            .cloned()
            .unwrap_or_else(|| Entity::bare(id.0.clone()))
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }
}

impl FromIterator<Entity> for KnowledgeBase {
    fn from_iter<I: IntoIterator<Item = Entity>>(iter: I) -> Self {
        let mut kb = Self::new();
        for e in iter {
            kb.insert(e);
        }
        kb
    }
}

/// Why a mention has no referent among its candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NilPattern {
    /// The referent exists but is not (yet) in the knowledge base.
    MissingEntity,
    /// The mention is a common phrase rather than a named entity.
    NonEntityPhrase,
}

impl NilPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            NilPattern::MissingEntity => "MissingEntity",
            NilPattern::NonEntityPhrase => "NonEntityPhrase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "MissingEntity" => Some(NilPattern::MissingEntity),
            "NonEntityPhrase" => Some(NilPattern::NonEntityPhrase),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Answer {
    Entity(EntityId),
    Nil,
    Unannotated,
}

impl Answer {
    pub fn entity(&self) -> Option<&EntityId> {
        match self {
            Answer::Entity(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Answer::Nil)
    }
}

/// How an entry's mention was found in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Hyperlink,
    PlainText,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Hyperlink => "Hyperlink",
            Provenance::PlainText => "PlainText",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Hyperlink" => Some(Provenance::Hyperlink),
            "PlainText" => Some(Provenance::PlainText),
            _ => None,
        }
    }
}
