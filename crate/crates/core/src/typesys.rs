//! Tree-form type system built from instance-of / subclass-of relations.
//!
//! Every type keeps at most one parent (the lexicographically smallest one
//! listed), cycles are cut, and entities without an instance-of relation fall
//! back to [`OTHER`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::kb::EntityId;

pub const OTHER: &str = "Other";

/// The coarse type inventory used when transferring to other datasets.
pub const TOP_LEVEL_TYPES: [&str; 14] = [
    "Other",
    "Person",
    "Place",
    "Work",
    "Organization",
    "Event",
    "Fictional Character",
    "Species",
    "Activity",
    "Device",
    "Topical Concept",
    "Ethnic Group",
    "Food",
    "Disease",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNode {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSystem {
    nodes: BTreeMap<String, TypeNode>,
    index: BTreeMap<String, usize>,
}

impl TypeSystem {
    /// Builds a system from `(type, parent)` edges that already form a forest.
    /// Types are indexed in id order.
    fn from_nodes(nodes: BTreeMap<String, TypeNode>) -> Self {
        let index = nodes
            .keys()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Self { nodes, index }
    }

    /// Number of types, `n_t`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A system with no types at all. Typing heads collapse to zero width.
    pub fn empty() -> Self {
        Self::from_nodes(BTreeMap::new())
    }

    /// Adds parentless types that are not present yet.
    pub fn with_roots<I: IntoIterator<Item = String>>(mut self, roots: I) -> Self {
        for r in roots {
            self.nodes.entry(r.clone()).or_insert(TypeNode {
                name: r,
                parent: None,
            });
        }
        Self::from_nodes(self.nodes)
    }

    pub fn contains(&self, ty: &str) -> bool {
        self.nodes.contains_key(ty)
    }

    pub fn node(&self, ty: &str) -> Option<&TypeNode> {
        self.nodes.get(ty)
    }

    pub fn parent(&self, ty: &str) -> Option<&str> {
        self.nodes.get(ty)?.parent.as_deref()
    }

    pub fn index_of(&self, ty: &str) -> Option<usize> {
        self.index.get(ty).copied()
    }

    pub fn roots(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.parent.is_none())
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn types(&self) -> impl Iterator<Item = (&str, &TypeNode)> {
        self.nodes.iter().map(|(k, n)| (k.as_str(), n))
    }

    /// `ty` followed by its ancestors up to the root. Unknown types yield an
    /// empty line.
    pub fn ancestors(&self, ty: &str) -> Vec<&str> {
        let mut line = Vec::new();
        let mut cur = self.nodes.get_key_value(ty);
        while let Some((id, node)) = cur {
            line.push(id.as_str());
            if line.len() > self.nodes.len() {
                break;
            }
            cur = node
                .parent
                .as_deref()
                .and_then(|p| self.nodes.get_key_value(p));
        }
        line
    }

    pub fn root_of(&self, ty: &str) -> Option<&str> {
        self.ancestors(ty).last().copied()
    }

    /// Multi-hot vector over the line of `ty`: the type and all ancestors.
    pub fn line_vector(&self, ty: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for t in self.ancestors(ty) {
            v[self.index[t]] = 1.0;
        }
        v
    }

    /// Type id at each vector position.
    pub fn ids(&self) -> Vec<&str> {
        self.nodes.keys().map(String::as_str).collect()
    }
}

/// Primary type per entity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeAssignment {
    map: BTreeMap<EntityId, String>,
}

impl TypeAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entity: EntityId, ty: impl Into<String>) {
        self.map.insert(entity, ty.into());
    }

    pub fn get(&self, entity: &EntityId) -> Option<&str> {
        self.map.get(entity).map(String::as_str)
    }

    /// Primary type, or [`OTHER`] for unassigned entities.
    pub fn primary(&self, entity: &EntityId) -> &str {
        self.get(entity).unwrap_or(OTHER)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityId, &str)> {
        self.map.iter().map(|(e, t)| (e, t.as_str()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Builds the type tree and the entity → primary type map.
///
/// Multiple parents collapse to the smallest parent id. A cycle is cut by
/// making its smallest member a root. Entities listing several types keep the
/// smallest type id.
pub fn build_type_system(
    instance_of: &[(EntityId, String)],
    subclass_of: &[(String, String)],
) -> (TypeSystem, TypeAssignment) {
    let mut parent: BTreeMap<String, Option<String>> = BTreeMap::new();
    parent.insert(OTHER.to_string(), None);
    for (child, par) in subclass_of {
        parent.entry(par.clone()).or_insert(None);
        let slot = parent.entry(child.clone()).or_insert(None);
        if child == par {
            continue;
        }
        match slot {
            Some(existing) if existing.as_str() <= par.as_str() => {}
            _ => *slot = Some(par.clone()),
        }
    }
    for (_, ty) in instance_of {
        parent.entry(ty.clone()).or_insert(None);
    }

    // Cut cycles. Walk from every type; when a walk revisits a type of the
    // current path, the smallest id on the cycle loses its parent.
    let keys: Vec<String> = parent.keys().cloned().collect();
    let mut settled: BTreeSet<String> = BTreeSet::new();
    for start in &keys {
        let mut path: Vec<String> = Vec::new();
        let mut cur = Some(start.clone());
        while let Some(c) = cur {
            if settled.contains(&c) {
                break;
            }
            if let Some(pos) = path.iter().position(|p| *p == c) {
                let smallest = path[pos..].iter().min().unwrap().clone();
                parent.insert(smallest, None);
                break;
            }
            path.push(c.clone());
            cur = parent.get(&c).cloned().flatten();
        }
        settled.extend(path);
    }

    let nodes = parent
        .into_iter()
        .map(|(id, parent)| (id.clone(), TypeNode { name: id, parent }))
        .collect();
    let system = TypeSystem::from_nodes(nodes);

    let mut assignment = TypeAssignment::new();
    for (entity, ty) in instance_of {
        match assignment.map.get(entity) {
            Some(existing) if existing.as_str() <= ty.as_str() => {}
            _ => {
                assignment.map.insert(entity.clone(), ty.clone());
            }
        }
    }
    (system, assignment)
}

/// `A->B->C` line from the entity's primary type to its root.
pub fn type_line(entity: &EntityId, system: &TypeSystem, assignment: &TypeAssignment) -> String {
    let line = system.ancestors(assignment.primary(entity));
    if line.is_empty() {
        return OTHER.to_string();
    }
    line.join("->")
}

pub fn type_vector(
    entity: &EntityId,
    system: &TypeSystem,
    assignment: &TypeAssignment,
) -> Vec<f64> {
    system.line_vector(assignment.primary(entity))
}

fn top_level_key(name: &str) -> String {
    let key: String = name
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect();
    if key == "organisation" {
        "organization".to_string()
    } else {
        key
    }
}

/// Collapses the system to the 14 top-level types. Each entity maps to the
/// root of its former line when that root is one of the 14 (compared without
/// case, spacing, or British/American spelling differences), otherwise to
/// [`OTHER`].
pub fn restrict_top_level(
    system: &TypeSystem,
    assignment: &TypeAssignment,
) -> (TypeSystem, TypeAssignment) {
    let nodes = TOP_LEVEL_TYPES
        .iter()
        .map(|t| {
            (
                t.to_string(),
                TypeNode {
                    name: t.to_string(),
                    parent: None,
                },
            )
        })
        .collect();
    let restricted = TypeSystem::from_nodes(nodes);
    let by_key: BTreeMap<String, &str> = TOP_LEVEL_TYPES
        .iter()
        .map(|t| (top_level_key(t), *t))
        .collect();

    let mut out = TypeAssignment::new();
    for (entity, ty) in assignment.iter() {
        let root = system.root_of(ty).unwrap_or(ty);
        let top = by_key.get(&top_level_key(root)).copied().unwrap_or(OTHER);
        out.insert(entity.clone(), top);
    }
    (restricted, out)
}
