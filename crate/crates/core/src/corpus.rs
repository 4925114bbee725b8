//! Hyperlinked documents, the alias table, mention occurrences and context
//! windows.
//!
//! The input is a simplified wikitext subset: one document per line,
//! `doc_id<TAB>body`, where the body may contain `[[Target]]` and
//! `[[Target|anchor]]` links. Anything that does not close properly stays in
//! the token stream as plain text.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kb::EntityId;

/// Maximum number of tokens in `left + mention + right`.
pub const WINDOW_TOKENS: usize = 128;
/// Default number of tokens taken on each side of a mention.
pub const SIDE_TOKENS: usize = 64;

/// Link prefixes that name media or bookkeeping pages rather than entities.
const DROPPED_NAMESPACES: [&str; 5] = ["File:", "Image:", "Media:", "Category:", "Template:"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Whether whitespace separated this token from the previous one.
    pub space_before: bool,
}

impl Token {
    pub fn new(text: impl Into<String>, space_before: bool) -> Self {
        Self {
            text: text.into(),
            space_before,
        }
    }

    fn ends_alphanumeric(&self) -> bool {
        self.text.chars().last().is_some_and(char::is_alphanumeric)
    }

    fn starts_alphanumeric(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_alphanumeric)
    }

    fn is_joiner(&self, left_side: bool) -> bool {
        match self.text.as_str() {
            "-" | "_" => true,
            "'" | "\u{2019}" => left_side,
            _ => false,
        }
    }
}

/// Punctuation that always forms its own token. Markup characters (`[`, `]`,
/// `|`, `{`, `}`, `=`) are excluded so unclosed markup survives as
/// a single visible token.
fn is_separator(c: char) -> bool {
    if c.is_ascii_punctuation() {
        return !matches!(c, '[' | ']' | '|' | '{' | '}' | '=');
    }
    matches!(
        c,
        '\u{2010}'
            ..='\u{2027}'
                | '\u{00ab}'
                | '\u{00bb}'
                | '\u{00a1}'
                | '\u{00bf}'
                | '\u{3001}'
                | '\u{3002}'
    )
}

/// Incremental tokenizer that remembers whether the last pushed text ended in
/// whitespace, so link anchors and surrounding text tokenize consistently.
#[derive(Debug, Default)]
pub struct Tokenizer {
    pending_space: bool,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, text: &str, out: &mut Vec<Token>) {
        let mut word = String::new();
        let mut word_space = false;
        for c in text.chars() {
            if c.is_whitespace() {
                if !word.is_empty() {
                    out.push(Token::new(core::mem::take(&mut word), word_space));
                }
                self.pending_space = true;
            } else if is_separator(c) {
                if !word.is_empty() {
                    out.push(Token::new(core::mem::take(&mut word), word_space));
                }
                out.push(Token::new(c.to_string(), self.pending_space));
                self.pending_space = false;
            } else {
                if word.is_empty() {
                    word_space = self.pending_space;
                    self.pending_space = false;
                }
                word.push(c);
            }
        }
        if !word.is_empty() {
            out.push(Token::new(word, word_space));
        }
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    Tokenizer::new().push(text, &mut out);
    out
}

/// Joins tokens back into text, inserting a single space wherever the source
/// had whitespace. The first token never gets a leading space.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && t.space_before {
            s.push(' ');
        }
        s.push_str(&t.text);
    }
    s
}

fn raw_text(tokens: &[Token]) -> String {
    let mut s = String::new();
    for t in tokens {
        if t.space_before {
            s.push(' ');
        }
        s.push_str(&t.text);
    }
    s
}

pub fn token_texts(tokens: &[Token]) -> Vec<&str> {
    tokens.iter().map(|t| t.text.as_str()).collect()
}

/// Canonical entity id for a link target: whitespace collapsed, underscores
/// read as spaces.
pub fn normalize_target(raw: &str) -> String {
    let replaced = raw.replace('_', " ");
    let mut out = String::new();
    for part in replaced.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub start: usize,
    pub end: usize,
    pub target: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub tokens: Vec<Token>,
    pub links: Vec<Link>,
}

impl Document {
    pub fn link_at(&self, start: usize, end: usize) -> Option<&Link> {
        self.links.iter().find(|l| l.start == start && l.end == end)
    }

    /// Serializes back to a corpus line. Parsing the result yields the same
    /// document.
    pub fn to_line(&self) -> String {
        let mut body = String::new();
        let mut i = 0;
        let mut links = self.links.iter().peekable();
        while i < self.tokens.len() {
            let tok = &self.tokens[i];
            if i > 0 && tok.space_before {
                body.push(' ');
            }
            match links.peek() {
                Some(link) if link.start == i => {
                    let anchor = detokenize(&self.tokens[link.start..link.end]);
                    body.push_str("[[");
                    if anchor == link.target.0 {
                        body.push_str(&anchor);
                    } else {
                        body.push_str(&link.target.0);
                        body.push('|');
                        body.push_str(&anchor);
                    }
                    body.push_str("]]");
                    i = link.end;
                    links.next();
                }
                _ => {
                    body.push_str(&tok.text);
                    i += 1;
                }
            }
        }
        let mut line = self.doc_id.clone();
        line.push('\t');
        line.push_str(&body);
        line
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub documents: Vec<Document>,
    /// Records whose body produced no tokens.
    pub skipped_empty: usize,
    /// Non-blank lines without a `doc_id<TAB>body` shape.
    pub skipped_malformed: usize,
}

/// Parses one document body. Returns `None` for bodies without tokens.
pub fn parse_body(doc_id: &str, body: &str) -> Option<Document> {
    let mut tokens = Vec::new();
    let mut links = Vec::new();
    let mut tk = Tokenizer::new();
    // text before `text_start` is consumed; `[[` is searched from `pos`
    let mut text_start = 0;
    let mut pos = 0;
    while let Some(rel) = body[pos..].find("[[") {
        let open = pos + rel;
        let after = &body[open + 2..];
        let Some(close) = after.find("]]").filter(|&c| !after[..c].contains("[[")) else {
            // unclosed: the brackets stay in the text
            pos = open + 2;
            continue;
        };
        tk.push(&body[text_start..open], &mut tokens);
        let inner = &after[..close];
        let (raw_target, raw_anchor) = match inner.split_once('|') {
            Some((t, a)) => (t, a),
            None => (inner, inner),
        };
        let target = normalize_target(raw_target);
        let anchor = raw_anchor.trim();
        if DROPPED_NAMESPACES
            .iter()
            .any(|ns| raw_target.trim_start().starts_with(ns))
        {
            // media and bookkeeping links carry no text
        } else if target.is_empty() || anchor.is_empty() {
            tk.push(&body[open..open + 2 + close + 2], &mut tokens);
        } else {
            let leading_space = raw_anchor.starts_with(char::is_whitespace);
            if leading_space {
                tk.push(" ", &mut tokens);
            }
            let start = tokens.len();
            tk.push(anchor, &mut tokens);
            if tokens.len() > start {
                links.push(Link {
                    start,
                    end: tokens.len(),
                    target: EntityId(target),
                });
            }
            if raw_anchor.ends_with(char::is_whitespace) {
                tk.push(" ", &mut tokens);
            }
        }
        text_start = open + 2 + close + 2;
        pos = text_start;
    }
    tk.push(&body[text_start..], &mut tokens);
    if tokens.is_empty() {
        return None;
    }
    Some(Document {
        doc_id: doc_id.to_string(),
        tokens,
        links,
    })
}

/// Parses a whole corpus in the line format. Blank lines are ignored.
pub fn parse_documents(input: &str) -> ParsedCorpus {
    let mut out = ParsedCorpus::default();
    for line in input.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let Some((doc_id, body)) = line.split_once('\t') else {
            out.skipped_malformed += 1;
            continue;
        };
        match parse_body(doc_id.trim(), body) {
            Some(doc) => out.documents.push(doc),
            None => out.skipped_empty += 1,
        }
    }
    out
}

/// Alias → entities with hyperlink counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: BTreeMap<String, Vec<(EntityId, u64)>>,
    totals: BTreeMap<String, u64>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` links from `alias` to `entity`. Zero counts are ignored.
    pub fn add(&mut self, alias: &str, entity: &EntityId, count: u64) {
        if count == 0 || alias.is_empty() {
            return;
        }
        let list = self.entries.entry(alias.to_string()).or_default();
        match list.iter_mut().find(|(e, _)| e == entity) {
            Some((_, c)) => *c += count,
            None => list.push((entity.clone(), count)),
        }
        *self.totals.entry(alias.to_string()).or_default() += count;
    }

    /// Restores the (count desc, id asc) ordering of every entity list.
    pub fn finish(&mut self) {
        for list in self.entries.values_mut() {
            list.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entities(&self, alias: &str) -> &[(EntityId, u64)] {
        self.entries.get(alias).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total(&self, alias: &str) -> u64 {
        self.totals.get(alias).copied().unwrap_or(0)
    }

    /// Share of the alias's hyperlinks that point at `entity`.
    pub fn probability(&self, alias: &str, entity: &EntityId) -> f64 {
        let total = self.total(alias);
        if total == 0 {
            return 0.0;
        }
        let count = self
            .entities(alias)
            .iter()
            .find(|(e, _)| e == entity)
            .map_or(0, |(_, c)| *c);
        count as f64 / total as f64
    }

    /// Highest single-entity link probability for the alias.
    pub fn max_probability(&self, alias: &str) -> f64 {
        let total = self.total(alias);
        if total == 0 {
            return 0.0;
        }
        let max = self
            .entities(alias)
            .iter()
            .map(|(_, c)| *c)
            .max()
            .unwrap_or(0);
        max as f64 / total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(EntityId, u64)])> {
        self.entries.iter().map(|(a, l)| (a.as_str(), l.as_slice()))
    }

    /// Total incoming hyperlinks per entity, summed over all aliases.
    pub fn entity_link_counts(&self) -> BTreeMap<EntityId, u64> {
        let mut counts = BTreeMap::new();
        for list in self.entries.values() {
            for (e, c) in list {
                *counts.entry(e.clone()).or_default() += *c;
            }
        }
        counts
    }

    /// Aliases per entity, in alias order.
    pub fn aliases_by_entity(&self) -> BTreeMap<EntityId, Vec<String>> {
        let mut out: BTreeMap<EntityId, Vec<String>> = BTreeMap::new();
        for (alias, list) in &self.entries {
            for (e, _) in list {
                out.entry(e.clone()).or_default().push(alias.clone());
            }
        }
        out
    }

    pub fn total_links(&self) -> u64 {
        self.totals.values().sum()
    }
}

pub fn build_alias_table<'a>(documents: impl IntoIterator<Item = &'a Document>) -> AliasTable {
    let mut table = AliasTable::new();
    for doc in documents {
        for link in &doc.links {
            let alias = detokenize(&doc.tokens[link.start..link.end]);
            table.add(&alias, &link.target, 1);
        }
    }
    table.finish();
    table
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    /// Position of the document in the slice passed to [`find_occurrences`].
    pub doc_index: usize,
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub is_hyperlink: bool,
    pub linked_target: Option<EntityId>,
}

/// All token-aligned, non-overlapping matches of `alias` in the documents.
/// A match that coincides with a link span is a hyperlink occurrence; one that
/// overlaps a link span any other way is dropped.
pub fn find_occurrences(alias: &str, documents: &[Document]) -> Vec<Occurrence> {
    let needle: Vec<String> = tokenize(alias).into_iter().map(|t| t.text).collect();
    let mut out = Vec::new();
    if needle.is_empty() {
        return out;
    }
    for (doc_index, doc) in documents.iter().enumerate() {
        let n = needle.len();
        let mut i = 0;
        while i + n <= doc.tokens.len() {
            let hit = doc.tokens[i..i + n]
                .iter()
                .zip(&needle)
                .all(|(t, w)| t.text == *w);
            if !hit {
                i += 1;
                continue;
            }
            let end = i + n;
            let exact = doc.link_at(i, end);
            let overlaps = doc.links.iter().any(|l| l.start < end && i < l.end);
            if exact.is_some() || !overlaps {
                out.push(Occurrence {
                    doc_index,
                    doc_id: doc.doc_id.clone(),
                    start: i,
                    end,
                    surface: detokenize(&doc.tokens[i..end]),
                    is_hyperlink: exact.is_some(),
                    linked_target: exact.map(|l| l.target.clone()),
                });
                i = end;
            } else {
                i += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContextWindow {
    pub left: Vec<Token>,
    pub mention: Vec<Token>,
    pub right: Vec<Token>,
}

impl ContextWindow {
    pub fn from_text(left: &str, mention: &str, right: &str) -> Self {
        let mut tk = Tokenizer::new();
        let mut l = Vec::new();
        tk.push(left, &mut l);
        let mut tk = Tokenizer {
            pending_space: true,
        };
        let mut m = Vec::new();
        tk.push(mention, &mut m);
        let mut tk = Tokenizer {
            pending_space: true,
        };
        let mut r = Vec::new();
        tk.push(right, &mut r);
        Self {
            left: l,
            mention: m,
            right: r,
        }
    }

    /// Lossless text form: every token is preceded by a space exactly when
    /// `space_before` is set, including the first token of each part.
    pub fn to_raw_parts(&self) -> (String, String, String) {
        (
            raw_text(&self.left),
            raw_text(&self.mention),
            raw_text(&self.right),
        )
    }

    /// Inverse of [`ContextWindow::to_raw_parts`].
    pub fn from_raw_parts(left: &str, mention: &str, right: &str) -> Self {
        let part = |text: &str| {
            let mut out = Vec::new();
            Tokenizer::new().push(text, &mut out);
            out
        };
        Self {
            left: part(left),
            mention: part(mention),
            right: part(right),
        }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.mention.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mention_text(&self) -> String {
        detokenize(&self.mention)
    }

    pub fn all_tokens(&self) -> impl Iterator<Item = &Token> {
        self.left.iter().chain(&self.mention).chain(&self.right)
    }

    /// True when the mention is glued to surrounding word characters, e.g.
    /// `EU` in `pro-EU` or `EU-funded`.
    pub fn mention_inside_word(&self) -> bool {
        let Some(first) = self.mention.first() else {
            return false;
        };
        if !first.space_before {
            if let Some(prev) = self.left.last() {
                if prev.ends_alphanumeric() {
                    return true;
                }
                let n = self.left.len();
                if prev.is_joiner(true)
                    && n >= 2
                    && !prev.space_before
                    && self.left[n - 2].ends_alphanumeric()
                {
                    return true;
                }
            }
        }
        if let Some(next) = self.right.first() {
            if !next.space_before {
                if next.starts_alphanumeric() {
                    return true;
                }
                if next.is_joiner(false) {
                    if let Some(after) = self.right.get(1) {
                        if !after.space_before && after.starts_alphanumeric() {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Context window around `start..end`: up to 64 tokens per side, with unused
/// budget on one side handed to the other, then trimmed from the outer ends
/// (longer side first, right side on ties) until the window fits in 128 tokens.
pub fn extract_context(document: &Document, start: usize, end: usize) -> Result<ContextWindow> {
    let len = document.tokens.len();
    if start >= end || end > len {
        return Err(Error::SpanOutOfBounds { start, end, len });
    }
    let mention_len = end - start;
    if mention_len > WINDOW_TOKENS {
        return Err(Error::MentionTooLong {
            len: mention_len,
            limit: WINDOW_TOKENS,
        });
    }
    let avail_left = start;
    let avail_right = len - end;
    let mut take_left = avail_left.min(SIDE_TOKENS);
    let mut take_right = avail_right.min(SIDE_TOKENS);
    take_right = avail_right.min(take_right + (SIDE_TOKENS - take_left));
    take_left = avail_left.min(take_left + (SIDE_TOKENS - avail_right.min(SIDE_TOKENS)));

    while take_left + mention_len + take_right > WINDOW_TOKENS {
        if take_right >= take_left && take_right > 0 {
            take_right -= 1;
        } else {
            take_left -= 1;
        }
    }
    Ok(ContextWindow {
        left: document.tokens[start - take_left..start].to_vec(),
        mention: document.tokens[start..end].to_vec(),
        right: document.tokens[end..end + take_right].to_vec(),
    })
}
