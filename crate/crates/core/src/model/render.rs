//! Text layout fed to the encoders:
//!
//! ```text
//! context  [CLS] C_l [m_start] m [m_end] C_r [SEP]
//! entity   [CLS] title [m_title] description [SEP]
//! joint    [CLS] C_l [m_start] m [m_end] C_r [SEP] title [m_title] description [SEP]
//! ```

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{tokenize, ContextWindow, Token, WINDOW_TOKENS};
use crate::kb::Entity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marker {
    Cls,
    Sep,
    MentionStart,
    MentionEnd,
    Title,
}

/// Number of embedding rows reserved for markers; corpus words never hash
/// into them.
pub const RESERVED_IDS: usize = 5;

impl Marker {
    pub fn id(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Marker::Cls => "[CLS]",
            Marker::Sep => "[SEP]",
            Marker::MentionStart => "[m_start]",
            Marker::MentionEnd => "[m_end]",
            Marker::Title => "[m_title]",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Piece {
    Marker(Marker),
    Word(String),
}

impl Piece {
    /// Row of the hashed embedding table. Words hash case-insensitively.
    pub fn id(&self, vocab: usize) -> usize {
        match self {
            Piece::Marker(m) => m.id(),
            Piece::Word(w) => {
                let mut h: u64 = 0xcbf2_9ce4_8422_2325;
                for c in w.chars().flat_map(char::to_lowercase) {
                    let mut buf = [0u8; 4];
                    for b in c.encode_utf8(&mut buf).bytes() {
                        h ^= u64::from(b);
                        h = h.wrapping_mul(0x0000_0100_0000_01b3);
                    }
                }
                RESERVED_IDS + (h % (vocab - RESERVED_IDS) as u64) as usize
            }
        }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Marker(m) => f.write_str(m.as_str()),
            Piece::Word(w) => f.write_str(w),
        }
    }
}

fn words(tokens: &[Token]) -> impl Iterator<Item = Piece> + '_ {
    tokens.iter().map(|t| Piece::Word(t.text.clone()))
}

pub fn render_context(window: &ContextWindow) -> Vec<Piece> {
    let mut out = Vec::with_capacity(window.len() + 4);
    out.push(Piece::Marker(Marker::Cls));
    out.extend(words(&window.left));
    out.push(Piece::Marker(Marker::MentionStart));
    out.extend(words(&window.mention));
    out.push(Piece::Marker(Marker::MentionEnd));
    out.extend(words(&window.right));
    out.push(Piece::Marker(Marker::Sep));
    out
}

/// Entity side; the description is cut to the context length limit.
pub fn render_entity(entity: &Entity) -> Vec<Piece> {
    let mut out = Vec::new();
    out.push(Piece::Marker(Marker::Cls));
    out.extend(
        tokenize(&entity.title)
            .into_iter()
            .map(|t| Piece::Word(t.text)),
    );
    out.push(Piece::Marker(Marker::Title));
    out.extend(
        tokenize(&entity.description)
            .into_iter()
            .take(WINDOW_TOKENS)
            .map(|t| Piece::Word(t.text)),
    );
    out.push(Piece::Marker(Marker::Sep));
    out
}

/// Joint sequence; the context's closing `[SEP]` is shared with the entity.
pub fn render_pair(window: &ContextWindow, entity: &Entity) -> Vec<Piece> {
    let mut out = render_context(window);
    out.extend(render_entity(entity).into_iter().skip(1));
    out
}

pub fn to_text(pieces: &[Piece]) -> String {
    let mut s = String::new();
    for (i, p) in pieces.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&alloc::format!("{p}"));
    }
    s
}
