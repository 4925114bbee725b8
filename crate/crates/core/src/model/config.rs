use crate::error::{Error, Result};
use alloc::format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Bi,
    Cross,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bi => "bi",
            Mode::Cross => "cross",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bi" => Some(Mode::Bi),
            "cross" => Some(Mode::Cross),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkerConfig {
    pub mode: Mode,
    pub embed_dim: usize,
    /// Rows of each hashed embedding table, including reserved marker rows.
    pub hash_vocab: usize,
    /// Weight of the semantic score in the blended score.
    pub lambda: f64,
    /// NIL threshold on the blended score.
    pub nil_threshold: f64,
    pub focal_gamma: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Entries per minibatch.
    pub batch_size: usize,
    pub rng_seed: u64,
    /// Adds the typing loss during training.
    pub typing: bool,
    /// Half-width of the uniform initialisation range.
    pub init_scale: f64,
}

impl LinkerConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            embed_dim: 32,
            hash_vocab: 1 << 12,
            lambda: 0.5,
            nil_threshold: 0.5,
            focal_gamma: 2.0,
            learning_rate: 0.01,
            epochs: 4,
            batch_size: match mode {
                Mode::Bi => 4,
                Mode::Cross => 1,
            },
            rng_seed: 0,
            typing: true,
            init_scale: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidConfig(format!(
                "{what} out of range in {self:?}"
            )))
        };
        if self.embed_dim == 0 {
            return bad("embed_dim");
        }
        if self.hash_vocab <= super::render::RESERVED_IDS {
            return bad("hash_vocab");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda");
        }
        if !self.nil_threshold.is_finite() {
            return bad("nil_threshold");
        }
        if !(self.focal_gamma >= 0.0 && self.focal_gamma.is_finite()) {
            return bad("focal_gamma");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate");
        }
        if self.batch_size == 0 {
            return bad("batch_size");
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return bad("init_scale");
        }
        Ok(())
    }
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self::new(Mode::Cross)
    }
}
