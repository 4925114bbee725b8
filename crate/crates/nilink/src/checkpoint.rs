//! Binary model checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic "NILINKCK" | version u32 | mode u8 (0 bi, 1 cross)
//! d u32 | V u32 | n_t u32 | gamma f64 | lambda f64 | epsilon f64
//! block count u32, then per block: name length u16, name, rows u32, cols u32
//! parameters as f32, blocks in declared order
//! ```

use std::path::Path;

use nilink_core::model::{LinkerConfig, LinkerModel, Mode};

use crate::error::{Error, Result};
use crate::formats::write_atomic;

pub const MAGIC: &[u8; 8] = b"NILINKCK";
pub const VERSION: u32 = 1;

pub fn encode(model: &LinkerModel) -> Vec<u8> {
    let cfg = model.config();
    let mut out = Vec::with_capacity(64 + 4 * model.params().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match cfg.mode {
        Mode::Bi => 0,
        Mode::Cross => 1,
    });
    for v in [cfg.embed_dim, cfg.hash_vocab, model.n_types()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for v in [cfg.focal_gamma, cfg.lambda, cfg.nil_threshold] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(model.blocks().len() as u32).to_le_bytes());
    for b in model.blocks() {
        out.extend_from_slice(&(b.name.len() as u16).to_le_bytes());
        out.extend_from_slice(b.name.as_bytes());
        out.extend_from_slice(&(b.rows as u32).to_le_bytes());
        out.extend_from_slice(&(b.cols as u32).to_le_bytes());
    }
    for p in model.params() {
        out.extend_from_slice(&(*p as f32).to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.bytes.len());
        let end = end
            .ok_or_else(|| Error::Invalid(format!("checkpoint truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Restores a model. Training-only settings come from `base`; the header
/// overrides architecture and scoring fields.
pub fn decode(bytes: &[u8], base: &LinkerConfig) -> Result<LinkerModel> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Invalid("not a checkpoint file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Invalid(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let mode = match r.take(1)?[0] {
        0 => Mode::Bi,
        1 => Mode::Cross,
        m => return Err(Error::Invalid(format!("unknown mode byte {m}"))),
    };
    let mut cfg = *base;
    cfg.mode = mode;
    cfg.embed_dim = r.u32()? as usize;
    cfg.hash_vocab = r.u32()? as usize;
    let n_types = r.u32()? as usize;
    cfg.focal_gamma = r.f64()?;
    cfg.lambda = r.f64()?;
    cfg.nil_threshold = r.f64()?;

    let shell = LinkerModel::zeros(cfg, n_types)?;
    let count = r.u32()? as usize;
    if count != shell.blocks().len() {
        return Err(Error::Invalid(format!(
            "checkpoint has {count} blocks, {} mode expects {}",
            mode.as_str(),
            shell.blocks().len()
        )));
    }
    for b in shell.blocks() {
        let len = r.u16()? as usize;
        let name = std::str::from_utf8(r.take(len)?)
            .map_err(|_| Error::Invalid("block name is not UTF-8".into()))?;
        let (rows, cols) = (r.u32()? as usize, r.u32()? as usize);
        if name != b.name || rows != b.rows || cols != b.cols {
            return Err(Error::Invalid(format!(
                "block {name} {rows}x{cols} does not match expected {} {}x{}",
                b.name, b.rows, b.cols
            )));
        }
    }
    let params = (0..shell.params().len())
        .map(|_| r.f32().map(f64::from))
        .collect::<Result<Vec<f64>>>()?;
    if r.pos != bytes.len() {
        return Err(Error::Invalid("trailing bytes after parameters".into()));
    }
    Ok(LinkerModel::from_parts(cfg, n_types, params)?)
}

pub fn save(path: &Path, model: &LinkerModel) -> Result<()> {
    write_atomic(path, &encode(model))
}

pub fn load(path: &Path, base: &LinkerConfig) -> Result<LinkerModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, base)
}
