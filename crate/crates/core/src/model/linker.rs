use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::config::{LinkerConfig, Mode};
use super::encoder::{Encoder, HashedMeanPool};
use super::loss::{bce, combined_score, decide, focal_term, sigmoid, type_similarity};
use super::pairs::EncodedPair;
use super::render::{render_context, render_entity};
use crate::corpus::ContextWindow;
use crate::dataset::Entry;
use crate::error::{Error, Result};
use crate::kb::{Answer, Entity, KnowledgeBase};
use crate::rng::stage_rng;

/// A named, row-major parameter tensor inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub name: &'static str,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> core::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

// block positions, bi-encoder
const CTX_EMB: usize = 0;
const ENT_EMB: usize = 1;
const CTX_TYPE_W: usize = 2;
const CTX_TYPE_B: usize = 3;
const ENT_TYPE_W: usize = 4;
const ENT_TYPE_B: usize = 5;
// block positions, cross-encoder
const JOINT_EMB: usize = 0;
const SCORE_W: usize = 1;
const SCORE_B: usize = 2;
const TYPE_W: usize = 3;
const TYPE_B: usize = 4;

fn layout(mode: Mode, dim: usize, vocab: usize, n_types: usize) -> Vec<Block> {
    let shapes: Vec<(&'static str, usize, usize)> = match mode {
        Mode::Bi => vec![
            ("context_embedding", vocab, dim),
            ("entity_embedding", vocab, dim),
            ("context_type_weight", n_types, dim),
            ("context_type_bias", n_types, 1),
            ("entity_type_weight", n_types, dim),
            ("entity_type_bias", n_types, 1),
        ],
        Mode::Cross => vec![
            ("joint_embedding", vocab, dim),
            ("score_weight", 1, 2 * dim),
            ("score_bias", 1, 1),
            ("type_weight", 2 * n_types, 2 * dim),
            ("type_bias", 2 * n_types, 1),
        ],
    };
    let mut offset = 0;
    shapes
        .into_iter()
        .map(|(name, rows, cols)| {
            let b = Block {
                name,
                offset,
                rows,
                cols,
            };
            offset += rows * cols;
            b
        })
        .collect()
}

/// `out = W x + b` for a row-major `W`.
fn affine(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let cols = x.len();
    b.iter()
        .enumerate()
        .map(|(r, bias)| {
            bias + w[r * cols..(r + 1) * cols]
                .iter()
                .zip(x)
                .map(|(a, c)| a * c)
                .sum::<f64>()
        })
        .collect()
}

/// Accumulates gradients of `W x + b` given `d_out`; returns `dL/dx`.
fn affine_backward(
    w: &[f64],
    x: &[f64],
    d_out: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
) -> Vec<f64> {
    let cols = x.len();
    let mut dx = vec![0.0; cols];
    for (r, d) in d_out.iter().enumerate() {
        gb[r] += d;
        let row = &w[r * cols..(r + 1) * cols];
        let grow = &mut gw[r * cols..(r + 1) * cols];
        for c in 0..cols {
            grow[c] += d * x[c];
            dx[c] += d * row[c];
        }
    }
    dx
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Semantic score and type predictions for one context–entity pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScores {
    pub semantic: f64,
    pub context_types: Vec<f64>,
    pub entity_types: Vec<f64>,
}

impl PairScores {
    pub fn type_similarity(&self) -> f64 {
        type_similarity(&self.context_types, &self.entity_types)
    }

    /// Blended score; without types it is the semantic score alone.
    pub fn combined(&self, lambda: f64) -> f64 {
        if self.context_types.is_empty() {
            return self.semantic;
        }
        combined_score(self.semantic, self.type_similarity(), lambda)
    }
}

/// Loss terms of one pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossParts {
    pub semantic: f64,
    pub typing: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.semantic + self.typing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkerModel {
    config: LinkerConfig,
    n_types: usize,
    blocks: Vec<Block>,
    params: Vec<f64>,
}

struct CrossForward {
    all: Vec<f64>,
    ctx: Vec<f64>,
    ent: Vec<f64>,
    joint: Vec<f64>,
    semantic: f64,
    types: Vec<f64>,
}

impl LinkerModel {
    /// All-zero parameters.
    pub fn zeros(config: LinkerConfig, n_types: usize) -> Result<Self> {
        config.validate()?;
        let blocks = layout(config.mode, config.embed_dim, config.hash_vocab, n_types);
        let len = blocks.last().map_or(0, |b| b.offset + b.len());
        Ok(Self {
            config,
            n_types,
            blocks,
            params: vec![0.0; len],
        })
    }

    /// Uniform initialisation in `±init_scale`, seeded by `config.rng_seed`.
    pub fn new(config: LinkerConfig, n_types: usize) -> Result<Self> {
        let mut model = Self::zeros(config, n_types)?;
        let mut rng = stage_rng(config.rng_seed, "init");
        let scale = config.init_scale;
        if scale > 0.0 {
            for p in &mut model.params {
                *p = rng.gen_range(-scale..scale);
            }
        }
        Ok(model)
    }

    pub fn from_parts(config: LinkerConfig, n_types: usize, params: Vec<f64>) -> Result<Self> {
        let mut model = Self::zeros(config, n_types)?;
        if params.len() != model.params.len() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                model.params.len(),
                params.len()
            )));
        }
        model.params = params;
        Ok(model)
    }

    pub fn config(&self) -> &LinkerConfig {
        &self.config
    }

    /// Evaluation-time knobs (`λ`, `ε`) can change without retraining.
    pub fn set_scoring(&mut self, lambda: f64, nil_threshold: f64) {
        self.config.lambda = lambda;
        self.config.nil_threshold = nil_threshold;
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn encoder(&self) -> HashedMeanPool {
        HashedMeanPool {
            vocab: self.config.hash_vocab,
            dim: self.config.embed_dim,
        }
    }

    fn block(&self, i: usize) -> &[f64] {
        &self.params[self.blocks[i].range()]
    }

    /// `f(c)`, the bi-encoder context embedding.
    pub fn encode_context(&self, window: &ContextWindow) -> Vec<f64> {
        let enc = self.encoder();
        let ids = enc.ids(&render_context(window));
        enc.encode(self.block(CTX_EMB), &ids)
    }

    /// `g(e)`, the bi-encoder entity embedding. It does not depend on any
    /// context, so it can be computed once per entity.
    pub fn encode_entity(&self, entity: &Entity) -> Vec<f64> {
        let enc = self.encoder();
        let ids = enc.ids(&render_entity(entity));
        enc.encode(self.block(ENT_EMB), &ids)
    }

    fn bi_forward(&self, ctx_ids: &[usize], ent_ids: &[usize]) -> (Vec<f64>, Vec<f64>, PairScores) {
        let enc = self.encoder();
        let u = enc.encode(self.block(CTX_EMB), ctx_ids);
        let v = enc.encode(self.block(ENT_EMB), ent_ids);
        let semantic = sigmoid(dot(&u, &v));
        let tc = affine(self.block(CTX_TYPE_W), self.block(CTX_TYPE_B), &u)
            .into_iter()
            .map(sigmoid)
            .collect();
        let te = affine(self.block(ENT_TYPE_W), self.block(ENT_TYPE_B), &v)
            .into_iter()
            .map(sigmoid)
            .collect();
        (
            u,
            v,
            PairScores {
                semantic,
                context_types: tc,
                entity_types: te,
            },
        )
    }

    fn cross_forward(&self, ctx_ids: &[usize], ent_ids: &[usize]) -> CrossForward {
        let enc = self.encoder();
        let table = self.block(JOINT_EMB);
        let ent_seg = &ent_ids[1.min(ent_ids.len())..];
        let mut joint_ids = Vec::with_capacity(ctx_ids.len() + ent_seg.len());
        joint_ids.extend_from_slice(ctx_ids);
        joint_ids.extend_from_slice(ent_seg);
        let all = enc.encode(table, &joint_ids);
        let ctx = enc.encode(table, ctx_ids);
        let ent = enc.encode(table, ent_seg);
        let mut joint = all.clone();
        joint.extend(ctx.iter().zip(&ent).map(|(a, b)| a * b));
        let semantic = sigmoid(dot(self.block(SCORE_W), &joint) + self.block(SCORE_B)[0]);
        let types = affine(self.block(TYPE_W), self.block(TYPE_B), &joint)
            .into_iter()
            .map(sigmoid)
            .collect();
        CrossForward {
            all,
            ctx,
            ent,
            joint,
            semantic,
            types,
        }
    }

    /// Scores a pair given already-hashed context and entity renderings.
    pub fn score_ids(&self, ctx_ids: &[usize], ent_ids: &[usize]) -> PairScores {
        match self.config.mode {
            Mode::Bi => self.bi_forward(ctx_ids, ent_ids).2,
            Mode::Cross => {
                let f = self.cross_forward(ctx_ids, ent_ids);
                let mut tc = f.types;
                let te = tc.split_off(self.n_types);
                PairScores {
                    semantic: f.semantic,
                    context_types: tc,
                    entity_types: te,
                }
            }
        }
    }

    pub fn score_pair(&self, window: &ContextWindow, entity: &Entity) -> PairScores {
        let enc = self.encoder();
        let ctx = enc.ids(&render_context(window));
        let ent = enc.ids(&render_entity(entity));
        self.score_ids(&ctx, &ent)
    }

    /// `s_s(c, e)`.
    pub fn score_semantic(&self, window: &ContextWindow, entity: &Entity) -> f64 {
        self.score_pair(window, entity).semantic
    }

    /// `(t_c, t_e)`.
    pub fn predict_types(&self, window: &ContextWindow, entity: &Entity) -> (Vec<f64>, Vec<f64>) {
        let s = self.score_pair(window, entity);
        (s.context_types, s.entity_types)
    }

    /// Loss of one pair. When `grad` is given, `scale · ∂L/∂θ` is added to it.
    pub fn pair_loss(
        &self,
        pair: &EncodedPair,
        typing: bool,
        grad: Option<&mut [f64]>,
        scale: f64,
    ) -> LossParts {
        let typing = typing && self.n_types > 0;
        let gamma = self.config.focal_gamma;
        match self.config.mode {
            Mode::Bi => {
                let (u, v, s) = self.bi_forward(&pair.context, &pair.entity);
                let (ls, dls) = bce(s.semantic, pair.label);
                let mut parts = LossParts {
                    semantic: ls,
                    typing: 0.0,
                };
                let mut dtc = vec![0.0; self.n_types];
                let mut dte = vec![0.0; self.n_types];
                if typing {
                    let mut lc = 0.0;
                    let mut le = 0.0;
                    for i in 0..self.n_types {
                        let (l, d) = focal_term(s.context_types[i], pair.context_types[i], gamma);
                        lc += l;
                        let t = s.context_types[i];
                        dtc[i] = 0.5 * d * t * (1.0 - t);
                        let (l, d) = focal_term(s.entity_types[i], pair.entity_types[i], gamma);
                        le += l;
                        let t = s.entity_types[i];
                        dte[i] = 0.5 * d * t * (1.0 - t);
                    }
                    parts.typing = 0.5 * (lc + le);
                }
                let Some(grad) = grad else { return parts };
                let dz = scale * dls * s.semantic * (1.0 - s.semantic);
                dtc.iter_mut()
                    .chain(dte.iter_mut())
                    .for_each(|d| *d *= scale);

                let mut du: Vec<f64> = v.iter().map(|x| dz * x).collect();
                let mut dv: Vec<f64> = u.iter().map(|x| dz * x).collect();
                if typing {
                    let (w, b) = self.split_grad_pair(grad, CTX_TYPE_W, CTX_TYPE_B);
                    let dxu = affine_backward(self.block(CTX_TYPE_W), &u, &dtc, w, b);
                    let (w, b) = self.split_grad_pair(grad, ENT_TYPE_W, ENT_TYPE_B);
                    let dxv = affine_backward(self.block(ENT_TYPE_W), &v, &dte, w, b);
                    du.iter_mut().zip(dxu).for_each(|(a, b)| *a += b);
                    dv.iter_mut().zip(dxv).for_each(|(a, b)| *a += b);
                }
                let enc = self.encoder();
                enc.backward(&mut grad[self.blocks[CTX_EMB].range()], &pair.context, &du);
                enc.backward(&mut grad[self.blocks[ENT_EMB].range()], &pair.entity, &dv);
                parts
            }
            Mode::Cross => {
                let f = self.cross_forward(&pair.context, &pair.entity);
                let (ls, dls) = bce(f.semantic, pair.label);
                let mut parts = LossParts {
                    semantic: ls,
                    typing: 0.0,
                };
                let mut dt = vec![0.0; 2 * self.n_types];
                if typing {
                    let labels = pair.context_types.iter().chain(&pair.entity_types);
                    for (i, y) in labels.enumerate() {
                        let t = f.types[i];
                        let (l, d) = focal_term(t, *y, gamma);
                        parts.typing += l;
                        dt[i] = scale * d * t * (1.0 - t);
                    }
                }
                let Some(grad) = grad else { return parts };
                let dz = scale * dls * f.semantic * (1.0 - f.semantic);
                let dim = self.config.embed_dim;

                let mut dh: Vec<f64> = self.block(SCORE_W).iter().map(|w| dz * w).collect();
                {
                    let gw = &mut grad[self.blocks[SCORE_W].range()];
                    gw.iter_mut().zip(&f.joint).for_each(|(g, h)| *g += dz * h);
                }
                grad[self.blocks[SCORE_B].offset] += dz;
                if typing {
                    let (w, b) = self.split_grad_pair(grad, TYPE_W, TYPE_B);
                    let dx = affine_backward(self.block(TYPE_W), &f.joint, &dt, w, b);
                    dh.iter_mut().zip(dx).for_each(|(a, b)| *a += b);
                }
                let (d_all, d_prod) = dh.split_at(dim);
                let d_ctx: Vec<f64> = d_prod.iter().zip(&f.ent).map(|(d, e)| d * e).collect();
                let d_ent: Vec<f64> = d_prod.iter().zip(&f.ctx).map(|(d, c)| d * c).collect();

                let enc = self.encoder();
                let ent_seg = &pair.entity[1.min(pair.entity.len())..];
                let mut joint_ids = pair.context.clone();
                joint_ids.extend_from_slice(ent_seg);
                let g = &mut grad[self.blocks[JOINT_EMB].range()];
                enc.backward(g, &joint_ids, d_all);
                enc.backward(g, &pair.context, &d_ctx);
                enc.backward(g, ent_seg, &d_ent);
                let _ = &f.all;
                parts
            }
        }
    }

    fn split_grad_pair<'g>(
        &self,
        grad: &'g mut [f64],
        w: usize,
        b: usize,
    ) -> (&'g mut [f64], &'g mut [f64]) {
        let wr = self.blocks[w].range();
        let br = self.blocks[b].range();
        debug_assert_eq!(wr.end, br.start);
        let (head, tail) = grad[wr.start..br.end].split_at_mut(wr.len());
        (head, tail)
    }
}

/// Outcome of linking one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDecision {
    /// Chosen entity or NIL.
    pub answer: Answer,
    /// Blended score per candidate, in candidate order.
    pub scores: Vec<f64>,
    /// The entry had no candidates, so NIL was forced.
    pub no_candidates: bool,
}

/// Scores every candidate and applies the threshold rule: the best candidate
/// wins if its score is at least `ε`, otherwise the mention links to NIL.
pub fn link_entry(
    model: &LinkerModel,
    entry: &Entry,
    kb: &KnowledgeBase,
    config: &LinkerConfig,
) -> LinkDecision {
    if entry.candidates.is_empty() {
        return LinkDecision {
            answer: Answer::Nil,
            scores: Vec::new(),
            no_candidates: true,
        };
    }
    let enc = model.encoder();
    let ctx = enc.ids(&render_context(&entry.context));
    let scores: Vec<f64> = entry
        .candidates
        .iter()
        .map(|c| {
            let ent = enc.ids(&render_entity(&kb.get_or_bare(c)));
            model.score_ids(&ctx, &ent).combined(config.lambda)
        })
        .collect();
    let answer = match decide(&scores, config.nil_threshold) {
        Some(i) => Answer::Entity(entry.candidates[i].clone()),
        None => Answer::Nil,
    };
    LinkDecision {
        answer,
        scores,
        no_candidates: false,
    }
}
