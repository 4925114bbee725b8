use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::config::LinkerConfig;
use super::linker::LinkerModel;
use super::pairs::{encode_pair, make_training_pairs, EncodedPair};
use crate::dataset::Entry;
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::rng::stage_rng;
use crate::typesys::{TypeAssignment, TypeSystem};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// Mean per-pair losses over one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_loss: f64,
    pub mean_semantic: f64,
    pub mean_typing: f64,
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub model: LinkerModel,
    pub log: Vec<EpochLog>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.step += 1;
        let c1 = 1.0 - libm::pow(BETA1, self.step as f64);
        let c2 = 1.0 - libm::pow(BETA2, self.step as f64);
        for i in 0..params.len() {
            let g = grad[i];
            if g == 0.0 && self.m[i] == 0.0 && self.v[i] == 0.0 {
                continue;
            }
            self.m[i] = BETA1 * self.m[i] + (1.0 - BETA1) * g;
            self.v[i] = BETA2 * self.v[i] + (1.0 - BETA2) * g * g;
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr * mh / (libm::sqrt(vh) + ADAM_EPS);
        }
    }
}

/// Trains a fresh model on annotated entries.
pub fn train(
    entries: &[Entry],
    kb: &KnowledgeBase,
    system: &TypeSystem,
    assignment: &TypeAssignment,
    config: &LinkerConfig,
) -> Result<Trained> {
    let pairs = make_training_pairs(entries, kb, system, assignment)?;
    let model = LinkerModel::new(*config, system.len())?;
    let enc = model.encoder();
    let encoded: Vec<EncodedPair> = pairs.iter().map(|p| encode_pair(p, &enc)).collect();
    train_pairs(model, &encoded)
}

/// Continues training `model` on encoded pairs. Pairs of the same entry must
/// be contiguous; a minibatch holds `batch_size` entries and averages the loss
/// over its pairs. Batch order is reshuffled every epoch from `rng_seed`.
pub fn train_pairs(mut model: LinkerModel, pairs: &[EncodedPair]) -> Result<Trained> {
    let config = *model.config();
    let mut groups: Vec<core::ops::Range<usize>> = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if pairs[g.start].entry_id == p.entry_id => g.end = i + 1,
            _ => groups.push(i..i + 1),
        }
    }
    if groups.is_empty() && config.epochs > 0 {
        return Err(Error::EmptyTrainingSet);
    }

    let mut rng = stage_rng(config.rng_seed, "shuffle");
    let mut adam = Adam::new(model.params().len());
    let mut grad = vec![0.0; model.params().len()];
    let mut log = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..groups.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let (mut sum_s, mut sum_t, mut n) = (0.0, 0.0, 0usize);
        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch_pairs: usize = chunk.iter().map(|&g| groups[g].len()).sum();
            let scale = 1.0 / batch_pairs as f64;
            grad.iter_mut().for_each(|g| *g = 0.0);
            let (mut bs, mut bt) = (0.0, 0.0);
            for &g in chunk {
                for pair in &pairs[groups[g].clone()] {
                    let parts = model.pair_loss(pair, config.typing, Some(&mut grad), scale);
                    bs += parts.semantic;
                    bt += parts.typing;
                }
            }
            if !(bs + bt).is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss { epoch, batch });
            }
            adam.update(model.params_mut(), &grad, config.learning_rate);
            sum_s += bs;
            sum_t += bt;
            n += batch_pairs;
        }
        let n = n.max(1) as f64;
        log.push(EpochLog {
            epoch,
            mean_loss: (sum_s + sum_t) / n,
            mean_semantic: sum_s / n,
            mean_typing: sum_t / n,
        });
    }
    Ok(Trained { model, log })
}
