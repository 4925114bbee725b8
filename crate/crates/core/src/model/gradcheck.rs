use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::linker::LinkerModel;
use super::pairs::EncodedPair;
use crate::rng::stage_rng;

/// Largest relative error per parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub block: &'static str,
    pub checked: usize,
    pub max_relative_error: f64,
}

/// Compares analytic gradients of the total loss over `pairs` with central
/// differences at step `h`. Up to `per_block` parameters are probed in each
/// block; embedding rows are drawn from the rows the pairs actually touch.
pub fn gradient_check(
    model: &LinkerModel,
    pairs: &[EncodedPair],
    typing: bool,
    per_block: usize,
    h: f64,
    seed: u64,
) -> Vec<GradCheck> {
    let mut grad = vec![0.0; model.params().len()];
    for p in pairs {
        model.pair_loss(p, typing, Some(&mut grad), 1.0);
    }
    let loss_at = |m: &LinkerModel| -> f64 {
        pairs
            .iter()
            .map(|p| m.pair_loss(p, typing, None, 1.0).total())
            .sum()
    };

    let used_rows: BTreeSet<usize> = pairs
        .iter()
        .flat_map(|p| p.context.iter().chain(&p.entity).copied())
        .collect();
    let used_rows: Vec<usize> = used_rows.into_iter().collect();

    let mut rng = stage_rng(seed, "gradcheck");
    let mut probe = model.clone();
    let mut out = Vec::new();
    for block in model.blocks() {
        if block.is_empty() {
            continue;
        }
        let embedding = block.rows == model.config().hash_vocab;
        let mut picks = BTreeSet::new();
        let target = per_block.min(if embedding {
            used_rows.len() * block.cols
        } else {
            block.len()
        });
        while picks.len() < target {
            let idx = if embedding {
                let row = used_rows[rng.gen_range(0..used_rows.len())];
                row * block.cols + rng.gen_range(0..block.cols)
            } else {
                rng.gen_range(0..block.len())
            };
            picks.insert(block.offset + idx);
        }
        let mut worst: f64 = 0.0;
        for &i in &picks {
            let orig = probe.params()[i];
            probe.params_mut()[i] = orig + h;
            let up = loss_at(&probe);
            probe.params_mut()[i] = orig - h;
            let down = loss_at(&probe);
            probe.params_mut()[i] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grad[i];
            let denom = analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max((analytic - numeric).abs() / denom);
        }
        out.push(GradCheck {
            block: block.name,
            checked: picks.len(),
            max_relative_error: worst,
        });
    }
    out
}
