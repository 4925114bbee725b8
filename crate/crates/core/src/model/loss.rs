//! Scalar pieces of the objective and of the decision rule.

use libm::{exp, log, pow, sqrt};

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before logs.
pub const PROB_CLAMP: f64 = 1e-7;

/// Logistic function, kept strictly inside `(0, 1)` for any finite input.
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + exp(-z))
    } else {
        let e = exp(z);
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Clamped probability and the derivative of the clamp (0 where it bites).
fn clamp(p: f64) -> (f64, f64) {
    if p < PROB_CLAMP {
        (PROB_CLAMP, 0.0)
    } else if p > 1.0 - PROB_CLAMP {
        (1.0 - PROB_CLAMP, 0.0)
    } else {
        (p, 1.0)
    }
}

/// Binary cross-entropy of probability `p` against `label`, and `dL/dp`.
pub fn bce(p: f64, label: f64) -> (f64, f64) {
    let (q, dq) = clamp(p);
    let loss = -(label * log(q) + (1.0 - label) * log(1.0 - q));
    let grad = (-label / q + (1.0 - label) / (1.0 - q)) * dq;
    (loss, grad)
}

/// Focal loss of one probability against a 0/1 label, and `dL/dt`.
pub fn focal_term(t: f64, y: f64, gamma: f64) -> (f64, f64) {
    let (q, dq) = clamp(t);
    let lq = log(q);
    let l1q = log(1.0 - q);
    let pos = pow(1.0 - q, gamma);
    let neg = pow(q, gamma);
    let loss = -(y * pos * lq + (1.0 - y) * neg * l1q);
    // gamma * x^(gamma - 1) vanishes with gamma; skip it to avoid 0 * inf
    let dpos = if gamma == 0.0 {
        0.0
    } else {
        -gamma * pow(1.0 - q, gamma - 1.0)
    };
    let dneg = if gamma == 0.0 {
        0.0
    } else {
        gamma * pow(q, gamma - 1.0)
    };
    let d = y * (dpos * lq + pos / q) + (1.0 - y) * (dneg * l1q - neg / (1.0 - q));
    (loss, -d * dq)
}

/// `-Σ_i [ y_i (1-t_i)^γ log t_i + (1-y_i) t_i^γ log(1-t_i) ]`.
pub fn focal_loss(t: &[f64], y: &[f64], gamma: f64) -> f64 {
    assert_eq!(t.len(), y.len(), "prediction and label widths differ");
    t.iter()
        .zip(y)
        .map(|(t, y)| focal_term(*t, *y, gamma).0)
        .sum()
}

/// Cosine similarity of two type vectors; 0 when either has zero norm.
pub fn type_similarity(tc: &[f64], te: &[f64]) -> f64 {
    let dot: f64 = tc.iter().zip(te).map(|(a, b)| a * b).sum();
    let na: f64 = tc.iter().map(|a| a * a).sum();
    let nb: f64 = te.iter().map(|b| b * b).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (sqrt(na) * sqrt(nb))
}

/// `λ·s_s + (1-λ)·s_t`.
pub fn combined_score(semantic: f64, typed: f64, lambda: f64) -> f64 {
    lambda * semantic + (1.0 - lambda) * typed
}

/// Index of the best candidate if its score reaches `threshold`; ties go to
/// the earliest candidate. `None` means NIL.
pub fn decide(scores: &[f64], threshold: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.filter(|(_, s)| *s >= threshold).map(|(i, _)| i)
}
