//! Desk-scale linkers.
//!
//! Both scorers run on hashed-token embedding tables with mean pooling, which
//! keeps every equation trainable with exact gradients on a laptop:
//!
//! * bi-encoder: `s = σ(f(c)·g(e))`, typing heads `t_c = σ(W_c f(c) + b_c)`
//!   and `t_e = σ(W_e g(e) + b_e)`;
//! * cross-encoder: `s = σ(w·h([c,e]) + b)` and `[t_c, t_e] = σ(W h([c,e]) + b_t)`
//!   where the joint encoding `h` is `[mean(all) ; mean(context) ⊙ mean(entity)]`.
//!
//! Training minimises `L_s + L_t` (binary cross-entropy plus focal typing
//! loss) with Adam. At inference the semantic score is blended with the
//! cosine similarity of the predicted type vectors and thresholded to decide
//! NIL.

mod config;
mod encoder;
mod gradcheck;
mod linker;
pub mod loss;
mod pairs;
pub mod render;
mod train;

pub use config::{LinkerConfig, Mode};
pub use encoder::{Encoder, HashedMeanPool};
pub use gradcheck::{gradient_check, GradCheck};
pub use linker::{link_entry, Block, LinkDecision, LinkerModel, LossParts, PairScores};
pub use loss::{combined_score, decide, focal_loss, type_similarity};
pub use pairs::{encode_pair, make_training_pairs, EncodedPair, TrainingPair};
pub use train::{train, train_pairs, EpochLog, Trained};
