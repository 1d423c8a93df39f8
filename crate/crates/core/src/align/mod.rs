//! Sentence aligners: length-based, lexicon-augmented and translation-anchored.

pub mod bleualign;
pub mod gale_church;
pub mod ibm1;
pub mod moore;
pub mod normal;

pub use bleualign::{bleualign, find_anchors, score_matrix, BleualignConfig, ScoreMatrix};
pub use gale_church::{
    estimate_length_params, gc_align, gc_align_by_paragraph, gc_cost, LengthParams, MOVES,
};
pub use ibm1::{train_ibm1, Ibm1Trainer, TranslationTable};
pub use moore::{length_pass, moore_align, moore_align_corpus, LatticePosteriors, MooreConfig, MooreModel};
pub use normal::std_normal_cdf;
