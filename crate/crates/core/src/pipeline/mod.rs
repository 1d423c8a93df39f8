//! End-to-end corpus construction: deduplication, article-level splits,
//! corpus statistics and the orchestrator that chains every stage.

mod config;
mod dedup;
mod run;
mod split;
mod stats;

pub use config::{
    AlignMethod, AlignSection, DedupSection, HashKind, Paths, PipelineConfig, PreprocessSection, SbdSection,
    SegmenterKind,
};
pub use dedup::{dedup_indices, dedup_key, dedup_pairs, fnv1a64, pair_hash};
pub use run::{
    align_corpus, bitext_rows, length_training_pairs, pair_documents, preprocess_corpus, read_translation,
    run_pipeline, segment_corpus, AlignerSetup, DocPair, PreprocessEvent, PreprocessKind, RunSummary, PARTIAL_SUFFIX,
    RUN_LOG,
};
pub use split::{split_corpus, Split, SplitSpec};
pub use stats::{corpus_stats, BitextRow, CorpusStats};
