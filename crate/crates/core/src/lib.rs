//! Building blocks for turning paired bilingual documents into a
//! sentence-aligned parallel corpus.

pub mod align;
pub mod error;
pub mod eval;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod sbd;
pub mod scoring;

pub use error::{Error, Result};
