//! Non-neural machinery for query-based meeting summarization.
//!
//! The pipeline is locate-then-cluster-then-summarize: gold relevant spans
//! are extracted from a meeting ([`locator`]), each utterance is optionally
//! compressed through a multi-sentence word graph ([`compressor`],
//! [`wordgraph`]), the resulting short script is handed to a summarizer
//! ([`bridge`]) and the summary is scored with ROUGE ([`rouge`]).
//! [`harness`] wires the stages into experiments and result tables, and
//! [`corpus`] reads the meeting and news corpora.

pub mod bridge;
pub mod compressor;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod locator;
pub mod rouge;
pub mod wordgraph;

pub use error::{Error, Result};
