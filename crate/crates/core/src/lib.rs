//! Build quality-controlled code–text datasets from raw source trees.
//!
//! The crate is organised as a set of stages that can be used on their own or
//! chained through [`pipeline::run_pipeline`]:
//!
//! * [`ingest`] discovers source files and attaches repository provenance.
//! * [`syntax`] parses files with tree-sitter and extracts functions, classes
//!   and inline comments.
//! * [`docstring`] detects docstring styles and parses them into metadata.
//! * [`filters`] applies the rule-based cleaning filters.
//! * [`consistency`] scores code–docstring alignment and gates pairs.
//! * [`dedup`] removes near-duplicates of held-out sets and builds
//!   repository-disjoint splits.
//! * [`stats`] computes dataset analytics.

pub mod config;
pub mod consistency;
pub mod docstring;
pub mod error;
pub mod filters;
pub mod hashing;
pub mod ingest;
pub mod io;
pub mod language;
pub mod pipeline;
pub mod records;
pub mod stats;
pub mod syntax;
pub mod dedup;

pub use error::{Error, Result};
pub use language::LanguageId;
