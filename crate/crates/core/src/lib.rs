//! Static analysis of visual-programming code: AST construction, structural
//! metrics, VLM call-site and query-token metrics, corpus runs and reports.

pub mod cli;
pub mod corpus;
pub mod metrics;
pub mod parser;
pub mod report;
pub mod vlm;
