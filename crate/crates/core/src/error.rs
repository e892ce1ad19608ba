use std::fmt;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A rejected row of a delimited edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub field: String,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: field `{}`: {}", self.line, self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("{} malformed row(s): {}", .0.len(), join_rows(.0))]
    MalformedRows(Vec<RowError>),
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("graph is empty")]
    EmptyGraph,
    #[error("walk corpus is empty")]
    EmptyCorpus,
    #[error("input series has no defined values")]
    EmptyInput,
    #[error("subject spans communities {0} and {1}")]
    SpansCommunities(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    PageRankDiverged { iterations: usize, residual: f64 },
    #[error("infeasible synthetic spec: {0}")]
    Infeasible(String),
    #[error("bad embedding file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_rows(rows: &[RowError]) -> String {
    let shown: Vec<String> = rows.iter().take(10).map(|r| r.to_string()).collect();
    let mut s = shown.join("; ");
    if rows.len() > 10 {
        s.push_str(&format!("; and {} more", rows.len() - 10));
    }
    s
}
