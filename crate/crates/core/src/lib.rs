//! Anti-centrality scoring of directed transaction cycles.
//!
//! The pipeline takes a cleaned transaction network, partitions it into
//! communities, enumerates short directed cycles inside each community and
//! scores every cycle by how dispersed its accounts are in a second-order
//! random-walk embedding (the spread number) against how conspicuous they are
//! under classical centrality measures. Cycles that are spread out in the
//! embedding yet unremarkable by betweenness and degree score high on `R`.
//!
//! The numeric code is generic over the scalar type. Centrality measures that
//! only need field arithmetic accept any [`Scalar`], including the exact
//! [`Exact`] rational type, while the embedding and scoring code requires a
//! floating point [`Real`].

pub mod alias;
pub mod centrality;
pub mod community;
pub mod cycles;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod scalar;
pub mod scoring;
pub mod seed;
pub mod synth;
pub mod train;
pub mod walk;

pub use centrality::{CentralityVector, Measure};
pub use community::{detect_communities, CommunityId, CommunityPartition};
pub use cycles::{detect_cycles, detect_paths, Cycle, DirectedPath, LengthBounds, PathReport};
pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use graph::{
    build_graph, clean_filter, parse_edge_list, CleanThresholds, EdgeAttr, NodeId, ParseMode,
    ParseOptions, TransactionEdge, TxGraph,
};
pub use scalar::{Real, Scalar};
pub use scoring::{CentralityVariant, CnsOutcome, CnsResult, CycleScoreCard};
pub use train::{TrainMode, TrainParams};
pub use walk::WalkParams;

/// Exact rational scalar, used to check centrality arithmetic without rounding.
pub type Exact = num_rational::Rational64;

/// Precision used for centralities, CNS ratios and score cards.
pub type Score = f64;

/// Embedding precision; matches the 32-bit on-disk format.
pub type Embedding = EmbeddingMatrix<f32>;

/// Score card at report precision.
pub type ScoreCard = CycleScoreCard<Score>;
