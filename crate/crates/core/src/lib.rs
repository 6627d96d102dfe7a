//! Public-private graphs: construction from bibliographic records, overlap
//! statistics, and fast shortest-path and personalized PageRank queries that
//! reuse work precomputed on the shared public graph.

pub mod bench;
pub mod builder;
pub mod error;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod model;
pub mod par;
pub mod persist;
pub mod ppr;
pub mod sketch;
pub mod synth;

pub use error::{Error, Result};
pub use model::{view, PPGraph, PrivateGraph, PublicGraph, Topology, UserView, VertexId};
pub use par::Parallelism;
