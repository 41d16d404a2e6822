//! Core of embedlab: load embedding stores, evaluate arithmetic over
//! embeddings, retrieve neighbors, reduce dimensions, inspect bias
//! directions, and describe charts.
//!
//! ```
//! use embedlab_core::{algebra, VectorStore};
//!
//! let store = VectorStore::from_rows(
//!     "toy",
//!     2,
//!     [("man", vec![0.5, 0.1]), ("king", vec![0.7, 0.33]), ("queen", vec![0.7, 0.9])],
//! )
//! .unwrap();
//! let orth = algebra::eval_str("man | (queen - king)", &store).unwrap();
//! assert_eq!(orth.name, "(man | (queen - king))");
//! assert!(orth.vector.as_slice()[1].abs() < 1e-12);
//! ```

pub mod algebra;
pub mod bias;
pub mod canonical;
mod error;
pub mod plotspec;
pub mod retrieval;
pub mod svg;
pub mod transforms;
pub mod vecstore;

pub use error::{Error, Result};
pub use retrieval::Metric;
pub use vecstore::{Embedding, EmbeddingSet, EmbeddingSource, StoreFormat, Vector, VectorStore};
