//! Family-resemblance clustering.
//!
//! Points are linked to their k nearest neighbors, each link is scored with a
//! resemblance function and min-max normalized, links below a threshold are
//! dropped, and the connected components of what remains are the clusters
//! ("families"). Chains of pairwise resemblance are enough to join a family;
//! no single trait has to be shared by all members.
//!
//! ```
//! use wfr::{fit, Dataset, ResemblanceKind, WfrParams};
//!
//! let data = Dataset::from_rows(&[[0.0, 0.0], [0.1, 0.0], [0.2, 0.1], [5.0, 5.0], [5.1, 5.0], [5.0, 5.2]]).unwrap();
//! let params = WfrParams::new(ResemblanceKind::Log, 2).with_k(2).with_threshold(0.0);
//! let result = fit(&data, &params).unwrap();
//! assert_eq!(result.labels().as_slice(), &[0, 0, 0, 1, 1, 1]);
//! let unseen = Dataset::from_rows(&[[0.05, 0.05]]).unwrap();
//! assert_eq!(result.model.predict(&unseen).unwrap().as_slice(), &[0]);
//! ```

pub mod datasets;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod model;
pub mod neighbors;
pub mod persist;
pub mod resemblance;
pub mod threshold;
mod types;
pub mod union_find;

pub use error::{Result, WfrError};
pub use graph::OutlierPolicy;
pub use model::{fit, FitResult, ModelState, ThresholdMode, WfrParams};
pub use neighbors::KnnBackend;
pub use threshold::GridSearch;
pub use types::{
    euclidean_distance, Dataset, Labels, ResemblanceConfig, ResemblanceKind, DEFAULT_EPS, OUTLIER,
};
