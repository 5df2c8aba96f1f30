//! Similar-subtrajectory search.
//!
//! Given a query trajectory and a data trajectory, find the contiguous
//! piece of the data closest to the query under an edit-style distance
//! (WED, EDR, ERP), DTW, or the discrete Fréchet distance. [`cma_search`]
//! does this exactly in `O(mn)` time; [`exact_s`], [`spring`] and
//! [`greedy_backtracking`] are slower references, and
//! [`brute_force_all`] ranks every subtrajectory.
//!
//! [`search_database`] and [`top_k_search`] scale the search to many
//! trajectories with optional pruning.
//!
//! ```
//! use subtraj::{cma_search, CostModel, Trajectory};
//!
//! let q = Trajectory::from_symbols("q", "abc").unwrap();
//! let d = Trajectory::from_symbols("d", "xxabcxx").unwrap();
//! let r = cma_search(&q, &d, &CostModel::wed_unit()).unwrap();
//! assert_eq!((r.range.start, r.range.end, r.distance), (3, 5, 0.0));
//! ```

pub mod baselines;
pub mod cma;
pub mod cost;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod generate;
pub mod matching;
pub mod oracle;
mod par;
pub mod pruning;
pub mod trajectory;

pub use baselines::{exact_s, greedy_backtracking, spring, Algorithm};
pub use cma::{cma_matrices, cma_search, reconstruct_matching, CMatrix, SMatrix, SearchResult};
pub use cost::{label_mismatch, point_distance, CostModel, Family, ModelParams, ModelSpec};
pub use dataset::{load_csv, read_csv, save_csv, write_csv, DataSource, Dataset, DatasetStats};
pub use distance::{full_distance, points_distance};
pub use error::{Error, Result};
pub use generate::{generate, BoundingBox, GeneratorSpec, WalkModel};
pub use matching::{conversion_cost, matching_cost, point_costs};
pub use oracle::{brute_force_all, quality_metrics, QualityMetrics, RankedEntry, RankedSubtrajectories};
pub use par::available as parallel_available;
pub use pruning::{
    build_grid, gbp_close_count, kpf_lower_bound, search_database, select_key_points, top_k_search, GridIndex,
    KpfMode, PruneConfig, PruneStats, SearchOutcome, TopKOutcome,
};
pub use trajectory::{MatchingSequence, Point, PointKind, SubtrajRange, Trajectory};
