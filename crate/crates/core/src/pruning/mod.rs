//! Database-scale search with two filters in front of the exact engine.
//!
//! * GBP (grid-based pruning) hashes the query's points into square cells
//!   and drops a data trajectory when fewer than `μ·m` query points have a
//!   data point in the same or a neighbouring cell. It is a heuristic.
//! * KPF (key-point filtering) sums a per-point lower bound on conversion
//!   cost over sampled query points and drops the trajectory when that
//!   bound already reaches the best distance found so far. In
//!   [`KpfMode::Safe`] the bound is admissible, so pruning is lossless.
//!
//! [`PruneConfig::default`] is exact: GBP off, KPF safe.

mod grid;
mod kpf;
mod search;

pub use grid::{build_grid, gbp_close_count, GridIndex};
pub use kpf::{kpf_lower_bound, select_key_points, KpfMode};
pub use search::{search_database, top_k_search, PruneStats, SearchOutcome, TopKOutcome};

use crate::baselines::Algorithm;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PruneConfig {
    /// GBP keeps a trajectory when at least `mu·m` query points are close.
    pub mu: f64,
    /// Fraction of query points used as key points, in `(0, 1]`.
    pub rate: f64,
    pub kpf_mode: KpfMode,
    pub enable_gbp: bool,
    pub enable_kpf: bool,
    /// GBP cell side, in coordinate units.
    pub grid_epsilon: f64,
    /// Spread trajectories over the rayon pool. Ignored without the
    /// `parallel` feature.
    pub parallel: bool,
    /// Engine run on trajectories that survive the filters.
    pub algorithm: Algorithm,
}

impl PruneConfig {
    pub const DEFAULT_MU: f64 = 0.4;
    pub const DEFAULT_RATE: f64 = 0.05;
    pub const DEFAULT_GRID_EPSILON: f64 = 0.8e-4;

    /// GBP on and the scaled KPF estimate: faster, may miss the optimum.
    pub fn heuristic() -> Self {
        PruneConfig {
            enable_gbp: true,
            kpf_mode: KpfMode::Estimated,
            ..Self::default()
        }
    }

    /// Both filters off: every trajectory goes through the engine.
    pub fn exhaustive() -> Self {
        PruneConfig {
            enable_gbp: false,
            enable_kpf: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidConfig(format!("mu must be in [0, 1], got {}", self.mu)));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "key-point rate must be in (0, 1], got {}",
                self.rate
            )));
        }
        if !(self.grid_epsilon > 0.0 && self.grid_epsilon.is_finite()) {
            return Err(Error::NonPositiveEpsilon(self.grid_epsilon));
        }
        Ok(())
    }
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            mu: Self::DEFAULT_MU,
            rate: Self::DEFAULT_RATE,
            kpf_mode: KpfMode::Safe,
            enable_gbp: false,
            enable_kpf: true,
            grid_epsilon: Self::DEFAULT_GRID_EPSILON,
            parallel: true,
            algorithm: Algorithm::Cma,
        }
    }
}
