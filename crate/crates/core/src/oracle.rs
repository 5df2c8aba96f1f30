//! Brute-force ground truth and result-quality metrics.
//!
//! [`brute_force_all`] evaluates the whole-trajectory distance on every one
//! of the `n(n+1)/2` subtrajectories, `O(mn³)` overall. It shares no code
//! with the search engines beyond the recursions in [`crate::distance`].

use serde::{Deserialize, Serialize};

use crate::cma::SearchResult;
use crate::cost::CostModel;
use crate::distance::points_distance;
use crate::error::{Error, Result};
use crate::par;
use crate::trajectory::{SubtrajRange, Trajectory};

/// Largest number of subtrajectories enumerated unless overridden.
pub const DEFAULT_BUDGET: usize = 50_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "SUBTRAJ_BUDGET";

/// Relative tolerance under which two distances count as equal.
pub const DISTANCE_RTOL: f64 = 1e-9;

pub fn budget_from_env() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub range: SubtrajRange,
    pub distance: f64,
}

/// Every subtrajectory of one data trajectory, ascending by distance, then
/// by `(start, end)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedSubtrajectories {
    pub data_id: String,
    pub data_len: usize,
    pub entries: Vec<RankedEntry>,
}

impl RankedSubtrajectories {
    pub fn head(&self) -> &RankedEntry {
        &self.entries[0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn brute_force_all(
    query: &Trajectory,
    data: &Trajectory,
    model: &CostModel,
    budget: usize,
) -> Result<RankedSubtrajectories> {
    model.check_pair(query, data)?;
    let n = data.len();
    let total = n * (n + 1) / 2;
    if total > budget {
        return Err(Error::BudgetExceeded {
            ranges: total,
            budget,
        });
    }
    let ranges: Vec<SubtrajRange> = (1..=n)
        .flat_map(|start| (start..=n).map(move |end| SubtrajRange { start, end }))
        .collect();
    // Only worth spreading out when each task has some meat.
    let parallel = par::available() && total * query.len() > 4096;
    let mut entries = par::map(&ranges, parallel, |_, &range| RankedEntry {
        range,
        distance: points_distance(query.points(), data.slice(range), model),
    });
    entries.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.range.cmp(&b.range)));
    Ok(RankedSubtrajectories {
        data_id: data.id().to_string(),
        data_len: n,
        entries,
    })
}

/// Approximation ratio, mean rank and relative rank of one answer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    /// `found / optimum`; 1 for an optimal answer, infinite when the optimum
    /// is 0 and the answer is not.
    pub ar: f64,
    /// 1-based rank of the answer's distance among all subtrajectories,
    /// counting equal distances optimistically.
    pub mr: usize,
    /// Fraction of subtrajectories strictly better than the answer.
    pub rr: f64,
}

fn same_distance(a: f64, b: f64) -> bool {
    (a - b).abs() <= DISTANCE_RTOL * a.abs().max(b.abs()).max(1.0)
}

pub fn quality_metrics(found: &SearchResult, truth: &RankedSubtrajectories) -> Result<QualityMetrics> {
    if found.data_id != truth.data_id || found.range.end > truth.data_len {
        return Err(Error::PairMismatch {
            expected: truth.data_id.clone(),
            found: found.data_id.clone(),
        });
    }
    let head = truth.head().distance;
    let ar = if same_distance(found.distance, head) {
        1.0
    } else if head == 0.0 {
        f64::INFINITY
    } else {
        found.distance / head
    };
    let better = truth
        .entries
        .iter()
        .take_while(|e| e.distance < found.distance && !same_distance(e.distance, found.distance))
        .count();
    Ok(QualityMetrics {
        ar,
        mr: better + 1,
        rr: better as f64 / truth.len() as f64,
    })
}
