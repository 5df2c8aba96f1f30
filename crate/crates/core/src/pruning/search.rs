use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering::Relaxed};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::cma::SearchResult;
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::par;
use crate::trajectory::Trajectory;

use super::grid::{build_grid, gbp_close_count, GridIndex};
use super::kpf::KeyPointFilter;
use super::PruneConfig;

/// How many trajectories each stage disposed of.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub gbp_skipped: usize,
    pub kpf_skipped: usize,
    pub searched: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// `None` only when GBP discarded every trajectory.
    pub best: Option<SearchResult>,
    pub stats: PruneStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopKOutcome {
    /// Ascending by distance, then by database position.
    pub results: Vec<SearchResult>,
    pub stats: PruneStats,
}

#[derive(Default)]
struct Counters {
    gbp: AtomicUsize,
    kpf: AtomicUsize,
    searched: AtomicUsize,
}

impl Counters {
    fn snapshot(&self) -> PruneStats {
        PruneStats {
            gbp_skipped: self.gbp.load(Relaxed),
            kpf_skipped: self.kpf.load(Relaxed),
            searched: self.searched.load(Relaxed),
        }
    }
}

struct Pipeline<'a> {
    query: &'a Trajectory,
    model: &'a CostModel,
    config: &'a PruneConfig,
    grid: Option<GridIndex>,
    kpf: Option<KeyPointFilter<'a>>,
    counters: Counters,
    error: Mutex<Option<Error>>,
}

impl<'a> Pipeline<'a> {
    fn new(
        query: &'a Trajectory,
        database: &[Trajectory],
        model: &'a CostModel,
        config: &'a PruneConfig,
    ) -> Result<Self> {
        config.validate()?;
        if database.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        for data in database {
            model.check_pair(query, data)?;
        }
        let grid = if config.enable_gbp {
            Some(build_grid(query, config.grid_epsilon)?)
        } else {
            None
        };
        let kpf = config
            .enable_kpf
            .then(|| KeyPointFilter::new(query, model, config));
        Ok(Pipeline {
            query,
            model,
            config,
            grid,
            kpf,
            counters: Counters::default(),
            error: Mutex::new(None),
        })
    }

    /// Runs the filters against `threshold` (the distance a new result must
    /// beat) and then the engine. `None` means the trajectory was pruned.
    fn process(&self, data: &Trajectory, threshold: f64) -> Option<SearchResult> {
        if let Some(grid) = &self.grid {
            let close = gbp_close_count(grid, data).unwrap_or(0);
            if (close as f64) < self.config.mu * self.query.len() as f64 {
                self.counters.gbp.fetch_add(1, Relaxed);
                return None;
            }
        }
        if let Some(kpf) = &self.kpf {
            // Until something has been searched there is nothing to beat.
            if threshold.is_finite() && kpf.bound(data) >= threshold {
                self.counters.kpf.fetch_add(1, Relaxed);
                return None;
            }
        }
        self.counters.searched.fetch_add(1, Relaxed);
        match self.config.algorithm.search(self.query, data, self.model) {
            Ok(r) => Some(r),
            Err(e) => {
                self.error.lock().expect("error slot").get_or_insert(e);
                None
            }
        }
    }

    fn run(&self, database: &[Trajectory], threshold: impl Fn() -> f64 + Sync, accept: impl Fn(usize, SearchResult) + Sync) -> Result<PruneStats> {
        let parallel = self.config.parallel && par::available();
        par::for_each(database, parallel, |idx, data| {
            if let Some(r) = self.process(data, threshold()) {
                accept(idx, r);
            }
        });
        match self.error.lock().expect("error slot").take() {
            Some(e) => Err(e),
            None => Ok(self.counters.snapshot()),
        }
    }
}

/// Distances are non-negative, so their bit patterns order like the values
/// and a relaxed atomic is enough to share a monotone threshold.
struct SharedThreshold(AtomicU64);

impl SharedThreshold {
    fn new() -> Self {
        SharedThreshold(AtomicU64::new(f64::INFINITY.to_bits()))
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Relaxed))
    }

    fn set(&self, v: f64) {
        self.0.store(v.to_bits(), Relaxed);
    }
}

struct Ranked {
    distance: f64,
    idx: usize,
    result: SearchResult,
}

impl Ranked {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.idx.cmp(&other.idx))
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// The closest subtrajectory over the whole database.
///
/// Ties between trajectories go to the earlier one in `database` when run
/// sequentially; in parallel the distance is the same but the winner among
/// equals may differ.
pub fn search_database(
    query: &Trajectory,
    database: &[Trajectory],
    model: &CostModel,
    config: &PruneConfig,
) -> Result<SearchOutcome> {
    let pipeline = Pipeline::new(query, database, model, config)?;
    let threshold = SharedThreshold::new();
    let best: Mutex<Option<Ranked>> = Mutex::new(None);
    let stats = pipeline.run(
        database,
        || threshold.get(),
        |idx, result| {
            let candidate = Ranked {
                distance: result.distance,
                idx,
                result,
            };
            let mut slot = best.lock().expect("best slot");
            if slot.as_ref().is_none_or(|b| candidate < *b) {
                threshold.set(candidate.distance);
                *slot = Some(candidate);
            }
        },
    )?;
    Ok(SearchOutcome {
        best: best.into_inner().expect("best slot").map(|r| r.result),
        stats,
    })
}

/// The `k` trajectories with the smallest best-subtrajectory distance, one
/// result per trajectory. KPF prunes against the current `k`-th distance.
pub fn top_k_search(
    query: &Trajectory,
    database: &[Trajectory],
    model: &CostModel,
    k: usize,
    config: &PruneConfig,
) -> Result<TopKOutcome> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let pipeline = Pipeline::new(query, database, model, config)?;
    let threshold = SharedThreshold::new();
    let heap: Mutex<BinaryHeap<Ranked>> = Mutex::new(BinaryHeap::with_capacity(k + 1));
    let stats = pipeline.run(
        database,
        || threshold.get(),
        |idx, result| {
            let mut heap = heap.lock().expect("top-k heap");
            heap.push(Ranked {
                distance: result.distance,
                idx,
                result,
            });
            if heap.len() > k {
                heap.pop();
            }
            if heap.len() == k {
                threshold.set(heap.peek().expect("k >= 1").distance);
            }
        },
    )?;
    let results = heap
        .into_inner()
        .expect("top-k heap")
        .into_sorted_vec()
        .into_iter()
        .map(|r| r.result)
        .collect();
    Ok(TopKOutcome { results, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cma::cma_search;
    use crate::cost::point_distance;
    use crate::pruning::KpfMode;

    fn line(id: &str, x0: f64, y0: f64, len: usize) -> Trajectory {
        let pts: Vec<(f64, f64)> = (0..len).map(|t| (x0 + t as f64 * 0.5, y0 + (t % 3) as f64 * 0.2)).collect();
        Trajectory::from_xy(id, &pts).unwrap()
    }

    fn database() -> Vec<Trajectory> {
        (0..12)
            .map(|k| line(&format!("t{k}"), (k * 7 % 5) as f64 * 3.0, (k % 4) as f64 * 2.0, 6 + k))
            .collect()
    }

    fn exhaustive(q: &Trajectory, db: &[Trajectory], model: &CostModel) -> Vec<f64> {
        let mut d: Vec<f64> = db.iter().map(|t| cma_search(q, t, model).unwrap().distance).collect();
        d.sort_by(f64::total_cmp);
        d
    }

    #[test]
    fn finds_planted_copy() {
        let mut db: Vec<Trajectory> = (0..9).map(|k| line(&format!("far{k}"), 100.0 * (k + 1) as f64, 0.0, 8)).collect();
        let q = line("q", 0.0, 0.0, 5);
        db.insert(4, q.with_id("copy"));
        let wed = CostModel::erp((0.0, 0.0)).unwrap();
        let out = search_database(&q, &db, &wed, &PruneConfig::default()).unwrap();
        let best = out.best.unwrap();
        assert_eq!(best.distance, 0.0);
        assert_eq!(best.data_id, "copy");
    }

    #[test]
    fn safe_pipeline_is_exact() {
        let db = database();
        let q = line("q", 3.2, 2.1, 5);
        let dtw = CostModel::dtw(point_distance);
        let truth = exhaustive(&q, &db, &dtw)[0];
        for parallel in [false, true] {
            for rate in [0.2, 1.0] {
                let config = PruneConfig { rate, parallel, ..Default::default() };
                let out = search_database(&q, &db, &dtw, &config).unwrap();
                assert_eq!(out.best.unwrap().distance, truth);
                assert_eq!(out.stats.gbp_skipped + out.stats.kpf_skipped + out.stats.searched, db.len());
            }
        }
        let off = search_database(&q, &db, &dtw, &PruneConfig::exhaustive()).unwrap();
        assert_eq!(off.stats.searched, db.len());
        assert_eq!(off.best.unwrap().distance, truth);
    }

    #[test]
    fn top_k_matches_sorted_scan() {
        let db = database();
        let q = line("q", 1.0, 0.0, 4);
        let dtw = CostModel::dtw(point_distance);
        let truth = exhaustive(&q, &db, &dtw);
        for k in [1, 5, db.len(), db.len() + 3] {
            let out = top_k_search(&q, &db, &dtw, k, &PruneConfig::default()).unwrap();
            let got: Vec<f64> = out.results.iter().map(|r| r.distance).collect();
            assert_eq!(got, truth[..k.min(db.len())]);
        }
        let head = top_k_search(&q, &db, &dtw, 1, &PruneConfig::default()).unwrap();
        let best = search_database(&q, &db, &dtw, &PruneConfig::default()).unwrap();
        assert_eq!(head.results[0].distance, best.best.unwrap().distance);
    }

    #[test]
    fn gbp_can_discard_everything() {
        let db = database();
        let q = line("q", 500.0, 500.0, 4);
        let config = PruneConfig { enable_gbp: true, grid_epsilon: 1.0, ..Default::default() };
        let out = search_database(&q, &db, &CostModel::dtw(point_distance), &config).unwrap();
        assert!(out.best.is_none());
        assert_eq!(out.stats.gbp_skipped, db.len());
    }

    #[test]
    fn estimated_mode_never_beats_optimum() {
        let db = database();
        let q = line("q", 3.0, 2.0, 7);
        let dtw = CostModel::dtw(point_distance);
        let config = PruneConfig { kpf_mode: KpfMode::Estimated, rate: 0.3, ..Default::default() };
        let out = search_database(&q, &db, &dtw, &config).unwrap();
        assert!(out.best.unwrap().distance >= exhaustive(&q, &db, &dtw)[0]);
    }

    #[test]
    fn errors() {
        let q = line("q", 0.0, 0.0, 3);
        let dtw = CostModel::dtw(point_distance);
        assert!(matches!(search_database(&q, &[], &dtw, &PruneConfig::default()), Err(Error::EmptyDatabase)));
        assert!(matches!(top_k_search(&q, &database(), &dtw, 0, &PruneConfig::default()), Err(Error::InvalidConfig(_))));
        let config = PruneConfig { algorithm: crate::baselines::Algorithm::GreedyBacktracking, ..Default::default() };
        assert!(matches!(search_database(&q, &database(), &dtw, &config), Err(Error::WrongFamily { .. })));
    }
}
