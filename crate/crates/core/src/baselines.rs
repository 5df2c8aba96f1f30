//! Exact reference algorithms for cross-checking CMA.
//!
//! * [`exact_s`]: one full DP per start position, `O(mn²)`, any family.
//! * [`spring`]: DTW with a free start in the data, streamed column by column.
//! * [`greedy_backtracking`]: minimal-bottleneck path search for Fréchet.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::cma::{cma_search, SearchResult};
use crate::cost::{CostModel, Family};
use crate::distance::prefix_distances;
use crate::error::{Error, Result};
use crate::trajectory::{SubtrajRange, Trajectory};

/// For each start `i`, the last DP row against `τd[i:n]` gives
/// `Θ(τq, τd[i:j])` for every `j` at once.
pub fn exact_s(query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<SearchResult> {
    model.check_pair(query, data)?;
    let d = data.points();
    let mut best = SearchResult {
        data_id: data.id().to_string(),
        range: SubtrajRange { start: 1, end: 1 },
        distance: f64::INFINITY,
    };
    for anchor in 0..d.len() {
        let row = prefix_distances(query.points(), &d[anchor..], model);
        let (y, &score) = row
            .iter()
            .enumerate()
            .fold((0, &row[0]), |acc, (y, v)| if *v < *acc.1 { (y, v) } else { acc });
        if score < best.distance {
            best.distance = score;
            best.range = SubtrajRange {
                start: anchor + 1,
                end: anchor + y + 1,
            };
        }
    }
    Ok(best)
}

fn require(model: &CostModel, family: Family) -> Result<()> {
    if model.family() == family {
        Ok(())
    } else {
        Err(Error::WrongFamily {
            model: model.name().to_string(),
            expected: family.name(),
            found: model.family().name(),
        })
    }
}

/// SPRING: the DTW recursion with its first row reset to `sub(τq[1], τd[j])`,
/// consuming the data one point at a time and keeping one column of `m`
/// cells. Only the single best match is reported.
pub fn spring(query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<SearchResult> {
    require(model, Family::Warp)?;
    model.check_pair(query, data)?;
    let q = query.points();
    let m = q.len();
    let mut col = vec![f64::INFINITY; m];
    let mut col_start = vec![0usize; m];
    let mut next = vec![0.0; m];
    let mut next_start = vec![0usize; m];
    let mut best = (f64::INFINITY, 0, 0);

    for (j, point) in data.points().iter().enumerate() {
        next[0] = model.sub(&q[0], point);
        next_start[0] = j + 1;
        for i in 1..m {
            let (mut v, mut s) = (col[i - 1], col_start[i - 1]);
            if col[i] < v {
                (v, s) = (col[i], col_start[i]);
            }
            if next[i - 1] < v {
                (v, s) = (next[i - 1], next_start[i - 1]);
            }
            next[i] = v + model.sub(&q[i], point);
            next_start[i] = s;
        }
        if next[m - 1] < best.0 {
            best = (next[m - 1], next_start[m - 1], j + 1);
        }
        std::mem::swap(&mut col, &mut next);
        std::mem::swap(&mut col_start, &mut next_start);
    }
    Ok(SearchResult {
        data_id: data.id().to_string(),
        range: SubtrajRange {
            start: best.1,
            end: best.2,
        },
        distance: best.0,
    })
}

#[derive(Clone, Copy, Debug)]
struct Frontier {
    bottleneck: f64,
    i: usize,
    j: usize,
    start: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed: BinaryHeap is a max-heap and we pop the smallest bottleneck.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bottleneck
            .total_cmp(&self.bottleneck)
            .then_with(|| other.j.cmp(&self.j))
            .then_with(|| other.i.cmp(&self.i))
    }
}

/// Greedy backtracking for the discrete Fréchet distance: a best-first walk
/// over the pairwise cost grid from any cell of the first query row, moving
/// down, right or diagonally, keyed by the largest cost crossed so far. The
/// first cell popped on the last query row closes the optimal path.
pub fn greedy_backtracking(
    query: &Trajectory,
    data: &Trajectory,
    model: &CostModel,
) -> Result<SearchResult> {
    require(model, Family::Frechet)?;
    model.check_pair(query, data)?;
    let (q, d) = (query.points(), data.points());
    let (m, n) = (q.len(), d.len());
    let mut visited = vec![false; m * n];
    let mut heap: BinaryHeap<Frontier> = (0..n)
        .map(|j| Frontier {
            bottleneck: model.sub(&q[0], &d[j]),
            i: 0,
            j,
            start: j + 1,
        })
        .collect();

    while let Some(cell) = heap.pop() {
        let idx = cell.i * n + cell.j;
        if visited[idx] {
            continue;
        }
        visited[idx] = true;
        if cell.i == m - 1 {
            return Ok(SearchResult {
                data_id: data.id().to_string(),
                range: SubtrajRange {
                    start: cell.start,
                    end: cell.j + 1,
                },
                distance: cell.bottleneck,
            });
        }
        for (i, j) in [(cell.i + 1, cell.j), (cell.i, cell.j + 1), (cell.i + 1, cell.j + 1)] {
            if i < m && j < n && !visited[i * n + j] {
                heap.push(Frontier {
                    bottleneck: cell.bottleneck.max(model.sub(&q[i], &d[j])),
                    i,
                    j,
                    start: cell.start,
                });
            }
        }
    }
    unreachable!("the last query row is always reachable")
}

/// Single-pair search algorithm selectable at run time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    #[default]
    Cma,
    ExactS,
    Spring,
    GreedyBacktracking,
}

impl Algorithm {
    pub fn search(self, query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<SearchResult> {
        match self {
            Algorithm::Cma => cma_search(query, data, model),
            Algorithm::ExactS => exact_s(query, data, model),
            Algorithm::Spring => spring(query, data, model),
            Algorithm::GreedyBacktracking => greedy_backtracking(query, data, model),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cma => "cma",
            Algorithm::ExactS => "exacts",
            Algorithm::Spring => "spring",
            Algorithm::GreedyBacktracking => "gb",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cma" => Ok(Algorithm::Cma),
            "exacts" | "exact_s" => Ok(Algorithm::ExactS),
            "spring" => Ok(Algorithm::Spring),
            "gb" | "greedy" => Ok(Algorithm::GreedyBacktracking),
            _ => Err(Error::InvalidConfig(format!("unknown algorithm `{s}`"))),
        }
    }
}
