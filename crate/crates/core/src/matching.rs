//! Direct evaluation of one matching sequence's conversion cost.
//!
//! For each query point `τq[i]` matched to `τd[a_i]`, the predecessor's match
//! `k = a_{i-1}` decides how it is priced:
//!
//! * `k == a_i`: the point is deleted,
//! * `k == a_i - 1`: the point is substituted,
//! * `k < a_i - 1`: the point is substituted and `τd[k+1:a_i-1]` inserted.
//!
//! The edit family prices deletion and insertion with `del`/`ins`. DTW has no
//! free-standing gaps: a deleted query point is charged its substitution, and
//! each inserted data point is charged against `τq[i-1]` or `τq[i]`, split at
//! the cheapest place. Fréchet prices like DTW but aggregates by max.
//!
//! The leading run `a_1 = … = a_r` has no predecessor. Exactly one of its
//! points is substituted and the rest deleted; the edit family picks the
//! cheapest member to substitute (the others already pay a substitution).

use crate::cost::{CostModel, Family};
use crate::error::{Error, Result};
use crate::trajectory::{MatchingSequence, Trajectory};

/// Per-point conversion costs `Cost(τq[i], τd[a_i])`, without the prefix and
/// suffix insertions.
pub fn point_costs(
    query: &Trajectory,
    data: &Trajectory,
    seq: &MatchingSequence,
    model: &CostModel,
) -> Result<Vec<f64>> {
    model.check_pair(query, data)?;
    if seq.len() != query.len() {
        return Err(Error::LengthMismatch {
            expected: query.len(),
            found: seq.len(),
        });
    }
    seq.check_bounds(data.len())?;

    let q = query.points();
    let d = data.points();
    // 0-based copies of the matches.
    let a: Vec<usize> = seq.indices().iter().map(|&x| x - 1).collect();
    let sub = |i: usize, j: usize| model.sub(&q[i], &d[j]);
    let mut costs = vec![0.0; q.len()];

    let run = a.iter().take_while(|&&x| x == a[0]).count();
    match model.family() {
        Family::Edit => {
            let del = |i: usize| model.del(&q[i]).expect("edit family defines del");
            let chosen = (0..run)
                .min_by(|&s, &t| {
                    let cs = sub(s, a[0]) - del(s);
                    let ct = sub(t, a[0]) - del(t);
                    cs.partial_cmp(&ct).expect("finite costs")
                })
                .expect("run is nonempty");
            for (i, cost) in costs.iter_mut().enumerate().take(run) {
                *cost = if i == chosen { sub(i, a[0]) } else { del(i) };
            }
        }
        Family::Warp | Family::Frechet => {
            for (i, cost) in costs.iter_mut().enumerate().take(run) {
                *cost = sub(i, a[0]);
            }
        }
    }

    for i in run..q.len() {
        let (k, j) = (a[i - 1], a[i]);
        costs[i] = match model.family() {
            Family::Edit => {
                if j == k {
                    model.del(&q[i]).expect("edit family defines del")
                } else {
                    let gap: f64 = d[k + 1..j]
                        .iter()
                        .map(|p| model.ins(p).expect("edit family defines ins"))
                        .sum();
                    gap + sub(i, j)
                }
            }
            Family::Warp => {
                if j <= k + 1 {
                    sub(i, j)
                } else {
                    warp_gap(&|p| sub(i - 1, p), &|p| sub(i, p), k, j, |x, y| x + y)
                        + sub(i, j)
                }
            }
            Family::Frechet => {
                if j <= k + 1 {
                    sub(i, j)
                } else {
                    warp_gap(&|p| sub(i - 1, p), &|p| sub(i, p), k, j, f64::max).max(sub(i, j))
                }
            }
        };
    }
    Ok(costs)
}

/// Cheapest way to cover the inserted points `k+1..j-1` (0-based) with the
/// previous query point on the left and the current one on the right:
/// `min over k <= t < j` of `fold(prev[k+1..=t]) ⊕ fold(cur[t+1..j])`.
fn warp_gap(
    prev: &dyn Fn(usize) -> f64,
    cur: &dyn Fn(usize) -> f64,
    k: usize,
    j: usize,
    combine: impl Fn(f64, f64) -> f64,
) -> f64 {
    // right[t - k] = fold of cur over t+1..j
    let width = j - k;
    let mut right = vec![0.0; width];
    for t in (k..j - 1).rev() {
        right[t - k] = combine(right[t + 1 - k], cur(t + 1));
    }
    let mut left = 0.0;
    let mut best = right[0];
    for t in k + 1..j {
        left = combine(left, prev(t));
        best = best.min(combine(left, right[t - k]));
    }
    best
}

/// `Σ_i Cost(τq[i], τd[a_i])` (max for the Fréchet family), without the
/// prefix and suffix terms. This is the quantity the engines minimize.
pub fn conversion_cost(
    query: &Trajectory,
    data: &Trajectory,
    seq: &MatchingSequence,
    model: &CostModel,
) -> Result<f64> {
    let costs = point_costs(query, data, seq, model)?;
    Ok(match model.family() {
        Family::Frechet => costs.into_iter().fold(0.0, f64::max),
        Family::Edit | Family::Warp => costs.into_iter().sum(),
    })
}

/// Matching-conversion cost of one sequence against the whole data
/// trajectory, including the insertion of `τd[1:a_1-1]` and `τd[a_m+1:n]`.
/// The Fréchet family has no such terms.
pub fn matching_cost(
    query: &Trajectory,
    data: &Trajectory,
    seq: &MatchingSequence,
    model: &CostModel,
) -> Result<f64> {
    let body = conversion_cost(query, data, seq, model)?;
    let d = data.points();
    let first = seq.first().expect("sequence matches query length") - 1;
    let last = seq.last().expect("sequence matches query length") - 1;
    let outside = d[..first].iter().chain(&d[last + 1..]);
    let padding: f64 = match model.family() {
        Family::Edit => outside.map(|p| model.ins(p).expect("edit family defines ins")).sum(),
        Family::Warp => {
            let q = query.points();
            d[..first].iter().map(|p| model.sub(&q[0], p)).sum::<f64>()
                + d[last + 1..]
                    .iter()
                    .map(|p| model.sub(&q[q.len() - 1], p))
                    .sum::<f64>()
        }
        Family::Frechet => 0.0,
    };
    Ok(body + padding)
}
