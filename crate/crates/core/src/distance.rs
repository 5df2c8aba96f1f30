//! Whole-trajectory distances by the classic recursions.
//!
//! These are the reference evaluations the subtrajectory engines are checked
//! against: the edit recursion over `sub`/`ins`/`del`, DTW's sum of
//! substitutions along a warping path, and the discrete Fréchet bottleneck.
//! Rows are streamed, so memory is `O(n)`.

use crate::cost::{CostModel, Family};
use crate::error::Result;
use crate::trajectory::{Point, Trajectory};

/// `Θ(query, data)` with no subtrajectory freedom.
pub fn full_distance(query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<f64> {
    model.check_pair(query, data)?;
    Ok(points_distance(query.points(), data.points(), model))
}

/// [`full_distance`] over raw point slices.
///
/// Either slice may be empty. The edit family then prices the other side as
/// pure deletions or insertions; warping and Fréchet distances to an empty
/// trajectory are undefined and reported as infinity.
pub fn points_distance(query: &[Point], data: &[Point], model: &CostModel) -> f64 {
    if query.is_empty() || data.is_empty() {
        return match model.family() {
            Family::Edit => {
                let del: f64 = query.iter().filter_map(|p| model.del(p)).sum();
                let ins: f64 = data.iter().filter_map(|p| model.ins(p)).sum();
                del + ins
            }
            Family::Warp | Family::Frechet => f64::INFINITY,
        };
    }
    *prefix_distances(query, data, model)
        .last()
        .expect("data is nonempty")
}

/// `out[y - 1] = Θ(query, data[1:y])` for every `y` in `1..=data.len()`.
///
/// This is the last row of the full DP table, which is what ExactS reads for
/// each anchor.
pub(crate) fn prefix_distances(query: &[Point], data: &[Point], model: &CostModel) -> Vec<f64> {
    debug_assert!(!query.is_empty() && !data.is_empty());
    match model.family() {
        Family::Edit => edit_rows(query, data, model),
        Family::Warp => warp_rows(query, data, model),
        Family::Frechet => frechet_rows(query, data, model),
    }
}

fn edit_rows(query: &[Point], data: &[Point], model: &CostModel) -> Vec<f64> {
    let n = data.len();
    let ins = model.ins_costs(data);
    // Column 0 is the empty data prefix.
    let mut prev = vec![0.0; n + 1];
    for y in 1..=n {
        prev[y] = prev[y - 1] + ins[y - 1];
    }
    let mut cur = vec![0.0; n + 1];
    for q in query {
        let del = model.del(q).expect("edit family defines del");
        cur[0] = prev[0] + del;
        for y in 1..=n {
            let sub = prev[y - 1] + model.sub(q, &data[y - 1]);
            let insert = cur[y - 1] + ins[y - 1];
            let delete = prev[y] + del;
            cur[y] = sub.min(insert).min(delete);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev.remove(0);
    prev
}

fn warp_rows(query: &[Point], data: &[Point], model: &CostModel) -> Vec<f64> {
    let n = data.len();
    let mut prev = Vec::with_capacity(n);
    let mut acc = 0.0;
    for d in data {
        acc += model.sub(&query[0], d);
        prev.push(acc);
    }
    let mut cur = vec![0.0; n];
    for q in &query[1..] {
        cur[0] = prev[0] + model.sub(q, &data[0]);
        for y in 1..n {
            cur[y] = prev[y].min(cur[y - 1]).min(prev[y - 1]) + model.sub(q, &data[y]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

fn frechet_rows(query: &[Point], data: &[Point], model: &CostModel) -> Vec<f64> {
    let n = data.len();
    let mut prev = Vec::with_capacity(n);
    let mut acc = 0.0_f64;
    for d in data {
        acc = acc.max(model.sub(&query[0], d));
        prev.push(acc);
    }
    let mut cur = vec![0.0; n];
    for q in &query[1..] {
        cur[0] = prev[0].max(model.sub(q, &data[0]));
        for y in 1..n {
            cur[y] = prev[y]
                .min(cur[y - 1])
                .min(prev[y - 1])
                .max(model.sub(q, &data[y]));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}
