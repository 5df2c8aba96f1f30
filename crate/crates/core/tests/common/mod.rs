//! Test-side oracle and seeded instance generators.
//!
//! The oracle here is written from the distance definitions alone and does
//! not call into the library's DP code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subtraj::{CostModel, Family, Point, Trajectory};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The five models every cross-check runs on.
pub fn models() -> Vec<CostModel> {
    vec![
        CostModel::dtw(subtraj::point_distance),
        CostModel::frechet(subtraj::point_distance),
        CostModel::edr(0.3).unwrap(),
        CostModel::erp((0.0, 0.0)).unwrap(),
        CostModel::wed_unit(),
    ]
}

/// Distance equality: exact for integer-cost models, 1e-9 relative otherwise.
pub fn same(a: f64, b: f64, model: &CostModel) -> bool {
    if model.is_integral() {
        a == b
    } else {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }
}

/// Whole-sequence distance straight from the recursive definitions.
pub fn naive_distance(q: &[Point], d: &[Point], model: &CostModel) -> f64 {
    let (m, n) = (q.len(), d.len());
    let inf = f64::INFINITY;
    // t[i][j]: distance between q[..i] and d[..j]
    let mut t = vec![vec![inf; n + 1]; m + 1];
    t[0][0] = 0.0;
    for i in 0..=m {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            t[i][j] = match model.family() {
                Family::Edit => {
                    let mut best = inf;
                    if i > 0 && j > 0 {
                        best = best.min(t[i - 1][j - 1] + model.sub(&q[i - 1], &d[j - 1]));
                    }
                    if i > 0 {
                        best = best.min(t[i - 1][j] + model.del(&q[i - 1]).unwrap());
                    }
                    if j > 0 {
                        best = best.min(t[i][j - 1] + model.ins(&d[j - 1]).unwrap());
                    }
                    best
                }
                Family::Warp | Family::Frechet if i > 0 && j > 0 => {
                    let prev = t[i - 1][j - 1].min(t[i - 1][j]).min(t[i][j - 1]);
                    let s = model.sub(&q[i - 1], &d[j - 1]);
                    if model.family() == Family::Warp {
                        prev + s
                    } else {
                        prev.max(s)
                    }
                }
                _ => inf,
            };
        }
    }
    t[m][n]
}

/// Best subtrajectory distance by trying every range.
pub fn naive_best(q: &Trajectory, d: &Trajectory, model: &CostModel) -> f64 {
    let n = d.len();
    let mut best = f64::INFINITY;
    for s in 0..n {
        for e in s..n {
            best = best.min(naive_distance(q.points(), &d.points()[s..=e], model));
        }
    }
    best
}

fn lattice_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(0..4) as f64, rng.random_range(0..4) as f64)
}

fn uniform_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random::<f64>() * 3.0, rng.random::<f64>() * 3.0)
}

/// A random pair with `|q|` in `m` and `|d|` in `n`. Half the time the query
/// is a perturbed copy of a piece of the data, so real matches exist. Unit
/// WED gets lattice coordinates so equal points are common.
pub fn instance(
    rng: &mut ChaCha8Rng,
    model: &CostModel,
    m: std::ops::RangeInclusive<usize>,
    n: std::ops::RangeInclusive<usize>,
) -> (Trajectory, Trajectory) {
    let lattice = model.name().starts_with("wed");
    let point = |rng: &mut ChaCha8Rng| if lattice { lattice_point(rng) } else { uniform_point(rng) };
    let m = rng.random_range(m);
    let n = rng.random_range(n);
    let d: Vec<(f64, f64)> = (0..n).map(|_| point(rng)).collect();
    let q: Vec<(f64, f64)> = if rng.random_bool(0.5) {
        let start = rng.random_range(0..n);
        let stride = rng.random_range(0.5..1.5);
        (0..m)
            .map(|k| {
                if rng.random_bool(0.2) {
                    point(rng)
                } else {
                    let (x, y) = d[(start + (k as f64 * stride) as usize).min(n - 1)];
                    if lattice {
                        (x, y)
                    } else {
                        (x + rng.random_range(-0.1..0.1), y + rng.random_range(-0.1..0.1))
                    }
                }
            })
            .collect()
    } else {
        (0..m).map(|_| point(rng)).collect()
    };
    (
        Trajectory::from_xy("q", &q).unwrap(),
        Trajectory::from_xy("d", &d).unwrap(),
    )
}

/// Every nondecreasing sequence of `m` indices in `1..=n`.
pub fn all_sequences(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, m: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        let lo = prefix.last().copied().unwrap_or(1);
        for v in lo..=n {
            prefix.push(v);
            rec(prefix, m, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), m, n, &mut out);
    out
}
