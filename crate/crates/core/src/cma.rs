//! Conversion-matching search: the optimal subtrajectory in `O(mn)`.
//!
//! `C[i][j]` is the cheapest conversion of `τq[1:i]` into some subtrajectory
//! of `τd[1:j]` with `τq[i]` matched to `τd[j]`; `S[i][j]` is where `τq[1]`
//! landed on that optimal partial matching. The answer is
//! `j* = argmin_j C[m][j]`, `i* = S[m][j*]`.
//!
//! Row 1 is `sub(τq[1], τd[j])` for every family. Later rows:
//!
//! * Edit: `min` of
//!   - delete: `C[i-1][j] + del(τq[i])`,
//!   - substitute after a reach `U[i][j] + sub(τq[i], τd[j])`, where
//!     `U[i][j] = min(C[i-1][j-1], U[i][j-1] + ins(τd[j-1]))` carries the
//!     cheapest predecessor plus the insertions between it and `j`,
//!   - fresh start: `del(τq[1:i-1]) + sub(τq[i], τd[j])`, every earlier query
//!     point deleted.
//! * Warp: `min(C[i-1][j], C[i][j-1], C[i-1][j-1]) + sub(τq[i], τd[j])`
//!   (column 1 only has the first term).
//! * Fréchet: the same shape with `max(·, sub)` in place of `+ sub`.
//!
//! Ties prefer substitution, then insertion, then deletion, then a fresh
//! start; the final argmin takes the smallest `j`.

use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, Family};
use crate::error::{Error, Result};
use crate::trajectory::{MatchingSequence, Point, SubtrajRange, Trajectory};

/// The best subtrajectory of one data trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub data_id: String,
    pub range: SubtrajRange,
    pub distance: f64,
}

/// `C[i][j]`, 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

/// `S[i][j]`, 1-based start positions.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    m: usize,
    n: usize,
    values: Vec<usize>,
}

macro_rules! table_accessors {
    ($ty:ty, $elem:ty) => {
        impl $ty {
            pub fn rows(&self) -> usize {
                self.m
            }

            pub fn cols(&self) -> usize {
                self.n
            }

            /// Entry at 1-based `(i, j)`.
            pub fn get(&self, i: usize, j: usize) -> $elem {
                assert!((1..=self.m).contains(&i) && (1..=self.n).contains(&j));
                self.values[(i - 1) * self.n + (j - 1)]
            }

            /// Row `i` (1-based) as a slice indexed from 0.
            pub fn row(&self, i: usize) -> &[$elem] {
                &self.values[(i - 1) * self.n..i * self.n]
            }
        }
    };
}

table_accessors!(CMatrix, f64);
table_accessors!(SMatrix, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// From `C[i-1][j-1]` (edit: reach taken directly from the diagonal).
    Diag = 0,
    /// Edit: reach extended over inserted points. Warp/Fréchet: `C[i][j-1]`.
    Left = 1,
    /// From `C[i-1][j]`: `τq[i]` deleted onto the predecessor's match.
    Up = 2,
    /// Edit only: `τq[1:i-1]` deleted, `τq[i]` substituted.
    Fresh = 3,
}

const STEP_MASK: u8 = 0b011;
/// Edit only: `U[i][j]` came from `U[i][j-1] + ins` rather than the diagonal.
const REACH_EXTENDED: u8 = 0b100;

impl Step {
    fn from_tag(tag: u8) -> Step {
        match tag & STEP_MASK {
            0 => Step::Diag,
            1 => Step::Left,
            2 => Step::Up,
            _ => Step::Fresh,
        }
    }
}

struct Rows {
    c: Vec<f64>,
    s: Vec<usize>,
}

struct Engine<'a> {
    query: &'a [Point],
    data: &'a [Point],
    model: &'a CostModel,
}

impl<'a> Engine<'a> {
    fn new(query: &'a Trajectory, data: &'a Trajectory, model: &'a CostModel) -> Result<Self> {
        model.check_pair(query, data)?;
        Ok(Self {
            query: query.points(),
            data: data.points(),
            model,
        })
    }

    /// Runs the DP row by row. `on_row` sees each finished row; `tags`, when
    /// given, receives one provenance byte per cell in row-major order.
    /// Returns the last row.
    fn run(&self, mut tags: Option<&mut Vec<u8>>, mut on_row: impl FnMut(&[f64], &[usize])) -> Rows {
        let (q, d, model) = (self.query, self.data, self.model);
        let n = d.len();
        if let Some(t) = tags.as_deref_mut() {
            t.clear();
            t.reserve(q.len() * n);
        }

        let mut prev = Rows {
            c: d.iter().map(|p| model.sub(&q[0], p)).collect(),
            s: (1..=n).collect(),
        };
        if let Some(t) = tags.as_deref_mut() {
            t.extend(std::iter::repeat_n(Step::Diag as u8, n));
        }
        on_row(&prev.c, &prev.s);

        let mut cur = Rows {
            c: vec![0.0; n],
            s: vec![0; n],
        };
        let mut row_tags = vec![0u8; if tags.is_some() { n } else { 0 }];
        let record = tags.is_some();

        match model.family() {
            Family::Edit => {
                let ins = model.ins_costs(d);
                let del_prefix = model.del_prefix(q);
                for i in 1..q.len() {
                    let qi = &q[i];
                    let del = model.del(qi).expect("edit family defines del");
                    let fresh_base = del_prefix[i];
                    let mut reach = f64::INFINITY;
                    let mut reach_start = 0;
                    for j in 0..n {
                        let s = model.sub(qi, &d[j]);
                        let mut best = f64::INFINITY;
                        let mut start = 0;
                        let mut tag = 0u8;
                        if j > 0 {
                            let diag = prev.c[j - 1];
                            let extended = reach + ins[j - 1];
                            if diag <= extended {
                                reach = diag;
                                reach_start = prev.s[j - 1];
                                tag = Step::Diag as u8;
                            } else {
                                reach = extended;
                                tag = Step::Left as u8 | REACH_EXTENDED;
                            }
                            best = reach + s;
                            start = reach_start;
                        }
                        let up = prev.c[j] + del;
                        if up < best {
                            best = up;
                            start = prev.s[j];
                            tag = (tag & REACH_EXTENDED) | Step::Up as u8;
                        }
                        let fresh = fresh_base + s;
                        if fresh < best {
                            best = fresh;
                            start = j + 1;
                            tag = (tag & REACH_EXTENDED) | Step::Fresh as u8;
                        }
                        cur.c[j] = best;
                        cur.s[j] = start;
                        if record {
                            row_tags[j] = tag;
                        }
                    }
                    on_row(&cur.c, &cur.s);
                    if let Some(t) = tags.as_deref_mut() {
                        t.extend_from_slice(&row_tags);
                    }
                    std::mem::swap(&mut prev, &mut cur);
                }
            }
            Family::Warp | Family::Frechet => {
                let bottleneck = model.family() == Family::Frechet;
                let combine = |best: f64, s: f64| if bottleneck { best.max(s) } else { best + s };
                for qi in &q[1..] {
                    cur.c[0] = combine(prev.c[0], model.sub(qi, &d[0]));
                    cur.s[0] = prev.s[0];
                    if record {
                        row_tags[0] = Step::Up as u8;
                    }
                    for j in 1..n {
                        let (mut best, mut start, mut step) = (prev.c[j - 1], prev.s[j - 1], Step::Diag);
                        if cur.c[j - 1] < best {
                            (best, start, step) = (cur.c[j - 1], cur.s[j - 1], Step::Left);
                        }
                        if prev.c[j] < best {
                            (best, start, step) = (prev.c[j], prev.s[j], Step::Up);
                        }
                        cur.c[j] = combine(best, model.sub(qi, &d[j]));
                        cur.s[j] = start;
                        if record {
                            row_tags[j] = step as u8;
                        }
                    }
                    on_row(&cur.c, &cur.s);
                    if let Some(t) = tags.as_deref_mut() {
                        t.extend_from_slice(&row_tags);
                    }
                    std::mem::swap(&mut prev, &mut cur);
                }
            }
        }
        prev
    }
}

fn best_of_row(data: &Trajectory, rows: &Rows) -> SearchResult {
    let mut end = 0;
    for j in 1..rows.c.len() {
        if rows.c[j] < rows.c[end] {
            end = j;
        }
    }
    SearchResult {
        data_id: data.id().to_string(),
        range: SubtrajRange {
            start: rows.s[end],
            end: end + 1,
        },
        distance: rows.c[end],
    }
}

/// The subtrajectory of `data` closest to `query` under `model`.
///
/// Keeps two rows of `C` and `S` live, so memory is `O(n)`.
pub fn cma_search(query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<SearchResult> {
    let engine = Engine::new(query, data, model)?;
    let last = engine.run(None, |_, _| {});
    Ok(best_of_row(data, &last))
}

/// The full `C` and `S` tables. [`cma_search`] is exactly the argmin of the
/// last row of `C` together with the matching entry of `S`.
pub fn cma_matrices(query: &Trajectory, data: &Trajectory, model: &CostModel) -> Result<(CMatrix, SMatrix)> {
    let engine = Engine::new(query, data, model)?;
    let (m, n) = (query.len(), data.len());
    let mut c = Vec::with_capacity(m * n);
    let mut s = Vec::with_capacity(m * n);
    engine.run(None, |cr, sr| {
        c.extend_from_slice(cr);
        s.extend_from_slice(sr);
    });
    Ok((CMatrix { m, n, values: c }, SMatrix { m, n, values: s }))
}

/// An optimal matching sequence with `a_m = end`; its conversion cost is
/// `C[m][end]`. With `end = j*` it starts at `i*`.
pub fn reconstruct_matching(
    query: &Trajectory,
    data: &Trajectory,
    model: &CostModel,
    end: usize,
) -> Result<MatchingSequence> {
    let (m, n) = (query.len(), data.len());
    if end == 0 || end > n {
        return Err(Error::IndexOutOfRange { index: end, len: n });
    }
    let engine = Engine::new(query, data, model)?;
    let mut tags = Vec::new();
    engine.run(Some(&mut tags), |_, _| {});
    let tag = |i: usize, j: usize| tags[(i - 1) * n + (j - 1)];

    let mut a = vec![0usize; m];
    let (mut i, mut j) = (m, end);
    a[m - 1] = end;
    while i > 1 {
        match Step::from_tag(tag(i, j)) {
            Step::Up => {
                a[i - 2] = j;
                i -= 1;
            }
            Step::Fresh => {
                a[..i - 1].fill(j);
                break;
            }
            Step::Diag => {
                a[i - 2] = j - 1;
                i -= 1;
                j -= 1;
            }
            Step::Left => {
                let mut k = j;
                match model.family() {
                    // Walk the reach back to where it left the diagonal.
                    Family::Edit => {
                        while tag(i, k) & REACH_EXTENDED != 0 {
                            k -= 1;
                        }
                    }
                    Family::Warp | Family::Frechet => {
                        while Step::from_tag(tag(i, k)) == Step::Left {
                            k -= 1;
                        }
                        // A left run can only end on a diagonal step; an up
                        // step would never have lost the tie to its left.
                        if Step::from_tag(tag(i, k)) == Step::Up {
                            a[i - 2] = k;
                            i -= 1;
                            j = k;
                            continue;
                        }
                    }
                }
                a[i - 2] = k - 1;
                i -= 1;
                j = k - 1;
            }
        }
    }
    MatchingSequence::new(a)
}
