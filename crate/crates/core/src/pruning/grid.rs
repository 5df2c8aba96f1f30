use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::trajectory::{Point, Trajectory};

/// Query points bucketed into square cells of side `epsilon`.
#[derive(Clone, Debug)]
pub struct GridIndex {
    epsilon: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    m: usize,
}

impl GridIndex {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn query_len(&self) -> usize {
        self.m
    }

    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        // `as` saturates, so huge coordinates land in an edge cell.
        ((x / self.epsilon).floor() as i64, (y / self.epsilon).floor() as i64)
    }

    /// 1-based query indices stored in one cell.
    pub fn cell(&self, key: (i64, i64)) -> &[usize] {
        self.cells.get(&key).map_or(&[], Vec::as_slice)
    }

    /// Query indices in the cell containing `(x, y)` and its 8 neighbours.
    pub fn neighbourhood(&self, x: f64, y: f64) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.cell_of(x, y);
        (-1..=1).flat_map(move |dx| {
            (-1..=1).flat_map(move |dy| {
                self.cell((cx.saturating_add(dx), cy.saturating_add(dy)))
                    .iter()
                    .copied()
            })
        })
    }
}

fn planar_xy(p: &Point) -> Result<(f64, f64)> {
    p.xy().ok_or(Error::SymbolicPointsUnsupported)
}

pub fn build_grid(query: &Trajectory, epsilon: f64) -> Result<GridIndex> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    let mut grid = GridIndex {
        epsilon,
        cells: HashMap::new(),
        m: query.len(),
    };
    for (i, p) in query.points().iter().enumerate() {
        let (x, y) = planar_xy(p)?;
        let key = grid.cell_of(x, y);
        grid.cells.entry(key).or_default().push(i + 1);
    }
    Ok(grid)
}

/// Number of distinct query points lying in the same or an adjacent cell as
/// at least one data point.
pub fn gbp_close_count(grid: &GridIndex, data: &Trajectory) -> Result<usize> {
    let mut close = vec![false; grid.m];
    let mut count = 0;
    for p in data.points() {
        let (x, y) = planar_xy(p)?;
        for i in grid.neighbourhood(x, y) {
            if !close[i - 1] {
                close[i - 1] = true;
                count += 1;
            }
        }
        if count == grid.m {
            break;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(c: &[(f64, f64)]) -> Trajectory {
        Trajectory::from_xy("t", c).unwrap()
    }

    #[test]
    fn single_point_single_cell() {
        let g = build_grid(&traj(&[(0.0, 0.0)]), 1.0).unwrap();
        assert_eq!(g.cell((0, 0)), &[1]);
    }

    #[test]
    fn shared_cell() {
        let g = build_grid(&traj(&[(0.1, 0.1), (0.9, 0.2)]), 1.0).unwrap();
        assert_eq!(g.cell((0, 0)).len(), 2);
    }

    #[test]
    fn neighbours_cross_cell_borders() {
        let g = build_grid(&traj(&[(0.5, 0.5), (1.5, 0.5)]), 1.0).unwrap();
        for (x, y) in [(0.5, 0.5), (1.5, 0.5)] {
            let mut found: Vec<usize> = g.neighbourhood(x, y).collect();
            found.sort();
            assert_eq!(found, vec![1, 2]);
        }
    }

    #[test]
    fn close_counts() {
        let q = traj(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]);
        let g = build_grid(&q, 0.5).unwrap();
        assert_eq!(gbp_close_count(&g, &q).unwrap(), 3);
        assert_eq!(gbp_close_count(&g, &traj(&[(100.0, 100.0)])).unwrap(), 0);
    }

    #[test]
    fn errors() {
        assert!(matches!(build_grid(&traj(&[(0.0, 0.0)]), 0.0), Err(Error::NonPositiveEpsilon(_))));
        let s = Trajectory::from_symbols("s", "ab").unwrap();
        assert!(matches!(build_grid(&s, 1.0), Err(Error::SymbolicPointsUnsupported)));
        let g = build_grid(&traj(&[(0.0, 0.0)]), 1.0).unwrap();
        assert!(matches!(gbp_close_count(&g, &s), Err(Error::SymbolicPointsUnsupported)));
    }
}
