//! Trajectories, subtrajectory ranges and matching sequences.
//!
//! Every index in the public API is 1-based and inclusive: `τ[i:j]` is the
//! slice of points `i..=j`. Engines translate to 0-based slices internally.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Planar { x: f64, y: f64 },
    Symbol(Arc<str>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    Planar,
    Symbol,
}

impl Point {
    pub fn planar(x: f64, y: f64) -> Self {
        Point::Planar { x, y }
    }

    pub fn symbol(label: impl AsRef<str>) -> Self {
        Point::Symbol(Arc::from(label.as_ref()))
    }

    pub fn kind(&self) -> PointKind {
        match self {
            Point::Planar { .. } => PointKind::Planar,
            Point::Symbol(_) => PointKind::Symbol,
        }
    }

    pub fn xy(&self) -> Option<(f64, f64)> {
        match *self {
            Point::Planar { x, y } => Some((x, y)),
            Point::Symbol(_) => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Planar { x, y } => write!(f, "({x}, {y})"),
            Point::Symbol(label) => f.write_str(label),
        }
    }
}

/// A validated, immutable trajectory of at least one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    id: String,
    points: Vec<Point>,
    kind: PointKind,
}

impl Trajectory {
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        let id = id.into();
        let Some(first) = points.first() else {
            return Err(Error::EmptyTrajectory(id));
        };
        let kind = first.kind();
        for (index, p) in points.iter().enumerate() {
            if p.kind() != kind {
                return Err(Error::MixedPointKinds(id));
            }
            if let Point::Planar { x, y } = p {
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::NonFiniteCoordinate {
                        id,
                        index: index + 1,
                    });
                }
            }
        }
        Ok(Self { id, points, kind })
    }

    pub fn from_xy(id: impl Into<String>, coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(id, coords.iter().map(|&(x, y)| Point::planar(x, y)).collect())
    }

    /// One symbolic point per character of `labels`.
    pub fn from_symbols(id: impl Into<String>, labels: &str) -> Result<Self> {
        Self::new(
            id,
            labels
                .chars()
                .map(|c| Point::symbol(c.encode_utf8(&mut [0; 4])))
                .collect(),
        )
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn kind(&self) -> PointKind {
        self.kind
    }

    /// The 1-based point `τ[index]`.
    pub fn point(&self, index: usize) -> Result<&Point> {
        index
            .checked_sub(1)
            .and_then(|i| self.points.get(i))
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
    }

    /// The points of `τ[range.start:range.end]`.
    pub fn slice(&self, range: SubtrajRange) -> &[Point] {
        &self.points[range.start - 1..range.end]
    }

    /// `τ[range]` as a stand-alone trajectory with the same id.
    pub fn sub(&self, range: SubtrajRange) -> Result<Trajectory> {
        range.check(self.len())?;
        Ok(Trajectory {
            id: self.id.clone(),
            points: self.slice(range).to_vec(),
            kind: self.kind,
        })
    }

    pub fn with_id(&self, id: impl Into<String>) -> Trajectory {
        Trajectory {
            id: id.into(),
            ..self.clone()
        }
    }

    pub fn full_range(&self) -> SubtrajRange {
        SubtrajRange {
            start: 1,
            end: self.len(),
        }
    }
}

/// An inclusive 1-based range `[start, end]` into some trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubtrajRange {
    pub start: usize,
    pub end: usize,
}

impl SubtrajRange {
    pub fn new(start: usize, end: usize, owner_len: usize) -> Result<Self> {
        let range = Self { start, end };
        range.check(owner_len)?;
        Ok(range)
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, owner_len: usize) -> Result<()> {
        if self.start == 0 || self.start > owner_len {
            return Err(Error::IndexOutOfRange {
                index: self.start,
                len: owner_len,
            });
        }
        if self.end < self.start || self.end > owner_len {
            return Err(Error::IndexOutOfRange {
                index: self.end,
                len: owner_len,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SubtrajRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.start, self.end)
    }
}

/// `a_1..a_m`: the data index each query point is matched to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingSequence(Vec<usize>);

impl MatchingSequence {
    /// Checks that indices are nondecreasing and at least 1. Upper bounds are
    /// checked against the data trajectory when the sequence is evaluated.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if let Some(&first) = indices.first() {
            if first == 0 {
                return Err(Error::IndexOutOfRange { index: 0, len: 0 });
            }
        }
        if let Some(w) = indices.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NonMonotoneSequence { position: w + 2 });
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub(crate) fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&a| a == 0 || a > n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: n }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_planar_trajectory() {
        let t = Trajectory::from_xy("a", &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.kind(), PointKind::Planar);
        assert_eq!(t.point(2).unwrap(), &Point::planar(1.0, 1.0));
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(
            Trajectory::new("e", vec![]),
            Err(Error::EmptyTrajectory(_))
        ));
    }

    #[test]
    fn rejects_nan() {
        let err = Trajectory::from_xy("n", &[(0.0, 0.0), (f64::NAN, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 2, .. }));
        let err = Trajectory::from_xy("n", &[(f64::INFINITY, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 1, .. }));
    }

    #[test]
    fn rejects_mixed_kinds() {
        let err = Trajectory::new("m", vec![Point::planar(0.0, 0.0), Point::symbol("a")]);
        assert!(matches!(err, Err(Error::MixedPointKinds(_))));
    }

    #[test]
    fn one_based_indexing() {
        let t = Trajectory::from_symbols("s", "abcde").unwrap();
        let r = SubtrajRange::new(2, 4, t.len()).unwrap();
        assert_eq!(r.len(), 3);
        let sub = t.sub(r).unwrap();
        assert_eq!(sub.points(), Trajectory::from_symbols("x", "bcd").unwrap().points());
        assert!(t.point(0).is_err());
        assert!(t.point(6).is_err());
        assert!(SubtrajRange::new(3, 2, 5).is_err());
        assert!(SubtrajRange::new(1, 6, 5).is_err());
    }

    #[test]
    fn matching_sequence_must_not_decrease() {
        assert!(MatchingSequence::new(vec![1, 1, 2, 4]).is_ok());
        assert!(matches!(
            MatchingSequence::new(vec![1, 3, 2]),
            Err(Error::NonMonotoneSequence { position: 3 })
        ));
        assert!(MatchingSequence::new(vec![0, 1]).is_err());
        let seq = MatchingSequence::new(vec![1, 5]).unwrap();
        assert!(seq.check_bounds(4).is_err());
        assert!(seq.check_bounds(5).is_ok());
    }
}
