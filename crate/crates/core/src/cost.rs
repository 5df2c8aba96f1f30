//! Distance-function registry.
//!
//! A [`CostModel`] bundles the primitive point costs with the family tag that
//! selects the recurrence the engines run:
//!
//! * [`Family::Edit`]: independent `sub`, `ins`, `del` (WED, EDR, ERP).
//! * [`Family::Warp`]: DTW. Deleting or inserting a point costs the
//!   substitution against whatever it is matched to, so only `sub` exists.
//! * [`Family::Frechet`]: substitution only, aggregated by max.
//!
//! Cost callbacks must be pure, reentrant and return finite nonnegative
//! values. They are invoked on demand; no pairwise matrix is materialized.
//! A caller-supplied `sub` is also the hook for network distances: pass a
//! closure that looks up a precomputed shortest-path table.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::trajectory::{Point, PointKind, Trajectory};

pub type SubCost = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
pub type UnaryCost = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Edit,
    Warp,
    Frechet,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Edit => "edit",
            Family::Warp => "warp",
            Family::Frechet => "frechet",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelParams {
    None,
    Edr { epsilon: f64 },
    Erp { reference: (f64, f64) },
}

#[derive(Clone)]
pub struct CostModel {
    name: String,
    family: Family,
    sub: SubCost,
    ins: Option<UnaryCost>,
    del: Option<UnaryCost>,
    params: ModelParams,
    planar_only: bool,
    integral: bool,
}

impl fmt::Debug for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostModel")
            .field("name", &self.name)
            .field("family", &self.family)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

/// Euclidean distance between planar points; symbolic points fall back to
/// [`label_mismatch`].
pub fn point_distance(a: &Point, b: &Point) -> f64 {
    match (a, b) {
        (Point::Planar { x: ax, y: ay }, Point::Planar { x: bx, y: by }) => {
            let (dx, dy) = (ax - bx, ay - by);
            (dx * dx + dy * dy).sqrt()
        }
        _ => label_mismatch(a, b),
    }
}

/// 0 when the points are equal, 1 otherwise.
pub fn label_mismatch(a: &Point, b: &Point) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

fn planar_distance_to(p: &Point, (cx, cy): (f64, f64)) -> f64 {
    match *p {
        Point::Planar { x, y } => {
            let (dx, dy) = (x - cx, y - cy);
            (dx * dx + dy * dy).sqrt()
        }
        Point::Symbol(_) => 0.0,
    }
}

impl CostModel {
    /// Weighted edit distance with user costs.
    ///
    /// Subtrajectory search is exact when `sub(p, q) <= del(p) + ins(q)` for
    /// all points, which every built-in edit model satisfies. Without it an
    /// alignment that substitutes nothing can undercut every matching.
    pub fn wed_custom<S, I, D>(sub: S, ins: I, del: D) -> Self
    where
        S: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
        I: Fn(&Point) -> f64 + Send + Sync + 'static,
        D: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: "wed".into(),
            family: Family::Edit,
            sub: Arc::new(sub),
            ins: Some(Arc::new(ins)),
            del: Some(Arc::new(del)),
            params: ModelParams::None,
            planar_only: false,
            integral: false,
        }
    }

    /// Unit-cost WED: equal points substitute for free, everything else costs 1.
    pub fn wed_unit() -> Self {
        Self {
            name: "wed:unit".into(),
            integral: true,
            ..Self::wed_custom(label_mismatch, |_| 1.0, |_| 1.0)
        }
    }

    pub fn edr(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        let sub = move |a: &Point, b: &Point| {
            if point_distance(a, b) < epsilon {
                0.0
            } else {
                1.0
            }
        };
        Ok(Self {
            name: format!("edr:eps={epsilon}"),
            params: ModelParams::Edr { epsilon },
            planar_only: true,
            integral: true,
            ..Self::wed_custom(sub, |_| 1.0, |_| 1.0)
        })
    }

    pub fn erp(reference: (f64, f64)) -> Result<Self> {
        if !(reference.0.is_finite() && reference.1.is_finite()) {
            return Err(Error::InvalidConfig(
                "ERP reference point must be finite".into(),
            ));
        }
        let gap = move |p: &Point| planar_distance_to(p, reference);
        Ok(Self {
            name: format!("erp:cx={},cy={}", reference.0, reference.1),
            params: ModelParams::Erp { reference },
            planar_only: true,
            ..Self::wed_custom(point_distance, gap, gap)
        })
    }

    pub fn dtw<S>(sub: S) -> Self
    where
        S: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        Self::substitution_only("dtw", Family::Warp, Arc::new(sub))
    }

    pub fn frechet<S>(sub: S) -> Self
    where
        S: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        Self::substitution_only("frechet", Family::Frechet, Arc::new(sub))
    }

    fn substitution_only(name: &str, family: Family, sub: SubCost) -> Self {
        Self {
            name: name.into(),
            family,
            sub,
            ins: None,
            del: None,
            params: ModelParams::None,
            planar_only: false,
            integral: false,
        }
    }

    /// Renames the model; the name only appears in reports.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Declares that every cost is an integer, so sums are exact in `f64`.
    pub fn integral(mut self, integral: bool) -> Self {
        self.integral = integral;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    #[inline]
    pub fn sub(&self, a: &Point, b: &Point) -> f64 {
        (self.sub)(a, b)
    }

    /// Insertion cost of a data point. Substitution-only families have none.
    #[inline]
    pub fn ins(&self, p: &Point) -> Option<f64> {
        self.ins.as_ref().map(|f| f(p))
    }

    /// Deletion cost of a query point. Substitution-only families have none.
    #[inline]
    pub fn del(&self, p: &Point) -> Option<f64> {
        self.del.as_ref().map(|f| f(p))
    }

    pub(crate) fn ins_costs(&self, points: &[Point]) -> Vec<f64> {
        let f = self.ins.as_ref().expect("edit family defines ins");
        points.iter().map(|p| f(p)).collect()
    }

    /// `out[k] = Σ del(points[..k])`, length `points.len() + 1`.
    pub(crate) fn del_prefix(&self, points: &[Point]) -> Vec<f64> {
        let f = self.del.as_ref().expect("edit family defines del");
        let mut out = Vec::with_capacity(points.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for p in points {
            acc += f(p);
            out.push(acc);
        }
        out
    }

    /// Checks that the pair has one point kind the model can price.
    pub fn check_pair(&self, query: &Trajectory, data: &Trajectory) -> Result<()> {
        if query.kind() != data.kind() {
            return Err(Error::MixedPointKinds(format!(
                "{} / {}",
                query.id(),
                data.id()
            )));
        }
        if self.planar_only && query.kind() != PointKind::Planar {
            return Err(Error::SymbolicPointsUnsupported);
        }
        Ok(())
    }
}

/// A model chosen by name, as accepted on the command line:
/// `dtw`, `frechet`, `edr:eps=<v>`, `erp:cx=<v>,cy=<v>`, `wed:unit`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum ModelSpec {
    #[default]
    Dtw,
    Frechet,
    Edr { epsilon: f64 },
    Erp { cx: f64, cy: f64 },
    WedUnit,
}

impl ModelSpec {
    /// EDR threshold used when `edr` is given without `eps`. Arbitrary; pick
    /// one that matches the coordinate unit of the data.
    pub const DEFAULT_EDR_EPSILON: f64 = 0.001;

    pub fn build(&self) -> Result<CostModel> {
        match *self {
            ModelSpec::Dtw => Ok(CostModel::dtw(point_distance)),
            ModelSpec::Frechet => Ok(CostModel::frechet(point_distance)),
            ModelSpec::Edr { epsilon } => CostModel::edr(epsilon),
            ModelSpec::Erp { cx, cy } => CostModel::erp((cx, cy)),
            ModelSpec::WedUnit => Ok(CostModel::wed_unit()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Dtw => f.write_str("dtw"),
            ModelSpec::Frechet => f.write_str("frechet"),
            ModelSpec::Edr { epsilon } => write!(f, "edr:eps={epsilon}"),
            ModelSpec::Erp { cx, cy } => write!(f, "erp:cx={cx},cy={cy}"),
            ModelSpec::WedUnit => f.write_str("wed:unit"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidModelSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name.trim(), args.trim()),
            None => (s.trim(), ""),
        };
        if name.eq_ignore_ascii_case("wed") {
            return match args {
                "unit" => Ok(ModelSpec::WedUnit),
                _ => Err(invalid("only `wed:unit` is available by name")),
            };
        }
        let mut params = Vec::new();
        for kv in args.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| invalid("expected key=value"))?;
            params.push((k.trim(), v.trim()));
        }
        let number = |key: &str| -> Result<Option<f64>> {
            params
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| v.parse::<f64>().map_err(|_| invalid("not a number")))
                .transpose()
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !keys.contains(k)) {
                Some((k, _)) => Err(invalid(&format!("unknown parameter `{k}`"))),
                None => Ok(()),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "dtw" => allow(&[]).map(|_| ModelSpec::Dtw),
            "frechet" | "fd" => allow(&[]).map(|_| ModelSpec::Frechet),
            "edr" => {
                allow(&["eps"])?;
                let epsilon = number("eps")?.unwrap_or(Self::DEFAULT_EDR_EPSILON);
                if epsilon.is_nan() || epsilon <= 0.0 {
                    return Err(invalid("eps must be positive"));
                }
                Ok(ModelSpec::Edr { epsilon })
            }
            "erp" => {
                allow(&["cx", "cy"])?;
                Ok(ModelSpec::Erp {
                    cx: number("cx")?.unwrap_or(0.0),
                    cy: number("cy")?.unwrap_or(0.0),
                })
            }
            _ => Err(invalid("unknown model")),
        }
    }
}
