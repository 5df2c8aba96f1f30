use std::fmt;
use std::str::FromStr;

use crate::cost::{CostModel, Family};
use crate::error::{Error, Result};
use crate::trajectory::{Point, Trajectory};

use super::PruneConfig;

/// How the key-point costs are turned into a bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KpfMode {
    /// Sum over key points scaled by `1/r`: an estimate of the full sum that
    /// can overshoot the optimum.
    Estimated,
    /// Plain sum over key points: never exceeds the optimum.
    #[default]
    Safe,
}

impl fmt::Display for KpfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KpfMode::Estimated => "estimated",
            KpfMode::Safe => "safe",
        })
    }
}

impl FromStr for KpfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "safe" => Ok(KpfMode::Safe),
            "estimated" | "estimate" => Ok(KpfMode::Estimated),
            _ => Err(Error::InvalidConfig(format!("unknown KPF mode `{s}`"))),
        }
    }
}

/// `⌈r·m⌉` evenly strided 1-based indices starting at 1.
pub fn select_key_points(m: usize, rate: f64) -> Vec<usize> {
    // The small slack keeps r·m that should be integral (0.3·10) from
    // rounding up past it.
    let k = ((rate * m as f64 - 1e-9).ceil() as usize).clamp(1, m.max(1));
    (0..k).map(|t| 1 + t * m / k).collect()
}

/// Key points plus the rule that prices them, fixed once per query.
pub(crate) struct KeyPointFilter<'a> {
    keys: Vec<&'a Point>,
    model: &'a CostModel,
    scale: f64,
}

impl<'a> KeyPointFilter<'a> {
    pub(crate) fn new(query: &'a Trajectory, model: &'a CostModel, config: &PruneConfig) -> Self {
        let keys = select_key_points(query.len(), config.rate)
            .into_iter()
            .map(|i| &query.points()[i - 1])
            .collect();
        let scale = match (config.kpf_mode, model.family()) {
            (KpfMode::Estimated, Family::Edit | Family::Warp) => 1.0 / config.rate,
            _ => 1.0,
        };
        KeyPointFilter { keys, model, scale }
    }

    /// Cheapest way any matching could treat one query point.
    fn min_cost(&self, p: &Point, data: &[Point]) -> f64 {
        let nearest = data
            .iter()
            .map(|d| self.model.sub(p, d))
            .fold(f64::INFINITY, f64::min);
        match self.model.del(p) {
            Some(del) => nearest.min(del),
            None => nearest,
        }
    }

    pub(crate) fn bound(&self, data: &Trajectory) -> f64 {
        let costs = self.keys.iter().map(|p| self.min_cost(p, data.points()));
        let raw = match self.model.family() {
            Family::Frechet => costs.fold(0.0, f64::max),
            Family::Edit | Family::Warp => costs.sum(),
        };
        raw * self.scale
    }
}

/// Lower bound (in [`KpfMode::Safe`]) or estimate of the best subtrajectory
/// distance from `query` to `data`, from the key points alone.
pub fn kpf_lower_bound(
    query: &Trajectory,
    data: &Trajectory,
    model: &CostModel,
    config: &PruneConfig,
) -> Result<f64> {
    config.validate()?;
    model.check_pair(query, data)?;
    Ok(KeyPointFilter::new(query, model, config).bound(data))
}
