//! Seeded synthetic trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{DataSource, Dataset};
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WalkModel {
    /// Start uniformly in the box, then take isotropic Gaussian steps.
    RandomWalk { sigma: f64 },
    /// Start near one of `centers` seeded hot spots (Gaussian offset of
    /// scale `spread`), then walk with step scale `step`.
    Clustered { centers: usize, spread: f64, step: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        BoundingBox {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 100.0,
            max_y: 100.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub count: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub model: WalkModel,
    pub bbox: BoundingBox,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            seed: 0,
            count: 100,
            min_len: 50,
            max_len: 200,
            model: WalkModel::RandomWalk { sigma: 1.0 },
            bbox: BoundingBox::default(),
        }
    }
}

fn scale(name: &str, v: f64) -> Result<Normal<f64>> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidConfig(format!("{name} must be a finite non-negative number, got {v}")));
    }
    Normal::new(0.0, v).map_err(|e| Error::InvalidConfig(format!("{name}: {e}")))
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::InvalidConfig(format!(
                "length range [{}, {}] must satisfy 1 <= lo <= hi",
                self.min_len, self.max_len
            )));
        }
        let b = &self.bbox;
        if !(b.min_x <= b.max_x && b.min_y <= b.max_y) || ![b.min_x, b.min_y, b.max_x, b.max_y].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("bounding box is empty or not finite".into()));
        }
        match self.model {
            WalkModel::RandomWalk { sigma } => scale("sigma", sigma).map(drop),
            WalkModel::Clustered { centers, spread, step } => {
                if centers == 0 {
                    return Err(Error::InvalidConfig("at least one cluster center is required".into()));
                }
                scale("spread", spread)?;
                scale("step", step).map(drop)
            }
        }
    }
}

/// Identical output for identical specs. Ids are `g0`, `g1`, ...
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let b = spec.bbox;
    let uniform_point = |rng: &mut ChaCha8Rng| {
        (
            b.min_x + rng.random::<f64>() * (b.max_x - b.min_x),
            b.min_y + rng.random::<f64>() * (b.max_y - b.min_y),
        )
    };

    let (hubs, offset, step) = match spec.model {
        WalkModel::RandomWalk { sigma } => (Vec::new(), scale("spread", 0.0)?, scale("sigma", sigma)?),
        WalkModel::Clustered { centers, spread, step } => (
            (0..centers).map(|_| uniform_point(&mut rng)).collect(),
            scale("spread", spread)?,
            scale("step", step)?,
        ),
    };

    let mut trajectories = Vec::with_capacity(spec.count);
    for k in 0..spec.count {
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let (mut x, mut y) = if hubs.is_empty() {
            uniform_point(&mut rng)
        } else {
            let (cx, cy) = hubs[rng.random_range(0..hubs.len())];
            (cx + offset.sample(&mut rng), cy + offset.sample(&mut rng))
        };
        let mut coords = Vec::with_capacity(len);
        coords.push((x, y));
        for _ in 1..len {
            x += step.sample(&mut rng);
            y += step.sample(&mut rng);
            coords.push((x, y));
        }
        trajectories.push(Trajectory::from_xy(format!("g{k}"), &coords)?);
    }
    Dataset::new(trajectories, DataSource::Generated { seed: spec.seed })
}
