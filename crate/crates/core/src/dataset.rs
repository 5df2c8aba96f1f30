//! Trajectory collections and their CSV form.
//!
//! Planar files have the header `traj_id,seq,x,y`; symbolic ones
//! `traj_id,seq,label`. Rows of one trajectory must have increasing `seq`;
//! rows of different trajectories may interleave. Trajectories keep the
//! order in which their ids first appear.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Point, PointKind, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    File(PathBuf),
    Generated { seed: u64 },
    Memory,
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::File(p) => write!(f, "{}", p.display()),
            DataSource::Generated { seed } => write!(f, "generated(seed={seed})"),
            DataSource::Memory => f.write_str("memory"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub min_len: usize,
    pub avg_len: f64,
    pub max_len: usize,
}

impl DatasetStats {
    fn of(trajectories: &[Trajectory]) -> Self {
        if trajectories.is_empty() {
            return DatasetStats::default();
        }
        let lens = trajectories.iter().map(Trajectory::len);
        DatasetStats {
            count: trajectories.len(),
            min_len: lens.clone().min().unwrap_or(0),
            avg_len: lens.clone().sum::<usize>() as f64 / trajectories.len() as f64,
            max_len: lens.max().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    trajectories: Vec<Trajectory>,
    source: DataSource,
    stats: DatasetStats,
}

impl Dataset {
    /// Fails when two trajectories share an id.
    pub fn new(trajectories: Vec<Trajectory>, source: DataSource) -> Result<Self> {
        let mut seen = HashMap::with_capacity(trajectories.len());
        for (k, t) in trajectories.iter().enumerate() {
            if seen.insert(t.id(), k).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate trajectory id `{}`", t.id())));
            }
        }
        let stats = DatasetStats::of(&trajectories);
        Ok(Dataset {
            trajectories,
            source,
            stats,
        })
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn into_trajectories(self) -> Vec<Trajectory> {
        self.trajectories
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn stats(&self) -> DatasetStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.id() == id)
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let trajectories = read_csv(file)?;
    Dataset::new(trajectories, DataSource::File(path.to_path_buf()))
}

struct Pending {
    last_seq: i64,
    points: Vec<Point>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_csv(reader: impl Read) -> Result<Vec<Trajectory>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_ascii_lowercase).collect();
    let kind = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["traj_id", "seq", "x", "y"] => PointKind::Planar,
        ["traj_id", "seq", "label"] => PointKind::Symbol,
        _ => {
            return Err(parse_err(
                1,
                format!("expected header traj_id,seq,x,y or traj_id,seq,label, got {}", header.join(",")),
            ))
        }
    };

    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, Pending> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record[0].to_string();
        let seq: i64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad seq `{}`", &record[1])))?;
        let point = match kind {
            PointKind::Planar => {
                let coord = |k: usize| -> Result<f64> {
                    record[k]
                        .parse()
                        .map_err(|_| parse_err(line, format!("bad coordinate `{}`", &record[k])))
                };
                Point::planar(coord(2)?, coord(3)?)
            }
            PointKind::Symbol => Point::symbol(&record[2]),
        };
        match pending.get_mut(&id) {
            Some(p) if seq == p.last_seq => {
                return Err(parse_err(line, format!("duplicate point ({id}, {seq})")));
            }
            Some(p) if seq < p.last_seq => {
                return Err(Error::NonMonotoneSeq {
                    id,
                    seq,
                    previous: p.last_seq,
                    line,
                });
            }
            Some(p) => {
                p.last_seq = seq;
                p.points.push(point);
            }
            None => {
                order.push(id.clone());
                pending.insert(
                    id,
                    Pending {
                        last_seq: seq,
                        points: vec![point],
                    },
                );
            }
        }
    }

    order
        .into_iter()
        .map(|id| {
            let p = pending.remove(&id).expect("every id has rows");
            Trajectory::new(id, p.points)
        })
        .collect()
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(dataset.trajectories(), file)
}

/// Writes trajectories with `seq` counting from 1. All trajectories must
/// have the same point kind.
pub fn write_csv(trajectories: &[Trajectory], writer: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let kind = trajectories.first().map_or(PointKind::Planar, Trajectory::kind);
    match kind {
        PointKind::Planar => wtr.write_record(["traj_id", "seq", "x", "y"])?,
        PointKind::Symbol => wtr.write_record(["traj_id", "seq", "label"])?,
    }
    for t in trajectories {
        if t.kind() != kind {
            return Err(Error::MixedPointKinds(t.id().to_string()));
        }
        for (k, p) in t.points().iter().enumerate() {
            let seq = (k + 1).to_string();
            match p {
                // `Display` for f64 is the shortest string that parses back
                // to the same value.
                Point::Planar { x, y } => wtr.write_record([t.id(), &seq, &x.to_string(), &y.to_string()])?,
                Point::Symbol(label) => wtr.write_record([t.id(), &seq, label])?,
            }
        }
    }
    wtr.flush()?;
    Ok(())
}
