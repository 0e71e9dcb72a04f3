//! Instance and solution files.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::driver::{Instance, Solution, SolveError};
use crate::geometry::{GeometryError, Metric, Point};
use crate::graph::{Network, Role};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] GeometryError),
    #[error(transparent)]
    Instance(#[from] SolveError),
    #[error("edge {0:?} refers to a missing vertex")]
    BadEdge([usize; 2]),
}

/// The exponent `p`, written as a number or as the string "inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Text(t) if t == "inf" => Ok(Exponent(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("p must be a number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub p: Exponent,
    pub k: usize,
    pub terminals: Vec<[f64; 2]>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let metric = Metric::new(self.p.0)?;
        let pts = self.terminals.iter().map(|&[x, y]| Point::new(x, y)).collect();
        Ok(Instance::new(pts, self.k, metric)?)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            p: Exponent(inst.metric.p()),
            k: inst.k,
            terminals: inst.terminals.iter().map(|p| [p.x, p.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdUsed {
    pub index: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stats {
    pub candidate_types: usize,
    pub levels_explored: usize,
    pub wall_time_ms: f64,
}

/// A solved instance. Terminals are ids `0..n` in input order and Steiner
/// points follow as `n, n+1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub p: Exponent,
    pub k: usize,
    pub terminals: Vec<[f64; 2]>,
    pub bottleneck: f64,
    pub threshold_used: ThresholdUsed,
    pub steiner_points: Vec<[f64; 2]>,
    pub edges: Vec<EdgeRecord>,
    pub stats: Stats,
}

impl SolutionFile {
    pub fn new(inst: &Instance, s: &Solution, wall_time_ms: f64) -> Self {
        let g = &s.network;
        Self {
            p: Exponent(inst.metric.p()),
            k: inst.k,
            terminals: inst.terminals.iter().map(|p| [p.x, p.y]).collect(),
            bottleneck: s.bottleneck,
            threshold_used: ThresholdUsed {
                index: s.level,
                length: s.level_length,
            },
            steiner_points: g.steiner_points().map(|v| g.point(v).map(|p| [p.x, p.y]).unwrap()).collect(),
            edges: g
                .edges()
                .map(|e| EdgeRecord {
                    u: e.0,
                    v: e.1,
                    length: g.edge_length(e, &inst.metric).unwrap(),
                })
                .collect(),
            stats: Stats {
                candidate_types: s.stats.candidate_types,
                levels_explored: s.stats.levels_explored,
                wall_time_ms,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn metric(&self) -> Result<Metric, FormatError> {
        Ok(Metric::new(self.p.0)?)
    }

    /// The network described by the file, with coordinates on every vertex.
    pub fn network(&self) -> Result<Network, FormatError> {
        let pts: Vec<Point> = self.terminals.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let mut g = Network::with_terminals(&pts);
        for &[x, y] in &self.steiner_points {
            g.add_vertex(Role::Steiner, Some(Point::new(x, y)));
        }
        for e in &self.edges {
            g.add_edge(e.u, e.v).map_err(|_| FormatError::BadEdge([e.u, e.v]))?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_tokens() {
        let f = InstanceFile::parse(r#"{"p": "inf", "k": 1, "terminals": [[0, 0], [1, 0]]}"#).unwrap();
        assert!(f.p.0.is_infinite());
        assert_eq!(f.to_instance().unwrap().metric, Metric::LInf);
        assert!(InstanceFile::parse(r#"{"p": 2, "k": 1, "terminals": [], "extra": 1}"#).is_err());
        assert!(InstanceFile::parse(r#"{"p": "two", "k": 1, "terminals": []}"#).is_err());
        let back: InstanceFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
