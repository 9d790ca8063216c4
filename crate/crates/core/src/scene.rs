//! Scene files: the JSON surface consumed by the CLI and tests.
//!
//! ```json
//! {
//!   "sources": [
//!     {"type": "gaussian", "center": [0.0, 0.0], "sigma": 1.0},
//!     {"type": "polygon", "vertices": [[3,0],[4,0],[4,1],[3,1]]}
//!   ],
//!   "obstacles": [ {"vertices": [[1.9,0.4],[2.1,0.4],[2.1,0.6],[1.9,0.6]]} ],
//!   "epsilon": 0.1
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::Gaussian;
use crate::geom::{ConvexPolygon, Point, SimplePolygon};
use crate::mc::PolygonWithHoles;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("scene JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("a scene needs exactly two sources, found {0}")]
    WrongSourceCount(usize),
    #[error("source {index}: {message}")]
    BadSource { index: usize, message: String },
    #[error("obstacle {index}: {message}")]
    BadObstacle { index: usize, message: String },
    #[error("obstacles {0} and {1} overlap")]
    ObstaclesOverlap(usize, usize),
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("polygon file: {0}")]
    BadPolygonFile(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SourceFile {
    Gaussian { center: [f64; 2], sigma: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

/// On-disk scene document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub sources: Vec<SourceFile>,
    #[serde(default)]
    pub obstacles: Vec<PolygonFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// A validated source.
#[derive(Clone, Debug)]
pub enum Source {
    Gaussian(Gaussian),
    Polygon(ConvexPolygon),
}

/// A validated scene.
#[derive(Clone, Debug)]
pub struct Scene {
    pub sources: [Source; 2],
    pub obstacles: Vec<ConvexPolygon>,
    pub epsilon: Option<f64>,
}

fn to_points(raw: &[[f64; 2]]) -> Vec<Point> {
    raw.iter().map(|&[x, y]| Point::new(x, y)).collect()
}

impl SceneFile {
    pub fn from_json(json: &str) -> Result<Self, SceneError> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn validate(&self) -> Result<Scene, SceneError> {
        if self.sources.len() != 2 {
            return Err(SceneError::WrongSourceCount(self.sources.len()));
        }
        let mut sources = Vec::with_capacity(2);
        for (index, s) in self.sources.iter().enumerate() {
            let built = match s {
                SourceFile::Gaussian { center, sigma } => Gaussian::new(
                    Point::new(center[0], center[1]),
                    *sigma,
                )
                .map(Source::Gaussian)
                .map_err(|e| SceneError::BadSource {
                    index,
                    message: e.to_string(),
                })?,
                SourceFile::Polygon { vertices } => ConvexPolygon::new(to_points(vertices))
                    .map(Source::Polygon)
                    .map_err(|e| SceneError::BadSource {
                        index,
                        message: e.to_string(),
                    })?,
            };
            sources.push(built);
        }
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (index, o) in self.obstacles.iter().enumerate() {
            obstacles.push(ConvexPolygon::new(to_points(&o.vertices)).map_err(|e| {
                SceneError::BadObstacle {
                    index,
                    message: e.to_string(),
                }
            })?);
        }
        for i in 0..obstacles.len() {
            for j in i + 1..obstacles.len() {
                if !obstacles[i].disjoint_from(&obstacles[j], crate::geom::DEFAULT_TOLERANCE) {
                    return Err(SceneError::ObstaclesOverlap(i, j));
                }
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(SceneError::BadEpsilon(eps));
            }
        }
        let mut it = sources.into_iter();
        Ok(Scene {
            sources: [it.next().unwrap(), it.next().unwrap()],
            obstacles,
            epsilon: self.epsilon,
        })
    }
}

impl Scene {
    /// Round-trip back to the file model.
    pub fn to_file(&self) -> SceneFile {
        let src = |s: &Source| match s {
            Source::Gaussian(g) => SourceFile::Gaussian {
                center: [g.center.x, g.center.y],
                sigma: g.sigma,
            },
            Source::Polygon(p) => SourceFile::Polygon {
                vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
            },
        };
        SceneFile {
            sources: vec![src(&self.sources[0]), src(&self.sources[1])],
            obstacles: self
                .obstacles
                .iter()
                .map(|o| PolygonFile {
                    vertices: o.vertices().iter().map(|v| [v.x, v.y]).collect(),
                })
                .collect(),
            epsilon: self.epsilon,
        }
    }
}

/// On-disk polygon-with-holes document for the degree-of-convexity command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonWithHolesFile {
    pub outer: PolygonFile,
    #[serde(default)]
    pub holes: Vec<PolygonFile>,
}

impl PolygonWithHolesFile {
    pub fn from_json(json: &str) -> Result<Self, SceneError> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn validate(&self) -> Result<PolygonWithHoles, SceneError> {
        let outer = SimplePolygon::new(to_points(&self.outer.vertices))
            .map_err(|e| SceneError::BadPolygonFile(format!("outer: {e}")))?;
        let mut holes = Vec::with_capacity(self.holes.len());
        for (i, h) in self.holes.iter().enumerate() {
            holes.push(
                SimplePolygon::new(to_points(&h.vertices))
                    .map_err(|e| SceneError::BadPolygonFile(format!("hole {i}: {e}")))?,
            );
        }
        PolygonWithHoles::new(outer, holes).map_err(|e| SceneError::BadPolygonFile(e.to_string()))
    }
}
