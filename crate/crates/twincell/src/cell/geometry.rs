//! The cell geometry manifest: part extents, buffers, station, robot, mobile
//! robot, drop zone, static obstacles and numeric defaults.
//!
//! Manifests are TOML. All lengths are model units, speeds are per tick,
//! angular speeds are degrees per tick. Example:
//!
//! ```toml
//! [station]
//! position = [0.0, 0.0, 0.0]
//! surface_height = -0.1
//! half_extents = [3.0, 0.1, 3.0]
//!
//! [robot]
//! home = [0.0, 4.0, 3.0]
//! linear_speed = 0.5
//! angular_speed = 30.0
//! envelope_half_extents = [0.2, 0.25, 0.2]
//!
//! [mobile]
//! speed = 1.0
//! home = [6.0, 0.5, 6.0]
//!
//! [drop_zone]
//! position = [-5.0, 1.0, 0.0]
//!
//! [types.Block]
//! half_extents = [0.5, 0.25, 0.5]
//!
//! [[buffers]]
//! id = "buf_block"
//! type_name = "Block"
//! position = [-6.0, 0.25, 6.0]
//! slot_pitch = 0.6
//! initial_count = 20
//!
//! [[obstacles]]
//! id = "fixture"
//! center = [0.0, 2.0, 0.0]
//! half_extents = [1.0, 0.1, 1.0]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geom::{Aabb, Point3, DEFAULT_CONTACT_TOLERANCE, DEFAULT_SWEEP_STEP};

use super::CellError;

/// Default clearance added above the tallest target for traversals.
pub const DEFAULT_CLEARANCE: f64 = 2.0;
/// Default simulation tick budget before a run is declared stuck.
pub const DEFAULT_TICK_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CellGeometry {
    #[serde(default = "default_contact_tolerance")]
    pub contact_tolerance: f64,
    #[serde(default = "default_sweep_step")]
    pub sweep_step: f64,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default = "default_tick_budget")]
    pub tick_budget: u64,
    #[serde(default)]
    pub station: Station,
    #[serde(default)]
    pub robot: Robot,
    #[serde(default)]
    pub mobile: Mobile,
    #[serde(default)]
    pub drop_zone: DropZone,
    /// Bounding box per part type.
    #[serde(default)]
    pub types: BTreeMap<String, TypeGeometry>,
    #[serde(default)]
    pub buffers: Vec<BufferDef>,
    /// Extra static boxes in the cell (fixtures, jigs).
    #[serde(default)]
    pub obstacles: Vec<StaticObstacle>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TypeGeometry {
    pub half_extents: Point3,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Station {
    /// Horizontal placement of the station; the `y` component is unused in
    /// favor of `surface_height`.
    pub position: Point3,
    /// Height of the assembly surface's top face.
    pub surface_height: f64,
    /// Extents of the surface slab.
    pub half_extents: Point3,
}

impl Default for Station {
    fn default() -> Self {
        Station {
            position: Point3::ZERO,
            surface_height: -0.5,
            half_extents: Point3::new(4.0, 0.1, 4.0),
        }
    }
}

impl Station {
    /// The surface slab as an obstacle box whose top face sits at
    /// `surface_height`.
    pub fn slab(&self) -> Aabb {
        Aabb::new(
            Point3::new(
                self.position.x,
                self.surface_height - self.half_extents.y,
                self.position.z,
            ),
            self.half_extents,
        )
        .expect("positive station extents")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Robot {
    /// End-effector parking pose.
    pub home: Point3,
    #[serde(default)]
    pub home_yaw: f64,
    #[serde(default)]
    pub home_pitch: f64,
    /// Translation per tick.
    pub linear_speed: f64,
    /// Degrees per tick.
    pub angular_speed: f64,
    /// Collision proxy for the gantry above the held part.
    pub envelope_half_extents: Point3,
}

impl Default for Robot {
    fn default() -> Self {
        Robot {
            home: Point3::new(0.0, 4.0, 3.0),
            home_yaw: 0.0,
            home_pitch: 0.0,
            linear_speed: 0.5,
            angular_speed: 30.0,
            envelope_half_extents: Point3::new(0.2, 0.25, 0.2),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Mobile {
    /// Translation per tick.
    pub speed: f64,
    pub home: Point3,
}

impl Default for Mobile {
    fn default() -> Self {
        Mobile { speed: 1.0, home: Point3::new(6.0, 0.5, 6.0) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DropZone {
    /// Part-center staging point where the mobile robot deposits parts and
    /// the arm fetches them.
    pub position: Point3,
}

impl Default for DropZone {
    fn default() -> Self {
        DropZone { position: Point3::new(-5.0, 1.0, 0.0) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BufferDef {
    pub id: String,
    pub type_name: String,
    /// Pick position of slot 0; slot `k` sits `k * slot_pitch` further along x.
    pub position: Point3,
    pub slot_pitch: f64,
    pub initial_count: usize,
}

impl BufferDef {
    pub fn slot_position(&self, slot: usize) -> Point3 {
        Point3::new(
            self.position.x + self.slot_pitch * slot as f64,
            self.position.y,
            self.position.z,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StaticObstacle {
    pub id: String,
    pub center: Point3,
    pub half_extents: Point3,
}

fn default_contact_tolerance() -> f64 {
    DEFAULT_CONTACT_TOLERANCE
}
fn default_sweep_step() -> f64 {
    DEFAULT_SWEEP_STEP
}
fn default_clearance() -> f64 {
    DEFAULT_CLEARANCE
}
fn default_tick_budget() -> u64 {
    DEFAULT_TICK_BUDGET
}

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry {
            contact_tolerance: DEFAULT_CONTACT_TOLERANCE,
            sweep_step: DEFAULT_SWEEP_STEP,
            clearance: DEFAULT_CLEARANCE,
            tick_budget: DEFAULT_TICK_BUDGET,
            station: Station::default(),
            robot: Robot::default(),
            mobile: Mobile::default(),
            drop_zone: DropZone::default(),
            types: BTreeMap::new(),
            buffers: Vec::new(),
            obstacles: Vec::new(),
        }
    }
}

impl CellGeometry {
    pub fn from_toml_str(text: &str) -> Result<Self, CellError> {
        let geometry: CellGeometry =
            toml::from_str(text).map_err(|e| CellError::Manifest(e.to_string()))?;
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn load(path: &Path) -> Result<Self, CellError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CellError::Io(format!("{}: {}", path.display(), e)))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), CellError> {
        let positive = |v: f64, what: &str| -> Result<(), CellError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CellError::Manifest(format!("{} must be positive and finite, got {}", what, v)))
            }
        };
        positive(self.sweep_step, "sweep_step")?;
        positive(self.clearance, "clearance")?;
        positive(self.robot.linear_speed, "robot.linear_speed")?;
        positive(self.robot.angular_speed, "robot.angular_speed")?;
        positive(self.mobile.speed, "mobile.speed")?;
        if self.contact_tolerance < 0.0 || !self.contact_tolerance.is_finite() {
            return Err(CellError::Manifest(format!(
                "contact_tolerance must be non-negative, got {}",
                self.contact_tolerance
            )));
        }
        if self.tick_budget == 0 {
            return Err(CellError::Manifest("tick_budget must be positive".into()));
        }
        let extents_ok = |half: Point3, what: &str| -> Result<(), CellError> {
            if half.x > 0.0 && half.y > 0.0 && half.z > 0.0 && half.is_finite() {
                Ok(())
            } else {
                Err(CellError::Manifest(format!("{} half extents must be positive", what)))
            }
        };
        extents_ok(self.station.half_extents, "station")?;
        extents_ok(self.robot.envelope_half_extents, "robot envelope")?;
        for (name, ty) in &self.types {
            extents_ok(ty.half_extents, &format!("type '{}'", name))?;
        }
        for buffer in &self.buffers {
            if !self.types.contains_key(&buffer.type_name) {
                return Err(CellError::Manifest(format!(
                    "buffer '{}' references unknown type '{}'",
                    buffer.id, buffer.type_name
                )));
            }
            positive(buffer.slot_pitch, &format!("buffer '{}' slot_pitch", buffer.id))?;
        }
        for obstacle in &self.obstacles {
            extents_ok(obstacle.half_extents, &format!("obstacle '{}'", obstacle.id))?;
        }
        Ok(())
    }

    pub fn half_extents_of(&self, type_name: &str) -> Option<Point3> {
        self.types.get(type_name).map(|t| t.half_extents)
    }

    pub fn set_type_extents(&mut self, type_name: &str, half_extents: Point3) {
        self.types.insert(type_name.to_string(), TypeGeometry { half_extents });
    }

    /// Static obstacle boxes: the station slab plus every configured fixture.
    pub fn static_obstacles(&self) -> Vec<(String, Aabb)> {
        let mut out = vec![("station".to_string(), self.station.slab())];
        for obstacle in &self.obstacles {
            out.push((
                obstacle.id.clone(),
                Aabb::new(obstacle.center, obstacle.half_extents).expect("validated extents"),
            ));
        }
        out
    }

    /// Applies a `key=value` numeric override from the command line.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), CellError> {
        let parse = |value: &str| -> Result<f64, CellError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CellError::Manifest(format!("override value '{}' is not a number", value)))
        };
        match key {
            "contact_tolerance" => self.contact_tolerance = parse(value)?,
            "sweep_step" => self.sweep_step = parse(value)?,
            "clearance" => self.clearance = parse(value)?,
            "tick_budget" => {
                self.tick_budget = value.parse::<u64>().map_err(|_| {
                    CellError::Manifest(format!("override value '{}' is not an integer", value))
                })?
            }
            "linear_speed" => self.robot.linear_speed = parse(value)?,
            "angular_speed" => self.robot.angular_speed = parse(value)?,
            "mobile_speed" => self.mobile.speed = parse(value)?,
            other => {
                return Err(CellError::Manifest(format!("unknown override key '{}'", other)));
            }
        }
        self.validate()
    }
}
