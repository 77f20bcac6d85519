//! Structured scene snapshots: every entity pose and bounding box at one
//! tick, serializable as JSON for downstream visualization.

use serde::Serialize;

use crate::geom::{aabb_at, Aabb, Point3, Pose};
use crate::twin::DigitalTwin;

use super::geometry::CellGeometry;

#[derive(Debug, Clone, Serialize)]
pub struct SceneSnapshot {
    pub tick: u64,
    pub phase: String,
    pub parts: Vec<PartSnapshot>,
    pub arm: ArmSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mobile: Option<MobileSnapshot>,
    pub obstacles: Vec<ObstacleSnapshot>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartSnapshot {
    pub name: String,
    pub type_name: String,
    pub color: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pose: Option<Pose>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Pose>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aabb: Option<Aabb>,
    pub assembled: bool,
    pub delivered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmSnapshot {
    pub pose: Pose,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub held: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MobileSnapshot {
    pub position: Point3,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carried: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstacleSnapshot {
    pub id: String,
    pub center: Point3,
    pub half_extents: Point3,
}

pub(crate) fn build(
    tick: u64,
    phase: &str,
    twin: &DigitalTwin,
    geometry: &CellGeometry,
    arm_pose: Pose,
    held: Option<String>,
    mobile: Option<MobileSnapshot>,
) -> SceneSnapshot {
    let parts = twin
        .parts()
        .iter()
        .map(|part| PartSnapshot {
            name: part.instance_name.clone(),
            type_name: part.type_name.clone(),
            color: part.color.clone(),
            pose: part.pose,
            target: part.target_pose,
            aabb: part.pose.map(|pose| aabb_at(part.half_extents, pose).expect("positive extents")),
            assembled: part.assembled,
            delivered: part.delivered,
        })
        .collect();
    let obstacles = geometry
        .static_obstacles()
        .into_iter()
        .map(|(id, aabb)| ObstacleSnapshot { id, center: aabb.center, half_extents: aabb.half_extents })
        .collect();
    SceneSnapshot {
        tick,
        phase: phase.to_string(),
        parts,
        arm: ArmSnapshot { pose: arm_pose, held },
        mobile,
        obstacles,
    }
}
