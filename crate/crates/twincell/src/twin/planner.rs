//! Assembly path planning: candidate insertion trajectories per strategy,
//! checked with the swept collision test.

use serde::{Deserialize, Serialize};

use crate::cell::CellGeometry;
use crate::geom::{sweep_check, Aabb, CollisionReport, Orientation, Point3, Pose, Segment};

use super::{DigitalTwin, PartId, TwinError};

/// Insertion direction of a candidate trajectory. Candidates are tried in
/// the declaration order below; `Up` is promoted to the front when the mating
/// point on the assembled partner lies below that partner's center, the cue
/// for parts that fasten to an underside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Down,
    LateralNegX,
    LateralPosX,
    Up,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Down,
        Strategy::LateralNegX,
        Strategy::LateralPosX,
        Strategy::Up,
    ];
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Strategy::Down => "down",
            Strategy::LateralNegX => "lateral_neg_x",
            Strategy::LateralPosX => "lateral_pos_x",
            Strategy::Up => "up",
        };
        write!(f, "{name}")
    }
}

/// A rejected candidate and the collision that killed it.
#[derive(Debug, Clone)]
pub struct PlanAttempt {
    pub strategy: Strategy,
    pub report: CollisionReport,
}

/// An ordered motion plan that carries a part from the staging point to its
/// resolved target pose.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub strategy: Strategy,
    pub start: Pose,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    /// Pose after executing all segments.
    pub fn end_pose(&self) -> Pose {
        self.segments.iter().fold(self.start, |pose, s| s.end_pose(pose))
    }

    /// Total translation distance plus rotational arc, used for reporting.
    pub fn path_length(&self) -> f64 {
        let mut total = 0.0;
        for segment in &self.segments {
            if let Segment::Translate { from, to } = segment {
                total += from.distance(*to);
            }
        }
        total
    }
}

/// Planner inputs copied out of the cell geometry when the twin is built.
#[derive(Debug, Clone)]
pub(crate) struct PlannerContext {
    /// Part-center staging pose above the drop zone; every trajectory starts
    /// here at identity orientation.
    pub staging: Point3,
    /// Extra height above the tallest target when traversing the cell.
    pub clearance: f64,
    pub sweep_step: f64,
    pub contact_tolerance: f64,
}

impl PlannerContext {
    pub fn from_geometry(geometry: &CellGeometry) -> Self {
        PlannerContext {
            staging: geometry.drop_zone.position,
            clearance: geometry.clearance,
            sweep_step: geometry.sweep_step,
            contact_tolerance: geometry.contact_tolerance,
        }
    }
}

impl DigitalTwin {
    /// Plans a collision-free insertion trajectory for `part`.
    ///
    /// Tries each non-excluded strategy in order and returns the first
    /// candidate whose swept bounding box clears every obstacle. The obstacle
    /// set must contain all assembled parts and the static cell geometry but
    /// not the moving part itself. Fails with the collision report of every
    /// attempted strategy if none is free.
    pub fn plan_assembly_path(
        &self,
        part: PartId,
        obstacles: &[(String, Aabb)],
        exclude: &[Strategy],
    ) -> Result<Trajectory, TwinError> {
        let target = self.part(part).target_pose.ok_or_else(|| {
            TwinError::TargetUnset(self.part(part).instance_name.clone())
        })?;
        let half = self.part(part).half_extents;
        let ctx = self.planner_context().clone();

        let mut attempts = Vec::new();
        for strategy in self.strategy_order(part) {
            if exclude.contains(&strategy) {
                continue;
            }
            let candidate = self.build_candidate(strategy, target, half, &ctx);
            match sweep_check(
                half,
                &candidate.segments,
                candidate.start,
                obstacles,
                ctx.sweep_step,
                ctx.contact_tolerance,
            ) {
                None => return Ok(candidate),
                Some(report) => attempts.push(PlanAttempt { strategy, report }),
            }
        }
        Err(TwinError::PlanningFailed {
            part: self.part(part).instance_name.clone(),
            attempts,
        })
    }

    /// Down, lateral and up candidates in default order, with `Up` first when
    /// the part mates against the underside of its assembled partner.
    fn strategy_order(&self, part: PartId) -> Vec<Strategy> {
        let mut order: Vec<Strategy> = Strategy::ALL.to_vec();
        if self.mates_below_partner_center(part) {
            order.retain(|s| *s != Strategy::Up);
            order.insert(0, Strategy::Up);
        }
        order
    }

    /// True when the first connection joining `part` to an assembled partner
    /// attaches at a point below the partner's center height.
    fn mates_below_partner_center(&self, part: PartId) -> bool {
        for c in self.connections() {
            let (partner, partner_point) = if c.part1 == part {
                (c.part2, &c.point2)
            } else if c.part2 == part {
                (c.part1, &c.point1)
            } else {
                continue;
            };
            if !self.part(partner).assembled {
                continue;
            }
            let Some(partner_pose) = self.part(partner).target_pose else { continue };
            let Ok(point) = self.connection_point_at_target(partner, partner_point) else {
                continue;
            };
            return point.y < partner_pose.position.y;
        }
        false
    }

    fn build_candidate(
        &self,
        strategy: Strategy,
        target: Pose,
        half: Point3,
        ctx: &PlannerContext,
    ) -> Trajectory {
        let start = Pose::new(ctx.staging, Orientation::IDENTITY);
        let safe_height = self.assembly_max_height() + ctx.clearance;
        let t = target.position;
        let lateral_offset = 4.0 * half.x + 0.5;
        let under_height = t.y - (4.0 * half.y + 0.5);

        let mut segments = Vec::new();
        let lift = Point3::new(ctx.staging.x, safe_height, ctx.staging.z);
        segments.push(Segment::Translate { from: ctx.staging, to: lift });
        let mut cursor = lift;
        let mut push_to = |segments: &mut Vec<Segment>, to: Point3| {
            segments.push(Segment::Translate { from: cursor, to });
            cursor = to;
        };

        match strategy {
            Strategy::Down => {
                push_to(&mut segments, Point3::new(t.x, safe_height, t.z));
                push_rotation(&mut segments, target.orientation);
                push_to(&mut segments, t);
            }
            Strategy::LateralNegX | Strategy::LateralPosX => {
                // approach from the side and slide in along -x or +x
                let side_x = match strategy {
                    Strategy::LateralNegX => t.x + lateral_offset,
                    _ => t.x - lateral_offset,
                };
                push_to(&mut segments, Point3::new(side_x, safe_height, t.z));
                push_rotation(&mut segments, target.orientation);
                push_to(&mut segments, Point3::new(side_x, t.y, t.z));
                push_to(&mut segments, t);
            }
            Strategy::Up => {
                // descend beside the assembly, pass under the target, ascend
                let side_x = t.x + lateral_offset;
                push_to(&mut segments, Point3::new(side_x, safe_height, t.z));
                push_rotation(&mut segments, target.orientation);
                push_to(&mut segments, Point3::new(side_x, under_height, t.z));
                push_to(&mut segments, Point3::new(t.x, under_height, t.z));
                push_to(&mut segments, t);
            }
        }

        Trajectory { strategy, start, segments }
    }
}

fn push_rotation(segments: &mut Vec<Segment>, to: Orientation) {
    if !to.is_identity() {
        segments.push(Segment::Rotate { from: Orientation::IDENTITY, to });
    }
}
