//! 3D vectors, poses, axis-aligned boxes and discretized swept collision
//! checks shared by assembly planning and cell simulation.
//!
//! Coordinates are dimensionless model units. The second component (`y`) is
//! the height axis. Orientations have two rotary degrees of freedom matching
//! the cell's Cartesian robot: yaw about the height axis and pitch about the
//! x axis, both in degrees.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default overlap below which touching boxes are not considered colliding.
pub const DEFAULT_CONTACT_TOLERANCE: f64 = 1e-3;
/// Default arc-length sampling interval for swept collision checks.
pub const DEFAULT_SWEEP_STEP: f64 = 0.05;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("half extents must be strictly positive, got ({0}, {1}, {2})")]
    InvalidExtents(f64, f64, f64),
}

/// A point or free vector in model space. Serializes as a `[x, y, z]` array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Serialize for Point3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(deserializer)?;
        Ok(Point3::new(x, y, z))
    }
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation, `t` in `[0, 1]`.
    pub fn lerp(self, to: Point3, t: f64) -> Point3 {
        self + (to - self).scale(t)
    }

    /// Moves at most `max_step` toward `to`, landing exactly when within
    /// reach.
    pub fn step_toward(self, to: Point3, max_step: f64) -> Point3 {
        let delta = to - self;
        let distance = delta.norm();
        if distance <= max_step {
            to
        } else {
            self + delta.scale(max_step / distance)
        }
    }
}

impl std::ops::Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// Two rotary degrees of freedom in degrees, each normalized to `[0, 360)`.
///
/// Yaw rotates about the height axis, pitch about the x axis; rotations apply
/// in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    pub yaw: f64,
    pub pitch: f64,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { yaw: 0.0, pitch: 0.0 };

    /// Builds an orientation with both angles wrapped into `[0, 360)`.
    pub fn new(yaw: f64, pitch: f64) -> Self {
        Orientation { yaw: wrap_degrees(yaw), pitch: wrap_degrees(pitch) }
    }

    pub fn is_identity(self) -> bool {
        self.yaw == 0.0 && self.pitch == 0.0
    }

    /// Interpolates along the shortest angular path, `t` in `[0, 1]`.
    pub fn lerp(self, to: Orientation, t: f64) -> Orientation {
        Orientation::new(
            self.yaw + shortest_delta(self.yaw, to.yaw) * t,
            self.pitch + shortest_delta(self.pitch, to.pitch) * t,
        )
    }

    /// Largest absolute angular distance over both axes, along the shortest
    /// path, in degrees.
    pub fn angular_distance(self, to: Orientation) -> f64 {
        shortest_delta(self.yaw, to.yaw)
            .abs()
            .max(shortest_delta(self.pitch, to.pitch).abs())
    }

    /// Rotates both axes at most `max_step` degrees toward `to` along the
    /// shortest paths, landing exactly when within reach.
    pub fn step_toward(self, to: Orientation, max_step: f64) -> Orientation {
        if self.angular_distance(to) <= max_step {
            return to;
        }
        let step = |from: f64, target: f64| {
            let d = shortest_delta(from, target);
            from + d.clamp(-max_step, max_step)
        };
        Orientation::new(step(self.yaw, to.yaw), step(self.pitch, to.pitch))
    }
}

fn wrap_degrees(v: f64) -> f64 {
    let w = v % 360.0;
    if w < 0.0 {
        w + 360.0
    } else {
        w
    }
}

/// Signed shortest angular step from `from` to `to`, in `[-180, 180)`.
fn shortest_delta(from: f64, to: f64) -> f64 {
    let mut d = (to - from) % 360.0;
    if d < -180.0 {
        d += 360.0;
    } else if d >= 180.0 {
        d -= 360.0;
    }
    d
}

/// Position plus orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Point3,
    pub orientation: Orientation,
}

impl Pose {
    pub fn new(position: Point3, orientation: Orientation) -> Self {
        Pose { position, orientation }
    }

    pub fn at(position: Point3) -> Self {
        Pose { position, orientation: Orientation::IDENTITY }
    }
}

/// Rotates `p` by yaw about the height axis, then pitch about the x axis.
/// Length-preserving.
pub fn rotate_point(p: Point3, o: Orientation) -> Point3 {
    let (sy, cy) = o.yaw.to_radians().sin_cos();
    // Yaw about +y, right-handed: +90 deg sends +x to -z.
    let yawed = Point3::new(p.x * cy + p.z * sy, p.y, -p.x * sy + p.z * cy);
    let (sp, cp) = o.pitch.to_radians().sin_cos();
    Point3::new(
        yawed.x,
        yawed.y * cp - yawed.z * sp,
        yawed.y * sp + yawed.z * cp,
    )
}

/// Axis-aligned box given by center and strictly positive half extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub center: Point3,
    pub half_extents: Point3,
}

impl Aabb {
    pub fn new(center: Point3, half_extents: Point3) -> Result<Self, GeomError> {
        if half_extents.x <= 0.0 || half_extents.y <= 0.0 || half_extents.z <= 0.0 {
            return Err(GeomError::InvalidExtents(
                half_extents.x,
                half_extents.y,
                half_extents.z,
            ));
        }
        Ok(Aabb { center, half_extents })
    }

    pub fn min(self) -> Point3 {
        self.center - self.half_extents
    }

    pub fn max(self) -> Point3 {
        self.center + self.half_extents
    }
}

/// Axis-aligned bounds of a box of the given half extents placed at `pose`.
///
/// The rotated box is re-hulled into an axis-aligned one, so the result is a
/// conservative cover. Errors if any half extent is not strictly positive.
pub fn aabb_at(half_extents: Point3, pose: Pose) -> Result<Aabb, GeomError> {
    if half_extents.x <= 0.0 || half_extents.y <= 0.0 || half_extents.z <= 0.0 {
        return Err(GeomError::InvalidExtents(
            half_extents.x,
            half_extents.y,
            half_extents.z,
        ));
    }
    if pose.orientation.is_identity() {
        return Aabb::new(pose.position, half_extents);
    }
    let mut hull = Point3::ZERO;
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let corner = rotate_point(
                    Point3::new(
                        sx * half_extents.x,
                        sy * half_extents.y,
                        sz * half_extents.z,
                    ),
                    pose.orientation,
                );
                hull.x = hull.x.max(corner.x.abs());
                hull.y = hull.y.max(corner.y.abs());
                hull.z = hull.z.max(corner.z.abs());
            }
        }
    }
    Aabb::new(pose.position, hull)
}

/// True iff the boxes overlap by more than `contact_tolerance` on every axis.
/// Touching faces do not collide.
pub fn aabbs_intersect(a: Aabb, b: Aabb, contact_tolerance: f64) -> bool {
    let d = a.center - b.center;
    let h = a.half_extents + b.half_extents;
    h.x - d.x.abs() > contact_tolerance
        && h.y - d.y.abs() > contact_tolerance
        && h.z - d.z.abs() > contact_tolerance
}

/// One motion primitive: a straight translation at fixed orientation, or an
/// in-place rotation at fixed position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    Translate { from: Point3, to: Point3 },
    Rotate { from: Orientation, to: Orientation },
}

impl Segment {
    /// Pose after executing this segment starting from `pose`.
    pub fn end_pose(&self, pose: Pose) -> Pose {
        match *self {
            Segment::Translate { to, .. } => Pose::new(to, pose.orientation),
            Segment::Rotate { to, .. } => Pose::new(pose.position, to),
        }
    }

    /// Pose at parameter `t` in `[0, 1]` starting from `pose`.
    pub fn pose_at(&self, pose: Pose, t: f64) -> Pose {
        match *self {
            Segment::Translate { from, to } => Pose::new(from.lerp(to, t), pose.orientation),
            Segment::Rotate { from, to } => Pose::new(pose.position, from.lerp(to, t)),
        }
    }
}

/// First collision found when sweeping a box along a segment path.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub segment_index: usize,
    pub sample_pose: Pose,
    pub obstacle_id: String,
}

/// Sweeps a box of `moving_half_extents` along `path` starting at `start`,
/// sampling every segment at arc-length intervals of at most `step` plus both
/// endpoints. Returns the first collision in sample order; at an equal sample
/// the obstacle with the lowest id is reported.
///
/// Rotations are sampled so that no corner of the box moves farther than
/// `step` between consecutive samples.
///
/// # Panics
///
/// Panics if `step` is not strictly positive or `path` is empty.
pub fn sweep_check(
    moving_half_extents: Point3,
    path: &[Segment],
    start: Pose,
    obstacles: &[(String, Aabb)],
    step: f64,
    contact_tolerance: f64,
) -> Option<CollisionReport> {
    assert!(step > 0.0, "sweep step must be strictly positive");
    assert!(!path.is_empty(), "sweep path must be non-empty");
    let mut pose = start;
    for (index, segment) in path.iter().enumerate() {
        let samples = sample_count(segment, moving_half_extents, step);
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let sample = segment.pose_at(pose, t);
            if let Some(hit) = collision_at(moving_half_extents, sample, obstacles, contact_tolerance) {
                return Some(CollisionReport {
                    segment_index: index,
                    sample_pose: sample,
                    obstacle_id: hit,
                });
            }
        }
        pose = segment.end_pose(pose);
    }
    None
}

/// Checks one sample pose against all obstacles; returns the lowest colliding
/// obstacle id.
pub fn collision_at(
    moving_half_extents: Point3,
    pose: Pose,
    obstacles: &[(String, Aabb)],
    contact_tolerance: f64,
) -> Option<String> {
    let moving = aabb_at(moving_half_extents, pose).expect("validated extents");
    obstacles
        .iter()
        .filter(|(_, aabb)| aabbs_intersect(moving, *aabb, contact_tolerance))
        .map(|(id, _)| id.clone())
        .min()
}

fn sample_count(segment: &Segment, half_extents: Point3, step: f64) -> usize {
    let arc = match *segment {
        Segment::Translate { from, to } => from.distance(to),
        Segment::Rotate { from, to } => {
            half_extents.norm() * from.angular_distance(to).to_radians()
        }
    };
    ((arc / step).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: Point3, b: Point3, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {:?} within {} of {:?}",
            a,
            tol,
            b
        );
    }

    /// Independent rotation oracle: explicit matrix product R_x(pitch)*R_y(yaw).
    fn matrix_rotate(p: Point3, yaw_deg: f64, pitch_deg: f64) -> Point3 {
        let y = yaw_deg.to_radians();
        let x = pitch_deg.to_radians();
        let ry = [[y.cos(), 0.0, y.sin()], [0.0, 1.0, 0.0], [-y.sin(), 0.0, y.cos()]];
        let rx = [[1.0, 0.0, 0.0], [0.0, x.cos(), -x.sin()], [0.0, x.sin(), x.cos()]];
        let apply = |m: [[f64; 3]; 3], v: Point3| {
            Point3::new(
                m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
            )
        };
        apply(rx, apply(ry, p))
    }

    #[test]
    fn rotate_identity_is_identity() {
        let p = Point3::new(1.0, 0.0, 0.0);
        let r = rotate_point(p, Orientation::IDENTITY);
        assert_close(r, p, 1e-12);
    }

    #[test]
    fn rotate_yaw_90_sends_x_to_negative_z() {
        let r = rotate_point(Point3::new(1.0, 0.0, 0.0), Orientation::new(90.0, 0.0));
        assert_close(r, Point3::new(0.0, 0.0, -1.0), 1e-12);
        // cross-check against the matrix oracle
        let o = matrix_rotate(Point3::new(1.0, 0.0, 0.0), 90.0, 0.0);
        assert_close(r, o, 1e-12);
    }

    #[test]
    fn rotate_height_axis_fixed_under_yaw() {
        let r = rotate_point(Point3::new(0.0, 1.0, 0.0), Orientation::new(180.0, 0.0));
        assert_close(r, Point3::new(0.0, 1.0, 0.0), 1e-12);
    }

    #[test]
    fn rotate_matches_matrix_oracle_on_grid() {
        for yaw in [0.0, 30.0, 90.0, 135.0, 270.0, 359.0] {
            for pitch in [0.0, 45.0, 90.0, 200.0] {
                let p = Point3::new(0.3, -1.2, 2.5);
                let got = rotate_point(p, Orientation::new(yaw, pitch));
                let want = matrix_rotate(p, yaw, pitch);
                assert_close(got, want, 1e-9);
            }
        }
    }

    #[test]
    fn aabb_at_identity_and_translation() {
        let b = aabb_at(Point3::new(1.0, 1.0, 1.0), Pose::at(Point3::ZERO)).unwrap();
        assert_eq!(b.center, Point3::ZERO);
        assert_eq!(b.half_extents, Point3::new(1.0, 1.0, 1.0));

        let b = aabb_at(Point3::new(1.0, 1.0, 1.0), Pose::at(Point3::new(0.0, 5.0, 0.0))).unwrap();
        assert_eq!(b.center, Point3::new(0.0, 5.0, 0.0));
    }

    #[test]
    fn aabb_at_yaw_90_swaps_x_and_z() {
        let b = aabb_at(
            Point3::new(2.0, 1.0, 1.0),
            Pose::new(Point3::ZERO, Orientation::new(90.0, 0.0)),
        )
        .unwrap();
        // oracle: rotate all 8 corners, take componentwise bounds
        let mut want = Point3::ZERO;
        for sx in [-2.0f64, 2.0] {
            for sy in [-1.0f64, 1.0] {
                for sz in [-1.0f64, 1.0] {
                    let c = matrix_rotate(Point3::new(sx, sy, sz), 90.0, 0.0);
                    want.x = want.x.max(c.x.abs());
                    want.y = want.y.max(c.y.abs());
                    want.z = want.z.max(c.z.abs());
                }
            }
        }
        assert_close(b.half_extents, want, 1e-12);
        assert_close(b.half_extents, Point3::new(1.0, 1.0, 2.0), 1e-9);
    }

    #[test]
    fn aabb_at_rejects_non_positive_extents() {
        assert!(aabb_at(Point3::new(0.0, 1.0, 1.0), Pose::at(Point3::ZERO)).is_err());
        assert!(aabb_at(Point3::new(1.0, -1.0, 1.0), Pose::at(Point3::ZERO)).is_err());
    }

    fn unit_box(center: Point3) -> Aabb {
        Aabb::new(center, Point3::new(1.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn intersect_disjoint_boxes() {
        assert!(!aabbs_intersect(
            unit_box(Point3::ZERO),
            unit_box(Point3::new(3.0, 0.0, 0.0)),
            1e-3
        ));
    }

    #[test]
    fn intersect_exact_face_contact_is_not_collision() {
        assert!(!aabbs_intersect(
            unit_box(Point3::ZERO),
            unit_box(Point3::new(0.0, 2.0, 0.0)),
            1e-3
        ));
    }

    #[test]
    fn intersect_overlap_beyond_tolerance() {
        assert!(aabbs_intersect(
            unit_box(Point3::ZERO),
            unit_box(Point3::new(0.0, 1.5, 0.0)),
            1e-3
        ));
    }

    /// Independent dense sampler used as the sweep oracle. Walks every segment
    /// at a fixed tiny parameter step and tests overlap with its own min/max
    /// arithmetic.
    fn dense_sweep_oracle(
        half: Point3,
        path: &[Segment],
        start: Pose,
        obstacles: &[(String, Aabb)],
        step: f64,
        tol: f64,
    ) -> Option<String> {
        let mut pose = start;
        for segment in path {
            let arc = match *segment {
                Segment::Translate { from, to } => from.distance(to),
                Segment::Rotate { from, to } => half.norm() * from.angular_distance(to).to_radians(),
            };
            let n = ((arc / step).ceil() as usize).max(1);
            for i in 0..=n {
                let t = i as f64 / n as f64;
                let sample = segment.pose_at(pose, t);
                let moving = aabb_at(half, sample).unwrap();
                let (lo, hi) = (moving.min(), moving.max());
                for (id, ob) in obstacles {
                    let (olo, ohi) = (ob.min(), ob.max());
                    let overlap_x = hi.x.min(ohi.x) - lo.x.max(olo.x);
                    let overlap_y = hi.y.min(ohi.y) - lo.y.max(olo.y);
                    let overlap_z = hi.z.min(ohi.z) - lo.z.max(olo.z);
                    if overlap_x > tol && overlap_y > tol && overlap_z > tol {
                        return Some(id.clone());
                    }
                }
            }
            pose = segment.end_pose(pose);
        }
        None
    }

    fn descent(from_y: f64, to_y: f64) -> Vec<Segment> {
        vec![Segment::Translate {
            from: Point3::new(0.0, from_y, 0.0),
            to: Point3::new(0.0, to_y, 0.0),
        }]
    }

    #[test]
    fn sweep_empty_space_is_clear() {
        let path = descent(5.0, 0.5);
        let hit = sweep_check(
            Point3::new(0.5, 0.5, 0.5),
            &path,
            Pose::at(Point3::new(0.0, 5.0, 0.0)),
            &[],
            0.05,
            1e-3,
        );
        assert!(hit.is_none());
    }

    #[test]
    fn sweep_reports_obstacle_straddling_midpoint() {
        let half = Point3::new(0.5, 0.5, 0.5);
        let path = descent(5.0, 0.5);
        let obstacles = vec![(
            "block".to_string(),
            Aabb::new(Point3::new(0.0, 2.5, 0.0), Point3::new(1.0, 0.2, 1.0)).unwrap(),
        )];
        let hit = sweep_check(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.05, 1e-3);
        let report = hit.expect("collision expected");
        assert_eq!(report.obstacle_id, "block");
        // agrees with the 10x-finer independent oracle
        let oracle = dense_sweep_oracle(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.005, 1e-3);
        assert_eq!(oracle.as_deref(), Some("block"));
    }

    #[test]
    fn sweep_stopping_at_face_contact_is_clear() {
        // floor top at y=0; descending box of half height 0.5 stops centered
        // at y=0.5, exact face contact.
        let half = Point3::new(0.5, 0.5, 0.5);
        let path = descent(5.0, 0.5);
        let obstacles = vec![(
            "floor".to_string(),
            Aabb::new(Point3::new(0.0, -0.5, 0.0), Point3::new(3.0, 0.5, 3.0)).unwrap(),
        )];
        let hit = sweep_check(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.05, 1e-3);
        assert!(hit.is_none());
        let oracle = dense_sweep_oracle(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.005, 1e-3);
        assert!(oracle.is_none());
    }

    #[test]
    fn sweep_ties_resolved_by_lowest_obstacle_id() {
        let half = Point3::new(0.5, 0.5, 0.5);
        let path = descent(5.0, 0.5);
        let hit_box = Aabb::new(Point3::new(0.0, 2.5, 0.0), Point3::new(1.0, 0.2, 1.0)).unwrap();
        let mut obstacles = vec![
            ("zeta".to_string(), hit_box),
            ("alpha".to_string(), hit_box),
        ];
        let a = sweep_check(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.05, 1e-3).unwrap();
        obstacles.reverse();
        let b = sweep_check(half, &path, Pose::at(Point3::new(0.0, 5.0, 0.0)), &obstacles, 0.05, 1e-3).unwrap();
        assert_eq!(a.obstacle_id, "alpha");
        assert_eq!(b.obstacle_id, "alpha");
        assert_eq!(a.segment_index, b.segment_index);
    }

    #[test]
    fn sweep_rotation_samples_swept_hull() {
        // long bar rotating next to a post: the hull sweeps through it even
        // though start and end orientations are clear.
        let half = Point3::new(2.0, 0.2, 0.2);
        let path = vec![Segment::Rotate {
            from: Orientation::IDENTITY,
            to: Orientation::new(90.0, 0.0),
        }];
        let obstacles = vec![(
            "post".to_string(),
            Aabb::new(Point3::new(1.6, 0.0, -1.6), Point3::new(0.3, 1.0, 0.3)).unwrap(),
        )];
        let hit = sweep_check(half, &path, Pose::at(Point3::ZERO), &obstacles, 0.05, 1e-3);
        assert!(hit.is_some(), "rotating hull should clip the post");
    }

    proptest! {
        #[test]
        fn rotate_preserves_norm(
            x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0,
            yaw in 0.0f64..360.0, pitch in 0.0f64..360.0,
        ) {
            let p = Point3::new(x, y, z);
            let r = rotate_point(p, Orientation::new(yaw, pitch));
            prop_assert!((r.norm() - p.norm()).abs() <= 1e-9);
        }

        #[test]
        fn rotate_identity_pointwise(
            x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0,
        ) {
            let p = Point3::new(x, y, z);
            let r = rotate_point(p, Orientation::IDENTITY);
            prop_assert!((r - p).norm() <= 1e-12);
        }

        #[test]
        fn intersect_is_symmetric(
            ax in -3.0f64..3.0, ay in -3.0f64..3.0, az in -3.0f64..3.0,
            bx in -3.0f64..3.0, by in -3.0f64..3.0, bz in -3.0f64..3.0,
            hx in 0.1f64..2.0, hy in 0.1f64..2.0, hz in 0.1f64..2.0,
        ) {
            let a = Aabb::new(Point3::new(ax, ay, az), Point3::new(hx, hy, hz)).unwrap();
            let b = Aabb::new(Point3::new(bx, by, bz), Point3::new(hz, hx, hy)).unwrap();
            prop_assert_eq!(aabbs_intersect(a, b, 1e-3), aabbs_intersect(b, a, 1e-3));
        }

        #[test]
        fn sweep_agrees_with_dense_oracle(
            oy in 0.6f64..4.5,
            ox in -1.2f64..1.2,
            hh in 0.1f64..0.8,
        ) {
            let half = Point3::new(0.5, 0.5, 0.5);
            let path = descent(5.0, 0.5);
            let obstacles = vec![(
                "ob".to_string(),
                Aabb::new(Point3::new(ox, oy, 0.0), Point3::new(0.4, hh, 0.4)).unwrap(),
            )];
            let start = Pose::at(Point3::new(0.0, 5.0, 0.0));
            let coarse = sweep_check(half, &path, start, &obstacles, 0.05, 1e-3).is_some();
            let fine = dense_sweep_oracle(half, &path, start, &obstacles, 0.005, 1e-3).is_some();
            // the coarse sweep must not miss anything the fine oracle finds
            prop_assert!(coarse || !fine);
        }
    }
}
