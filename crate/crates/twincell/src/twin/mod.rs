//! The digital twin: part and connection graph built from an item stream,
//! assembly pose resolution, sequence planning and path planning.

mod planner;

pub use planner::{PlanAttempt, Strategy, Trajectory};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cell::CellGeometry;
use crate::geom::{aabb_at, rotate_point, Orientation, Point3, Pose};
use crate::items::{Item, ItemStream};

/// Tolerance for deciding that a part rests on the assembly surface.
const SURFACE_EPSILON: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum TwinError {
    #[error("unknown part type '{0}': no geometry entry")]
    UnknownType(String),
    #[error("conflicting values for parameter key '{0}'")]
    RegistryConflict(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("connection references unknown instance '{0}'")]
    UnknownInstance(String),
    #[error("duplicate instance name '{0}'")]
    DuplicateInstance(String),
    #[error("connection joins '{0}' to itself")]
    SelfConnection(String),
    #[error("product connection graph is disconnected: {0}")]
    Disconnected(String),
    #[error("empty product")]
    EmptyProduct,
    #[error("part '{0}' has no pose")]
    PoseUnset(String),
    #[error("part '{0}' has no resolved target pose")]
    TargetUnset(String),
    #[error("pose resolution stalled with unassembled parts")]
    ResolutionStalled,
    #[error("no collision-free path for part '{part}': {}", format_attempts(.attempts))]
    PlanningFailed { part: String, attempts: Vec<PlanAttempt> },
}

fn format_attempts(attempts: &[PlanAttempt]) -> String {
    attempts
        .iter()
        .map(|a| format!("{} hits {}", a.strategy, a.report.obstacle_id))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Index of a part inside its twin, in create-item order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartId(pub usize);

/// Type-level connection point coordinates keyed by
/// `"<type_name>.<param_name>"`. Re-inserting an equal value is accepted,
/// a different value is a conflict.
#[derive(Debug, Clone, Default)]
pub struct ParamRegistry {
    map: BTreeMap<String, Point3>,
}

impl ParamRegistry {
    pub fn key(type_name: &str, param_name: &str) -> String {
        format!("{}.{}", type_name, param_name)
    }

    pub fn insert(&mut self, type_name: &str, param_name: &str, point: Point3) -> Result<(), TwinError> {
        let key = Self::key(type_name, param_name);
        if let Some(existing) = self.map.get(&key) {
            if *existing != point {
                return Err(TwinError::RegistryConflict(key));
            }
            return Ok(());
        }
        self.map.insert(key, point);
        Ok(())
    }

    pub fn get(&self, type_name: &str, param_name: &str) -> Result<Point3, TwinError> {
        let key = Self::key(type_name, param_name);
        self.map.get(&key).copied().ok_or(TwinError::MissingParameter(key))
    }

    pub fn contains(&self, type_name: &str, param_name: &str) -> bool {
        self.map.contains_key(&Self::key(type_name, param_name))
    }
}

/// A product part with its current and resolved target pose.
#[derive(Debug, Clone)]
pub struct DigitalPart {
    pub instance_name: String,
    pub type_name: String,
    pub color: String,
    /// Declared orientation in the finished assembly.
    pub orientation: Orientation,
    pub half_extents: Point3,
    /// Current pose in the cell, if the part is anywhere yet.
    pub pose: Option<Pose>,
    /// Pose in the finished assembly, set by pose resolution.
    pub target_pose: Option<Pose>,
    pub assembled: bool,
    pub delivered: bool,
}

/// A semantic joint between two parts at named connection points.
#[derive(Debug, Clone)]
pub struct Connection {
    pub part1: PartId,
    pub part2: PartId,
    pub point1: String,
    pub point2: String,
}

/// The product's digital counterpart: parts, connections, parameter registry
/// and the planning context taken from the cell geometry.
#[derive(Debug, Clone)]
pub struct DigitalTwin {
    parts: Vec<DigitalPart>,
    connections: Vec<Connection>,
    registry: ParamRegistry,
    base: Option<PartId>,
    resolved: bool,
    assembly_min_height: f64,
    assembly_max_height: f64,
    planner: planner::PlannerContext,
}

/// Builds a twin from a validated item stream. The geometry manifest supplies
/// the bounding box of every part type plus the planner's staging point and
/// clearances. The connection graph must be connected.
pub fn build_twin(stream: &ItemStream, geometry: &CellGeometry) -> Result<DigitalTwin, TwinError> {
    let mut registry = ParamRegistry::default();
    let mut parts: Vec<DigitalPart> = Vec::new();
    let mut connections: Vec<Connection> = Vec::new();
    let mut index: BTreeMap<String, PartId> = BTreeMap::new();

    for item in stream.items() {
        match item {
            Item::Parameter { type_name, param_name, point } => {
                registry.insert(type_name, param_name, *point)?;
            }
            Item::Create { type_name, instance_name, color, orientation } => {
                let half_extents = geometry
                    .half_extents_of(type_name)
                    .ok_or_else(|| TwinError::UnknownType(type_name.clone()))?;
                if index.contains_key(instance_name) {
                    return Err(TwinError::DuplicateInstance(instance_name.clone()));
                }
                index.insert(instance_name.clone(), PartId(parts.len()));
                parts.push(DigitalPart {
                    instance_name: instance_name.clone(),
                    type_name: type_name.clone(),
                    color: color.clone(),
                    orientation: *orientation,
                    half_extents,
                    pose: None,
                    target_pose: None,
                    assembled: false,
                    delivered: false,
                });
            }
            Item::Connection { instance_a, point_a, instance_b, point_b } => {
                let a = *index
                    .get(instance_a)
                    .ok_or_else(|| TwinError::UnknownInstance(instance_a.clone()))?;
                let b = *index
                    .get(instance_b)
                    .ok_or_else(|| TwinError::UnknownInstance(instance_b.clone()))?;
                if a == b {
                    return Err(TwinError::SelfConnection(instance_a.clone()));
                }
                connections.push(Connection { part1: a, part2: b, point1: point_a.clone(), point2: point_b.clone() });
            }
        }
    }

    check_connectivity(&parts, &connections)?;

    Ok(DigitalTwin {
        parts,
        connections,
        registry,
        base: None,
        resolved: false,
        assembly_min_height: 0.0,
        assembly_max_height: 0.0,
        planner: planner::PlannerContext::from_geometry(geometry),
    })
}

fn check_connectivity(parts: &[DigitalPart], connections: &[Connection]) -> Result<(), TwinError> {
    if parts.len() <= 1 {
        return Ok(());
    }
    let mut component: Vec<usize> = (0..parts.len()).collect();
    fn root(component: &Vec<usize>, mut i: usize) -> usize {
        while component[i] != i {
            i = component[i];
        }
        i
    }
    for c in connections {
        let (a, b) = (root(&component, c.part1.0), root(&component, c.part2.0));
        if a != b {
            let (keep, merge) = (a.min(b), a.max(b));
            component[merge] = keep;
        }
    }
    let mut groups: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (i, part) in parts.iter().enumerate() {
        groups.entry(root(&component, i)).or_default().push(&part.instance_name);
    }
    if groups.len() > 1 {
        let listing = groups
            .values()
            .map(|names| format!("[{}]", names.join(" ")))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(TwinError::Disconnected(listing));
    }
    Ok(())
}

impl DigitalTwin {
    pub fn parts(&self) -> &[DigitalPart] {
        &self.parts
    }

    pub fn part(&self, id: PartId) -> &DigitalPart {
        &self.parts[id.0]
    }

    pub fn part_mut(&mut self, id: PartId) -> &mut DigitalPart {
        &mut self.parts[id.0]
    }

    pub fn part_ids(&self) -> impl Iterator<Item = PartId> {
        (0..self.parts.len()).map(PartId)
    }

    pub fn part_by_name(&self, name: &str) -> Option<PartId> {
        self.parts.iter().position(|p| p.instance_name == name).map(PartId)
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn registry(&self) -> &ParamRegistry {
        &self.registry
    }

    pub fn base_part(&self) -> Option<PartId> {
        self.base
    }

    pub fn is_resolved(&self) -> bool {
        self.resolved
    }

    /// Lowest target bounding-box height over all parts.
    pub fn assembly_min_height(&self) -> f64 {
        self.assembly_min_height
    }

    /// Highest target bounding-box height over all parts.
    pub fn assembly_max_height(&self) -> f64 {
        self.assembly_max_height
    }

    pub(crate) fn planner_context(&self) -> &planner::PlannerContext {
        &self.planner
    }

    /// World coordinate of a named connection point at the part's current
    /// pose: the type-level local point rotated by the part orientation and
    /// offset by the part position.
    pub fn get_connection_point(&self, id: PartId, name: &str) -> Result<Point3, TwinError> {
        let part = self.part(id);
        let pose = part.pose.ok_or_else(|| TwinError::PoseUnset(part.instance_name.clone()))?;
        Ok(Self::point_at(&self.registry, part, pose, name)?)
    }

    /// Same as [`Self::get_connection_point`] but evaluated at the resolved
    /// target pose.
    pub fn connection_point_at_target(&self, id: PartId, name: &str) -> Result<Point3, TwinError> {
        let part = self.part(id);
        let pose = part
            .target_pose
            .ok_or_else(|| TwinError::TargetUnset(part.instance_name.clone()))?;
        Ok(Self::point_at(&self.registry, part, pose, name)?)
    }

    fn point_at(registry: &ParamRegistry, part: &DigitalPart, pose: Pose, name: &str) -> Result<Point3, TwinError> {
        let local = registry.get(&part.type_name, name)?;
        Ok(pose.position + rotate_point(local, pose.orientation))
    }

    /// Deterministic "arbitrary" base choice: the part with the most
    /// connections, ties broken by ascending instance name.
    pub fn select_base_part(&self) -> Result<PartId, TwinError> {
        if self.parts.is_empty() {
            return Err(TwinError::EmptyProduct);
        }
        let mut degree = vec![0usize; self.parts.len()];
        for c in &self.connections {
            degree[c.part1.0] += 1;
            degree[c.part2.0] += 1;
        }
        let best = self
            .part_ids()
            .max_by(|a, b| {
                degree[a.0]
                    .cmp(&degree[b.0])
                    .then_with(|| self.part(*b).instance_name.cmp(&self.part(*a).instance_name))
            })
            .expect("non-empty");
        Ok(best)
    }

    /// Resolves the target pose of every part by walking connections from the
    /// base part, then resets the assembled flags for reuse by sequence
    /// planning. The base lands at the origin.
    pub fn resolve_assembly(&mut self) -> Result<(), TwinError> {
        self.resolve_assembly_at(Point3::ZERO)
    }

    /// Pose resolution with the base part placed at `base_position`; target
    /// poses are translation-equivariant in this argument.
    pub fn resolve_assembly_at(&mut self, base_position: Point3) -> Result<(), TwinError> {
        if self.parts.is_empty() {
            self.resolved = true;
            return Ok(());
        }
        let base = match self.base {
            Some(base) => base,
            None => self.select_base_part()?,
        };
        for part in &mut self.parts {
            part.pose = None;
            part.target_pose = None;
            part.assembled = false;
        }
        {
            let part = &mut self.parts[base.0];
            part.pose = Some(Pose::new(base_position, part.orientation));
            part.assembled = true;
        }

        let mut placed = 1;
        while placed < self.parts.len() {
            let mut advanced = false;
            'scan: for i in 0..self.connections.len() {
                let c = self.connections[i].clone();
                let directions = [
                    (c.part1, c.part2, c.point1.clone(), c.point2.clone()),
                    (c.part2, c.part1, c.point2.clone(), c.point1.clone()),
                ];
                for (anchor_id, free_id, anchor_point, free_point) in directions {
                    if self.parts[anchor_id.0].assembled && !self.parts[free_id.0].assembled {
                        let anchor = self.get_connection_point(anchor_id, &anchor_point)?;
                        let free = &self.parts[free_id.0];
                        let local = self.registry.get(&free.type_name, &free_point)?;
                        let position = anchor - rotate_point(local, free.orientation);
                        let orientation = free.orientation;
                        let part = &mut self.parts[free_id.0];
                        part.pose = Some(Pose::new(position, orientation));
                        part.assembled = true;
                        placed += 1;
                        advanced = true;
                        break 'scan;
                    }
                }
            }
            if !advanced {
                // unreachable with a connected graph; kept defensively
                return Err(TwinError::ResolutionStalled);
            }
        }

        let mut min_height = f64::INFINITY;
        let mut max_height = f64::NEG_INFINITY;
        for part in &mut self.parts {
            let pose = part.pose.take().expect("all parts placed");
            let aabb = aabb_at(part.half_extents, pose).expect("positive extents");
            min_height = min_height.min(aabb.min().y);
            max_height = max_height.max(aabb.max().y);
            part.target_pose = Some(pose);
            part.assembled = false;
        }
        self.assembly_min_height = min_height;
        self.assembly_max_height = max_height;
        self.base = Some(base);
        self.resolved = true;
        Ok(())
    }

    fn target_aabb_min_height(&self, id: PartId) -> f64 {
        let part = self.part(id);
        let pose = part.target_pose.expect("resolved");
        aabb_at(part.half_extents, pose).expect("positive extents").min().y
    }

    /// One step of assembly sequence planning. Returns the next part to
    /// place: first any unassembled part resting on the assembly surface (in
    /// create order), otherwise the lowest unassembled part connected to an
    /// assembled one (ties by instance name). `None` once everything is
    /// assembled. The caller marks the part assembled after placing it.
    pub fn next_unassembled_part(&self) -> Option<PartId> {
        assert!(self.resolved, "resolve_assembly must run before sequence planning");
        let unassembled: Vec<PartId> =
            self.part_ids().filter(|id| !self.part(*id).assembled).collect();
        if unassembled.is_empty() {
            return None;
        }

        let surface: Vec<PartId> = unassembled
            .iter()
            .copied()
            .filter(|id| self.target_aabb_min_height(*id) <= self.assembly_min_height + SURFACE_EPSILON)
            .collect();
        if let Some(first) = surface.first() {
            return Some(*first);
        }

        unassembled
            .into_iter()
            .filter(|id| self.has_assembled_neighbor(*id))
            .min_by(|a, b| {
                self.target_aabb_min_height(*a)
                    .partial_cmp(&self.target_aabb_min_height(*b))
                    .expect("finite heights")
                    .then_with(|| self.part(*a).instance_name.cmp(&self.part(*b).instance_name))
            })
    }

    fn has_assembled_neighbor(&self, id: PartId) -> bool {
        self.connections.iter().any(|c| {
            (c.part1 == id && self.part(c.part2).assembled)
                || (c.part2 == id && self.part(c.part1).assembled)
        })
    }

    /// Residual distance between the two connection points of every
    /// connection, evaluated at target poses. All residuals are ~0 for a
    /// consistently designed product.
    pub fn connection_residuals(&self) -> Result<Vec<(usize, f64)>, TwinError> {
        let mut out = Vec::new();
        for (i, c) in self.connections.iter().enumerate() {
            let a = self.connection_point_at_target(c.part1, &c.point1)?;
            let b = self.connection_point_at_target(c.part2, &c.point2)?;
            out.push((i, a.distance(b)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::CellGeometry;
    use crate::items::read_items;

    fn geometry_with(types: &[(&str, Point3)]) -> CellGeometry {
        let mut geometry = CellGeometry::default();
        for (name, half) in types {
            geometry.set_type_extents(name, *half);
        }
        geometry
    }

    fn block_geometry() -> CellGeometry {
        geometry_with(&[("Block", Point3::new(0.5, 0.5, 0.5))])
    }

    fn twin_from(text: &str, geometry: &CellGeometry) -> DigitalTwin {
        build_twin(&read_items(text).unwrap(), geometry).unwrap()
    }

    #[test]
    fn build_populates_registry_and_parts() {
        let geometry = geometry_with(&[("FaceplateBack", Point3::new(1.4, 0.1, 1.4))]);
        let twin = twin_from(
            "parameter FaceplateBack circle_left -1.021 0 -0.774\n\
             create FaceplateBack back pink 0,0\n",
            &geometry,
        );
        assert_eq!(
            twin.registry().get("FaceplateBack", "circle_left").unwrap(),
            Point3::new(-1.021, 0.0, -0.774)
        );
        assert_eq!(twin.parts().len(), 1);
    }

    #[test]
    fn build_rejects_disconnected_products() {
        let err = build_twin(
            &read_items("create Block a gray 0,0\ncreate Block b gray 0,0\n").unwrap(),
            &block_geometry(),
        )
        .unwrap_err();
        assert!(matches!(err, TwinError::Disconnected(_)), "{err:?}");
    }

    #[test]
    fn build_accepts_duplicate_equal_parameters() {
        let twin = twin_from(
            "parameter Block top 0 0.5 0\nparameter Block top 0 0.5 0\ncreate Block a gray 0,0\n",
            &block_geometry(),
        );
        assert!(twin.registry().contains("Block", "top"));
    }

    #[test]
    fn registry_rejects_conflicting_parameters() {
        let mut registry = ParamRegistry::default();
        registry.insert("Block", "top", Point3::new(0.0, 0.5, 0.0)).unwrap();
        // re-inserting the same value is idempotent
        registry.insert("Block", "top", Point3::new(0.0, 0.5, 0.0)).unwrap();
        let err = registry.insert("Block", "top", Point3::new(0.0, 0.6, 0.0)).unwrap_err();
        assert!(matches!(err, TwinError::RegistryConflict(_)));
        assert!(matches!(
            registry.get("Block", "nosuch"),
            Err(TwinError::MissingParameter(_))
        ));
    }

    #[test]
    fn build_rejects_unknown_type() {
        let err = build_twin(
            &read_items("create Mystery a gray 0,0\n").unwrap(),
            &block_geometry(),
        )
        .unwrap_err();
        assert!(matches!(err, TwinError::UnknownType(_)));
    }

    #[test]
    fn connection_point_offsets_and_rotations() {
        let mut twin = twin_from(
            "parameter Block shaft -0.006 0 0.226\n\
             parameter Block zero 0 0 0\n\
             parameter Block unit_x 1 0 0\n\
             create Block a gray 0,0\n",
            &block_geometry(),
        );
        let a = twin.part_by_name("a").unwrap();

        twin.part_mut(a).pose = Some(Pose::at(Point3::ZERO));
        assert_eq!(twin.get_connection_point(a, "shaft").unwrap(), Point3::new(-0.006, 0.0, 0.226));

        twin.part_mut(a).pose = Some(Pose::at(Point3::new(1.0, 2.0, 3.0)));
        assert_eq!(twin.get_connection_point(a, "zero").unwrap(), Point3::new(1.0, 2.0, 3.0));

        twin.part_mut(a).pose = Some(Pose::new(Point3::ZERO, Orientation::new(90.0, 0.0)));
        let p = twin.get_connection_point(a, "unit_x").unwrap();
        assert!((p - Point3::new(0.0, 0.0, -1.0)).norm() < 1e-12);

        assert!(matches!(
            twin.get_connection_point(a, "nosuch"),
            Err(TwinError::MissingParameter(_))
        ));
    }

    const STACK: &str = "parameter Block top 0 0.5 0\n\
        parameter Block bottom 0 -0.5 0\n\
        create Block a gray 0,0\n\
        create Block b gray 0,0\n\
        connection a top b bottom\n";

    #[test]
    fn resolve_places_stacked_pair() {
        let mut twin = twin_from(STACK, &block_geometry());
        twin.resolve_assembly().unwrap();
        // base selection tie between a and b goes to "a"
        assert_eq!(twin.base_part(), twin.part_by_name("a"));
        let b = twin.part_by_name("b").unwrap();
        assert_eq!(twin.part(b).target_pose.unwrap().position, Point3::new(0.0, 1.0, 0.0));
        // flags are reset for sequence planning
        assert!(twin.parts().iter().all(|p| !p.assembled));
    }

    /// Independent oracle: breadth-first offset summing over the connection
    /// tree with identity orientations.
    fn bfs_offset_oracle(twin: &DigitalTwin, base: PartId) -> Vec<Point3> {
        let n = twin.parts().len();
        let mut pos = vec![None; n];
        pos[base.0] = Some(Point3::ZERO);
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(current) = queue.pop_front() {
            for c in twin.connections() {
                for (from, to, pf, pt) in [
                    (c.part1, c.part2, &c.point1, &c.point2),
                    (c.part2, c.part1, &c.point2, &c.point1),
                ] {
                    if from == current && pos[to.0].is_none() {
                        let from_local = twin.registry().get(&twin.part(from).type_name, pf).unwrap();
                        let to_local = twin.registry().get(&twin.part(to).type_name, pt).unwrap();
                        pos[to.0] = Some(pos[from.0].unwrap() + from_local - to_local);
                        queue.push_back(to);
                    }
                }
            }
        }
        pos.into_iter().map(|p| p.unwrap()).collect()
    }

    #[test]
    fn resolve_chain_matches_bfs_oracle() {
        let mut twin = twin_from(
            "parameter Block top 0 0.5 0\n\
             parameter Block bottom 0 -0.5 0\n\
             create Block a gray 0,0\n\
             create Block b gray 0,0\n\
             create Block c gray 0,0\n\
             connection a top b bottom\n\
             connection b top c bottom\n",
            &block_geometry(),
        );
        twin.resolve_assembly().unwrap();
        let base = twin.base_part().unwrap();
        // base is "b" (degree 2); re-derive expected absolute positions
        let oracle = bfs_offset_oracle(&twin, base);
        for id in twin.part_ids() {
            let got = twin.part(id).target_pose.unwrap().position;
            assert!((got - oracle[id.0]).norm() <= 1e-12);
        }
        // chain spacing: c sits exactly (0,2,0) above a
        let a = twin.part_by_name("a").unwrap();
        let c = twin.part_by_name("c").unwrap();
        let delta = twin.part(c).target_pose.unwrap().position - twin.part(a).target_pose.unwrap().position;
        assert!((delta - Point3::new(0.0, 2.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn resolve_is_translation_equivariant() {
        let offset = Point3::new(3.5, -1.0, 2.25);
        let mut twin_a = twin_from(STACK, &block_geometry());
        twin_a.resolve_assembly().unwrap();
        let mut twin_b = twin_from(STACK, &block_geometry());
        twin_b.resolve_assembly_at(offset).unwrap();
        for id in twin_a.part_ids() {
            let a = twin_a.part(id).target_pose.unwrap().position;
            let b = twin_b.part(id).target_pose.unwrap().position;
            assert!((b - (a + offset)).norm() <= 1e-12);
        }
    }

    #[test]
    fn residuals_vanish_after_resolve() {
        let mut twin = twin_from(STACK, &block_geometry());
        twin.resolve_assembly().unwrap();
        for (_, r) in twin.connection_residuals().unwrap() {
            assert!(r <= 1e-6);
        }
    }

    #[test]
    fn select_base_prefers_high_degree_then_name() {
        // hub with two leaves: hub has degree 2
        let twin = twin_from(
            "parameter Block top 0 0.5 0\n\
             parameter Block bottom 0 -0.5 0\n\
             parameter Block side 0.5 0 0\n\
             create Block zz_hub gray 0,0\n\
             create Block leaf1 gray 0,0\n\
             create Block leaf2 gray 0,0\n\
             connection zz_hub top leaf1 bottom\n\
             connection zz_hub side leaf2 bottom\n",
            &block_geometry(),
        );
        assert_eq!(twin.select_base_part().unwrap(), twin.part_by_name("zz_hub").unwrap());
    }

    #[test]
    fn select_base_single_part_and_tie() {
        let single = twin_from("create Block only gray 0,0\n", &block_geometry());
        assert_eq!(single.select_base_part().unwrap(), single.part_by_name("only").unwrap());

        let pair = twin_from(STACK, &block_geometry());
        assert_eq!(pair.select_base_part().unwrap(), pair.part_by_name("a").unwrap());
    }

    #[test]
    fn empty_twin_has_no_base() {
        let twin = build_twin(&ItemStream::default(), &block_geometry()).unwrap();
        assert!(matches!(twin.select_base_part(), Err(TwinError::EmptyProduct)));
    }

    #[test]
    fn asp_orders_by_surface_then_height_with_name_ties() {
        // plate on the surface, two bolts at equal height, a mast above
        let geometry = geometry_with(&[
            ("Plate", Point3::new(2.0, 0.1, 2.0)),
            ("Bolt", Point3::new(0.1, 0.4, 0.1)),
            ("Mast", Point3::new(0.1, 1.0, 0.1)),
        ]);
        let mut twin = twin_from(
            "parameter Plate left -1 0.1 0\n\
             parameter Plate right 1 0.1 0\n\
             parameter Plate mid 0 0.1 0\n\
             parameter Bolt base 0 -0.4 0\n\
             parameter Bolt tip 0 0.4 0\n\
             parameter Mast base 0 -1 0\n\
             create Plate plate gray 0,0\n\
             create Bolt boltA2 gray 0,0\n\
             create Bolt boltA1 gray 0,0\n\
             create Mast mast gray 0,0\n\
             connection plate left boltA2 base\n\
             connection plate right boltA1 base\n\
             connection plate mid mast base\n",
            &geometry,
        );
        twin.resolve_assembly().unwrap();

        let mut order = Vec::new();
        while let Some(id) = twin.next_unassembled_part() {
            order.push(twin.part(id).instance_name.clone());
            twin.part_mut(id).assembled = true;
        }
        // plate is the surface part; bolts and mast all rest at the same
        // minimum height, so the tie goes alphabetically
        assert_eq!(order, vec!["plate", "boltA1", "boltA2", "mast"]);
        assert_eq!(twin.next_unassembled_part(), None);
    }
}
