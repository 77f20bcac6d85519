//! The deterministic tick loop: assembly station with robot arm, mobile
//! robot delivering from buffers, virtual and physical execution modes.
//!
//! Every state update runs in a fixed order inside [`Sim::step`], so a given
//! twin, geometry and mode always produce byte-identical traces. The loop is
//! strictly single-threaded.

use std::collections::{BTreeMap, VecDeque};

use crate::geom::{aabb_at, collision_at, sweep_check, Aabb, Orientation, Point3, Pose, Segment};
use crate::twin::{DigitalTwin, PartId, Strategy, Trajectory};

use super::geometry::CellGeometry;
use super::snapshot::{self, SceneSnapshot};
use super::trace::{Entity, EventKind, Trace, TraceEvent};
use super::CellError;

/// Execution mode of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Virtual,
    Physical,
    Both,
}

impl std::str::FromStr for SimMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "virtual" => Ok(SimMode::Virtual),
            "physical" => Ok(SimMode::Physical),
            "both" => Ok(SimMode::Both),
            other => Err(format!("unknown mode '{other}' (expected virtual, physical or both)")),
        }
    }
}

impl std::fmt::Display for SimMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimMode::Virtual => write!(f, "virtual"),
            SimMode::Physical => write!(f, "physical"),
            SimMode::Both => write!(f, "both"),
        }
    }
}

/// Snapshot cadence for a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Take a scene snapshot every N ticks.
    pub snapshot_every: Option<u64>,
    /// Take a scene snapshot at every connect event.
    pub snapshot_on_connect: bool,
}

/// Result of a run: the full trace up to completion or failure, collected
/// snapshots, and the failure if one occurred.
#[derive(Debug)]
pub struct SimOutcome {
    pub trace: Trace,
    pub snapshots: Vec<SceneSnapshot>,
    pub error: Option<CellError>,
}

impl SimOutcome {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Runs the full pipeline on a resolved twin. In `Both` mode the virtual
/// phase plans every trajectory, fills the delivery queue in assembly order,
/// and the physical phase replays the recorded trajectories with material
/// flow through buffers and the mobile robot.
pub fn run_simulation(twin: &mut DigitalTwin, geometry: &CellGeometry, mode: SimMode) -> SimOutcome {
    run_simulation_opts(twin, geometry, mode, SimOptions::default())
}

pub fn run_simulation_opts(
    twin: &mut DigitalTwin,
    geometry: &CellGeometry,
    mode: SimMode,
    options: SimOptions,
) -> SimOutcome {
    let mut sim = Sim::new(twin, geometry, options);
    let error = sim.run(mode).err();
    if let Some(err) = &error {
        let tick = sim.tick;
        sim.emit(TraceEvent {
            tick,
            entity: Entity::Twin,
            event: EventKind::Fail,
            part: None,
            pose: None,
            detail: Some(err.to_string()),
        });
    }
    SimOutcome { trace: sim.trace, snapshots: sim.snapshots, error }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Virtual,
    Physical,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::Virtual => "virtual",
            Phase::Physical => "physical",
        }
    }
}

#[derive(Debug)]
enum ArmPhase {
    Idle,
    /// Empty arm moving to the staging point to fetch the chosen part.
    Approach { part: PartId, trajectory: Trajectory },
    /// Carrying the part along its trajectory.
    Carry(CarryState),
    /// Backing out along the entry path after a collision, then switching to
    /// the replanned trajectory.
    Retreat { part: PartId, back: Vec<Segment>, segment: usize, next: Trajectory },
    Finished,
}

#[derive(Debug)]
struct CarryState {
    part: PartId,
    trajectory: Trajectory,
    segment: usize,
    /// Arm pose at the start of each segment entered so far; used to build
    /// the retreat path after a collision.
    segment_starts: Vec<Pose>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MobilePhase {
    Idle,
    ToBuffer { buffer: usize },
    Picking { buffer: usize },
    ToStation,
    Dropping,
}

struct BufferState {
    def_index: usize,
    remaining: VecDeque<Point3>,
}

pub(crate) struct Sim<'a> {
    twin: &'a mut DigitalTwin,
    geometry: &'a CellGeometry,
    options: SimOptions,
    phase: Phase,
    tick: u64,
    trace: Trace,
    snapshots: Vec<SceneSnapshot>,
    arm_pose: Pose,
    arm_held: Option<PartId>,
    arm_phase: ArmPhase,
    mobile_position: Point3,
    mobile_carried: Option<PartId>,
    mobile_phase: MobilePhase,
    mobile_queue: VecDeque<PartId>,
    buffers: Vec<BufferState>,
    drop_slot: Option<PartId>,
    /// Strategies that already collided for a part in this phase.
    excluded: BTreeMap<PartId, Vec<Strategy>>,
    /// Successful trajectories from the virtual phase, replayed in physical.
    recorded: BTreeMap<PartId, Trajectory>,
    /// Connect order of the virtual phase; becomes the delivery queue.
    asp_order: Vec<PartId>,
    replay: bool,
    connected_this_tick: bool,
    phase_done: bool,
}

impl<'a> Sim<'a> {
    pub(crate) fn new(twin: &'a mut DigitalTwin, geometry: &'a CellGeometry, options: SimOptions) -> Self {
        let arm_pose = Pose::new(
            geometry.robot.home,
            Orientation::new(geometry.robot.home_yaw, geometry.robot.home_pitch),
        );
        Sim {
            twin,
            geometry,
            options,
            phase: Phase::Virtual,
            tick: 0,
            trace: Trace::default(),
            snapshots: Vec::new(),
            arm_pose,
            arm_held: None,
            arm_phase: ArmPhase::Idle,
            mobile_position: geometry.mobile.home,
            mobile_carried: None,
            mobile_phase: MobilePhase::Idle,
            mobile_queue: VecDeque::new(),
            buffers: Vec::new(),
            drop_slot: None,
            excluded: BTreeMap::new(),
            recorded: BTreeMap::new(),
            asp_order: Vec::new(),
            replay: false,
            connected_this_tick: false,
            phase_done: false,
        }
    }

    fn run(&mut self, mode: SimMode) -> Result<(), CellError> {
        self.geometry.validate()?;
        if !self.twin.is_resolved() {
            self.twin.resolve_assembly()?;
        }
        let phases: &[Phase] = match mode {
            SimMode::Virtual => &[Phase::Virtual],
            SimMode::Physical => &[Phase::Physical],
            SimMode::Both => &[Phase::Virtual, Phase::Physical],
        };
        let replay_physical = mode == SimMode::Both;
        for (i, phase) in phases.iter().enumerate() {
            self.begin_phase(*phase, replay_physical && i > 0)?;
            while !self.phase_done {
                if self.tick >= self.geometry.tick_budget {
                    return Err(CellError::Timeout(self.geometry.tick_budget));
                }
                self.step()?;
            }
        }
        Ok(())
    }

    fn begin_phase(&mut self, phase: Phase, replay: bool) -> Result<(), CellError> {
        self.phase = phase;
        self.replay = replay;
        self.phase_done = false;
        self.arm_phase = ArmPhase::Idle;
        self.arm_held = None;
        self.arm_pose = Pose::new(
            self.geometry.robot.home,
            Orientation::new(self.geometry.robot.home_yaw, self.geometry.robot.home_pitch),
        );
        self.drop_slot = None;
        self.excluded.clear();
        for id in self.twin.part_ids().collect::<Vec<_>>() {
            let part = self.twin.part_mut(id);
            part.assembled = false;
            part.delivered = false;
            part.pose = None;
        }
        if phase == Phase::Physical {
            for id in self.twin.part_ids().collect::<Vec<_>>() {
                let type_name = self.twin.part(id).type_name.clone();
                if !self.geometry.buffers.iter().any(|b| b.type_name == type_name) {
                    return Err(CellError::MissingBuffer(type_name));
                }
            }
            self.buffers = self
                .geometry
                .buffers
                .iter()
                .enumerate()
                .map(|(i, def)| BufferState {
                    def_index: i,
                    remaining: (0..def.initial_count).map(|slot| def.slot_position(slot)).collect(),
                })
                .collect();
            self.mobile_position = self.geometry.mobile.home;
            self.mobile_carried = None;
            self.mobile_phase = MobilePhase::Idle;
            self.mobile_queue = self.assembly_order()?;
        }
        Ok(())
    }

    /// The assembly order, either recorded from the virtual phase or
    /// enumerated by repeated sequence planning.
    fn assembly_order(&mut self) -> Result<VecDeque<PartId>, CellError> {
        if self.replay && !self.asp_order.is_empty() {
            return Ok(self.asp_order.iter().copied().collect());
        }
        let mut order = VecDeque::new();
        while let Some(id) = self.twin.next_unassembled_part() {
            order.push_back(id);
            self.twin.part_mut(id).assembled = true;
        }
        for id in order.iter() {
            self.twin.part_mut(*id).assembled = false;
        }
        Ok(order)
    }

    /// One simulation tick: mobile robot first, then the arm cycle.
    pub(crate) fn step(&mut self) -> Result<(), CellError> {
        self.connected_this_tick = false;
        if self.phase == Phase::Physical {
            self.mobile_step()?;
        }
        self.arm_step()?;
        self.tick += 1;
        self.maybe_snapshot();
        Ok(())
    }

    fn maybe_snapshot(&mut self) {
        let periodic = self
            .options
            .snapshot_every
            .is_some_and(|every| every > 0 && self.tick % every == 0);
        let on_connect = self.options.snapshot_on_connect && self.connected_this_tick;
        if periodic || on_connect {
            let held = self.arm_held.map(|id| self.twin.part(id).instance_name.clone());
            let carried = self.mobile_carried.map(|id| self.twin.part(id).instance_name.clone());
            let mobile = (self.phase == Phase::Physical)
                .then(|| snapshot::MobileSnapshot { position: self.mobile_position, carried });
            self.snapshots.push(snapshot::build(
                self.tick,
                self.phase.name(),
                self.twin,
                self.geometry,
                self.arm_pose,
                held,
                mobile,
            ));
        }
    }

    fn emit(&mut self, event: TraceEvent) {
        self.trace.push(event);
    }

    fn emit_simple(&mut self, entity: Entity, event: EventKind, part: Option<PartId>, pose: Option<Pose>, detail: Option<String>) {
        let part = part.map(|id| self.twin.part(id).instance_name.clone());
        let event = TraceEvent {
            tick: self.tick,
            entity,
            event,
            part,
            pose: pose.map(Into::into),
            detail,
        };
        self.emit(event);
    }

    /// Obstacles for planning and execution checks: every assembled part at
    /// its pose plus the station slab and static fixtures. The mobile robot
    /// and the arm itself are deliberately not modeled.
    fn obstacles(&self) -> Vec<(String, Aabb)> {
        let mut out = Vec::new();
        for id in 0..self.twin.parts().len() {
            let part = &self.twin.parts()[id];
            if !part.assembled {
                continue;
            }
            let pose = part.pose.expect("assembled parts have poses");
            out.push((
                part.instance_name.clone(),
                aabb_at(part.half_extents, pose).expect("positive extents"),
            ));
        }
        out.extend(self.geometry.static_obstacles());
        out
    }

    // ------------------------------------------------------------------
    // Robot arm
    // ------------------------------------------------------------------

    fn staging_pose(&self) -> Pose {
        Pose::new(self.geometry.drop_zone.position, Orientation::IDENTITY)
    }

    fn arm_step(&mut self) -> Result<(), CellError> {
        match std::mem::replace(&mut self.arm_phase, ArmPhase::Idle) {
            ArmPhase::Finished => {
                self.arm_phase = ArmPhase::Finished;
                Ok(())
            }
            ArmPhase::Idle => self.arm_select(),
            ArmPhase::Approach { part, trajectory } => self.arm_approach(part, trajectory),
            ArmPhase::Carry(carry) => self.arm_carry(carry),
            ArmPhase::Retreat { part, back, segment, next } => {
                self.arm_retreat(part, back, segment, next)
            }
        }
    }

    fn arm_select(&mut self) -> Result<(), CellError> {
        let Some(part) = self.twin.next_unassembled_part() else {
            let phase = self.phase.name().to_string();
            self.emit_simple(Entity::Twin, EventKind::Done, None, None, Some(phase));
            self.arm_phase = ArmPhase::Finished;
            self.phase_done = true;
            return Ok(());
        };

        if self.phase == Phase::Physical && !self.twin.part(part).delivered {
            self.emit_simple(Entity::Twin, EventKind::Paused, Some(part), None, None);
            self.arm_phase = ArmPhase::Idle;
            return Ok(());
        }

        let trajectory = self.plan_for(part)?;
        if self.phase == Phase::Virtual {
            // virtual runs have no material flow: the part appears at staging
            self.twin.part_mut(part).pose = Some(self.staging_pose());
        }
        self.arm_phase = ArmPhase::Approach { part, trajectory };
        Ok(())
    }

    fn plan_for(&mut self, part: PartId) -> Result<Trajectory, CellError> {
        let obstacles = self.obstacles();
        if self.replay {
            if let Some(recorded) = self.recorded.get(&part) {
                let clear = sweep_check(
                    self.twin.part(part).half_extents,
                    &recorded.segments,
                    recorded.start,
                    &obstacles,
                    self.geometry.sweep_step,
                    self.geometry.contact_tolerance,
                )
                .is_none();
                if clear {
                    return Ok(recorded.clone());
                }
            }
        }
        let exclude = self.excluded.get(&part).cloned().unwrap_or_default();
        Ok(self.twin.plan_assembly_path(part, &obstacles, &exclude)?)
    }

    fn arm_approach(&mut self, part: PartId, trajectory: Trajectory) -> Result<(), CellError> {
        let target = trajectory.start;
        if self.arm_pose.orientation != target.orientation {
            let next = self
                .arm_pose
                .orientation
                .step_toward(target.orientation, self.geometry.robot.angular_speed);
            self.arm_pose.orientation = next;
            self.emit_simple(Entity::Arm, EventKind::Rotate, None, Some(self.arm_pose), None);
            self.arm_phase = ArmPhase::Approach { part, trajectory };
            return Ok(());
        }
        if self.arm_pose.position != target.position {
            self.arm_pose.position = self
                .arm_pose
                .position
                .step_toward(target.position, self.geometry.robot.linear_speed);
            self.emit_simple(Entity::Arm, EventKind::Move, None, Some(self.arm_pose), None);
            self.arm_phase = ArmPhase::Approach { part, trajectory };
            return Ok(());
        }
        // at the staging pose: grab the part and start carrying next tick
        self.arm_held = Some(part);
        self.drop_slot = None;
        self.twin.part_mut(part).pose = Some(self.arm_pose);
        self.arm_phase = ArmPhase::Carry(CarryState {
            part,
            trajectory,
            segment: 0,
            segment_starts: vec![self.arm_pose],
        });
        Ok(())
    }

    fn arm_carry(&mut self, mut carry: CarryState) -> Result<(), CellError> {
        let part = carry.part;
        let segment = carry.trajectory.segments[carry.segment];
        let (new_pose, event) = advance(self.arm_pose, segment, self.geometry);
        self.arm_pose = new_pose;
        self.twin.part_mut(part).pose = Some(new_pose);
        self.emit_simple(Entity::Arm, event, Some(part), Some(new_pose), None);

        if self.phase == Phase::Virtual {
            if let Some(obstacle) = self.execution_collision(part, new_pose) {
                return self.handle_collision(carry, obstacle);
            }
        }

        if pose_matches_segment_end(new_pose, segment) {
            carry.segment += 1;
            if carry.segment == carry.trajectory.segments.len() {
                return self.connect(carry);
            }
            carry.segment_starts.push(new_pose);
        }
        self.arm_phase = ArmPhase::Carry(carry);
        Ok(())
    }

    /// Collision test for the held part plus the gantry envelope above it.
    fn execution_collision(&self, part: PartId, pose: Pose) -> Option<String> {
        let obstacles = self.obstacles();
        let half = self.twin.part(part).half_extents;
        let tolerance = self.geometry.contact_tolerance;
        if let Some(id) = collision_at(half, pose, &obstacles, tolerance) {
            return Some(id);
        }
        let envelope = self.geometry.robot.envelope_half_extents;
        let part_box = aabb_at(half, pose).expect("positive extents");
        let envelope_pose = Pose::at(Point3::new(
            pose.position.x,
            part_box.max().y + envelope.y,
            pose.position.z,
        ));
        collision_at(envelope, envelope_pose, &obstacles, tolerance)
    }

    fn handle_collision(&mut self, carry: CarryState, obstacle: String) -> Result<(), CellError> {
        let part = carry.part;
        let strategy = carry.trajectory.strategy;
        self.emit_simple(
            Entity::Twin,
            EventKind::Collision,
            Some(part),
            Some(self.arm_pose),
            Some(format!("strategy={} obstacle={}", strategy, obstacle)),
        );
        self.excluded.entry(part).or_default().push(strategy);

        let obstacles = self.obstacles();
        let exclude = self.excluded.get(&part).cloned().unwrap_or_default();
        let next = self.twin.plan_assembly_path(part, &obstacles, &exclude)?;
        self.emit_simple(
            Entity::Twin,
            EventKind::Replan,
            Some(part),
            None,
            Some(format!("strategy={}", next.strategy)),
        );

        let back = retreat_path(&carry, self.arm_pose);
        if back.is_empty() {
            self.arm_phase = ArmPhase::Carry(CarryState {
                part,
                trajectory: next,
                segment: 0,
                segment_starts: vec![self.arm_pose],
            });
        } else {
            self.arm_phase = ArmPhase::Retreat { part, back, segment: 0, next };
        }
        Ok(())
    }

    fn arm_retreat(
        &mut self,
        part: PartId,
        back: Vec<Segment>,
        mut segment: usize,
        next: Trajectory,
    ) -> Result<(), CellError> {
        let current = back[segment];
        let (new_pose, event) = advance(self.arm_pose, current, self.geometry);
        self.arm_pose = new_pose;
        self.twin.part_mut(part).pose = Some(new_pose);
        self.emit_simple(Entity::Arm, event, Some(part), Some(new_pose), None);

        if pose_matches_segment_end(new_pose, current) {
            segment += 1;
            if segment == back.len() {
                self.arm_phase = ArmPhase::Carry(CarryState {
                    part,
                    trajectory: next,
                    segment: 0,
                    segment_starts: vec![new_pose],
                });
                return Ok(());
            }
        }
        self.arm_phase = ArmPhase::Retreat { part, back, segment, next };
        Ok(())
    }

    fn connect(&mut self, carry: CarryState) -> Result<(), CellError> {
        let part = carry.part;
        let target = self.twin.part(part).target_pose.expect("resolved twin");
        {
            let entry = self.twin.part_mut(part);
            entry.pose = Some(target);
            entry.assembled = true;
        }
        self.arm_held = None;
        self.connected_this_tick = true;
        let strategy = carry.trajectory.strategy;
        self.emit_simple(
            Entity::Twin,
            EventKind::Connect,
            Some(part),
            Some(target),
            Some(format!("strategy={}", strategy)),
        );
        if self.phase == Phase::Virtual {
            self.recorded.insert(part, carry.trajectory);
            self.asp_order.push(part);
        }
        self.arm_phase = ArmPhase::Idle;
        Ok(())
    }

    // ------------------------------------------------------------------
    // Mobile robot
    // ------------------------------------------------------------------

    fn mobile_step(&mut self) -> Result<(), CellError> {
        match self.mobile_phase {
            MobilePhase::Idle => {
                let Some(&part) = self.mobile_queue.front() else { return Ok(()) };
                let type_name = self.twin.part(part).type_name.clone();
                let buffer = self.buffers.iter().position(|b| {
                    self.geometry.buffers[b.def_index].type_name == type_name && !b.remaining.is_empty()
                });
                match buffer {
                    Some(buffer) => {
                        self.mobile_phase = MobilePhase::ToBuffer { buffer };
                    }
                    None => {
                        self.emit_simple(
                            Entity::Mobile,
                            EventKind::Starvation,
                            Some(part),
                            None,
                            Some(type_name.clone()),
                        );
                        return Err(CellError::Starvation {
                            part: self.twin.part(part).instance_name.clone(),
                            type_name,
                        });
                    }
                }
                Ok(())
            }
            MobilePhase::ToBuffer { buffer } => {
                let slot = *self.buffers[buffer].remaining.front().expect("stock checked");
                if self.mobile_position == slot {
                    self.mobile_phase = MobilePhase::Picking { buffer };
                } else {
                    self.mobile_position = self.mobile_position.step_toward(slot, self.geometry.mobile.speed);
                    self.emit_simple(Entity::Mobile, EventKind::Move, None, Some(Pose::at(self.mobile_position)), None);
                    if self.mobile_position == slot {
                        self.mobile_phase = MobilePhase::Picking { buffer };
                    }
                }
                Ok(())
            }
            MobilePhase::Picking { buffer } => {
                let part = *self.mobile_queue.front().expect("queue non-empty");
                let slot = self.buffers[buffer].remaining.pop_front().expect("stock checked");
                self.mobile_carried = Some(part);
                self.twin.part_mut(part).pose = Some(Pose::at(slot));
                self.emit_simple(Entity::Mobile, EventKind::Pick, Some(part), Some(Pose::at(slot)), None);
                self.mobile_phase = MobilePhase::ToStation;
                Ok(())
            }
            MobilePhase::ToStation => {
                let goal = self.geometry.drop_zone.position;
                if self.mobile_position != goal {
                    self.mobile_position = self.mobile_position.step_toward(goal, self.geometry.mobile.speed);
                    let carried = self.mobile_carried;
                    if let Some(part) = carried {
                        self.twin.part_mut(part).pose = Some(Pose::at(self.mobile_position));
                    }
                    self.emit_simple(Entity::Mobile, EventKind::Move, carried, Some(Pose::at(self.mobile_position)), None);
                }
                if self.mobile_position == goal {
                    self.mobile_phase = MobilePhase::Dropping;
                }
                Ok(())
            }
            MobilePhase::Dropping => {
                if self.drop_slot.is_some() {
                    // drop zone still occupied: hold position until it clears
                    return Ok(());
                }
                let part = self.mobile_queue.pop_front().expect("queue non-empty");
                let staging = self.staging_pose();
                self.mobile_carried = None;
                {
                    let entry = self.twin.part_mut(part);
                    entry.pose = Some(staging);
                    entry.delivered = true;
                }
                self.drop_slot = Some(part);
                self.emit_simple(Entity::Mobile, EventKind::Drop, Some(part), Some(staging), None);
                self.mobile_phase = MobilePhase::Idle;
                Ok(())
            }
        }
    }
}

/// Advances one tick along a segment, returning the new pose and the event
/// kind that describes the motion.
fn advance(pose: Pose, segment: Segment, geometry: &CellGeometry) -> (Pose, EventKind) {
    match segment {
        Segment::Translate { to, .. } => {
            let position = pose.position.step_toward(to, geometry.robot.linear_speed);
            (Pose::new(position, pose.orientation), EventKind::Move)
        }
        Segment::Rotate { to, .. } => {
            let orientation = pose.orientation.step_toward(to, geometry.robot.angular_speed);
            (Pose::new(pose.position, orientation), EventKind::Rotate)
        }
    }
}

fn pose_matches_segment_end(pose: Pose, segment: Segment) -> bool {
    match segment {
        Segment::Translate { to, .. } => pose.position == to,
        Segment::Rotate { to, .. } => pose.orientation == to,
    }
}

/// Builds the reverse path from the current pose back to the trajectory
/// start, one segment per forward segment entered.
fn retreat_path(carry: &CarryState, current: Pose) -> Vec<Segment> {
    let mut back = Vec::new();
    let mut cursor = current;
    for index in (0..=carry.segment).rev() {
        let start = carry.segment_starts[index];
        match carry.trajectory.segments[index] {
            Segment::Translate { .. } => {
                if cursor.position != start.position {
                    back.push(Segment::Translate { from: cursor.position, to: start.position });
                }
            }
            Segment::Rotate { .. } => {
                if cursor.orientation != start.orientation {
                    back.push(Segment::Rotate { from: cursor.orientation, to: start.orientation });
                }
            }
        }
        cursor = start;
    }
    back
}

