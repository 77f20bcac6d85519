//! The append-only simulation event log and its line-delimited JSON format.

use serde::{Deserialize, Serialize};

use crate::geom::Pose;

/// Event vocabulary of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Pick,
    Drop,
    Paused,
    Move,
    Rotate,
    Collision,
    Replan,
    Connect,
    Starvation,
    Done,
    Fail,
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            EventKind::Pick => "pick",
            EventKind::Drop => "drop",
            EventKind::Paused => "paused",
            EventKind::Move => "move",
            EventKind::Rotate => "rotate",
            EventKind::Collision => "collision",
            EventKind::Replan => "replan",
            EventKind::Connect => "connect",
            EventKind::Starvation => "starvation",
            EventKind::Done => "done",
            EventKind::Fail => "fail",
        };
        write!(f, "{name}")
    }
}

/// Emitting entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    Twin,
    Arm,
    Mobile,
}

/// Flat pose record used in trace lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub pitch: f64,
}

impl From<Pose> for TracePose {
    fn from(pose: Pose) -> Self {
        TracePose {
            x: pose.position.x,
            y: pose.position.y,
            z: pose.position.z,
            yaw: pose.orientation.yaw,
            pitch: pose.orientation.pitch,
        }
    }
}

/// One trace line. Absent optional fields are omitted from the JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub tick: u64,
    pub entity: Entity,
    pub event: EventKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub part: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pose: Option<TracePose>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

/// The full event log of a simulation run. Ticks are non-decreasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn push(&mut self, event: TraceEvent) {
        debug_assert!(
            self.events.last().map_or(true, |last| last.tick <= event.tick),
            "trace ticks must be non-decreasing"
        );
        self.events.push(event);
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Serializes the trace as JSON lines, one event per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut events = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            events.push(serde_json::from_str(line)?);
        }
        Ok(Trace { events })
    }

    /// Events of the given kind in order.
    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(move |e| e.event == kind)
    }

    /// Connect order as part names.
    pub fn connect_order(&self) -> Vec<String> {
        self.of_kind(EventKind::Connect)
            .filter_map(|e| e.part.clone())
            .collect()
    }

    /// Splits the trace at the first `done` event: the virtual phase
    /// (inclusive of its `done`) and everything after.
    pub fn split_at_first_done(&self) -> (&[TraceEvent], &[TraceEvent]) {
        match self.events.iter().position(|e| e.event == EventKind::Done) {
            Some(i) => self.events.split_at(i + 1),
            None => (self.events.as_slice(), &[]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_omits_absent_fields() {
        let mut trace = Trace::default();
        trace.push(TraceEvent {
            tick: 0,
            entity: Entity::Twin,
            event: EventKind::Done,
            part: None,
            pose: None,
            detail: Some("virtual".into()),
        });
        let line = trace.to_jsonl();
        assert_eq!(line, "{\"tick\":0,\"entity\":\"twin\",\"event\":\"done\",\"detail\":\"virtual\"}\n");
        let parsed = Trace::from_jsonl(&line).unwrap();
        assert_eq!(parsed, trace);
    }

    #[test]
    fn pose_serializes_flat() {
        let event = TraceEvent {
            tick: 3,
            entity: Entity::Arm,
            event: EventKind::Move,
            part: Some("b1".into()),
            pose: Some(TracePose { x: 1.0, y: 2.0, z: 3.0, yaw: 90.0, pitch: 0.0 }),
            detail: None,
        };
        let line = serde_json::to_string(&event).unwrap();
        assert!(line.contains("\"pose\":{\"x\":1.0,\"y\":2.0,\"z\":3.0,\"yaw\":90.0,\"pitch\":0.0}"));
    }
}
