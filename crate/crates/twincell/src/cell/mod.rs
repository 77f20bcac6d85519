//! The generic manufacturing cell: geometry manifest, deterministic tick
//! simulation, event trace and scene snapshots.

mod geometry;
mod sim;
mod snapshot;
mod trace;

pub use geometry::{
    BufferDef, CellGeometry, DropZone, Mobile, Robot, Station, StaticObstacle, TypeGeometry,
    DEFAULT_CLEARANCE, DEFAULT_TICK_BUDGET,
};
pub use sim::{run_simulation, run_simulation_opts, SimMode, SimOptions, SimOutcome};
pub use snapshot::{ArmSnapshot, MobileSnapshot, ObstacleSnapshot, PartSnapshot, SceneSnapshot};
pub use trace::{Entity, EventKind, Trace, TraceEvent, TracePose};

use thiserror::Error;

use crate::twin::TwinError;

#[derive(Debug, Error)]
pub enum CellError {
    #[error("invalid geometry manifest: {0}")]
    Manifest(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("no buffer is configured for type '{0}'")]
    MissingBuffer(String),
    #[error("buffer starvation: part '{part}' of type '{type_name}' has no stocked buffer")]
    Starvation { part: String, type_name: String },
    #[error("tick budget {0} exceeded")]
    Timeout(u64),
    #[error(transparent)]
    Twin(#[from] TwinError),
}
