//! Digital-twin assembly planning from CAEX product descriptions.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`caex`] parses an AutomationML/CAEX (IEC 62424) XML document into a
//!    faithful document model and lints it.
//! 2. [`items`] flattens the document into the ordered item stream
//!    (`parameter` / `create` / `connection` records) and reads/writes the
//!    text exchange format.
//! 3. [`twin`] builds the digital twin from an item stream, resolves target
//!    assembly poses from connection semantics, and plans the assembly
//!    sequence and collision-free insertion trajectories.
//! 4. [`cell`] executes the plan in a deterministic simulated manufacturing
//!    cell (assembly station, robot arm, mobile robot, buffers) in virtual
//!    and physical modes, emitting a line-delimited event trace.
//!
//! [`commands`] wires the stages behind the `twincell` command-line tool.
//! The `examples/` directory has one runnable example per stage.

pub mod caex;
pub mod cell;
pub mod commands;
pub mod geom;
pub mod items;
pub mod twin;

pub use caex::{parse_caex, validate_caex, CaexDocument};
pub use cell::{run_simulation, CellGeometry, SimMode, Trace};
pub use geom::{Aabb, Orientation, Point3, Pose};
pub use items::{extract_items, read_items, write_items, Item, ItemStream};
pub use twin::{build_twin, DigitalTwin};
