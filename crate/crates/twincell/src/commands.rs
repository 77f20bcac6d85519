//! Command implementations behind the `twincell` binary: validate, item
//! export, planning and simulation, each writing deterministic output files.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::caex::{parse_caex, validate_caex, Diagnostic, Severity};
use crate::cell::{
    run_simulation_opts, CellError, CellGeometry, SimMode, SimOptions, SimOutcome,
};
use crate::geom::{aabb_at, Pose, Segment};
use crate::items::{extract_items, write_items};
use crate::twin::{build_twin, DigitalTwin, Strategy, Trajectory};

/// Errors split by exit code: usage and I/O problems exit 2, domain failures
/// (validation, planning, simulation) exit 1.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Domain(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Io(_) => 2,
            CommandError::Domain(_) => 1,
        }
    }
}

fn read_file(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|e| CommandError::Io(format!("{}: {}", path.display(), e)))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CommandError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CommandError::Io(format!("{}: {}", parent.display(), e)))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CommandError::Io(format!("{}: {}", path.display(), e)))
}

fn domain<E: std::fmt::Display>(err: E) -> CommandError {
    CommandError::Domain(err.to_string())
}

/// Parses and lints a product description. Returns the diagnostics and
/// whether any is error-level.
pub fn run_validate(file: &Path) -> Result<(Vec<Diagnostic>, bool), CommandError> {
    let text = read_file(file)?;
    let doc = parse_caex(&text).map_err(domain)?;
    let diagnostics = validate_caex(&doc);
    let has_errors = diagnostics.iter().any(|d| d.severity == Severity::Error);
    Ok((diagnostics, has_errors))
}

/// Extracts the item stream and writes it in the text exchange format.
pub fn run_export_items(file: &Path, output: &Path) -> Result<(), CommandError> {
    let text = read_file(file)?;
    let doc = parse_caex(&text).map_err(domain)?;
    let stream = extract_items(&doc).map_err(domain)?;
    write_file(output, &write_items(&stream))
}

/// Serialized plan: assembly order, per-part target pose and trajectory, and
/// the connection residuals at target poses.
#[derive(Debug, Serialize)]
pub struct PlanDocument {
    pub sequence: Vec<String>,
    pub parts: Vec<PlanPart>,
    pub residuals: Vec<PlanResidual>,
}

#[derive(Debug, Serialize)]
pub struct PlanPart {
    pub name: String,
    pub type_name: String,
    pub target: Pose,
    pub strategy: Strategy,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Serialize)]
pub struct PlanResidual {
    pub part_a: String,
    pub point_a: String,
    pub part_b: String,
    pub point_b: String,
    pub residual: f64,
}

/// Loads geometry and applies `key=value` overrides.
pub fn load_geometry(path: &Path, overrides: &[String]) -> Result<CellGeometry, CommandError> {
    let mut geometry = CellGeometry::load(path).map_err(|e| match e {
        CellError::Io(msg) => CommandError::Io(msg),
        other => CommandError::Domain(other.to_string()),
    })?;
    apply_overrides(&mut geometry, overrides)?;
    Ok(geometry)
}

pub fn apply_overrides(geometry: &mut CellGeometry, overrides: &[String]) -> Result<(), CommandError> {
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| CommandError::Io(format!("override '{}' is not key=value", entry)))?;
        geometry.apply_override(key.trim(), value.trim()).map_err(domain)?;
    }
    Ok(())
}

fn build_resolved_twin(file: &Path, geometry: &CellGeometry) -> Result<DigitalTwin, CommandError> {
    let text = read_file(file)?;
    let doc = parse_caex(&text).map_err(domain)?;
    let stream = extract_items(&doc).map_err(domain)?;
    let mut twin = build_twin(&stream, geometry).map_err(domain)?;
    twin.resolve_assembly().map_err(domain)?;
    Ok(twin)
}

/// Computes the full assembly plan without simulating motion: resolves
/// poses, enumerates the assembly order, and plans each trajectory against
/// the incrementally grown obstacle set.
pub fn compute_plan(twin: &mut DigitalTwin, geometry: &CellGeometry) -> Result<PlanDocument, CommandError> {
    let mut obstacles = geometry.static_obstacles();
    let mut sequence = Vec::new();
    let mut parts = Vec::new();
    while let Some(id) = twin.next_unassembled_part() {
        let trajectory: Trajectory = twin.plan_assembly_path(id, &obstacles, &[]).map_err(domain)?;
        let target = twin.part(id).target_pose.expect("resolved twin");
        {
            let part = twin.part_mut(id);
            part.assembled = true;
            part.pose = Some(target);
        }
        let part = twin.part(id);
        obstacles.push((
            part.instance_name.clone(),
            aabb_at(part.half_extents, target).expect("positive extents"),
        ));
        sequence.push(part.instance_name.clone());
        parts.push(PlanPart {
            name: part.instance_name.clone(),
            type_name: part.type_name.clone(),
            target,
            strategy: trajectory.strategy,
            segments: trajectory.segments,
        });
    }

    let residuals = twin
        .connection_residuals()
        .map_err(domain)?
        .into_iter()
        .map(|(index, residual)| {
            let c = &twin.connections()[index];
            PlanResidual {
                part_a: twin.part(c.part1).instance_name.clone(),
                point_a: c.point1.clone(),
                part_b: twin.part(c.part2).instance_name.clone(),
                point_b: c.point2.clone(),
                residual,
            }
        })
        .collect();

    // leave the twin reusable for a subsequent simulation
    for id in twin.part_ids().collect::<Vec<_>>() {
        let part = twin.part_mut(id);
        part.assembled = false;
        part.pose = None;
    }

    Ok(PlanDocument { sequence, parts, residuals })
}

pub fn run_plan(
    file: &Path,
    geometry_path: &Path,
    output: &Path,
    overrides: &[String],
) -> Result<PlanDocument, CommandError> {
    let geometry = load_geometry(geometry_path, overrides)?;
    let mut twin = build_resolved_twin(file, &geometry)?;
    let plan = compute_plan(&mut twin, &geometry)?;
    let json = serde_json::to_string_pretty(&plan).expect("plan serializes");
    write_file(output, &format!("{json}\n"))?;
    Ok(plan)
}

/// Runs the simulation and writes the trace (always, even on failure) plus
/// optional periodic and connect-event snapshots.
pub fn run_simulate(
    file: &Path,
    geometry_path: &Path,
    mode: SimMode,
    trace_out: &Path,
    snapshots: Option<&Path>,
    every: Option<u64>,
    overrides: &[String],
) -> Result<SimOutcome, CommandError> {
    let geometry = load_geometry(geometry_path, overrides)?;
    let mut twin = build_resolved_twin(file, &geometry)?;
    let options = SimOptions {
        snapshot_every: every.filter(|_| snapshots.is_some()),
        snapshot_on_connect: snapshots.is_some(),
    };
    let outcome = run_simulation_opts(&mut twin, &geometry, mode, options);

    write_file(trace_out, &outcome.trace.to_jsonl())?;
    if let Some(dir) = snapshots {
        std::fs::create_dir_all(dir).map_err(|e| CommandError::Io(format!("{}: {}", dir.display(), e)))?;
        for snapshot in &outcome.snapshots {
            let name = format!("snapshot_{:08}.json", snapshot.tick);
            let json = serde_json::to_string_pretty(snapshot).expect("snapshot serializes");
            write_file(&dir.join(name), &format!("{json}\n"))?;
        }
    }
    match &outcome.error {
        Some(err) => Err(CommandError::Domain(err.to_string())),
        None => Ok(outcome),
    }
}
