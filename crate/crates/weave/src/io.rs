//! Loading and saving the versioned JSON documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use weave_core::weaver::WeavePlan;
use weave_core::{DeviceLattice, TargetGraph};

use crate::error::{CliError, Result};
use crate::json::to_canonical;
use crate::schema::{DeviceFile, GraphFile, PlanFile, SCHEMA_VERSION};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_version(path: &Path, found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(CliError::Version {
            path: path.to_path_buf(),
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(())
}

pub fn write_canonical<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_canonical(value).map_err(|e| CliError::Usage(format!("serializing {}: {e}", path.display())))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_device_file(path: &Path) -> Result<DeviceFile> {
    let f: DeviceFile = parse(path, &read(path)?)?;
    check_version(path, f.version)?;
    Ok(f)
}

pub fn load_device(path: &Path) -> Result<DeviceLattice> {
    Ok(read_device_file(path)?.to_device()?)
}

pub fn save_device(path: &Path, device: &DeviceLattice, name: Option<String>) -> Result<()> {
    write_canonical(path, &DeviceFile::from_device(device, name))
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    let f: GraphFile = parse(path, &read(path)?)?;
    check_version(path, f.version)?;
    Ok(f)
}

pub fn load_graph(path: &Path) -> Result<TargetGraph> {
    Ok(read_graph_file(path)?.to_graph()?)
}

pub fn save_graph(path: &Path, graph: &TargetGraph, name: Option<String>) -> Result<()> {
    write_canonical(path, &GraphFile::from_graph(graph, name))
}

pub fn read_plan_file(path: &Path) -> Result<PlanFile> {
    let f: PlanFile = parse(path, &read(path)?)?;
    check_version(path, f.version)?;
    check_version(path, f.target.version)?;
    Ok(f)
}

/// A plan and, when it names one, the device file it refers to (resolved
/// against the plan's directory).
pub fn load_plan(path: &Path) -> Result<(WeavePlan, Option<PathBuf>)> {
    let f = read_plan_file(path)?;
    let device = f.device.as_ref().map(|d| path.parent().unwrap_or(Path::new("")).join(d));
    Ok((f.to_plan()?, device))
}

pub fn save_plan(path: &Path, plan: &WeavePlan, name: Option<String>, device: Option<String>) -> Result<()> {
    write_canonical(path, &PlanFile::from_plan(plan, name, device))
}
