//! File loading and small-spec parsing for the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use qivpm_core::{ComplexMatrix, DensityMatrix, EventSpace, Interval, IntervalMap, Observable, Qivpm};

/// Exit codes shared by every subcommand: 0 = valid/pass, 1 = invalid or
/// failed check, 2 = malformed input or usage error.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;

pub fn load_measure(path: &Path) -> Result<Qivpm> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read measure file {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow!("malformed measure in {} at line {}, column {}: {e}",
            path.display(), e.line(), e.column()))
}

pub fn load_density(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow!("malformed state in {} at line {}, column {}: {e}",
            path.display(), e.line(), e.column()))
}

pub fn load_observable(path: &Path) -> Result<Observable> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read observable file {}", path.display()))?;
    let matrix: ComplexMatrix = serde_json::from_str(&text)
        .map_err(|e| anyhow!("malformed observable in {} at line {}, column {}: {e}",
            path.display(), e.line(), e.column()))?;
    Observable::from_matrix(&matrix).map_err(|e| anyhow!("observable rejected: {e}"))
}

pub fn load_space(path: &Path) -> Result<EventSpace> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read event-space file {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow!("malformed event space in {} at line {}, column {}: {e}",
            path.display(), e.line(), e.column()))
}

#[derive(Deserialize)]
struct TableMapFile {
    breakpoints: Vec<f64>,
    values: Vec<Interval>,
}

/// Map specs: `sharp`, `three-valued`, `clamp:WIDTH`, `table:FILE`.
pub fn parse_map_spec(spec: &str) -> Result<IntervalMap> {
    match spec {
        "sharp" => return Ok(IntervalMap::Sharp),
        "three-valued" | "three_valued" | "three" => return Ok(IntervalMap::ThreeValued),
        _ => {}
    }
    if let Some(width) = spec.strip_prefix("clamp:") {
        let width: f64 = width
            .parse()
            .with_context(|| format!("clamp width `{width}` is not a number"))?;
        return IntervalMap::clamp(width).map_err(|e| anyhow!("{e}"));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read table map file {path}"))?;
        let table: TableMapFile = serde_json::from_str(&text)
            .with_context(|| format!("malformed table map in {path}"))?;
        return IntervalMap::table(table.breakpoints, table.values).map_err(|e| anyhow!("{e}"));
    }
    bail!("unknown map spec `{spec}` (expected sharp | three-valued | clamp:W | table:FILE)")
}

/// Grids: either `start:end:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("range grid must be start:end:step");
        }
        let start: f64 = parts[0].parse().context("bad grid start")?;
        let end: f64 = parts[1].parse().context("bad grid end")?;
        let step: f64 = parts[2].parse().context("bad grid step")?;
        if step <= 0.0 || end < start {
            bail!("grid requires step > 0 and end >= start");
        }
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + f64::from(k) * step;
            if v > end + step * 1e-9 {
                break;
            }
            out.push(v.min(end));
            k += 1;
        }
        Ok(out)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad grid value `{s}`")))
            .collect()
    }
}

/// Parse a subspace selector: `all` or comma-separated member indices.
pub fn parse_subspace(spec: &str, space: &EventSpace) -> Result<Option<Vec<usize>>> {
    if spec == "all" {
        return Ok(None);
    }
    let indices = spec
        .split(',')
        .map(|s| {
            let idx: usize = s.trim().parse().with_context(|| format!("bad index `{s}`"))?;
            if idx >= space.len() {
                bail!("index {idx} out of range (space has {} members)", space.len());
            }
            Ok(idx)
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(Some(indices))
}
