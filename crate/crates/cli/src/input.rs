use std::fs;
use std::path::Path;

use kedge::pointfile::{parse_halfperiod, parse_points};
use kedge::{Halfperiod, PointSet};

use crate::{CliResult, Failure};

pub enum Input {
    Points(PointSet),
    Halfperiod(Halfperiod),
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn load_points(path: &Path) -> CliResult<PointSet> {
    let pts = parse_points(&read(path)?)?;
    Ok(PointSet::new(pts)?)
}

/// Halfperiod files are recognised by their four-column swap lines; anything
/// else is read as a point file.
pub fn load_input(path: &Path) -> CliResult<Input> {
    let text = read(path)?;
    if let Ok(h) = parse_halfperiod(&text) {
        h.ensure_valid()?;
        return Ok(Input::Halfperiod(h));
    }
    Ok(Input::Points(PointSet::new(parse_points(&text)?)?))
}
