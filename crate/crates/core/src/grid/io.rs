//! Text formats.
//!
//! Voxel grids: a header line `dim shape... origin... spacing...` followed by
//! one line of run lengths over the row-major occupancy, alternating empty
//! and occupied runs and starting with an empty run (possibly `0`).
//!
//! Grid functions: a header `# dim shape... origin... spacing...` followed by
//! one sample per line in row-major order.

use super::function::GridFunction;
use super::spec::GridSpec;
use super::voxel::VoxelGrid;
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

fn header_fields(spec: &GridSpec) -> String {
    let mut parts = vec![spec.dim().to_string()];
    parts.extend(spec.shape.iter().map(|v| v.to_string()));
    parts.extend(spec.origin.iter().map(|v| v.to_string()));
    parts.extend(spec.spacing.iter().map(|v| v.to_string()));
    parts.join(" ")
}

fn parse_header(line: &str) -> Result<GridSpec> {
    let tok: Vec<&str> = line.split_whitespace().collect();
    let d: usize = tok
        .first()
        .ok_or_else(|| Error::Parse("empty header".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("dimension: {e}")))?;
    if tok.len() != 1 + 3 * d {
        return Err(Error::Parse(format!("header has {} fields, expected {}", tok.len(), 1 + 3 * d)));
    }
    let shape = tok[1..=d]
        .iter()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("shape: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let floats = |s: &[&str]| {
        s.iter()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
            .collect::<Result<Vec<_>>>()
    };
    GridSpec::new(floats(&tok[1 + d..1 + 2 * d])?, floats(&tok[1 + 2 * d..])?, shape)
}

pub fn write_voxels<W: Write>(grid: &VoxelGrid, mut out: W) -> Result<()> {
    writeln!(out, "{}", header_fields(&grid.spec))?;
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0usize;
    for bit in grid.occupancy.iter().by_vals() {
        if bit == current {
            len += 1;
        } else {
            runs.push(len.to_string());
            current = bit;
            len = 1;
        }
    }
    runs.push(len.to_string());
    writeln!(out, "{}", runs.join(" "))?;
    Ok(())
}

pub fn read_voxels<R: BufRead>(input: R) -> Result<VoxelGrid> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))??;
    let spec = parse_header(&header)?;
    let body = lines.next().transpose()?.unwrap_or_default();
    let mut cells = Vec::with_capacity(spec.len());
    let mut value = false;
    for t in body.split_whitespace() {
        let run: usize = t.parse().map_err(|e| Error::Parse(format!("run length {t}: {e}")))?;
        cells.extend(std::iter::repeat(value).take(run));
        value = !value;
    }
    if cells.len() != spec.len() {
        return Err(Error::Parse(format!("runs cover {} cells, grid has {}", cells.len(), spec.len())));
    }
    VoxelGrid::from_bools(spec, &cells)
}

pub fn write_function<W: Write>(f: &GridFunction, mut out: W) -> Result<()> {
    writeln!(out, "# {}", header_fields(&f.spec))?;
    for v in &f.samples {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub fn read_function<R: BufRead>(input: R) -> Result<GridFunction> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))??;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("header must start with '#'".into()))?;
    let spec = parse_header(header)?;
    let mut samples = Vec::with_capacity(spec.len());
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        samples.push(t.parse::<f64>().map_err(|e| Error::Parse(format!("sample {t}: {e}")))?);
    }
    GridFunction::new(spec, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize, RasterMode, Region};

    #[test]
    fn voxel_roundtrip() {
        let ball = Region::euclidean_ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let g = rasterize(&ball, 12, RasterMode::Center).unwrap();
        let mut buf = Vec::new();
        write_voxels(&g, &mut buf).unwrap();
        let back = read_voxels(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn voxel_runs_start_with_empty() {
        let spec = GridSpec::covering(&[0.0], &[3.0], &[3], 0).unwrap();
        let g = VoxelGrid::from_bools(spec, &[true, true, false]).unwrap();
        let mut buf = Vec::new();
        write_voxels(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "0 2 1");
    }

    #[test]
    fn function_roundtrip() {
        let spec = GridSpec::covering(&[-1.0, 0.5], &[1.0, 2.0], &[5, 3], 1).unwrap();
        let f = GridFunction::from_fn(spec, |p| p[0].sin() * p[1]);
        let mut buf = Vec::new();
        write_function(&f, &mut buf).unwrap();
        assert_eq!(read_function(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(read_voxels("2 3 3 0 0 1".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_voxels("1 3 0 1\n1 1".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_function("1 2 0 1\n0\n0".as_bytes()), Err(Error::Parse(_))));
    }
}
