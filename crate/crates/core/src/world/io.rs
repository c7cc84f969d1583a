//! Plain-text environment files.
//!
//! ```text
//! width height resolution
//! start x y psi
//! goal x y
//! <height lines of width chars from {0,1}; first line is row 0 (minimum y)>
//! ```
//!
//! The grid origin is implied to be `(0, 0)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::geom::{Point2, Pose2};
use crate::{Error, Result};

use super::grid::OccupancyGrid;

impl OccupancyGrid {
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity((self.width() + 1) * self.height() + 64);
        let st = self.start();
        let g = self.goal();
        let _ = writeln!(s, "{} {} {}", self.width(), self.height(), self.resolution());
        let _ = writeln!(s, "start {} {} {}", st.x, st.y, st.psi);
        let _ = writeln!(s, "goal {} {}", g.x, g.y);
        for row in self.cells().chunks(self.width()) {
            s.extend(row.iter().map(|&c| if c { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }
}

fn numbers<const N: usize>(line_no: usize, fields: &[&str]) -> Result<[f64; N]> {
    if fields.len() != N {
        return Err(Error::parse(
            line_no,
            format!("expected {N} numbers, found {}", fields.len()),
        ));
    }
    let mut out = [0.0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f
            .parse::<f64>()
            .map_err(|_| Error::parse(line_no, format!("`{f}` is not a number")))?;
    }
    Ok(out)
}

pub fn parse_env(text: &str) -> Result<OccupancyGrid> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of file, expected {what}")))
    };

    let (n, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(n, "header must be `width height resolution`"));
    }
    let width: usize = fields[0]
        .parse()
        .map_err(|_| Error::parse(n, format!("bad width `{}`", fields[0])))?;
    let height: usize = fields[1]
        .parse()
        .map_err(|_| Error::parse(n, format!("bad height `{}`", fields[1])))?;
    let [resolution] = numbers::<1>(n, &fields[2..])?;

    let (n, line) = next("start line")?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.first() != Some(&"start") {
        return Err(Error::parse(n, "expected `start x y psi`"));
    }
    let [sx, sy, spsi] = numbers::<3>(n, &fields[1..])?;

    let (n, line) = next("goal line")?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.first() != Some(&"goal") {
        return Err(Error::parse(n, "expected `goal x y`"));
    }
    let [gx, gy] = numbers::<2>(n, &fields[1..])?;

    let mut cells = Vec::with_capacity(width.saturating_mul(height).min(1 << 24));
    for row in 0..height {
        let (n, line) = next(&format!("grid row {row}"))?;
        if line.len() != width {
            return Err(Error::parse(
                n,
                format!("grid row {row} has {} characters, expected {width}", line.len()),
            ));
        }
        for ch in line.chars() {
            match ch {
                '0' => cells.push(false),
                '1' => cells.push(true),
                other => {
                    return Err(Error::parse(n, format!("invalid cell character `{other}`")));
                }
            }
        }
    }
    for (n, line) in lines {
        if !line.trim().is_empty() {
            return Err(Error::parse(n, "trailing content after grid"));
        }
    }

    OccupancyGrid::new(
        width,
        height,
        resolution,
        Point2::default(),
        cells,
        Pose2::new(sx, sy, spsi),
        Point2::new(gx, gy),
    )
    .map_err(|e| Error::parse(1, e.to_string()))
}

pub fn read_env_file(path: impl AsRef<Path>) -> Result<OccupancyGrid> {
    parse_env(&std::fs::read_to_string(path)?)
}

pub fn write_env_file(grid: &OccupancyGrid, path: impl AsRef<Path>) -> Result<()> {
    if grid.origin() != Point2::default() {
        return Err(Error::invalid("environment files require a (0, 0) origin"));
    }
    std::fs::write(path, grid.to_text())?;
    Ok(())
}
