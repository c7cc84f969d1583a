use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geom::{Point2, Pose2};

use super::grid::OccupancyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarConfig {
    /// Field of view, radians.
    pub fov: f64,
    pub n_beams: usize,
    pub max_range: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        LidarConfig {
            fov: 1.5 * PI,
            n_beams: 271,
            max_range: 10.0,
        }
    }
}

/// One planar sweep. Beam `i` points at `psi - fov/2 + i * fov/(n_beams-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    pub pose: Pose2,
    pub fov: f64,
    pub max_range: f64,
    pub ranges: Vec<f64>,
}

impl LidarScan {
    pub fn n_beams(&self) -> usize {
        self.ranges.len()
    }

    /// Bearing of beam `i` relative to the robot heading.
    pub fn relative_bearing(&self, i: usize) -> f64 {
        let n = self.ranges.len();
        if n <= 1 {
            return 0.0;
        }
        -self.fov / 2.0 + i as f64 * self.fov / (n - 1) as f64
    }

    pub fn bearing(&self, i: usize) -> f64 {
        self.pose.psi + self.relative_bearing(i)
    }

    /// World-frame endpoints of beams that hit. `extend` pushes each point
    /// that far past the hit along the beam.
    pub(crate) fn hit_points(&self, extend: f64) -> impl Iterator<Item = Point2> + '_ {
        let origin = self.pose.position();
        self.ranges
            .iter()
            .enumerate()
            .filter(|(_, &r)| r < self.max_range)
            .map(move |(i, &r)| {
                let (s, c) = self.bearing(i).sin_cos();
                origin + Point2::new(c, s) * (r + extend)
            })
    }
}

/// Distance along the ray to the boundary of the first occupied cell, or
/// `max_range`. Leaving the raster counts as a hit at the outer edge. A ray
/// starting inside an occupied cell returns 0.
pub fn raycast(grid: &OccupancyGrid, origin: Point2, bearing: f64, max_range: f64) -> f64 {
    let res = grid.resolution();
    let Some((ci, cj)) = grid.cell_of(origin) else {
        return 0.0;
    };
    if grid.get((ci, cj)) {
        return 0.0;
    }
    let (dy, dx) = bearing.sin_cos();
    let (mut i, mut j) = (ci as isize, cj as isize);
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let ox = (origin.x - grid.origin().x) / res;
    let oy = (origin.y - grid.origin().y) / res;

    let step_i: isize = if dx > 0.0 { 1 } else { -1 };
    let step_j: isize = if dy > 0.0 { 1 } else { -1 };
    // ray parameter (in cell units) needed to cross one full cell per axis
    let t_delta_x = if dx != 0.0 { (1.0 / dx).abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { (1.0 / dy).abs() } else { f64::INFINITY };
    let mut t_max_x = if dx > 0.0 {
        (i as f64 + 1.0 - ox) / dx
    } else if dx < 0.0 {
        (i as f64 - ox) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy > 0.0 {
        (j as f64 + 1.0 - oy) / dy
    } else if dy < 0.0 {
        (j as f64 - oy) / dy
    } else {
        f64::INFINITY
    };

    let limit = max_range / res;
    loop {
        let t = if t_max_x < t_max_y {
            i += step_i;
            let t = t_max_x;
            t_max_x += t_delta_x;
            t
        } else {
            j += step_j;
            let t = t_max_y;
            t_max_y += t_delta_y;
            t
        };
        if t >= limit {
            return max_range;
        }
        if i < 0 || j < 0 || i >= w || j >= h || grid.get((i as usize, j as usize)) {
            return (t * res).min(max_range);
        }
    }
}

pub fn simulate_lidar(grid: &OccupancyGrid, pose: Pose2, config: &LidarConfig) -> LidarScan {
    let mut scan = LidarScan {
        pose,
        fov: config.fov,
        max_range: config.max_range,
        ranges: vec![0.0; config.n_beams],
    };
    let origin = pose.position();
    for i in 0..config.n_beams {
        scan.ranges[i] = raycast(grid, origin, scan.bearing(i), config.max_range);
    }
    scan
}

/// World-frame endpoints of every beam that returned a hit.
pub fn scan_to_points(scan: &LidarScan) -> Vec<Point2> {
    scan.hit_points(0.0).collect()
}

impl OccupancyGrid {
    /// Rasterizes scan hits onto a blank copy of this grid's geometry.
    pub fn from_scan(template: &OccupancyGrid, scan: &LidarScan) -> OccupancyGrid {
        let mut g = template.blank_like();
        // hits sit on a cell boundary; nudge past it into the struck cell
        let nudge = 1e-6 * template.resolution();
        for p in scan.hit_points(nudge) {
            if let Some(c) = g.cell_of(p) {
                g.set(c, true);
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxed(w: usize, h: usize, res: f64) -> OccupancyGrid {
        let mut cells = vec![false; w * h];
        for i in 0..w {
            cells[i] = true;
            cells[(h - 1) * w + i] = true;
        }
        for j in 0..h {
            cells[j * w] = true;
            cells[j * w + w - 1] = true;
        }
        OccupancyGrid::new(
            w,
            h,
            res,
            Point2::default(),
            cells,
            Pose2::new(w as f64 * res / 2.0, h as f64 * res / 2.0, 0.0),
            Point2::new(res * 1.5, res * 1.5),
        )
        .unwrap()
    }

    #[test]
    fn wall_ahead_distance() {
        // 40x21 cells at 0.1 m; interior wall face at x = 3.9
        let g = boxed(40, 21, 0.1);
        let o = Point2::new(1.9, 1.05);
        let r = raycast(&g, o, 0.0, 10.0);
        assert!((r - 2.0).abs() < 1e-9, "{r}");
        assert_eq!(raycast(&g, o, 0.0, 1.5), 1.5);
    }

    #[test]
    fn symmetric_ranges() {
        let g = boxed(41, 21, 0.1);
        let o = Point2::new(2.05, 1.05);
        let a = raycast(&g, o, 0.0, 10.0);
        let b = raycast(&g, o, PI, 10.0);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn inside_obstacle_is_zero() {
        let g = boxed(20, 20, 0.1);
        assert_eq!(raycast(&g, Point2::new(0.05, 0.05), 1.0, 5.0), 0.0);
    }

    #[test]
    fn single_forward_beam() {
        let g = boxed(40, 21, 0.1);
        let cfg = LidarConfig {
            fov: 0.0,
            n_beams: 1,
            max_range: 10.0,
        };
        let scan = simulate_lidar(&g, Pose2::new(1.9, 1.05, 0.0), &cfg);
        assert_eq!(scan.n_beams(), 1);
        assert!((scan.ranges[0] - 2.0).abs() < 1e-9);
        let pts = scan_to_points(&scan);
        assert_eq!(pts.len(), 1);
        assert!((pts[0].x - 3.9).abs() < 1e-9 && (pts[0].y - 1.05).abs() < 1e-12);
    }

    #[test]
    fn beam_bearings_span_fov() {
        let g = boxed(20, 20, 0.1);
        let scan = simulate_lidar(&g, Pose2::new(1.0, 1.0, 0.3), &LidarConfig::default());
        assert!((scan.bearing(0) - (0.3 - 0.75 * PI)).abs() < 1e-12);
        assert!((scan.bearing(270) - (0.3 + 0.75 * PI)).abs() < 1e-12);
        assert!(scan.ranges.iter().all(|&r| r > 0.0 && r <= 10.0));
    }
}
