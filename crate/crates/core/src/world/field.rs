use crate::geom::Point2;

use super::grid::{Cell, OccupancyGrid};
use super::lidar::LidarScan;

/// Raster geometry shared by a grid and the fields derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub origin: Point2,
}

impl GridGeometry {
    pub fn of(grid: &OccupancyGrid) -> Self {
        GridGeometry {
            width: grid.width(),
            height: grid.height(),
            resolution: grid.resolution(),
            origin: grid.origin(),
        }
    }

    #[inline]
    pub fn index_of(&self, p: Point2) -> Option<usize> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some(fy as usize * self.width + fx as usize)
    }
}

/// Euclidean clearance from every cell center to the nearest occupied cell
/// center, capped at `max_clearance`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    geometry: GridGeometry,
    max_clearance: f64,
    dist: Vec<f64>,
}

impl DistanceField {
    /// Exact Euclidean distance transform (separable lower-envelope method).
    pub fn compute(grid: &OccupancyGrid, max_clearance: f64) -> Self {
        DistanceField::from_cells(GridGeometry::of(grid), grid.cells(), max_clearance)
    }

    /// Field over raw row-major occupancy with the given geometry.
    pub fn from_cells(geometry: GridGeometry, cells: &[bool], max_clearance: f64) -> Self {
        assert_eq!(cells.len(), geometry.width * geometry.height);
        let (w, h) = (geometry.width, geometry.height);
        let sq = squared_edt(cells, w, h);
        let res = geometry.resolution;
        let dist = sq
            .into_iter()
            .map(|d2| {
                if d2.is_finite() {
                    (d2.sqrt() * res).min(max_clearance)
                } else {
                    max_clearance
                }
            })
            .collect();
        DistanceField {
            geometry,
            max_clearance,
            dist,
        }
    }

    /// Transient field built from scan endpoints only, over a square window
    /// of half-size `half_extent` around the scan pose. The window is snapped
    /// to the `resolution` lattice so its cells coincide with a world grid
    /// anchored at the origin.
    pub fn from_scan(scan: &LidarScan, resolution: f64, half_extent: f64, max_clearance: f64) -> Self {
        let c = scan.pose.position();
        let ox = ((c.x - half_extent) / resolution).floor() * resolution;
        let oy = ((c.y - half_extent) / resolution).floor() * resolution;
        let cells_per_side = (2.0 * half_extent / resolution).ceil() as usize + 1;
        let geometry = GridGeometry {
            width: cells_per_side,
            height: cells_per_side,
            resolution,
            origin: Point2::new(ox, oy),
        };
        let mut cells = vec![false; cells_per_side * cells_per_side];
        // hits sit on a cell boundary; nudge past it into the struck cell
        for p in scan.hit_points(1e-6 * resolution) {
            if let Some(k) = geometry.index_of(p) {
                cells[k] = true;
            }
        }
        DistanceField::from_cells(geometry, &cells, max_clearance)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    pub fn max_clearance(&self) -> f64 {
        self.max_clearance
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }

    pub fn at_cell(&self, (i, j): Cell) -> f64 {
        self.dist[j * self.geometry.width + i]
    }

    /// Clearance at the cell containing `p`; zero outside the raster.
    #[inline]
    pub fn at(&self, p: Point2) -> f64 {
        match self.geometry.index_of(p) {
            Some(k) => self.dist[k],
            None => 0.0,
        }
    }

    /// True when `p` falls in an occupied (or out-of-bounds) cell.
    #[inline]
    pub fn collides(&self, p: Point2) -> bool {
        self.at(p) < 0.5 * self.geometry.resolution
    }
}

/// Squared distance in cell units; `INFINITY` when nothing is occupied.
pub(crate) fn squared_edt(cells: &[bool], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for i in 0..w {
        for j in 0..h {
            f[j] = if cells[j * w + i] { 0.0 } else { f64::INFINITY };
        }
        lower_envelope(&f[..h], &mut d[..h], &mut v, &mut z);
        for j in 0..h {
            out[j * w + i] = d[j];
        }
    }
    for j in 0..h {
        f[..w].copy_from_slice(&out[j * w..(j + 1) * w]);
        lower_envelope(&f[..w], &mut d[..w], &mut v, &mut z);
        out[j * w..(j + 1) * w].copy_from_slice(&d[..w]);
    }
    out
}

/// 1-D squared distance transform of sampled function `f` into `d`.
fn lower_envelope(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let Some(first) = f.iter().position(|x| x.is_finite()) else {
        d.fill(f64::INFINITY);
        return;
    };
    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let qf = q as f64;
        loop {
            let p = v[k] as f64;
            let s = ((f[q] + qf * qf) - (f[v[k]] + p * p)) / (2.0 * (qf - p));
            if s <= z[k] {
                // k > 0 here: z[0] is -inf
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        let qf = q as f64;
        while z[k + 1] < qf {
            k += 1;
        }
        let p = v[k] as f64;
        *out = (qf - p) * (qf - p) + f[v[k]];
    }
}
