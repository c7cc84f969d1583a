//! Grid builders and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use ddp_nav::world::OccupancyGrid;
use ddp_nav::{Point2, Pose2};

/// A grid whose occupancy is given per cell by `occupied(i, j)`.
pub fn grid_with(
    w: usize,
    h: usize,
    res: f64,
    start: Pose2,
    goal: Point2,
    occupied: impl Fn(usize, usize) -> bool,
) -> OccupancyGrid {
    let mut cells = vec![false; w * h];
    for j in 0..h {
        for i in 0..w {
            cells[j * w + i] = occupied(i, j);
        }
    }
    OccupancyGrid::new(w, h, res, Point2::new(0.0, 0.0), cells, start, goal).expect("valid test grid")
}

/// An obstacle-free room with a one-cell border wall.
pub fn open_room(w: usize, h: usize, res: f64, start: Pose2, goal: Point2) -> OccupancyGrid {
    grid_with(w, h, res, start, goal, |i, j| i == 0 || j == 0 || i == w - 1 || j == h - 1)
}

/// Occupancy drawn at `fill` with a tiny LCG, so oracles do not share the
/// crate's generator.
pub fn random_grid(w: usize, h: usize, res: f64, fill: f64, seed: u64) -> OccupancyGrid {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let cells: Vec<bool> = (0..w * h).map(|_| next() < fill).collect();
    let mid = Point2::new(0.5 * w as f64 * res, 0.5 * h as f64 * res);
    OccupancyGrid::new(w, h, res, Point2::new(0.0, 0.0), cells, Pose2::new(mid.x, mid.y, 0.0), mid).unwrap()
}

/// Brute-force distance from cell `(i, j)` to the nearest occupied cell
/// center, in meters; `None` on an empty grid.
pub fn brute_distance(grid: &OccupancyGrid, (i, j): (usize, usize)) -> Option<f64> {
    let res = grid.resolution();
    let mut best: Option<f64> = None;
    for b in 0..grid.height() {
        for a in 0..grid.width() {
            if grid.get((a, b)) {
                let dx = a as f64 - i as f64;
                let dy = b as f64 - j as f64;
                let d = (dx * dx + dy * dy).sqrt() * res;
                best = Some(best.map_or(d, |x: f64| x.min(d)));
            }
        }
    }
    best
}

/// Depth-first flood fill over free cells with 4-connectivity.
pub fn flood_connected(grid: &OccupancyGrid, from: (usize, usize), to: (usize, usize)) -> bool {
    let (w, h) = (grid.width(), grid.height());
    if grid.get(from) || grid.get(to) {
        return false;
    }
    let mut seen = vec![false; w * h];
    let mut stack = vec![from];
    seen[from.1 * w + from.0] = true;
    while let Some((i, j)) = stack.pop() {
        if (i, j) == to {
            return true;
        }
        let mut push = |a: usize, b: usize| {
            if !seen[b * w + a] && !grid.get((a, b)) {
                seen[b * w + a] = true;
                stack.push((a, b));
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if i + 1 < w {
            push(i + 1, j);
        }
        if j + 1 < h {
            push(i, j + 1);
        }
    }
    false
}

/// Ray parameter at which a ray enters the box `[lo, hi]`, by the slab
/// method; `None` when it misses or the box lies behind the origin.
pub fn ray_box_entry(o: Point2, dir: Point2, lo: Point2, hi: Point2) -> Option<f64> {
    let mut t_in = f64::NEG_INFINITY;
    let mut t_out = f64::INFINITY;
    for (oc, dc, l, h) in [(o.x, dir.x, lo.x, hi.x), (o.y, dir.y, lo.y, hi.y)] {
        if dc == 0.0 {
            if oc < l || oc > h {
                return None;
            }
        } else {
            let (a, b) = ((l - oc) / dc, (h - oc) / dc);
            t_in = t_in.max(a.min(b));
            t_out = t_out.min(a.max(b));
        }
    }
    (t_in <= t_out && t_out > 0.0).then_some(t_in.max(0.0))
}

/// Nearest struck occupied cell and its distance, by testing every cell;
/// the raster edge counts as a wall.
pub fn brute_raycast(grid: &OccupancyGrid, o: Point2, bearing: f64, max_range: f64) -> (f64, Option<(usize, usize)>) {
    let res = grid.resolution();
    let dir = Point2::new(bearing.cos(), bearing.sin());
    let mut best = (max_range, None);
    for j in 0..grid.height() {
        for i in 0..grid.width() {
            if !grid.get((i, j)) {
                continue;
            }
            let lo = Point2::new(i as f64 * res, j as f64 * res);
            let hi = Point2::new(lo.x + res, lo.y + res);
            if let Some(t) = ray_box_entry(o, dir, lo, hi) {
                if t < best.0 {
                    best = (t, Some((i, j)));
                }
            }
        }
    }
    // leaving the raster
    let (wm, hm) = (grid.width() as f64 * res, grid.height() as f64 * res);
    let mut exit = f64::INFINITY;
    if dir.x > 0.0 {
        exit = exit.min((wm - o.x) / dir.x);
    } else if dir.x < 0.0 {
        exit = exit.min(-o.x / dir.x);
    }
    if dir.y > 0.0 {
        exit = exit.min((hm - o.y) / dir.y);
    } else if dir.y < 0.0 {
        exit = exit.min(-o.y / dir.y);
    }
    if exit < best.0 {
        best = (exit, None);
    }
    best
}
