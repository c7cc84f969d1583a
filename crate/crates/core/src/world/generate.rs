use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{Point2, Pose2};
use crate::{Error, Result};

use super::field::squared_edt;
use super::grid::{Cell, OccupancyGrid};

/// Cellular-automata environment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvParams {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    /// Initial random occupancy probability.
    pub fill_prob: f64,
    /// Number of 5-of-9 majority smoothing passes.
    pub smooth_iters: usize,
    /// Minimum passage half-width in cells. Start and goal must be joined by
    /// cells whose clearance exceeds this; repair carves corridors this wide.
    pub corridor_half_width: usize,
    /// Rows cleared above the bottom border for the start region.
    pub start_rows: usize,
    /// Rows cleared below the top border for the goal region.
    pub goal_rows: usize,
    pub repair_connectivity: bool,
}

impl Default for EnvParams {
    fn default() -> Self {
        EnvParams {
            width: 30,
            height: 80,
            resolution: 0.15,
            fill_prob: 0.40,
            smooth_iters: 4,
            corridor_half_width: 3,
            start_rows: 12,
            goal_rows: 16,
            repair_connectivity: true,
        }
    }
}

impl EnvParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fill_prob) {
            return Err(Error::invalid(format!("fill_prob {} not in [0, 1]", self.fill_prob)));
        }
        if !(self.resolution > 0.0) {
            return Err(Error::invalid("resolution must be > 0"));
        }
        if self.width < 8 || self.height < 8 {
            return Err(Error::invalid("environment must be at least 8x8 cells"));
        }
        if self.start_rows == 0 || self.goal_rows == 0 {
            return Err(Error::invalid("start and goal regions need at least one row"));
        }
        // borders + start region + goal region + at least one row in between
        if self.start_rows + self.goal_rows + 3 > self.height {
            return Err(Error::invalid(format!(
                "height {} cannot host {} start rows and {} goal rows",
                self.height, self.start_rows, self.goal_rows
            )));
        }
        Ok(())
    }
}

/// Generates a bordered cellular-automata map with a cleared start region at
/// the bottom and goal region at the top. Deterministic in `(seed, params)`.
pub fn generate_environment(seed: u64, params: &EnvParams) -> Result<OccupancyGrid> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<bool> = (0..w * h)
        .map(|_| rng.random::<f64>() < params.fill_prob)
        .collect();
    force_border(&mut cells, w, h);
    for _ in 0..params.smooth_iters {
        cells = smooth(&cells, w, h);
        force_border(&mut cells, w, h);
    }

    let start_row = 1 + params.start_rows / 2;
    let goal_row = h - 2 - params.goal_rows / 2;
    for j in (1..=params.start_rows).chain(h - 1 - params.goal_rows..h - 1) {
        for i in 1..w - 1 {
            cells[j * w + i] = false;
        }
    }

    let res = params.resolution;
    let cx = w as f64 * res / 2.0;
    let start = Pose2::new(cx, (start_row as f64 + 0.5) * res, FRAC_PI_2);
    let goal = Point2::new(cx, (goal_row as f64 + 0.5) * res);
    let mut grid = OccupancyGrid::new(w, h, res, Point2::default(), cells, start, goal)?;

    if params.repair_connectivity && !passable_connected(&grid, params.corridor_half_width) {
        carve_path(&mut grid, params.corridor_half_width);
    }
    Ok(grid)
}

/// Cells whose center lies farther than `half_width` cells from every
/// occupied cell center.
fn passable_mask(grid: &OccupancyGrid, half_width: usize) -> Vec<bool> {
    let r2 = (half_width * half_width) as f64;
    squared_edt(grid.cells(), grid.width(), grid.height())
        .into_iter()
        .map(|d2| d2 > r2)
        .collect()
}

fn passable_connected(grid: &OccupancyGrid, half_width: usize) -> bool {
    let passable = passable_mask(grid, half_width);
    let (s, g) = (grid.index(grid.start_cell()), grid.index(grid.goal_cell()));
    if !passable[s] || !passable[g] {
        return false;
    }
    let mut seen = vec![false; passable.len()];
    let mut stack = vec![grid.start_cell()];
    seen[s] = true;
    while let Some(c) = stack.pop() {
        for n in grid.neighbors4(c) {
            let k = grid.index(n);
            if passable[k] && !seen[k] {
                seen[k] = true;
                stack.push(n);
            }
        }
    }
    seen[g]
}

fn force_border(cells: &mut [bool], w: usize, h: usize) {
    for i in 0..w {
        cells[i] = true;
        cells[(h - 1) * w + i] = true;
    }
    for j in 0..h {
        cells[j * w] = true;
        cells[j * w + w - 1] = true;
    }
}

/// One pass of the 5-of-9 rule; out-of-range neighbours count as occupied.
fn smooth(cells: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut next = vec![false; cells.len()];
    for j in 0..h as isize {
        for i in 0..w as isize {
            let mut count = 0;
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (ni, nj) = (i + di, j + dj);
                    let occ = ni < 0
                        || nj < 0
                        || ni >= w as isize
                        || nj >= h as isize
                        || cells[nj as usize * w + ni as usize];
                    count += occ as u8;
                }
            }
            next[j as usize * w + i as usize] = count >= 5;
        }
    }
    next
}

const FREE_STEP: u32 = 1;
const OCCUPIED_STEP: u32 = 10;

/// Cheapest start-to-goal path where entering a blocked cell costs 10x a
/// passable one; the path is carved free and widened by `half_width` cells.
fn carve_path(grid: &mut OccupancyGrid, half_width: usize) {
    let passable = passable_mask(grid, half_width);
    let path = cheapest_path(grid, &passable, half_width);
    let (w, h) = (grid.width() as isize, grid.height() as isize);
    let r = half_width as isize;
    for (i, j) in path {
        for dj in -r..=r {
            for di in -r..=r {
                if di * di + dj * dj > r * r {
                    continue;
                }
                let (ni, nj) = (i as isize + di, j as isize + dj);
                // borders stay occupied
                if ni >= 1 && nj >= 1 && ni < w - 1 && nj < h - 1 {
                    grid.set((ni as usize, nj as usize), false);
                }
            }
        }
    }
}

fn cheapest_path(grid: &OccupancyGrid, passable: &[bool], half_width: usize) -> Vec<Cell> {
    let (w, h) = (grid.width(), grid.height());
    let start = grid.start_cell();
    let goal = grid.goal_cell();
    let mut cost = vec![u32::MAX; w * h];
    let mut prev = vec![usize::MAX; w * h];
    let mut heap = BinaryHeap::new();
    cost[grid.index(start)] = 0;
    heap.push(Reverse((0u32, grid.index(start))));
    // keep the widened corridor off the border
    let m = (half_width + 1).min(w / 2 - 1).min(h / 2 - 1);
    let interior = |(i, j): Cell| i >= m && j >= m && i < w - m && j < h - m;
    while let Some(Reverse((c, k))) = heap.pop() {
        if c > cost[k] {
            continue;
        }
        let cell = (k % w, k / w);
        if cell == goal {
            break;
        }
        for n in grid.neighbors4(cell).filter(|&n| interior(n)) {
            let nk = grid.index(n);
            let step = if passable[nk] { FREE_STEP } else { OCCUPIED_STEP };
            let nc = c + step;
            if nc < cost[nk] {
                cost[nk] = nc;
                prev[nk] = k;
                heap.push(Reverse((nc, nk)));
            }
        }
    }
    let mut path = Vec::new();
    let mut k = grid.index(goal);
    while k != usize::MAX {
        path.push((k % w, k / w));
        k = prev[k];
    }
    path.reverse();
    path
}
