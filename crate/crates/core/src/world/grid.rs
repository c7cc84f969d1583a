use std::collections::VecDeque;

use crate::geom::{Point2, Pose2};
use crate::{Error, Result};

/// Integer cell coordinates `(column, row)`; row 0 is the minimum-y row.
pub type Cell = (usize, usize);

/// Boolean occupancy raster with a start pose and goal point.
///
/// Any world point outside the raster is reported as occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point2,
    cells: Vec<bool>,
    start: Pose2,
    goal: Point2,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point2,
        cells: Vec<bool>,
        start: Pose2,
        goal: Point2,
    ) -> Result<Self> {
        if width < 8 || height < 8 {
            return Err(Error::invalid(format!(
                "grid must be at least 8x8, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::invalid(format!("resolution must be > 0, got {resolution}")));
        }
        if cells.len() != width * height {
            return Err(Error::invalid(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        let grid = OccupancyGrid {
            width,
            height,
            resolution,
            origin,
            cells,
            start,
            goal,
        };
        if grid.cell_of(start.position()).is_none() || grid.cell_of(goal).is_none() {
            return Err(Error::invalid("start and goal must lie inside the grid"));
        }
        Ok(grid)
    }

    /// An all-free grid with the same geometry, start and goal.
    pub fn blank_like(&self) -> Self {
        OccupancyGrid {
            cells: vec![false; self.cells.len()],
            ..self.clone()
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn start(&self) -> Pose2 {
        self.start
    }

    pub fn goal(&self) -> Point2 {
        self.goal
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn index(&self, (i, j): Cell) -> usize {
        j * self.width + i
    }

    pub fn get(&self, cell: Cell) -> bool {
        self.cells[self.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, occupied: bool) {
        let k = self.index(cell);
        self.cells[k] = occupied;
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Cell containing a world point, `None` when outside the raster.
    pub fn cell_of(&self, p: Point2) -> Option<Cell> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn cell_center(&self, (i, j): Cell) -> Point2 {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.resolution,
            self.origin.y + (j as f64 + 0.5) * self.resolution,
        )
    }

    pub fn is_occupied_at(&self, p: Point2) -> bool {
        match self.cell_of(p) {
            Some(c) => self.get(c),
            None => true,
        }
    }

    pub fn start_cell(&self) -> Cell {
        self.cell_of(self.start.position()).expect("start validated inside grid")
    }

    pub fn goal_cell(&self) -> Cell {
        self.cell_of(self.goal).expect("goal validated inside grid")
    }

    /// 4-connected neighbours inside the raster.
    pub(crate) fn neighbors4(&self, (i, j): Cell) -> impl Iterator<Item = Cell> + '_ {
        let (w, h) = (self.width as isize, self.height as isize);
        [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)]
            .into_iter()
            .filter_map(move |(di, dj)| {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                (ni >= 0 && nj >= 0 && ni < w && nj < h).then_some((ni as usize, nj as usize))
            })
    }

    /// Flood fill over free cells (4-connectivity) from `from`.
    pub fn reachable_from(&self, from: Cell) -> Vec<bool> {
        let mut seen = vec![false; self.cells.len()];
        if self.get(from) {
            return seen;
        }
        let mut queue = VecDeque::from([from]);
        seen[self.index(from)] = true;
        while let Some(c) = queue.pop_front() {
            for n in self.neighbors4(c) {
                let k = self.index(n);
                if !seen[k] && !self.cells[k] {
                    seen[k] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    pub fn start_goal_connected(&self) -> bool {
        let seen = self.reachable_from(self.start_cell());
        seen[self.index(self.goal_cell())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::new(
            w,
            h,
            0.5,
            Point2::default(),
            vec![false; w * h],
            Pose2::new(0.25, 0.25, 0.0),
            Point2::new(w as f64 * 0.5 - 0.25, h as f64 * 0.5 - 0.25),
        )
        .unwrap()
    }

    #[test]
    fn rejects_small_or_degenerate_geometry() {
        let start = Pose2::new(0.1, 0.1, 0.0);
        let goal = Point2::new(0.2, 0.2);
        assert!(OccupancyGrid::new(7, 8, 0.1, Point2::default(), vec![false; 56], start, goal).is_err());
        assert!(OccupancyGrid::new(8, 8, 0.0, Point2::default(), vec![false; 64], start, goal).is_err());
        assert!(OccupancyGrid::new(8, 8, 0.1, Point2::default(), vec![false; 63], start, goal).is_err());
    }

    #[test]
    fn outside_is_occupied() {
        let g = open(8, 8);
        assert!(g.is_occupied_at(Point2::new(-0.01, 1.0)));
        assert!(g.is_occupied_at(Point2::new(1.0, 4.0)));
        assert!(!g.is_occupied_at(Point2::new(3.99, 3.99)));
    }

    #[test]
    fn wall_disconnects() {
        let mut g = open(8, 8);
        assert!(g.start_goal_connected());
        for i in 0..8 {
            g.set((i, 4), true);
        }
        assert!(!g.start_goal_connected());
    }
}
