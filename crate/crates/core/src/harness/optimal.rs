use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::dynamics::RobotSpec;
use crate::geom::Point2;
use crate::world::{squared_edt, Cell, OccupancyGrid};
use crate::{Error, Result};

/// Reference traversal used to normalise episode times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalTime {
    pub seconds: f64,
    pub path_length: f64,
    /// The inflated grid disconnected start from goal, so the path was
    /// searched on the raw grid instead.
    pub over_constrained: bool,
}

/// Shortest-path traversal time at `v_max`.
///
/// Searches 8-connected cell centers on the grid inflated by the robot's
/// inscribed radius, with Euclidean edge costs and no corner cutting. Falls
/// back to the raw grid when inflation disconnects the endpoints.
pub fn optimal_time(env: &OccupancyGrid, spec: &RobotSpec, v_max: f64) -> Result<OptimalTime> {
    if !(v_max > 0.0) {
        return Err(Error::invalid("v_max must be > 0 for the optimal-time reference"));
    }
    let route = reference_route(env, spec)?;
    Ok(OptimalTime {
        seconds: route.length / v_max,
        path_length: route.length,
        over_constrained: route.over_constrained,
    })
}

/// Shortest cell-center route from start to goal, as used by
/// [`optimal_time`].
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub waypoints: Vec<Point2>,
    pub length: f64,
    pub over_constrained: bool,
}

pub fn reference_route(env: &OccupancyGrid, spec: &RobotSpec) -> Result<Route> {
    let (w, h) = (env.width(), env.height());
    let res = env.resolution();
    let r = spec.inscribed_radius() / res;
    let d2 = squared_edt(env.cells(), w, h);
    let inflated: Vec<bool> = d2.iter().map(|&d| d <= r * r).collect();

    let (start, goal) = (env.start_cell(), env.goal_cell());
    let (cells, over_constrained) = match grid_path(&inflated, w, h, start, goal) {
        Some(p) => (p, false),
        None => match grid_path(env.cells(), w, h, start, goal) {
            Some(p) => (p, true),
            None => return Err(Error::invalid("start and goal are disconnected")),
        },
    };
    let waypoints: Vec<Point2> = cells.iter().map(|&k| env.cell_center((k % w, k / w))).collect();
    let steps: f64 = cells
        .windows(2)
        .map(|p| if p[0] % w != p[1] % w && p[0] / w != p[1] / w { SQRT_2 } else { 1.0 })
        .sum();
    Ok(Route {
        waypoints,
        length: steps * res,
        over_constrained,
    })
}

/// Route for sub-goal guidance: like [`reference_route`] but cells closer
/// than `preferred` meters to an obstacle cost up to `1 + penalty` times
/// more, so the route keeps to the middle of passages.
pub(crate) fn guidance_route(
    env: &OccupancyGrid,
    spec: &RobotSpec,
    preferred: f64,
    penalty: f64,
) -> Result<Vec<Point2>> {
    let (w, h) = (env.width(), env.height());
    let res = env.resolution();
    let r = spec.inscribed_radius() / res;
    let d2 = squared_edt(env.cells(), w, h);
    let inflated: Vec<bool> = d2.iter().map(|&d| d <= r * r).collect();
    let pref = preferred / res;
    let weight: Vec<f64> = d2
        .iter()
        .map(|&d| 1.0 + penalty * ((pref - d.sqrt()) / pref).max(0.0))
        .collect();
    let (start, goal) = (env.start_cell(), env.goal_cell());
    let cells = weighted_path(&inflated, Some(&weight), w, h, start, goal)
        .or_else(|| weighted_path(env.cells(), Some(&weight), w, h, start, goal))
        .ok_or_else(|| Error::invalid("start and goal are disconnected"))?;
    Ok(cells.iter().map(|&k| env.cell_center((k % w, k / w))).collect())
}

#[derive(PartialEq)]
struct Open(f64, usize);

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over free cells; returns the cell indices from `from` to `to`.
fn grid_path(blocked: &[bool], w: usize, h: usize, from: Cell, to: Cell) -> Option<Vec<usize>> {
    weighted_path(blocked, None, w, h, from, to)
}

/// Dijkstra where entering cell `k` costs its step length times
/// `weight[k]` (1 everywhere when `weight` is `None`).
fn weighted_path(
    blocked: &[bool],
    weight: Option<&[f64]>,
    w: usize,
    h: usize,
    from: Cell,
    to: Cell,
) -> Option<Vec<usize>> {
    let idx = |(i, j): Cell| j * w + i;
    if blocked[idx(from)] || blocked[idx(to)] {
        return None;
    }
    let mut dist = vec![f64::INFINITY; w * h];
    let mut parent = vec![usize::MAX; w * h];
    let mut heap = BinaryHeap::new();
    dist[idx(from)] = 0.0;
    heap.push(Open(0.0, idx(from)));
    let goal = idx(to);
    while let Some(Open(d, k)) = heap.pop() {
        if k == goal {
            let mut path = vec![k];
            while let Some(&last) = path.last() {
                if parent[last] == usize::MAX {
                    break;
                }
                path.push(parent[last]);
            }
            path.reverse();
            return Some(path);
        }
        if d > dist[k] {
            continue;
        }
        let (i, j) = ((k % w) as isize, (k / w) as isize);
        for di in -1isize..=1 {
            for dj in -1isize..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= w as isize || nj >= h as isize {
                    continue;
                }
                let nk = nj as usize * w + ni as usize;
                if blocked[nk] {
                    continue;
                }
                let step = if di != 0 && dj != 0 {
                    if blocked[j as usize * w + ni as usize] || blocked[nj as usize * w + i as usize] {
                        continue;
                    }
                    SQRT_2
                } else {
                    1.0
                };
                let nd = d + step * weight.map_or(1.0, |c| c[nk]);
                if nd < dist[nk] {
                    dist[nk] = nd;
                    parent[nk] = k;
                    heap.push(Open(nd, nk));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;

    fn boxed(w: usize, h: usize, res: f64, start: Pose2, goal: Point2, extra: &[Cell]) -> OccupancyGrid {
        let mut cells = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                if i == 0 || j == 0 || i == w - 1 || j == h - 1 {
                    cells[j * w + i] = true;
                }
            }
        }
        for &(i, j) in extra {
            cells[j * w + i] = true;
        }
        OccupancyGrid::new(w, h, res, Point2::default(), cells, start, goal).unwrap()
    }

    #[test]
    fn straight_line() {
        // 10 m between cell centers (5,5) and (5,105) at 0.1 m
        let g = boxed(11, 111, 0.1, Pose2::new(0.55, 0.55, 0.0), Point2::new(0.55, 10.55), &[]);
        let ot = optimal_time(&g, &RobotSpec::default(), 2.0).unwrap();
        assert!((ot.seconds - 5.0).abs() < 1e-9);
        assert!(!ot.over_constrained);
    }

    #[test]
    fn over_constrained_when_inflation_closes_the_corridor() {
        // 1-cell corridor at 0.15 m is narrower than the robot
        let mut extra = Vec::new();
        for j in 1..19 {
            for i in 1..9 {
                if i != 4 && (5..15).contains(&j) {
                    extra.push((i, j));
                }
            }
        }
        let g = boxed(9, 20, 0.15, Pose2::new(0.675, 0.3, 0.0), Point2::new(0.675, 2.4), &extra);
        let ot = optimal_time(&g, &RobotSpec::default(), 1.0).unwrap();
        assert!(ot.over_constrained);
        assert!((ot.path_length - 14.0 * 0.15).abs() < 1e-9);
    }
}
