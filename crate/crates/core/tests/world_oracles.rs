//! Maps, distance fields and the lidar model checked against brute-force
//! oracles.

mod common;

use common::{brute_distance, brute_raycast, flood_connected, grid_with, open_room, random_grid};
use ddp_nav::world::{
    generate_environment, raycast, scan_to_points, simulate_lidar, DistanceField, EnvParams, LidarConfig, LidarScan,
    OccupancyGrid,
};
use ddp_nav::{Point2, Pose2};
use proptest::prelude::*;

#[test]
fn distance_field_matches_brute_force_on_random_grids() {
    for seed in 0..12 {
        let grid = random_grid(24, 20, 0.1, 0.08, seed);
        let field = DistanceField::compute(&grid, 100.0);
        for j in 0..grid.height() {
            for i in 0..grid.width() {
                let brute = brute_distance(&grid, (i, j)).unwrap_or(100.0);
                let got = field.at_cell((i, j));
                assert!((got - brute).abs() <= 1e-9, "seed {seed} cell ({i},{j}): {got} vs {brute}");
            }
        }
    }
}

#[test]
fn one_occupied_cell_neighbor_is_one_resolution_away() {
    let res = 0.2;
    let grid = grid_with(12, 12, res, Pose2::new(0.3, 0.3, 0.0), Point2::new(2.0, 2.0), |i, j| (i, j) == (5, 6));
    let field = DistanceField::compute(&grid, 5.0);
    assert_eq!(field.at_cell((6, 6)), res);
    assert_eq!(field.at_cell((5, 6)), 0.0);
    assert!((field.at_cell((8, 10)) - 5.0 * res).abs() < 1e-12);
}

#[test]
fn raycast_hits_axis_aligned_wall() {
    // wall column at x in [2.1, 2.2); origin at x = 0.1
    let res = 0.1;
    let grid = grid_with(40, 20, res, Pose2::new(0.15, 1.05, 0.0), Point2::new(0.5, 0.5), |i, _| i == 21);
    let r = raycast(&grid, Point2::new(0.1, 1.05), 0.0, 10.0);
    assert!((r - 2.0).abs() <= res, "range {r}");
    assert!((r - 2.0).abs() < 1e-9, "exact boundary hit expected, got {r}");
}

#[test]
fn raycast_agrees_with_slab_oracle() {
    for seed in 0..20u64 {
        let grid = random_grid(30, 30, 0.15, 0.06, 100 + seed);
        let mut tried = 0;
        for k in 0..200u64 {
            let (i, j) = ((k * 7 + seed) as usize % 28 + 1, (k * 13 + 3 * seed) as usize % 28 + 1);
            if grid.get((i, j)) {
                continue;
            }
            let c = grid.cell_center((i, j));
            let o = Point2::new(c.x + 0.031 * ((k % 5) as f64 - 2.0), c.y - 0.027 * ((k % 3) as f64 - 1.0));
            let bearing = 0.3711 * k as f64 + 0.05 * seed as f64;
            let want = brute_raycast(&grid, o, bearing, 3.0).0;
            let got = raycast(&grid, o, bearing, 3.0);
            assert!((got - want).abs() < 1e-9, "seed {seed} ray {k}: {got} vs {want}");
            tried += 1;
        }
        assert!(tried > 100);
    }
}

#[test]
fn scan_of_empty_world_has_no_points() {
    // the raster edge is beyond the lidar range everywhere
    let grid = grid_with(200, 200, 0.15, Pose2::new(15.0, 15.0, 0.3), Point2::new(16.0, 16.0), |_, _| false);
    let scan = simulate_lidar(&grid, grid.start(), &LidarConfig::default());
    assert!(scan.ranges.iter().all(|&r| r == 10.0));
    assert!(scan_to_points(&scan).is_empty());
}

#[test]
fn single_forward_hit_maps_to_range_ahead() {
    let scan = LidarScan {
        pose: Pose2::new(0.0, 0.0, 0.0),
        fov: 0.0,
        max_range: 10.0,
        ranges: vec![3.5],
    };
    let pts = scan_to_points(&scan);
    assert_eq!(pts.len(), 1);
    assert!((pts[0].x - 3.5).abs() < 1e-12 && pts[0].y.abs() < 1e-12);
}

#[test]
fn rasterized_scan_reproduces_struck_cells() {
    let env = generate_environment(21, &EnvParams::default()).unwrap();
    let cfg = LidarConfig::default();
    for k in 0..5 {
        let c = env.start().position();
        let pose = Pose2::new(c.x + 0.1 * k as f64, c.y + 0.2 * k as f64, 0.4 * k as f64);
        let scan = simulate_lidar(&env, pose, &cfg);
        let raster = OccupancyGrid::from_scan(&env, &scan);
        let mut struck = vec![false; env.cells().len()];
        for i in 0..scan.n_beams() {
            if let (_, Some(cell)) = brute_raycast(&env, pose.position(), scan.bearing(i), cfg.max_range) {
                struck[env.index(cell)] = true;
            }
        }
        assert_eq!(raster.cells(), &struck[..], "pose {k}");
        assert!(raster.cells().iter().zip(env.cells()).all(|(&r, &e)| !r || e));
    }
}

#[test]
fn generated_maps_are_connected_and_repeatable() {
    let params = EnvParams::default();
    for seed in 0..100 {
        let g = generate_environment(seed, &params).unwrap();
        assert!(flood_connected(&g, g.start_cell(), g.goal_cell()), "seed {seed} disconnected");
        assert_eq!(g, generate_environment(seed, &params).unwrap());
    }
}

#[test]
fn empty_fill_keeps_only_the_border() {
    let params = EnvParams { fill_prob: 0.0, smooth_iters: 0, ..EnvParams::default() };
    let g = generate_environment(5, &params).unwrap();
    let border = 2 * (g.width() + g.height()) - 4;
    assert_eq!(g.occupied_count(), border);
    assert!(flood_connected(&g, g.start_cell(), g.goal_cell()));
}

fn small_grid() -> impl Strategy<Value = OccupancyGrid> {
    (8usize..20, 8usize..20, 0.0f64..0.3, any::<u64>()).prop_map(|(w, h, fill, seed)| random_grid(w, h, 0.1, fill, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_is_bounded_and_lipschitz(grid in small_grid(), cap in 0.05f64..2.0) {
        let f = DistanceField::compute(&grid, cap);
        let (w, h) = (grid.width(), grid.height());
        let bound = grid.resolution() * 2f64.sqrt() + 1e-12;
        for j in 0..h {
            for i in 0..w {
                let d = f.at_cell((i, j));
                prop_assert!((0.0..=cap).contains(&d));
                for (a, b) in [(i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    if a < w && b < h {
                        prop_assert!((d - f.at_cell((a, b))).abs() <= bound);
                    }
                }
                if j > 0 && i + 1 < w {
                    prop_assert!((d - f.at_cell((i + 1, j - 1))).abs() <= bound);
                }
            }
        }
    }

    #[test]
    fn sampled_cells_match_brute_force(grid in small_grid(), picks in proptest::collection::vec((0usize..20, 0usize..20), 16)) {
        let f = DistanceField::compute(&grid, 1e6);
        for (i, j) in picks {
            let cell = (i % grid.width(), j % grid.height());
            let want = brute_distance(&grid, cell).unwrap_or(1e6);
            prop_assert!((f.at_cell(cell) - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn shorter_range_truncates_but_never_undershoots(seed in any::<u64>(), bearing in -3.2f64..3.2, range in 0.05f64..4.0) {
        let grid = random_grid(30, 30, 0.15, 0.05, seed);
        let o = Point2::new(2.26, 2.24);
        prop_assume!(!grid.is_occupied_at(o));
        let full = raycast(&grid, o, bearing, 100.0);
        let short = raycast(&grid, o, bearing, range);
        prop_assert!(short <= range);
        prop_assert!((short - full.min(range)).abs() < 1e-12);
    }

    #[test]
    fn lidar_ranges_in_bounds(seed in 0u64..1000, psi in -3.2f64..3.2) {
        let grid = open_room(30, 30, 0.15, Pose2::new(2.2, 2.2, psi), Point2::new(3.0, 3.0));
        let g = random_grid(30, 30, 0.15, 0.04, seed);
        let merged = common::grid_with(30, 30, 0.15, grid.start(), grid.goal(), |i, j| {
            grid.get((i, j)) || (g.get((i, j)) && grid.cell_of(grid.start().position()) != Some((i, j)))
        });
        let cfg = LidarConfig::default();
        let scan = simulate_lidar(&merged, merged.start(), &cfg);
        prop_assert_eq!(scan.ranges.len(), cfg.n_beams);
        prop_assert!(scan.ranges.iter().all(|&r| r > 0.0 && r <= cfg.max_range));
    }
}
