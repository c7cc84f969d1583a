use crate::geom::{Point2, Pose2};

use super::state::{RobotSpec, State};

/// Body-frame boundary points of the rectangular footprint.
///
/// The `n` points are evenly spaced along the perimeter, index 0 at the
/// front-center, proceeding clockwise (front, then the right side).
#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    points: Vec<Point2>,
    corners: [Point2; 4],
}

impl Footprint {
    pub fn new(spec: &RobotSpec) -> Self {
        let (hl, hw) = (0.5 * spec.length, 0.5 * spec.width);
        let perimeter = 2.0 * (spec.length + spec.width);
        let points = (0..spec.n)
            .map(|k| perimeter_point(hl, hw, k as f64 * perimeter / spec.n as f64))
            .collect();
        Footprint {
            points,
            corners: [
                Point2::new(hl, -hw),
                Point2::new(-hl, -hw),
                Point2::new(-hl, hw),
                Point2::new(hl, hw),
            ],
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn corners(&self) -> &[Point2; 4] {
        &self.corners
    }

    /// Every boundary point plus the four corners, in world frame.
    pub fn full_outline(&self, pose: Pose2) -> impl Iterator<Item = Point2> + '_ {
        self.points
            .iter()
            .chain(self.corners.iter())
            .map(move |&b| pose.transform(b))
    }
}

/// Walks `s` meters clockwise from the front-center.
fn perimeter_point(hl: f64, hw: f64, s: f64) -> Point2 {
    let segments = [
        (Point2::new(hl, 0.0), Point2::new(hl, -hw)),
        (Point2::new(hl, -hw), Point2::new(-hl, -hw)),
        (Point2::new(-hl, -hw), Point2::new(-hl, hw)),
        (Point2::new(-hl, hw), Point2::new(hl, hw)),
        (Point2::new(hl, hw), Point2::new(hl, 0.0)),
    ];
    let mut rest = s;
    for (a, b) in segments {
        let len = a.distance(b);
        if rest <= len {
            return a + (b - a) * (rest / len);
        }
        rest -= len;
    }
    Point2::new(hl, 0.0)
}

/// World-frame positions of the masked boundary points, in index order.
pub fn boundary_points(s: &State, spec: &RobotSpec, mask: &[bool]) -> Vec<Point2> {
    let fp = Footprint::new(spec);
    let pose = s.pose();
    fp.points()
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&b, _)| pose.transform(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec4() -> RobotSpec {
        RobotSpec {
            length: 0.5,
            width: 0.4,
            n: 4,
            ..RobotSpec::default()
        }
    }

    #[test]
    fn four_mid_edge_points() {
        let pts = boundary_points(&State::default(), &spec4(), &[true; 4]);
        let expect = [(0.25, 0.0), (0.0, -0.2), (-0.25, 0.0), (0.0, 0.2)];
        assert_eq!(pts.len(), 4);
        for (p, (x, y)) in pts.iter().zip(expect) {
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn empty_mask() {
        assert!(boundary_points(&State::default(), &spec4(), &[false; 4]).is_empty());
    }

    #[test]
    fn half_turn_negates() {
        let spec = RobotSpec::default();
        let mask = vec![true; spec.n];
        let a = boundary_points(&State::default(), &spec, &mask);
        let b = boundary_points(&State { psi: PI, ..State::default() }, &spec, &mask);
        for (p, q) in a.iter().zip(&b) {
            assert!((p.x + q.x).abs() < 1e-12 && (p.y + q.y).abs() < 1e-12);
        }
    }

    #[test]
    fn points_lie_on_perimeter() {
        let spec = RobotSpec::default();
        let fp = Footprint::new(&spec);
        let (hl, hw) = (spec.length / 2.0, spec.width / 2.0);
        for p in fp.points() {
            let on_x = (p.x.abs() - hl).abs() < 1e-12 && p.y.abs() <= hw + 1e-12;
            let on_y = (p.y.abs() - hw).abs() < 1e-12 && p.x.abs() <= hl + 1e-12;
            assert!(on_x || on_y, "{p:?}");
        }
    }
}
