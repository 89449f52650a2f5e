//! Test-only oracles and helpers.
//!
//! The incremental simulator here is deliberately independent of the
//! visibility-graph machinery: it grows the robot in millimeter steps and
//! rotates the distal chord about the current pivot, so it can
//! cross-check the graph-based simulator on scenes with convex obstacles.

use crate::environment::Environment;
use crate::geometry::{ccw_delta, Point2, PointLocation, Polygon, Segment, GEOM_EPS};
use crate::kinematics::straight_critical_angle;
use crate::simulator::{DeploymentAction, Termination};
use std::f64::consts::PI;

/// Outcome of the step-based oracle.
#[derive(Clone, Debug)]
pub struct IncrementalOutcome {
    /// Polyline from launch to tip, collinear points removed.
    pub shape: Vec<Point2>,
    pub termination: Termination,
}

/// Step-based reference simulation for straight deployments among convex
/// obstacles. Grows by `step` meters per iteration; at wall contact the
/// chord pivots about the most recent contact point with the tip held on
/// the wall, per the straight-robot critical-angle rules.
pub fn incremental_simulate(
    env: &Environment,
    action: &DeploymentAction,
    mu: f64,
    step: f64,
) -> IncrementalOutcome {
    assert!(action.turn.is_none(), "oracle models straight robots only");
    let obstacles = env.inflated();
    let radius = env.robot_radius();
    let launch = env
        .launch(&action.launch_id)
        .expect("launch point exists")
        .position;
    let max_length = action.max_length;

    let mut path: Vec<Point2> = vec![launch];
    let mut pivot = launch;
    let mut tip = launch;
    let mut heading = action.launch_angle;
    let mut used = 0.0f64;
    let mut contact: Option<(usize, usize)> = None; // (obstacle, edge)
    let mut termination = Termination::FreeEnd;
    let guard = (4.0 * max_length / step) as usize + 64;

    'outer: for _ in 0..guard {
        if used >= max_length - 1e-12 {
            break;
        }
        let ds = step.min(max_length - used);
        match contact {
            None => {
                // Free growth with exact first-hit detection.
                if let Some(hit) = crate::geometry::ray_cast(tip, heading, obstacles) {
                    if hit.distance <= ds {
                        used += hit.distance;
                        tip = hit.point;
                        contact = Some((hit.obstacle, hit.edge));
                        continue;
                    }
                }
                tip = tip + Point2::from_angle(heading) * ds;
                used += ds;
            }
            Some((oi, ei)) => {
                let wall = obstacles[oi].edges().nth(ei).unwrap();
                let chord = tip - pivot;
                let l = chord.norm().max(1e-9);
                let chord_angle = chord.angle();
                let theta_kin = ccw_delta(chord_angle, wall.angle());
                let ts = straight_critical_angle(l / radius.max(1e-12), mu);
                if theta_kin >= ts && theta_kin <= PI - ts {
                    termination = Termination::Stuck;
                    break;
                }
                let rot = if theta_kin < ts { 1.0 } else { -1.0 };
                let dphi = ds / l;
                let new_angle = chord_angle + rot * dphi;
                // Keep the tip on the wall line.
                let dir = Point2::from_angle(new_angle);
                let w = wall.b - wall.a;
                let denom = dir.cross(w);
                if denom.abs() < GEOM_EPS {
                    termination = Termination::Stuck;
                    break;
                }
                let t = (wall.a - pivot).cross(w) / denom;
                let u = (wall.a - pivot).cross(dir) / denom;
                if t <= l {
                    // Chord must grow while the robot grows; a shrinking
                    // root means the rotation direction stalled.
                    termination = Termination::Stuck;
                    break;
                }
                if !(-GEOM_EPS..=1.0 + GEOM_EPS).contains(&u) {
                    // Walked past a wall end: the tip exits at the corner,
                    // which becomes the next potential pivot.
                    let endpoint = if u > 1.0 { wall.b } else { wall.a };
                    used += endpoint.dist(pivot) - l;
                    path.push(endpoint);
                    heading = (endpoint - pivot).angle();
                    pivot = endpoint;
                    tip = endpoint;
                    contact = None;
                    continue;
                }
                used += t - l;
                tip = pivot + dir * t;
                // Body contact against any other obstacle: wrap about its
                // nearest corner.
                for (oj, other) in obstacles.iter().enumerate() {
                    if oj == oi {
                        continue;
                    }
                    let chord_seg = Segment::new(pivot, tip);
                    let touches = other
                        .edges()
                        .any(|e| crate::geometry::segments_properly_cross(&chord_seg, &e))
                        || other.locate(chord_seg.at(0.5)) == PointLocation::Inside;
                    if touches {
                        let corner = other
                            .vertices()
                            .iter()
                            .copied()
                            .min_by(|a, b| {
                                chord_seg
                                    .distance_to(*a)
                                    .partial_cmp(&chord_seg.distance_to(*b))
                                    .unwrap()
                            })
                            .unwrap();
                        path.push(corner);
                        pivot = corner;
                        heading = (tip - pivot).angle();
                        continue 'outer;
                    }
                }
            }
        }
    }
    if termination == Termination::FreeEnd && contact.is_some() {
        termination = Termination::LengthExhausted;
    }
    path.push(tip);
    IncrementalOutcome {
        shape: simplify_collinear(&path),
        termination,
    }
}

/// Remove interior points with no direction change.
pub fn simplify_collinear(points: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    for &p in points {
        if let Some(&last) = out.last() {
            if last.dist(p) <= GEOM_EPS {
                continue;
            }
        }
        out.push(p);
        while out.len() >= 3 {
            let n = out.len();
            let (a, b, c) = (out[n - 3], out[n - 2], out[n - 1]);
            let d1 = (b - a).normalized();
            let d2 = (c - b).normalized();
            if d1.cross(d2).abs() <= 1e-9 && d1.dot(d2) > 0.0 {
                out.remove(n - 2);
            } else {
                break;
            }
        }
    }
    out
}

/// Symmetric matched-vertex distance between two polylines: the largest
/// distance from any vertex of one to the nearest point of the other.
pub fn shape_distance(a: &[Point2], b: &[Point2]) -> f64 {
    fn one_way(from: &[Point2], to: &[Point2]) -> f64 {
        from.iter()
            .map(|p| {
                if to.len() == 1 {
                    return p.dist(to[0]);
                }
                to.windows(2)
                    .map(|w| Segment::new(w[0], w[1]).distance_to(*p))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    one_way(a, b).max(one_way(b, a))
}

/// Convex polygon with about `n` vertices around `center`, seeded.
pub fn random_convex_obstacle(
    rng: &mut impl rand::Rng,
    center: Point2,
    radius_range: (f64, f64),
    n: usize,
) -> Polygon {
    loop {
        let pts: Vec<Point2> = (0..n.max(4))
            .map(|_| {
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = rng.gen_range(radius_range.0..radius_range.1);
                center + Point2::from_angle(a) * r
            })
            .collect();
        if let Ok(hull) = crate::geometry::convex_hull(&pts) {
            return hull;
        }
    }
}
