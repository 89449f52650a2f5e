//! Round-trip checks: simulate a deployment, synthesize the tip sensor
//! stream it would produce, reconstruct geometry from that stream alone,
//! and compare against the ground truth scene.

use vinesim::environment::{Environment, LaunchPoint};
use vinesim::geometry::{Bounds, Point2, Polygon, Segment};
use vinesim::sensing::{reconstruct, synthetic, SensingParams};
use vinesim::simulator::{simulate_traced, DeploymentAction, SimParams};

fn deg(d: f64) -> f64 {
    d.to_radians()
}

fn square(x: f64, y: f64, s: f64) -> Polygon {
    Polygon::new(vec![
        Point2::new(x, y),
        Point2::new(x + s, y),
        Point2::new(x + s, y + s),
        Point2::new(x, y + s),
    ])
    .unwrap()
}

fn env_with(obstacles: Vec<Polygon>, radius: f64) -> Environment {
    Environment::new(
        obstacles,
        Bounds::new(Point2::new(0.0, 0.0), 2.0),
        vec![LaunchPoint {
            id: "L1".into(),
            position: Point2::new(1.0, 0.0),
        }],
        radius,
    )
    .unwrap()
}

/// Largest distance from any reconstructed wall point to the nearest
/// inflated wall of the environment.
fn max_wall_error(env: &Environment, points: &[vinesim::sensing::WallPoint]) -> f64 {
    let walls: Vec<Segment> = env
        .inflated()
        .iter()
        .flat_map(|p| p.edges().collect::<Vec<_>>())
        .collect();
    points
        .iter()
        .map(|wp| {
            walls
                .iter()
                .map(|w| w.distance_to(wp.point))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Every reconstructed pivot must lie on the simulated body polyline.
fn max_pivot_error(shape: &vinesim::RobotShape, pivots: &[Point2]) -> f64 {
    let pts: Vec<Point2> = shape.points().collect();
    pivots
        .iter()
        .map(|p| {
            if pts.len() < 2 {
                return p.dist(pts[0]);
            }
            pts.windows(2)
                .map(|w| Segment::new(w[0], w[1]).distance_to(*p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn roundtrip(env: &Environment, action: &DeploymentAction) -> (f64, f64, usize) {
    let (result, trace) = simulate_traced(env, action, &SimParams::default()).unwrap();
    let launch = env.launch(&action.launch_id).unwrap().position;
    let stream = synthetic::stream_from_trace(&trace, action, launch, 0.001);
    let rec = reconstruct(
        &stream,
        &SensingParams {
            radius: env.robot_radius(),
            ..SensingParams::default()
        },
    )
    .unwrap();
    (
        max_wall_error(env, &rec.wall_points),
        max_pivot_error(&result.shape, &rec.pivots),
        rec.wall_points.len(),
    )
}

#[test]
fn straight_slide_roundtrip() {
    let env = env_with(vec![square(1.4, 0.2, 0.4)], 0.0);
    let action = DeploymentAction::straight("L1", deg(45.0), 2.0);
    let (wall_err, pivot_err, n) = roundtrip(&env, &action);
    assert!(n > 5, "expected wall samples, got {n}");
    assert!(wall_err < 0.01, "wall error {wall_err}");
    assert!(pivot_err < 0.01, "pivot error {pivot_err}");
}

#[test]
fn wrap_pivot_change_roundtrip() {
    // Slide along the slab interrupted by a small triangle: the stream
    // carries a slope discontinuity the reconstruction must localize.
    let slab = Polygon::new(vec![
        Point2::new(0.2, 1.2),
        Point2::new(1.8, 1.2),
        Point2::new(1.8, 1.6),
        Point2::new(0.2, 1.6),
    ])
    .unwrap();
    let blocker = Polygon::new(vec![
        Point2::new(0.45, 1.05),
        Point2::new(0.38, 1.05),
        Point2::new(0.42, 0.98),
    ])
    .unwrap();
    let env = env_with(vec![slab, blocker], 0.0);
    let action = DeploymentAction::straight("L1", deg(115.0), 2.2);
    let (result, trace) = simulate_traced(&env, &action, &SimParams::default()).unwrap();
    let launch = env.launch("L1").unwrap().position;
    let stream = synthetic::stream_from_trace(&trace, &action, launch, 0.001);
    let rec = reconstruct(
        &stream,
        &SensingParams {
            radius: env.robot_radius(),
            ..SensingParams::default()
        },
    )
    .unwrap();
    // The wrap corner (0.45, 1.05) must appear among reconstructed pivots.
    let corner = Point2::new(0.45, 1.05);
    let best = rec
        .pivots
        .iter()
        .map(|p| p.dist(corner))
        .fold(f64::INFINITY, f64::min);
    assert!(best < 0.01, "wrap corner missed by {best} m: {:?}", rec.pivots);
    let wall_err = max_wall_error(&env, &rec.wall_points);
    assert!(wall_err < 0.01, "wall error {wall_err}");
    let pivot_err = max_pivot_error(&result.shape, &rec.pivots);
    assert!(pivot_err < 0.01, "pivot error {pivot_err}");
}

#[test]
fn turned_deployment_roundtrips() {
    // A fold deploys mid-flight and the tip then contacts the slab: the
    // turned inversion equations must keep the walls in place.
    let slab = Polygon::new(vec![
        Point2::new(0.05, 1.25),
        Point2::new(1.95, 1.25),
        Point2::new(1.95, 1.7),
        Point2::new(0.05, 1.7),
    ])
    .unwrap();
    let env = env_with(vec![slab], 0.0);
    for turn_deg in [-40.0, -20.0, 20.0, 40.0] {
        let action = DeploymentAction::turning("L1", deg(80.0), 0.3, deg(turn_deg), 2.0);
        let (wall_err, _pivot_err, n) = roundtrip(&env, &action);
        assert!(n > 3, "turn {turn_deg}: expected wall samples, got {n}");
        // Friction-locked onsets carry an inherent sampling bias: the
        // contact angle changes fastest right at contact, so the first
        // sample under-reads it and tilts the inferred wall slightly.
        // The +20 case enters the FL band here; the others pivot.
        let tol = if turn_deg == 20.0 { 0.02 } else { 0.01 };
        assert!(
            wall_err < tol,
            "turn {turn_deg}: wall error {wall_err}"
        );
    }
}
