//! Deployment environments: polygonal obstacles inside a square boundary
//! with launch positions on the perimeter, plus seeded generators for the
//! benchmark scene families.

use crate::geometry::{
    convex_hull, inflate_obstacle, line_of_sight, Bounds, GeometryError, Point2, PointLocation,
    Polygon, Segment, GEOM_EPS,
};
use crate::visibility::VisibilityGraph;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvironmentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("obstacles {0} and {1} overlap after inflation")]
    ObstaclesOverlap(usize, usize),
    #[error("launch point '{0}' is not on the boundary of the bounds square")]
    LaunchOffBoundary(String),
    #[error("launch point '{0}' lies inside inflated obstacle {1}")]
    LaunchInsideObstacle(String, usize),
    #[error("duplicate launch id '{0}'")]
    DuplicateLaunchId(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaunchPoint {
    pub id: String,
    pub position: Point2,
}

/// A polygonal environment: ground truth for simulation.
///
/// Obstacle polygons are the physical walls; the simulator works against
/// copies inflated by the robot radius so the robot centerline can follow
/// the visibility graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Environment {
    obstacles: Vec<Polygon>,
    bounds: Bounds,
    launch_points: Vec<LaunchPoint>,
    robot_radius: f64,
    #[serde(skip)]
    inflated: Vec<Polygon>,
}

impl Environment {
    /// Build and validate a ground-truth environment: obstacles must stay
    /// pairwise disjoint after inflation and launch points must sit on the
    /// bounds perimeter outside every inflated obstacle.
    pub fn new(
        obstacles: Vec<Polygon>,
        bounds: Bounds,
        launch_points: Vec<LaunchPoint>,
        robot_radius: f64,
    ) -> Result<Self, EnvironmentError> {
        assert!(robot_radius >= 0.0);
        let inflated: Vec<Polygon> = obstacles
            .iter()
            .map(|p| inflate_obstacle(p, robot_radius))
            .collect::<Result<_, _>>()?;
        for i in 0..inflated.len() {
            for j in (i + 1)..inflated.len() {
                if polygons_intersect(&inflated[i], &inflated[j]) {
                    return Err(EnvironmentError::ObstaclesOverlap(i, j));
                }
            }
        }
        for (k, lp) in launch_points.iter().enumerate() {
            if launch_points[..k].iter().any(|o| o.id == lp.id) {
                return Err(EnvironmentError::DuplicateLaunchId(lp.id.clone()));
            }
            if bounds.distance_to_perimeter(lp.position) > 1e-6 {
                return Err(EnvironmentError::LaunchOffBoundary(lp.id.clone()));
            }
            for (oi, poly) in inflated.iter().enumerate() {
                if poly.locate(lp.position) == PointLocation::Inside {
                    return Err(EnvironmentError::LaunchInsideObstacle(lp.id.clone(), oi));
                }
            }
        }
        Ok(Self {
            obstacles,
            bounds,
            launch_points,
            robot_radius,
            inflated,
        })
    }

    /// Build without the disjointness and launch-placement checks.
    ///
    /// Sampled Monte Carlo environments may contain overlapping hulls and
    /// hulls that swallow a launch point; the simulator tolerates both.
    pub fn new_sampled(
        obstacles: Vec<Polygon>,
        bounds: Bounds,
        launch_points: Vec<LaunchPoint>,
        robot_radius: f64,
    ) -> Self {
        let inflated = obstacles
            .iter()
            .filter_map(|p| inflate_obstacle(p, robot_radius).ok())
            .collect();
        Self {
            obstacles,
            bounds,
            launch_points,
            robot_radius,
            inflated,
        }
    }

    /// Restore the inflated cache after deserialization.
    pub fn reinflate(&mut self) -> Result<(), GeometryError> {
        self.inflated = self
            .obstacles
            .iter()
            .map(|p| inflate_obstacle(p, self.robot_radius))
            .collect::<Result<_, _>>()?;
        Ok(())
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn inflated(&self) -> &[Polygon] {
        &self.inflated
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn launch_points(&self) -> &[LaunchPoint] {
        &self.launch_points
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    pub fn launch(&self, id: &str) -> Option<&LaunchPoint> {
        self.launch_points.iter().find(|lp| lp.id == id)
    }

    /// Visibility graph of the inflated obstacles plus all launch points.
    pub fn visibility_graph(&self) -> Result<VisibilityGraph, GeometryError> {
        let extra: Vec<Point2> = self.launch_points.iter().map(|lp| lp.position).collect();
        VisibilityGraph::build(&self.inflated, &extra)
    }

    /// Heading pointing into the environment from a perimeter launch point.
    pub fn inward_angle(&self, launch: &LaunchPoint) -> f64 {
        self.bounds.inward_normal_angle(launch.position)
    }
}

/// Visibility graph of an environment plus caller-supplied extra points.
///
/// Vertices are the inflated-obstacle corners plus `extra`; an extra point
/// inside an inflated obstacle is an error.
pub fn build_visibility_graph(
    env: &Environment,
    extra: &[Point2],
) -> Result<VisibilityGraph, GeometryError> {
    VisibilityGraph::build(env.inflated(), extra)
}

fn polygons_intersect(a: &Polygon, b: &Polygon) -> bool {
    // Edge crossing, containment, or boundary contact.
    for ea in a.edges() {
        for eb in b.edges() {
            if crate::geometry::segments_properly_cross(&ea, &eb) {
                return true;
            }
            if ea.distance_to(eb.a) < GEOM_EPS || eb.distance_to(ea.a) < GEOM_EPS {
                return true;
            }
        }
    }
    a.locate(b.vertices()[0]) == PointLocation::Inside
        || b.locate(a.vertices()[0]) == PointLocation::Inside
}

/// Shared parameters for the seeded benchmark scene generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneConfig {
    pub bounds_size: f64,
    pub robot_radius: f64,
    /// Number of launch positions spread along the bottom edge.
    pub launch_count: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            bounds_size: 1.2,
            robot_radius: 0.0323,
            launch_count: 2,
        }
    }
}

impl SceneConfig {
    fn bounds(&self) -> Bounds {
        Bounds::new(Point2::new(0.0, 0.0), self.bounds_size)
    }

    fn launches(&self) -> Vec<LaunchPoint> {
        // Evenly spaced along the bottom edge, all on the same side.
        (0..self.launch_count)
            .map(|i| LaunchPoint {
                id: format!("L{}", i + 1),
                position: Point2::new(
                    self.bounds_size * (i as f64 + 1.0) / (self.launch_count as f64 + 1.0),
                    0.0,
                ),
            })
            .collect()
    }

    fn cell(&self) -> f64 {
        self.bounds_size / crate::mapping::GRID_DIM as f64
    }
}

/// 3 to 5 identical axis-aligned squares placed uniformly at random, kept
/// at least one grid cell apart from each other, the walls, and the launch
/// corridor.
pub fn generate_uniform_squares_env<R: Rng>(rng: &mut R, cfg: &SceneConfig) -> Environment {
    let side = 0.18 * cfg.bounds_size / 1.2;
    let gap = cfg.cell().max(2.0 * cfg.robot_radius);
    let count = rng.gen_range(3..=5);
    let mut squares: Vec<Point2> = Vec::new(); // lower-left corners
    let mut guard = 0;
    while squares.len() < count && guard < 10_000 {
        guard += 1;
        let margin = gap + cfg.robot_radius;
        let x = rng.gen_range(margin..cfg.bounds_size - side - margin);
        let y = rng.gen_range(3.0 * gap..cfg.bounds_size - side - margin);
        let ok = squares.iter().all(|c| {
            (x - c.x).abs() >= side + gap || (y - c.y).abs() >= side + gap
        });
        if ok {
            squares.push(Point2::new(x, y));
        }
    }
    let obstacles = squares
        .iter()
        .map(|c| {
            Polygon::new(vec![
                *c,
                *c + Point2::new(side, 0.0),
                *c + Point2::new(side, side),
                *c + Point2::new(0.0, side),
            ])
            .unwrap()
        })
        .collect();
    Environment::new(obstacles, cfg.bounds(), cfg.launches(), cfg.robot_radius)
        .expect("generator keeps obstacles disjoint")
}

/// 3 to 6 non-uniform obstacles: convex hulls of random point splatters
/// plus at least one concave (L-shaped) obstacle, spaced at least one grid
/// cell apart.
pub fn generate_nonuniform_env<R: Rng>(rng: &mut R, cfg: &SceneConfig) -> Environment {
    let gap = cfg.cell().max(2.0 * cfg.robot_radius);
    let count = rng.gen_range(3..=6);
    let mut obstacles: Vec<Polygon> = Vec::new();
    let mut guard = 0;
    // First obstacle is always concave.
    while obstacles.len() < count && guard < 20_000 {
        guard += 1;
        let concave = obstacles.is_empty();
        let candidate = if concave {
            random_l_shape(rng, cfg)
        } else {
            random_splatter_hull(rng, cfg)
        };
        let Some(poly) = candidate else { continue };
        let inside_bounds = poly.vertices().iter().all(|v| {
            v.x > gap && v.y > 3.0 * gap && v.x < cfg.bounds_size - gap && v.y < cfg.bounds_size - gap
        });
        if !inside_bounds {
            continue;
        }
        let inflated_new = match inflate_obstacle(&poly, cfg.robot_radius + gap / 2.0) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let clear = obstacles.iter().all(|other| {
            let other_inf = inflate_obstacle(other, cfg.robot_radius + gap / 2.0).unwrap();
            !polygons_intersect(&inflated_new, &other_inf)
        });
        if clear {
            obstacles.push(poly);
        }
    }
    Environment::new(obstacles, cfg.bounds(), cfg.launches(), cfg.robot_radius)
        .expect("generator keeps obstacles disjoint")
}

fn random_splatter_hull<R: Rng>(rng: &mut R, cfg: &SceneConfig) -> Option<Polygon> {
    let scale = cfg.bounds_size;
    let cx = rng.gen_range(0.15 * scale..0.85 * scale);
    let cy = rng.gen_range(0.2 * scale..0.85 * scale);
    let rx = rng.gen_range(0.05 * scale..0.14 * scale);
    let ry = rng.gen_range(0.05 * scale..0.14 * scale);
    let n = rng.gen_range(5..12);
    let pts: Vec<Point2> = (0..n)
        .map(|_| {
            Point2::new(
                cx + rng.gen_range(-rx..rx),
                cy + rng.gen_range(-ry..ry),
            )
        })
        .collect();
    convex_hull(&pts).ok()
}

fn random_l_shape<R: Rng>(rng: &mut R, cfg: &SceneConfig) -> Option<Polygon> {
    let scale = cfg.bounds_size;
    let w = rng.gen_range(0.18 * scale..0.3 * scale);
    let h = rng.gen_range(0.18 * scale..0.3 * scale);
    let arm_w = rng.gen_range(0.4 * w..0.6 * w);
    let arm_h = rng.gen_range(0.4 * h..0.6 * h);
    let x = rng.gen_range(0.1 * scale..0.85 * scale - w);
    let y = rng.gen_range(0.15 * scale..0.85 * scale - h);
    // Random orientation of the notch: rotate by a multiple of 90 degrees.
    let base = vec![
        Point2::new(0.0, 0.0),
        Point2::new(w, 0.0),
        Point2::new(w, arm_h),
        Point2::new(arm_w, arm_h),
        Point2::new(arm_w, h),
        Point2::new(0.0, h),
    ];
    let quarter_turns = rng.gen_range(0..4);
    let rotated: Vec<Point2> = base
        .into_iter()
        .map(|p| {
            let mut q = p;
            for _ in 0..quarter_turns {
                q = Point2::new(-q.y, q.x);
            }
            q + Point2::new(x + 0.5 * w, y + 0.5 * h)
        })
        .collect();
    Polygon::new(rotated).ok()
}

/// True if any obstacle in the environment has a reflex (concave) corner.
pub fn has_concavity(env: &Environment) -> bool {
    env.obstacles().iter().any(|poly| {
        let v = poly.vertices();
        let n = v.len();
        (0..n).any(|i| {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            // Clockwise polygons turn right at convex corners.
            (b - a).cross(c - b) > GEOM_EPS
        })
    })
}

/// Walls of the environment as segments of the inflated obstacles.
pub fn inflated_walls(env: &Environment) -> Vec<Segment> {
    env.inflated().iter().flat_map(|p| p.edges().collect::<Vec<_>>()).collect()
}

/// True when `a` and `b` can see each other through the environment's
/// inflated obstacles.
pub fn visible_in(env: &Environment, a: Point2, b: Point2) -> bool {
    line_of_sight(a, b, env.inflated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square(x: f64, y: f64, s: f64) -> Polygon {
        Polygon::new(vec![
            Point2::new(x, y),
            Point2::new(x + s, y),
            Point2::new(x + s, y + s),
            Point2::new(x, y + s),
        ])
        .unwrap()
    }

    #[test]
    fn valid_environment_builds() {
        let env = Environment::new(
            vec![square(0.4, 0.4, 0.2)],
            Bounds::new(Point2::new(0.0, 0.0), 1.2),
            vec![LaunchPoint {
                id: "L1".into(),
                position: Point2::new(0.6, 0.0),
            }],
            0.03,
        )
        .unwrap();
        assert_eq!(env.inflated().len(), 1);
        assert!(env.inflated()[0].area() > env.obstacles()[0].area());
    }

    #[test]
    fn overlapping_obstacles_rejected() {
        let r = Environment::new(
            vec![square(0.4, 0.4, 0.2), square(0.55, 0.45, 0.2)],
            Bounds::new(Point2::new(0.0, 0.0), 1.2),
            vec![],
            0.03,
        );
        assert!(matches!(r, Err(EnvironmentError::ObstaclesOverlap(0, 1))));
    }

    #[test]
    fn launch_validation() {
        let bounds = Bounds::new(Point2::new(0.0, 0.0), 1.2);
        let off = Environment::new(
            vec![],
            bounds,
            vec![LaunchPoint {
                id: "L1".into(),
                position: Point2::new(0.6, 0.3),
            }],
            0.03,
        );
        assert!(matches!(off, Err(EnvironmentError::LaunchOffBoundary(_))));

        let blocked = Environment::new(
            vec![square(0.5, 0.0, 0.2)],
            bounds,
            vec![LaunchPoint {
                id: "L1".into(),
                position: Point2::new(0.6, 0.0),
            }],
            0.05,
        );
        assert!(matches!(
            blocked,
            Err(EnvironmentError::LaunchInsideObstacle(_, 0))
        ));
    }

    #[test]
    fn uniform_generator_is_seeded_and_valid() {
        let cfg = SceneConfig::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let e1 = generate_uniform_squares_env(&mut r1, &cfg);
        let e2 = generate_uniform_squares_env(&mut r2, &cfg);
        assert_eq!(e1.obstacles().len(), e2.obstacles().len());
        for (a, b) in e1.obstacles().iter().zip(e2.obstacles()) {
            assert_eq!(a.vertices(), b.vertices());
        }
        assert!((3..=5).contains(&e1.obstacles().len()));
        assert_eq!(e1.launch_points().len(), 2);
    }

    #[test]
    fn nonuniform_generator_has_concavity() {
        let cfg = SceneConfig::default();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let env = generate_nonuniform_env(&mut rng, &cfg);
            assert!(has_concavity(&env), "seed {seed} produced no concavity");
            assert!((3..=6).contains(&env.obstacles().len()));
        }
    }

    #[test]
    fn inward_angle_from_bottom_launch() {
        let env = Environment::new(
            vec![],
            Bounds::new(Point2::new(0.0, 0.0), 1.2),
            vec![LaunchPoint {
                id: "L1".into(),
                position: Point2::new(0.6, 0.0),
            }],
            0.03,
        )
        .unwrap();
        let lp = env.launch("L1").unwrap().clone();
        assert!((env.inward_angle(&lp) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
