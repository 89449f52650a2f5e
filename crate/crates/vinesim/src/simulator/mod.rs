//! Deployment simulation along the visibility graph.
//!
//! A deployment grows the robot from a launch point, resolves wall and
//! corner contacts with the straight-robot rules, applies the
//! four-morphology turning kinematics when the robot carries a discrete
//! turn, and accumulates the final shape, the wall portions the tip slid
//! over, and the area the body swept through while pivoting.

mod collision;
mod turning;

pub use collision::{resolve_collision, wrap_check, CollisionResolution, RotationSense};
pub use turning::{body_collision_during_pivot, swing_target_angle, BodyCollision};

use crate::environment::Environment;
use crate::geometry::{
    ccw_delta, normalize_angle, GeometryError, Point2, Polygon, Segment, ANG_EPS, GEOM_EPS,
};
use crate::kinematics::{
    classify_morphology, straight_critical_angle, ContactGeometry, Morphology, DEFAULT_MU,
};
use crate::visibility::{VertexKind, VisibilityGraph};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown launch point '{0}'")]
    UnknownLaunch(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A discrete pre-formed turn: deployed at `fraction` of the maximum
/// length, bending the heading by `angle` radians (positive is
/// counter-clockwise).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnSpec {
    pub fraction: f64,
    pub angle: f64,
}

/// One element of the action space: where to launch, at what angle, with
/// what turn, and how much tube to spend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeploymentAction {
    pub launch_id: String,
    /// Absolute heading at launch, radians CCW from +x.
    pub launch_angle: f64,
    pub turn: Option<TurnSpec>,
    pub max_length: f64,
}

impl DeploymentAction {
    pub fn straight(launch_id: impl Into<String>, launch_angle: f64, max_length: f64) -> Self {
        Self {
            launch_id: launch_id.into(),
            launch_angle,
            turn: None,
            max_length,
        }
    }

    pub fn turning(
        launch_id: impl Into<String>,
        launch_angle: f64,
        fraction: f64,
        turn_angle: f64,
        max_length: f64,
    ) -> Self {
        Self {
            launch_id: launch_id.into(),
            launch_angle,
            turn: Some(TurnSpec {
                fraction,
                angle: turn_angle,
            }),
            max_length,
        }
    }

    pub fn validate(&self, env: &Environment) -> Result<(), SimError> {
        if env.launch(&self.launch_id).is_none() {
            return Err(SimError::UnknownLaunch(self.launch_id.clone()));
        }
        if !(self.max_length > 0.0) {
            return Err(SimError::InvalidAction("max_length must be positive".into()));
        }
        if let Some(t) = &self.turn {
            if t.angle == 0.0 {
                return Err(SimError::InvalidAction(
                    "turn present with zero turn angle; drop the turn instead".into(),
                ));
            }
            if !(t.fraction > 0.0 && t.fraction < 1.0) {
                return Err(SimError::InvalidAction(
                    "turn fraction must lie in (0, 1)".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Role of a vertex within the final robot shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeVertexKind {
    Launch,
    Pivot,
    Turn,
    Tip,
}

/// The final robot body as an ordered polyline from launch to tip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotShape {
    pub vertices: Vec<(Point2, ShapeVertexKind)>,
}

impl RobotShape {
    pub fn polyline_length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].0.dist(w[1].0))
            .sum()
    }

    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.vertices.iter().map(|v| v.0)
    }

    pub fn tip(&self) -> Point2 {
        self.vertices.last().expect("shape never empty").0
    }
}

/// Why a deployment ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Grew to full length with the tip in free space.
    FreeEnd,
    /// Ran out of tube while in contact with a wall.
    LengthExhausted,
    /// Wedged into a contact that admits no further motion.
    Stuck,
    /// Resolution cycled past the iteration guard; result unreliable.
    LoopLimit,
}

/// Everything a deployment produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeploymentResult {
    pub shape: RobotShape,
    /// Wall portions the tip slid over, each lying on an inflated edge.
    pub walls_hit: Vec<Segment>,
    /// Regions the body swept through while pivoting.
    pub swept_area: Vec<Polygon>,
    pub termination: Termination,
}

/// Contact and resolution parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimParams {
    /// Static friction coefficient at wall contacts.
    pub mu: f64,
    /// Iteration guard: the main loop runs at most this many times the
    /// vertex count.
    pub loop_limit_factor: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            loop_limit_factor: 10,
        }
    }
}

/// One span of motion, recorded for sensor-stream synthesis. Spans carry
/// the total robot length at which they start so overlapping re-resolution
/// spans can be skipped when sampling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum MotionPhase {
    /// Straight unobstructed growth.
    Free {
        start_length: f64,
        from: Point2,
        heading: f64,
        length: f64,
    },
    /// Tip sliding along a wall while the body pivots about one point.
    Slide {
        start_length: f64,
        pivot: Point2,
        wall_angle: f64,
        tip_start: Point2,
        tip_end: Point2,
    },
    /// A turn vertex deployed at `at`.
    TurnInserted { at: Point2, angle: f64 },
    /// Tip sliding along a wall while the body swings rigidly about the
    /// pre-turn pivot (positive or negative pivot morphology).
    TurnSwing {
        start_length: f64,
        pivot: Point2,
        l_b: f64,
        turn_angle: f64,
        wall_angle: f64,
        tip_start: Point2,
        beta_start: f64,
        beta_end: f64,
    },
    /// Friction-locked buckling: tip pinned while the turn point migrates.
    FlBuckle {
        pivot: Point2,
        l_b: f64,
        turn_start: Point2,
        contact: Point2,
        wall_angle: f64,
        theta_c_start: f64,
        theta_c_end: f64,
        /// Robot length up to the turn point (constant during the buckle).
        base_length: f64,
    },
    /// Terminal contact that admits no further motion.
    StuckContact { at: Point2 },
}

/// Simulate a deployment, building the environment's visibility graph.
pub fn simulate(
    env: &Environment,
    action: &DeploymentAction,
    params: &SimParams,
) -> Result<DeploymentResult, SimError> {
    let graph = env.visibility_graph()?;
    simulate_on_graph(env, &graph, action, params).map(|(r, _)| r)
}

/// Simulate and return the motion trace alongside the result.
pub fn simulate_traced(
    env: &Environment,
    action: &DeploymentAction,
    params: &SimParams,
) -> Result<(DeploymentResult, Vec<MotionPhase>), SimError> {
    let graph = env.visibility_graph()?;
    simulate_on_graph(env, &graph, action, params)
}

/// Simulate against a prebuilt environment graph (cloned internally), so
/// planners can evaluate many actions without rebuilding it.
pub fn simulate_on_graph(
    env: &Environment,
    graph: &VisibilityGraph,
    action: &DeploymentAction,
    params: &SimParams,
) -> Result<(DeploymentResult, Vec<MotionPhase>), SimError> {
    action.validate(env)?;
    let launch = env.launch(&action.launch_id).unwrap();
    let mut graph = graph.clone();
    let launch_id = match graph.find_vertex(launch.position, 1e-12) {
        Some(id) => id,
        None => graph.add_vertex(launch.position, VertexKind::Launch, env.inflated())?,
    };
    let sim = Sim {
        obstacles: env.inflated(),
        graph,
        mu: params.mu,
        radius: env.robot_radius(),
        max_length: action.max_length,
        turn_arc: action.turn.as_ref().map(|t| t.fraction * action.max_length),
        turn_angle: action.turn.as_ref().map(|t| t.angle).unwrap_or(0.0),
        node: launch_id,
        heading: normalize_angle(action.launch_angle),
        base: 0.0,
        turning: None,
        path: vec![PathPoint {
            pos: launch.position,
            kind: ShapeVertexKind::Launch,
            base: 0.0,
        }],
        walls: Vec::new(),
        swept: Vec::new(),
        trace: Vec::new(),
        loop_limit: params.loop_limit_factor * (graph_len_hint(env) + 8),
    };
    Ok(sim.run())
}

fn graph_len_hint(env: &Environment) -> usize {
    env.inflated().iter().map(|p| p.len()).sum::<usize>() + env.launch_points().len()
}

#[derive(Clone, Copy, Debug)]
struct PathPoint {
    pos: Point2,
    kind: ShapeVertexKind,
    base: f64,
}

/// Active discrete turn: the fold sits between the pre-turn pivot and the
/// tip and still shapes contact resolution.
#[derive(Clone, Copy, Debug)]
struct ActiveTurn {
    t_id: usize,
    angle: f64,
    pre_pivot: Point2,
    pre_base: f64,
    l_b: f64,
}

struct Sim<'a> {
    obstacles: &'a [Polygon],
    graph: VisibilityGraph,
    mu: f64,
    radius: f64,
    max_length: f64,
    turn_arc: Option<f64>,
    turn_angle: f64,
    node: usize,
    heading: f64,
    base: f64,
    turning: Option<ActiveTurn>,
    path: Vec<PathPoint>,
    walls: Vec<Segment>,
    swept: Vec<Polygon>,
    trace: Vec<MotionPhase>,
    loop_limit: usize,
}

/// What the projection step found ahead of the tip.
enum Event {
    TurnInsert { dist: f64 },
    VertexHit { vid: usize, dist: f64 },
    EdgeHit { hit: Point2, dist: f64, obstacle: usize, edge: usize },
}

impl<'a> Sim<'a> {
    fn node_pos(&self) -> Point2 {
        self.graph.position(self.node)
    }

    fn run(mut self) -> (DeploymentResult, Vec<MotionPhase>) {
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations > self.loop_limit {
                let tip = self.node_pos();
                let base = self.base;
                return self.finalize(tip, base, Termination::LoopLimit);
            }
            let remaining = self.max_length - self.base;
            if remaining <= GEOM_EPS {
                let tip = self.node_pos();
                let base = self.base;
                return self.finalize(tip, base, Termination::LengthExhausted);
            }

            // Re-contact at the node itself: arriving at a reflex corner
            // leaves the next wall dead ahead at distance zero.
            if let Some(done) = self.handle_corner_recontact() {
                return done;
            }

            match self.project(remaining) {
                None => {
                    // Free growth to full length.
                    let tip = self.node_pos() + Point2::from_angle(self.heading) * remaining;
                    self.trace.push(MotionPhase::Free {
                        start_length: self.base,
                        from: self.node_pos(),
                        heading: self.heading,
                        length: remaining,
                    });
                    let base = self.base + remaining;
                    return self.finalize(tip, base, Termination::FreeEnd);
                }
                Some(Event::TurnInsert { dist }) => self.insert_turn(dist),
                Some(Event::VertexHit { vid, dist }) => {
                    if let Some(done) = self.handle_vertex_hit(vid, dist) {
                        return done;
                    }
                }
                Some(Event::EdgeHit { hit, dist, obstacle, edge }) => {
                    if let Some(done) = self.handle_edge_hit(hit, dist, obstacle, edge) {
                        return done;
                    }
                }
            }
        }
    }

    /// Nearest upcoming event along the heading, or None when the robot
    /// can spend its remaining length freely.
    fn project(&self, remaining: f64) -> Option<Event> {
        let origin = self.node_pos();
        let mut best: Option<(f64, Event)> = None;
        let mut push = |dist: f64, ev: Event| {
            if best.as_ref().map_or(true, |(d, _)| dist < *d - GEOM_EPS) {
                best = Some((dist, ev));
            }
        };

        // Edge hit by ray casting.
        if let Some(hit) = crate::geometry::ray_cast(origin, self.heading, self.obstacles) {
            push(
                hit.distance,
                Event::EdgeHit {
                    hit: hit.point,
                    dist: hit.distance,
                    obstacle: hit.obstacle,
                    edge: hit.edge,
                },
            );
        }

        // Vertex hit: heading aligned with a visible obstacle corner. A
        // corner at the same distance as the edge hit wins (the cast
        // reports corner contacts as edge endpoint hits).
        let mut vbest: Option<(f64, usize)> = None;
        for e in self.graph.neighbors(self.node) {
            if !self.graph.kind(e.to).is_obstacle_corner() {
                continue;
            }
            let to = self.graph.position(e.to);
            let d = origin.dist(to);
            if d < GEOM_EPS {
                continue;
            }
            let ang = (to - origin).angle();
            let delta = ccw_delta(self.heading, ang);
            if delta.min(std::f64::consts::TAU - delta) <= ANG_EPS
                && vbest.map_or(true, |(bd, _)| d < bd)
            {
                vbest = Some((d, e.to));
            }
        }
        if let Some((d, vid)) = vbest {
            // Prefer the vertex interpretation over an edge hit at the
            // same point.
            if best
                .as_ref()
                .map_or(true, |(bd, _)| d < bd + 1e-7 * (1.0 + d))
            {
                best = Some((d, Event::VertexHit { vid, dist: d }));
            }
        }

        // Turn deployment, when the fold's arc position lies within the
        // current free segment before any collision.
        if self.turning.is_none() {
            if let Some(arc) = self.turn_arc {
                let d_turn = arc - self.base;
                if d_turn > GEOM_EPS {
                    let before_hit = best.as_ref().map_or(true, |(bd, _)| d_turn <= *bd + GEOM_EPS);
                    if before_hit && d_turn <= remaining {
                        best = Some((d_turn, Event::TurnInsert { dist: d_turn }));
                    }
                }
            }
        }

        match best {
            Some((d, ev)) if d <= remaining + GEOM_EPS => Some(ev),
            _ => None,
        }
    }

    fn insert_turn(&mut self, dist: f64) {
        let origin = self.node_pos();
        let t_pos = origin + Point2::from_angle(self.heading) * dist;
        self.trace.push(MotionPhase::Free {
            start_length: self.base,
            from: origin,
            heading: self.heading,
            length: dist,
        });
        let t_id = match self.graph.add_vertex(t_pos, VertexKind::Turn, self.obstacles) {
            Ok(id) => id,
            Err(_) => {
                // Numerically on a wall; nudge epsilon back along the ray.
                let nudged = origin + Point2::from_angle(self.heading) * (dist - 1e-9);
                self.graph
                    .add_vertex(nudged, VertexKind::Turn, self.obstacles)
                    .expect("turn point lies on a free ray")
            }
        };
        let base = self.base + dist;
        self.push_path(t_pos, ShapeVertexKind::Turn, base);
        self.turning = Some(ActiveTurn {
            t_id,
            angle: self.turn_angle,
            pre_pivot: origin,
            pre_base: self.base,
            l_b: dist,
        });
        self.trace.push(MotionPhase::TurnInserted {
            at: t_pos,
            angle: self.turn_angle,
        });
        self.turn_arc = None; // consumed
        self.node = t_id;
        self.base = base;
        self.heading = normalize_angle(self.heading + self.turn_angle);
    }

    fn push_path(&mut self, pos: Point2, kind: ShapeVertexKind, base: f64) {
        // Keep the path ordered by arc length; swings can discover a body
        // contact upstream of the turn point.
        let idx = self
            .path
            .iter()
            .position(|p| p.base > base + GEOM_EPS)
            .unwrap_or(self.path.len());
        self.path.insert(idx, PathPoint { pos, kind, base });
    }

    fn update_turn_position(&mut self, t_id: usize, new_pos: Point2) {
        if let Some(p) = self
            .path
            .iter_mut()
            .find(|p| p.kind == ShapeVertexKind::Turn)
        {
            p.pos = new_pos;
        }
        // Relocation can fail only if the new point sits inside an
        // obstacle; the turning solvers keep it in free space.
        let _ = self.graph.update_turn_vertex(t_id, new_pos, self.obstacles);
    }

    fn push_swept(&mut self, pts: Vec<Point2>) {
        let mut dedup: Vec<Point2> = Vec::with_capacity(pts.len());
        for p in pts {
            if dedup.last().map_or(true, |q| q.dist(p) > GEOM_EPS) {
                dedup.push(p);
            }
        }
        while dedup.len() > 1 && dedup[0].dist(*dedup.last().unwrap()) <= GEOM_EPS {
            dedup.pop();
        }
        if dedup.len() < 3 {
            return;
        }
        if let Ok(poly) = Polygon::new(dedup) {
            if poly.area() > GEOM_EPS {
                self.swept.push(poly);
            }
        }
    }

    /// Record a contacted wall portion, oriented so the obstacle lies on
    /// the right-hand side of a -> b (the clockwise tangent sense).
    fn push_wall(&mut self, a: Point2, b: Point2, wall_angle: f64) {
        if a.dist(b) <= GEOM_EPS {
            return;
        }
        let seg = if Point2::from_angle(wall_angle).dot(b - a) >= 0.0 {
            Segment::new(a, b)
        } else {
            Segment::new(b, a)
        };
        self.walls.push(seg);
    }

    fn finalize(
        &mut self,
        tip: Point2,
        tip_base: f64,
        termination: Termination,
    ) -> (DeploymentResult, Vec<MotionPhase>) {
        if termination == Termination::Stuck {
            self.trace.push(MotionPhase::StuckContact { at: tip });
        }
        self.path.push(PathPoint {
            pos: tip,
            kind: ShapeVertexKind::Tip,
            base: tip_base,
        });

        // Collapse collinear interior points; keep launch, turns, and tip.
        let mut vertices: Vec<(Point2, ShapeVertexKind)> = Vec::new();
        for (i, p) in self.path.iter().enumerate() {
            if let Some((last, last_kind)) = vertices.last().copied() {
                if last.dist(p.pos) <= GEOM_EPS {
                    // Coincident: prefer the more specific kind.
                    if p.kind == ShapeVertexKind::Tip || p.kind == ShapeVertexKind::Turn {
                        if last_kind != ShapeVertexKind::Launch {
                            vertices.last_mut().unwrap().1 = p.kind;
                        }
                    }
                    continue;
                }
            }
            vertices.push((p.pos, p.kind));
            let _ = i;
        }
        // Drop interior vertices with no direction change.
        let mut simplified: Vec<(Point2, ShapeVertexKind)> = Vec::new();
        for v in vertices {
            simplified.push(v);
            while simplified.len() >= 3 {
                let n = simplified.len();
                let (a, _) = simplified[n - 3];
                let (b, kb) = simplified[n - 2];
                let (c, _) = simplified[n - 1];
                let keep = kb == ShapeVertexKind::Turn
                    || kb == ShapeVertexKind::Launch
                    || (b - a).normalized().cross((c - b).normalized()).abs() > 1e-9
                    || (b - a).normalized().dot((c - b).normalized()) < 0.0;
                if keep {
                    break;
                }
                simplified.remove(n - 2);
            }
        }
        let shape = RobotShape {
            vertices: simplified,
        };
        (
            DeploymentResult {
                shape,
                walls_hit: std::mem::take(&mut self.walls),
                swept_area: std::mem::take(&mut self.swept),
                termination,
            },
            std::mem::take(&mut self.trace),
        )
    }

    /// Critical angle for the straight stuck test at contact distance `l`.
    fn theta_star(&self, l: f64) -> f64 {
        if self.radius <= 0.0 {
            return straight_critical_angle(1e12, self.mu);
        }
        straight_critical_angle((l / self.radius).max(1e-12), self.mu)
    }

    /// Straight-robot band: stuck when the contact angle is within the
    /// mirrored critical band around perpendicular.
    fn straight_decision(&self, theta_kin: f64, l: f64) -> collision::SlideDecision {
        let ts = self.theta_star(l);
        if theta_kin < ts {
            collision::SlideDecision::TowardNext
        } else if theta_kin > PI - ts {
            collision::SlideDecision::TowardPrev
        } else {
            collision::SlideDecision::Stuck
        }
    }

    fn contact_geometry(&self, turn: &ActiveTurn, contact: Point2, theta_kin: f64) -> ContactGeometry {
        let t_pos = self.graph.position(turn.t_id);
        let l_a = t_pos.dist(contact).max(1e-9);
        // Clockwise turns mirror into the positive-turn frame.
        let theta_eff = if turn.angle >= 0.0 { theta_kin } else { PI - theta_kin };
        ContactGeometry::new(
            theta_eff.clamp(1e-9, PI - 1e-9),
            turn.angle.abs(),
            l_a,
            turn.l_b.max(1e-9),
            self.mu,
            self.radius,
        )
    }

    fn classify_turning(&self, turn: &ActiveTurn, contact: Point2, theta_kin: f64) -> Morphology {
        let g = self.contact_geometry(turn, contact, theta_kin);
        // Degenerate boundary geometry wedges the robot in place.
        classify_morphology(&g).unwrap_or(Morphology::FrictionLocked)
    }
}
