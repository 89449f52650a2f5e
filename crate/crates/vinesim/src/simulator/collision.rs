//! Straight-robot contact resolution: vertex skim/slide/stuck
//! classification, wall slides with interruption by body wraps, and the
//! public collision-resolution surface.

use super::{MotionPhase, ShapeVertexKind, Sim, Termination};
use crate::geometry::{ccw_delta, line_of_sight, Point2, Polygon, Segment, ANG_EPS, GEOM_EPS};
use crate::simulator::DeploymentResult;
use crate::visibility::VisibilityGraph;
use std::f64::consts::PI;

/// Which way the body chord rotates about the pivot during a slide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationSense {
    CounterClockwise,
    Clockwise,
}

impl RotationSense {
    pub(super) fn sign(self) -> f64 {
        match self {
            RotationSense::CounterClockwise => 1.0,
            RotationSense::Clockwise => -1.0,
        }
    }
}

/// Outcome of the straight-robot band test at one contact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum SlideDecision {
    /// Contact angle below the critical angle: counter-clockwise pivot,
    /// tip slides toward the wall's next clockwise-order vertex.
    TowardNext,
    /// Mirrored branch: clockwise pivot toward the previous vertex.
    TowardPrev,
    /// Within the mirrored critical band around perpendicular: buckle.
    Stuck,
}

/// Adjacent geometry of an obstacle corner in the graph.
#[derive(Clone, Copy, Debug)]
pub(super) struct CornerInfo {
    pub pos: Point2,
    pub prev_pos: Point2,
    pub next_pos: Point2,
    pub prev_id: Option<usize>,
    pub next_id: Option<usize>,
}

pub(super) fn corner_info(
    graph: &VisibilityGraph,
    obstacles: &[Polygon],
    vid: usize,
) -> Option<CornerInfo> {
    let crate::visibility::VertexKind::ObstacleCorner { obstacle, vertex } = graph.kind(vid)
    else {
        return None;
    };
    let poly = &obstacles[obstacle];
    let n = poly.len();
    let prev_pos = poly.vertices()[(vertex + n - 1) % n];
    let next_pos = poly.vertices()[(vertex + 1) % n];
    Some(CornerInfo {
        pos: graph.position(vid),
        prev_pos,
        next_pos,
        prev_id: graph.find_vertex(prev_pos, 1e-12),
        next_id: graph.find_vertex(next_pos, 1e-12),
    })
}

/// True when direction `heading` from the corner enters the obstacle
/// interior wedge (the clockwise sector between the two adjacent walls).
pub(super) fn heading_enters_wedge(info: &CornerInfo, heading: f64) -> bool {
    let to_prev = (info.prev_pos - info.pos).angle();
    let to_next = (info.next_pos - info.pos).angle();
    let wedge = ccw_delta(to_prev, to_next);
    let h = ccw_delta(to_prev, heading);
    h > ANG_EPS && h < wedge - ANG_EPS
}

/// Angular sweep from `from` to `to` measured in the rotation sense.
pub(super) fn sweep_delta(from: f64, to: f64, rot: RotationSense) -> f64 {
    match rot {
        RotationSense::CounterClockwise => ccw_delta(from, to),
        RotationSense::Clockwise => ccw_delta(to, from),
    }
}

/// True when the body between `origin` and the new destination must bend
/// around the previously touched vertex: the straight chord loses line of
/// sight through the obstacles.
pub fn wrap_check(origin: Point2, destination: Point2, obstacles: &[Polygon]) -> bool {
    !line_of_sight(origin, destination, obstacles)
}

/// Resolution of a single projected contact, straight-robot rules only.
#[derive(Clone, Debug)]
pub enum CollisionResolution {
    /// Nothing ahead.
    None,
    /// Heading grazes a corner tangentially; growth continues through it.
    Skim { vertex: usize },
    /// Contact admits no motion; the tip stops at `contact`.
    Stuck { contact: Point2 },
    /// Tip slides along `wall` from `hit` toward `destination`.
    Slide {
        hit: Point2,
        wall: Segment,
        /// Contact angle, CCW from heading to the wall tangent.
        theta_c: f64,
        rotation: RotationSense,
        /// Graph vertex the tip is heading for (wall endpoint).
        destination: usize,
        /// First graph neighbor of the pivot swept before the
        /// destination, if the body wraps onto it mid-slide.
        first_obstruction: Option<usize>,
    },
}

/// Resolve the next contact for a straight robot growing from graph
/// vertex `node` along `heading`.
///
/// This is the pure decision procedure (vertex skim/stuck/slide and
/// edge-hit branches, including the angular-neighbor scan for mid-slide
/// obstructions); the simulator executes the motion it implies.
pub fn resolve_collision(
    graph: &VisibilityGraph,
    obstacles: &[Polygon],
    node: usize,
    heading: f64,
    mu: f64,
    radius: f64,
) -> CollisionResolution {
    let origin = graph.position(node);
    // Aligned visible corner, nearest first.
    let mut vbest: Option<(f64, usize)> = None;
    for e in graph.neighbors(node) {
        if !graph.kind(e.to).is_obstacle_corner() {
            continue;
        }
        let to = graph.position(e.to);
        let d = origin.dist(to);
        if d < GEOM_EPS {
            continue;
        }
        let ang = (to - origin).angle();
        let delta = ccw_delta(heading, ang);
        if delta.min(std::f64::consts::TAU - delta) <= ANG_EPS && vbest.map_or(true, |(bd, _)| d < bd)
        {
            vbest = Some((d, e.to));
        }
    }
    let edge_hit = crate::geometry::ray_cast(origin, heading, obstacles);
    let theta_star = |l: f64| {
        crate::kinematics::straight_critical_angle((l / radius.max(1e-12)).max(1e-12), mu)
    };

    if let Some((d, vid)) = vbest {
        if edge_hit.map_or(true, |h| d < h.distance + 1e-7 * (1.0 + d)) {
            let info = corner_info(graph, obstacles, vid).expect("corner vertex");
            if !heading_enters_wedge(&info, heading) {
                return CollisionResolution::Skim { vertex: vid };
            }
            let ts = theta_star(d);
            match vertex_slide_choice(&info, heading, ts) {
                None => CollisionResolution::Stuck { contact: info.pos },
                Some(choice) => {
                    let (dest_pos, dest_id) = match choice.rotation {
                        RotationSense::CounterClockwise => (info.next_pos, info.next_id),
                        RotationSense::Clockwise => (info.prev_pos, info.prev_id),
                    };
                    let Some(dest_id) = dest_id else {
                        return CollisionResolution::Stuck { contact: info.pos };
                    };
                    let obstruction = first_obstruction(
                        graph,
                        node,
                        heading,
                        (dest_pos - origin).angle(),
                        choice.rotation,
                        dest_id,
                    );
                    CollisionResolution::Slide {
                        hit: info.pos,
                        wall: choice.wall,
                        theta_c: choice.theta_c,
                        rotation: choice.rotation,
                        destination: dest_id,
                        first_obstruction: obstruction,
                    }
                }
            }
        } else {
            edge_resolution(graph, node, heading, edge_hit.unwrap(), &theta_star)
        }
    } else if let Some(hit) = edge_hit {
        edge_resolution(graph, node, heading, hit, &theta_star)
    } else {
        CollisionResolution::None
    }
}

fn edge_resolution(
    graph: &VisibilityGraph,
    node: usize,
    heading: f64,
    hit: crate::geometry::RayHit,
    theta_star: &dyn Fn(f64) -> f64,
) -> CollisionResolution {
    let origin = graph.position(node);
    let theta_kin = ccw_delta(heading, hit.wall.angle());
    let ts = theta_star(hit.distance);
    let decision = if theta_kin < ts {
        SlideDecision::TowardNext
    } else if theta_kin > PI - ts {
        SlideDecision::TowardPrev
    } else {
        SlideDecision::Stuck
    };
    match decision {
        SlideDecision::Stuck => CollisionResolution::Stuck { contact: hit.point },
        SlideDecision::TowardNext | SlideDecision::TowardPrev => {
            let rotation = if decision == SlideDecision::TowardNext {
                RotationSense::CounterClockwise
            } else {
                RotationSense::Clockwise
            };
            let dest_pos = if rotation == RotationSense::CounterClockwise {
                hit.wall.b
            } else {
                hit.wall.a
            };
            let Some(dest_id) = graph.find_vertex(dest_pos, 1e-9) else {
                return CollisionResolution::Stuck { contact: hit.point };
            };
            let obstruction = first_obstruction(
                graph,
                node,
                heading,
                (dest_pos - origin).angle(),
                rotation,
                dest_id,
            );
            CollisionResolution::Slide {
                hit: hit.point,
                wall: hit.wall,
                theta_c: theta_kin,
                rotation,
                destination: dest_id,
                first_obstruction: obstruction,
            }
        }
    }
}

pub(super) struct VertexSlide {
    pub wall: Segment,
    pub theta_c: f64,
    pub rotation: RotationSense,
}

/// One-sided slide options at a corner contact. Sliding onward along the
/// outgoing wall needs a sub-critical contact angle (counter-clockwise
/// pivot); sliding back along the incoming wall needs the mirrored
/// super-critical angle (clockwise pivot). Both valid breaks the tie
/// toward the larger backward angle.
pub(super) fn vertex_slide_choice(
    info: &CornerInfo,
    heading: f64,
    theta_star: f64,
) -> Option<VertexSlide> {
    let t_next = (info.next_pos - info.pos).angle();
    let t_prev = (info.pos - info.prev_pos).angle();
    let theta1 = ccw_delta(heading, t_next);
    let theta2 = ccw_delta(heading, t_prev);
    let valid1 = theta1 < theta_star;
    let valid2 = theta2 > PI - theta_star && theta2 < PI;
    let slide1 = || VertexSlide {
        wall: Segment::new(info.pos, info.next_pos),
        theta_c: theta1,
        rotation: RotationSense::CounterClockwise,
    };
    let slide2 = || VertexSlide {
        wall: Segment::new(info.prev_pos, info.pos),
        theta_c: theta2,
        rotation: RotationSense::Clockwise,
    };
    match (valid1, valid2) {
        (false, false) => None,
        (true, false) => Some(slide1()),
        (false, true) => Some(slide2()),
        (true, true) => {
            // Larger backward angle wins; ties go counter-clockwise.
            if PI - theta1 >= theta2 {
                Some(slide1())
            } else {
                Some(slide2())
            }
        }
    }
}

/// First obstacle-corner neighbor of `node` encountered when sweeping the
/// chord from `from_angle` toward `dest_angle` in the given sense.
pub(super) fn first_obstruction(
    graph: &VisibilityGraph,
    node: usize,
    from_angle: f64,
    dest_angle: f64,
    rot: RotationSense,
    dest_id: usize,
) -> Option<usize> {
    let origin = graph.position(node);
    let total = sweep_delta(from_angle, dest_angle, rot);
    let mut best: Option<(f64, f64, usize)> = None; // (delta, dist, vid)
    for e in graph.neighbors(node) {
        if e.to == dest_id || !graph.kind(e.to).is_obstacle_corner() {
            continue;
        }
        let pos = graph.position(e.to);
        let d = origin.dist(pos);
        if d < GEOM_EPS {
            continue;
        }
        let delta = sweep_delta(from_angle, (pos - origin).angle(), rot);
        if delta <= ANG_EPS || delta >= total - ANG_EPS {
            continue;
        }
        let better = match best {
            None => true,
            Some((bd, bdist, _)) => {
                delta < bd - ANG_EPS || (delta < bd + ANG_EPS && d < bdist)
            }
        };
        if better {
            best = Some((delta, d, e.to));
        }
    }
    best.map(|(_, _, vid)| vid)
}

impl<'a> Sim<'a> {
    /// Arriving at a reflex corner can leave the next wall dead ahead at
    /// distance zero; classify that contact before projecting.
    pub(super) fn handle_corner_recontact(
        &mut self,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        if !self.graph.kind(self.node).is_obstacle_corner() {
            return None;
        }
        let info = corner_info(&self.graph, self.obstacles, self.node)?;
        if !heading_enters_wedge(&info, self.heading) {
            return None;
        }
        let v = info.pos;
        // Unsupported length runs from the previous path point.
        let l = self
            .path
            .iter()
            .rev()
            .find(|p| p.pos.dist(v) > GEOM_EPS)
            .map(|p| p.pos.dist(v))
            .unwrap_or(self.radius.max(GEOM_EPS));
        if self.turning.is_some() {
            return self.turning_vertex_contact(info, 0.0);
        }
        let ts = self.theta_star(l);
        match vertex_slide_choice(&info, self.heading, ts) {
            None => {
                let base = self.base;
                Some(self.finalize(v, base, Termination::Stuck))
            }
            Some(choice) => self.execute_slide(v, choice.wall, choice.rotation),
        }
    }

    pub(super) fn handle_vertex_hit(
        &mut self,
        vid: usize,
        dist: f64,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let origin = self.node_pos();
        let info = corner_info(&self.graph, self.obstacles, vid).expect("corner vertex");
        self.trace.push(MotionPhase::Free {
            start_length: self.base,
            from: origin,
            heading: self.heading,
            length: dist,
        });
        if !heading_enters_wedge(&info, self.heading) {
            // Skim: pass the corner, keep the heading, remember the touch.
            let base = self.base + dist;
            self.push_path(info.pos, ShapeVertexKind::Pivot, base);
            self.node = vid;
            self.base = base;
            return None;
        }
        if self.turning.is_some() {
            return self.turning_vertex_contact(info, dist);
        }
        let ts = self.theta_star(dist);
        match vertex_slide_choice(&info, self.heading, ts) {
            None => {
                let base = self.base + dist;
                Some(self.finalize(info.pos, base, Termination::Stuck))
            }
            Some(choice) => self.execute_slide(info.pos, choice.wall, choice.rotation),
        }
    }

    pub(super) fn handle_edge_hit(
        &mut self,
        hit: Point2,
        dist: f64,
        obstacle: usize,
        edge: usize,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let wall = self.obstacles[obstacle]
            .edges()
            .nth(edge)
            .expect("edge index from ray cast");
        // A hit at a wall endpoint is a corner contact.
        for endpoint in [wall.a, wall.b] {
            if hit.dist(endpoint) <= 1e-9 {
                if let Some(vid) = self.graph.find_vertex(endpoint, 1e-9) {
                    return self.handle_vertex_hit(vid, self.node_pos().dist(endpoint));
                }
            }
        }
        let origin = self.node_pos();
        self.trace.push(MotionPhase::Free {
            start_length: self.base,
            from: origin,
            heading: self.heading,
            length: dist,
        });
        if self.turning.is_some() {
            return self.turning_edge_contact(hit, wall);
        }
        let theta_kin = ccw_delta(self.heading, wall.angle());
        match self.straight_decision(theta_kin, dist) {
            SlideDecision::Stuck => {
                let base = self.base + dist;
                Some(self.finalize(hit, base, Termination::Stuck))
            }
            SlideDecision::TowardNext => {
                self.execute_slide(hit, wall, RotationSense::CounterClockwise)
            }
            SlideDecision::TowardPrev => self.execute_slide(hit, wall, RotationSense::Clockwise),
        }
    }

    /// Slide the tip along `wall` from `hit` toward the endpoint selected
    /// by the rotation sense, pivoting about the current node. Stops at
    /// the wall end, at the first body wrap onto another visible corner,
    /// or when the tube runs out.
    pub(super) fn execute_slide(
        &mut self,
        hit: Point2,
        wall: Segment,
        rot: RotationSense,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let pivot = self.node_pos();
        let dest_pos = match rot {
            RotationSense::CounterClockwise => wall.b,
            RotationSense::Clockwise => wall.a,
        };
        let dest_id = self.graph.find_vertex(dest_pos, 1e-9);
        let seg_len = hit.dist(dest_pos);
        if seg_len <= GEOM_EPS {
            // Hit exactly at the destination corner; nothing to slide.
            let base = self.base + pivot.dist(hit);
            return Some(self.finalize(hit, base, Termination::Stuck));
        }
        let u_wall = (dest_pos - hit).normalized();
        let from_angle = if pivot.dist(hit) > GEOM_EPS {
            (hit - pivot).angle()
        } else {
            self.heading
        };

        // Interruption: first visible corner swept before the destination.
        let dest_angle = (dest_pos - pivot).angle();
        let obstruction = first_obstruction(
            &self.graph,
            self.node,
            from_angle,
            dest_angle,
            rot,
            dest_id.unwrap_or(usize::MAX),
        );
        let s_of = |p: Point2| (p - hit).dot(u_wall);
        let mut events: Vec<(f64, SlideEvent)> = Vec::new();
        events.push((seg_len, SlideEvent::Destination));
        if let Some(vid) = obstruction {
            let vpos = self.graph.position(vid);
            // Tip position when the chord passes over the corner: the ray
            // pivot->corner extended to the wall line.
            let dir = (vpos - pivot).normalized();
            let denom = dir.cross(u_wall);
            if denom.abs() > GEOM_EPS {
                let t = (hit - pivot).cross(u_wall) / denom;
                let tip = pivot + dir * t;
                let s = s_of(tip);
                if s > GEOM_EPS && s < seg_len - GEOM_EPS && t > GEOM_EPS {
                    events.push((s, SlideEvent::Obstruction { vid, tip }));
                }
            }
        }
        // Length exhaustion: chord length reaches the available tube.
        let chord_max = self.max_length - self.base;
        if dest_pos.dist(pivot) > chord_max {
            // |hit + s u - pivot|^2 = chord_max^2, take the forward root.
            let rel = hit - pivot;
            let b = 2.0 * rel.dot(u_wall);
            let c = rel.dot(rel) - chord_max * chord_max;
            let disc = b * b - 4.0 * c;
            if disc >= 0.0 {
                let s = (-b + disc.sqrt()) / 2.0;
                if s >= -GEOM_EPS {
                    events.push((s.max(0.0), SlideEvent::Exhausted));
                }
            }
        }
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (s_end, event) = events.into_iter().next().unwrap();
        let tip_end = hit + u_wall * s_end;

        self.push_wall(hit, tip_end, wall.angle());
        self.push_swept(vec![pivot, hit, tip_end]);
        self.trace.push(MotionPhase::Slide {
            start_length: self.base + pivot.dist(hit),
            pivot,
            wall_angle: wall.angle(),
            tip_start: hit,
            tip_end,
        });

        match event {
            SlideEvent::Exhausted => {
                Some(self.finalize(tip_end, self.max_length, Termination::LengthExhausted))
            }
            SlideEvent::Destination => {
                let base = self.base + pivot.dist(dest_pos);
                let Some(dest_id) = dest_id else {
                    // Corner buried inside another obstacle: wedged.
                    return Some(self.finalize(dest_pos, base, Termination::Stuck));
                };
                self.push_path(dest_pos, ShapeVertexKind::Pivot, base);
                self.heading = (dest_pos - pivot).angle();
                self.node = dest_id;
                self.base = base;
                None
            }
            SlideEvent::Obstruction { vid, tip } => {
                // The body wraps onto the corner and keeps sliding with the
                // new, shorter chord.
                let vpos = self.graph.position(vid);
                let base = self.base + pivot.dist(vpos);
                self.push_path(vpos, ShapeVertexKind::Pivot, base);
                self.heading = (tip - vpos).angle();
                self.node = vid;
                self.base = base;
                None
            }
        }
    }
}

enum SlideEvent {
    Destination,
    Obstruction { vid: usize, tip: Point2 },
    Exhausted,
}
