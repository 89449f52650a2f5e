//! Turning kinematics: what a robot carrying a discrete turn does at a
//! wall contact. Positive and negative pivots swing the whole post-pivot
//! chain rigidly about the pre-turn pivot while the tip slides;
//! pivot-at-turn demotes the fold to an ordinary pivot; friction-locked
//! contacts pin the tip and migrate the turn point until the contact
//! angle reaches the nearest regime boundary.

use super::collision::{sweep_delta, CornerInfo, RotationSense};
use super::{ActiveTurn, MotionPhase, ShapeVertexKind, Sim, Termination};
use crate::geometry::{
    ccw_delta, line_circle_intersection, normalize_angle, Point2, Segment, ANG_EPS, GEOM_EPS,
};
use crate::kinematics::{morphology_boundaries, Morphology};
use crate::simulator::DeploymentResult;
use crate::visibility::VisibilityGraph;
use std::f64::consts::PI;

/// Final angle of the pre-turn segment when the tip reaches `dest` while
/// the body pivots rigidly about `b` with the fold angle preserved.
///
/// Solves the chain constraint `dest = b + l_b u(beta) + l_a u(beta +
/// theta_t)` for `beta` with `l_a >= 0`, which requires `|dest - b| >=
/// l_b |sin theta_t|`.
pub fn swing_target_angle(b: Point2, l_b: f64, theta_t: f64, dest: Point2) -> Option<f64> {
    let r = dest - b;
    let dist = r.norm();
    if dist < GEOM_EPS {
        return None;
    }
    let k = l_b * theta_t.sin() / dist;
    if k.abs() > 1.0 {
        return None;
    }
    let beta = r.angle() - theta_t + k.asin();
    // Reject configurations that would need a negative tip segment.
    let t = b + Point2::from_angle(beta) * l_b;
    if (dest - t).dot(Point2::from_angle(beta + theta_t)) < -GEOM_EPS {
        return None;
    }
    Some(normalize_angle(beta))
}

/// A body contact discovered during a rigid swing about the pre-turn
/// pivot.
#[derive(Clone, Copy, Debug)]
pub struct BodyCollision {
    pub vertex: usize,
    /// Pre-turn segment angle at the contact instant.
    pub beta: f64,
    /// True when the corner touches the pre-turn segment (within radius
    /// `l_b` of the pivot), false when it touches the tip-side segment.
    pub before_turn: bool,
}

/// First graph vertex the swinging body touches strictly between `beta0`
/// and `beta1` (measured in the rotation sense `rot`).
///
/// Corners within radius `l_b` of the pivot are hit by the pre-turn
/// segment when its angle sweeps past them; corners beyond are hit by the
/// tip-side segment, whose passage angle solves the same chain constraint
/// as [`swing_target_angle`].
#[allow(clippy::too_many_arguments)]
pub fn body_collision_during_pivot(
    graph: &VisibilityGraph,
    b: Point2,
    l_b: f64,
    theta_t: f64,
    beta0: f64,
    beta1: f64,
    rot: RotationSense,
    la_of_beta: &dyn Fn(f64) -> Option<f64>,
    exclude: &[usize],
) -> Option<BodyCollision> {
    let total = sweep_delta(beta0, beta1, rot);
    let mut best: Option<(f64, BodyCollision)> = None;
    for vid in 0..graph.len() {
        if exclude.contains(&vid) || !graph.kind(vid).is_obstacle_corner() {
            continue;
        }
        let x = graph.position(vid);
        let r = x - b;
        let d = r.norm();
        if d < GEOM_EPS {
            continue;
        }
        let candidate_beta = if d <= l_b {
            Some(r.angle())
        } else {
            let k = l_b * theta_t.sin() / d;
            if k.abs() > 1.0 {
                None
            } else {
                let beta = r.angle() - theta_t + k.asin();
                // The corner must lie on the tip segment, not its
                // extension beyond the wall.
                match la_of_beta(beta) {
                    Some(la) => {
                        let t = b + Point2::from_angle(beta) * l_b;
                        let proj = (x - t).dot(Point2::from_angle(beta + theta_t));
                        if proj > GEOM_EPS && proj < la - GEOM_EPS {
                            Some(beta)
                        } else {
                            None
                        }
                    }
                    None => None,
                }
            }
        };
        if let Some(beta) = candidate_beta {
            let delta = sweep_delta(beta0, beta, rot);
            if delta <= ANG_EPS || delta >= total - ANG_EPS {
                continue;
            }
            if best.as_ref().map_or(true, |(bd, _)| delta < *bd) {
                best = Some((
                    delta,
                    BodyCollision {
                        vertex: vid,
                        beta: normalize_angle(beta),
                        before_turn: d <= l_b,
                    },
                ));
            }
        }
    }
    best.map(|(_, c)| c)
}

/// Turn-point relocation for a friction-locked contact: the new turn
/// point lies on the circle of radius `l_b` about the pivot and on the
/// line through the pinned contact at the target contact angle. Returns
/// the point and the new tip-segment length, choosing the root that
/// minimizes turn-point travel while the total length does not decrease.
pub(super) fn fl_turn_point(
    b: Point2,
    l_b: f64,
    c0: Point2,
    wall_angle: f64,
    theta_real: f64,
    t_current: Point2,
    la_current: f64,
) -> Option<(Point2, f64)> {
    let back = normalize_angle(wall_angle - theta_real + PI);
    let (s1, s2) = line_circle_intersection(c0, back, b, l_b)?;
    let mut best: Option<(Point2, f64, f64)> = None;
    for s in [s1, s2] {
        if s <= GEOM_EPS || s < la_current - 1e-9 {
            continue;
        }
        let t = c0 + Point2::from_angle(back) * s;
        let travel = t.dist(t_current);
        if best.as_ref().map_or(true, |(_, _, bt)| travel < *bt) {
            best = Some((t, s, travel));
        }
    }
    best.map(|(t, s, _)| (t, s))
}

impl<'a> Sim<'a> {
    /// Tip-segment length when the pre-turn segment sits at `beta` and the
    /// tip rests on the line of `wall`.
    fn la_on_wall(&self, turn: &ActiveTurn, wall: &Segment, beta: f64) -> Option<f64> {
        let t = turn.pre_pivot + Point2::from_angle(beta) * turn.l_b;
        let dir = Point2::from_angle(beta + turn.angle);
        let w = wall.b - wall.a;
        let denom = dir.cross(w);
        if denom.abs() < GEOM_EPS {
            return None;
        }
        let s = (wall.a - t).cross(w) / denom;
        if s > GEOM_EPS {
            Some(s)
        } else {
            None
        }
    }

    pub(super) fn turning_edge_contact(
        &mut self,
        hit: Point2,
        wall: Segment,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let turn = self.turning.expect("turning contact without active turn");
        let theta_kin = ccw_delta(self.heading, wall.angle());
        match self.classify_turning(&turn, hit, theta_kin) {
            Morphology::PivotAtTurn => {
                // The fold becomes a permanent pivot; the contact is
                // re-resolved with straight kinematics from the turn point.
                self.turning = None;
                None
            }
            Morphology::PositivePivot => {
                let rot = pivot_rotation(Morphology::PositivePivot, turn.angle);
                self.execute_swing(&turn, hit, wall, rot)
            }
            Morphology::NegativePivot => {
                let rot = pivot_rotation(Morphology::NegativePivot, turn.angle);
                self.execute_swing(&turn, hit, wall, rot)
            }
            Morphology::FrictionLocked => self.execute_fl(&turn, hit, wall, theta_kin),
        }
    }

    pub(super) fn turning_vertex_contact(
        &mut self,
        info: CornerInfo,
        _dist: f64,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let turn = self.turning.expect("turning contact without active turn");
        let v = info.pos;
        let wall_out = Segment::new(v, info.next_pos);
        let wall_in = Segment::new(info.prev_pos, v);
        let theta_out = ccw_delta(self.heading, wall_out.angle());
        let theta_in = ccw_delta(self.heading, wall_in.angle());
        let m_out = self.classify_turning(&turn, v, theta_out);
        let m_in = self.classify_turning(&turn, v, theta_in);

        // A pivot morphology is actionable only when its rotation sense
        // can slide away from the corner along that wall.
        let out_ok = matches!(m_out, Morphology::PositivePivot | Morphology::NegativePivot)
            && pivot_rotation(m_out, turn.angle) == RotationSense::CounterClockwise;
        let in_ok = matches!(m_in, Morphology::PositivePivot | Morphology::NegativePivot)
            && pivot_rotation(m_in, turn.angle) == RotationSense::Clockwise;
        if out_ok {
            return self.execute_swing(&turn, v, wall_out, RotationSense::CounterClockwise);
        }
        if in_ok {
            return self.execute_swing(&turn, v, wall_in, RotationSense::Clockwise);
        }
        if m_out == Morphology::PivotAtTurn || m_in == Morphology::PivotAtTurn {
            self.turning = None;
            return None;
        }
        // Friction-locked against the more perpendicular wall.
        if (theta_out - PI / 2.0).abs() <= (theta_in - PI / 2.0).abs() {
            self.execute_fl(&turn, v, wall_out, theta_out)
        } else {
            self.execute_fl(&turn, v, wall_in, theta_in)
        }
    }

    /// Rigid swing about the pre-turn pivot (positive or negative pivot):
    /// the tip slides along the wall toward the endpoint in the rotation
    /// sense while the turn point rides the `l_b` circle.
    fn execute_swing(
        &mut self,
        turn: &ActiveTurn,
        c0: Point2,
        wall: Segment,
        rot: RotationSense,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let b = turn.pre_pivot;
        let t0 = self.graph.position(turn.t_id);
        let beta0 = (t0 - b).angle();
        let dest_pos = match rot {
            RotationSense::CounterClockwise => wall.b,
            RotationSense::Clockwise => wall.a,
        };
        let dest_id = self.graph.find_vertex(dest_pos, 1e-9);
        let Some(beta1) = swing_target_angle(b, turn.l_b, turn.angle, dest_pos) else {
            let base = turn.pre_base + turn.l_b + t0.dist(c0);
            return Some(self.finalize(c0, base, Termination::Stuck));
        };
        let total = sweep_delta(beta0, beta1, rot);
        if total >= PI {
            // Wrapping more than a half turn in one contact means the
            // geometry degenerated; treat as wedged.
            let base = turn.pre_base + turn.l_b + t0.dist(c0);
            return Some(self.finalize(c0, base, Termination::Stuck));
        }

        let turn_copy = *turn;
        let la = |beta: f64| self.la_on_wall(&turn_copy, &wall, beta);
        let mut exclude = vec![self.node, turn.t_id];
        if let Some(d) = dest_id {
            exclude.push(d);
        }
        if let Some(id) = self.graph.find_vertex(b, 1e-9) {
            exclude.push(id);
        }
        if let Some(id) = self.graph.find_vertex(c0, 1e-9) {
            exclude.push(id);
        }
        let collision = body_collision_during_pivot(
            &self.graph,
            b,
            turn.l_b,
            turn.angle,
            beta0,
            beta1,
            rot,
            &la,
            &exclude,
        );

        // Earliest among destination, body collision, exhaustion.
        let mut beta_end = beta1;
        let mut ending = SwingEnd::Destination;
        if let Some(c) = collision {
            if sweep_delta(beta0, c.beta, rot) < sweep_delta(beta0, beta_end, rot) {
                beta_end = c.beta;
                ending = SwingEnd::Body(c);
            }
        }
        let available = self.max_length - (turn.pre_base + turn.l_b);
        let la_end = la(beta_end);
        if la_end.map_or(true, |v| v > available) {
            // Bisect the swing for the angle where the tube runs out.
            let mut lo = 0.0f64;
            let mut hi = sweep_delta(beta0, beta_end, rot);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let beta = beta0 + rot.sign() * mid;
                match la(beta) {
                    Some(v) if v <= available => lo = mid,
                    _ => hi = mid,
                }
            }
            beta_end = beta0 + rot.sign() * lo;
            ending = SwingEnd::Exhausted;
        }

        let t_end = b + Point2::from_angle(beta_end) * turn.l_b;
        let tip_end = match la(beta_end) {
            Some(v) => t_end + Point2::from_angle(beta_end + turn.angle) * v,
            None => c0,
        };
        self.push_wall(c0, tip_end, wall.angle());
        self.push_swept(vec![b, t0, c0, tip_end, t_end]);
        self.trace.push(MotionPhase::TurnSwing {
            start_length: turn.pre_base + turn.l_b + t0.dist(c0),
            pivot: b,
            l_b: turn.l_b,
            turn_angle: turn.angle,
            wall_angle: wall.angle(),
            tip_start: c0,
            beta_start: beta0,
            beta_end,
        });
        self.update_turn_position(turn.t_id, t_end);

        match ending {
            SwingEnd::Exhausted => {
                Some(self.finalize(tip_end, self.max_length, Termination::LengthExhausted))
            }
            SwingEnd::Destination => {
                let base = turn.pre_base + turn.l_b + t_end.dist(dest_pos);
                let Some(dest_id) = dest_id else {
                    return Some(self.finalize(dest_pos, base, Termination::Stuck));
                };
                self.push_path(dest_pos, ShapeVertexKind::Pivot, base);
                self.node = dest_id;
                self.base = base;
                self.heading = normalize_angle(beta_end + turn.angle);
                self.turning = None; // fold now lies behind the new pivot
                None
            }
            SwingEnd::Body(c) => {
                let xpos = self.graph.position(c.vertex);
                if c.before_turn {
                    // Corner pressed the pre-turn segment: it becomes the
                    // new pre-turn pivot and the fold stays live.
                    let d = b.dist(xpos);
                    let base_x = turn.pre_base + d;
                    self.push_path(xpos, ShapeVertexKind::Pivot, base_x);
                    self.turning = Some(ActiveTurn {
                        t_id: turn.t_id,
                        angle: turn.angle,
                        pre_pivot: xpos,
                        pre_base: base_x,
                        l_b: turn.l_b - d,
                    });
                    self.node = turn.t_id;
                    self.base = turn.pre_base + turn.l_b;
                    self.heading = normalize_angle(beta_end + turn.angle);
                } else {
                    // Corner pressed the tip-side segment: the fold is
                    // shielded behind it from now on.
                    let base_x = turn.pre_base + turn.l_b + t_end.dist(xpos);
                    self.push_path(xpos, ShapeVertexKind::Pivot, base_x);
                    self.node = c.vertex;
                    self.base = base_x;
                    self.heading = normalize_angle(beta_end + turn.angle);
                    self.turning = None;
                }
                None
            }
        }
    }

    /// Friction-locked contact: the tip stays pinned at `c0` while growth
    /// buckles the body, migrating the turn point until the contact angle
    /// reaches the nearest regime boundary.
    fn execute_fl(
        &mut self,
        turn: &ActiveTurn,
        c0: Point2,
        wall: Segment,
        theta_kin: f64,
    ) -> Option<(DeploymentResult, Vec<MotionPhase>)> {
        let b = turn.pre_pivot;
        let t0 = self.graph.position(turn.t_id);
        let la_now = t0.dist(c0);
        let g = self.contact_geometry(turn, c0, theta_kin);
        let bounds = morphology_boundaries(&g);
        let theta_eff = g.theta_c;
        let theta_star_eff =
            if (bounds.pat_fl - theta_eff).abs() <= (bounds.fl_np - theta_eff).abs() {
                bounds.pat_fl
            } else {
                bounds.fl_np
            };
        let theta_real_target = if turn.angle >= 0.0 {
            theta_star_eff
        } else {
            PI - theta_star_eff
        };
        let wall_angle = wall.angle();

        let Some((t_target, la_target)) = fl_turn_point(
            b,
            turn.l_b,
            c0,
            wall_angle,
            theta_real_target,
            t0,
            la_now,
        ) else {
            // No real relocation: the buckle cannot evolve further.
            self.turning = None;
            let base = turn.pre_base + turn.l_b + la_now;
            return Some(self.finalize(c0, base, Termination::Stuck));
        };

        let available = self.max_length - (turn.pre_base + turn.l_b + la_now);
        let grows = la_target - la_now;
        if grows > available {
            // Partial buckle: bisect the contact angle for the length
            // budget, then stop.
            let mut lo = theta_kin;
            let mut hi = theta_real_target;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                match fl_turn_point(b, turn.l_b, c0, wall_angle, mid, t0, la_now) {
                    Some((_, la)) if la - la_now <= available => lo = mid,
                    _ => hi = mid,
                }
            }
            let (t_f, _) = fl_turn_point(b, turn.l_b, c0, wall_angle, lo, t0, la_now)
                .unwrap_or((t0, la_now));
            self.push_swept(vec![b, t0, c0, t_f]);
            self.trace.push(MotionPhase::FlBuckle {
                pivot: b,
                l_b: turn.l_b,
                turn_start: t0,
                contact: c0,
                wall_angle,
                theta_c_start: theta_kin,
                theta_c_end: lo,
                base_length: turn.pre_base + turn.l_b,
            });
            self.update_turn_position(turn.t_id, t_f);
            return Some(self.finalize(c0, self.max_length, Termination::LengthExhausted));
        }

        self.push_swept(vec![b, t0, c0, t_target]);
        self.trace.push(MotionPhase::FlBuckle {
            pivot: b,
            l_b: turn.l_b,
            turn_start: t0,
            contact: c0,
            wall_angle,
            theta_c_start: theta_kin,
            theta_c_end: theta_real_target,
            base_length: turn.pre_base + turn.l_b,
        });
        self.update_turn_position(turn.t_id, t_target);
        self.node = turn.t_id;
        self.base = turn.pre_base + turn.l_b;
        self.heading = normalize_angle(wall_angle - theta_real_target);
        // Still turning: the follow-up contact at the boundary angle
        // resolves into the neighboring regime.
        None
    }
}

fn pivot_rotation(m: Morphology, turn_angle: f64) -> RotationSense {
    let ccw_positive = turn_angle >= 0.0;
    match m {
        Morphology::PositivePivot => {
            if ccw_positive {
                RotationSense::CounterClockwise
            } else {
                RotationSense::Clockwise
            }
        }
        Morphology::NegativePivot => {
            if ccw_positive {
                RotationSense::Clockwise
            } else {
                RotationSense::CounterClockwise
            }
        }
        _ => unreachable!("pivot rotation queried for non-pivot morphology"),
    }
}

enum SwingEnd {
    Destination,
    Body(BodyCollision),
    Exhausted,
}

