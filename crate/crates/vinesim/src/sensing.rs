//! Sensing inversion: reconstruct wall contacts, pivot changes, and the
//! robot shape from tip sensor streams of (total length, contact angle).
//!
//! The robot's passive deformation is predictable enough that these two
//! scalar channels, plus the known launch pose and turn specification,
//! recover where every contacted wall lies. Contact angles are measured
//! counter-clockwise from the tip growth direction, the same convention
//! the simulator uses.

pub mod synthetic;

use crate::geometry::{line_circle_intersection, normalize_angle, Point2, Polygon};
use crate::kinematics::{classify_morphology, ContactGeometry, Morphology, DEFAULT_MU};
use crate::simulator::{RobotShape, ShapeVertexKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensingError {
    #[error("stream lengths must be non-decreasing (sample {index})")]
    DecreasingLength { index: usize },
    #[error("pivot update ill-conditioned at sample {index}")]
    IllConditionedPivot { index: usize },
}

/// One tip sensor reading. A contact angle is present exactly when the
/// tip is pressing a wall.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    /// Total robot length, m.
    pub length: f64,
    /// Contact angle, rad, CCW from growth direction; None without contact.
    pub contact_angle: Option<f64>,
}

impl SensorSample {
    pub fn in_contact(&self) -> bool {
        self.contact_angle.is_some()
    }
}

/// Launch pose the stream is measured relative to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaunchPose {
    pub position: Point2,
    pub angle: f64,
}

/// Known discrete-turn specification: arc position along the robot and
/// signed fold angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnPoint {
    pub arc_length: f64,
    pub angle: f64,
}

/// An ordered tip sensor stream with its deployment context.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SensorStream {
    pub samples: Vec<SensorSample>,
    pub launch: LaunchPose,
    pub turn: Option<TurnPoint>,
}

impl SensorStream {
    pub fn validate(&self) -> Result<(), SensingError> {
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1].length < w[0].length - 1e-12 {
                return Err(SensingError::DecreasingLength { index: i + 1 });
            }
        }
        Ok(())
    }
}

/// A reconstructed wall sample: a point on the wall and the wall's line
/// angle in [0, pi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallPoint {
    pub point: Point2,
    pub wall_angle: f64,
}

/// Everything recovered from one stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reconstruction {
    pub wall_points: Vec<WallPoint>,
    pub pivots: Vec<Point2>,
    pub shape: RobotShape,
    pub swept: Vec<Polygon>,
}

/// Tuning for the reconstruction pipeline.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SensingParams {
    pub mu: f64,
    /// Robot radius, used for morphology classification.
    pub radius: f64,
    /// Zero-phase moving-average window over the angle channel.
    pub filter_window: usize,
    /// Pivot-change detector: jump in d(theta)/dL between adjacent
    /// windows that flags a new pivot, rad per meter.
    pub slope_jump_threshold: f64,
    /// Contact gaps up to this many samples are bridged.
    pub gap_bridge: usize,
}

impl Default for SensingParams {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            radius: 0.0323,
            // 2 degrees per centimeter over the filter-window baseline,
            // calibrated on synthetic noisy streams.
            slope_jump_threshold: 2.0f64.to_radians() / 0.01,
            filter_window: 5,
            gap_bridge: 2,
        }
    }
}

/// First contact point of a straight segment: `b + l * u(theta_b)`.
pub fn first_contact_point(b: Point2, theta_b: f64, l: f64) -> Point2 {
    b + Point2::from_angle(theta_b) * l
}

/// Contact point while the tip slides and the body pivots about `b`: the
/// chord direction rotates by the drop in contact angle.
pub fn sliding_contact_point(
    b: Point2,
    theta_b: f64,
    theta_c0: f64,
    theta_ci: f64,
    l_i: f64,
) -> Point2 {
    b + Point2::from_angle(theta_b + theta_c0 - theta_ci) * l_i
}

/// Distance from a newly discovered pivot to the tip at the moment the
/// body wrapped onto it, from two (length, angle) readings bracketing the
/// wrap.
///
/// Sine rule in the pivot-tip-tip triangle; the angle terms both use the
/// tangent-referenced contact angle.
pub fn pivot_offset(l_i: f64, l_o: f64, theta_ci: f64, theta_co: f64) -> Result<f64, SensingError> {
    let den = theta_co.sin() - theta_ci.sin();
    if den.abs() < 1e-9 {
        return Err(SensingError::IllConditionedPivot { index: 0 });
    }
    Ok((l_i - l_o) * theta_ci.sin() / den)
}

/// Location of the new pivot: `delta` short of the tip along the chord.
pub fn new_pivot_location(b: Point2, theta_b: f64, l: f64, delta: f64) -> Point2 {
    b + Point2::from_angle(theta_b) * (l - delta)
}

/// First contact of a two-segment (turned) robot.
pub fn turn_first_contact(b: Point2, theta_b: f64, l_b: f64, l_a: f64, theta_t: f64) -> Point2 {
    b + Point2::from_angle(theta_b) * l_b + Point2::from_angle(theta_b + theta_t) * l_a
}

/// Wall line angle from the measured contact angle, folded into [0, pi).
pub fn wall_angle(theta_c: f64, theta_t: f64, theta_b: f64) -> f64 {
    let mut a = normalize_angle(theta_c + theta_t + theta_b);
    if a >= PI {
        a -= PI;
    }
    a
}

/// Pivot-at-turn: the fold becomes the pivot for the rest of the episode.
pub fn reconstruct_pat_pivot(b: Point2, theta_b: f64, l_b: f64) -> Point2 {
    b + Point2::from_angle(theta_b) * l_b
}

/// Contact point while a turned robot swings rigidly about `b` (positive
/// or negative pivot): the pre-turn angle follows the measured contact
/// angle and the tip sits one post-turn segment along the wall-referenced
/// direction.
pub fn reconstruct_pivot_contact(
    b: Point2,
    l_b: f64,
    l_a_i: f64,
    theta_w: f64,
    theta_t: f64,
    theta_ci: f64,
) -> Point2 {
    let theta_b_i = theta_w - theta_ci - theta_t;
    b + Point2::from_angle(theta_b_i) * l_b + Point2::from_angle(theta_w - theta_ci) * l_a_i
}

/// Friction-locked turn-point tracking: intersect the circle of radius
/// `l_b` about `b` with the line through the pinned contact at the
/// measured angle; keep the root that moves the turn point least while
/// the total length does not shrink.
pub fn track_fl_turn_point(
    b: Point2,
    l_b: f64,
    c_o: Point2,
    theta_w: f64,
    theta_ci: f64,
    t_current: Point2,
    la_current: f64,
) -> Option<(Point2, f64)> {
    let back = normalize_angle(theta_w - theta_ci + PI);
    let (s1, s2) = line_circle_intersection(c_o, back, b, l_b)?;
    let mut best: Option<(Point2, f64, f64)> = None;
    for s in [s1, s2] {
        if s <= 1e-12 || s < la_current - 1e-9 {
            continue;
        }
        let t = c_o + Point2::from_angle(back) * s;
        let travel = t.dist(t_current);
        if best.as_ref().map_or(true, |(_, _, bt)| travel < *bt) {
            best = Some((t, s, travel));
        }
    }
    best.map(|(t, s, _)| (t, s))
}

/// Zero-phase moving average over the contact-angle channel within each
/// contact run; lengths and contact flags are untouched.
pub fn lowpass_filter(stream: &SensorStream, window: usize) -> SensorStream {
    if window <= 1 {
        return stream.clone();
    }
    let half = window / 2;
    let n = stream.samples.len();
    let mut out = stream.clone();
    for i in 0..n {
        if stream.samples[i].contact_angle.is_none() {
            continue;
        }
        let mut sum = 0.0;
        let mut count = 0usize;
        for j in i.saturating_sub(half)..(i + half + 1).min(n) {
            // Only average within the same contact run.
            let lo = j.min(i);
            let hi = j.max(i);
            if (lo..=hi).all(|k| stream.samples[k].contact_angle.is_some()) {
                sum += stream.samples[j].contact_angle.unwrap();
                count += 1;
            }
        }
        out.samples[i].contact_angle = Some(sum / count as f64);
    }
    out
}

/// Index of a pivot change within a window of contact samples: the first
/// sample where the slope of contact angle against length, estimated over
/// `baseline` samples on each side, jumps by more than `threshold`
/// (rad/m). Returns None when the derivative stays continuous.
pub fn detect_pivot_change(
    samples: &[(f64, f64)], // (length, contact angle)
    threshold: f64,
    baseline: usize,
) -> Option<usize> {
    let k = baseline.max(1);
    if samples.len() < 2 * k + 1 {
        return None;
    }
    let jump_at = |i: usize| -> Option<f64> {
        let (l0, a0) = samples[i - k];
        let (l1, a1) = samples[i];
        let (l2, a2) = samples[i + k];
        let d0 = l1 - l0;
        let d1 = l2 - l1;
        if d0 < 1e-9 || d1 < 1e-9 {
            return None;
        }
        Some(((a2 - a1) / d1 - (a1 - a0) / d0).abs())
    };
    for i in k..samples.len() - k {
        match jump_at(i) {
            Some(j) if j > threshold => {
                // The slope difference trips as soon as one window spans
                // the kink; the kink itself maximizes the jump.
                let hi = (i + 2 * k).min(samples.len() - k - 1);
                let best = (i..=hi)
                    .filter_map(|j| jump_at(j).map(|v| (j, v)))
                    .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .map(|(j, _)| j)
                    .unwrap_or(i);
                return Some(best);
            }
            _ => {}
        }
    }
    None
}

/// Reconstruct walls, pivots, shape, and swept regions from a stream.
///
/// The pipeline filters the angle channel, splits the stream into contact
/// episodes (bridging short dropouts), classifies turned episodes by
/// morphology using the known turn specification, applies the matching
/// inversion per episode, and watches straight slides for the slope
/// discontinuities that betray a new pivot.
pub fn reconstruct(stream: &SensorStream, params: &SensingParams) -> Result<Reconstruction, SensingError> {
    stream.validate()?;
    let filtered = lowpass_filter(stream, params.filter_window);
    let samples = bridge_gaps(&filtered.samples, params.gap_bridge);

    let mut rec = Recon {
        params: *params,
        turn: filtered.turn,
        b: filtered.launch.position,
        theta_b: filtered.launch.angle,
        base: 0.0,
        turn_state: TurnState::Pending,
        wall_points: Vec::new(),
        pivots: Vec::new(),
        shape_path: vec![(filtered.launch.position, ShapeVertexKind::Launch)],
        swept: Vec::new(),
        tip: filtered.launch.position,
        tip_len: 0.0,
    };
    if filtered.turn.is_none() {
        rec.turn_state = TurnState::Consumed;
    }

    // Split into episodes of contiguous contact.
    let mut i = 0usize;
    while i < samples.len() {
        if samples[i].contact_angle.is_some() {
            let start = i;
            while i < samples.len() && samples[i].contact_angle.is_some() {
                i += 1;
            }
            rec.process_episode(&samples[start..i]);
        } else {
            rec.free_to(samples[i].length);
            i += 1;
        }
    }
    if let Some(last) = samples.last() {
        rec.free_to(last.length);
    }

    let mut vertices = rec.shape_path;
    let tip = rec.tip;
    if vertices
        .last()
        .map_or(true, |(p, _)| p.dist(tip) > 1e-12)
    {
        vertices.push((tip, ShapeVertexKind::Tip));
    } else if let Some(last) = vertices.last_mut() {
        last.1 = ShapeVertexKind::Tip;
    }
    Ok(Reconstruction {
        wall_points: rec.wall_points,
        pivots: rec.pivots,
        shape: RobotShape { vertices },
        swept: rec.swept,
    })
}

fn bridge_gaps(samples: &[SensorSample], gap: usize) -> Vec<SensorSample> {
    let mut out = samples.to_vec();
    if gap == 0 {
        return out;
    }
    let n = out.len();
    let mut i = 0;
    while i < n {
        if out[i].contact_angle.is_none() {
            let start = i;
            while i < n && out[i].contact_angle.is_none() {
                i += 1;
            }
            let run = i - start;
            if run <= gap && start > 0 && i < n {
                let a0 = samples[start - 1].contact_angle.unwrap();
                let a1 = samples[i].contact_angle.unwrap();
                for (k, slot) in out[start..i].iter_mut().enumerate() {
                    let t = (k + 1) as f64 / (run + 1) as f64;
                    slot.contact_angle = Some(a0 + t * (a1 - a0));
                }
            }
        } else {
            i += 1;
        }
    }
    out
}

enum TurnState {
    /// Fold not yet deployed.
    Pending,
    /// Fold deployed in free space; next contact is a turned contact.
    Deployed { t: Point2, l_b: f64 },
    /// Fold behind a pivot; contacts are straight.
    Consumed,
}

struct Recon {
    params: SensingParams,
    turn: Option<TurnPoint>,
    /// Current pivot.
    b: Point2,
    /// Chord direction from the pivot.
    theta_b: f64,
    /// Arc length consumed up to the pivot.
    base: f64,
    turn_state: TurnState,
    wall_points: Vec<WallPoint>,
    pivots: Vec<Point2>,
    shape_path: Vec<(Point2, ShapeVertexKind)>,
    swept: Vec<Polygon>,
    tip: Point2,
    tip_len: f64,
}

impl Recon {
    /// Advance free growth to total length `l`, deploying the fold if its
    /// arc position is crossed.
    fn free_to(&mut self, l: f64) {
        if l <= self.tip_len {
            return;
        }
        if let (TurnState::Pending, Some(turn)) = (&self.turn_state, self.turn) {
            if turn.arc_length > self.base && turn.arc_length <= l {
                let l_b = turn.arc_length - self.base;
                let t = first_contact_point(self.b, self.theta_b, l_b);
                self.shape_path.push((t, ShapeVertexKind::Turn));
                self.turn_state = TurnState::Deployed { t, l_b };
                self.tip = first_contact_point(t, self.theta_b + turn.angle, l - turn.arc_length);
                self.tip_len = l;
                return;
            }
        }
        match self.turn_state {
            TurnState::Deployed { t, .. } => {
                let turn = self.turn.unwrap();
                self.tip =
                    first_contact_point(t, self.theta_b + turn.angle, l - turn.arc_length);
            }
            _ => {
                self.tip = first_contact_point(self.b, self.theta_b, l - self.base);
            }
        }
        self.tip_len = l;
    }

    fn push_wall(&mut self, point: Point2, wall: f64) {
        let mut a = normalize_angle(wall);
        if a >= PI {
            a -= PI;
        }
        self.wall_points.push(WallPoint {
            point,
            wall_angle: a,
        });
    }

    fn push_sweep(&mut self, a: Point2, b: Point2, c: Point2) {
        if let Ok(tri) = Polygon::new(vec![a, b, c]) {
            if tri.area() > 1e-12 {
                self.swept.push(tri);
            }
        }
    }

    fn new_pivot(&mut self, p: Point2, theta: f64, base: f64, kind: ShapeVertexKind) {
        self.b = p;
        self.theta_b = theta;
        self.base = base;
        self.pivots.push(p);
        if self
            .shape_path
            .last()
            .map_or(true, |(q, _)| q.dist(p) > 1e-9)
        {
            self.shape_path.push((p, kind));
        }
    }

    fn process_episode(&mut self, episode: &[SensorSample]) {
        if episode.is_empty() {
            return;
        }
        let l0 = episode[0].length;
        self.free_to(l0);
        // Decide whether this contact involves the live fold.
        let turned = matches!(self.turn_state, TurnState::Deployed { .. });
        if turned {
            self.process_turned_episode(episode);
        } else {
            self.process_straight_episode(episode, None);
        }
    }

    /// Straight-pivot episode: Eq-16-style sliding with pivot-change
    /// detection. `initial` carries (theta_c0, chord direction at start)
    /// when continuing after a morphology transition.
    fn process_straight_episode(&mut self, episode: &[SensorSample], initial: Option<(f64, f64)>) {
        let mut theta_c0;
        let mut chord0;
        match initial {
            Some((tc0, dir)) => {
                theta_c0 = tc0;
                chord0 = dir;
            }
            None => {
                theta_c0 = episode[0].contact_angle.unwrap();
                chord0 = self.theta_b;
                let l0 = episode[0].length;
                let c0 = first_contact_point(self.b, self.theta_b, l0 - self.base);
                self.push_wall(c0, chord0 + theta_c0);
                self.tip = c0;
                self.tip_len = l0;
            }
        }

        let series: Vec<(f64, f64)> =
            episode.iter().map(|s| (s.length, s.contact_angle.unwrap())).collect();
        let baseline = self.params.filter_window.max(2);
        let mut start = 0usize;
        loop {
            let window = &series[start..];
            let change =
                detect_pivot_change(window, self.params.slope_jump_threshold, baseline);
            let end = change.map(|c| start + c).unwrap_or(series.len() - 1);
            // Slide from `start` to `end` about the current pivot.
            let mut prev_tip = self.tip;
            for &(l, theta) in &series[start..=end] {
                let chord_dir = chord0 + theta_c0 - theta;
                let c = sliding_contact_point(self.b, chord0, theta_c0, theta, l - self.base);
                self.push_wall(c, chord_dir + theta);
                self.push_sweep(self.b, prev_tip, c);
                prev_tip = c;
                self.tip = c;
                self.tip_len = l;
            }
            let Some(c) = change else { break };
            // Pivot change at series[start + c]: locate the new pivot
            // from a well-conditioned later sample. The chord through the
            // old pivot and the wrap-instant tip also passes through the
            // new pivot.
            let o = start + c;
            let (l_o, th_o) = series[o];
            let chord_dir = chord0 + theta_c0 - th_o;
            // Farther samples condition the triangle better: the offset
            // error scales with the sample spacing over the sine gap.
            let bracket = series[(o + 1)..]
                .iter()
                .find(|(l_i, th_i)| {
                    *l_i > l_o + 1e-9 && (th_o.sin() - th_i.sin()).abs() >= 0.12
                })
                .or_else(|| {
                    series[(o + 1)..]
                        .iter()
                        .rev()
                        .find(|(l_i, th_i)| {
                            *l_i > l_o + 1e-9 && (th_o.sin() - th_i.sin()).abs() >= 0.02
                        })
                });
            if let Some(&(l_i, th_i)) = bracket {
                if let Ok(delta) = pivot_offset(l_i, l_o, th_i, th_o) {
                    if delta >= -1e-6 && delta < l_o - self.base {
                        let b_new =
                            new_pivot_location(self.b, chord_dir, l_o - self.base, delta);
                        self.new_pivot(b_new, chord_dir, l_o - delta, ShapeVertexKind::Pivot);
                        chord0 = chord_dir;
                        theta_c0 = th_o;
                    }
                }
            }
            start = o + 1;
            if start + 1 >= series.len() {
                break;
            }
        }
        // Leaving the wall: the final contact point acts as the next pivot.
        let end_dir = chord0 + theta_c0 - series.last().unwrap().1;
        let tip = self.tip;
        let tip_len = self.tip_len;
        self.new_pivot(tip, end_dir, tip_len, ShapeVertexKind::Pivot);
    }

    fn process_turned_episode(&mut self, episode: &[SensorSample]) {
        let TurnState::Deployed { t, l_b } = self.turn_state else {
            unreachable!()
        };
        let turn = self.turn.unwrap();
        let l0 = episode[0].length;
        let theta_c0 = episode[0].contact_angle.unwrap();
        let l_a0 = (l0 - turn.arc_length).max(1e-6);
        let c0 = turn_first_contact(self.b, self.theta_b, l_b, l_a0, turn.angle);
        let theta_w = wall_angle(theta_c0, turn.angle, self.theta_b);
        self.push_wall(c0, theta_w);
        self.tip = c0;
        self.tip_len = l0;

        // Morphology from the measured first contact.
        let theta_eff = if turn.angle >= 0.0 {
            theta_c0
        } else {
            PI - theta_c0
        };
        let geometry = ContactGeometry::new(
            theta_eff.clamp(1e-6, PI - 1e-6),
            turn.angle.abs(),
            l_a0,
            l_b,
            self.params.mu,
            self.params.radius,
        );
        let morphology =
            classify_morphology(&geometry).unwrap_or(Morphology::FrictionLocked);
        // The wall line angle used by the pivot equations must be the
        // un-folded variant consistent with theta_c: chord + theta_c.
        let theta_w_raw = normalize_angle(self.theta_b + turn.angle + theta_c0);

        match morphology {
            Morphology::PivotAtTurn => {
                let t_pivot = reconstruct_pat_pivot(self.b, self.theta_b, l_b);
                debug_assert!(t_pivot.dist(t) < 1e-9);
                self.new_pivot(t_pivot, self.theta_b + turn.angle, turn.arc_length, ShapeVertexKind::Turn);
                self.turn_state = TurnState::Consumed;
                self.process_straight_episode(episode, None);
            }
            Morphology::PositivePivot | Morphology::NegativePivot => {
                self.turned_swing_episode(episode, l_b, theta_w_raw, turn.angle, t);
            }
            Morphology::FrictionLocked => {
                self.turned_fl_episode(episode, l_b, theta_w_raw, turn.angle, c0, t, l_a0);
            }
        }
    }

    /// Positive/negative pivot: rigid swing about the pre-turn pivot.
    fn turned_swing_episode(
        &mut self,
        episode: &[SensorSample],
        l_b: f64,
        theta_w_raw: f64,
        theta_t: f64,
        t_start: Point2,
    ) {
        let turn = self.turn.unwrap();
        let mut t_last = t_start;
        let mut prev_tip = self.tip;
        let mut last_theta = episode[0].contact_angle.unwrap();
        for s in episode {
            let theta = s.contact_angle.unwrap();
            let l_a = (s.length - turn.arc_length).max(1e-6);
            let c = reconstruct_pivot_contact(self.b, l_b, l_a, theta_w_raw, theta_t, theta);
            self.push_wall(c, theta_w_raw);
            let theta_b_i = theta_w_raw - theta - theta_t;
            t_last = self.b + Point2::from_angle(theta_b_i) * l_b;
            self.push_sweep(self.b, prev_tip, c);
            prev_tip = c;
            self.tip = c;
            self.tip_len = s.length;
            last_theta = theta;
        }
        // The fold ends somewhere behind the final tip; record it and
        // treat the rest of the growth as straight from the wall exit.
        if let Some(slot) = self
            .shape_path
            .iter_mut()
            .rev()
            .find(|(_, k)| *k == ShapeVertexKind::Turn)
        {
            slot.0 = t_last;
        }
        self.pivots.push(t_last);
        let exit_dir = theta_w_raw - last_theta;
        let tip = self.tip;
        let tip_len = self.tip_len;
        self.new_pivot(tip, exit_dir, tip_len, ShapeVertexKind::Pivot);
        self.turn_state = TurnState::Consumed;
    }

    /// Friction-locked: tip pinned, turn point migrating, transitioning
    /// into a neighboring regime when the angle crosses a boundary.
    #[allow(clippy::too_many_arguments)]
    fn turned_fl_episode(
        &mut self,
        episode: &[SensorSample],
        l_b: f64,
        theta_w_raw: f64,
        theta_t: f64,
        c0: Point2,
        t_start: Point2,
        l_a0: f64,
    ) {
        let turn = self.turn.unwrap();
        let mut t_cur = t_start;
        let mut la_cur = l_a0;
        let mut idx = 0usize;
        // Boundaries are fixed from the contact-time geometry, matching
        // the forward model: the buckle runs until the measured angle
        // crosses the nearest one.
        let g0 = ContactGeometry::new(
            {
                let first = episode[0].contact_angle.unwrap();
                let eff = if theta_t >= 0.0 { first } else { PI - first };
                eff.clamp(1e-6, PI - 1e-6)
            },
            theta_t.abs(),
            l_a0.max(1e-6),
            l_b,
            self.params.mu,
            self.params.radius,
        );
        let bounds = crate::kinematics::morphology_boundaries(&g0);
        while idx < episode.len() {
            let theta = episode[idx].contact_angle.unwrap();
            let theta_eff = if theta_t >= 0.0 { theta } else { PI - theta };
            if theta_eff <= bounds.pat_fl {
                // Transition into pivot-at-turn at the migrated fold. The
                // continuation angle is re-derived from the wall line so
                // the chord and contact angle stay consistent.
                if let Some(slot) = self
                    .shape_path
                    .iter_mut()
                    .rev()
                    .find(|(_, k)| *k == ShapeVertexKind::Turn)
                {
                    slot.0 = t_cur;
                }
                let dir = (c0 - t_cur).angle();
                self.new_pivot(t_cur, dir, turn.arc_length, ShapeVertexKind::Turn);
                self.turn_state = TurnState::Consumed;
                let tc0 = crate::geometry::ccw_delta(dir, theta_w_raw);
                self.process_straight_episode(&episode[idx..], Some((tc0, dir)));
                return;
            }
            if theta_eff >= bounds.fl_np {
                // Transition into a rigid swing.
                if let Some(slot) = self
                    .shape_path
                    .iter_mut()
                    .rev()
                    .find(|(_, k)| *k == ShapeVertexKind::Turn)
                {
                    slot.0 = t_cur;
                }
                self.turned_swing_episode(&episode[idx..], l_b, theta_w_raw, theta_t, t_cur);
                return;
            }
            if let Some((t_new, la_new)) =
                track_fl_turn_point(self.b, l_b, c0, theta_w_raw, theta, t_cur, la_cur)
            {
                self.push_sweep(self.b, t_cur, t_new);
                t_cur = t_new;
                la_cur = la_new;
            }
            self.tip = c0;
            self.tip_len = episode[idx].length;
            idx += 1;
        }
        // Episode ended while locked: fold stays where it migrated to.
        if let Some(slot) = self
            .shape_path
            .iter_mut()
            .rev()
            .find(|(_, k)| *k == ShapeVertexKind::Turn)
        {
            slot.0 = t_cur;
        }
        self.pivots.push(t_cur);
        let tip = self.tip;
        let tip_len = self.tip_len;
        self.new_pivot(tip, (c0 - t_cur).angle(), tip_len, ShapeVertexKind::Pivot);
        self.turn_state = TurnState::Consumed;
    }
}
