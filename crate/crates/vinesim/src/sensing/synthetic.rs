//! Synthetic sensor streams sampled from simulator motion traces.
//!
//! Used to exercise the reconstruction pipeline against ground truth and
//! to produce realistic stream files without a physical robot.

use super::{LaunchPose, SensorSample, SensorStream, TurnPoint};
use crate::geometry::{ccw_delta, normalize_angle, Point2};
use crate::simulator::{DeploymentAction, MotionPhase};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Gaussian channel noise for synthesized streams.
#[derive(Clone, Copy, Debug, Default)]
pub struct StreamNoise {
    /// Angle channel standard deviation, rad.
    pub sigma_theta: f64,
    /// Length channel standard deviation, m.
    pub sigma_length: f64,
}

/// Sample a stream at uniform length increments `dl` from a motion trace.
///
/// Re-resolution spans in the trace overlap previously covered lengths;
/// a cursor over total length skips them so every emitted length is
/// strictly increasing.
pub fn stream_from_trace(
    trace: &[MotionPhase],
    action: &DeploymentAction,
    launch_position: Point2,
    dl: f64,
) -> SensorStream {
    let mut samples: Vec<SensorSample> = vec![SensorSample {
        length: 0.0,
        contact_angle: None,
    }];
    let mut cursor = 0.0f64;
    let mut next_l = dl;

    let emit_free = |from: f64, to: f64, samples: &mut Vec<SensorSample>, next_l: &mut f64| {
        while *next_l <= to + 1e-12 {
            if *next_l > from - 1e-12 {
                samples.push(SensorSample {
                    length: *next_l,
                    contact_angle: None,
                });
            }
            *next_l += dl;
        }
    };

    for phase in trace {
        match phase {
            MotionPhase::Free {
                start_length,
                length,
                ..
            } => {
                let end = start_length + length;
                if end <= cursor + 1e-12 {
                    continue; // re-traced span
                }
                let from = cursor.max(*start_length);
                emit_free(from, end, &mut samples, &mut next_l);
                cursor = end;
            }
            MotionPhase::TurnInserted { .. } | MotionPhase::StuckContact { .. } => {}
            MotionPhase::Slide {
                start_length,
                pivot,
                wall_angle,
                tip_start,
                tip_end,
            } => {
                let chord0 = pivot.dist(*tip_start);
                let arc_pivot = start_length - chord0;
                let end = arc_pivot + pivot.dist(*tip_end);
                if end <= cursor + 1e-12 {
                    continue;
                }
                let u = (*tip_end - *tip_start).normalized();
                while next_l <= end + 1e-12 {
                    if next_l > cursor - 1e-12 && next_l > *start_length - 1e-12 {
                        let c = next_l - arc_pivot;
                        // Point on the wall at chord distance c.
                        let rel = *tip_start - *pivot;
                        let b = 2.0 * rel.dot(u);
                        let cc = rel.dot(rel) - c * c;
                        let disc = (b * b - 4.0 * cc).max(0.0);
                        let s = (-b + disc.sqrt()) / 2.0;
                        let tip = *tip_start + u * s;
                        let chord_dir = (tip - *pivot).angle();
                        let theta = ccw_delta(chord_dir, *wall_angle);
                        samples.push(SensorSample {
                            length: next_l,
                            contact_angle: Some(theta),
                        });
                    }
                    next_l += dl;
                }
                cursor = end;
            }
            MotionPhase::TurnSwing {
                start_length,
                pivot,
                l_b,
                turn_angle,
                wall_angle,
                tip_start,
                beta_start,
                beta_end,
            } => {
                let la = |beta: f64| -> Option<f64> {
                    let t = *pivot + Point2::from_angle(beta) * *l_b;
                    let dir = Point2::from_angle(beta + turn_angle);
                    let w = Point2::from_angle(*wall_angle);
                    let denom = dir.cross(w);
                    if denom.abs() < 1e-12 {
                        return None;
                    }
                    let s = (*tip_start - t).cross(w) / denom;
                    (s > 0.0).then_some(s)
                };
                let la0 = la(*beta_start).unwrap_or(0.0);
                let base = start_length - la0;
                let sweep = crate::geometry::angle_diff(*beta_start, *beta_end);
                let end = base + la(*beta_end).unwrap_or(la0);
                if end <= cursor + 1e-12 {
                    continue;
                }
                while next_l <= end + 1e-12 {
                    if next_l > cursor - 1e-12 && next_l > *start_length - 1e-12 {
                        // Bisect beta for the requested length.
                        let target = next_l - base;
                        let mut lo = 0.0f64;
                        let mut hi = 1.0f64;
                        for _ in 0..60 {
                            let mid = 0.5 * (lo + hi);
                            match la(beta_start + sweep * mid) {
                                Some(v) if v < target => lo = mid,
                                _ => hi = mid,
                            }
                        }
                        let beta = beta_start + sweep * lo;
                        let theta = ccw_delta(normalize_angle(beta + turn_angle), *wall_angle);
                        samples.push(SensorSample {
                            length: next_l,
                            contact_angle: Some(theta),
                        });
                    }
                    next_l += dl;
                }
                cursor = end;
            }
            MotionPhase::FlBuckle {
                pivot,
                l_b,
                turn_start,
                contact,
                wall_angle,
                theta_c_start,
                theta_c_end,
                base_length,
            } => {
                // March the contact angle, tracking lengths via the
                // turn-point relocation, then resample uniformly.
                let steps = 128usize;
                let mut table: Vec<(f64, f64)> = Vec::with_capacity(steps + 1);
                let mut t_cur = *turn_start;
                let mut la_cur = turn_start.dist(*contact);
                table.push((base_length + la_cur, *theta_c_start));
                for k in 1..=steps {
                    let theta = theta_c_start
                        + (theta_c_end - theta_c_start) * (k as f64 / steps as f64);
                    if let Some((t_new, la_new)) = super::track_fl_turn_point(
                        *pivot,
                        *l_b,
                        *contact,
                        *wall_angle,
                        theta,
                        t_cur,
                        la_cur,
                    ) {
                        t_cur = t_new;
                        la_cur = la_new;
                    }
                    table.push((base_length + la_cur, theta));
                }
                let end = table.last().unwrap().0;
                if end <= cursor + 1e-12 {
                    continue;
                }
                while next_l <= end + 1e-12 {
                    if next_l > cursor - 1e-12 {
                        // Interpolate theta at this length.
                        let theta = interp(&table, next_l);
                        samples.push(SensorSample {
                            length: next_l,
                            contact_angle: Some(theta),
                        });
                    }
                    next_l += dl;
                }
                cursor = end;
            }
        }
    }

    SensorStream {
        samples,
        launch: LaunchPose {
            position: launch_position,
            angle: action.launch_angle,
        },
        turn: action.turn.as_ref().map(|t| TurnPoint {
            arc_length: t.fraction * action.max_length,
            angle: t.angle,
        }),
    }
}

fn interp(table: &[(f64, f64)], l: f64) -> f64 {
    if l <= table[0].0 {
        return table[0].1;
    }
    for w in table.windows(2) {
        if l <= w[1].0 {
            let span = (w[1].0 - w[0].0).max(1e-15);
            let t = (l - w[0].0) / span;
            return w[0].1 + t * (w[1].1 - w[0].1);
        }
    }
    table.last().unwrap().1
}

/// Apply Gaussian noise to a stream: angle jitter plus length jitter with
/// monotonicity restored by a running maximum.
pub fn add_noise<R: Rng>(stream: &SensorStream, noise: &StreamNoise, rng: &mut R) -> SensorStream {
    let angle_dist = Normal::new(0.0, noise.sigma_theta.max(1e-15)).unwrap();
    let len_dist = Normal::new(0.0, noise.sigma_length.max(1e-15)).unwrap();
    let mut out = stream.clone();
    let mut running = 0.0f64;
    for s in &mut out.samples {
        if noise.sigma_length > 0.0 {
            s.length = (s.length + len_dist.sample(rng)).max(0.0);
        }
        running = running.max(s.length);
        s.length = running;
        if noise.sigma_theta > 0.0 {
            if let Some(a) = s.contact_angle.as_mut() {
                *a += angle_dist.sample(rng);
            }
        }
    }
    out
}
