//! Closed-form contact mechanics for an inflated-beam robot pressing a wall.
//!
//! A growing tube that collides with a wall either pivots about an upstream
//! bend or buckles in place, and a tube with one discrete turn splits into
//! four post-collision behaviors ([`Morphology`]). The boundaries between
//! those behaviors are critical contact angles derived from quasi-static
//! moment balances at the last pivot and at the turn.
//!
//! Angle conventions: the contact angle `theta_c` is measured
//! counter-clockwise from the tip growth direction to the wall tangent,
//! with the wall tangent oriented so the obstacle interior lies on its
//! right (the clockwise vertex order of obstacle polygons). A
//! perpendicular hit is `theta_c = pi/2`; shallow forward grazes approach
//! 0. The turn angle `theta_t` is non-negative here; callers with
//! clockwise turns mirror the geometry first.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Friction coefficient measured for the physical robot; the default used
/// throughout the simulator and planner.
pub const DEFAULT_MU: f64 = 0.3;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("no static solution: contact angle {theta_c:.4} rad lies inside the friction cone")]
    FrictionCone { theta_c: f64 },
    #[error("morphology boundaries out of order for this geometry ({b1:.4}, {b2:.4}, {b3:.4})")]
    DegenerateClassification { b1: f64, b2: f64, b3: f64 },
}

/// Inflated-tube material and pressure parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeParams {
    /// Internal pressure, Pa.
    pub pressure: f64,
    /// Tube radius, m.
    pub radius: f64,
    /// Wall thickness, m.
    pub wall_thickness: f64,
    /// Elastic modulus of the wall material, Pa.
    pub elastic_modulus: f64,
    /// Shear modulus of the wall material, Pa.
    pub shear_modulus: f64,
}

impl TubeParams {
    pub fn new(
        pressure: f64,
        radius: f64,
        wall_thickness: f64,
        elastic_modulus: f64,
        shear_modulus: f64,
    ) -> Self {
        assert!(
            pressure > 0.0
                && radius > 0.0
                && wall_thickness > 0.0
                && elastic_modulus > 0.0
                && shear_modulus > 0.0,
            "tube parameters must be strictly positive"
        );
        Self {
            pressure,
            radius,
            wall_thickness,
            elastic_modulus,
            shear_modulus,
        }
    }
}

/// Geometry of a single wall contact for a robot with one discrete turn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactGeometry {
    /// Contact angle at the tip, rad, in (0, pi).
    pub theta_c: f64,
    /// Turn angle, rad, >= 0 by the derivation's convention.
    pub theta_t: f64,
    /// Robot length after the turn (turn to contact), m.
    pub l_a: f64,
    /// Robot length before the turn (pivot to turn), m.
    pub l_b: f64,
    /// Static friction coefficient at the contact.
    pub mu: f64,
    /// Tube radius, m.
    pub radius: f64,
}

impl ContactGeometry {
    pub fn new(theta_c: f64, theta_t: f64, l_a: f64, l_b: f64, mu: f64, radius: f64) -> Self {
        debug_assert!(l_a > 0.0 && l_b > 0.0 && mu >= 0.0 && radius >= 0.0);
        debug_assert!(theta_c > 0.0 && theta_c < PI);
        debug_assert!(theta_t >= 0.0);
        Self {
            theta_c,
            theta_t,
            l_a,
            l_b,
            mu,
            radius,
        }
    }

    /// Pre-turn over post-turn length (the length-ratio coefficient in the
    /// boundary expressions).
    pub fn length_ratio(&self) -> f64 {
        self.l_b / self.l_a
    }
}

/// The four post-collision behaviors of a robot with one discrete turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Morphology {
    /// Body rotates about the upstream pivot in the turn direction; the tip
    /// slides along the wall.
    PositivePivot,
    /// Body bends further at the turn, which becomes a permanent pivot.
    PivotAtTurn,
    /// Friction pins the tip; the body buckles at both the turn and the
    /// contact until the contact angle drifts to a neighboring regime.
    FrictionLocked,
    /// Body rotates about the upstream pivot against the turn direction.
    NegativePivot,
}

/// Maximum internal restoring moment of the inflated beam: pi * P * R^3.
pub fn internal_moment(tube: &TubeParams) -> f64 {
    PI * tube.pressure * tube.radius.powi(3)
}

/// Critical axial force for inflated-beam buckling over unsupported
/// length `l`.
///
/// Diagnostic only: the simulator decides stick/slip from critical angles,
/// not forces.
pub fn buckling_force(tube: &TubeParams, l: f64) -> f64 {
    assert!(l > 0.0, "unsupported length must be positive");
    let (e, g) = (tube.elastic_modulus, tube.shear_modulus);
    let (r, t, p) = (tube.radius, tube.wall_thickness, tube.pressure);
    let pi3 = PI.powi(3);
    let num = e * pi3 * r.powi(4) * t * p + e * g * pi3 * r.powi(3) * t * t;
    let den = e * PI * PI * r * r * t + r * l * l * p + g * t * l * l;
    num / den
}

/// Critical contact angle at which a straight robot switches from bending
/// (pivoting) to axial buckling: atan((L/R - mu) / (mu L/R + 1)).
///
/// The mirrored branch about pi/2 gives the clockwise-rotation threshold;
/// contacts between the two buckle.
pub fn straight_critical_angle(slenderness: f64, mu: f64) -> f64 {
    debug_assert!(slenderness > 0.0 && mu >= 0.0);
    ((slenderness - mu) / (mu * slenderness + 1.0)).atan()
}

/// Boundary between Positive Pivot and Pivot-at-Turn: atan(1/mu) - theta_t.
///
/// At `mu = 0` the atan saturates to pi/2. The value may be negative for
/// large turn angles, meaning the Positive Pivot band is empty.
pub fn boundary_pp_pat(theta_t: f64, mu: f64) -> f64 {
    debug_assert!((0.0..PI).contains(&theta_t));
    let lead = if mu == 0.0 { FRAC_PI_2 } else { (1.0 / mu).atan() };
    lead - theta_t
}

/// Boundary between Pivot-at-Turn and Friction-Locked.
///
/// Root of the pivot-point moment balance with the friction sense that
/// opposes a positive normal moment. A non-positive denominator (only in
/// the zero-everything limit) saturates the boundary at pi/2 so that
/// classification sweeps stay total.
pub fn boundary_pat_fl(g: &ContactGeometry) -> f64 {
    let k = g.length_ratio();
    let (st, ct) = g.theta_t.sin_cos();
    let r_over_la = g.radius / g.l_a;
    let num = k * (ct - g.mu * st) + 1.0 - g.mu * r_over_la;
    let den = k * (st + g.mu * ct) + g.mu + r_over_la;
    if den <= 0.0 {
        return FRAC_PI_2;
    }
    (num / den).atan()
}

/// Boundary between Friction-Locked and Negative Pivot.
///
/// Same balance with the friction terms flipped. The denominator goes
/// negative for small turn angles, which places the boundary in
/// (pi/2, pi); the atan is therefore taken on the full (0, pi) branch.
pub fn boundary_fl_np(g: &ContactGeometry) -> f64 {
    let k = g.length_ratio();
    let (st, ct) = g.theta_t.sin_cos();
    let r_over_la = g.radius / g.l_a;
    let num = k * (ct + g.mu * st) + 1.0 - g.mu * r_over_la;
    let den = k * (st - g.mu * ct) - g.mu - r_over_la;
    if den.abs() < 1e-300 {
        return FRAC_PI_2;
    }
    let a = (num / den).atan();
    if den < 0.0 {
        a + PI
    } else {
        a
    }
}

/// Which sense the friction moment acts in for [`normal_force_magnitude`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrictionSense {
    PositiveMoment,
    NegativeMoment,
}

/// Magnitude of the wall normal force at quasi-static equilibrium:
/// P pi R^2 / (sin theta_c -/+ mu cos theta_c).
pub fn normal_force_magnitude(
    tube: &TubeParams,
    theta_c: f64,
    mu: f64,
    sense: FrictionSense,
) -> Result<f64, KinematicsError> {
    let den = match sense {
        FrictionSense::PositiveMoment => theta_c.sin() - mu * theta_c.cos(),
        FrictionSense::NegativeMoment => theta_c.sin() + mu * theta_c.cos(),
    };
    if den <= 0.0 {
        return Err(KinematicsError::FrictionCone { theta_c });
    }
    Ok(tube.pressure * PI * tube.radius * tube.radius / den)
}

/// All three morphology boundaries for one contact geometry, in order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorphologyBoundaries {
    pub pp_pat: f64,
    pub pat_fl: f64,
    pub fl_np: f64,
}

pub fn morphology_boundaries(g: &ContactGeometry) -> MorphologyBoundaries {
    MorphologyBoundaries {
        pp_pat: boundary_pp_pat(g.theta_t, g.mu),
        pat_fl: boundary_pat_fl(g),
        fl_np: boundary_fl_np(g),
    }
}

/// Classify the post-collision behavior of a turned robot.
///
/// Deterministic at the boundaries: `theta_c <= pp_pat` is Positive Pivot,
/// `theta_c <= pat_fl` Pivot-at-Turn, strictly between `pat_fl` and
/// `fl_np` Friction-Locked, and `theta_c >= fl_np` Negative Pivot.
///
/// The pivot branches are tested first. Near zero turn angle with a finite
/// tube radius the PP|PaT boundary can exceed the PaT|FL boundary by
/// O(R/L_a); branch precedence makes that sliver Positive Pivot, matching
/// the behavior the boundary derivation degenerates to.
pub fn classify_morphology(g: &ContactGeometry) -> Result<Morphology, KinematicsError> {
    let b = morphology_boundaries(g);
    if b.pat_fl > b.fl_np + 1e-9 {
        return Err(KinematicsError::DegenerateClassification {
            b1: b.pp_pat,
            b2: b.pat_fl,
            b3: b.fl_np,
        });
    }
    Ok(if g.theta_c <= b.pp_pat {
        Morphology::PositivePivot
    } else if g.theta_c >= b.fl_np {
        Morphology::NegativePivot
    } else if g.theta_c <= b.pat_fl {
        Morphology::PivotAtTurn
    } else {
        Morphology::FrictionLocked
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    fn demo_tube() -> TubeParams {
        // Nominal physical robot: 10 kPa, 3.23 cm radius, LDPE film.
        TubeParams::new(1.0e4, 0.0323, 7.0e-5, 2.0e8, 7.0e7)
    }

    #[test]
    fn internal_moment_unit_and_scaling() {
        let t1 = TubeParams::new(1.0, 1.0, 1.0, 1.0, 1.0);
        assert_abs_diff_eq!(internal_moment(&t1), PI, epsilon = 1e-15);
        let t2 = TubeParams::new(1.0, 2.0, 1.0, 1.0, 1.0);
        assert_abs_diff_eq!(internal_moment(&t2), 8.0 * PI, epsilon = 1e-12);
        // Direct evaluation at the physical operating point.
        assert_abs_diff_eq!(
            internal_moment(&demo_tube()),
            PI * 1.0e4 * 0.0323f64.powi(3),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(internal_moment(&demo_tube()), 1.0586, epsilon = 1e-3);
    }

    #[test]
    fn buckling_force_literal_evaluation() {
        // All unit parameters, L = 1: (pi^3 + pi^3) / (pi^2 + 1 + 1).
        let t = TubeParams::new(1.0, 1.0, 1.0, 1.0, 1.0);
        let expected = 2.0 * PI.powi(3) / (PI * PI + 2.0);
        assert_abs_diff_eq!(buckling_force(&t, 1.0), expected, epsilon = 1e-12);
    }

    #[test]
    fn buckling_force_decreases_with_length() {
        let t = demo_tube();
        let mut prev = f64::INFINITY;
        let mut l = 0.1;
        while l <= 10.0 {
            let f = buckling_force(&t, l);
            assert!(f < prev, "force not decreasing at L = {l}");
            assert!(f > 0.0);
            prev = f;
            l += 0.05;
        }
        // L -> infinity drives the force to zero.
        assert!(buckling_force(&t, 1e6) < 1e-9);
    }

    #[test]
    fn straight_critical_angle_values() {
        assert_abs_diff_eq!(
            straight_critical_angle(1.0, 0.0),
            deg(45.0),
            epsilon = 1e-12
        );
        // atan(9.7 / 4.0) for L/R = 10, mu = 0.3.
        assert_abs_diff_eq!(
            straight_critical_angle(10.0, 0.3),
            (9.7f64 / 4.0).atan(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            straight_critical_angle(10.0, 0.3).to_degrees(),
            67.59,
            epsilon = 0.01
        );
        // High-slenderness limit matches atan(1/mu).
        assert_abs_diff_eq!(
            straight_critical_angle(1e12, 0.3),
            (1.0f64 / 0.3).atan(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn straight_critical_angle_is_atan_difference() {
        // The closed form equals atan(L/R) - atan(mu).
        for &(s, mu) in &[(0.5, 0.1), (2.0, 0.3), (10.0, 0.6), (100.0, 0.45)] {
            assert_abs_diff_eq!(
                straight_critical_angle(s, mu),
                (s as f64).atan() - (mu as f64).atan(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn pp_pat_boundary_values() {
        assert_abs_diff_eq!(boundary_pp_pat(deg(45.0), 1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            boundary_pp_pat(0.0, 0.3).to_degrees(),
            73.30,
            epsilon = 0.01
        );
        assert_abs_diff_eq!(
            boundary_pp_pat(deg(30.0), 0.3).to_degrees(),
            43.30,
            epsilon = 0.01
        );
        // mu = 0 saturates the lead term at 90 degrees.
        assert_abs_diff_eq!(
            boundary_pp_pat(deg(10.0), 0.0).to_degrees(),
            80.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn pp_pat_two_algebraic_forms_agree() {
        // atan(1/mu) - theta_t versus atan((cos - mu sin)/(sin + mu cos)).
        for i in 0..40 {
            let theta_t = deg(2.0 * i as f64);
            for &mu in &[0.05, 0.15, 0.3, 0.45, 0.6, 1.0] {
                let (st, ct) = theta_t.sin_cos();
                let alt = ((ct - mu * st) / (st + mu * ct)).atan();
                let direct = boundary_pp_pat(theta_t, mu);
                assert_abs_diff_eq!(direct, alt, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pat_fl_hand_limit() {
        // mu = 0, R/L_a -> 0, ratio 1, theta_t = 90 deg: atan(1/1) = 45 deg.
        let g = ContactGeometry::new(deg(50.0), deg(90.0), 1.0, 1.0, 0.0, 1e-12);
        assert_abs_diff_eq!(boundary_pat_fl(&g).to_degrees(), 45.0, epsilon = 1e-6);
    }

    #[test]
    fn zero_friction_band_collapse() {
        for i in 0..20 {
            let theta_t = deg(4.0 * i as f64);
            for &ratio in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                let g = ContactGeometry::new(deg(40.0), theta_t, 1.0, ratio, 0.0, 0.0);
                let b2 = boundary_pat_fl(&g);
                let b3 = boundary_fl_np(&g);
                assert_abs_diff_eq!(b2, b3, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn fl_band_thickens_with_friction() {
        for &(ratio, theta_t) in &[(0.2, deg(20.0)), (1.0, deg(30.0)), (2.0, deg(45.0))] {
            let lo = ContactGeometry::new(deg(60.0), theta_t, 1.0, ratio, 0.3, 0.001);
            let hi = ContactGeometry::new(deg(60.0), theta_t, 1.0, ratio, 0.6, 0.001);
            let width_lo = boundary_fl_np(&lo) - boundary_pat_fl(&lo);
            let width_hi = boundary_fl_np(&hi) - boundary_pat_fl(&hi);
            assert!(width_hi > width_lo, "FL band should widen with friction");
        }
    }

    #[test]
    fn straight_limit_matches_turned_boundary_at_zero_turn() {
        // Eq-3-style limit: at theta_t = 0 the PP|PaT boundary equals the
        // straight critical angle as slenderness grows without bound.
        let straight = straight_critical_angle(1e12, 0.3);
        assert_abs_diff_eq!(boundary_pp_pat(0.0, 0.3), straight, epsilon = 1e-9);
    }

    #[test]
    fn normal_force_perpendicular_and_frictionless() {
        let t = demo_tube();
        let pa = t.pressure * PI * t.radius * t.radius;
        for sense in [FrictionSense::PositiveMoment, FrictionSense::NegativeMoment] {
            let n = normal_force_magnitude(&t, deg(90.0), 0.3, sense).unwrap();
            assert_abs_diff_eq!(n, pa, epsilon = 1e-9);
        }
        let n1 = normal_force_magnitude(&t, deg(60.0), 0.0, FrictionSense::PositiveMoment).unwrap();
        let n2 = normal_force_magnitude(&t, deg(60.0), 0.0, FrictionSense::NegativeMoment).unwrap();
        assert_abs_diff_eq!(n1, n2, epsilon = 1e-9);
        assert_abs_diff_eq!(n1, pa / deg(60.0).sin(), epsilon = 1e-9);
    }

    #[test]
    fn normal_force_friction_cone_error() {
        let t = demo_tube();
        // Shallow contact inside the friction cone has no static solution.
        assert!(matches!(
            normal_force_magnitude(&t, deg(10.0), 0.3, FrictionSense::PositiveMoment),
            Err(KinematicsError::FrictionCone { .. })
        ));
    }

    #[test]
    fn normal_force_cross_checked_against_tip_balance() {
        // Independent route: solve the tip force balance for N directly.
        // Growth force P*A along the heading, wall normal at theta_c - 90
        // from the heading, friction along the wall tangent.
        let t = demo_tube();
        let pa = t.pressure * PI * t.radius * t.radius;
        let theta_c = deg(60.0);
        let mu = 0.3;
        for (sense, sign) in [
            (FrictionSense::PositiveMoment, 1.0),
            (FrictionSense::NegativeMoment, -1.0),
        ] {
            // Balance along the heading: N sin(theta_c) -/+ mu N cos(theta_c) = P A.
            let n_expected = pa / (theta_c.sin() - sign * mu * theta_c.cos());
            let n = normal_force_magnitude(&t, theta_c, mu, sense).unwrap();
            assert_abs_diff_eq!(n, n_expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        // Grazing contact with no turn slides forward: Positive Pivot.
        let g = ContactGeometry::new(deg(10.0), 0.0, 1.0, 1.0, 0.3, 0.001);
        assert_eq!(classify_morphology(&g).unwrap(), Morphology::PositivePivot);

        // Figure-region check: mu 0.3, ratio 0.2 (l_b/l_a small), turn 20
        // degrees, steep contact at 85 degrees falls in the FL band.
        let g = ContactGeometry::new(deg(85.0), deg(20.0), 1.0, 0.2, 0.3, 0.001);
        let b = morphology_boundaries(&g);
        assert!(g.theta_c > b.pat_fl && g.theta_c < b.fl_np);
        assert_eq!(
            classify_morphology(&g).unwrap(),
            Morphology::FrictionLocked
        );
    }

    #[test]
    fn classify_sweep_is_ordered() {
        // Sweeping theta_c across (0, 180) deg at fixed geometry visits
        // PP, PaT, FL, NP in order with exactly three transitions.
        let mut seq = Vec::new();
        for i in 1..1800 {
            let theta_c = deg(i as f64 * 0.1);
            let g = ContactGeometry::new(theta_c, deg(30.0), 1.0, 1.0, 0.3, 0.01);
            let m = classify_morphology(&g).unwrap();
            if seq.last() != Some(&m) {
                seq.push(m);
            }
        }
        assert_eq!(
            seq,
            vec![
                Morphology::PositivePivot,
                Morphology::PivotAtTurn,
                Morphology::FrictionLocked,
                Morphology::NegativePivot
            ]
        );
    }

    #[test]
    fn boundary_ordering_grid_scan() {
        for i in 0..=16 {
            let theta_t = deg(5.0 * i as f64);
            for &ratio in &[0.1, 0.3, 1.0, 2.0, 5.0] {
                for &mu in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                    let g = ContactGeometry::new(deg(90.0), theta_t, 1.0, ratio, mu, 0.05);
                    let b = morphology_boundaries(&g);
                    assert!(
                        b.pat_fl <= b.fl_np + 1e-9,
                        "FL band inverted at theta_t={theta_t}, ratio={ratio}, mu={mu}: {b:?}"
                    );
                    // The first boundary sits below the second except for an
                    // O(R/L_a) sliver at near-zero turn angles.
                    let slack = if theta_t >= deg(5.0) { 1e-9 } else { 0.06 };
                    assert!(
                        b.pp_pat <= b.pat_fl + slack,
                        "ordering violated at theta_t={theta_t}, ratio={ratio}, mu={mu}: {b:?}"
                    );
                }
            }
        }
    }
}
