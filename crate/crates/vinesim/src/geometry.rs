//! Planar primitives and predicates: points, segments, clockwise polygons,
//! mitered offsetting, visibility tests, ray casting, and convex hulls.
//!
//! All lengths are meters and all angles are radians measured
//! counter-clockwise from +x. Predicates tolerance against [`GEOM_EPS`];
//! exact rational arithmetic is out of scope.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Geometric tolerance for intersection and collinearity predicates, in
/// meters. Environments are O(1 m), which leaves ample f64 headroom.
pub const GEOM_EPS: f64 = 1e-9;

/// Angular tolerance for "heading equals edge angle" style comparisons.
pub const ANG_EPS: f64 = 1e-6;

/// Miter length cap (in multiples of the offset radius) beyond which an
/// offset corner is treated as a failure rather than a spike.
const MITER_LIMIT: f64 = 1.0e6;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is degenerate (zero area or repeated vertices)")]
    DegeneratePolygon,
    #[error("polygon is self-intersecting")]
    SelfIntersecting,
    #[error("offset by {radius} produced a self-intersecting or spiked polygon")]
    OffsetFailure { radius: f64 },
    #[error("convex hull needs at least 3 non-collinear points")]
    DegenerateHull,
    #[error("vertex at ({x:.4}, {y:.4}) lies inside an obstacle")]
    InvalidVertex { x: f64, y: f64 },
}

/// A point in the plane; also used as a 2D vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product (perp-dot).
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Angle of this vector from +x, in (-pi, pi].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    /// Rotate by +90 degrees (counter-clockwise).
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n < GEOM_EPS {
            Self::new(0.0, 0.0)
        } else {
            self.scale(1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Mirror this point across the line through `origin` with direction `axis_angle`.
    pub fn mirror_across(self, origin: Point2, axis_angle: f64) -> Point2 {
        let d = self - origin;
        let (s, c) = (2.0 * axis_angle).sin_cos();
        origin + Point2::new(c * d.x + s * d.y, s * d.x - c * d.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        self.scale(k)
    }
}

impl std::ops::Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Normalize an angle into [0, 2*pi).
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    // The remainder can land exactly on 2*pi after the add.
    if r >= two_pi {
        r -= two_pi;
    }
    r
}

/// Counter-clockwise sweep needed to get from angle `from` to angle `to`,
/// in [0, 2*pi).
pub fn ccw_delta(from: f64, to: f64) -> f64 {
    normalize_angle(to - from)
}

/// Signed smallest rotation from `a` to `b`, in (-pi, pi].
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = normalize_angle(b - a);
    if d > std::f64::consts::PI {
        d - std::f64::consts::TAU
    } else {
        d
    }
}

/// Unsigned angle between two directions, in [0, pi].
pub fn unsigned_angle(a: f64, b: f64) -> f64 {
    angle_diff(a, b).abs()
}

/// A directed segment between two distinct points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        debug_assert!(a.dist(b) > 0.0, "segment endpoints must differ");
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn direction(&self) -> Point2 {
        (self.b - self.a).normalized()
    }

    pub fn angle(&self) -> f64 {
        (self.b - self.a).angle()
    }

    /// Distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 < GEOM_EPS * GEOM_EPS {
            return self.a.dist(p);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        (self.a + d.scale(t)).dist(p)
    }

    /// Point at parameter `t` in [0, 1].
    pub fn at(&self, t: f64) -> Point2 {
        self.a + (self.b - self.a).scale(t)
    }
}

/// Where a point sits relative to a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Boundary,
    Outside,
}

/// A simple polygon with clockwise-ordered vertices.
///
/// Construction normalizes orientation to clockwise and rejects polygons
/// that are degenerate or self-intersecting. Clockwise ordering puts the
/// interior on the right-hand side of each directed edge, which is the
/// convention the contact kinematics rely on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if !vertices.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::DegeneratePolygon);
        }
        // Drop a duplicated closing vertex if present.
        if vertices.first().unwrap().dist(*vertices.last().unwrap()) < GEOM_EPS {
            vertices.pop();
            if vertices.len() < 3 {
                return Err(GeometryError::TooFewVertices(vertices.len()));
            }
        }
        for w in vertices.windows(2) {
            if w[0].dist(w[1]) < GEOM_EPS {
                return Err(GeometryError::DegeneratePolygon);
            }
        }
        let area = signed_area(&vertices);
        if area.abs() < GEOM_EPS * GEOM_EPS {
            return Err(GeometryError::DegeneratePolygon);
        }
        if area > 0.0 {
            vertices.reverse(); // enforce clockwise
        }
        let poly = Self { vertices };
        if !poly.is_simple() {
            return Err(GeometryError::SelfIntersecting);
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Directed edges in vertex order (clockwise).
    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let mut c = Point2::default();
        for v in &self.vertices {
            c = c + *v;
        }
        c.scale(1.0 / n)
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let ei = Segment::new(self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // Skip adjacent edges; they share a vertex by construction.
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let ej = Segment::new(self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_properly_cross(&ei, &ej) {
                    return false;
                }
            }
        }
        true
    }

    pub fn distance_to_boundary(&self, p: Point2) -> f64 {
        self.edges()
            .map(|e| e.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even-odd classification with an explicit boundary band of [`GEOM_EPS`].
    pub fn locate(&self, p: Point2) -> PointLocation {
        if self.distance_to_boundary(p) <= GEOM_EPS {
            return PointLocation::Boundary;
        }
        if self.contains_even_odd(p) {
            PointLocation::Inside
        } else {
            PointLocation::Outside
        }
    }

    fn contains_even_odd(&self, p: Point2) -> bool {
        // Standard crossing count with the y-straddle rule.
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (vi, vj) = (self.vertices[i], self.vertices[j]);
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = vi.x + (p.y - vi.y) / (vj.y - vi.y) * (vj.x - vi.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.cross(b);
    }
    acc / 2.0
}

/// True when the open interiors of the segments cross transversally.
pub fn segments_properly_cross(s1: &Segment, s2: &Segment) -> bool {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let denom = d1.cross(d2);
    if denom.abs() < GEOM_EPS {
        return false; // parallel or collinear: never a proper crossing
    }
    let t = (s2.a - s1.a).cross(d2) / denom;
    let u = (s2.a - s1.a).cross(d1) / denom;
    let lo1 = GEOM_EPS / d1.norm().max(GEOM_EPS);
    let lo2 = GEOM_EPS / d2.norm().max(GEOM_EPS);
    t > lo1 && t < 1.0 - lo1 && u > lo2 && u < 1.0 - lo2
}

/// Intersection parameters (t along s1, u along s2) including endpoint
/// touches, or None for parallel/collinear pairs.
fn segment_intersection_params(s1: &Segment, s2: &Segment) -> Option<(f64, f64)> {
    let d1 = s1.b - s1.a;
    let d2 = s2.b - s2.a;
    let denom = d1.cross(d2);
    if denom.abs() < GEOM_EPS {
        return None;
    }
    let t = (s2.a - s1.a).cross(d2) / denom;
    let u = (s2.a - s1.a).cross(d1) / denom;
    let tol1 = GEOM_EPS / d1.norm().max(GEOM_EPS);
    let tol2 = GEOM_EPS / d2.norm().max(GEOM_EPS);
    if t >= -tol1 && t <= 1.0 + tol1 && u >= -tol2 && u <= 1.0 + tol2 {
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Outward offset of a clockwise polygon by `r`, with mitered corners.
///
/// `r = 0` returns the polygon unchanged. A highly concave polygon and a
/// large `r` can produce a self-intersecting or spiked offset, reported as
/// [`GeometryError::OffsetFailure`].
pub fn inflate_obstacle(p: &Polygon, r: f64) -> Result<Polygon, GeometryError> {
    assert!(r >= 0.0, "offset radius must be non-negative");
    if r == 0.0 {
        return Ok(p.clone());
    }
    let verts = p.vertices();
    let n = verts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = verts[(i + n - 1) % n];
        let cur = verts[i];
        let next = verts[(i + 1) % n];
        let d_in = (cur - prev).normalized();
        let d_out = (next - cur).normalized();
        // Clockwise ordering keeps the interior on the right, so the
        // outward normal is the left-hand perpendicular.
        let n_in = d_in.perp();
        let n_out = d_out.perp();
        let a1 = prev + n_in.scale(r);
        let a2 = cur + n_out.scale(r);
        let denom = d_in.cross(d_out);
        let miter = if denom.abs() < GEOM_EPS {
            cur + n_in.scale(r) // collinear edges share a normal
        } else {
            let t = (a2 - a1).cross(d_out) / denom;
            a1 + d_in.scale(t)
        };
        if miter.dist(cur) > MITER_LIMIT * r {
            return Err(GeometryError::OffsetFailure { radius: r });
        }
        out.push(miter);
    }
    Polygon::new(out).map_err(|_| GeometryError::OffsetFailure { radius: r })
}

/// True when the open segment (a, b) does not cross any obstacle interior.
///
/// Grazing contact counts as visible: a sight line may run along an
/// obstacle wall or touch vertices, as long as it never enters the
/// interior.
pub fn line_of_sight(a: Point2, b: Point2, obstacles: &[Polygon]) -> bool {
    if a.dist(b) < GEOM_EPS {
        return true;
    }
    let sight = Segment::new(a, b);
    let mut touches: Vec<f64> = vec![0.0, 1.0];
    for poly in obstacles {
        for edge in poly.edges() {
            if segments_properly_cross(&sight, &edge) {
                return false;
            }
            if let Some((t, _)) = segment_intersection_params(&sight, &edge) {
                touches.push(t);
            }
        }
    }
    // No proper crossing: the segment can still run through an interior if
    // it enters through a vertex. Test a midpoint between consecutive
    // touch parameters.
    touches.sort_by(|x, y| x.partial_cmp(y).unwrap());
    touches.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    for w in touches.windows(2) {
        let mid = sight.at(0.5 * (w[0] + w[1]));
        for poly in obstacles {
            if poly.locate(mid) == PointLocation::Inside {
                return false;
            }
        }
    }
    true
}

/// Result of casting a ray against obstacle boundaries.
#[derive(Clone, Copy, Debug)]
pub struct RayHit {
    pub point: Point2,
    pub wall: Segment,
    pub distance: f64,
    pub obstacle: usize,
    /// Edge index within the obstacle (edge i runs vertex i -> i+1).
    pub edge: usize,
}

/// Nearest transversal intersection of the forward ray with any obstacle
/// boundary. Collinear grazing along a wall is not a hit.
pub fn ray_cast(origin: Point2, heading: f64, obstacles: &[Polygon]) -> Option<RayHit> {
    let dir = Point2::from_angle(heading);
    let mut best: Option<RayHit> = None;
    for (oi, poly) in obstacles.iter().enumerate() {
        for (ei, edge) in poly.edges().enumerate() {
            let d2 = edge.b - edge.a;
            let denom = dir.cross(d2);
            if denom.abs() < GEOM_EPS {
                continue; // parallel or collinear
            }
            let rel = edge.a - origin;
            let t = rel.cross(d2) / denom; // distance along ray
            let u = rel.cross(dir) / denom; // parameter along edge
            let tol = GEOM_EPS / d2.norm().max(GEOM_EPS);
            if t > GEOM_EPS && (-tol..=1.0 + tol).contains(&u) {
                if best.map_or(true, |b| t < b.distance) {
                    best = Some(RayHit {
                        point: origin + dir.scale(t),
                        wall: edge,
                        distance: t,
                        obstacle: oi,
                        edge: ei,
                    });
                }
            }
        }
    }
    best
}

/// Clockwise convex hull of a point set (Andrew's monotone chain).
pub fn convex_hull(points: &[Point2]) -> Result<Polygon, GeometryError> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    pts.dedup_by(|a, b| a.dist(*b) < GEOM_EPS);
    if pts.len() < 3 {
        return Err(GeometryError::DegenerateHull);
    }
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 {
            let cross = (lower[lower.len() - 1] - lower[lower.len() - 2])
                .cross(p - lower[lower.len() - 1]);
            if cross <= GEOM_EPS {
                lower.pop();
            } else {
                break;
            }
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 {
            let cross = (upper[upper.len() - 1] - upper[upper.len() - 2])
                .cross(p - upper[upper.len() - 1]);
            if cross <= GEOM_EPS {
                upper.pop();
            } else {
                break;
            }
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GeometryError::DegenerateHull);
    }
    // The chains above are built counter-clockwise; Polygon::new flips to
    // clockwise.
    Polygon::new(lower).map_err(|_| GeometryError::DegenerateHull)
}

/// Axis-aligned square region that bounds an environment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point2,
    pub size: f64,
}

impl Bounds {
    pub fn new(min: Point2, size: f64) -> Self {
        assert!(size > 0.0, "bounds must have positive size");
        Self { min, size }
    }

    pub fn max(&self) -> Point2 {
        self.min + Point2::new(self.size, self.size)
    }

    pub fn center(&self) -> Point2 {
        self.min + Point2::new(self.size / 2.0, self.size / 2.0)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x - GEOM_EPS
            && p.y >= self.min.y - GEOM_EPS
            && p.x <= self.min.x + self.size + GEOM_EPS
            && p.y <= self.min.y + self.size + GEOM_EPS
    }

    /// Distance from `p` to the boundary of the square (0 on the perimeter).
    pub fn distance_to_perimeter(&self, p: Point2) -> f64 {
        let max = self.max();
        let dx = (p.x - self.min.x).abs().min((max.x - p.x).abs());
        let dy = (p.y - self.min.y).abs().min((max.y - p.y).abs());
        if self.contains(p) {
            dx.min(dy)
        } else {
            // outside: distance to the nearest face plane
            let cx = p.x.clamp(self.min.x, max.x);
            let cy = p.y.clamp(self.min.y, max.y);
            p.dist(Point2::new(cx, cy))
        }
    }

    /// Direction pointing into the square from a point on its perimeter.
    pub fn inward_normal_angle(&self, p: Point2) -> f64 {
        let max = self.max();
        let d_left = (p.x - self.min.x).abs();
        let d_right = (max.x - p.x).abs();
        let d_bottom = (p.y - self.min.y).abs();
        let d_top = (max.y - p.y).abs();
        let m = d_left.min(d_right).min(d_bottom).min(d_top);
        if m == d_bottom {
            std::f64::consts::FRAC_PI_2
        } else if m == d_top {
            -std::f64::consts::FRAC_PI_2
        } else if m == d_left {
            0.0
        } else {
            std::f64::consts::PI
        }
    }
}

/// Intersection of the line through `c` with direction angle `alpha` and the
/// circle of radius `radius` about `center`, as parameters along the line.
///
/// Returns the two signed distances from `c` (smaller first), or None when
/// the line misses the circle. Shared by the friction-locked turn tracking
/// in both the simulator and the sensing inversion.
pub fn line_circle_intersection(
    c: Point2,
    alpha: f64,
    center: Point2,
    radius: f64,
) -> Option<(f64, f64)> {
    let u = Point2::from_angle(alpha);
    let rel = c - center;
    let b = 2.0 * u.dot(rel);
    let cc = rel.dot(rel) - radius * radius;
    let disc = b * b - 4.0 * cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some(((-b - sq) / 2.0, (-b + sq) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_square() -> Polygon {
        Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn polygon_orientation_is_clockwise() {
        let p = unit_square();
        assert!(signed_area(p.vertices()) < 0.0);
        // Interior on the right of each directed edge.
        let e = p.edges().next().unwrap();
        let right = e.at(0.5) + (e.b - e.a).perp().scale(-0.1);
        assert_eq!(p.locate(right), PointLocation::Inside);
    }

    #[test]
    fn polygon_rejects_degenerate_input() {
        assert!(matches!(
            Polygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices(2))
        ));
        let collinear = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(Polygon::new(collinear).is_err());
        // A symmetric bowtie has zero net area and trips the degeneracy
        // check instead.
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(Polygon::new(bowtie).is_err());
        let crossed = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(1.0, -1.0),
            Point2::new(0.0, 2.0),
        ];
        assert!(matches!(
            Polygon::new(crossed),
            Err(GeometryError::SelfIntersecting)
        ));
    }

    #[test]
    fn inflate_zero_radius_is_identity() {
        let p = unit_square();
        let q = inflate_obstacle(&p, 0.0).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn inflate_square_symmetric_offset() {
        let p = Polygon::new(vec![
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ])
        .unwrap();
        let q = inflate_obstacle(&p, 0.1).unwrap();
        let mut xs: Vec<f64> = q.vertices().iter().map(|v| v.x).collect();
        let mut ys: Vec<f64> = q.vertices().iter().map(|v| v.y).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(xs[0], -0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(xs[3], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(ys[0], -0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(ys[3], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn inflate_keeps_original_vertices_at_distance() {
        // Oracle: dense boundary sampling + distance check on a convex hexagon.
        let r = 0.05;
        let hex: Vec<Point2> = (0..6)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 6.0;
                Point2::new(0.9 * a.cos() + 0.05 * (i as f64).sin(), 0.8 * a.sin())
            })
            .collect();
        let p = convex_hull(&hex).unwrap();
        let q = inflate_obstacle(&p, r).unwrap();
        for v in p.vertices() {
            let samples: f64 = 2000.0;
            let mut min_d = f64::INFINITY;
            for e in q.edges() {
                for k in 0..samples as usize {
                    let pt = e.at(k as f64 / samples);
                    min_d = min_d.min(pt.dist(*v));
                }
            }
            assert!(
                min_d >= r - 1e-3,
                "vertex {v:?} at distance {min_d} from offset boundary"
            );
        }
    }

    #[test]
    fn inflation_monotone_containment() {
        let p = unit_square();
        let q1 = inflate_obstacle(&p, 0.05).unwrap();
        let q2 = inflate_obstacle(&p, 0.11).unwrap();
        for v in q1.vertices() {
            assert_eq!(q2.locate(*v), PointLocation::Inside);
        }
    }

    #[test]
    fn line_of_sight_blocked_through_center() {
        let p = unit_square();
        assert!(!line_of_sight(
            Point2::new(-1.0, 0.5),
            Point2::new(2.0, 0.5),
            &[p]
        ));
    }

    #[test]
    fn line_of_sight_along_wall_is_visible() {
        let p = unit_square();
        // Adjacent vertices of the same obstacle graze along the wall.
        assert!(line_of_sight(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            &[p.clone()]
        ));
        // Extended collinear run past the wall too.
        assert!(line_of_sight(
            Point2::new(-1.0, 0.0),
            Point2::new(2.0, 0.0),
            &[p]
        ));
    }

    #[test]
    fn line_of_sight_through_vertex_into_interior_is_blocked() {
        let p = unit_square();
        // Diagonal through two opposite corners passes through the interior.
        assert!(!line_of_sight(
            Point2::new(-0.5, -0.5),
            Point2::new(1.5, 1.5),
            &[p]
        ));
    }

    #[test]
    fn line_of_sight_matches_brute_force_on_random_pairs() {
        // Oracle: a sight line is blocked iff some sampled interior point of
        // the segment is inside an obstacle (dense sampling).
        let obstacles = vec![
            unit_square(),
            Polygon::new(vec![
                Point2::new(2.0, 0.5),
                Point2::new(3.0, 0.8),
                Point2::new(2.5, 1.8),
            ])
            .unwrap(),
        ];
        let mut state = 0x12345678u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) * 6.0 - 1.5
        };
        for _ in 0..100 {
            let a = Point2::new(rnd(), rnd());
            let b = Point2::new(rnd(), rnd());
            if a.dist(b) < 1e-6 {
                continue;
            }
            let seg = Segment::new(a, b);
            let mut blocked = false;
            for k in 1..400 {
                let pt = seg.at(k as f64 / 400.0);
                if obstacles
                    .iter()
                    .any(|p| p.locate(pt) == PointLocation::Inside)
                {
                    blocked = true;
                    break;
                }
            }
            // Skip cases where the sampled oracle is ambiguous near edges.
            let near_boundary = (0..=400).any(|k| {
                let pt = seg.at(k as f64 / 400.0);
                obstacles
                    .iter()
                    .any(|p| p.distance_to_boundary(pt) < 1e-3)
            });
            if near_boundary {
                continue;
            }
            assert_eq!(
                line_of_sight(a, b, &obstacles),
                !blocked,
                "mismatch for {a:?}->{b:?}"
            );
        }
    }

    #[test]
    fn ray_cast_hits_nearest_wall() {
        let wall = Polygon::new(vec![
            Point2::new(1.0, -1.0),
            Point2::new(2.0, -1.0),
            Point2::new(2.0, 1.0),
            Point2::new(1.0, 1.0),
        ])
        .unwrap();
        let hit = ray_cast(Point2::new(0.0, 0.0), 0.0, &[wall]).unwrap();
        assert_abs_diff_eq!(hit.point.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hit.point.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hit.distance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ray_cast_away_from_obstacles_is_none() {
        let p = unit_square();
        assert!(ray_cast(Point2::new(-1.0, 0.5), std::f64::consts::PI, &[p]).is_none());
    }

    #[test]
    fn ray_cast_matches_per_edge_minimum() {
        let obstacles = vec![
            unit_square(),
            Polygon::new(vec![
                Point2::new(-2.0, -2.0),
                Point2::new(-1.0, -2.0),
                Point2::new(-1.5, -0.5),
            ])
            .unwrap(),
        ];
        let mut state = 0xdeadbeefu64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64)
        };
        for _ in 0..50 {
            let origin = Point2::new(rnd() * 8.0 - 4.0, rnd() * 8.0 - 4.0);
            if obstacles
                .iter()
                .any(|p| p.locate(origin) != PointLocation::Outside)
            {
                continue;
            }
            let heading = rnd() * std::f64::consts::TAU;
            let got = ray_cast(origin, heading, &obstacles);
            // Brute force: walk the ray in small steps and find first entry.
            let dir = Point2::from_angle(heading);
            let mut brute: Option<f64> = None;
            let mut t = 0.0;
            while t < 12.0 {
                t += 1e-3;
                let pt = origin + dir.scale(t);
                if obstacles
                    .iter()
                    .any(|p| p.locate(pt) != PointLocation::Outside)
                {
                    brute = Some(t);
                    break;
                }
            }
            match (got, brute) {
                (Some(hit), Some(bt)) => {
                    assert!((hit.distance - bt).abs() < 2e-3, "distance mismatch");
                }
                (None, None) => {}
                (Some(hit), None) => {
                    // The brute walk can step over razor-thin grazes.
                    assert!(hit.distance > 12.0 || hit.distance < 0.0 || {
                        let pt = hit.point;
                        obstacles.iter().any(|p| p.distance_to_boundary(pt) < 1e-6)
                    });
                }
                (None, Some(bt)) => panic!("ray_cast missed a hit at {bt}"),
            }
        }
    }

    #[test]
    fn convex_hull_of_square_plus_center() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 0.5),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn convex_hull_triangle_is_itself() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 1.5),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 3);
    }

    #[test]
    fn convex_hull_degenerate_inputs() {
        assert!(convex_hull(&[Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)]).is_err());
        let collinear: Vec<Point2> = (0..5).map(|i| Point2::new(i as f64, 2.0 * i as f64)).collect();
        assert!(convex_hull(&collinear).is_err());
    }

    #[test]
    fn convex_hull_contains_all_points() {
        let mut state = 7u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64)
        };
        let pts: Vec<Point2> = (0..200)
            .map(|_| Point2::new(rnd() * 4.0, rnd() * 3.0))
            .collect();
        let hull = convex_hull(&pts).unwrap();
        for p in &pts {
            assert_ne!(hull.locate(*p), PointLocation::Outside);
        }
        for v in hull.vertices() {
            assert!(pts.iter().any(|p| p.dist(*v) < 1e-12));
        }
    }

    #[test]
    fn point_in_polygon_examples() {
        let p = unit_square();
        assert_eq!(p.locate(Point2::new(0.5, 0.5)), PointLocation::Inside);
        assert_eq!(p.locate(Point2::new(0.0, 0.0)), PointLocation::Boundary);
        assert_eq!(p.locate(Point2::new(1.5, 0.5)), PointLocation::Outside);
    }

    #[test]
    fn point_in_polygon_matches_winding_oracle() {
        // Winding-number oracle away from the boundary band.
        let poly = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.2),
            Point2::new(2.5, 1.5),
            Point2::new(1.0, 2.2),
            Point2::new(-0.4, 1.0),
        ])
        .unwrap();
        let winding = |p: Point2| -> bool {
            let mut total = 0.0f64;
            let n = poly.len();
            for i in 0..n {
                let a = poly.vertices()[i] - p;
                let b = poly.vertices()[(i + 1) % n] - p;
                total += a.cross(b).atan2(a.dot(b));
            }
            total.abs() > std::f64::consts::PI
        };
        let mut state = 99u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64)
        };
        let mut checked = 0;
        for _ in 0..500 {
            let p = Point2::new(rnd() * 4.0 - 0.7, rnd() * 3.4 - 0.6);
            if poly.distance_to_boundary(p) < 1e-6 {
                continue;
            }
            checked += 1;
            assert_eq!(poly.locate(p) == PointLocation::Inside, winding(p));
        }
        assert!(checked > 400);
    }

    #[test]
    fn angle_helpers() {
        assert_abs_diff_eq!(normalize_angle(-0.5), std::f64::consts::TAU - 0.5);
        assert_abs_diff_eq!(ccw_delta(0.1, 0.3), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(
            ccw_delta(0.3, 0.1),
            std::f64::consts::TAU - 0.2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(angle_diff(0.3, 0.1), -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(unsigned_angle(0.0, 3.0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_across_axis() {
        let p = Point2::new(1.0, 1.0);
        let m = p.mirror_across(Point2::new(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(m.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.y, -1.0, epsilon = 1e-12);
        let m2 = p.mirror_across(Point2::new(0.0, 0.0), std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(m2.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m2.y, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn line_circle_intersection_hits_and_misses() {
        let (t1, t2) = line_circle_intersection(
            Point2::new(-2.0, 0.0),
            0.0,
            Point2::new(0.0, 0.0),
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(t1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t2, 3.0, epsilon = 1e-12);
        assert!(line_circle_intersection(
            Point2::new(-2.0, 5.0),
            0.0,
            Point2::new(0.0, 0.0),
            1.0
        )
        .is_none());
    }
}
