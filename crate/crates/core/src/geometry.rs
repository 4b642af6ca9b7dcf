//! Geodesics and enclosed areas on the Poincaré sphere and on the unit
//! hyperboloid of four-velocities.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Vector3, Vector4};

use crate::error::{domain, Result};
use crate::jones::PoincarePoint;
use crate::lorentz::{minkowski_dot, FourVelocity};

/// Consecutive vertices closer than this to antipodal are rejected.
const ANTIPODAL_TOL: f64 = 1e-12;

/// Ordered vertices on the sphere joined by minor great-circle arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPolyline {
    vertices: Vec<PoincarePoint>,
    closed: bool,
}

impl SphericalPolyline {
    pub fn new(vertices: Vec<PoincarePoint>, closed: bool) -> Result<Self> {
        if vertices.is_empty() {
            return domain("polyline needs at least one vertex");
        }
        let n = vertices.len();
        let edges = if closed { n } else { n - 1 };
        for i in 0..edges {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
            if a.dot(b) < -1.0 + ANTIPODAL_TOL {
                return domain(format!("vertices {i} and {} are antipodal", (i + 1) % n));
            }
        }
        Ok(Self { vertices, closed })
    }

    /// A closed loop. Fewer than three vertices enclose no area.
    pub fn closed(vertices: Vec<PoincarePoint>) -> Result<Self> {
        Self::new(vertices, true)
    }

    pub fn open(vertices: Vec<PoincarePoint>) -> Result<Self> {
        Self::new(vertices, false)
    }

    pub fn vertices(&self) -> &[PoincarePoint] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            closed: self.closed,
        }
    }
}

/// Ordered four-velocities joined by hyperbolic geodesics.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicPolyline {
    vertices: Vec<FourVelocity>,
    closed: bool,
}

impl HyperbolicPolyline {
    pub fn new(vertices: Vec<FourVelocity>, closed: bool) -> Result<Self> {
        if vertices.is_empty() {
            return domain("polyline needs at least one vertex");
        }
        Ok(Self { vertices, closed })
    }

    pub fn closed(vertices: Vec<FourVelocity>) -> Result<Self> {
        Self::new(vertices, true)
    }

    pub fn vertices(&self) -> &[FourVelocity] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Consecutive vertex pairs, including the closing edge for loops.
    pub fn segments(&self) -> impl Iterator<Item = (FourVelocity, FourVelocity)> + '_ {
        let n = self.vertices.len();
        let edges = if self.closed { n } else { n.saturating_sub(1) };
        (0..edges).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            closed: self.closed,
        }
    }

    /// The same cyclic loop started at vertex `k`.
    pub fn rotated_start(&self, k: usize) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(k % self.vertices.len());
        Self {
            vertices,
            closed: self.closed,
        }
    }
}

/// Spherical linear interpolation from `a` (t = 0) to `b` (t = 1).
pub fn great_circle_point(a: &PoincarePoint, b: &PoincarePoint, t: f64) -> Result<PoincarePoint> {
    let (va, vb) = (a.vector(), b.vector());
    let sin = va.cross(&vb).norm();
    let cos = va.dot(&vb);
    if sin < ANTIPODAL_TOL && cos < 0.0 {
        return domain("great circle through antipodal points is not unique");
    }
    let theta = sin.atan2(cos);
    if theta == 0.0 {
        return Ok(*a);
    }
    let v = (va * ((1.0 - t) * theta).sin() + vb * (t * theta).sin()) / theta.sin();
    PoincarePoint::normalized(v)
}

/// Signed solid angle of the geodesic triangle `a → b → c`, positive when the
/// traversal is counterclockwise seen from outside the sphere.
///
/// Evaluated as `2 atan2(a·(b×c), 1 + a·b + b·c + c·a)`, which keeps full
/// relative precision for thin triangles. Collinear triangles give exactly 0.
pub fn solid_angle_triangle(a: &PoincarePoint, b: &PoincarePoint, c: &PoincarePoint) -> f64 {
    if a == b || b == c || c == a {
        return 0.0;
    }
    let (va, vb, vc) = (a.vector(), b.vector(), c.vector());
    let triple = va.dot(&vb.cross(&vc));
    if triple == 0.0 {
        return 0.0;
    }
    let denom = 1.0 + va.dot(&vb) + vb.dot(&vc) + vc.dot(&va);
    2.0 * triple.atan2(denom)
}

/// Fan sum of triangles `(apex, v_i, v_{i+1})` over every edge of the loop.
fn fan_sum(vertices: &[PoincarePoint], apex: &PoincarePoint) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| solid_angle_triangle(apex, &vertices[i], &vertices[(i + 1) % n]))
        .sum()
}

/// Reduces a loop area into `(-2π, 2π]`.
fn reduce_area(omega: f64) -> f64 {
    let mut w = omega % (2.0 * TAU);
    if w > TAU + 1e-12 {
        w -= 2.0 * TAU;
    } else if w <= -TAU + 1e-12 {
        w += 2.0 * TAU;
    }
    w
}

/// Fan triangulation rooted at vertex `root`. Unreduced; equal to any other
/// root modulo 4π.
pub fn solid_angle_fan(p: &SphericalPolyline, root: usize) -> Result<f64> {
    if !p.closed {
        return domain("solid angle needs a closed polyline");
    }
    if p.len() < 3 {
        return Ok(0.0);
    }
    Ok(fan_sum(&p.vertices, &p.vertices[root % p.len()]))
}

/// Signed solid angle enclosed by a closed polyline, in `(-2π, 2π]`.
///
/// The fan apex is the direction of the loop's vector area, which is never
/// antipodal to a vertex of a simple loop inside a hemisphere; loops whose
/// vector area vanishes fall back to vertex 0. The sum is always evaluated
/// on the orientation whose vector area points into the half-space of
/// positive leading component, so reversing a loop negates the result exactly.
pub fn solid_angle_polyline(p: &SphericalPolyline) -> Result<f64> {
    if !p.closed {
        return domain("solid angle needs a closed polyline");
    }
    let n = p.len();
    if n < 3 {
        return Ok(0.0);
    }
    let area = vector_area(&p.vertices);
    let canonical = area.iter().find(|c| c.abs() > 1e-12).is_none_or(|c| *c > 0.0);
    if canonical {
        oriented_area(&p.vertices, area)
    } else {
        let mut rev = p.vertices.clone();
        rev.reverse();
        let area = vector_area(&rev);
        Ok(-oriented_area(&rev, area)?)
    }
}

fn vector_area(vertices: &[PoincarePoint]) -> Vector3<f64> {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].vector().cross(&vertices[(i + 1) % n].vector()))
        .sum()
}

fn oriented_area(vertices: &[PoincarePoint], area: Vector3<f64>) -> Result<f64> {
    if vertices.len() == 3 {
        return Ok(solid_angle_triangle(&vertices[0], &vertices[1], &vertices[2]));
    }
    let apex = if area.norm() > 1e-9 {
        PoincarePoint::normalized(area)?
    } else {
        vertices[0]
    };
    Ok(reduce_area(fan_sum(vertices, &apex)))
}

/// Parametrised hyperbolic geodesic from `u` (t = 0) to `w` (t = 1),
/// `u(t) = u cosh(tζ) + ê sinh(tζ)` with `ζ = arccosh(u·w)`.
///
/// Evaluated in the endpoint-weighted form
/// `(sinh((1−t)ζ) u + sinh(tζ) w) / sinh ζ`, which avoids the cancellation
/// of the tangent-vector form on long segments.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicGeodesic {
    start: Vector4<f64>,
    end: Vector4<f64>,
    zeta: f64,
}

impl HyperbolicGeodesic {
    pub fn new(u: &FourVelocity, w: &FourVelocity) -> Self {
        let diff = w.vector() - u.vector();
        // |w − u|² = −4 sinh²(ζ/2)
        let half_chord = 0.5 * (-minkowski_dot(&diff, &diff)).max(0.0).sqrt();
        Self {
            start: u.vector(),
            end: w.vector(),
            zeta: 2.0 * half_chord.asinh(),
        }
    }

    pub fn rapidity(&self) -> f64 {
        self.zeta
    }

    pub fn point(&self, t: f64) -> FourVelocity {
        if self.zeta == 0.0 || t == 0.0 {
            return FourVelocity::from_vector_unchecked(self.start);
        }
        if t == 1.0 {
            return FourVelocity::from_vector_unchecked(self.end);
        }
        let z = self.zeta;
        let v = (self.start * ((1.0 - t) * z).sinh() + self.end * (t * z).sinh()) / z.sinh();
        FourVelocity::from_vector_unchecked(v)
    }

    /// `du/dt`, analytic.
    pub fn tangent(&self, t: f64) -> Vector4<f64> {
        if self.zeta == 0.0 {
            return Vector4::zeros();
        }
        let z = self.zeta;
        (self.end * (t * z).cosh() - self.start * ((1.0 - t) * z).cosh()) * (z / z.sinh())
    }
}

pub fn hyperbolic_geodesic_point(u: &FourVelocity, w: &FourVelocity, t: f64) -> FourVelocity {
    HyperbolicGeodesic::new(u, w).point(t)
}

/// Whether the points lie on one totally geodesic hyperbolic plane, i.e. the
/// 4×k matrix of their coordinates has numerical rank at most 3.
pub fn is_coplanar_h(points: &[FourVelocity], tol: f64) -> Result<bool> {
    if points.len() < 3 {
        return domain("coplanarity needs at least three points");
    }
    let m = DMatrix::from_fn(4, points.len(), |r, c| points[c].vector()[r]);
    let sv = m.singular_values();
    let largest = sv.max();
    if sv.len() < 4 {
        return Ok(true);
    }
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(smallest <= tol * largest.max(1.0))
}

/// Interior angle at `b` of the spherical triangle `a, b, c`.
pub fn interior_angle(a: &PoincarePoint, b: &PoincarePoint, c: &PoincarePoint) -> f64 {
    let vb = b.vector();
    let ta = a.vector() - vb * vb.dot(&a.vector());
    let tc = c.vector() - vb * vb.dot(&c.vector());
    ta.cross(&tc).norm().atan2(ta.dot(&tc))
}

/// Great-circle distance; alias kept next to the other metric helpers.
pub fn arc_length(a: &PoincarePoint, b: &PoincarePoint) -> f64 {
    a.angle_to(b)
}

/// `|Ω|` bound for a triangle inside an open hemisphere.
pub const HEMISPHERE_AREA: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn unit_strategy() -> impl Strategy<Value = PoincarePoint> {
        (-1.0f64..=1.0, 0.0..TAU).prop_map(|(z, phi)| PoincarePoint::from_angles(z.acos(), phi))
    }

    fn velocity_strategy() -> impl Strategy<Value = FourVelocity> {
        (unit_strategy(), 0.0f64..2.5).prop_map(|(n, a)| FourVelocity::from_rapidity(&n, a))
    }

    fn p(x: f64, y: f64, z: f64) -> PoincarePoint {
        PoincarePoint::normalized(Vector3::new(x, y, z)).unwrap()
    }

    /// Oracle: spherical excess from the interior angles, signed by orientation.
    fn excess(a: &PoincarePoint, b: &PoincarePoint, c: &PoincarePoint) -> f64 {
        let e = interior_angle(c, a, b) + interior_angle(a, b, c) + interior_angle(b, c, a) - PI;
        e * a.vector().dot(&b.vector().cross(&c.vector())).signum()
    }

    #[test]
    fn slerp_examples() {
        let (x, y) = (PoincarePoint::x_axis(), PoincarePoint::y_axis());
        assert_eq!(great_circle_point(&x, &y, 0.0).unwrap(), x);
        assert_relative_eq!(
            great_circle_point(&x, &y, 0.5).unwrap().vector(),
            p(1.0, 1.0, 0.0).vector(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            great_circle_point(&x, &y, 1.0).unwrap().vector(),
            y.vector(),
            epsilon = 1e-15
        );
        assert!(great_circle_point(&x, &x.antipode(), 0.5).is_err());
    }

    #[test]
    fn triangle_examples() {
        let (x, y, z) = (
            PoincarePoint::x_axis(),
            PoincarePoint::y_axis(),
            PoincarePoint::z_axis(),
        );
        assert_eq!(solid_angle_triangle(&x, &x, &z), 0.0);
        assert_relative_eq!(solid_angle_triangle(&x, &y, &z), FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(solid_angle_triangle(&z, &y, &x), -FRAC_PI_2, epsilon = 1e-15);
        // Three points on the equator.
        assert_eq!(solid_angle_triangle(&x, &y, &p(-1.0, 0.2, 0.0)), 0.0);
    }

    #[test]
    fn polyline_examples() {
        let tri = SphericalPolyline::closed(vec![p(1.0, 0.1, 0.2), p(0.0, 1.0, 0.3), p(0.2, 0.1, 1.0)]).unwrap();
        let v = tri.vertices();
        assert_relative_eq!(
            solid_angle_polyline(&tri).unwrap(),
            solid_angle_triangle(&v[0], &v[1], &v[2]),
            epsilon = 1e-15
        );

        let square = SphericalPolyline::closed(
            (0..4)
                .map(|k| PoincarePoint::from_angles(FRAC_PI_2, FRAC_PI_2 * k as f64))
                .collect(),
        )
        .unwrap();
        assert_relative_eq!(solid_angle_polyline(&square).unwrap(), TAU, epsilon = 1e-12);

        let open = SphericalPolyline::open(vec![p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0)]).unwrap();
        assert!(solid_angle_polyline(&open).is_err());
        assert!(SphericalPolyline::closed(vec![p(1.0, 0.0, 0.0), p(-1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn thin_triangle_keeps_precision() {
        let eps = 1e-7;
        let (a, b, c) = (p(1.0, 0.0, 0.0), p(1.0, eps, 0.0), p(1.0, 0.0, eps));
        // Planar right triangle of legs ε: area ε²/2 to leading order.
        assert_relative_eq!(solid_angle_triangle(&a, &b, &c), 0.5 * eps * eps, max_relative = 1e-6);
    }

    #[test]
    fn geodesic_examples() {
        let u = FourVelocity::rest();
        let w = FourVelocity::new(1f64.cosh(), 1f64.sinh(), 0.0, 0.0).unwrap();
        assert_eq!(hyperbolic_geodesic_point(&u, &w, 0.0), u);
        assert_relative_eq!(
            hyperbolic_geodesic_point(&u, &w, 1.0).vector(),
            w.vector(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            hyperbolic_geodesic_point(&u, &w, 0.5).vector(),
            Vector4::new(0.5f64.cosh(), 0.5f64.sinh(), 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_eq!(hyperbolic_geodesic_point(&w, &w, 0.3), w);
    }

    #[test]
    fn tangent_matches_central_difference() {
        let u = FourVelocity::from_rapidity(&p(0.2, 0.9, -0.3), 0.7);
        let w = FourVelocity::from_rapidity(&p(-0.5, 0.1, 0.4), 1.6);
        let g = HyperbolicGeodesic::new(&u, &w);
        let h = 1e-5;
        for t in [0.1, 0.5, 0.9] {
            let fd = (g.point(t + h).vector() - g.point(t - h).vector()) / (2.0 * h);
            assert_relative_eq!(g.tangent(t), fd, epsilon = 1e-8);
            assert!(minkowski_dot(&g.tangent(t), &g.point(t).vector()).abs() < 1e-12);
        }
    }

    #[test]
    fn coplanarity_examples() {
        let n = p(0.3, -0.2, 0.9);
        let line: Vec<_> = [0.0, 0.5, 1.5]
            .iter()
            .map(|&a| FourVelocity::from_rapidity(&n, a))
            .collect();
        assert!(is_coplanar_h(&line, 1e-9).unwrap());

        let generic = vec![
            FourVelocity::rest(),
            FourVelocity::from_rapidity(&PoincarePoint::x_axis(), 1.0),
            FourVelocity::from_rapidity(&PoincarePoint::y_axis(), 1.0),
            FourVelocity::from_rapidity(&PoincarePoint::z_axis(), 1.0),
        ];
        assert!(!is_coplanar_h(&generic, 1e-9).unwrap());
        assert!(is_coplanar_h(&generic[..2], 1e-9).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn slerp_properties(a in unit_strategy(), b in unit_strategy(), t in 0.0f64..=1.0) {
            prop_assume!(a.dot(&b) > -0.999);
            let q = great_circle_point(&a, &b, t).unwrap();
            prop_assert!((q.vector().norm() - 1.0).abs() <= 1e-12);
            prop_assert!(q.vector().dot(&a.vector().cross(&b.vector())).abs() <= 1e-12);
            prop_assert!((a.angle_to(&q) - t * a.angle_to(&b)).abs() <= 1e-12);
        }

        #[test]
        fn triangle_matches_excess(a in unit_strategy(), b in unit_strategy(), c in unit_strategy()) {
            let tri = solid_angle_triangle(&a, &b, &c);
            prop_assume!(tri.abs() > 1e-6);
            prop_assert!((tri - excess(&a, &b, &c)).abs() <= 1e-10);
        }

        #[test]
        fn cevian_additivity(a in unit_strategy(), b in unit_strategy(), c in unit_strategy(), t in 0.05f64..0.95) {
            prop_assume!(b.dot(&c) > -0.99);
            let d = great_circle_point(&b, &c, t).unwrap();
            let whole = solid_angle_triangle(&a, &b, &c);
            let parts = solid_angle_triangle(&a, &b, &d) + solid_angle_triangle(&a, &d, &c);
            prop_assert!((whole - parts).abs() <= 1e-10);
        }

        #[test]
        fn fan_root_invariance(pts in prop::collection::vec(unit_strategy(), 5)) {
            let poly = SphericalPolyline::closed(pts);
            prop_assume!(poly.is_ok());
            let poly = poly.unwrap();
            let f0 = solid_angle_fan(&poly, 0).unwrap();
            let f2 = solid_angle_fan(&poly, 2).unwrap();
            let diff = (f0 - f2) / (2.0 * TAU);
            prop_assert!((diff - diff.round()).abs() * 2.0 * TAU <= 1e-10);
            let reduced = solid_angle_polyline(&poly).unwrap();
            let diff = (reduced - f0) / (2.0 * TAU);
            prop_assert!((diff - diff.round()).abs() * 2.0 * TAU <= 1e-10);
        }

        #[test]
        fn reversal_flips_sign(pts in prop::collection::vec(unit_strategy(), 3..7)) {
            let poly = SphericalPolyline::closed(pts);
            prop_assume!(poly.is_ok());
            let poly = poly.unwrap();
            let fwd = solid_angle_polyline(&poly).unwrap();
            prop_assume!(fwd.abs() < TAU - 1e-6);
            prop_assert_eq!(solid_angle_polyline(&poly.reversed()).unwrap(), -fwd);
        }

        #[test]
        fn geodesic_stays_on_hyperboloid(u in velocity_strategy(), w in velocity_strategy()) {
            let zeta = u.rapidity_to(&w);
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let q = hyperbolic_geodesic_point(&u, &w, t);
                prop_assert!((q.dot(&q) - 1.0).abs() <= 1e-12 * q.vector()[0] * q.vector()[0]);
                prop_assert!((u.rapidity_to(&q) - t * zeta).abs() <= 1e-10);
            }
            let end = hyperbolic_geodesic_point(&u, &w, 1.0);
            prop_assert!((end.vector() - w.vector()).norm() <= 1e-12 * w.vector()[0]);
        }
    }
}
