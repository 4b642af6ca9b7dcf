//! The Thomas-precession gauge field on the hyperboloid of four-velocities
//! and its path-ordered exponential around piecewise-geodesic loops.
//!
//! The gauge is the global section `u ↦ L(u)`, the pure boost taking the rest
//! frame to `u`. In it the connection one-form is
//! `A_ij = (u_i du_j − du_i u_j) / (1 + u⁰)` on Euclidean spatial components,
//! and transport along a curve is `W = P exp ∫ A`, later factors on the left.
//! Around a closed loop `W` equals `L(u₁)⁻¹ H L(u₁)`, where `H` is the ordered
//! product of the pure boosts along the edges.

use nalgebra::{Matrix3, Vector3, Vector4};

use crate::error::{domain, Error, Result};
use crate::geometry::{HyperbolicGeodesic, HyperbolicPolyline};
use crate::lorentz::{
    axis_angle_of, is_closed, minkowski_dot, polar_decompose, pure_boost_between, residual_rapidity, FourVelocity,
    LorentzMatrix, RotationResult,
};

/// Default number of midpoint steps per loop segment.
pub const DEFAULT_STEPS: usize = 4096;

/// Closure tolerance for the exact boost product around a loop.
pub const LOOP_CLOSURE_TOL: f64 = 1e-8;

/// An element of so(3): the connection evaluated on one tangent vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeValue(Matrix3<f64>);

impl GaugeValue {
    pub fn matrix(&self) -> Matrix3<f64> {
        self.0
    }

    /// `(a₃₂, a₁₃, a₂₁)`; the rotation generated by `exp(a)` is about this vector.
    pub fn vee(&self) -> Vector3<f64> {
        Vector3::new(self.0[(2, 1)], self.0[(0, 2)], self.0[(1, 0)])
    }
}

fn connection(u: &Vector4<f64>, du: &Vector4<f64>) -> Matrix3<f64> {
    let mut a = Matrix3::zeros();
    let scale = 1.0 / (1.0 + u[0]);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = (u[i + 1] * du[j + 1] - du[i + 1] * u[j + 1]) * scale;
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    debug_assert_eq!(a, -a.transpose());
    a
}

/// The Thomas-precession connection at `u` on the tangent vector `du`.
pub fn gauge_field(u: &FourVelocity, du: &Vector4<f64>) -> Result<GaugeValue> {
    let uv = u.vector();
    let tangency = minkowski_dot(&uv, du);
    if !tangency.is_finite() || tangency.abs() > 1e-9 * (uv.norm() * du.norm()).max(1.0) {
        return domain(format!(
            "vector is not tangent to the hyperboloid (u·du = {tangency:.3e})"
        ));
    }
    Ok(GaugeValue(connection(&uv, du)))
}

/// `exp(a)` for antisymmetric `a`, by Rodrigues' formula.
pub fn so3_exp(a: &Matrix3<f64>) -> Matrix3<f64> {
    let w = Vector3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)]);
    let theta2 = w.norm_squared();
    let (s, c) = if theta2 < 1e-8 {
        // Taylor coefficients of sin θ / θ and (1 − cos θ) / θ².
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Matrix3::identity() + a * s + a * a * c
}

/// Path-ordered transport along the geodesic from `u_start` to `u_end`,
/// midpoint rule with `steps` exact so(3) exponentials.
pub fn wilson_segment(u_start: &FourVelocity, u_end: &FourVelocity, steps: usize) -> Result<Matrix3<f64>> {
    if steps == 0 {
        return domain("a Wilson segment needs at least one step");
    }
    if u_start == u_end {
        return Ok(Matrix3::identity());
    }
    let geodesic = HyperbolicGeodesic::new(u_start, u_end);
    let dt = 1.0 / steps as f64;
    let mut w = Matrix3::identity();
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let a = connection(&geodesic.point(t).vector(), &geodesic.tangent(t));
        w = so3_exp(&(a * dt)) * w;
    }
    Ok(w)
}

fn require_closed(c: &HyperbolicPolyline) -> Result<()> {
    if c.is_closed() {
        Ok(())
    } else {
        domain("loop integral needs a closed polyline")
    }
}

/// Ordered product of [`wilson_segment`] around a closed polyline.
pub fn wilson_loop_matrix(c: &HyperbolicPolyline, steps_per_segment: usize) -> Result<Matrix3<f64>> {
    require_closed(c)?;
    c.segments().try_fold(Matrix3::identity(), |acc, (u, w)| {
        Ok(wilson_segment(&u, &w, steps_per_segment)? * acc)
    })
}

pub fn wilson_loop(c: &HyperbolicPolyline, steps_per_segment: usize) -> Result<RotationResult> {
    Ok(axis_angle_of(&wilson_loop_matrix(c, steps_per_segment)?))
}

/// Ordered product of the pure boosts along the edges of a loop.
pub fn loop_holonomy(c: &HyperbolicPolyline) -> Result<LorentzMatrix> {
    require_closed(c)?;
    Ok(c.segments().fold(LorentzMatrix::identity(), |acc, (u, w)| {
        pure_boost_between(&u, &w) * acc
    }))
}

/// The exact Thomas rotation of a loop, as a 3×3 matrix in the frame of the
/// first vertex.
pub fn exact_loop_matrix(c: &HyperbolicPolyline) -> Result<Matrix3<f64>> {
    let h = loop_holonomy(c)?;
    let base = c.vertices()[0];
    if !is_closed(&h, &base, LOOP_CLOSURE_TOL * base.vector()[0]) {
        return Err(Error::Consistency(format!(
            "boost product around the loop does not return to its start (residual {:.3e})",
            (h.matrix() * base.vector() - base.vector()).norm()
        )));
    }
    let frame = pure_boost_between(&FourVelocity::rest(), &base);
    let local = frame.inverse() * h * frame;
    let (boost, rotation) = polar_decompose(&local);
    let residual = residual_rapidity(&boost);
    if residual > LOOP_CLOSURE_TOL {
        return Err(Error::Consistency(format!(
            "loop holonomy retains a boost of rapidity {residual:.3e}"
        )));
    }
    Ok(rotation.spatial_block())
}

pub fn exact_loop_rotation(c: &HyperbolicPolyline) -> Result<RotationResult> {
    Ok(axis_angle_of(&exact_loop_matrix(c)?))
}

/// Fan triangulation of a loop from its first vertex, in traversal order.
pub fn fan_triangles(c: &HyperbolicPolyline) -> Result<Vec<HyperbolicPolyline>> {
    require_closed(c)?;
    let v = c.vertices();
    (1..v.len().saturating_sub(1))
        .map(|k| HyperbolicPolyline::closed(vec![v[0], v[k], v[k + 1]]))
        .collect()
}

/// Thomas rotations of the fan triangles composed in traversal order
/// (later triangles on the left). Equals [`exact_loop_matrix`] of the loop.
pub fn composed_fan_rotation(c: &HyperbolicPolyline) -> Result<Matrix3<f64>> {
    fan_triangles(c)?
        .iter()
        .try_fold(Matrix3::identity(), |acc, t| Ok(exact_loop_matrix(t)? * acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jones::PoincarePoint;
    use crate::lorentz::boost_matrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_strategy() -> impl Strategy<Value = PoincarePoint> {
        (-1.0f64..=1.0, 0.0..std::f64::consts::TAU).prop_map(|(z, phi)| PoincarePoint::from_angles(z.acos(), phi))
    }

    fn z_then_x_triangle() -> HyperbolicPolyline {
        let u2 = FourVelocity::from_rapidity(&PoincarePoint::z_axis(), 1.0);
        // x-directed leg of rapidity 1 in the frame of u2.
        let frame = pure_boost_between(&FourVelocity::rest(), &u2);
        let u3 = crate::lorentz::apply_to_velocity(&frame, &FourVelocity::from_rapidity(&PoincarePoint::x_axis(), 1.0));
        HyperbolicPolyline::closed(vec![FourVelocity::rest(), u2, u3]).unwrap()
    }

    fn nonplanar_square() -> HyperbolicPolyline {
        HyperbolicPolyline::closed(vec![
            FourVelocity::rest(),
            FourVelocity::from_rapidity(&PoincarePoint::x_axis(), 1.0),
            FourVelocity::from_rapidity(&PoincarePoint::y_axis(), 1.0),
            FourVelocity::from_rapidity(&PoincarePoint::z_axis(), 1.0),
        ])
        .unwrap()
    }

    fn op_dist(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn gauge_vanishes_trivially() {
        let u = FourVelocity::from_rapidity(&PoincarePoint::y_axis(), 0.4);
        assert_eq!(gauge_field(&u, &Vector4::zeros()).unwrap().matrix(), Matrix3::zeros());
        let rest = FourVelocity::rest();
        assert_eq!(
            gauge_field(&rest, &Vector4::new(0.0, 0.3, -1.0, 2.0)).unwrap().matrix(),
            Matrix3::zeros()
        );
        assert!(gauge_field(&rest, &Vector4::new(1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn gauge_matches_small_triangle_holonomy() {
        // u moving along x; du the tangent of a z boost applied to u.
        let u = FourVelocity::new(1f64.cosh(), 1f64.sinh(), 0.0, 0.0).unwrap();
        let du = Vector4::new(0.0, 0.0, 0.0, 1f64.cosh());
        let a = gauge_field(&u, &du).unwrap().matrix();
        assert!(a[(0, 2)].abs() > 0.1);
        assert_eq!(a[(0, 1)], 0.0);
        assert_eq!(a[(1, 2)], 0.0);

        // Exact transport over the geodesic u → u + ε du in the section gauge is
        // the holonomy of the triangle (rest, u, u_ε); its first-order term is A.
        let gen = |eps: f64| {
            let end =
                FourVelocity::from_vector(boost_matrix(&PoincarePoint::z_axis(), eps).matrix() * u.vector()).unwrap();
            let tri = HyperbolicPolyline::closed(vec![FourVelocity::rest(), u, end]).unwrap();
            // Rest-frame transport around the triangle: L(u_ε)⁻¹ B(u→u_ε) L(u).
            let h = exact_loop_matrix(&tri).unwrap();
            (h - Matrix3::identity()) / eps
        };
        let eps = 1e-3;
        let richardson = gen(eps / 2.0) * 2.0 - gen(eps);
        assert_relative_eq!(richardson, a, epsilon = 1e-6);
    }

    #[test]
    fn segment_examples() {
        let u = FourVelocity::from_rapidity(&PoincarePoint::x_axis(), 0.8);
        assert_eq!(wilson_segment(&u, &u, 10).unwrap(), Matrix3::identity());
        assert!(wilson_segment(&u, &FourVelocity::rest(), 0).is_err());

        let w = FourVelocity::from_rapidity(&PoincarePoint::normalized(Vector3::new(0.2, 1.0, -0.4)).unwrap(), 1.5);
        let seg = wilson_segment(&FourVelocity::rest(), &w, 1000).unwrap();
        assert!((seg.transpose() * seg - Matrix3::identity()).norm() < 1e-9);
        // A radial segment from the rest frame carries no rotation in this gauge.
        assert!(op_dist(&seg, &Matrix3::identity()) < 1e-12);

        let seg = wilson_segment(&u, &w, 1000).unwrap();
        assert!((seg.transpose() * seg - Matrix3::identity()).norm() < 1e-9);
        assert!(op_dist(&seg, &Matrix3::identity()) > 1e-3);
    }

    #[test]
    fn segment_converges_at_second_order() {
        let u = FourVelocity::from_rapidity(&PoincarePoint::x_axis(), 0.8);
        let w = FourVelocity::from_rapidity(&PoincarePoint::normalized(Vector3::new(0.2, 1.0, -0.4)).unwrap(), 1.5);
        let n = 32;
        let reference = wilson_segment(&u, &w, 16 * n).unwrap();
        let e1 = op_dist(&wilson_segment(&u, &w, n).unwrap(), &reference);
        let e2 = op_dist(&wilson_segment(&u, &w, 2 * n).unwrap(), &reference);
        // The reference carries 1/256 of the coarse error, so the ratio is (1 − 1/256)/(1/4 − 1/256).
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");

        let exact = pure_boost_between(&FourVelocity::rest(), &w).inverse()
            * pure_boost_between(&u, &w)
            * pure_boost_between(&FourVelocity::rest(), &u);
        let exact = LorentzMatrix::matrix(&exact).fixed_view::<3, 3>(1, 1).into_owned();
        assert!(op_dist(&wilson_segment(&u, &w, 4096).unwrap(), &exact) < 1e-7);
    }

    #[test]
    fn loop_examples() {
        let u = FourVelocity::from_rapidity(&PoincarePoint::y_axis(), 0.6);
        let same = HyperbolicPolyline::closed(vec![u, u, u]).unwrap();
        assert_eq!(wilson_loop(&same, 16).unwrap().angle, 0.0);

        let tri = z_then_x_triangle();
        let exact = exact_loop_rotation(&tri).unwrap();
        let wil = wilson_loop(&tri, 10_000).unwrap();
        assert!((wil.angle - exact.angle).abs() < 1e-6);
        assert!(exact.angle > 0.1);

        let open = HyperbolicPolyline::new(tri.vertices().to_vec(), false).unwrap();
        assert!(wilson_loop(&open, 10).is_err());
        assert!(exact_loop_rotation(&open).is_err());
    }

    #[test]
    fn exact_loop_examples() {
        let u = FourVelocity::from_rapidity(&PoincarePoint::normalized(Vector3::new(1.0, -2.0, 0.5)).unwrap(), 1.2);
        let there_and_back = HyperbolicPolyline::closed(vec![FourVelocity::rest(), u]).unwrap();
        assert!(exact_loop_rotation(&there_and_back).unwrap().angle < 1e-12);

        let n = PoincarePoint::normalized(Vector3::new(0.3, 0.3, -0.9)).unwrap();
        let line = HyperbolicPolyline::closed(vec![
            FourVelocity::rest(),
            FourVelocity::from_rapidity(&n, 0.7),
            FourVelocity::from_rapidity(&n, 1.9),
        ])
        .unwrap();
        assert!(exact_loop_rotation(&line).unwrap().angle < 1e-12);
    }

    #[test]
    fn nonplanar_loop_needs_ordering() {
        let sq = nonplanar_square();
        let exact = exact_loop_matrix(&sq).unwrap();
        let composed = composed_fan_rotation(&sq).unwrap();
        assert!(op_dist(&exact, &composed) < 1e-9);
        let wil = wilson_loop_matrix(&sq, 10_000).unwrap();
        assert!(op_dist(&wil, &exact) < 1e-6);

        let tris = fan_triangles(&sq).unwrap();
        let (r1, r2) = (
            exact_loop_matrix(&tris[0]).unwrap(),
            exact_loop_matrix(&tris[1]).unwrap(),
        );
        assert!(op_dist(&(r2 * r1), &(r1 * r2)) > 1e-3);
        let abelian = axis_angle_of(&r1).angle + axis_angle_of(&r2).angle;
        assert!((axis_angle_of(&exact).angle - abelian).abs() > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn wilson_converges_to_exact(n1 in unit_strategy(), n2 in unit_strategy(), a in 0.2f64..2.0, b in 0.2f64..2.0) {
            let tri = HyperbolicPolyline::closed(vec![
                FourVelocity::rest(),
                FourVelocity::from_rapidity(&n1, a),
                FourVelocity::from_rapidity(&n2, b),
            ]).unwrap();
            let exact = exact_loop_matrix(&tri).unwrap();
            let e1 = op_dist(&wilson_loop_matrix(&tri, 64).unwrap(), &exact);
            let e2 = op_dist(&wilson_loop_matrix(&tri, 128).unwrap(), &exact);
            prop_assume!(e1 > 1e-11);
            let order = (e1 / e2).log2();
            prop_assert!((1.8..=2.2).contains(&order), "order {}", order);
        }

        #[test]
        fn basepoint_and_reversal(n1 in unit_strategy(), n2 in unit_strategy(), n3 in unit_strategy(), a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.1f64..2.0) {
            let lp = HyperbolicPolyline::closed(vec![
                FourVelocity::from_rapidity(&n1, a),
                FourVelocity::from_rapidity(&n2, b),
                FourVelocity::from_rapidity(&n3, c),
                FourVelocity::rest(),
            ]).unwrap();
            let r = exact_loop_rotation(&lp).unwrap();
            for k in 1..4 {
                let shifted = exact_loop_rotation(&lp.rotated_start(k)).unwrap();
                prop_assert!((shifted.angle - r.angle).abs() <= 1e-9);
            }
            let fwd = exact_loop_matrix(&lp).unwrap();
            let back = exact_loop_matrix(&lp.reversed().rotated_start(3)).unwrap();
            prop_assert!(op_dist(&(back * fwd), &Matrix3::identity()) <= 1e-9);
        }
    }
}
