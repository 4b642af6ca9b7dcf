//! Proper orthochronous Lorentz transformations with metric `diag(1, -1, -1, -1)`.
//!
//! The covering map sends a Jones matrix `m` to the transformation of Stokes
//! four-vectors `(S0, S1, S2, S3)` induced by `ρ ↦ m ρ m†`. Absorbers become
//! pure boosts with rapidity equal to their relative absorption and retarders
//! become spatial rotations.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Unit, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::jones::{pauli, JonesMatrix, PoincarePoint};

/// Tolerance on the hyperboloid constraint `u·u = 1`.
pub const VELOCITY_TOL: f64 = 1e-10;
/// Tolerance on `LᵀηL = η`, relative to `max(1, |L|²)`.
pub const METRIC_TOL: f64 = 1e-9;

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Minkowski inner product.
pub fn minkowski_dot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

fn spatial(v: &Vector4<f64>) -> Vector3<f64> {
    Vector3::new(v[1], v[2], v[3])
}

/// A point of the unit hyperboloid `u·u = 1, u⁰ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVelocity(Vector4<f64>);

impl FourVelocity {
    pub fn new(u0: f64, u1: f64, u2: f64, u3: f64) -> Result<Self> {
        Self::from_vector(Vector4::new(u0, u1, u2, u3))
    }

    pub fn from_vector(u: Vector4<f64>) -> Result<Self> {
        let norm = minkowski_dot(&u, &u);
        if u[0] <= 0.0 || !norm.is_finite() || (norm - 1.0).abs() > VELOCITY_TOL * u[0] * u[0] {
            return domain(format!("not a future unit timelike vector: {u:?} (u·u = {norm})"));
        }
        Ok(Self(u))
    }

    pub(crate) fn from_vector_unchecked(u: Vector4<f64>) -> Self {
        Self(u)
    }

    /// The rest frame `(1, 0, 0, 0)`.
    pub fn rest() -> Self {
        Self(Vector4::new(1.0, 0.0, 0.0, 0.0))
    }

    /// `(cosh α, sinh α · axis)`.
    pub fn from_rapidity(axis: &PoincarePoint, rapidity: f64) -> Self {
        let n = axis.vector() * rapidity.sinh();
        Self(Vector4::new(rapidity.cosh(), n.x, n.y, n.z))
    }

    /// Completes a spatial part (`γβ`) to a four-velocity.
    pub fn from_spatial(v: Vector3<f64>) -> Self {
        Self(Vector4::new((1.0 + v.norm_squared()).sqrt(), v.x, v.y, v.z))
    }

    pub fn vector(&self) -> Vector4<f64> {
        self.0
    }

    pub fn spatial(&self) -> Vector3<f64> {
        spatial(&self.0)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        minkowski_dot(&self.0, &other.0)
    }

    /// Hyperbolic distance, `arccosh(u·w)`, evaluated without cancellation near zero.
    pub fn rapidity_to(&self, other: &Self) -> f64 {
        let c = self.dot(other).max(1.0);
        let d = other.0 - self.0 * c;
        (-minkowski_dot(&d, &d)).max(0.0).sqrt().asinh()
    }
}

/// A proper orthochronous Lorentz transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    /// Validates `LᵀηL = η`, `det L = 1` and `L⁰₀ ≥ 1`.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let scale = m.norm_squared().max(1.0);
        let metric_err = (m.transpose() * eta() * m - eta()).abs().max();
        if !metric_err.is_finite() || metric_err > METRIC_TOL * scale {
            return domain(format!(
                "matrix does not preserve the Minkowski metric (error {metric_err:.3e})"
            ));
        }
        if m[(0, 0)] < 1.0 - METRIC_TOL * scale {
            return domain("transformation is not orthochronous");
        }
        if m.determinant() < 0.0 {
            return domain("transformation is not proper");
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Embeds a 3×3 rotation as a spatial Lorentz transformation.
    pub fn from_rotation(r: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        Self(m)
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        self.0
    }

    pub fn spatial_block(&self) -> Matrix3<f64> {
        self.0.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// `η Lᵀ η`, exact for any group element.
    pub fn inverse(&self) -> Self {
        Self(eta() * self.0.transpose() * eta())
    }

    /// Image of the rest frame, `L·(1, 0, 0, 0)`.
    pub fn boost_image(&self) -> FourVelocity {
        FourVelocity(self.0.column(0).into_owned())
    }

    /// Largest entry of `|LᵀηL − η|`.
    pub fn metric_error(&self) -> f64 {
        (self.0.transpose() * eta() * self.0 - eta()).abs().max()
    }

    /// Metric Gram–Schmidt on the columns. Removes drift accumulated over long products.
    pub fn reorthogonalized(&self) -> Self {
        let g = eta();
        let mut cols: [Vector4<f64>; 4] = [
            self.0.column(0).into_owned(),
            self.0.column(1).into_owned(),
            self.0.column(2).into_owned(),
            self.0.column(3).into_owned(),
        ];
        for k in 0..4 {
            for j in 0..k {
                let gjj = g[(j, j)];
                let proj = minkowski_dot(&cols[j], &cols[k]) * gjj;
                let cj = cols[j];
                cols[k] -= cj * proj;
            }
            let n = minkowski_dot(&cols[k], &cols[k]).abs().sqrt();
            cols[k] /= n;
        }
        Self(Matrix4::from_columns(&cols))
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;

    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }
}

/// Axis and angle of a spatial rotation; `angle ∈ [0, π]`.
///
/// When the angle is `0` the axis is `+x`. When it is `π` the axis is
/// oriented so that its first nonzero component is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationResult {
    pub axis: PoincarePoint,
    pub angle: f64,
}

impl RotationResult {
    pub fn identity() -> Self {
        Self {
            axis: PoincarePoint::x_axis(),
            angle: 0.0,
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        nalgebra::Rotation3::from_axis_angle(&Unit::new_unchecked(self.axis.vector()), self.angle).into_inner()
    }

    /// Angle of rotation measured counterclockwise about `reference`; in `(-π, π]`.
    pub fn signed_angle_about(&self, reference: &PoincarePoint) -> f64 {
        if self.axis.dot(reference) < 0.0 {
            -self.angle
        } else {
            self.angle
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            axis: self.axis.antipode(),
            angle: self.angle,
        }
    }
}

/// Pure boost with rapidity `rapidity` along `axis`; sends the rest frame to
/// `(cosh α, sinh α · axis)`.
pub fn boost_matrix(axis: &PoincarePoint, rapidity: f64) -> LorentzMatrix {
    let n = axis.vector();
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut m = Matrix4::identity();
    m[(0, 0)] = ch;
    for i in 0..3 {
        m[(0, i + 1)] = sh * n[i];
        m[(i + 1, 0)] = sh * n[i];
        for j in 0..3 {
            m[(i + 1, j + 1)] += (ch - 1.0) * n[i] * n[j];
        }
    }
    LorentzMatrix(m)
}

/// Image of a Jones matrix under the SL(2,C) → SO(3,1) covering map:
/// `Λ^μ_ν = ½ tr(σ_μ m σ_ν m†) / |det m|`.
pub fn lorentz_of_jones(m: &JonesMatrix) -> Result<LorentzMatrix> {
    let det = m.det().norm();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Domain(
            "singular Jones matrix (projector) has no Lorentz image".into(),
        ));
    }
    let [sx, sy, sz] = pauli();
    let basis = [nalgebra::Matrix2::identity(), sx, sy, sz];
    let a = m.matrix();
    let ad = a.adjoint();
    let mut out = Matrix4::zeros();
    for nu in 0..4 {
        let image = a * basis[nu] * ad;
        for mu in 0..4 {
            let t: Complex64 = (basis[mu] * image).trace();
            out[(mu, nu)] = 0.5 * t.re / det;
        }
    }
    LorentzMatrix::new(out)
}

pub fn apply_to_velocity(l: &LorentzMatrix, u: &FourVelocity) -> FourVelocity {
    FourVelocity(l.0 * u.0)
}

/// The boost from `u` to `w` that fixes every vector Minkowski-orthogonal to
/// both: `I + 2 w uᵀη − (u+w)(u+w)ᵀη / (1 + u·w)`.
///
/// Its rapidity is `arccosh(u·w)`. When `u` is the rest frame the result is
/// the symmetric matrix [`boost_matrix`] along the direction of `w`.
pub fn pure_boost_between(u: &FourVelocity, w: &FourVelocity) -> LorentzMatrix {
    if u == w {
        return LorentzMatrix::identity();
    }
    let c = u.dot(w).max(1.0);
    let (uv, wv) = (u.0, w.0);
    let g = eta();
    let s = uv + wv;
    let m = Matrix4::identity() + (wv * uv.transpose() * 2.0 - s * s.transpose() / (1.0 + c)) * g;
    LorentzMatrix(m)
}

/// `L = boost · rotation` with `boost` pure and `rotation` spatial.
pub fn polar_decompose(l: &LorentzMatrix) -> (LorentzMatrix, LorentzMatrix) {
    let boost = pure_boost_between(&FourVelocity::rest(), &l.boost_image());
    let rotation = boost.inverse() * *l;
    (boost, rotation)
}

/// Axis and angle of a spatial rotation.
pub fn rotation_axis_angle(rotation: &LorentzMatrix) -> Result<RotationResult> {
    let m = rotation.0;
    let off = (1..4)
        .map(|i| m[(0, i)].abs().max(m[(i, 0)].abs()))
        .fold((m[(0, 0)] - 1.0).abs(), f64::max);
    if off > METRIC_TOL {
        return domain(format!(
            "not a spatial rotation (time row/column deviates by {off:.3e})"
        ));
    }
    Ok(axis_angle_of(&rotation.spatial_block()))
}

/// Axis and angle of a 3×3 rotation matrix.
pub fn axis_angle_of(r: &Matrix3<f64>) -> RotationResult {
    let w = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let cos = 0.5 * (r.trace() - 1.0);
    let sin = 0.5 * w.norm();
    let angle = sin.atan2(cos);
    if sin == 0.0 && cos >= 0.0 {
        return RotationResult::identity();
    }
    let axis = if cos >= 0.0 {
        w / w.norm()
    } else {
        // The antisymmetric part degrades near π; read the axis from
        // n nᵀ = (R + Rᵀ − 2 cos θ I) / (2 (1 − cos θ)) instead.
        let sym = (r + r.transpose() - Matrix3::identity() * (2.0 * cos)) / (2.0 * (1.0 - cos));
        let k = (0..3).max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)])).unwrap_or(0);
        let mut n: Vector3<f64> = sym.column(k).into_owned();
        n /= n.norm();
        let flip = if w.norm() > 1e-14 {
            n.dot(&w) < 0.0
        } else {
            first_nonzero_negative(&n)
        };
        if flip {
            n = -n;
        }
        n
    };
    RotationResult {
        axis: PoincarePoint::from_unit_unchecked(axis / axis.norm()),
        angle,
    }
}

fn first_nonzero_negative(n: &Vector3<f64>) -> bool {
    n.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
}

/// `|L·u1 − u1| ≤ tol` (Euclidean norm of the difference).
pub fn is_closed(l: &LorentzMatrix, u1: &FourVelocity, tol: f64) -> bool {
    (l.0 * u1.0 - u1.0).norm() <= tol
}

/// Rapidity of the boost part of `l`.
pub fn residual_rapidity(l: &LorentzMatrix) -> f64 {
    l.boost_image().spatial().norm().asinh()
}
