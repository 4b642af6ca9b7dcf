//! Jones calculus: polarization states as complex 2-vectors, optical elements
//! as complex 2×2 matrices, and the exact maps to and from the Poincaré sphere.
//!
//! Conventions:
//!
//! * the Stokes direction of a state `v` is `⟨v|σ|v⟩ / ⟨v|v⟩` with `σ` the
//!   standard Pauli matrices, so `(1, 0)` sits at `+z` and `(1, 1)` at `+x`;
//! * in that basis `v = (1, z)` with `z = tan(θ/2) e^{iφ}`, θ the colatitude
//!   and φ the longitude of the state;
//! * states are never normalised implicitly. Intensity changes are reported
//!   as a separate scalar.

use std::ops::Mul;

use nalgebra::{Matrix2, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Tolerance on `|s| - 1` accepted by [`PoincarePoint::new`].
pub const UNIT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A unit vector on the Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincarePoint(Vector3<f64>);

impl PoincarePoint {
    /// Builds a point from components that must already have unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_unit(Vector3::new(x, y, z))
    }

    pub fn from_unit(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return domain(format!("Poincaré point must be a unit vector, |s| = {n}"));
        }
        Ok(Self(v))
    }

    /// Normalises an arbitrary nonzero vector onto the sphere.
    pub fn normalized(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return domain("cannot normalise a zero or non-finite vector onto the sphere");
        }
        Ok(Self(v / n))
    }

    /// Skips validation; callers guarantee unit length up to rounding.
    pub(crate) fn from_unit_unchecked(v: Vector3<f64>) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9, "not a unit vector: {v:?}");
        Self(v)
    }

    /// Point with colatitude `theta` and longitude `phi`, both in radians.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self(Vector3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ))
    }

    pub fn x_axis() -> Self {
        Self(Vector3::x())
    }

    pub fn y_axis() -> Self {
        Self(Vector3::y())
    }

    pub fn z_axis() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.dot(&other.0)
    }

    /// The orthogonal polarization state.
    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    /// Great-circle distance in radians.
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.0.cross(&other.0).norm().atan2(self.0.dot(&other.0))
    }
}

/// An unnormalised Jones vector `(c0, c1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector(Vector2<Complex64>);

impl JonesVector {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        Self::from_vector(Vector2::new(c0, c1))
    }

    pub fn from_vector(v: Vector2<Complex64>) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return domain("Jones vector has non-finite components");
        }
        if v[0] == ZERO && v[1] == ZERO {
            return domain("Jones vector must be nonzero");
        }
        Ok(Self(v))
    }

    pub fn vector(&self) -> Vector2<Complex64> {
        self.0
    }

    pub fn c0(&self) -> Complex64 {
        self.0[0]
    }

    pub fn c1(&self) -> Complex64 {
        self.0[1]
    }

    /// `⟨v|v⟩`.
    pub fn intensity(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn scaled(&self, k: Complex64) -> Result<Self> {
        Self::from_vector(self.0 * k)
    }

    pub(crate) fn normalized(&self) -> Self {
        Self(self.0 / Complex64::from(self.intensity().sqrt()))
    }
}

/// A complex 2×2 optical operator, meaningful up to an overall complex scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(Matrix2<Complex64>);

impl JonesMatrix {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn from_matrix(m: Matrix2<Complex64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        self.0
    }

    pub fn det(&self) -> Complex64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        Self(self.0 * k)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        JonesMatrix(self.0 * rhs.0)
    }
}

/// The three trace-free Hermitian basis matrices `σx, σy, σz`.
pub fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// An elliptic dichroic element.
///
/// The state `axis` is attenuated in amplitude by `e^{-α₁}` and the orthogonal
/// state by `e^{-α₂}`, with `alpha = α₂ - α₁` (the rapidity of the equivalent
/// boost) and `alpha0 = (α₁ + α₂)/2`. Both are in nepers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberSpec {
    pub axis: PoincarePoint,
    pub alpha: f64,
    pub alpha0: f64,
}

impl AbsorberSpec {
    pub fn new(axis: PoincarePoint, alpha: f64, alpha0: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return domain(format!("relative absorption must be finite and >= 0, got {alpha}"));
        }
        if !alpha0.is_finite() || alpha0 < 0.0 {
            return domain(format!("overall absorption must be finite and >= 0, got {alpha0}"));
        }
        Ok(Self { axis, alpha, alpha0 })
    }

    /// From the amplitude attenuations of the favoured and the orthogonal state.
    pub fn from_attenuations(axis: PoincarePoint, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(axis, alpha2 - alpha1, 0.5 * (alpha1 + alpha2))
    }

    /// A purely relative absorber (`alpha0 = 0`).
    pub fn lossless(axis: PoincarePoint, alpha: f64) -> Result<Self> {
        Self::new(axis, alpha, 0.0)
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha0 - 0.5 * self.alpha
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha0 + 0.5 * self.alpha
    }

    /// The same element with both coefficients scaled by `t`.
    /// `A(tα) A((1-t)α) = A(α)`, so this is a point along the element's one-parameter semigroup.
    pub fn fraction(&self, t: f64) -> Self {
        Self {
            axis: self.axis,
            alpha: self.alpha * t,
            alpha0: self.alpha0 * t,
        }
    }

    pub fn matrix(&self) -> JonesMatrix {
        absorber_matrix(self)
    }
}

/// An elliptic birefringent element: a rotation of the sphere by `delta` about `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetarderSpec {
    pub axis: PoincarePoint,
    pub delta: f64,
}

impl RetarderSpec {
    pub fn new(axis: PoincarePoint, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return domain(format!("retardance must be finite, got {delta}"));
        }
        Ok(Self { axis, delta })
    }

    pub fn fraction(&self, t: f64) -> Self {
        Self {
            axis: self.axis,
            delta: self.delta * t,
        }
    }

    pub fn matrix(&self) -> JonesMatrix {
        retarder_matrix(self)
    }
}

/// Any element that can be placed in a beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    Absorber(AbsorberSpec),
    Retarder(RetarderSpec),
}

impl Element {
    pub fn matrix(&self) -> JonesMatrix {
        match self {
            Element::Absorber(a) => a.matrix(),
            Element::Retarder(r) => r.matrix(),
        }
    }

    pub fn fraction(&self, t: f64) -> Self {
        match self {
            Element::Absorber(a) => Element::Absorber(a.fraction(t)),
            Element::Retarder(r) => Element::Retarder(r.fraction(t)),
        }
    }

    pub fn axis(&self) -> PoincarePoint {
        match self {
            Element::Absorber(a) => a.axis,
            Element::Retarder(r) => r.axis,
        }
    }

    pub fn as_absorber(&self) -> Option<&AbsorberSpec> {
        match self {
            Element::Absorber(a) => Some(a),
            Element::Retarder(_) => None,
        }
    }
}

impl From<AbsorberSpec> for Element {
    fn from(a: AbsorberSpec) -> Self {
        Element::Absorber(a)
    }
}

impl From<RetarderSpec> for Element {
    fn from(r: RetarderSpec) -> Self {
        Element::Retarder(r)
    }
}

/// Unit Stokes direction of a Jones vector. Invariant under complex rescaling of `v`.
pub fn poincare_of_jones(v: &JonesVector) -> PoincarePoint {
    let (c0, c1) = (v.c0(), v.c1());
    let cross = c0.conj() * c1;
    let s = Vector3::new(2.0 * cross.re, 2.0 * cross.im, c0.norm_sqr() - c1.norm_sqr());
    PoincarePoint::from_unit_unchecked(s / s.norm())
}

/// Normalised Jones representative of a point.
///
/// The phase section is fixed by a real non-negative first component; the
/// south pole, where that component vanishes, maps to `(0, 1)`.
pub fn jones_of_poincare(p: &PoincarePoint) -> JonesVector {
    let (x, y, z) = (p.x(), p.y(), p.z());
    let r = x.hypot(y);
    if r == 0.0 {
        return if z > 0.0 {
            JonesVector(Vector2::new(ONE, ZERO))
        } else {
            JonesVector(Vector2::new(ZERO, ONE))
        };
    }
    let phase = Complex64::new(x / r, y / r);
    // cos(θ/2) and sin(θ/2), each from the better-conditioned half-angle form.
    let (cos_half, sin_half) = if z >= 0.0 {
        let c = (0.5 * (1.0 + z)).sqrt();
        (c, r / (2.0 * c))
    } else {
        let s = (0.5 * (1.0 - z)).sqrt();
        (r / (2.0 * s), s)
    };
    JonesVector(Vector2::new(Complex64::new(cos_half, 0.0), phase * sin_half))
}

/// Like [`jones_of_poincare`], rejecting inputs that are not unit vectors.
pub fn jones_of_vector(s: Vector3<f64>) -> Result<JonesVector> {
    Ok(jones_of_poincare(&PoincarePoint::from_unit(s)?))
}

/// Orthonormal eigenbasis `(|n>, |s>)` of an axis, `|s>` representing the antipode.
fn eigenbasis(axis: &PoincarePoint) -> (Vector2<Complex64>, Vector2<Complex64>) {
    let n = jones_of_poincare(axis).vector();
    let s = Vector2::new(-n[1].conj(), n[0].conj());
    (n, s)
}

fn spectral(axis: &PoincarePoint, on_axis: Complex64, off_axis: Complex64) -> JonesMatrix {
    let (n, s) = eigenbasis(axis);
    JonesMatrix(n * n.adjoint() * on_axis + s * s.adjoint() * off_axis)
}

/// `diag(e^{-α₁}, e^{-α₂})` written in the eigenbasis of the absorber axis.
pub fn absorber_matrix(a: &AbsorberSpec) -> JonesMatrix {
    spectral(
        &a.axis,
        Complex64::new((-a.alpha1()).exp(), 0.0),
        Complex64::new((-a.alpha2()).exp(), 0.0),
    )
}

/// Unitary `exp(-i δ/2 n·σ)`; rotates the sphere by `delta` counterclockwise about the axis.
pub fn retarder_matrix(r: &RetarderSpec) -> JonesMatrix {
    let half = 0.5 * r.delta;
    spectral(
        &r.axis,
        Complex64::from_polar(1.0, -half),
        Complex64::from_polar(1.0, half),
    )
}

/// `m·v` together with the intensity ratio `|m·v|² / |v|²`.
pub fn apply_element(m: &JonesMatrix, v: &JonesVector) -> Result<(JonesVector, f64)> {
    let out = JonesVector::from_vector(m.0 * v.0)
        .map_err(|_| Error::Domain("element annihilated the state (singular Jones matrix)".into()))?;
    let ratio = out.intensity() / v.intensity();
    Ok((out, ratio))
}

/// Action of a Jones matrix on the Poincaré sphere.
pub fn induced_sphere_map(m: &JonesMatrix, p: &PoincarePoint) -> Result<PoincarePoint> {
    let (out, _) = apply_element(m, &jones_of_poincare(p))?;
    Ok(poincare_of_jones(&out))
}
