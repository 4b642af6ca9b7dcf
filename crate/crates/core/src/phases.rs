//! Closed absorber sequences, their fixed polarization states and the
//! Pancharatnam phases those states acquire.
//!
//! A closed sequence acts on the sphere as a pure rotation. When its axes are
//! coplanar the rotation is about the normal `n` of that plane; `n` and its
//! antipode `s` return to themselves after being dragged around two mirror-image
//! geodesic triangles, and the rotation angle equals the solid angle `|Ω|` of
//! either triangle. The `n` state picks up the Pancharatnam phase `−Ω/2`,
//! the `s` state `+Ω/2`.

use std::f64::consts::{LN_10, PI};

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::geometry::{solid_angle_polyline, solid_angle_triangle, HyperbolicPolyline, SphericalPolyline};
use crate::jones::{induced_sphere_map, jones_of_poincare, AbsorberSpec, JonesMatrix, JonesVector, PoincarePoint};
use crate::lorentz::{
    is_closed, lorentz_of_jones, polar_decompose, pure_boost_between, residual_rapidity, rotation_axis_angle,
    FourVelocity, LorentzMatrix, RotationResult,
};
use crate::wilson::{composed_fan_rotation, exact_loop_matrix};

/// Tolerance on `|Λ·e₀ − e₀|` for a sequence to count as closed.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Below this `|n̂ᵢ × n̂ⱼ|` every pair of axes is treated as parallel.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Largest `|n·n̂ᵢ|` for the axes to count as lying in one plane.
pub const COPLANAR_TOL: f64 = 1e-8;

/// Default samples per leg when tracing fixed-point triangles.
pub const DEFAULT_TRACE_SAMPLES: usize = 64;

/// Rapidity at which two equal absorbers on orthogonal axes, closed by a
/// third, rotate the sphere by exactly 50°.
pub const ORTHOGONAL_RAPIDITY_50_DEG: f64 = 1.6689337951193426;

/// An absorber sequence whose product is a pure rotation of the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSequence {
    elements: Vec<AbsorberSpec>,
    product_jones: JonesMatrix,
    product_lorentz: LorentzMatrix,
}

/// `A_M ⋯ A_1` for elements listed in application order.
pub fn jones_product<'a>(elements: impl IntoIterator<Item = &'a AbsorberSpec>) -> JonesMatrix {
    elements
        .into_iter()
        .fold(JonesMatrix::identity(), |acc, a| a.matrix() * acc)
}

impl ClosedSequence {
    pub fn new(elements: Vec<AbsorberSpec>) -> Result<Self> {
        Self::with_tolerance(elements, CLOSURE_TOL)
    }

    /// As [`ClosedSequence::new`] with `tol` in place of [`CLOSURE_TOL`].
    pub fn with_tolerance(elements: Vec<AbsorberSpec>, tol: f64) -> Result<Self> {
        if elements.is_empty() {
            return domain("a closed sequence needs at least one element");
        }
        let product_jones = jones_product(&elements);
        let product_lorentz = lorentz_of_jones(&product_jones)?;
        if !is_closed(&product_lorentz, &FourVelocity::rest(), tol) {
            return Err(Error::NotClosed {
                residual: residual_rapidity(&product_lorentz),
            });
        }
        Ok(Self {
            elements,
            product_jones,
            product_lorentz,
        })
    }

    pub fn elements(&self) -> &[AbsorberSpec] {
        &self.elements
    }

    pub fn product_jones(&self) -> JonesMatrix {
        self.product_jones
    }

    pub fn product_lorentz(&self) -> LorentzMatrix {
        self.product_lorentz
    }

    /// Sum of the overall absorptions `alpha0`, in nepers of amplitude.
    pub fn overall_absorption(&self) -> f64 {
        self.elements.iter().map(|a| a.alpha0).sum()
    }

    /// `10·log₁₀` of the intensity ratio due to the overall absorptions alone.
    pub fn insertion_loss_db(&self) -> f64 {
        insertion_loss_db(self.overall_absorption())
    }

    /// The sphere rotation of the product.
    pub fn rotation(&self) -> Result<RotationResult> {
        let (_, rotation) = polar_decompose(&self.product_lorentz);
        rotation_axis_angle(&rotation)
    }
}

/// `10·log₁₀ e^{−2α₀}`.
pub fn insertion_loss_db(alpha0: f64) -> f64 {
    -20.0 * alpha0 / LN_10
}

/// The absorber whose boost is `l`, which must be a pure boost from the rest frame.
fn absorber_of_boost(l: &LorentzMatrix, fallback_axis: PoincarePoint) -> Result<AbsorberSpec> {
    let spatial = l.boost_image().spatial();
    let rapidity = spatial.norm().asinh();
    let axis = PoincarePoint::normalized(spatial).unwrap_or(fallback_axis);
    AbsorberSpec::lossless(axis, rapidity)
}

/// The lossless absorber that turns the given sequence into a closed one:
/// the inverse of the boost part of the partial product.
pub fn complete_closure(elements: &[AbsorberSpec]) -> Result<AbsorberSpec> {
    let first = elements
        .first()
        .ok_or_else(|| Error::Domain("closure completion needs at least one element".into()))?;
    if elements.iter().all(|a| a.alpha == 0.0) {
        return Err(Error::Degenerate(
            "every element has zero relative absorption; the closure is the identity".into(),
        ));
    }
    closing_absorber(&jones_product(elements), first.axis)
}

/// The lossless absorber that cancels the boost part of `product`;
/// `fallback_axis` is used when there is nothing to cancel.
pub fn closing_absorber(product: &JonesMatrix, fallback_axis: PoincarePoint) -> Result<AbsorberSpec> {
    let (boost, _) = polar_decompose(&lorentz_of_jones(product)?);
    absorber_of_boost(&boost.inverse(), fallback_axis)
}

/// Completes `a1, a2` to a closed triple.
pub fn close_sequence(a1: AbsorberSpec, a2: AbsorberSpec) -> Result<(AbsorberSpec, ClosedSequence)> {
    let a3 = complete_closure(&[a1, a2])?;
    let seq = ClosedSequence::new(vec![a1, a2, a3])?;
    Ok((a3, seq))
}

/// The loop of four-velocities traced by a sequence:
/// `v₀ = e₀`, `v_k = Λ_M ⋯ Λ_{M−k+1} e₀`. The product of the geodesic boosts
/// around this loop equals the product of the sequence.
pub fn hyperbolic_loop(elements: &[AbsorberSpec]) -> Result<HyperbolicPolyline> {
    let mut vertices = Vec::with_capacity(elements.len());
    let mut acc = LorentzMatrix::identity();
    vertices.push(FourVelocity::rest());
    for a in elements.iter().rev().take(elements.len().saturating_sub(1)) {
        acc = acc * lorentz_of_jones(&a.matrix())?;
        vertices.push(acc.reorthogonalized().boost_image());
    }
    HyperbolicPolyline::closed(vertices)
}

/// Inverse of [`hyperbolic_loop`] for loops through the rest frame: lossless
/// absorbers, in application order, whose loop is `c`.
pub fn absorbers_of_loop(c: &HyperbolicPolyline) -> Result<Vec<AbsorberSpec>> {
    if !c.is_closed() {
        return domain("absorbers_of_loop needs a closed polyline");
    }
    let start = c.vertices()[0];
    if (start.vector() - FourVelocity::rest().vector()).norm() > CLOSURE_TOL {
        return domain("loop must start at the rest frame");
    }
    let mut g = LorentzMatrix::identity();
    let mut out = Vec::with_capacity(c.vertices().len());
    for (u, w) in c.segments() {
        let b = pure_boost_between(&u, &w);
        let local = g.inverse() * b * g;
        out.push(absorber_of_boost(&local, PoincarePoint::z_axis())?);
        g = b * g;
    }
    out.reverse();
    Ok(out)
}

/// Index pair of the least parallel axes and the norm of their cross product.
fn widest_pair(axes: &[PoincarePoint]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..axes.len() {
        for j in (i + 1)..axes.len() {
            let c = axes[i].vector().cross(&axes[j].vector()).norm();
            if best.is_none_or(|(_, _, b)| c > b) {
                best = Some((i, j, c));
            }
        }
    }
    best
}

/// The states `n`, `s = −n` orthogonal to every element axis.
///
/// `n` is along `n̂ᵢ × n̂ⱼ` for the least parallel pair with `i < j`.
pub fn fixed_points(seq: &ClosedSequence) -> Result<(PoincarePoint, PoincarePoint)> {
    let axes: Vec<_> = seq.elements.iter().filter(|a| a.alpha != 0.0).map(|a| a.axis).collect();
    let (i, j, width) = widest_pair(&axes).unwrap_or((0, 0, 0.0));
    if width < PARALLEL_TOL {
        return Err(Error::Degenerate(
            "element axes are all parallel; the invariant set is a great circle".into(),
        ));
    }
    let n = PoincarePoint::normalized(axes[i].vector().cross(&axes[j].vector()))?;
    if let Some(off) = axes.iter().map(|a| a.dot(&n).abs()).find(|d| *d > COPLANAR_TOL) {
        return Err(Error::Consistency(format!(
            "element axes do not share a plane (|n·n̂| = {off:.3e}); no common fixed states"
        )));
    }
    Ok((n, n.antipode()))
}

/// The corners `p₀, A₁p₀, A₂A₁p₀, …` of the path of `p0`, without the final return.
pub fn fixed_point_corners(seq: &ClosedSequence, p0: &PoincarePoint) -> Result<Vec<PoincarePoint>> {
    let mut corners = Vec::with_capacity(seq.elements.len());
    let mut p = *p0;
    for a in &seq.elements {
        corners.push(p);
        p = induced_sphere_map(&a.matrix(), &p)?;
    }
    Ok(corners)
}

/// The closed path of a fixed state through the sequence, each leg sampled
/// at `samples_per_leg` points of the element's one-parameter semigroup.
pub fn trace_fixed_point_triangle(
    seq: &ClosedSequence,
    p0: &PoincarePoint,
    samples_per_leg: usize,
) -> Result<SphericalPolyline> {
    if samples_per_leg < 2 {
        return domain(format!("samples_per_leg must be at least 2, got {samples_per_leg}"));
    }
    let moved = induced_sphere_map(&seq.product_jones, p0)?;
    let drift = moved.angle_to(p0);
    if drift > 1e-9 {
        return domain(format!("state is not fixed by the sequence (moved by {drift:.3e} rad)"));
    }
    let corners = fixed_point_corners(seq, p0)?;
    let mut points = Vec::with_capacity(corners.len() * samples_per_leg);
    for (a, corner) in seq.elements.iter().zip(&corners) {
        for j in 0..samples_per_leg {
            let t = j as f64 / samples_per_leg as f64;
            points.push(if j == 0 {
                *corner
            } else {
                induced_sphere_map(&a.fraction(t).matrix(), corner)?
            });
        }
    }
    if points.iter().all(|p| p.angle_to(p0) <= 1e-14) {
        points.truncate(1);
    }
    SphericalPolyline::closed(points)
}

/// Pancharatnam phase of a cycle of Jones vectors:
/// `arg(⟨ψ₁|ψ_k⟩⟨ψ_k|ψ_{k−1}⟩ ⋯ ⟨ψ₂|ψ₁⟩)`, which is `−Ω/2` for the
/// geodesic polygon `ψ₁ → ψ₂ → ⋯ → ψ_k`.
pub fn pancharatnam_phase_of_vectors(states: &[JonesVector]) -> Result<f64> {
    if states.is_empty() {
        return domain("pancharatnam_phase needs at least one state");
    }
    let k = states.len();
    let mut product = Complex64::new(1.0, 0.0);
    for i in 0..k {
        let (a, b) = (states[(i + 1) % k].normalized(), states[i].normalized());
        let overlap = a.inner(&b);
        if overlap.norm_sqr() < 0.5e-12 {
            return domain(format!(
                "states {i} and {} are orthogonal; the overlap vanishes",
                (i + 1) % k
            ));
        }
        product *= overlap;
        product /= product.norm();
    }
    let phase = product.arg();
    Ok(if phase <= -PI { phase + 2.0 * PI } else { phase })
}

/// [`pancharatnam_phase_of_vectors`] on canonical representatives.
pub fn pancharatnam_phase(states: &[PoincarePoint]) -> Result<f64> {
    let vectors: Vec<_> = states.iter().map(jones_of_poincare).collect();
    pancharatnam_phase_of_vectors(&vectors)
}

/// The Thomas rotation of a closed sequence with its geometric reading.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub rotation: RotationResult,
    /// Signed solid angle of the `n` triangle, steradians.
    pub omega: f64,
    pub phase_n: f64,
    pub phase_s: f64,
    pub n: PoincarePoint,
    pub s: PoincarePoint,
    pub triangle_n: SphericalPolyline,
    pub triangle_s: SphericalPolyline,
    /// All axes parallel: the rotation is the identity and the fixed set is a great circle.
    pub degenerate: bool,
}

pub fn thomas_report(seq: &ClosedSequence) -> Result<PhaseReport> {
    thomas_report_with(seq, DEFAULT_TRACE_SAMPLES)
}

pub fn thomas_report_with(seq: &ClosedSequence, samples_per_leg: usize) -> Result<PhaseReport> {
    let (n, s) = match fixed_points(seq) {
        Ok(ns) => ns,
        Err(Error::Degenerate(_)) => return degenerate_report(seq),
        Err(e) => return Err(e),
    };
    let rotation = seq.rotation()?;
    let triangle_n = trace_fixed_point_triangle(seq, &n, samples_per_leg)?;
    let triangle_s = trace_fixed_point_triangle(seq, &s, samples_per_leg)?;
    let corners = fixed_point_corners(seq, &n)?;
    let omega = if corners.len() == 3 {
        solid_angle_triangle(&corners[0], &corners[1], &corners[2])
    } else {
        solid_angle_polyline(&SphericalPolyline::closed(corners)?)?
    };
    let report = PhaseReport {
        rotation,
        omega,
        phase_n: pancharatnam_phase(triangle_n.vertices())?,
        phase_s: pancharatnam_phase(triangle_s.vertices())?,
        n,
        s,
        triangle_n,
        triangle_s,
        degenerate: false,
    };
    check_report(&report)?;
    Ok(report)
}

fn degenerate_report(seq: &ClosedSequence) -> Result<PhaseReport> {
    let axis = seq
        .elements
        .iter()
        .find(|a| a.alpha != 0.0)
        .map_or(PoincarePoint::z_axis(), |a| a.axis);
    let v = axis.vector();
    let helper = if v.x.abs() < 0.9 {
        nalgebra::Vector3::x()
    } else {
        nalgebra::Vector3::y()
    };
    let n = PoincarePoint::from_unit_unchecked(v.cross(&helper).normalize());
    Ok(PhaseReport {
        rotation: RotationResult::identity(),
        omega: 0.0,
        phase_n: 0.0,
        phase_s: 0.0,
        n,
        s: n.antipode(),
        triangle_n: SphericalPolyline::closed(vec![n])?,
        triangle_s: SphericalPolyline::closed(vec![n.antipode()])?,
        degenerate: true,
    })
}

fn check_report(r: &PhaseReport) -> Result<()> {
    let tol = 1e-8;
    if (r.phase_n + r.phase_s).abs() > tol {
        return Err(Error::Consistency(format!(
            "fixed-state phases are not opposite: {} and {}",
            r.phase_n, r.phase_s
        )));
    }
    let gap = (r.rotation.angle - r.omega.abs()).rem_euclid(2.0 * PI);
    if gap.min(2.0 * PI - gap) > tol {
        return Err(Error::Consistency(format!(
            "rotation angle {} differs from |Ω| = {}",
            r.rotation.angle,
            r.omega.abs()
        )));
    }
    if r.rotation.angle > tol && r.rotation.axis.vector().cross(&r.n.vector()).norm() > tol {
        return Err(Error::Consistency("rotation axis is not along the fixed states".into()));
    }
    Ok(())
}

/// The rotation of a closed sequence of any length.
pub fn m_element_rotation(elements: &[AbsorberSpec]) -> Result<RotationResult> {
    if elements.is_empty() {
        return domain("m_element_rotation needs at least one element");
    }
    let product = lorentz_of_jones(&jones_product(elements))?;
    if !is_closed(&product, &FourVelocity::rest(), CLOSURE_TOL) {
        return Err(Error::NotClosed {
            residual: residual_rapidity(&product),
        });
    }
    let (_, rotation) = polar_decompose(&product);
    rotation_axis_angle(&rotation)
}

/// Rotations of the fan triangles of a sequence's loop, in traversal order.
pub fn fan_triangle_rotations(elements: &[AbsorberSpec]) -> Result<Vec<Matrix3<f64>>> {
    crate::wilson::fan_triangles(&hyperbolic_loop(elements)?)?
        .iter()
        .map(exact_loop_matrix)
        .collect()
}

/// Ordered composition of [`fan_triangle_rotations`].
pub fn composed_fan_rotation_of(elements: &[AbsorberSpec]) -> Result<Matrix3<f64>> {
    composed_fan_rotation(&hyperbolic_loop(elements)?)
}

/// Thomas angle of the triple closing lossless absorbers of rapidity `alpha`
/// on `ẑ` then `x̂`.
pub fn orthogonal_pair_angle(alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let a1 = AbsorberSpec::lossless(PoincarePoint::z_axis(), alpha)?;
    let a2 = AbsorberSpec::lossless(PoincarePoint::x_axis(), alpha)?;
    let (_, seq) = close_sequence(a1, a2)?;
    Ok(seq.rotation()?.angle)
}

/// Rapidity at which [`orthogonal_pair_angle`] equals `target` (radians), by bisection.
pub fn solve_orthogonal_rapidity(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 0.5 * PI) {
        return domain(format!("orthogonal-pair rotation angles lie in (0, π/2), got {target}"));
    }
    let mut hi = 1.0;
    while orthogonal_pair_angle(hi)? < target {
        hi *= 2.0;
        if hi > 16.0 {
            return domain(format!("target angle {target} needs a rapidity beyond 16"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if orthogonal_pair_angle(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
