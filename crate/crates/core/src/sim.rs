//! Runs element sequences on input states and records their paths on the
//! Poincaré sphere.

use nalgebra::Complex;

use crate::error::{domain, Error, Result};
use crate::jones::{
    apply_element, jones_of_poincare, poincare_of_jones, AbsorberSpec, Element, JonesMatrix, PoincarePoint,
};
use crate::lorentz::{
    is_closed, lorentz_of_jones, polar_decompose, residual_rapidity, rotation_axis_angle, FourVelocity, RotationResult,
};
use crate::phases::{
    closing_absorber, hyperbolic_loop, insertion_loss_db, thomas_report_with, ClosedSequence, PhaseReport, CLOSURE_TOL,
    DEFAULT_TRACE_SAMPLES,
};
use crate::wilson::{wilson_loop, DEFAULT_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioOptions {
    /// Samples per element, including both ends of the leg.
    pub trace_samples: usize,
    pub wilson_steps: usize,
    /// Append the absorber that closes the sequence before running it.
    pub complete_closure: bool,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            trace_samples: DEFAULT_TRACE_SAMPLES,
            wilson_steps: DEFAULT_STEPS,
            complete_closure: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub elements: Vec<Element>,
    pub inputs: Vec<PoincarePoint>,
    pub options: ScenarioOptions,
}

impl Scenario {
    pub fn new(elements: Vec<Element>, inputs: Vec<PoincarePoint>, options: ScenarioOptions) -> Result<Self> {
        let s = Self {
            elements,
            inputs,
            options,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return domain("scenario has no elements");
        }
        if self.options.trace_samples < 2 {
            return domain(format!(
                "trace_samples must be at least 2, got {}",
                self.options.trace_samples
            ));
        }
        if self.options.wilson_steps < 1 {
            return domain("wilson_steps must be at least 1");
        }
        Ok(())
    }
}

/// One sample of one input state part-way through one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub state_index: usize,
    pub element_index: usize,
    pub t: f64,
    pub point: PoincarePoint,
    /// Intensity relative to the input.
    pub intensity: f64,
}

/// What can be said about a sequence that is open, mixes in retarders, or
/// has axes spread over more than one plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialReport {
    /// Rapidity of the boost part of the product; 0 when closed.
    pub residual_rapidity: f64,
    /// Rotation part of the product.
    pub rotation: RotationResult,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceReport {
    Closed(PhaseReport),
    Partial(PartialReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    /// The elements actually run, including any appended closing absorber.
    pub elements: Vec<Element>,
    pub records: Vec<TrajectoryRecord>,
    pub report: SequenceReport,
    /// Rotation from the path-ordered integral, for closed pure-absorber runs.
    pub wilson: Option<RotationResult>,
    /// `10·log₁₀` of the intensity ratio from the overall absorptions.
    pub insertion_loss_db: f64,
}

/// `E_M ⋯ E_1`, rescaled to unit determinant modulus after each factor.
fn element_product(elements: &[Element]) -> JonesMatrix {
    elements.iter().fold(JonesMatrix::identity(), |acc, e| {
        let m = e.matrix() * acc;
        m.scaled(Complex::from(1.0 / m.det().norm().sqrt()))
    })
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    s.validate()?;
    let mut elements = s.elements.clone();
    if s.options.complete_closure {
        let first = elements
            .iter()
            .find_map(|e| e.as_absorber().filter(|a| a.alpha != 0.0))
            .ok_or_else(|| Error::Degenerate("closure requested but no element has relative absorption".into()))?;
        elements.push(closing_absorber(&element_product(&elements), first.axis)?.into());
    }

    let records = trace(&elements, &s.inputs, s.options.trace_samples)?;
    let alpha0: f64 = elements.iter().filter_map(Element::as_absorber).map(|a| a.alpha0).sum();
    let (report, wilson) = assess(&elements, s.options)?;
    Ok(ScenarioRun {
        elements,
        records,
        report,
        wilson,
        insertion_loss_db: insertion_loss_db(alpha0),
    })
}

fn trace(elements: &[Element], inputs: &[PoincarePoint], samples: usize) -> Result<Vec<TrajectoryRecord>> {
    let mut records = Vec::with_capacity(inputs.len() * elements.len() * samples);
    let last = (samples - 1) as f64;
    for (state_index, p) in inputs.iter().enumerate() {
        let mut v = jones_of_poincare(p);
        let mut intensity = 1.0;
        for (element_index, e) in elements.iter().enumerate() {
            for j in 0..samples {
                let t = j as f64 / last;
                let (out, ratio) = apply_element(&e.fraction(t).matrix(), &v)?;
                records.push(TrajectoryRecord {
                    state_index,
                    element_index,
                    t,
                    point: poincare_of_jones(&out),
                    intensity: intensity * ratio,
                });
                if j + 1 == samples {
                    intensity *= ratio;
                    v = out.scaled(Complex::from(1.0 / out.intensity().sqrt()))?;
                }
            }
        }
    }
    Ok(records)
}

fn assess(elements: &[Element], options: ScenarioOptions) -> Result<(SequenceReport, Option<RotationResult>)> {
    let product = lorentz_of_jones(&element_product(elements))?;
    let (boost, rotation) = polar_decompose(&product);
    let closed = is_closed(&product, &FourVelocity::rest(), CLOSURE_TOL);
    let partial = |note: &str| -> Result<SequenceReport> {
        Ok(SequenceReport::Partial(PartialReport {
            residual_rapidity: if closed { 0.0 } else { residual_rapidity(&boost) },
            rotation: rotation_axis_angle(&rotation)?,
            note: note.to_string(),
        }))
    };
    if !closed {
        return Ok((partial("sequence is not closed; its product retains a boost")?, None));
    }
    let absorbers: Option<Vec<AbsorberSpec>> = elements.iter().map(|e| e.as_absorber().copied()).collect();
    let Some(absorbers) = absorbers else {
        return Ok((
            partial("sequence contains retarders; phases are reported for pure-absorber sequences only")?,
            None,
        ));
    };
    let seq = ClosedSequence::new(absorbers)?;
    let wilson = Some(wilson_loop(&hyperbolic_loop(seq.elements())?, options.wilson_steps)?);
    match thomas_report_with(&seq, options.trace_samples) {
        Ok(r) => Ok((SequenceReport::Closed(r), wilson)),
        Err(Error::Consistency(msg)) => Ok((partial(&msg)?, wilson)),
        Err(e) => Err(e),
    }
}
