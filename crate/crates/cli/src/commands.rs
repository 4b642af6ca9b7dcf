use std::path::PathBuf;

use polthomas::lorentz::{axis_angle_of, polar_decompose, residual_rapidity};
use polthomas::phases::{complete_closure, fixed_point_corners, hyperbolic_loop, thomas_report_with, CLOSURE_TOL};
use polthomas::sim::{run_scenario, PartialReport};
use polthomas::wilson::{exact_loop_matrix, wilson_loop_matrix};
use polthomas::{AbsorberSpec, ClosedSequence, Element, PhaseReport, Scenario, SequenceReport};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{point_json, rotation_json, write_report, write_trajectory};
use crate::scenario::parse_scenario_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Closure,
    Wilson,
    Phase,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Closure => "closure",
            Command::Wilson => "wilson",
            Command::Phase => "phase",
        }
    }
}

/// Command-line values that take precedence over the scenario file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub wilson_steps: Option<usize>,
    pub trace_samples: Option<usize>,
    pub tolerance: Option<f64>,
    /// Append the closing absorber.
    pub close: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub scenario_path: PathBuf,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
}

impl CliConfig {
    fn tolerance(&self) -> f64 {
        self.overrides.tolerance.unwrap_or(CLOSURE_TOL)
    }

    fn load(&self) -> CliResult<Scenario> {
        let mut s = parse_scenario_file(&self.scenario_path)?;
        let o = self.overrides;
        if let Some(n) = o.wilson_steps {
            s.options.wilson_steps = n;
        }
        if let Some(n) = o.trace_samples {
            s.options.trace_samples = n;
        }
        s.options.complete_closure |= o.close;
        if let Some(t) = o.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive and finite, got {t}")));
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// Runs one command, writing its outputs into the output directory, and
/// returns the report that was written.
pub fn run(config: &CliConfig) -> CliResult<Value> {
    let scenario = config.load()?;
    std::fs::create_dir_all(&config.output_dir).map_err(|source| CliError::Io {
        path: config.output_dir.clone(),
        source,
    })?;
    let mut report = match config.command {
        Command::Simulate => simulate(config, &scenario)?,
        Command::Closure => closure(config, &scenario)?,
        Command::Wilson => wilson(config, &scenario)?,
        Command::Phase => phase(config, &scenario)?,
    };
    if let Some(obj) = report.as_object_mut() {
        obj.insert("command".into(), json!(config.command.name()));
        obj.insert("scenario".into(), json!(config.scenario_path.display().to_string()));
    }
    write_report(&config.output_dir, &report)?;
    Ok(report)
}

/// Writes the machine-readable form of `err` as the report, best effort.
pub fn write_error_report(config: &CliConfig, err: &CliError) -> Value {
    let mut value = err.to_json();
    if let Some(obj) = value.as_object_mut() {
        obj.insert("command".into(), json!(config.command.name()));
        obj.insert("scenario".into(), json!(config.scenario_path.display().to_string()));
    }
    if std::fs::create_dir_all(&config.output_dir).is_ok() {
        if let Err(e) = write_report(&config.output_dir, &value) {
            log::warn!("could not write error report: {e}");
        }
    }
    value
}

fn element_json(e: &Element) -> Value {
    match e {
        Element::Absorber(a) => json!({
            "kind": "absorber",
            "axis": point_json(&a.axis),
            "alpha": a.alpha,
            "alpha0": a.alpha0,
        }),
        Element::Retarder(r) => json!({
            "kind": "retarder",
            "axis": point_json(&r.axis),
            "delta_deg": r.delta.to_degrees(),
        }),
    }
}

fn phase_report_json(r: &PhaseReport) -> Value {
    json!({
        "closed": true,
        "degenerate": r.degenerate,
        "rotation": rotation_json(&r.rotation),
        "omega_sr": r.omega,
        "phase_n_deg": r.phase_n.to_degrees(),
        "phase_s_deg": r.phase_s.to_degrees(),
        "fixed_points": { "n": point_json(&r.n), "s": point_json(&r.s) },
    })
}

fn partial_report_json(p: &PartialReport) -> Value {
    json!({
        "closed": p.residual_rapidity == 0.0,
        "residual_rapidity": p.residual_rapidity,
        "rotation": rotation_json(&p.rotation),
        "note": p.note,
    })
}

fn simulate(config: &CliConfig, s: &Scenario) -> CliResult<Value> {
    let run = run_scenario(s)?;
    write_trajectory(&config.output_dir, &run.records)?;
    let sequence = match &run.report {
        SequenceReport::Closed(r) => phase_report_json(r),
        SequenceReport::Partial(p) => partial_report_json(p),
    };
    Ok(json!({
        "elements": run.elements.iter().map(element_json).collect::<Vec<_>>(),
        "inputs": s.inputs.iter().map(point_json).collect::<Vec<_>>(),
        "insertion_loss_db": run.insertion_loss_db,
        "sequence": sequence,
        "trace_samples": s.options.trace_samples,
        "trajectory_rows": run.records.len(),
        "wilson_rotation": run.wilson.as_ref().map(rotation_json),
    }))
}

fn absorbers_of(s: &Scenario) -> CliResult<Vec<AbsorberSpec>> {
    s.elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            e.as_absorber().copied().ok_or_else(|| {
                CliError::Usage(format!(
                    "element {i} is a retarder; this command handles pure-absorber sequences only"
                ))
            })
        })
        .collect()
}

/// The scenario's absorbers, completed if requested, checked for closure.
fn closed_sequence(config: &CliConfig, s: &Scenario) -> CliResult<ClosedSequence> {
    let mut elements = absorbers_of(s)?;
    if s.options.complete_closure {
        elements.push(complete_closure(&elements)?);
    }
    let tolerance = config.tolerance();
    ClosedSequence::with_tolerance(elements, tolerance).map_err(|e| match e {
        polthomas::Error::NotClosed { residual } => CliError::Residual { residual, tolerance },
        e => e.into(),
    })
}

fn closure(config: &CliConfig, s: &Scenario) -> CliResult<Value> {
    let given = absorbers_of(s)?;
    let closing = complete_closure(&given)?;
    let mut all = given.clone();
    all.push(closing);
    let tolerance = config.tolerance();
    let seq = ClosedSequence::with_tolerance(all, tolerance).map_err(|e| match e {
        polthomas::Error::NotClosed { residual } => CliError::Residual { residual, tolerance },
        e => e.into(),
    })?;
    let planarity = match given.as_slice() {
        [a1, a2] => json!(closing
            .axis
            .vector()
            .dot(&a1.axis.vector().cross(&a2.axis.vector()))
            .abs()),
        _ => Value::Null,
    };
    let residual = residual_rapidity(&polar_decompose(&seq.product_lorentz()).0);
    Ok(json!({
        "closing_element": element_json(&Element::Absorber(closing)),
        "elements": seq.elements().iter().map(|a| element_json(&Element::Absorber(*a))).collect::<Vec<_>>(),
        "insertion_loss_db": seq.insertion_loss_db(),
        "planarity": planarity,
        "residual_rapidity": residual,
        "rotation": rotation_json(&seq.rotation()?),
        "tolerance": tolerance,
    }))
}

fn wilson(config: &CliConfig, s: &Scenario) -> CliResult<Value> {
    let seq = closed_sequence(config, s)?;
    let lp = hyperbolic_loop(seq.elements())?;
    let steps = s.options.wilson_steps;
    let integrated = wilson_loop_matrix(&lp, steps)?;
    let exact = exact_loop_matrix(&lp)?;
    let (wi, ex) = (axis_angle_of(&integrated), axis_angle_of(&exact));
    Ok(json!({
        "angle_difference_rad": (wi.angle - ex.angle).abs(),
        "integrator": rotation_json(&wi),
        "operator_error": (integrated - exact).norm(),
        "oracle": rotation_json(&ex),
        "steps_per_segment": steps,
        "vertices": lp.vertices().iter().map(|u| u.vector().iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

fn phase(config: &CliConfig, s: &Scenario) -> CliResult<Value> {
    let seq = closed_sequence(config, s)?;
    let report = thomas_report_with(&seq, s.options.trace_samples)?;
    let corners = if report.degenerate {
        Vec::new()
    } else {
        fixed_point_corners(&seq, &report.n)?
    };
    Ok(json!({
        "elements": seq.elements().iter().map(|a| element_json(&Element::Absorber(*a))).collect::<Vec<_>>(),
        "insertion_loss_db": seq.insertion_loss_db(),
        "report": phase_report_json(&report),
        "triangle_n_corners": corners.iter().map(point_json).collect::<Vec<_>>(),
    }))
}
