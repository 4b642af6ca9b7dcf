//! Scenario files.
//!
//! TOML by default, JSON when the file name ends in `.json`:
//!
//! ```toml
//! inputs = [[0, 1, 0], [0, -1, 0]]
//!
//! [[elements]]
//! kind = "absorber"
//! axis = [0, 0, 1]
//! alpha = 1.0
//! alpha0 = 0.1            # optional, default 0
//!
//! [[elements]]
//! kind = "retarder"
//! axis = { two_chi_deg = 0, two_psi_deg = 90 }
//! delta_deg = 45
//!
//! [options]               # all optional
//! trace_samples = 64
//! wilson_steps = 4096
//! complete_closure = false
//! ```
//!
//! Axes and inputs are Stokes directions, either Cartesian or as the sphere
//! angles `(2χ, 2ψ)` in degrees. They are normalized on load.

use std::path::Path;

use nalgebra::Vector3;
use polthomas::{AbsorberSpec, Element, PoincarePoint, RetarderSpec, Scenario, ScenarioOptions};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Axes whose norm is further than this from 1 are normalized with a warning.
pub const AXIS_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    elements: Vec<ElementDoc>,
    #[serde(default)]
    inputs: Vec<AxisDoc>,
    #[serde(default)]
    options: OptionsDoc,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ElementDoc {
    Absorber {
        axis: AxisDoc,
        alpha: f64,
        #[serde(default)]
        alpha0: f64,
    },
    Retarder {
        axis: AxisDoc,
        delta_deg: f64,
    },
}

// Cartesian takes every array so that a map is the only way to reach Sphere.
#[derive(Debug, Clone, Deserialize)]
#[serde(
    untagged,
    expecting = "a Stokes direction [s1, s2, s3] or {two_chi_deg, two_psi_deg}"
)]
enum AxisDoc {
    Cartesian(Vec<f64>),
    Sphere(SphereAxis),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereAxis {
    two_chi_deg: f64,
    two_psi_deg: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsDoc {
    trace_samples: Option<usize>,
    wilson_steps: Option<usize>,
    complete_closure: Option<bool>,
}

/// `(cos 2χ cos 2ψ, cos 2χ sin 2ψ, sin 2χ)`.
pub fn stokes_of_angles(two_chi_deg: f64, two_psi_deg: f64) -> Vector3<f64> {
    let (c, p) = (two_chi_deg.to_radians(), two_psi_deg.to_radians());
    Vector3::new(c.cos() * p.cos(), c.cos() * p.sin(), c.sin())
}

/// `(2χ, 2ψ)` in degrees, with `2ψ ∈ (−180, 180]`.
pub fn angles_of_stokes(p: &PoincarePoint) -> (f64, f64) {
    (
        p.z().clamp(-1.0, 1.0).asin().to_degrees(),
        p.y().atan2(p.x()).to_degrees(),
    )
}

fn axis_of(doc: AxisDoc, path: &Path, field: &str) -> CliResult<PoincarePoint> {
    let schema = |message: String| CliError::Schema {
        path: path.to_path_buf(),
        field: field.to_string(),
        message,
    };
    let v = match doc {
        AxisDoc::Cartesian(v) => match v[..] {
            [a, b, c] => Vector3::new(a, b, c),
            _ => return Err(schema(format!("axis needs 3 components, got {}", v.len()))),
        },
        AxisDoc::Sphere(s) => stokes_of_angles(s.two_chi_deg, s.two_psi_deg),
    };
    let norm = v.norm();
    if !norm.is_finite() {
        return Err(schema(format!("axis must be finite, got {v:?}")));
    }
    if norm == 0.0 {
        return Err(schema("axis is the zero vector".into()));
    }
    if (norm - 1.0).abs() > AXIS_NORM_TOL {
        log::warn!("{}: {field}: axis norm {norm} is not 1; normalizing", path.display());
    }
    PoincarePoint::normalized(v).map_err(|e| schema(e.to_string()))
}

fn element_of(doc: ElementDoc, path: &Path, i: usize) -> CliResult<Element> {
    let field = format!("elements[{i}]");
    let schema = |e: polthomas::Error| CliError::Schema {
        path: path.to_path_buf(),
        field: field.clone(),
        message: e.to_string(),
    };
    Ok(match doc {
        ElementDoc::Absorber { axis, alpha, alpha0 } => {
            let axis = axis_of(axis, path, &format!("{field}.axis"))?;
            AbsorberSpec::new(axis, alpha, alpha0).map_err(schema)?.into()
        }
        ElementDoc::Retarder { axis, delta_deg } => {
            let axis = axis_of(axis, path, &format!("{field}.axis"))?;
            RetarderSpec::new(axis, delta_deg.to_radians()).map_err(schema)?.into()
        }
    })
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Parses scenario text; `path` names the source in errors and picks the syntax.
pub fn parse_scenario_str(text: &str, path: &Path) -> CliResult<Scenario> {
    let parse_error = |message: String| CliError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let value: serde_json::Value = if is_json(path) {
        serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| parse_error(e.to_string()))?
    };
    let doc: ScenarioDoc = serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        CliError::Schema {
            path: path.to_path_buf(),
            field: if field == "." { "(root)".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })?;

    let schema = |field: &str, message: &str| CliError::Schema {
        path: path.to_path_buf(),
        field: field.into(),
        message: message.into(),
    };
    if doc.elements.is_empty() {
        return Err(schema("elements", "at least one element is required"));
    }
    let defaults = ScenarioOptions::default();
    let options = ScenarioOptions {
        trace_samples: doc.options.trace_samples.unwrap_or(defaults.trace_samples),
        wilson_steps: doc.options.wilson_steps.unwrap_or(defaults.wilson_steps),
        complete_closure: doc.options.complete_closure.unwrap_or(defaults.complete_closure),
    };
    if options.trace_samples < 2 {
        return Err(schema("options.trace_samples", "must be at least 2"));
    }
    if options.wilson_steps < 1 {
        return Err(schema("options.wilson_steps", "must be at least 1"));
    }
    let elements = doc
        .elements
        .into_iter()
        .enumerate()
        .map(|(i, e)| element_of(e, path, i))
        .collect::<CliResult<Vec<_>>>()?;
    let inputs = doc
        .inputs
        .into_iter()
        .enumerate()
        .map(|(i, a)| axis_of(a, path, &format!("inputs[{i}]")))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Scenario::new(elements, inputs, options)?)
}

pub fn parse_scenario_file(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn parse(text: &str) -> CliResult<Scenario> {
        parse_scenario_str(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_file_gets_defaults() {
        let s = parse("[[elements]]\nkind = \"absorber\"\naxis = [0, 0, 1]\nalpha = 1.0\n").unwrap();
        assert_eq!(s.elements.len(), 1);
        assert!(s.inputs.is_empty());
        assert_eq!(s.options, ScenarioOptions::default());
        let a = s.elements[0].as_absorber().unwrap();
        assert_eq!((a.alpha, a.alpha0), (1.0, 0.0));
    }

    #[test]
    fn sphere_angles_match_cartesian() {
        let s = parse(
            "inputs = [{ two_chi_deg = 30, two_psi_deg = 120 }]\n\
             [[elements]]\nkind = \"retarder\"\naxis = { two_chi_deg = 90, two_psi_deg = 10 }\ndelta_deg = 90\n",
        )
        .unwrap();
        let (c, p) = (30f64.to_radians(), 120f64.to_radians());
        let expected = Vector3::new(c.cos() * p.cos(), c.cos() * p.sin(), c.sin());
        assert!((s.inputs[0].vector() - expected).norm() < 1e-12);
        assert!((s.elements[0].axis().vector() - Vector3::z()).norm() < 1e-12);
        let Element::Retarder(r) = s.elements[0] else {
            panic!("retarder expected")
        };
        assert_relative_eq!(r.delta, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        let (chi, psi) = angles_of_stokes(&s.inputs[0]);
        assert_relative_eq!(chi, 30.0, epsilon = 1e-12);
        assert_relative_eq!(psi, 120.0, epsilon = 1e-12);
    }

    #[test]
    fn json_syntax_by_extension() {
        let text =
            r#"{"elements": [{"kind": "absorber", "axis": [1, 0, 0], "alpha": 0.5}], "options": {"trace_samples": 3}}"#;
        let s = parse_scenario_str(text, Path::new("s.json")).unwrap();
        assert_eq!(s.options.trace_samples, 3);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let field_of = |text: &str| match parse(text) {
            Err(CliError::Schema { field, .. }) => field,
            other => panic!("expected a schema error, got {other:?}"),
        };
        assert_eq!(field_of("inputs = []\n"), "(root)");
        assert_eq!(field_of("elements = []\n"), "elements");
        assert_eq!(
            field_of("[[elements]]\nkind = \"absorber\"\naxis = [0, 0, 0]\nalpha = 1.0\n"),
            "elements[0].axis"
        );
        assert_eq!(
            field_of("[[elements]]\nkind = \"absorber\"\naxis = [0, 0, 1]\nalpha = -1.0\n"),
            "elements[0]"
        );
        assert!(field_of("[[elements]]\nkind = \"absorber\"\naxis = [0, 0]\nalpha = 1.0\n").starts_with("elements[0]"));
        assert!(
            field_of("[[elements]]\nkind = \"absorber\"\naxis = [0, 0, 1]\nalpha = 1.0\ncolour = 1\n")
                .starts_with("elements[0]")
        );
        assert_eq!(
            field_of(
                "[[elements]]\nkind = \"absorber\"\naxis = [0, 0, 1]\nalpha = 1.0\n[options]\ntrace_samples = 1\n"
            ),
            "options.trace_samples"
        );
        assert!(matches!(parse("elements = ["), Err(CliError::Parse { .. })));
    }

    #[test]
    fn off_unit_axes_are_normalized() {
        let s =
            parse("inputs = [[0, 2, 0]]\n[[elements]]\nkind = \"absorber\"\naxis = [3, 0, 4]\nalpha = 1.0\n").unwrap();
        assert!((s.elements[0].axis().vector() - Vector3::new(0.6, 0.0, 0.8)).norm() < 1e-15);
        assert_eq!(s.inputs[0].vector(), Vector3::y());
    }
}
