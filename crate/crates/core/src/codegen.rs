//! Curated Qiskit code templates with `{{name}}` placeholders.

use crate::format::shortest;
use crate::qubo::{kp_auto_penalty, tsp_auto_penalty, KpInstance, TspInstance};
use crate::variational::SolveConfig;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const FRAMEWORK_TAG: &str = "qiskit>=1.0";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodegenError {
    #[error("missing template bindings: {}", .0.join(", "))]
    MissingBinding(Vec<String>),
    #[error("bindings not used by the template: {}", .0.join(", "))]
    UnexpectedBinding(Vec<String>),
    #[error("unknown template '{0}'")]
    UnknownTemplate(String),
    #[error("rendered output still contains a placeholder")]
    UnboundPlaceholderInOutput,
    #[error("cannot serialize non-finite number {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    DrawGate,
    ApplyGate,
    TspSolver,
    KpSolver,
}

impl TemplateId {
    pub const ALL: [TemplateId; 4] = [
        TemplateId::DrawGate,
        TemplateId::ApplyGate,
        TemplateId::TspSolver,
        TemplateId::KpSolver,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::DrawGate => "draw_gate",
            TemplateId::ApplyGate => "apply_gate",
            TemplateId::TspSolver => "tsp_solver",
            TemplateId::KpSolver => "kp_solver",
        }
    }

    pub fn parse(name: &str) -> Result<Self, CodegenError> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == name)
            .ok_or_else(|| CodegenError::UnknownTemplate(name.to_string()))
    }

    pub fn body(self) -> &'static str {
        match self {
            TemplateId::DrawGate => include_str!("../assets/templates/draw_gate.py.tmpl"),
            TemplateId::ApplyGate => include_str!("../assets/templates/apply_gate.py.tmpl"),
            TemplateId::TspSolver => include_str!("../assets/templates/tsp_solver.py.tmpl"),
            TemplateId::KpSolver => include_str!("../assets/templates/kp_solver.py.tmpl"),
        }
    }

    pub fn required_bindings(self) -> &'static [&'static str] {
        match self {
            TemplateId::DrawGate => &["gate_call", "n_qubits"],
            TemplateId::ApplyGate => &["gate_call", "initial_state", "n_qubits"],
            TemplateId::TspSolver => &[
                "cities",
                "distances",
                "layers",
                "max_evals",
                "penalty",
                "seed",
                "shots",
            ],
            TemplateId::KpSolver => &[
                "capacity",
                "items",
                "layers",
                "max_evals",
                "penalty",
                "seed",
                "shots",
                "values",
                "weights",
            ],
        }
    }
}

/// Rendered SDK source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeArtifact {
    pub framework_tag: String,
    pub template_id: TemplateId,
    pub source_text: String,
}

pub type Bindings = BTreeMap<String, String>;

/// Placeholder names appearing in a template body.
pub fn placeholders(body: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut rest = body;
    while let Some(start) = rest.find("{{") {
        let after = &rest[start + 2..];
        match after.find("}}") {
            Some(end) => {
                out.insert(after[..end].trim().to_string());
                rest = &after[end + 2..];
            }
            None => break,
        }
    }
    out
}

pub fn render(id: TemplateId, bindings: &Bindings) -> Result<CodeArtifact, CodegenError> {
    let required = id.required_bindings();
    let missing: Vec<String> = required
        .iter()
        .filter(|k| !bindings.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CodegenError::MissingBinding(missing));
    }
    let extra: Vec<String> = bindings
        .keys()
        .filter(|k| !required.contains(&k.as_str()))
        .cloned()
        .collect();
    if !extra.is_empty() {
        return Err(CodegenError::UnexpectedBinding(extra));
    }

    let mut text = id.body().to_string();
    for (name, value) in bindings {
        text = text.replace(&format!("{{{{{name}}}}}"), value);
    }
    if text.contains("{{") || text.contains("}}") {
        return Err(CodegenError::UnboundPlaceholderInOutput);
    }
    Ok(CodeArtifact {
        framework_tag: FRAMEWORK_TAG.to_string(),
        template_id: id,
        source_text: text,
    })
}

pub fn render_named(name: &str, bindings: &Bindings) -> Result<CodeArtifact, CodegenError> {
    render(TemplateId::parse(name)?, bindings)
}

/// Shortest round-trip decimal text for a finite number.
pub fn serialize_number(x: f64) -> Result<String, CodegenError> {
    if x.is_finite() {
        Ok(shortest(x))
    } else {
        Err(CodegenError::NonFinite(x))
    }
}

pub fn serialize_list<I, S>(items: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let parts: Vec<String> = items.into_iter().map(|s| s.as_ref().to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn serialize_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

pub fn serialize_complex(re: f64, im: f64) -> Result<String, CodegenError> {
    Ok(format!(
        "complex({}, {})",
        serialize_number(re)?,
        serialize_number(im)?
    ))
}

fn solver_bindings(cfg: &SolveConfig, layers: usize, penalty: f64) -> Result<Bindings, CodegenError> {
    Ok(Bindings::from([
        ("layers".to_string(), layers.to_string()),
        ("max_evals".to_string(), cfg.max_evals.to_string()),
        ("penalty".to_string(), serialize_number(penalty)?),
        ("seed".to_string(), cfg.seed.to_string()),
        ("shots".to_string(), cfg.shots.to_string()),
    ]))
}

/// Renders the `tsp_solver` template for an instance, using the VQE settings of `cfg`.
pub fn tsp_solver_code(inst: &TspInstance, cfg: &SolveConfig) -> Result<CodeArtifact, CodegenError> {
    let penalty = cfg.penalty.unwrap_or_else(|| tsp_auto_penalty(inst));
    let mut b = solver_bindings(cfg, cfg.vqe_layers, penalty)?;
    b.insert("cities".into(), serialize_list(inst.labels.iter().map(|c| serialize_str(c))));
    let rows = inst
        .distances
        .iter()
        .map(|row| {
            row.iter()
                .map(|d| serialize_number(*d))
                .collect::<Result<Vec<_>, _>>()
                .map(serialize_list)
        })
        .collect::<Result<Vec<_>, _>>()?;
    b.insert("distances".into(), serialize_list(rows));
    render(TemplateId::TspSolver, &b)
}

/// Renders the `kp_solver` template for an instance, using the QAOA settings of `cfg`.
pub fn kp_solver_code(inst: &KpInstance, cfg: &SolveConfig) -> Result<CodeArtifact, CodegenError> {
    let penalty = cfg.penalty.unwrap_or_else(|| kp_auto_penalty(inst));
    let mut b = solver_bindings(cfg, cfg.qaoa_layers, penalty)?;
    b.insert("items".into(), serialize_list(inst.items.iter().map(|c| serialize_str(c))));
    b.insert("weights".into(), serialize_list(inst.weights.iter().map(u64::to_string)));
    b.insert("values".into(), serialize_list(inst.values.iter().map(u64::to_string)));
    b.insert("capacity".into(), inst.capacity.to_string());
    render(TemplateId::KpSolver, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings(pairs: &[(&str, &str)]) -> Bindings {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn placeholder_sets_match_required_bindings() {
        for id in TemplateId::ALL {
            let found = placeholders(id.body());
            let declared: BTreeSet<String> =
                id.required_bindings().iter().map(|s| s.to_string()).collect();
            assert_eq!(found, declared, "{}", id.as_str());
        }
    }

    #[test]
    fn missing_and_extra_bindings_rejected() {
        let err = render(
            TemplateId::ApplyGate,
            &bindings(&[("gate_call", "h(0)"), ("n_qubits", "1")]),
        )
        .unwrap_err();
        assert_eq!(err, CodegenError::MissingBinding(vec!["initial_state".into()]));
        let err = render(
            TemplateId::DrawGate,
            &bindings(&[("gate_call", "h(0)"), ("n_qubits", "1"), ("x", "1")]),
        )
        .unwrap_err();
        assert_eq!(err, CodegenError::UnexpectedBinding(vec!["x".into()]));
        assert_eq!(
            render_named("bell_state", &Bindings::new()).unwrap_err(),
            CodegenError::UnknownTemplate("bell_state".into())
        );
    }

    #[test]
    fn binding_value_containing_braces_is_caught() {
        let err = render(
            TemplateId::DrawGate,
            &bindings(&[("gate_call", "{{oops}}"), ("n_qubits", "1")]),
        )
        .unwrap_err();
        assert_eq!(err, CodegenError::UnboundPlaceholderInOutput);
    }

    #[test]
    fn numbers() {
        assert_eq!(serialize_number(0.5).unwrap(), "0.5");
        assert_eq!(
            serialize_number(std::f64::consts::FRAC_PI_2).unwrap(),
            "1.5707963267948966"
        );
        assert_eq!(serialize_number(10.0).unwrap(), "10");
        assert!(matches!(
            serialize_number(f64::NAN),
            Err(CodegenError::NonFinite(_))
        ));
        assert_eq!(serialize_list(["1", "2"]), "[1, 2]");
        assert_eq!(serialize_str("Bern"), "\"Bern\"");
    }

    #[test]
    fn artifacts_carry_framework_tag_and_comments() {
        let a = render(
            TemplateId::DrawGate,
            &bindings(&[("gate_call", "h(0)"), ("n_qubits", "1")]),
        )
        .unwrap();
        assert_eq!(a.framework_tag, FRAMEWORK_TAG);
        assert!(a.source_text.contains("qc.h(0)"));
        assert!(a.source_text.lines().any(|l| l.starts_with('#')));
    }
}
