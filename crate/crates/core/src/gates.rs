//! The fourteen-gate catalog and the three gate answer types: define, draw, apply.

use crate::codegen::{self, Bindings, CodeArtifact, CodegenError, TemplateId};
use crate::format::significant;
use crate::ket::render_state;
use crate::quantum::{apply_unitary, Amplitude, QuantumError, Statevector, UnitaryMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("unknown gate '{0}'")]
    UnknownGate(String),
    #[error("gate {gate} needs parameter '{slot}'")]
    MissingParameter { gate: GateId, slot: ParamSlot },
    #[error("gate {gate} does not take parameter '{slot}'")]
    UnexpectedParameter { gate: GateId, slot: ParamSlot },
    #[error("parameter '{slot}' must be finite")]
    NonFiniteParameter { slot: ParamSlot },
    #[error("gate {gate} acts on {arity} qubit(s) but the state has {got}")]
    ArityMismatch { gate: GateId, arity: usize, got: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateId {
    I,
    X,
    Y,
    Z,
    S,
    Sdg,
    H,
    Phase,
    Rx,
    Ry,
    Rz,
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "CZ")]
    Cz,
    #[serde(rename = "SWAP")]
    Swap,
}

impl GateId {
    pub const ALL: [GateId; 14] = [
        GateId::I,
        GateId::X,
        GateId::Y,
        GateId::Z,
        GateId::S,
        GateId::Sdg,
        GateId::H,
        GateId::Phase,
        GateId::Rx,
        GateId::Ry,
        GateId::Rz,
        GateId::Cnot,
        GateId::Cz,
        GateId::Swap,
    ];

    /// Asset file stem.
    pub fn slug(self) -> &'static str {
        match self {
            GateId::I => "i",
            GateId::X => "x",
            GateId::Y => "y",
            GateId::Z => "z",
            GateId::S => "s",
            GateId::Sdg => "sdg",
            GateId::H => "h",
            GateId::Phase => "phase",
            GateId::Rx => "rx",
            GateId::Ry => "ry",
            GateId::Rz => "rz",
            GateId::Cnot => "cnot",
            GateId::Cz => "cz",
            GateId::Swap => "swap",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateId::Cnot | GateId::Cz | GateId::Swap => 2,
            _ => 1,
        }
    }

    pub fn parameter_slots(self) -> &'static [ParamSlot] {
        match self {
            GateId::Phase => &[ParamSlot::PhaseShift],
            GateId::Rx | GateId::Ry | GateId::Rz => &[ParamSlot::Angle],
            _ => &[],
        }
    }

    pub fn rotation_axis(self) -> Option<Axis> {
        match self {
            GateId::Rx => Some(Axis::X),
            GateId::Ry => Some(Axis::Y),
            GateId::Rz => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn rotation_for_axis(axis: Axis) -> GateId {
        match axis {
            Axis::X => GateId::Rx,
            Axis::Y => GateId::Ry,
            Axis::Z => GateId::Rz,
        }
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(spec(*self).display_name.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSlot {
    PhaseShift,
    Angle,
    Axis,
}

impl fmt::Display for ParamSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamSlot::PhaseShift => "phase_shift",
            ParamSlot::Angle => "angle",
            ParamSlot::Axis => "axis",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_letter(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// Parameter values in radians.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
}

impl GateParams {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn phase(phi: f64) -> Self {
        Self {
            phase_shift: Some(phi),
            ..Self::default()
        }
    }

    pub fn angle(theta: f64) -> Self {
        Self {
            angle: Some(theta),
            ..Self::default()
        }
    }

    /// Checks populated slots against the gate's parameter slots.
    pub fn validate(&self, gate: GateId) -> Result<(), GateError> {
        let slots = gate.parameter_slots();
        for (slot, value) in [
            (ParamSlot::PhaseShift, self.phase_shift),
            (ParamSlot::Angle, self.angle),
        ] {
            match (slots.contains(&slot), value) {
                (true, None) => return Err(GateError::MissingParameter { gate, slot }),
                (false, Some(_)) => return Err(GateError::UnexpectedParameter { gate, slot }),
                (true, Some(v)) if !v.is_finite() => {
                    return Err(GateError::NonFiniteParameter { slot })
                }
                _ => {}
            }
        }
        // an axis is accepted only as a restatement of the rotation gate's own axis
        if let Some(axis) = self.axis {
            if gate.rotation_axis() != Some(axis) {
                return Err(GateError::UnexpectedParameter {
                    gate,
                    slot: ParamSlot::Axis,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSlotSpec {
    pub name: ParamSlot,
    pub unit: &'static str,
}

/// Catalog entry loaded from the curated asset files.
#[derive(Debug, Clone)]
pub struct GateSpec {
    pub id: GateId,
    pub display_name: String,
    pub aliases: Vec<String>,
    pub arity: usize,
    pub parameter_slots: Vec<ParamSlotSpec>,
    pub definition_text: String,
    diagram_template: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDiagram {
    pub lines: Vec<String>,
}

impl CircuitDiagram {
    pub fn to_text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn asset(id: GateId) -> &'static str {
    match id {
        GateId::I => include_str!("../assets/gates/i.txt"),
        GateId::X => include_str!("../assets/gates/x.txt"),
        GateId::Y => include_str!("../assets/gates/y.txt"),
        GateId::Z => include_str!("../assets/gates/z.txt"),
        GateId::S => include_str!("../assets/gates/s.txt"),
        GateId::Sdg => include_str!("../assets/gates/sdg.txt"),
        GateId::H => include_str!("../assets/gates/h.txt"),
        GateId::Phase => include_str!("../assets/gates/phase.txt"),
        GateId::Rx => include_str!("../assets/gates/rx.txt"),
        GateId::Ry => include_str!("../assets/gates/ry.txt"),
        GateId::Rz => include_str!("../assets/gates/rz.txt"),
        GateId::Cnot => include_str!("../assets/gates/cnot.txt"),
        GateId::Cz => include_str!("../assets/gates/cz.txt"),
        GateId::Swap => include_str!("../assets/gates/swap.txt"),
    }
}

fn parse_asset(id: GateId, text: &str) -> GateSpec {
    let mut sections = text.split("\n===\n");
    let header = sections.next().unwrap_or_default();
    let definition = sections.next().unwrap_or_default().trim().to_string();
    let diagram = sections.next().unwrap_or_default();
    let mut display_name = String::new();
    let mut aliases = Vec::new();
    for line in header.lines() {
        if let Some(v) = line.strip_prefix("name:") {
            display_name = v.trim().to_string();
        } else if let Some(v) = line.strip_prefix("aliases:") {
            aliases = v.split(',').map(|a| a.trim().to_lowercase()).collect();
        }
    }
    GateSpec {
        id,
        display_name,
        aliases,
        arity: id.arity(),
        parameter_slots: id
            .parameter_slots()
            .iter()
            .map(|&name| ParamSlotSpec {
                name,
                unit: "radians",
            })
            .collect(),
        definition_text: definition,
        diagram_template: diagram.lines().map(str::to_string).collect(),
    }
}

static CATALOG: OnceLock<Vec<GateSpec>> = OnceLock::new();

pub fn catalog() -> &'static [GateSpec] {
    CATALOG.get_or_init(|| {
        GateId::ALL
            .iter()
            .map(|&id| parse_asset(id, asset(id)))
            .collect()
    })
}

pub fn spec(id: GateId) -> &'static GateSpec {
    &catalog()[GateId::ALL.iter().position(|&g| g == id).expect("closed set")]
}

fn normalize_name(name: &str) -> String {
    name.trim()
        .to_lowercase()
        .replace(['_', '\u{2010}', '\u{2013}'], "-")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Resolves a gate by display name or alias, ignoring case.
pub fn lookup_gate(name: &str) -> Result<&'static GateSpec, GateError> {
    let key = normalize_name(name);
    let key = key.strip_prefix("the ").unwrap_or(&key);
    catalog()
        .iter()
        .find(|s| s.display_name.to_lowercase() == key || s.aliases.iter().any(|a| a == key))
        .ok_or_else(|| GateError::UnknownGate(name.trim().to_string()))
}

fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

pub fn gate_matrix(id: GateId, params: &GateParams) -> Result<UnitaryMatrix, GateError> {
    params.validate(id)?;
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let h = c(FRAC_1_SQRT_2, 0.0);
    let entries = match id {
        GateId::I => vec![one, z, z, one],
        GateId::X => vec![z, one, one, z],
        GateId::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        GateId::Z => vec![one, z, z, -one],
        GateId::S => vec![one, z, z, c(0.0, 1.0)],
        GateId::Sdg => vec![one, z, z, c(0.0, -1.0)],
        GateId::H => vec![h, h, h, -h],
        GateId::Phase => {
            let phi = params.phase_shift.expect("validated");
            vec![one, z, z, Amplitude::from_polar(1.0, phi)]
        }
        GateId::Rx => {
            let t = params.angle.expect("validated") / 2.0;
            vec![c(t.cos(), 0.0), c(0.0, -t.sin()), c(0.0, -t.sin()), c(t.cos(), 0.0)]
        }
        GateId::Ry => {
            let t = params.angle.expect("validated") / 2.0;
            vec![c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)]
        }
        GateId::Rz => {
            let t = params.angle.expect("validated") / 2.0;
            vec![Amplitude::from_polar(1.0, -t), z, z, Amplitude::from_polar(1.0, t)]
        }
        // control on local bit 0 (qubit 0), target on local bit 1
        GateId::Cnot => vec![
            one, z, z, z, //
            z, z, z, one, //
            z, z, one, z, //
            z, one, z, z,
        ],
        GateId::Cz => vec![
            one, z, z, z, //
            z, one, z, z, //
            z, z, one, z, //
            z, z, z, -one,
        ],
        GateId::Swap => vec![
            one, z, z, z, //
            z, z, one, z, //
            z, one, z, z, //
            z, z, z, one,
        ],
    };
    Ok(UnitaryMatrix::new(2 * id.arity(), entries)?)
}

fn render_entry(a: Amplitude) -> String {
    let state_like = render_state(&Statevector::from_amplitudes_unchecked(vec![a, c(0.0, 0.0)]));
    // reuse the ket coefficient formatter: "<coeff>|0⟩"
    match state_like.strip_suffix("|0⟩") {
        Some("") => "1".into(),
        Some("-") => "-1".into(),
        Some(coeff) => coeff.to_string(),
        None => "0".into(),
    }
}

/// Row-per-line text rendering of a matrix.
pub fn render_matrix(m: &UnitaryMatrix) -> String {
    let d = m.dim();
    let cells: Vec<Vec<String>> = (0..d)
        .map(|r| (0..d).map(|col| render_entry(m.get(r, col))).collect())
        .collect();
    let width = cells
        .iter()
        .flatten()
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(1);
    cells
        .iter()
        .map(|row| {
            let padded: Vec<String> = row
                .iter()
                .map(|s| format!("{}{}", " ".repeat(width - s.chars().count()), s))
                .collect();
            format!("[ {} ]", padded.join("  "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn substitute_params(text: &str, params: &GateParams, digits: usize) -> String {
    let mut out = text.to_string();
    if let Some(phi) = params.phase_shift {
        out = out.replace("{phase_shift}", &significant(phi, digits));
    }
    if let Some(theta) = params.angle {
        out = out.replace("{angle}", &significant(theta, digits));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefinitionAnswer {
    pub text: String,
    pub matrix: UnitaryMatrix,
}

pub fn define_gate(id: GateId, params: &GateParams) -> Result<DefinitionAnswer, GateError> {
    let matrix = gate_matrix(id, params)?;
    let s = spec(id);
    let text = format!(
        "{}\n\nMatrix of the {} gate in the computational basis:\n{}",
        substitute_params(&s.definition_text, params, 6),
        s.display_name,
        render_matrix(&matrix)
    );
    Ok(DefinitionAnswer { text, matrix })
}

fn draw_diagram(id: GateId, params: &GateParams) -> CircuitDiagram {
    let s = spec(id);
    let mut lines: Vec<String> = s
        .diagram_template
        .iter()
        .map(|l| substitute_params(l, params, 4))
        .collect();
    // box borders follow the rendered label width
    if let Some(label_line) = lines.iter().find(|l| l.contains('┤')) {
        let label_width = label_line.chars().count() - "q_0: ┤  ├".chars().count();
        let bar = "─".repeat(label_width + 2);
        for l in lines.iter_mut() {
            *l = l.replace("{bar}", &bar);
        }
    }
    let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    for l in lines.iter_mut() {
        let pad = width - l.chars().count();
        l.push_str(&" ".repeat(pad));
    }
    CircuitDiagram { lines }
}

/// Qiskit method call placing the gate on qubits 0 (and 1).
pub fn gate_call(id: GateId, params: &GateParams) -> Result<String, GateError> {
    params.validate(id)?;
    let num = |v: Option<f64>| codegen::serialize_number(v.expect("validated"));
    Ok(match id {
        GateId::I => "id(0)".into(),
        GateId::X => "x(0)".into(),
        GateId::Y => "y(0)".into(),
        GateId::Z => "z(0)".into(),
        GateId::S => "s(0)".into(),
        GateId::Sdg => "sdg(0)".into(),
        GateId::H => "h(0)".into(),
        GateId::Phase => format!("p({}, 0)", num(params.phase_shift)?),
        GateId::Rx => format!("rx({}, 0)", num(params.angle)?),
        GateId::Ry => format!("ry({}, 0)", num(params.angle)?),
        GateId::Rz => format!("rz({}, 0)", num(params.angle)?),
        GateId::Cnot => "cx(0, 1)".into(),
        GateId::Cz => "cz(0, 1)".into(),
        GateId::Swap => "swap(0, 1)".into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawAnswer {
    pub diagram: CircuitDiagram,
    pub code: CodeArtifact,
}

pub fn draw_gate(id: GateId, params: &GateParams) -> Result<DrawAnswer, GateError> {
    let call = gate_call(id, params)?;
    let bindings = Bindings::from([
        ("gate_call".to_string(), call),
        ("n_qubits".to_string(), id.arity().to_string()),
    ]);
    Ok(DrawAnswer {
        diagram: draw_diagram(id, params),
        code: codegen::render(TemplateId::DrawGate, &bindings)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplyAnswer {
    pub final_state: Statevector,
    pub rendered_text: String,
    pub code: CodeArtifact,
}

/// Serializes amplitudes as a Python list of `complex(re, im)` values.
pub fn serialize_amplitudes(state: &Statevector) -> Result<String, CodegenError> {
    let parts = state
        .amplitudes()
        .iter()
        .map(|a| codegen::serialize_complex(a.re, a.im))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(codegen::serialize_list(parts))
}

pub fn apply_gate(
    id: GateId,
    params: &GateParams,
    initial: &Statevector,
) -> Result<ApplyAnswer, GateError> {
    let u = gate_matrix(id, params)?;
    if initial.n_qubits() != id.arity() {
        return Err(GateError::ArityMismatch {
            gate: id,
            arity: id.arity(),
            got: initial.n_qubits(),
        });
    }
    let targets: Vec<usize> = (0..id.arity()).collect();
    let final_state = apply_unitary(initial, &u, &targets)?;
    let rendered_text = format!(
        "Applying the {} gate to the initial state {} gives the state {}",
        spec(id).display_name,
        render_state(initial),
        render_state(&final_state)
    );
    let bindings = Bindings::from([
        ("gate_call".to_string(), gate_call(id, params)?),
        ("initial_state".to_string(), serialize_amplitudes(initial)?),
        ("n_qubits".to_string(), id.arity().to_string()),
    ]);
    Ok(ApplyAnswer {
        final_state,
        rendered_text,
        code: codegen::render(TemplateId::ApplyGate, &bindings)?,
    })
}
