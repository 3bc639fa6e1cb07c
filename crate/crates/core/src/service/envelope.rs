//! Wire types of the JSON API. Every envelope carries `schema_version`.

use crate::codegen::CodeArtifact;
use crate::extraction::{KpParams, TspParams};
use crate::gates::{CircuitDiagram, GateId, GateParams};
use crate::intent::{ConfirmationPrompt, Intent};
use crate::qubo::{Selection, Tour};
use crate::variational::{SolveConfig, SolveResult};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A gate request as shown for confirmation; every field is editable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRequest {
    pub gate: Option<GateId>,
    #[serde(default)]
    pub params: GateParams,
    /// Ket notation, such as `"(|0⟩+|1⟩)/sqrt(2)"`; used by apply requests only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RequestParams {
    Gate(GateRequest),
    Tsp(TspParams),
    Kp(KpParams),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub field: String,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfirmationEnvelope {
    pub schema_version: String,
    pub session_id: String,
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    pub prompt: ConfirmationPrompt,
    pub params: RequestParams,
    /// Field paths still lacking a value, such as `"distances.Bern.Chur"`.
    pub missing: Vec<String>,
    /// Field paths filled by mirroring the opposite direction.
    pub assumed: Vec<String>,
    pub ambiguous: Vec<Ambiguity>,
    /// For TSP and KP: whether the backend can run the instance as it stands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub computable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub ket: String,
    /// `[re, im]` per basis index, little-endian qubit order.
    pub amplitudes: Vec<[f64; 2]>,
}

/// The deterministic part of an answer; recomputable from its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerBody {
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<CircuitDiagram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_state: Option<StateView>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeArtifact>,
    /// Qubits the backend solver would need; TSP and KP only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub computable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confirmed_params: Option<RequestParams>,
    pub engine_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolveConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEnvelope {
    pub schema_version: String,
    pub session_id: String,
    #[serde(flatten)]
    pub body: AnswerBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compute_token: Option<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveBody {
    pub intent: Intent,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tour: Option<Tour>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Selection>,
    pub result: SolveResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveEnvelope {
    pub schema_version: String,
    pub session_id: String,
    #[serde(flatten)]
    pub body: SolveBody,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Confirmation(ConfirmationEnvelope),
    Answer(AnswerEnvelope),
    Solve(SolveEnvelope),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    pub schema_version: String,
    pub kind: String,
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
    /// Code for local execution when the backend declines to run an instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeArtifact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackAck {
    pub schema_version: String,
    pub receipt_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeleteAck {
    pub schema_version: String,
    pub session_id: String,
    pub retained_questions: usize,
}
