//! Session state machine: classify, extract, confirm, answer, compute.

use super::envelope::*;
use super::store::{FeedbackRecord, RetainedQuestion, Store};
use crate::codegen::{kp_solver_code, tsp_solver_code, CodeArtifact};
use crate::extraction::{
    extract_kp, extract_tsp, find_states, ExtractionError, ExtractionQuestion, Extractor, KpParams,
    RuleExtractor, TspParams,
};
use crate::gates::{self, render_matrix, spec, GateId, ParamSlot};
use crate::intent::{confirm_interpretation, ClassifiedQuery, Intent, IntentClassifier, RuleClassifier};
use crate::ket::{parse_ket, render_state};
use crate::qubo::{KpInstance, TspInstance};
use crate::variational::{kp_qubits, solve_kp, solve_tsp, tsp_qubits, SolveConfig, VariationalError, MAX_QUBITS};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

pub const MAX_TEXT_BYTES: usize = 8 * 1024;
pub const MAX_COMMENT_CHARS: usize = 2000;

pub trait Clock: Send + Sync {
    /// Unix milliseconds.
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64)
    }
}

/// A clock that moves only when told to, for expiry tests.
#[derive(Debug, Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn new(start_ms: u64) -> Self {
        Self(AtomicU64::new(start_ms))
    }

    pub fn advance(&self, by: Duration) {
        self.0.fetch_add(by.as_millis() as u64, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now_ms(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub data_dir: PathBuf,
    pub timeout: Duration,
    pub session_ttl: Duration,
    pub job_slots: usize,
    pub solve: SolveConfig,
}

impl EngineConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            data_dir: data_dir.into(),
            timeout: Duration::from_secs(120),
            session_ttl: Duration::from_secs(60 * 60),
            job_slots: std::thread::available_parallelism().map_or(1, |n| n.get()),
            solve: SolveConfig::default(),
        }
    }

    /// Reads `QASSIST_DATA_DIR` and `QASSIST_TIMEOUT_SECS`, falling back to defaults.
    pub fn from_env() -> Self {
        let dir = std::env::var("QASSIST_DATA_DIR").unwrap_or_else(|_| "qassist-data".into());
        let mut cfg = Self::new(dir);
        if let Some(secs) = std::env::var("QASSIST_TIMEOUT_SECS").ok().and_then(|s| s.parse().ok()) {
            cfg.timeout = Duration::from_secs(secs);
        }
        cfg
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("the message is empty")]
    EmptyInput,
    #[error("the message exceeds {MAX_TEXT_BYTES} bytes")]
    TooLarge,
    #[error("no session with id {0}")]
    UnknownSession(String),
    #[error("nothing is awaiting confirmation in this session")]
    NoPending,
    #[error("some parameters are invalid")]
    InvalidParams(Vec<FieldError>),
    #[error("no confirmed request matches this compute token")]
    NotConfirmed,
    #[error("the instance needs {qubits} qubits; the backend simulates at most {MAX_QUBITS}")]
    InstanceTooLarge { qubits: usize, code: Option<Box<CodeArtifact>> },
    #[error("the computation did not finish in time")]
    Timeout,
    #[error("no feasible solution among the sampled outcomes")]
    NoFeasibleSolution,
    #[error("stars must be between 1 and 5, got {0}")]
    StarsOutOfRange(i64),
    #[error("the comment exceeds {MAX_COMMENT_CHARS} characters")]
    CommentTooLong,
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::EmptyInput => 400,
            ServiceError::TooLarge => 413,
            ServiceError::UnknownSession(_) | ServiceError::NoPending => 404,
            ServiceError::NotConfirmed => 409,
            ServiceError::InvalidParams(_)
            | ServiceError::InstanceTooLarge { .. }
            | ServiceError::StarsOutOfRange(_)
            | ServiceError::CommentTooLong => 422,
            ServiceError::Timeout => 504,
            ServiceError::NoFeasibleSolution | ServiceError::Storage(_) | ServiceError::Internal(_) => 500,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::EmptyInput => "empty_input",
            ServiceError::TooLarge => "too_large",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::NoPending => "no_pending",
            ServiceError::InvalidParams(_) => "invalid_params",
            ServiceError::NotConfirmed => "not_confirmed",
            ServiceError::InstanceTooLarge { .. } => "instance_too_large",
            ServiceError::Timeout => "timeout",
            ServiceError::NoFeasibleSolution => "no_feasible_solution",
            ServiceError::StarsOutOfRange(_) => "stars_out_of_range",
            ServiceError::CommentTooLong => "comment_too_long",
            ServiceError::Storage(_) => "storage",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn to_envelope(&self) -> ErrorEnvelope {
        ErrorEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            kind: "error".into(),
            error: self.code().into(),
            message: self.to_string(),
            fields: match self {
                ServiceError::InvalidParams(f) => f.clone(),
                _ => Vec::new(),
            },
            code: match self {
                ServiceError::InstanceTooLarge { code, .. } => code.as_deref().cloned(),
                _ => None,
            },
        }
    }
}

fn field(field: impl Into<String>, message: impl Into<String>) -> FieldError {
    FieldError {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PendingStatus {
    AwaitingConfirmation,
    Confirmed,
    Computing,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub text: String,
    pub intent: Intent,
    pub created_at: u64,
}

#[derive(Debug, Clone)]
enum Instance {
    Tsp(TspInstance),
    Kp(KpInstance),
}

#[derive(Debug, Clone)]
struct Pending {
    query: ClassifiedQuery,
    params: RequestParams,
    status: PendingStatus,
    confirmed: Option<(RequestParams, AnswerEnvelope)>,
    token: Option<String>,
    instance: Option<Instance>,
}

#[derive(Debug)]
struct Session {
    id: String,
    last_active: u64,
    messages: Vec<Message>,
    pending: Option<Pending>,
}

/// Counting semaphore bounding concurrent solver jobs.
#[derive(Debug)]
struct JobSlots {
    free: Mutex<usize>,
    cv: Condvar,
}

struct SlotGuard<'a>(&'a JobSlots);

impl JobSlots {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self, deadline: Instant) -> Option<SlotGuard<'_>> {
        let mut free = self.free.lock().unwrap_or_else(|p| p.into_inner());
        while *free == 0 {
            let left = deadline.checked_duration_since(Instant::now())?;
            free = self.cv.wait_timeout(free, left).unwrap_or_else(|p| p.into_inner()).0;
        }
        *free -= 1;
        Some(SlotGuard(self))
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|p| p.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

pub struct Engine {
    cfg: EngineConfig,
    store: Store,
    clock: Arc<dyn Clock>,
    classifier: Box<dyn IntentClassifier + Send + Sync>,
    extractor: Box<dyn Extractor + Send + Sync>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    slots: JobSlots,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

pub fn capability_text() -> String {
    let names: Vec<String> = gates::catalog().iter().map(|s| s.display_name.clone()).collect();
    format!(
        "I can define, draw or apply a quantum gate ({}), and solve small traveling salesperson \
         and knapsack problems. Try \"Draw the CNOT gate\" or \"What is the Hadamard gate?\".",
        names.join(", ")
    )
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self, ServiceError> {
        Self::with_clock(cfg, Arc::new(SystemClock))
    }

    pub fn with_clock(cfg: EngineConfig, clock: Arc<dyn Clock>) -> Result<Self, ServiceError> {
        Ok(Self {
            store: Store::open(&cfg.data_dir)?,
            slots: JobSlots::new(cfg.job_slots),
            cfg,
            clock,
            classifier: Box::new(RuleClassifier),
            extractor: Box::new(RuleExtractor::default()),
            sessions: Mutex::new(HashMap::new()),
        })
    }

    /// Swaps in another classifier, such as a learned model.
    pub fn with_classifier(mut self, c: Box<dyn IntentClassifier + Send + Sync>) -> Self {
        self.classifier = c;
        self
    }

    pub fn with_extractor(mut self, e: Box<dyn Extractor + Send + Sync>) -> Self {
        self.extractor = e;
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        lock(&self.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn has_session(&self, id: &str) -> bool {
        lock(&self.sessions).contains_key(id)
    }

    pub fn pending_status(&self, id: &str) -> Option<PendingStatus> {
        let s = self.session(id).ok()?;
        let s = lock(&s);
        s.pending.as_ref().map(|p| p.status)
    }

    /// Deletes sessions idle for longer than the configured time to live.
    pub fn sweep_expired(&self) -> usize {
        let now = self.clock.now_ms();
        let ttl = self.cfg.session_ttl.as_millis() as u64;
        let expired: Vec<String> = lock(&self.sessions)
            .iter()
            .filter(|(_, s)| lock(s).last_active.saturating_add(ttl) <= now)
            .map(|(id, _)| id.clone())
            .collect();
        expired.iter().filter(|id| self.delete_session(id).is_ok()).count()
    }

    pub fn chat(&self, session_id: Option<&str>, text: &str) -> Result<Envelope, ServiceError> {
        if text.len() > MAX_TEXT_BYTES {
            return Err(ServiceError::TooLarge);
        }
        if text.trim().is_empty() {
            return Err(ServiceError::EmptyInput);
        }
        self.sweep_expired();
        let now = self.clock.now_ms();
        let id = session_id.map_or_else(|| uuid::Uuid::new_v4().to_string(), str::to_string);
        let session = lock(&self.sessions)
            .entry(id.clone())
            .or_insert_with(|| {
                Arc::new(Mutex::new(Session {
                    id: id.clone(),
                    last_active: now,
                    messages: Vec::new(),
                    pending: None,
                }))
            })
            .clone();
        let query = self.classifier.classify(text).map_err(|_| ServiceError::EmptyInput)?;
        let mut s = lock(&session);
        s.last_active = now;
        s.messages.push(Message {
            text: text.to_string(),
            intent: query.intent,
            created_at: now,
        });
        if query.intent == Intent::Unknown {
            return Ok(Envelope::Answer(AnswerEnvelope {
                schema_version: SCHEMA_VERSION.into(),
                session_id: s.id.clone(),
                body: AnswerBody {
                    intent: Intent::Unknown,
                    gate: None,
                    text: capability_text(),
                    matrix: None,
                    diagram: None,
                    final_state: None,
                    notices: Vec::new(),
                    code: None,
                    qubits: None,
                    computable: None,
                },
                compute_token: None,
                provenance: Provenance {
                    intent: Intent::Unknown,
                    gate: None,
                    confirmed_params: None,
                    engine_version: ENGINE_VERSION.into(),
                    seed: None,
                    solver: None,
                },
            }));
        }
        let draft = self.draft(text, &query);
        let prompt = confirm_interpretation(&query).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let env = ConfirmationEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            session_id: s.id.clone(),
            intent: query.intent,
            gate: query.gate,
            prompt,
            params: draft.params.clone(),
            missing: draft.missing,
            assumed: draft.assumed,
            ambiguous: draft.ambiguous,
            computable: draft.computable,
        };
        s.pending = Some(Pending {
            query,
            params: draft.params,
            status: PendingStatus::AwaitingConfirmation,
            confirmed: None,
            token: None,
            instance: None,
        });
        Ok(Envelope::Confirmation(env))
    }

    fn draft(&self, text: &str, q: &ClassifiedQuery) -> Draft {
        match q.intent {
            Intent::SolveTsp => tsp_draft(text),
            Intent::SolveKp => kp_draft(text),
            _ => gate_draft(self.extractor.as_ref(), text, q),
        }
    }

    pub fn confirm(&self, session_id: &str, edited: Option<RequestParams>) -> Result<Envelope, ServiceError> {
        self.sweep_expired();
        let session = self.session(session_id)?;
        let mut s = lock(&session);
        s.last_active = self.clock.now_ms();
        let sid = s.id.clone();
        let pending = s.pending.as_mut().ok_or(ServiceError::NoPending)?;
        let payload = edited.unwrap_or_else(|| pending.params.clone());
        if pending.status != PendingStatus::AwaitingConfirmation {
            // replaying the same confirmation returns the same envelope
            return match &pending.confirmed {
                Some((p, env)) if *p == payload => Ok(Envelope::Answer(env.clone())),
                _ => Err(ServiceError::NoPending),
            };
        }
        let intent = pending.query.intent;
        let solver = matches!(intent, Intent::SolveTsp | Intent::SolveKp).then(|| self.cfg.solve.clone());
        let (body, instance) = answer_for(intent, &payload, solver.as_ref())?;
        let token = instance.as_ref().map(|_| uuid::Uuid::new_v4().to_string());
        let env = AnswerEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            session_id: sid,
            body,
            compute_token: token.clone(),
            provenance: provenance(intent, &payload, solver),
        };
        pending.status = PendingStatus::Confirmed;
        pending.token = token;
        pending.instance = instance;
        pending.confirmed = Some((payload, env.clone()));
        Ok(Envelope::Answer(env))
    }

    pub fn compute(&self, session_id: &str, token: &str) -> Result<Envelope, ServiceError> {
        self.sweep_expired();
        let session = self.session(session_id)?;
        let (instance, prov, sid) = {
            let mut s = lock(&session);
            s.last_active = self.clock.now_ms();
            let sid = s.id.clone();
            let p = s.pending.as_mut().ok_or(ServiceError::NotConfirmed)?;
            if p.status != PendingStatus::Confirmed || p.token.as_deref() != Some(token) {
                return Err(ServiceError::NotConfirmed);
            }
            let instance = p.instance.clone().ok_or(ServiceError::NotConfirmed)?;
            let (_, env) = p.confirmed.as_ref().ok_or(ServiceError::NotConfirmed)?;
            let prov = env.provenance.clone();
            let qubits = env.body.qubits.unwrap_or(0);
            if qubits > MAX_QUBITS {
                return Err(ServiceError::InstanceTooLarge {
                    qubits,
                    code: env.body.code.clone().map(Box::new),
                });
            }
            p.status = PendingStatus::Computing;
            (instance, prov, sid)
        };
        let deadline = Instant::now() + self.cfg.timeout;
        let result = match self.slots.acquire(deadline) {
            Some(_slot) => {
                let mut cfg = prov.solver.clone().unwrap_or_default();
                cfg.deadline = Some(deadline);
                run_solve(prov.intent, &instance, &cfg)
            }
            None => Err(ServiceError::Timeout),
        };
        if let Some(p) = lock(&session).pending.as_mut() {
            p.status = PendingStatus::Done;
            p.token = None;
        }
        Ok(Envelope::Solve(SolveEnvelope {
            schema_version: SCHEMA_VERSION.into(),
            session_id: sid,
            body: result?,
            provenance: prov,
        }))
    }

    pub fn feedback(&self, session_id: &str, stars: i64, comment: Option<String>) -> Result<FeedbackAck, ServiceError> {
        if !(1..=5).contains(&stars) {
            return Err(ServiceError::StarsOutOfRange(stars));
        }
        if comment.as_ref().is_some_and(|c| c.chars().count() > MAX_COMMENT_CHARS) {
            return Err(ServiceError::CommentTooLong);
        }
        self.sweep_expired();
        let session = self.session(session_id)?;
        lock(&session).last_active = self.clock.now_ms();
        let receipt_id = uuid::Uuid::new_v4().to_string();
        self.store.append_feedback(&FeedbackRecord {
            receipt_id: receipt_id.clone(),
            session_id: Some(session_id.to_string()),
            stars: stars as u8,
            comment,
            created_at: self.clock.now_ms(),
        })?;
        Ok(FeedbackAck {
            schema_version: SCHEMA_VERSION.into(),
            receipt_id,
        })
    }

    /// Erases the conversation, keeping only question texts and their intents.
    pub fn delete_session(&self, session_id: &str) -> Result<DeleteAck, ServiceError> {
        let session = lock(&self.sessions)
            .remove(session_id)
            .ok_or_else(|| ServiceError::UnknownSession(session_id.to_string()))?;
        let mut s = lock(&session);
        let retained: Vec<RetainedQuestion> = s
            .messages
            .drain(..)
            .map(|m| RetainedQuestion {
                text: m.text,
                intent: m.intent,
                created_at: m.created_at,
            })
            .collect();
        s.pending = None;
        self.store.append_retained(&retained)?;
        self.store.unlink_feedback(session_id)?;
        Ok(DeleteAck {
            schema_version: SCHEMA_VERSION.into(),
            session_id: session_id.to_string(),
            retained_questions: retained.len(),
        })
    }
}

fn provenance(intent: Intent, params: &RequestParams, solver: Option<SolveConfig>) -> Provenance {
    let gate = match params {
        RequestParams::Gate(g) => g.gate,
        _ => None,
    };
    Provenance {
        intent,
        gate,
        confirmed_params: Some(params.clone()),
        engine_version: ENGINE_VERSION.into(),
        seed: solver.as_ref().map(|c| c.seed),
        solver,
    }
}

struct Draft {
    params: RequestParams,
    missing: Vec<String>,
    assumed: Vec<String>,
    ambiguous: Vec<Ambiguity>,
    computable: Option<bool>,
}

fn gate_draft(ex: &dyn Extractor, text: &str, q: &ClassifiedQuery) -> Draft {
    let mut req = GateRequest {
        gate: q.gate,
        params: Default::default(),
        initial_state: None,
    };
    let mut missing = Vec::new();
    let mut ambiguous = Vec::new();
    let mut slot = |question: ExtractionQuestion, name: &str| -> Option<f64> {
        match ex.answer(&question, text) {
            Ok(a) => match a.value {
                crate::extraction::AnswerValue::Angle { radians } => Some(radians),
                _ => None,
            },
            Err(ExtractionError::Ambiguous(c)) => {
                ambiguous.push(Ambiguity {
                    field: format!("params.{name}"),
                    candidates: c,
                });
                None
            }
            Err(_) => {
                missing.push(format!("params.{name}"));
                None
            }
        }
    };
    match q.gate {
        Some(g) => {
            let slots = g.parameter_slots();
            if slots.contains(&ParamSlot::PhaseShift) {
                req.params.phase_shift = slot(ExtractionQuestion::PhaseShift, "phase_shift");
            }
            if slots.contains(&ParamSlot::Angle) {
                req.params.angle = slot(ExtractionQuestion::RotationAngle, "angle");
            }
            req.params.axis = g.rotation_axis();
        }
        None => missing.push("gate".to_string()),
    }
    if q.intent == Intent::ApplyGate {
        let arity = q.gate.map(GateId::arity);
        let mut found: Vec<String> = Vec::new();
        for m in find_states(text) {
            if arity.is_none_or(|a| m.expr.n_qubits() == a) {
                let span = text[m.start..m.end].to_string();
                if !found.contains(&span) {
                    found.push(span);
                }
            }
        }
        match found.len() {
            0 => missing.push("initial_state".to_string()),
            1 => req.initial_state = found.pop(),
            _ => ambiguous.push(Ambiguity {
                field: "initial_state".into(),
                candidates: found,
            }),
        }
    }
    Draft {
        params: RequestParams::Gate(req),
        missing,
        assumed: Vec::new(),
        ambiguous,
        computable: None,
    }
}

fn tsp_draft(text: &str) -> Draft {
    match extract_tsp(text) {
        Ok(d) => {
            let n = d.params.cities.len();
            Draft {
                missing: d.missing.iter().map(|(a, b)| format!("distances.{a}.{b}")).collect(),
                assumed: d.assumed.iter().map(|(a, b)| format!("distances.{a}.{b}")).collect(),
                ambiguous: Vec::new(),
                computable: Some(tsp_qubits(n) <= MAX_QUBITS),
                params: RequestParams::Tsp(d.params),
            }
        }
        Err(_) => Draft {
            params: RequestParams::Tsp(TspParams {
                cities: Vec::new(),
                distances: Vec::new(),
            }),
            missing: vec!["cities".into()],
            assumed: Vec::new(),
            ambiguous: Vec::new(),
            computable: None,
        },
    }
}

fn kp_draft(text: &str) -> Draft {
    match extract_kp(text) {
        Ok(d) => {
            let computable = kp_instance(&d.params).ok().map(|i| kp_qubits(&i) <= MAX_QUBITS);
            Draft {
                missing: d.missing,
                assumed: Vec::new(),
                ambiguous: d
                    .ambiguous
                    .into_iter()
                    .map(|field| Ambiguity {
                        field,
                        candidates: Vec::new(),
                    })
                    .collect(),
                computable,
                params: RequestParams::Kp(d.params),
            }
        }
        Err(_) => Draft {
            params: RequestParams::Kp(KpParams {
                items: Vec::new(),
                weights: Default::default(),
                values: Default::default(),
                capacity: None,
            }),
            missing: vec!["items".into()],
            assumed: Vec::new(),
            ambiguous: Vec::new(),
            computable: None,
        },
    }
}

fn tsp_instance(p: &TspParams) -> Result<TspInstance, ServiceError> {
    let n = p.cities.len();
    let mut errs = Vec::new();
    if n < 2 {
        errs.push(field("cities", "name at least two cities"));
    }
    for (i, c) in p.cities.iter().enumerate() {
        if c.trim().is_empty() {
            errs.push(field(format!("cities.{i}"), "city name is empty"));
        }
        if p.cities[..i].iter().any(|o| o.eq_ignore_ascii_case(c)) {
            errs.push(field(format!("cities.{i}"), format!("{c} is listed twice")));
        }
    }
    let mut d = vec![vec![0.0; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let path = format!("distances.{}.{}", p.cities[i], p.cities[j]);
            match p.distances.get(i).and_then(|r| r.get(j)).copied().flatten() {
                None => errs.push(field(path, "distance is missing")),
                Some(v) if !v.is_finite() || v < 0.0 => {
                    errs.push(field(path, "distance must be a nonnegative number"))
                }
                Some(v) => *cell = v,
            }
        }
    }
    if !errs.is_empty() {
        return Err(ServiceError::InvalidParams(errs));
    }
    TspInstance::new(p.cities.clone(), d).map_err(|e| ServiceError::InvalidParams(vec![field("distances", e.to_string())]))
}

const SCALING_HINT: &str =
    "weights, values and capacity must be whole numbers; multiply them all by the same power of ten to make them integers";

fn kp_instance(p: &KpParams) -> Result<KpInstance, ServiceError> {
    let mut errs = Vec::new();
    if p.items.is_empty() {
        errs.push(field("items", "list at least one item"));
    }
    for (i, it) in p.items.iter().enumerate() {
        if p.items[..i].contains(it) {
            errs.push(field(format!("items.{i}"), format!("{it} is listed twice")));
        }
    }
    let mut check = |path: String, v: Option<f64>| -> f64 {
        match v {
            None => errs.push(field(path, "value is missing")),
            Some(x) if !x.is_finite() || x <= 0.0 => errs.push(field(path, "must be a positive number")),
            Some(x) if x.fract() != 0.0 => errs.push(field(path, SCALING_HINT)),
            Some(x) => return x,
        }
        0.0
    };
    let mut weights = Vec::new();
    let mut values = Vec::new();
    for it in &p.items {
        weights.push(check(format!("weights.{it}"), p.weights.get(it).copied()));
        values.push(check(format!("values.{it}"), p.values.get(it).copied()));
    }
    let capacity = check("capacity".into(), p.capacity);
    for key in p.weights.keys().chain(p.values.keys()) {
        if !p.items.contains(key) {
            errs.push(field(format!("weights.{key}"), format!("{key} is not in the item list")));
        }
    }
    if !errs.is_empty() {
        return Err(ServiceError::InvalidParams(errs));
    }
    KpInstance::from_reals(p.items.clone(), &weights, &values, capacity)
        .map_err(|e| ServiceError::InvalidParams(vec![field("items", e.to_string())]))
}

fn state_view(s: &crate::quantum::Statevector) -> StateView {
    StateView {
        ket: render_state(s),
        amplitudes: s.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    }
}

fn gate_error(e: gates::GateError) -> ServiceError {
    let path = match &e {
        gates::GateError::MissingParameter { slot, .. }
        | gates::GateError::UnexpectedParameter { slot, .. }
        | gates::GateError::NonFiniteParameter { slot } => format!("params.{slot}"),
        gates::GateError::ArityMismatch { .. } => "initial_state".into(),
        _ => "gate".into(),
    };
    ServiceError::InvalidParams(vec![field(path, e.to_string())])
}

fn type_error(intent: Intent) -> ServiceError {
    let want = match intent {
        Intent::SolveTsp => "tsp",
        Intent::SolveKp => "kp",
        _ => "gate",
    };
    ServiceError::InvalidParams(vec![field("type", format!("this request expects parameters of type {want}"))])
}

/// Builds the answer for confirmed parameters. Pure, so audits can replay it.
fn answer_for(
    intent: Intent,
    params: &RequestParams,
    solver: Option<&SolveConfig>,
) -> Result<(AnswerBody, Option<Instance>), ServiceError> {
    let mut body = AnswerBody {
        intent,
        gate: None,
        text: String::new(),
        matrix: None,
        diagram: None,
        final_state: None,
        notices: Vec::new(),
        code: None,
        qubits: None,
        computable: None,
    };
    let cfg = solver.cloned().unwrap_or_default();
    match (intent, params) {
        (Intent::DefineGate | Intent::DrawGate | Intent::ApplyGate, RequestParams::Gate(req)) => {
            let id = req
                .gate
                .ok_or_else(|| ServiceError::InvalidParams(vec![field("gate", "choose a gate from the catalog")]))?;
            req.params.validate(id).map_err(gate_error)?;
            body.gate = Some(id);
            match intent {
                Intent::DefineGate => {
                    let d = gates::define_gate(id, &req.params).map_err(gate_error)?;
                    body.text = d.text;
                    body.matrix = Some(render_matrix(&d.matrix));
                }
                Intent::DrawGate => {
                    let d = gates::draw_gate(id, &req.params).map_err(gate_error)?;
                    body.text = format!("The {} gate in a circuit, with the Qiskit code that draws it.", spec(id).display_name);
                    body.diagram = Some(d.diagram);
                    body.code = Some(d.code);
                }
                _ => {
                    let src = req.initial_state.as_deref().ok_or_else(|| {
                        ServiceError::InvalidParams(vec![field("initial_state", "give the initial state, such as |0⟩")])
                    })?;
                    let ket = parse_ket(src)
                        .map_err(|e| ServiceError::InvalidParams(vec![field("initial_state", e.to_string())]))?;
                    body.notices.extend(ket.notice());
                    let a = gates::apply_gate(id, &req.params, &ket.to_statevector()).map_err(gate_error)?;
                    body.text = a.rendered_text;
                    body.final_state = Some(state_view(&a.final_state));
                    body.code = Some(a.code);
                }
            }
            Ok((body, None))
        }
        (Intent::SolveTsp, RequestParams::Tsp(p)) => {
            let inst = tsp_instance(p)?;
            let qubits = tsp_qubits(inst.n());
            body.code = Some(tsp_solver_code(&inst, &cfg).map_err(|e| ServiceError::Internal(e.to_string()))?);
            body.qubits = Some(qubits);
            body.computable = Some(qubits <= MAX_QUBITS);
            body.text = format!(
                "Qiskit code that finds a shortest round trip through {} with a variational quantum eigensolver. \
                 The encoding uses {qubits} qubits; {}",
                p.cities.join(", "),
                if qubits <= MAX_QUBITS {
                    "the backend can also run it for you."
                } else {
                    "that is beyond the backend simulator, so run the code locally."
                }
            );
            Ok((body, Some(Instance::Tsp(inst))))
        }
        (Intent::SolveKp, RequestParams::Kp(p)) => {
            let inst = kp_instance(p)?;
            let qubits = kp_qubits(&inst);
            body.code = Some(kp_solver_code(&inst, &cfg).map_err(|e| ServiceError::Internal(e.to_string()))?);
            body.qubits = Some(qubits);
            body.computable = Some(qubits <= MAX_QUBITS);
            body.text = format!(
                "Qiskit code that picks the most valuable items within a capacity of {} using QAOA. \
                 The encoding uses {qubits} qubits; {}",
                inst.capacity,
                if qubits <= MAX_QUBITS {
                    "the backend can also run it for you."
                } else {
                    "that is beyond the backend simulator, so run the code locally."
                }
            );
            Ok((body, Some(Instance::Kp(inst))))
        }
        _ => Err(type_error(intent)),
    }
}

fn run_solve(intent: Intent, inst: &Instance, cfg: &SolveConfig) -> Result<SolveBody, ServiceError> {
    let map = |e: VariationalError| match e {
        VariationalError::DeadlineExceeded => ServiceError::Timeout,
        VariationalError::NoFeasibleSolution => ServiceError::NoFeasibleSolution,
        VariationalError::TooLarge(q) | VariationalError::InstanceTooLarge { qubits: q } => {
            ServiceError::InstanceTooLarge { qubits: q, code: None }
        }
        other => ServiceError::Internal(other.to_string()),
    };
    match inst {
        Instance::Tsp(i) => {
            let (result, tour) = solve_tsp(i, cfg).map_err(map)?;
            let mut route = tour.labels.clone();
            route.extend(tour.labels.first().cloned());
            Ok(SolveBody {
                intent,
                text: format!("Best tour found: {} with total distance {}.", route.join(" → "), tour.cost),
                tour: Some(tour),
                selection: None,
                result,
            })
        }
        Instance::Kp(i) => {
            let (result, sel) = solve_kp(i, cfg).map_err(map)?;
            Ok(SolveBody {
                intent,
                text: format!(
                    "Best selection found: {} with total value {} and total weight {}.",
                    if sel.names.is_empty() { "nothing".to_string() } else { sel.names.join(", ") },
                    sel.total_value,
                    sel.total_weight
                ),
                tour: None,
                selection: Some(sel),
                result,
            })
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AuditError {
    #[error("envelope has no confirmed parameters")]
    NoProvenance,
    #[error("recomputation failed: {0}")]
    Recompute(String),
    #[error("recomputed answer differs from the delivered one")]
    Mismatch,
}

/// Recomputes an answer or solve envelope from its provenance and compares it with what was delivered.
pub fn audit(env: &Envelope) -> Result<(), AuditError> {
    match env {
        Envelope::Confirmation(_) => Ok(()),
        Envelope::Answer(a) => {
            if a.body.intent == Intent::Unknown {
                return Ok(());
            }
            let params = a.provenance.confirmed_params.as_ref().ok_or(AuditError::NoProvenance)?;
            let (body, _) = answer_for(a.provenance.intent, params, a.provenance.solver.as_ref())
                .map_err(|e| AuditError::Recompute(e.to_string()))?;
            (body == a.body).then_some(()).ok_or(AuditError::Mismatch)
        }
        Envelope::Solve(s) => {
            let params = s.provenance.confirmed_params.as_ref().ok_or(AuditError::NoProvenance)?;
            let cfg = s.provenance.solver.clone().ok_or(AuditError::NoProvenance)?;
            let (_, inst) = answer_for(s.provenance.intent, params, Some(&cfg))
                .map_err(|e| AuditError::Recompute(e.to_string()))?;
            let inst = inst.ok_or(AuditError::NoProvenance)?;
            let body = run_solve(s.provenance.intent, &inst, &cfg).map_err(|e| AuditError::Recompute(e.to_string()))?;
            (body == s.body).then_some(()).ok_or(AuditError::Mismatch)
        }
    }
}
