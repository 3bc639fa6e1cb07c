use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use qassist::extraction::{KpParams, TspParams};
use qassist::gates::GateId;
use qassist::intent::{parse_intent_corpus, Intent};
use qassist::service::http::router;
use qassist::service::*;
use serde_json::{json, Value};
use std::sync::Arc;
use std::time::Duration;
use tower::ServiceExt;

const TSP3: &str = "Plan a round trip through Aarau, Bern and Chur. The distance from Aarau to Bern is 3 km. \
                    The distance from Aarau to Chur is 4 km. Bern to Chur is 5 km.";
const KP3: &str = "I can pack a tent, a stove and a lamp. The tent weighs 3 kg and is worth 4. \
                   The stove weighs 4 kg and is worth 5. The lamp weighs 5 kg and is worth 6. \
                   My knapsack holds at most 7 kg. Which items should I take to maximize the value?";

fn engine(dir: &std::path::Path) -> Engine {
    Engine::new(EngineConfig::new(dir)).unwrap()
}

fn confirmation(env: Envelope) -> ConfirmationEnvelope {
    match env {
        Envelope::Confirmation(c) => c,
        other => panic!("expected confirmation, got {other:?}"),
    }
}

fn answer(env: Envelope) -> AnswerEnvelope {
    match env {
        Envelope::Answer(a) => a,
        other => panic!("expected answer, got {other:?}"),
    }
}

fn solve(env: Envelope) -> SolveEnvelope {
    match env {
        Envelope::Solve(s) => s,
        other => panic!("expected solve, got {other:?}"),
    }
}

#[test]
fn gate_requests_answer_after_confirmation() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, "Define the Hadamard gate").unwrap());
    assert_eq!((c.intent, c.gate), (Intent::DefineGate, Some(GateId::H)));
    assert!(c.missing.is_empty());
    assert_eq!(e.pending_status(&c.session_id), Some(PendingStatus::AwaitingConfirmation));
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    assert!(a.body.matrix.is_some());
    assert!(a.compute_token.is_none());
    assert_eq!(e.pending_status(&c.session_id), Some(PendingStatus::Confirmed));
    audit(&Envelope::Answer(a)).unwrap();

    let c = confirmation(e.chat(Some(&c.session_id), "What happens when the H gate acts on |0>?").unwrap());
    let RequestParams::Gate(g) = &c.params else { panic!() };
    assert_eq!(g.initial_state.as_deref(), Some("|0>"));
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    let amps = &a.body.final_state.as_ref().unwrap().amplitudes;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((amps[0][0] - h).abs() < 1e-12 && (amps[1][0] - h).abs() < 1e-12);
    assert!(a.body.code.is_some());

    let c = confirmation(e.chat(Some(&c.session_id), "Draw the CNOT gate").unwrap());
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    assert!(a.body.diagram.is_some() && a.body.code.is_some());
}

#[test]
fn missing_angle_is_reported_then_edited() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, "Define the Rx gate").unwrap());
    assert_eq!(c.missing, vec!["params.angle"]);
    let err = e.confirm(&c.session_id, None).unwrap_err();
    assert_eq!(err.status(), 422);
    let ServiceError::InvalidParams(f) = &err else { panic!() };
    assert_eq!(f[0].field, "params.angle");
    let RequestParams::Gate(mut g) = c.params else { panic!() };
    g.params.angle = Some(std::f64::consts::PI);
    let a = answer(e.confirm(&c.session_id, Some(RequestParams::Gate(g))).unwrap());
    assert_eq!(a.body.gate, Some(GateId::Rx));
}

#[test]
fn tsp_flow_solves_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, TSP3).unwrap());
    assert_eq!(c.intent, Intent::SolveTsp);
    assert!(c.missing.is_empty(), "{:?}", c.missing);
    assert_eq!(c.assumed.len(), 3);
    assert_eq!(c.computable, Some(true));
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    assert_eq!(a.body.qubits, Some(9));
    let token = a.compute_token.clone().unwrap();
    let s = solve(e.compute(&c.session_id, &token).unwrap());
    assert_eq!(s.body.tour.as_ref().unwrap().cost, 12.0);
    assert_eq!(e.pending_status(&c.session_id), Some(PendingStatus::Done));
    assert_eq!(e.compute(&c.session_id, &token).unwrap_err().status(), 409);
    audit(&Envelope::Solve(s)).unwrap();
}

#[test]
fn kp_flow_solves_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, KP3).unwrap());
    assert_eq!(c.intent, Intent::SolveKp);
    assert!(c.missing.is_empty(), "{:?}", c.missing);
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    let s = solve(e.compute(&c.session_id, &a.compute_token.unwrap()).unwrap());
    assert_eq!(s.body.selection.as_ref().unwrap().total_value, 9);
}

#[test]
fn missing_distance_blocks_confirmation() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(
        e.chat(None, "Plan a round trip through Aarau, Bern and Chur. Aarau to Bern is 3 km. Bern to Chur is 5 km.")
            .unwrap(),
    );
    assert_eq!(c.missing, vec!["distances.Aarau.Chur"]);
    let ServiceError::InvalidParams(f) = e.confirm(&c.session_id, None).unwrap_err() else { panic!() };
    assert!(f.iter().any(|f| f.field == "distances.Aarau.Chur"));
    let RequestParams::Tsp(mut p) = c.params else { panic!() };
    p.distances[0][2] = Some(4.0);
    p.distances[2][0] = Some(4.0);
    answer(e.confirm(&c.session_id, Some(RequestParams::Tsp(p))).unwrap());
}

#[test]
fn fractional_knapsack_numbers_get_scaling_hint() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, KP3).unwrap());
    let RequestParams::Kp(mut p) = c.params else { panic!() };
    p.weights.insert("tent".into(), 2.5);
    let ServiceError::InvalidParams(f) = e.confirm(&c.session_id, Some(RequestParams::Kp(p))).unwrap_err() else {
        panic!()
    };
    assert_eq!(f[0].field, "weights.tent");
    assert!(f[0].message.contains("power of ten"));
}

#[test]
fn wrong_parameter_type_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, "Define the X gate").unwrap());
    let p = RequestParams::Kp(KpParams {
        items: vec!["a".into()],
        weights: [("a".into(), 1.0)].into(),
        values: [("a".into(), 1.0)].into(),
        capacity: Some(1.0),
    });
    let ServiceError::InvalidParams(f) = e.confirm(&c.session_id, Some(p)).unwrap_err() else { panic!() };
    assert_eq!(f[0].field, "type");
}

#[test]
fn oversized_instance_returns_code_instead_of_running() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, TSP3).unwrap());
    assert_eq!(c.computable, Some(true));
    let names: Vec<String> = ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect();
    let d = (0..5).map(|i| (0..5).map(|j| Some(((i as f64) - (j as f64)).abs())).collect()).collect();
    let p = RequestParams::Tsp(TspParams { cities: names, distances: d });
    let a = answer(e.confirm(&c.session_id, Some(p)).unwrap());
    assert_eq!((a.body.qubits, a.body.computable), (Some(25), Some(false)));
    let err = e.compute(&c.session_id, &a.compute_token.unwrap()).unwrap_err();
    assert_eq!(err.status(), 422);
    assert!(err.to_envelope().code.is_some());
    assert_eq!(e.pending_status(&c.session_id), Some(PendingStatus::Confirmed));
}

#[test]
fn computation_past_deadline_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = EngineConfig::new(dir.path());
    cfg.timeout = Duration::ZERO;
    let e = Engine::new(cfg).unwrap();
    let c = confirmation(e.chat(None, TSP3).unwrap());
    let a = answer(e.confirm(&c.session_id, None).unwrap());
    let err = e.compute(&c.session_id, &a.compute_token.unwrap()).unwrap_err();
    assert_eq!((err.status(), err.code()), (504, "timeout"));
}

#[test]
fn confirmation_replay_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, TSP3).unwrap());
    let first = e.confirm(&c.session_id, None).unwrap();
    assert_eq!(e.confirm(&c.session_id, None).unwrap(), first);
    assert_eq!(e.confirm(&c.session_id, Some(c.params.clone())).unwrap(), first);
    let RequestParams::Tsp(mut p) = c.params else { panic!() };
    p.distances[0][1] = Some(9.0);
    assert_eq!(e.confirm(&c.session_id, Some(RequestParams::Tsp(p))).unwrap_err().status(), 404);
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Chat,
    Confirm,
    Compute,
    ComputeBadToken,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum At {
    NoPending,
    Awaiting,
    Confirmed,
    Done,
}

/// Drives a fresh session into `at`, returning it and the live compute token if any.
fn reach(e: &Engine, at: At) -> (String, Option<String>) {
    let first = e.chat(None, "Hello there").unwrap();
    let sid = answer(first).session_id;
    if at == At::NoPending {
        return (sid, None);
    }
    e.chat(Some(&sid), TSP3).unwrap();
    if at == At::Awaiting {
        return (sid, None);
    }
    let token = answer(e.confirm(&sid, None).unwrap()).compute_token;
    if at == At::Confirmed {
        return (sid, token);
    }
    e.compute(&sid, token.as_deref().unwrap()).unwrap();
    (sid, token)
}

#[test]
fn exhaustive_transition_table() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let ops = [Op::Chat, Op::Confirm, Op::Compute, Op::ComputeBadToken];
    for at in [At::NoPending, At::Awaiting, At::Confirmed, At::Done] {
        for op in ops {
            let (sid, token) = reach(&e, at);
            let before = e.pending_status(&sid);
            let got = match op {
                Op::Chat => e.chat(Some(&sid), KP3).map(|_| ()),
                Op::Confirm => e.confirm(&sid, None).map(|_| ()),
                Op::Compute => e.compute(&sid, token.as_deref().unwrap_or("none")).map(|_| ()),
                Op::ComputeBadToken => e.compute(&sid, "bogus").map(|_| ()),
            };
            let status = got.as_ref().err().map(ServiceError::status);
            let after = e.pending_status(&sid);
            let (want_status, want_after) = match (at, op) {
                // a new request always starts a fresh confirmation
                (_, Op::Chat) => (None, Some(PendingStatus::AwaitingConfirmation)),
                (At::NoPending, Op::Confirm) => (Some(404), None),
                (At::Awaiting, Op::Confirm) => (None, Some(PendingStatus::Confirmed)),
                (At::Confirmed, Op::Confirm) | (At::Done, Op::Confirm) => (None, before),
                (At::Confirmed, Op::Compute) => (None, Some(PendingStatus::Done)),
                (_, Op::Compute) | (_, Op::ComputeBadToken) => (Some(409), before),
            };
            assert_eq!((status, after), (want_status, want_after), "{at:?} + {op:?}");
        }
    }
}

#[test]
fn input_limits() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    assert_eq!(e.chat(None, "   ").unwrap_err().status(), 400);
    assert_eq!(e.chat(None, &"a".repeat(MAX_TEXT_BYTES + 1)).unwrap_err().status(), 413);
    assert!(e.chat(None, &"a".repeat(MAX_TEXT_BYTES)).is_ok());
    assert_eq!(e.confirm("nope", None).unwrap_err().status(), 404);
    assert_eq!(e.compute("nope", "x").unwrap_err().status(), 404);
}

#[test]
fn unknown_requests_list_capabilities() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let a = answer(e.chat(None, "What's the weather like tomorrow?").unwrap());
    assert_eq!(a.body.intent, Intent::Unknown);
    assert_eq!(a.body.text, capability_text());
    assert!(a.body.text.contains("Hadamard"));
}

#[test]
fn feedback_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let sid = confirmation(e.chat(None, "Define the X gate").unwrap()).session_id;
    for bad in [0, 6, -1] {
        assert_eq!(e.feedback(&sid, bad, None).unwrap_err().status(), 422);
    }
    for ok in 1..=5 {
        assert!(!e.feedback(&sid, ok, None).unwrap().receipt_id.is_empty());
    }
    assert!(e.feedback(&sid, 3, Some("é".repeat(MAX_COMMENT_CHARS))).is_ok());
    assert_eq!(e.feedback(&sid, 3, Some("x".repeat(MAX_COMMENT_CHARS + 1))).unwrap_err().status(), 422);
    assert_eq!(e.feedback("nope", 3, None).unwrap_err().status(), 404);
    assert_eq!(e.store().feedback().unwrap().len(), 6);
}

fn files_under(dir: &std::path::Path) -> String {
    let mut all = String::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        all.push_str(&std::fs::read_to_string(&p).unwrap());
    }
    all
}

#[test]
fn deletion_keeps_only_questions() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, TSP3).unwrap());
    let sid = c.session_id.clone();
    e.confirm(&sid, None).unwrap();
    e.chat(Some(&sid), "Draw the CNOT gate").unwrap();
    e.feedback(&sid, 5, Some("nice".into())).unwrap();
    let other = confirmation(e.chat(None, "Define the X gate").unwrap()).session_id;
    e.feedback(&other, 2, None).unwrap();

    let ack = e.delete_session(&sid).unwrap();
    assert_eq!(ack.retained_questions, 2);
    assert!(!e.has_session(&sid));
    let disk = files_under(dir.path());
    assert!(!disk.contains(&sid), "session id survived deletion");
    assert!(disk.contains(&other));
    let kept = e.store().retained().unwrap();
    assert_eq!(kept.iter().map(|q| q.intent).collect::<Vec<_>>(), vec![Intent::SolveTsp, Intent::DrawGate]);
    assert_eq!(kept[0].text, TSP3);
    for line in std::fs::read_to_string(dir.path().join(store::RETAINED_FILE)).unwrap().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["created_at", "intent", "text"]);
    }
    assert_eq!(e.store().feedback().unwrap().len(), 2);
    assert_eq!(e.delete_session(&sid).unwrap_err().status(), 404);
    assert_eq!(e.confirm(&sid, None).unwrap_err().status(), 404);
}

#[test]
fn idle_sessions_expire_through_retention() {
    let dir = tempfile::tempdir().unwrap();
    let clock = Arc::new(ManualClock::new(1_000));
    let e = Engine::with_clock(EngineConfig::new(dir.path()), clock.clone()).unwrap();
    let old = confirmation(e.chat(None, "Define the X gate").unwrap()).session_id;
    clock.advance(Duration::from_secs(30 * 60));
    let fresh = confirmation(e.chat(None, "Define the Y gate").unwrap()).session_id;
    clock.advance(Duration::from_secs(30 * 60));
    assert_eq!(e.sweep_expired(), 1);
    assert!(!e.has_session(&old) && e.has_session(&fresh));
    assert_eq!(e.store().retained().unwrap()[0].text, "Define the X gate");
    clock.advance(Duration::from_secs(60 * 60));
    // any request sweeps first
    assert_eq!(e.confirm(&fresh, None).unwrap_err().status(), 404);
}

#[test]
fn every_corpus_answer_survives_audit() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let corpus = include_str!("fixtures/intent_corpus.jsonl");
    let mut audited = 0;
    for rec in parse_intent_corpus(corpus).unwrap() {
        let env = e.chat(None, &rec.text).unwrap();
        let Envelope::Confirmation(c) = env else {
            audit(&env).unwrap();
            continue;
        };
        if let Ok(a) = e.confirm(&c.session_id, None) {
            audit(&a).unwrap_or_else(|err| panic!("{}: {err}", rec.text));
            audited += 1;
        }
    }
    assert!(audited >= 250, "only {audited} answers audited");
}

#[test]
fn audit_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let e = engine(dir.path());
    let c = confirmation(e.chat(None, "Define the Z gate").unwrap());
    let mut a = answer(e.confirm(&c.session_id, None).unwrap());
    a.body.text.push('!');
    assert_eq!(audit(&Envelope::Answer(a)), Err(AuditError::Mismatch));
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn http_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(engine(dir.path())));

    let (s, v) = call(&app, "GET", "/health", None).await;
    assert_eq!((s, v["status"].as_str()), (StatusCode::OK, Some("ok")));

    let (s, v) = call(&app, "POST", "/chat", Some(json!({ "text": TSP3 }))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["kind"], "confirmation");
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    let sid = v["session_id"].as_str().unwrap().to_string();

    let (s, v) = call(&app, "POST", "/compute", Some(json!({ "session_id": sid, "compute_token": "x" }))).await;
    assert_eq!((s, v["error"].as_str()), (StatusCode::CONFLICT, Some("not_confirmed")));

    let (s, v) = call(&app, "POST", "/confirm", Some(json!({ "session_id": sid }))).await;
    assert_eq!((s, v["kind"].as_str()), (StatusCode::OK, Some("answer")));
    let token = v["compute_token"].as_str().unwrap().to_string();
    assert!(v["code"]["source_text"].as_str().unwrap().contains("import"));

    let (s, v) = call(&app, "POST", "/compute", Some(json!({ "session_id": sid, "compute_token": token }))).await;
    assert_eq!((s, v["kind"].as_str()), (StatusCode::OK, Some("solve")));
    assert_eq!(v["tour"]["cost"], 12.0);

    let (s, v) = call(&app, "POST", "/feedback", Some(json!({ "session_id": sid, "stars": 9 }))).await;
    assert_eq!((s, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("stars_out_of_range")));
    let (s, v) = call(&app, "POST", "/feedback", Some(json!({ "session_id": sid, "stars": 4 }))).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["receipt_id"].is_string());

    let (s, _) = call(&app, "POST", "/chat", Some(json!({ "text": "" }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, v) = call(&app, "POST", "/chat", Some(json!({ "txt": "hi" }))).await;
    assert_eq!((s, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("bad_request")));
    let (s, _) = call(&app, "POST", "/chat", Some(json!({ "text": "a".repeat(MAX_TEXT_BYTES + 1) }))).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);

    let (s, v) = call(&app, "DELETE", &format!("/session/{sid}"), None).await;
    assert_eq!((s, v["retained_questions"].as_u64()), (StatusCode::OK, Some(1)));
    let (s, _) = call(&app, "DELETE", &format!("/session?session_id={sid}"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (_, v) = call(&app, "POST", "/chat", Some(json!({ "text": "Define the X gate" }))).await;
    let other = v["session_id"].as_str().unwrap().to_string();
    let (s, _) = call(&app, "DELETE", &format!("/session?session_id={other}"), None).await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn http_edited_confirmation_reports_fields() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(engine(dir.path())));
    let (_, v) = call(&app, "POST", "/chat", Some(json!({ "text": KP3 }))).await;
    let sid = v["session_id"].as_str().unwrap().to_string();
    let mut params = v["params"].clone();
    params["capacity"] = json!(7.5);
    let (s, v) = call(&app, "POST", "/confirm", Some(json!({ "session_id": sid, "params": params }))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["fields"][0]["field"], "capacity");
}
