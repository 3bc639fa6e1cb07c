//! C ABI over the qassist engine.
//!
//! Every call returns a [`QassistStatus`]. Results come back as JSON strings
//! owned by the caller, to be released with [`qassist_string_free`]. When a
//! call fails, [`qassist_last_error`] holds the error envelope as JSON until
//! the next call on the same thread.

use qassist::extraction::exact_match;
use qassist::intent::classify;
use qassist::service::{Engine, EngineConfig, ErrorEnvelope, RequestParams, ServiceError, SCHEMA_VERSION};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QassistStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    EmptyInput = 4,
    TooLarge = 5,
    NotFound = 6,
    InvalidParams = 7,
    NotConfirmed = 8,
    InstanceTooLarge = 9,
    Timeout = 10,
    NoFeasibleSolution = 11,
    Storage = 12,
    Internal = 13,
    Panic = 14,
}

/// Opaque engine handle. Safe to share between threads.
pub struct QassistEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(code: &str, message: String) {
    let env = ErrorEnvelope {
        schema_version: SCHEMA_VERSION.into(),
        kind: "error".into(),
        error: code.into(),
        message,
        fields: Vec::new(),
        code: None,
    };
    store_error(&env);
}

fn store_error(env: &ErrorEnvelope) {
    let json = serde_json::to_string(env).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(json).ok());
}

struct Fail(QassistStatus);

impl From<ServiceError> for Fail {
    fn from(e: ServiceError) -> Self {
        store_error(&e.to_envelope());
        Fail(match e {
            ServiceError::EmptyInput => QassistStatus::EmptyInput,
            ServiceError::TooLarge => QassistStatus::TooLarge,
            ServiceError::UnknownSession(_) | ServiceError::NoPending => QassistStatus::NotFound,
            ServiceError::InvalidParams(_) | ServiceError::StarsOutOfRange(_) | ServiceError::CommentTooLong => {
                QassistStatus::InvalidParams
            }
            ServiceError::NotConfirmed => QassistStatus::NotConfirmed,
            ServiceError::InstanceTooLarge { .. } => QassistStatus::InstanceTooLarge,
            ServiceError::Timeout => QassistStatus::Timeout,
            ServiceError::NoFeasibleSolution => QassistStatus::NoFeasibleSolution,
            ServiceError::Storage(_) => QassistStatus::Storage,
            _ => QassistStatus::Internal,
        })
    }
}

fn fail(status: QassistStatus, code: &str, message: impl Into<String>) -> Fail {
    set_error(code, message.into());
    Fail(status)
}

/// # Safety
/// `p` must be null or point to a NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|e| fail(QassistStatus::InvalidUtf8, "invalid_utf8", e.to_string()))
}

unsafe fn req_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    opt_str(p)?.ok_or_else(|| fail(QassistStatus::NullArgument, "null_argument", format!("{name} is null")))
}

unsafe fn handle<'a>(p: *const QassistEngine) -> Result<&'a Engine, Fail> {
    p.as_ref()
        .map(|e| &e.inner)
        .ok_or_else(|| fail(QassistStatus::NullArgument, "null_argument", "engine is null"))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<CString, Fail> {
    let s = serde_json::to_string(v).map_err(|e| fail(QassistStatus::Internal, "internal", e.to_string()))?;
    CString::new(s).map_err(|e| fail(QassistStatus::Internal, "internal", e.to_string()))
}

/// Runs `f`, writing its JSON result to `*out` and turning panics into a status.
unsafe fn run(out: *mut *mut c_char, f: impl FnOnce() -> Result<CString, Fail>) -> QassistStatus {
    if out.is_null() {
        set_error("null_argument", "out is null".into());
        return QassistStatus::NullArgument;
    }
    *out = ptr::null_mut();
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            *out = s.into_raw();
            QassistStatus::Ok
        }
        Ok(Err(Fail(status))) => status,
        Err(_) => {
            set_error("panic", "the engine panicked".into());
            QassistStatus::Panic
        }
    }
}

/// Opens an engine whose logs live in `data_dir`.
///
/// # Safety
/// `data_dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qassist_engine_new(data_dir: *const c_char, out: *mut *mut QassistEngine) -> QassistStatus {
    if out.is_null() {
        set_error("null_argument", "out is null".into());
        return QassistStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let made = catch_unwind(|| -> Result<Box<QassistEngine>, Fail> {
        let dir = req_str(data_dir, "data_dir")?;
        let inner = Engine::new(EngineConfig::new(dir))?;
        Ok(Box::new(QassistEngine { inner }))
    });
    match made {
        Ok(Ok(e)) => {
            *out = Box::into_raw(e);
            QassistStatus::Ok
        }
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("panic", "the engine panicked".into());
            QassistStatus::Panic
        }
    }
}

/// # Safety
/// `engine` must come from [`qassist_engine_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qassist_engine_free(engine: *mut QassistEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Sends one user message. `session_id` may be null to start a session.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qassist_chat(
    engine: *const QassistEngine,
    session_id: *const c_char,
    text: *const c_char,
    out_json: *mut *mut c_char,
) -> QassistStatus {
    run(out_json, || {
        let e = handle(engine)?;
        let sid = opt_str(session_id)?;
        to_json(&e.chat(sid, req_str(text, "text")?)?)
    })
}

/// Confirms the pending request. `params_json` may be null to accept the extracted parameters.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qassist_confirm(
    engine: *const QassistEngine,
    session_id: *const c_char,
    params_json: *const c_char,
    out_json: *mut *mut c_char,
) -> QassistStatus {
    run(out_json, || {
        let e = handle(engine)?;
        let sid = req_str(session_id, "session_id")?;
        let params = match opt_str(params_json)? {
            Some(s) => Some(
                serde_json::from_str::<RequestParams>(s)
                    .map_err(|err| fail(QassistStatus::InvalidJson, "invalid_json", err.to_string()))?,
            ),
            None => None,
        };
        to_json(&e.confirm(sid, params)?)
    })
}

/// Runs the solver for a confirmed TSP or knapsack request. Blocks until done or timed out.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qassist_compute(
    engine: *const QassistEngine,
    session_id: *const c_char,
    compute_token: *const c_char,
    out_json: *mut *mut c_char,
) -> QassistStatus {
    run(out_json, || {
        let e = handle(engine)?;
        to_json(&e.compute(req_str(session_id, "session_id")?, req_str(compute_token, "compute_token")?)?)
    })
}

/// # Safety
/// Pointers must be valid; `comment` may be null.
#[no_mangle]
pub unsafe extern "C" fn qassist_feedback(
    engine: *const QassistEngine,
    session_id: *const c_char,
    stars: i32,
    comment: *const c_char,
    out_json: *mut *mut c_char,
) -> QassistStatus {
    run(out_json, || {
        let e = handle(engine)?;
        let sid = req_str(session_id, "session_id")?;
        let comment = opt_str(comment)?.map(str::to_string);
        to_json(&e.feedback(sid, i64::from(stars), comment)?)
    })
}

/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qassist_delete_session(
    engine: *const QassistEngine,
    session_id: *const c_char,
    out_json: *mut *mut c_char,
) -> QassistStatus {
    run(out_json, || {
        let e = handle(engine)?;
        to_json(&e.delete_session(req_str(session_id, "session_id")?)?)
    })
}

/// Classifies an utterance without touching any session.
///
/// # Safety
/// `text` must be NUL-terminated and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn qassist_classify(text: *const c_char, out_json: *mut *mut c_char) -> QassistStatus {
    run(out_json, || {
        let q = classify(req_str(text, "text")?).map_err(|e| fail(QassistStatus::EmptyInput, "empty_input", e.to_string()))?;
        to_json(&q)
    })
}

/// Span comparison used for extraction scoring: case, punctuation and spacing are ignored.
///
/// # Safety
/// Both strings must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn qassist_exact_match(
    predicted: *const c_char,
    expected: *const c_char,
    out: *mut bool,
) -> QassistStatus {
    if out.is_null() {
        set_error("null_argument", "out is null".into());
        return QassistStatus::NullArgument;
    }
    match (req_str(predicted, "predicted"), req_str(expected, "expected")) {
        (Ok(p), Ok(e)) => {
            *out = exact_match(p, e);
            QassistStatus::Ok
        }
        (Err(Fail(s)), _) | (_, Err(Fail(s))) => s,
    }
}

/// Error envelope JSON of the last failed call on this thread, or null.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qassist_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn qassist_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static version string of the engine.
#[no_mangle]
pub extern "C" fn qassist_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}
