//! Phase-shift, rotation-angle and rotation-axis rules.

use super::angle::{scan, AngleMention};
use super::state::find_states;
use super::text::{is_sentence_break, tokenize, Kind, Token};
use super::{Answer, AnswerValue, ExtractionError, RuleSet};
use crate::gates::Axis;

const QUBIT_WORDS: [&str; 5] = ["qubit", "qubits", "wire", "q", "line"];
const PHASE_CUES: [&str; 5] = ["phase", "shift", "φ", "phi", "p"];
const ANGLE_CUES: [&str; 11] = [
    "angle", "by", "θ", "theta", "rotate", "rotation", "rotated", "rx", "ry", "rz", "through",
];
const CUE_WINDOW: usize = 6;

fn candidates(src: &str, toks: &[Token], rules: &RuleSet) -> Vec<AngleMention> {
    let states = if rules.exclude_state_spans {
        find_states(src)
    } else {
        Vec::new()
    };
    scan(src, toks)
        .into_iter()
        .filter(|m| !states.iter().any(|s| m.start < s.end && s.start < m.end))
        .filter(|m| {
            if !m.bare {
                return true;
            }
            let prev = m.first.checked_sub(1).map(|k| toks[k]);
            let next = toks.get(m.last + 1);
            !prev.is_some_and(|t| t.is_any_word(src, &QUBIT_WORDS))
                && !next.is_some_and(|t| t.is_any_word(src, &QUBIT_WORDS))
        })
        .collect()
}

fn is_cue(src: &str, toks: &[Token], i: usize, cues: &[&str]) -> bool {
    let t = toks[i];
    if !t.is_any_word(src, cues) {
        return false;
    }
    // a lone `P` counts only as the call form `P(`
    if t.text(src).eq_ignore_ascii_case("p") {
        return toks.get(i + 1).is_some_and(|n| n.is_punct(src, "("));
    }
    true
}

fn pick(
    src: &str,
    toks: &[Token],
    cands: &[AngleMention],
    cues: &[&str],
) -> Result<Answer, ExtractionError> {
    if cands.is_empty() {
        return Err(ExtractionError::NotFound);
    }
    let mut anchored: Vec<&AngleMention> = Vec::new();
    for i in 0..toks.len() {
        if !is_cue(src, toks, i, cues) {
            continue;
        }
        let limit = i + 1 + CUE_WINDOW;
        let mut k = i + 1;
        while k < toks.len() && k < limit && !is_sentence_break(src, toks, k) {
            if let Some(m) = cands.iter().find(|m| m.first == k) {
                if !anchored.iter().any(|a| a.first == m.first) {
                    anchored.push(m);
                }
                break;
            }
            k += 1;
        }
    }
    let distinct = |ms: &[&AngleMention]| -> Vec<AngleMention> {
        let mut out: Vec<AngleMention> = Vec::new();
        for m in ms {
            if !out.iter().any(|o| (o.radians - m.radians).abs() < 1e-12) {
                out.push(**m);
            }
        }
        out
    };
    let all: Vec<&AngleMention> = cands.iter().collect();
    let explicit: Vec<&AngleMention> = cands.iter().filter(|m| !m.bare).collect();
    for pool in [distinct(&anchored), distinct(&explicit), distinct(&all)] {
        match pool.len() {
            0 => continue,
            1 => return Ok(answer_from(src, &pool[0])),
            _ => {
                return Err(ExtractionError::Ambiguous(
                    pool.iter().map(|m| src[m.start..m.end].to_string()).collect(),
                ))
            }
        }
    }
    Err(ExtractionError::NotFound)
}

fn answer_from(src: &str, m: &AngleMention) -> Answer {
    Answer {
        span: src[m.start..m.end].to_string(),
        start: m.start,
        value: AnswerValue::Angle { radians: m.radians },
    }
}

pub fn phase_shift(src: &str, rules: &RuleSet) -> Result<Answer, ExtractionError> {
    let toks = tokenize(src);
    pick(src, &toks, &candidates(src, &toks, rules), &PHASE_CUES)
}

pub fn rotation_angle(src: &str, rules: &RuleSet) -> Result<Answer, ExtractionError> {
    let toks = tokenize(src);
    pick(src, &toks, &candidates(src, &toks, rules), &ANGLE_CUES)
}

/// Axis mentions as `(byte start, byte end, axis)`.
pub fn axis_mentions(src: &str) -> Vec<(usize, usize, Axis)> {
    let toks = tokenize(src);
    let mut out = Vec::new();
    let word = |k: usize, ws: &[&str]| toks.get(k).is_some_and(|t| t.is_any_word(src, ws));
    for (i, t) in toks.iter().enumerate() {
        if t.kind != Kind::Word {
            continue;
        }
        let text = t.text(src);
        let lower = text.to_ascii_lowercase();
        if matches!(lower.as_str(), "rx" | "ry" | "rz") {
            let axis = Axis::from_letter(lower.chars().nth(1).unwrap()).unwrap();
            out.push((t.start + 1, t.end, axis));
            continue;
        }
        let Some(axis) = (text.chars().count() == 1)
            .then(|| text.chars().next().and_then(Axis::from_letter))
            .flatten()
        else {
            continue;
        };
        let hyphen_next = toks.get(i + 1).is_some_and(|n| n.is_punct(src, "-") && n.start == t.end);
        let after = if hyphen_next { i + 2 } else { i + 1 };
        let before = |k: usize| i.checked_sub(k);
        let prev_is = |k: usize, ws: &[&str]| before(k).is_some_and(|p| word(p, ws));
        let hit = word(after, &["axis", "rotation", "rotations"])
            || prev_is(1, &["axis"])
            || (before(1).is_some_and(|p| toks[p].is_punct(src, ":")) && prev_is(2, &["axis"]))
            || prev_is(1, &["around", "about", "along"])
            || (prev_is(1, &["the"]) && prev_is(2, &["around", "about", "along"]));
        if hit && !word(i + 1, &["gate"]) {
            out.push((t.start, t.end, axis));
        }
    }
    out
}

pub fn rotation_axis(src: &str) -> Result<Answer, ExtractionError> {
    let found = axis_mentions(src);
    let mut axes: Vec<Axis> = Vec::new();
    for m in &found {
        if !axes.contains(&m.2) {
            axes.push(m.2);
        }
    }
    match axes.len() {
        0 => Err(ExtractionError::NotFound),
        1 => {
            let (s, e, a) = found[0];
            Ok(Answer {
                span: src[s..e].to_string(),
                start: s,
                value: AnswerValue::Axis(a),
            })
        }
        _ => Err(ExtractionError::Ambiguous(
            axes.iter().map(|a| format!("{a:?}").to_lowercase()).collect(),
        )),
    }
}
