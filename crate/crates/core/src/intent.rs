//! Intent classification: a deterministic cue cascade behind a swappable trait.

use crate::extraction::text::{find_words, tokenize, Kind};
use crate::extraction::{axis_mentions, find_states};
use crate::gates::{catalog, spec, GateId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    DefineGate,
    DrawGate,
    ApplyGate,
    SolveTsp,
    SolveKp,
    /// Nothing matched; answered with a capability summary.
    Unknown,
}

impl Intent {
    pub const ALL: [Intent; 6] = [
        Intent::DefineGate,
        Intent::DrawGate,
        Intent::ApplyGate,
        Intent::SolveTsp,
        Intent::SolveKp,
        Intent::Unknown,
    ];

    pub fn is_gate(self) -> bool {
        matches!(self, Intent::DefineGate | Intent::DrawGate | Intent::ApplyGate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Intent::DefineGate => "define_gate",
            Intent::DrawGate => "draw_gate",
            Intent::ApplyGate => "apply_gate",
            Intent::SolveTsp => "solve_tsp",
            Intent::SolveKp => "solve_kp",
            Intent::Unknown => "unknown",
        }
    }
}

/// Which rule family produced a piece of evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Define,
    Draw,
    Apply,
    Tsp,
    Kp,
    Gate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub family: Family,
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedQuery {
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    pub confidence: f64,
    pub matched_evidence: Vec<Evidence>,
    /// A gate-like name outside the catalog; the caller asks the user which gate they meant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unresolved_gate: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntentError {
    #[error("empty input")]
    EmptyInput,
    #[error("cannot confirm an unknown request")]
    UnknownIntent,
}

pub trait IntentClassifier {
    fn classify(&self, text: &str) -> Result<ClassifiedQuery, IntentError>;
}

const DEFINE_CUES: &[&str] = &[
    "what is", "what's", "whats", "what are", "define", "definition", "explain", "describe",
    "tell me about", "meaning of", "what does", "what do", "how does", "how do", "matrix",
    "unitary", "matrix representation", "purpose of", "used for", "mean",
];
const DRAW_CUES: &[&str] = &[
    "draw", "drawing", "show", "display", "circuit", "diagram", "sketch", "visualize",
    "visualise", "depict", "illustrate", "render", "picture", "plot", "representation",
    "look like", "looks like", "symbol",
];
const APPLY_CUES: &[&str] = &[
    "apply", "applies", "applying", "applied", "act on", "acts on", "acting on", "act upon",
    "acts upon", "initial state", "start state", "starting state", "input state", "final state",
    "resulting state", "output state", "end state", "what happens", "evolve", "evolves",
    "prepared in", "state after", "state of the qubit", "resulting in", "outcome of", "result of",
    "on the state", "to the state",
];
const TSP_CUES: &[&str] = &[
    "salesperson", "salesman", "saleswoman", "traveling salesman", "travelling salesman",
    "traveling salesperson", "travelling salesperson", "route", "routes", "tour", "shortest",
    "cities", "city", "visit", "visiting", "visits", "trip", "round trip", "distance", "distances",
    "km", "kilometers", "kilometres", "miles", "tsp", "itinerary", "towns", "travel", "travelling",
    "traveling", "drive", "loop through",
];
const KP_CUES: &[&str] = &[
    "knapsack", "backpack", "rucksack", "bag", "suitcase", "items", "item", "weight limit",
    "capacity", "weighs", "weigh", "weight", "weights", "worth", "value", "values", "pack",
    "packing", "carry", "kg", "kilograms", "total value", "kp", "holds at most", "maximum weight",
    "maximal weight",
];
const ROTATION_CUES: &[&str] = &["rotate", "rotates", "rotating", "rotation", "rotated", "turn"];
/// Aliases too common as plain words to name a gate on their own.
const BARE_EXCLUDED: &[&str] = &["not", "phase", "id", "p", "i"];
const WEAK_ALIASES: &[&str] = &["phase shift"];
/// Single letters that name a gate only when written uppercase and standalone.
const LETTER_GATES: &[char] = &['X', 'Y', 'Z', 'H', 'S'];
const GATE_WORDS: &[&str] = &["gate", "gates", "operator", "operation"];
const NOT_GATE_NAMES: &[&str] = &[
    "the", "a", "an", "this", "that", "which", "quantum", "single", "one", "two", "qubit", "of",
    "my", "same", "following", "new", "unknown", "what", "each",
];

#[derive(Debug, Clone, Copy)]
struct GateHit {
    gate: GateId,
    start: usize,
    end: usize,
    weak: bool,
}

fn cue_hits(text: &str, family: Family, cues: &[&str], out: &mut Vec<Evidence>) {
    for cue in cues {
        for at in find_words(text, cue) {
            out.push(Evidence {
                family,
                text: text[at..at + cue.len()].to_string(),
                start: at,
                end: at + cue.len(),
            });
        }
    }
}

/// Drops spans strictly inside a longer one, and exact duplicates.
fn keep_longest<T>(items: Vec<T>, span: impl Fn(&T) -> (usize, usize)) -> Vec<T> {
    let spans: Vec<(usize, usize)> = items.iter().map(&span).collect();
    let mut out = Vec::new();
    for (k, item) in items.into_iter().enumerate() {
        let (s, e) = spans[k];
        let covered = spans.iter().enumerate().any(|(o, &(os, oe))| {
            o != k && os <= s && e <= oe && ((oe - os) > (e - s) || o < k)
        });
        if !covered {
            out.push(item);
        }
    }
    out
}

fn gate_hits(text: &str) -> Vec<GateHit> {
    let axis_letters: Vec<usize> = axis_mentions(text).iter().map(|m| m.0).collect();
    let mut hits = Vec::new();
    for gs in catalog() {
        let mut names: Vec<String> = gs.aliases.clone();
        names.push(gs.display_name.to_lowercase());
        names.sort();
        names.dedup();
        for alias in &names {
            if BARE_EXCLUDED.contains(&alias.as_str()) {
                continue;
            }
            let single = alias.chars().count() == 1;
            for at in find_words(text, alias) {
                let end = at + alias.len();
                if single {
                    let c = text[at..end].chars().next().unwrap_or(' ');
                    if !LETTER_GATES.contains(&c) || axis_letters.contains(&at) {
                        continue;
                    }
                }
                hits.push(GateHit {
                    gate: gs.id,
                    start: at,
                    end,
                    weak: single || WEAK_ALIASES.contains(&alias.as_str()),
                });
            }
        }
    }
    // `P(` is the phase gate written as a call.
    for at in find_words(text, "p") {
        if text[at..].starts_with("P(") {
            hits.push(GateHit {
                gate: GateId::Phase,
                start: at,
                end: at + 1,
                weak: false,
            });
        }
    }
    let mut hits = keep_longest(hits, |h| (h.start, h.end));
    hits.sort_by_key(|h| (h.start, h.end));
    hits
}

/// The word before "gate" when no catalog name matched, such as "Toffoli".
fn unresolved_name(text: &str) -> Option<String> {
    let toks = tokenize(text);
    for (k, t) in toks.iter().enumerate() {
        if k == 0 || !t.is_any_word(text, GATE_WORDS) {
            continue;
        }
        let prev = toks[k - 1];
        if prev.kind == Kind::Word && !prev.is_any_word(text, NOT_GATE_NAMES) && !prev.is_any_word(text, DEFINE_CUES) {
            return Some(prev.text(text).to_string());
        }
    }
    None
}

fn span_len(ev: &[Evidence], family: Family) -> usize {
    ev.iter().filter(|e| e.family == family).map(|e| e.end - e.start).sum()
}

/// The default rule cascade.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleClassifier;

impl IntentClassifier for RuleClassifier {
    fn classify(&self, text: &str) -> Result<ClassifiedQuery, IntentError> {
        if text.trim().is_empty() {
            return Err(IntentError::EmptyInput);
        }
        let mut ev = Vec::new();
        cue_hits(text, Family::Define, DEFINE_CUES, &mut ev);
        cue_hits(text, Family::Draw, DRAW_CUES, &mut ev);
        cue_hits(text, Family::Apply, APPLY_CUES, &mut ev);
        cue_hits(text, Family::Tsp, TSP_CUES, &mut ev);
        cue_hits(text, Family::Kp, KP_CUES, &mut ev);
        for s in find_states(text) {
            ev.push(Evidence {
                family: Family::Apply,
                text: text[s.start..s.end].to_string(),
                start: s.start,
                end: s.end,
            });
        }
        let mut ev = keep_longest(ev, |e| (e.start, e.end));

        let hits = gate_hits(text);
        let opt_hits = ev.iter().filter(|e| matches!(e.family, Family::Tsp | Family::Kp)).count();
        let strong: Vec<&GateHit> = hits.iter().filter(|h| !h.weak).collect();
        let mut gate = strong
            .iter()
            .max_by(|a, b| (a.end - a.start).cmp(&(b.end - b.start)).then(b.start.cmp(&a.start)))
            .map(|h| (h.gate, h.start, h.end));
        let mut heuristic = strong.iter().any(|h| Some(h.gate) != gate.map(|g| g.0));
        if gate.is_none() {
            // a weak name counts unless optimization cues outnumber it
            if let Some(h) = hits.first().filter(|_| opt_hits < 2) {
                gate = Some((h.gate, h.start, h.end));
                heuristic |= opt_hits > 0;
            }
        }
        let families: Vec<Family> = {
            let mut f: Vec<Family> = ev.iter().map(|e| e.family).collect();
            f.sort();
            f.dedup();
            f
        };
        let rotation_axis = || {
            let rotation = ROTATION_CUES.iter().any(|c| !find_words(text, c).is_empty());
            let mut axes: Vec<_> = axis_mentions(text).into_iter().map(|m| (m.2, m.0, m.1)).collect();
            axes.dedup_by_key(|a| a.0);
            (rotation && axes.len() == 1).then(|| axes[0])
        };
        if gate.is_none() && opt_hits == 0 {
            if let Some((axis, s, e)) = rotation_axis() {
                gate = Some((GateId::rotation_for_axis(axis), s, e));
                heuristic = true;
            }
        }

        let verb = if families.contains(&Family::Apply) {
            Some(Intent::ApplyGate)
        } else if families.contains(&Family::Draw) {
            Some(Intent::DrawGate)
        } else if families.contains(&Family::Define) {
            Some(Intent::DefineGate)
        } else {
            None
        };
        let gate_families = families
            .iter()
            .filter(|f| matches!(f, Family::Define | Family::Draw | Family::Apply))
            .count();

        if let Some((id, s, e)) = gate {
            ev.push(Evidence {
                family: Family::Gate,
                text: text[s..e].to_string(),
                start: s,
                end: e,
            });
            ev.sort_by_key(|e| (e.start, e.end));
            let single_family = gate_families == 1 && families.len() == 1;
            return Ok(ClassifiedQuery {
                intent: verb.unwrap_or(Intent::DefineGate),
                gate: Some(id),
                confidence: if single_family && !heuristic { 1.0 } else { 0.8 },
                matched_evidence: ev,
                unresolved_gate: None,
            });
        }

        let tsp = span_len(&ev, Family::Tsp);
        let kp = span_len(&ev, Family::Kp);
        ev.sort_by_key(|e| (e.start, e.end));
        if tsp > 0 || kp > 0 {
            let intent = match tsp.cmp(&kp) {
                std::cmp::Ordering::Greater => Intent::SolveTsp,
                std::cmp::Ordering::Less => Intent::SolveKp,
                std::cmp::Ordering::Equal => return Ok(unknown(ev)),
            };
            let single = families.len() == 1;
            return Ok(ClassifiedQuery {
                intent,
                gate: None,
                confidence: if single { 1.0 } else { 0.8 },
                matched_evidence: ev,
                unresolved_gate: None,
            });
        }
        if let Some(name) = unresolved_name(text) {
            return Ok(ClassifiedQuery {
                intent: verb.unwrap_or(Intent::DefineGate),
                gate: None,
                confidence: 0.8,
                matched_evidence: ev,
                unresolved_gate: Some(name),
            });
        }
        Ok(unknown(ev))
    }
}

fn unknown(ev: Vec<Evidence>) -> ClassifiedQuery {
    ClassifiedQuery {
        intent: Intent::Unknown,
        gate: None,
        confidence: 0.0,
        matched_evidence: ev,
        unresolved_gate: None,
    }
}

pub fn classify(text: &str) -> Result<ClassifiedQuery, IntentError> {
    RuleClassifier.classify(text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfirmationPrompt {
    pub text: String,
    pub intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateId>,
    pub options: Vec<String>,
}

pub fn confirm_interpretation(q: &ClassifiedQuery) -> Result<ConfirmationPrompt, IntentError> {
    let gate_name = q.gate.map(|g| spec(g).display_name.clone());
    let task = match (q.intent, &gate_name, &q.unresolved_gate) {
        (Intent::Unknown, _, _) => return Err(IntentError::UnknownIntent),
        (_, None, Some(name)) if q.intent.is_gate() => {
            return Ok(ConfirmationPrompt {
                text: format!("I don't know a gate called \"{name}\". Which gate do you mean?"),
                intent: q.intent,
                gate: None,
                options: vec!["modify".into()],
            })
        }
        (Intent::DefineGate, Some(g), _) => format!("define the {g} gate"),
        (Intent::DrawGate, Some(g), _) => format!("draw the {g} gate"),
        (Intent::ApplyGate, Some(g), _) => format!("apply the {g} gate to an initial state"),
        (Intent::SolveTsp, _, _) => {
            "solve a traveling salesperson problem: find the shortest round trip through the cities".into()
        }
        (Intent::SolveKp, _, _) => {
            "solve a knapsack problem: pick the items of highest total value within the weight limit".into()
        }
        _ => return Err(IntentError::UnknownIntent),
    };
    Ok(ConfirmationPrompt {
        text: format!("You asked me to {task}. Is that correct?"),
        intent: q.intent,
        gate: q.gate,
        options: vec!["accept".into(), "modify".into()],
    })
}

/// One labeled utterance of the intent corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentRecord {
    pub text: String,
    pub expected_intent: Intent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_gate: Option<GateId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentRow {
    pub intent: Intent,
    pub asked: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentReport {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub per_intent: Vec<IntentRow>,
    /// Texts classified wrongly, with what was predicted.
    pub misses: Vec<(String, Intent, Option<GateId>)>,
}

impl IntentReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12}  {:>6}  {:>7}  {:>8}", "intent", "asked", "correct", "accuracy");
        for r in &self.per_intent {
            let _ = writeln!(
                out,
                "{:<12}  {:>6}  {:>7}  {:>8.2}",
                r.intent.as_str(),
                r.asked,
                r.correct,
                r.accuracy
            );
        }
        let _ = writeln!(out, "{:<12}  {:>6}  {:>7}  {:>8.2}", "all", self.total, self.correct, self.accuracy);
        out
    }
}

/// A record counts as correct when both the intent and, if labeled, the gate match.
pub fn evaluate_intents(classifier: &dyn IntentClassifier, corpus: &[IntentRecord]) -> IntentReport {
    let mut rows: BTreeMap<Intent, (usize, usize)> = BTreeMap::new();
    let mut misses = Vec::new();
    for r in corpus {
        let row = rows.entry(r.expected_intent).or_default();
        row.0 += 1;
        let (intent, gate) = match classifier.classify(&r.text) {
            Ok(q) => (q.intent, q.gate),
            Err(_) => (Intent::Unknown, None),
        };
        let ok = intent == r.expected_intent && (r.expected_gate.is_none() || gate == r.expected_gate);
        if ok {
            row.1 += 1;
        } else {
            misses.push((r.text.clone(), intent, gate));
        }
    }
    let correct = rows.values().map(|r| r.1).sum();
    let total = corpus.len();
    IntentReport {
        total,
        correct,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        per_intent: rows
            .into_iter()
            .map(|(intent, (asked, correct))| IntentRow {
                intent,
                asked,
                correct,
                accuracy: correct as f64 / asked as f64,
            })
            .collect(),
        misses,
    }
}

pub fn parse_intent_corpus(jsonl: &str) -> Result<Vec<IntentRecord>, serde_json::Error> {
    jsonl
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(text: &str) -> (Intent, Option<GateId>) {
        let q = classify(text).unwrap();
        (q.intent, q.gate)
    }

    #[test]
    fn documented_examples() {
        assert_eq!(c("What is the Hadamard gate?"), (Intent::DefineGate, Some(GateId::H)));
        assert_eq!(c("Draw the CNOT gate"), (Intent::DrawGate, Some(GateId::Cnot)));
        assert_eq!(
            c("A salesperson wants to visit Bern, Basel and Zurich. Bern to Basel is 95 km."),
            (Intent::SolveTsp, None)
        );
        assert_eq!(
            c("My knapsack holds at most 10 kg. A lamp weighs 3 kg and is worth 4."),
            (Intent::SolveKp, None)
        );
    }

    #[test]
    fn confidence_levels() {
        assert_eq!(classify("Draw the CNOT gate").unwrap().confidence, 1.0);
        let q = classify("What is the final state if I apply H to |0⟩?").unwrap();
        assert_eq!((q.intent, q.gate), (Intent::ApplyGate, Some(GateId::H)));
        assert_eq!(q.confidence, 0.8);
        let q = classify("hello there").unwrap();
        assert_eq!((q.intent, q.confidence), (Intent::Unknown, 0.0));
        assert_eq!(classify("   "), Err(IntentError::EmptyInput));
    }

    #[test]
    fn gate_name_rules() {
        assert_eq!(c("Show the S† gate").1, Some(GateId::Sdg));
        assert_eq!(c("Draw the controlled phase flip").1, Some(GateId::Cz));
        assert_eq!(c("Apply P(π/4) to |1⟩"), (Intent::ApplyGate, Some(GateId::Phase)));
        assert_eq!(c("Rotate |0⟩ around the y axis by pi/2"), (Intent::ApplyGate, Some(GateId::Ry)));
        assert_eq!(c("what does X do to |1>").1, Some(GateId::X));
        assert_eq!(c("what does the word x mean").1, None);
        let q = classify("Draw the Toffoli gate").unwrap();
        assert_eq!((q.intent, q.gate), (Intent::DrawGate, None));
        assert_eq!(q.unresolved_gate.as_deref(), Some("Toffoli"));
    }

    #[test]
    fn optimization_ties_are_unknown() {
        assert_eq!(c("route items"), (Intent::Unknown, None));
    }

    #[test]
    fn gate_intents_always_carry_a_gate_or_clarification() {
        for t in [
            "Draw the Toffoli gate",
            "What is a gate?",
            "Apply it to |0⟩",
            "explain the circuit",
            "What is the Pauli-Z gate?",
        ] {
            let q = classify(t).unwrap();
            if q.intent.is_gate() {
                assert!(q.gate.is_some() || q.unresolved_gate.is_some(), "{t}");
            }
        }
    }

    #[test]
    fn prompts() {
        let q = classify("What is the X gate?").unwrap();
        let p = confirm_interpretation(&q).unwrap();
        assert!(p.text.contains("define") && p.text.contains("Pauli-X"));
        assert_eq!(p.options, vec!["accept", "modify"]);
        let q = classify("My knapsack holds 5 kg, items: a pen and a cup").unwrap();
        assert!(confirm_interpretation(&q).unwrap().text.contains("knapsack"));
        let q = classify("hello").unwrap();
        assert_eq!(confirm_interpretation(&q), Err(IntentError::UnknownIntent));
    }

    #[test]
    fn pure() {
        let t = "Draw the SWAP gate for qubits 0 and 1";
        assert_eq!(classify(t).unwrap(), classify(t).unwrap());
    }
}
