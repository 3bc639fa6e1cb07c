//! Rule-based parameter extraction for the nine question forms, full-utterance
//! assembly of TSP and knapsack parameters, and exact-match evaluation.

mod angle;
mod gate;
mod kp;
mod state;
pub(crate) mod text;
mod tsp;

pub use angle::parse_angle;
pub use gate::axis_mentions;
pub use state::{find_states, StateMention};

use crate::gates::Axis;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ExtractionQuestion {
    PhaseShift,
    RotationAngle,
    RotationAxis,
    TspCities,
    TspDistance { city1: String, city2: String },
    KpItems,
    KpMaxWeight,
    KpItemWeight { item: String },
    KpItemValue { item: String },
}

/// Parameter-free identity of a question, used to group evaluation results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionForm {
    PhaseShift,
    RotationAngle,
    RotationAxis,
    TspCities,
    TspDistance,
    KpItems,
    KpMaxWeight,
    KpItemWeight,
    KpItemValue,
}

impl QuestionForm {
    pub const ALL: [QuestionForm; 9] = [
        QuestionForm::PhaseShift,
        QuestionForm::RotationAngle,
        QuestionForm::RotationAxis,
        QuestionForm::TspCities,
        QuestionForm::TspDistance,
        QuestionForm::KpItems,
        QuestionForm::KpMaxWeight,
        QuestionForm::KpItemWeight,
        QuestionForm::KpItemValue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionForm::PhaseShift => "phase_shift",
            QuestionForm::RotationAngle => "rotation_angle",
            QuestionForm::RotationAxis => "rotation_axis",
            QuestionForm::TspCities => "tsp_cities",
            QuestionForm::TspDistance => "tsp_distance",
            QuestionForm::KpItems => "kp_items",
            QuestionForm::KpMaxWeight => "kp_max_weight",
            QuestionForm::KpItemWeight => "kp_item_weight",
            QuestionForm::KpItemValue => "kp_item_value",
        }
    }
}

impl ExtractionQuestion {
    pub fn form(&self) -> QuestionForm {
        match self {
            ExtractionQuestion::PhaseShift => QuestionForm::PhaseShift,
            ExtractionQuestion::RotationAngle => QuestionForm::RotationAngle,
            ExtractionQuestion::RotationAxis => QuestionForm::RotationAxis,
            ExtractionQuestion::TspCities => QuestionForm::TspCities,
            ExtractionQuestion::TspDistance { .. } => QuestionForm::TspDistance,
            ExtractionQuestion::KpItems => QuestionForm::KpItems,
            ExtractionQuestion::KpMaxWeight => QuestionForm::KpMaxWeight,
            ExtractionQuestion::KpItemWeight { .. } => QuestionForm::KpItemWeight,
            ExtractionQuestion::KpItemValue { .. } => QuestionForm::KpItemValue,
        }
    }

    /// The question as a user-facing sentence.
    pub fn text(&self) -> String {
        match self {
            ExtractionQuestion::PhaseShift => "What is the phase shift?".into(),
            ExtractionQuestion::RotationAngle => "What is the angle of the rotation?".into(),
            ExtractionQuestion::RotationAxis => "What is the axis of the rotation?".into(),
            ExtractionQuestion::TspCities => "Which cities does the person want to visit?".into(),
            ExtractionQuestion::TspDistance { city1, city2 } => {
                format!("What is the distance between {city1} and {city2}?")
            }
            ExtractionQuestion::KpItems => "Which items can be selected?".into(),
            ExtractionQuestion::KpMaxWeight => "What is the maximal weight?".into(),
            ExtractionQuestion::KpItemWeight { item } => format!("What is the weight of {item}?"),
            ExtractionQuestion::KpItemValue { item } => format!("What is the value of {item}?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnswerValue {
    Angle { radians: f64 },
    Axis(Axis),
    Number { value: f64 },
    List { items: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    /// Verbatim substring of the context.
    pub span: String,
    /// Byte offset of `span` in the context.
    pub start: usize,
    pub value: AnswerValue,
}

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExtractionError {
    #[error("parameter not found")]
    NotFound,
    #[error("several candidates: {}", .0.join(", "))]
    Ambiguous(Vec<String>),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus record lacks slot `{0}`")]
    MissingSlot(String),
}

/// Switches for individual rules, so each one's contribution can be measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    /// Ignore numbers inside initial-state expressions when looking for angles.
    pub exclude_state_spans: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self {
            exclude_state_spans: true,
        }
    }
}

/// Answers one question about one context; a learned QA model can implement this too.
pub trait Extractor {
    fn answer(&self, question: &ExtractionQuestion, context: &str) -> Result<Answer, ExtractionError>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleExtractor {
    pub rules: RuleSet,
}

impl Extractor for RuleExtractor {
    fn answer(&self, question: &ExtractionQuestion, context: &str) -> Result<Answer, ExtractionError> {
        extract_with(question, context, &self.rules)
    }
}

pub fn extract(question: &ExtractionQuestion, context: &str) -> Result<Answer, ExtractionError> {
    extract_with(question, context, &RuleSet::default())
}

fn number_answer(src: &str, start: usize, end: usize, value: f64) -> Answer {
    Answer {
        span: src[start..end].to_string(),
        start,
        value: AnswerValue::Number { value },
    }
}

fn single<T: Clone>(
    found: Vec<T>,
    value: impl Fn(&T) -> f64,
    label: impl Fn(&T) -> String,
) -> Result<T, ExtractionError> {
    let mut distinct: Vec<T> = Vec::new();
    for f in &found {
        if !distinct.iter().any(|d| value(d) == value(f)) {
            distinct.push(f.clone());
        }
    }
    match distinct.len() {
        0 => Err(ExtractionError::NotFound),
        1 => Ok(distinct.remove(0)),
        _ => Err(ExtractionError::Ambiguous(distinct.iter().map(label).collect())),
    }
}

pub fn extract_with(
    question: &ExtractionQuestion,
    src: &str,
    rules: &RuleSet,
) -> Result<Answer, ExtractionError> {
    let toks = text::tokenize(src);
    match question {
        ExtractionQuestion::PhaseShift => gate::phase_shift(src, rules),
        ExtractionQuestion::RotationAngle => gate::rotation_angle(src, rules),
        ExtractionQuestion::RotationAxis => gate::rotation_axis(src),
        ExtractionQuestion::TspCities => {
            let list = tsp::city_list(src, &toks).ok_or(ExtractionError::NotFound)?;
            Ok(Answer {
                span: src[list.start..list.end].to_string(),
                start: list.start,
                value: AnswerValue::List { items: list.names },
            })
        }
        ExtractionQuestion::TspDistance { city1, city2 } => {
            let list = tsp::city_list(src, &toks).ok_or(ExtractionError::NotFound)?;
            let mentions = tsp::distance_mentions(src, &toks, &list);
            let hits: Vec<tsp::DistanceMention> =
                tsp::distance_between(&mentions, city1, city2).into_iter().cloned().collect();
            let m = single(hits, |m| m.value, |m| src[m.start..m.end].to_string())?;
            Ok(number_answer(src, m.start, m.end, m.value))
        }
        ExtractionQuestion::KpItems => {
            let list = kp::item_list(src, &toks).ok_or(ExtractionError::NotFound)?;
            Ok(Answer {
                span: src[list.start..list.end].to_string(),
                start: list.start,
                value: AnswerValue::List { items: list.names },
            })
        }
        ExtractionQuestion::KpMaxWeight => {
            let m = single(
                kp::capacity_mentions(src, &toks),
                |m| m.value,
                |m| src[m.start..m.end].to_string(),
            )?;
            Ok(number_answer(src, m.start, m.end, m.value))
        }
        ExtractionQuestion::KpItemWeight { item } | ExtractionQuestion::KpItemValue { item } => {
            let want = if matches!(question, ExtractionQuestion::KpItemWeight { .. }) {
                kp::Attr::Weight
            } else {
                kp::Attr::Value
            };
            let list = kp::item_list(src, &toks).ok_or(ExtractionError::NotFound)?;
            let idx = kp::find_item(&list, item).ok_or(ExtractionError::NotFound)?;
            let hits: Vec<kp::NumberMention> = kp::attribute_mentions(src, &toks, &list)
                .into_iter()
                .filter(|m| m.item == idx && m.attr == want)
                .map(|m| m.number)
                .collect();
            let m = single(hits, |m| m.value, |m| src[m.start..m.end].to_string())?;
            Ok(number_answer(src, m.start, m.end, m.value))
        }
    }
}

/// TSP parameters as a matrix aligned with `cities`; `None` marks an unknown distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspParams {
    pub cities: Vec<String>,
    /// `distances[i][j]` is the cost from `cities[i]` to `cities[j]`.
    pub distances: Vec<Vec<Option<f64>>>,
}

impl TspParams {
    /// Unordered pairs with no distance in either direction.
    pub fn missing_pairs(&self) -> Vec<(String, String)> {
        let n = self.cities.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let known = |a: usize, b: usize| self.distances.get(a).and_then(|r| r.get(b)).copied().flatten();
                if known(i, j).is_none() && known(j, i).is_none() {
                    out.push((self.cities[i].clone(), self.cities[j].clone()));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspDraft {
    pub params: TspParams,
    /// Ordered pairs filled by mirroring the opposite direction.
    pub assumed: Vec<(String, String)>,
    pub missing: Vec<(String, String)>,
}

pub fn extract_tsp(src: &str) -> Result<TspDraft, ExtractionError> {
    let toks = text::tokenize(src);
    let list = tsp::city_list(src, &toks).ok_or(ExtractionError::NotFound)?;
    let mut cities: Vec<String> = Vec::new();
    for c in &list.names {
        if !cities.iter().any(|k| k.eq_ignore_ascii_case(c)) {
            cities.push(c.clone());
        }
    }
    let n = cities.len();
    let idx = |name: &str| cities.iter().position(|c| c.eq_ignore_ascii_case(name));
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0.0);
    }
    for m in tsp::distance_mentions(src, &toks, &list) {
        if let (Some(a), Some(b)) = (idx(&m.from), idx(&m.to)) {
            if a != b && d[a][b].is_none() {
                d[a][b] = Some(m.value);
            }
        }
    }
    let mut assumed = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if d[i][j].is_none() {
                if let Some(v) = d[j][i] {
                    d[i][j] = Some(v);
                    assumed.push((cities[i].clone(), cities[j].clone()));
                }
            }
        }
    }
    let params = TspParams {
        cities,
        distances: d,
    };
    let missing = params.missing_pairs();
    Ok(TspDraft {
        params,
        assumed,
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpParams {
    pub items: Vec<String>,
    pub weights: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    pub capacity: Option<f64>,
}

impl KpParams {
    /// Field names still lacking a value, such as `"weights.book"`.
    pub fn missing_fields(&self) -> Vec<String> {
        let mut out = Vec::new();
        for item in &self.items {
            if !self.weights.contains_key(item) {
                out.push(format!("weights.{item}"));
            }
            if !self.values.contains_key(item) {
                out.push(format!("values.{item}"));
            }
        }
        if self.capacity.is_none() {
            out.push("capacity".to_string());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpDraft {
    pub params: KpParams,
    pub missing: Vec<String>,
    /// Fields with several candidate numbers, left for the user to choose.
    pub ambiguous: Vec<String>,
}

pub fn extract_kp(src: &str) -> Result<KpDraft, ExtractionError> {
    let toks = text::tokenize(src);
    let list = kp::item_list(src, &toks).ok_or(ExtractionError::NotFound)?;
    let mut items: Vec<String> = Vec::new();
    for name in &list.names {
        if !items.contains(name) {
            items.push(name.clone());
        }
    }
    let mentions = kp::attribute_mentions(src, &toks, &list);
    let mut weights = BTreeMap::new();
    let mut values = BTreeMap::new();
    let mut ambiguous = Vec::new();
    for (idx, name) in list.names.iter().enumerate() {
        for (attr, map, label) in [
            (kp::Attr::Weight, &mut weights, "weights"),
            (kp::Attr::Value, &mut values, "values"),
        ] {
            let found: Vec<f64> = mentions
                .iter()
                .filter(|m| m.item == idx && m.attr == attr)
                .map(|m| m.number.value)
                .collect();
            match single(found, |v| *v, |v| v.to_string()) {
                Ok(v) => {
                    map.insert(name.clone(), v);
                }
                Err(ExtractionError::Ambiguous(_)) => ambiguous.push(format!("{label}.{name}")),
                Err(_) => {}
            }
        }
    }
    let capacity = match single(kp::capacity_mentions(src, &toks), |m| m.value, |m| m.value.to_string()) {
        Ok(m) => Some(m.value),
        Err(ExtractionError::Ambiguous(_)) => {
            ambiguous.push("capacity".to_string());
            None
        }
        Err(_) => None,
    };
    let params = KpParams {
        items,
        weights,
        values,
        capacity,
    };
    let missing = params.missing_fields();
    Ok(KpDraft {
        params,
        missing,
        ambiguous,
    })
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '…' | '“' | '”' | '‘' | '’' | '«' | '»' | '–' | '—' | '‐' | '·' | '¡' | '¿' | '⟩' | '⟨' | '〉'
        )
}

fn norm_for_match(s: &str) -> String {
    let stripped: String = s.chars().filter(|c| !is_punctuation(*c)).collect();
    stripped
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Equality ignoring punctuation, whitespace runs and case.
pub fn exact_match(predicted: &str, expected: &str) -> bool {
    norm_for_match(predicted) == norm_for_match(expected)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub context: String,
    pub question_form: QuestionForm,
    /// `city1`/`city2` for distances, `item` for weights and values.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub slots: BTreeMap<String, String>,
    pub expected_span: String,
}

impl CorpusRecord {
    pub fn new(context: &str, question: &ExtractionQuestion, expected_span: &str) -> Self {
        let mut slots = BTreeMap::new();
        match question {
            ExtractionQuestion::TspDistance { city1, city2 } => {
                slots.insert("city1".to_string(), city1.clone());
                slots.insert("city2".to_string(), city2.clone());
            }
            ExtractionQuestion::KpItemWeight { item } | ExtractionQuestion::KpItemValue { item } => {
                slots.insert("item".to_string(), item.clone());
            }
            _ => {}
        }
        Self {
            context: context.to_string(),
            question_form: question.form(),
            slots,
            expected_span: expected_span.to_string(),
        }
    }

    pub fn question(&self) -> Result<ExtractionQuestion, ExtractionError> {
        let slot = |k: &str| {
            self.slots
                .get(k)
                .cloned()
                .ok_or_else(|| ExtractionError::MissingSlot(k.to_string()))
        };
        Ok(match self.question_form {
            QuestionForm::PhaseShift => ExtractionQuestion::PhaseShift,
            QuestionForm::RotationAngle => ExtractionQuestion::RotationAngle,
            QuestionForm::RotationAxis => ExtractionQuestion::RotationAxis,
            QuestionForm::TspCities => ExtractionQuestion::TspCities,
            QuestionForm::TspDistance => ExtractionQuestion::TspDistance {
                city1: slot("city1")?,
                city2: slot("city2")?,
            },
            QuestionForm::KpItems => ExtractionQuestion::KpItems,
            QuestionForm::KpMaxWeight => ExtractionQuestion::KpMaxWeight,
            QuestionForm::KpItemWeight => ExtractionQuestion::KpItemWeight { item: slot("item")? },
            QuestionForm::KpItemValue => ExtractionQuestion::KpItemValue { item: slot("item")? },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormReport {
    pub form: QuestionForm,
    pub question: String,
    pub asked: usize,
    pub failed: usize,
    pub failure_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Sorted by failure rate, highest first.
    pub forms: Vec<FormReport>,
    /// Answers whose span is not a substring of the context; always zero for the rule extractor.
    pub fabricated_spans: usize,
}

impl EvaluationReport {
    pub fn table(&self) -> String {
        let width = self.forms.iter().map(|f| f.question.len()).max().unwrap_or(8).max(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>8}", "question", "asked", "failed", "rate");
        for f in &self.forms {
            let _ = writeln!(
                out,
                "{:<width$}  {:>6}  {:>6}  {:>8.4}",
                f.question, f.asked, f.failed, f.failure_rate
            );
        }
        out
    }
}

fn generic_question(form: QuestionForm) -> &'static str {
    match form {
        QuestionForm::PhaseShift => "What is the phase shift?",
        QuestionForm::RotationAngle => "What is the angle of the rotation?",
        QuestionForm::RotationAxis => "What is the axis of the rotation?",
        QuestionForm::TspCities => "Which cities does the person want to visit?",
        QuestionForm::TspDistance => "What is the distance between city1 and city2?",
        QuestionForm::KpItems => "Which items can be selected?",
        QuestionForm::KpMaxWeight => "What is the maximal weight?",
        QuestionForm::KpItemWeight => "What is the weight of item?",
        QuestionForm::KpItemValue => "What is the value of item?",
    }
}

pub fn evaluate_corpus(
    extractor: &dyn Extractor,
    corpus: &[CorpusRecord],
) -> Result<EvaluationReport, ExtractionError> {
    if corpus.is_empty() {
        return Err(ExtractionError::EmptyCorpus);
    }
    let mut tally: BTreeMap<QuestionForm, (usize, usize)> = BTreeMap::new();
    let mut fabricated = 0;
    for r in corpus {
        let question = r.question()?;
        let entry = tally.entry(r.question_form).or_default();
        entry.0 += 1;
        let ok = match extractor.answer(&question, &r.context) {
            Ok(a) => {
                if !r.context.contains(&a.span) {
                    fabricated += 1;
                }
                exact_match(&a.span, &r.expected_span)
            }
            Err(_) => false,
        };
        if !ok {
            entry.1 += 1;
        }
    }
    let mut forms: Vec<FormReport> = tally
        .into_iter()
        .map(|(form, (asked, failed))| FormReport {
            form,
            question: generic_question(form).to_string(),
            asked,
            failed,
            failure_rate: failed as f64 / asked as f64,
        })
        .collect();
    forms.sort_by(|a, b| b.failure_rate.total_cmp(&a.failure_rate).then(a.form.cmp(&b.form)));
    Ok(EvaluationReport {
        forms,
        fabricated_spans: fabricated,
    })
}

pub fn parse_corpus(jsonl: &str) -> Result<Vec<CorpusRecord>, serde_json::Error> {
    jsonl
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn spec_examples() {
        let a = extract(
            &ExtractionQuestion::PhaseShift,
            "apply a phase gate with phase pi/2 to |0⟩",
        )
        .unwrap();
        assert_eq!(a.value, AnswerValue::Angle { radians: FRAC_PI_2 });
        let a = extract(
            &ExtractionQuestion::KpMaxWeight,
            "My knapsack holds at most 10 kg. I can choose from a lamp and a tent.",
        )
        .unwrap();
        assert_eq!(a.value, AnswerValue::Number { value: 10.0 });
        let ctx = "Visit Aarau, Bern and Chur. Aarau to Bern is 7 km, Bern to Chur is 9 km and Aarau to Chur is 12 km.";
        let q = ExtractionQuestion::TspDistance {
            city1: "Aarau".into(),
            city2: "Bern".into(),
        };
        assert_eq!(extract(&q, ctx).unwrap().span, "7");
    }

    #[test]
    fn exact_match_rules() {
        assert!(exact_match("pi/2", "pi/2."));
        assert!(exact_match("Bern, Basel", "Bern Basel"));
        assert!(!exact_match("10", "12"));
        assert!(exact_match("  New   York ", "new york"));
        assert!(exact_match("“x”", "X"));
    }

    #[test]
    fn tsp_assembly_marks_missing_and_assumed() {
        let d = extract_tsp("Visit Aarau, Bern and Chur. Aarau to Bern is 7 km and Bern to Chur is 9 km.").unwrap();
        assert_eq!(d.params.cities, vec!["Aarau", "Bern", "Chur"]);
        assert_eq!(d.params.distances[1][0], Some(7.0));
        assert!(d.assumed.contains(&("Bern".into(), "Aarau".into())));
        assert_eq!(d.missing, vec![("Aarau".to_string(), "Chur".to_string())]);
    }

    #[test]
    fn kp_assembly() {
        let d = extract_kp(
            "I have three items: a pen, a cup and a hat. The pen weighs 1 kg and is worth 4. \
             The cup weighs 2 kg and is worth 5. The hat weighs 3 kg. The bag holds at most 4 kg.",
        )
        .unwrap();
        assert_eq!(d.params.weights["cup"], 2.0);
        assert_eq!(d.params.capacity, Some(4.0));
        assert_eq!(d.missing, vec!["values.hat".to_string()]);
    }

    struct Fixed(&'static str);

    impl Extractor for Fixed {
        fn answer(&self, _: &ExtractionQuestion, _: &str) -> Result<Answer, ExtractionError> {
            Ok(Answer {
                span: self.0.into(),
                start: 0,
                value: AnswerValue::Number { value: 0.0 },
            })
        }
    }

    #[test]
    fn evaluation_extremes() {
        let corpus = vec![
            CorpusRecord::new("a 5 kg bag, items: a pen", &ExtractionQuestion::KpMaxWeight, "5"),
            CorpusRecord::new("rotate about x by 5", &ExtractionQuestion::RotationAxis, "x"),
        ];
        let empty = evaluate_corpus(&Fixed(""), &corpus).unwrap();
        assert!(empty.forms.iter().all(|f| f.failure_rate == 1.0));
        let perfect = evaluate_corpus(&RuleExtractor::default(), &corpus).unwrap();
        assert!(perfect.forms.iter().all(|f| f.failure_rate == 0.0));
        assert_eq!(perfect.fabricated_spans, 0);
        assert!(perfect.table().contains("What is the maximal weight?"));
        assert_eq!(
            evaluate_corpus(&Fixed(""), &[]).unwrap_err(),
            ExtractionError::EmptyCorpus
        );
    }

    #[test]
    fn corpus_record_format() {
        let q = ExtractionQuestion::KpItemValue { item: "pen".into() };
        let r = CorpusRecord::new("ctx", &q, "4");
        let line = serde_json::to_string(&r).unwrap();
        assert_eq!(
            line,
            r#"{"context":"ctx","question_form":"kp_item_value","slots":{"item":"pen"},"expected_span":"4"}"#
        );
        let back = parse_corpus(&line).unwrap();
        assert_eq!(back[0].question().unwrap(), q);
        let bad: CorpusRecord =
            serde_json::from_str(r#"{"context":"c","question_form":"tsp_distance","expected_span":"1"}"#).unwrap();
        assert_eq!(bad.question(), Err(ExtractionError::MissingSlot("city1".into())));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exact_match_reflexive_and_symmetric(a in ".{0,20}", b in ".{0,20}") {
                prop_assert!(exact_match(&a, &a));
                prop_assert_eq!(exact_match(&a, &b), exact_match(&b, &a));
            }
        }
    }
}
