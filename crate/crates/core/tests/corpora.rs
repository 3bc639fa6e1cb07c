use qassist::extraction::{evaluate_corpus, parse_corpus, Extractor, RuleExtractor, RuleSet};
use qassist::intent::{evaluate_intents, parse_intent_corpus, RuleClassifier};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn intent_corpus_is_fully_classified() {
    let corpus = parse_intent_corpus(&fixture("intent_corpus.jsonl")).unwrap();
    assert!(corpus.len() >= 250);
    let report = evaluate_intents(&RuleClassifier, &corpus);
    for r in &report.per_intent {
        if r.intent != qassist::intent::Intent::Unknown {
            assert!(r.asked >= 50, "{:?}", r.intent);
        }
    }
    for m in &report.misses {
        eprintln!("miss: {m:?}");
    }
    assert_eq!(report.accuracy, 1.0, "\n{}", report.table());
}

#[test]
fn extraction_corpus_meets_exact_match_floor() {
    let corpus = parse_corpus(&fixture("extraction_corpus.jsonl")).unwrap();
    let ex = RuleExtractor::default();
    for r in &corpus {
        let q = r.question().unwrap();
        let got = ex.answer(&q, &r.context);
        let ok = got
            .as_ref()
            .is_ok_and(|a| qassist::extraction::exact_match(&a.span, &r.expected_span));
        if !ok && std::env::var("SHOW_MISSES").is_ok() {
            eprintln!("{:?} | {} | want {:?} got {:?}", r.question_form, r.context, r.expected_span, got);
        }
    }
    let report = evaluate_corpus(&ex, &corpus).unwrap();
    println!("{}", report.table());
    assert_eq!(report.fabricated_spans, 0);
    for f in &report.forms {
        assert!(f.asked >= 292, "{:?}", f.form);
        assert!(f.failure_rate <= 0.10, "{:?} fails {:.3}\n{}", f.form, f.failure_rate, report.table());
    }
}

#[test]
fn adversarial_phase_corpus_needs_state_exclusion() {
    let corpus = parse_corpus(&fixture("adversarial_phase.jsonl")).unwrap();
    let on = evaluate_corpus(&RuleExtractor::default(), &corpus).unwrap();
    let off = RuleExtractor {
        rules: RuleSet {
            exclude_state_spans: false,
        },
    };
    let off = evaluate_corpus(&off, &corpus).unwrap();
    println!("with exclusion\n{}without\n{}", on.table(), off.table());
    assert!(off.forms[0].failure_rate > 0.0);
    assert!(on.forms[0].failure_rate < off.forms[0].failure_rate);
}
