//! Rendered code and diagrams pinned byte-for-byte. Set `QASSIST_UPDATE_GOLDEN=1` to rewrite.

use qassist::codegen::{kp_solver_code, render, tsp_solver_code, Bindings, CodegenError, TemplateId};
use qassist::gates::{apply_gate, draw_gate, GateId, GateParams};
use qassist::ket::parse_ket;
use qassist::qubo::{KpInstance, TspInstance};
use qassist::variational::SolveConfig;
use std::path::PathBuf;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn check(rel: &str, actual: &str) {
    let path = fixtures().join("golden").join(rel);
    if std::env::var_os("QASSIST_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{rel} differs from golden file");
}

pub fn tsp_fixture(name: &str) -> TspInstance {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn kp_fixture(name: &str) -> KpInstance {
    let text = std::fs::read_to_string(fixtures().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn draw_template() {
    let b = Bindings::from([
        ("gate_call".to_string(), "h(0)".to_string()),
        ("n_qubits".to_string(), "1".to_string()),
    ]);
    let art = render(TemplateId::DrawGate, &b).unwrap();
    check("draw_gate.py", &art.source_text);
    assert_eq!(draw_gate(GateId::H, &GateParams::none()).unwrap().code, art);
}

#[test]
fn apply_template() {
    let initial = parse_ket("|0⟩").unwrap().to_statevector();
    let art = apply_gate(GateId::H, &GateParams::none(), &initial).unwrap().code;
    check("apply_gate.py", &art.source_text);
}

#[test]
fn solver_templates() {
    let cfg = SolveConfig::default();
    check("tsp_solver.py", &tsp_solver_code(&tsp_fixture("tsp_n3.json"), &cfg).unwrap().source_text);
    check("kp_solver.py", &kp_solver_code(&kp_fixture("kp_small.json"), &cfg).unwrap().source_text);
}

#[test]
fn zero_parameter_diagrams() {
    for id in GateId::ALL {
        if !id.parameter_slots().is_empty() {
            continue;
        }
        let d = draw_gate(id, &GateParams::none()).unwrap().diagram.to_text();
        check(&format!("diagrams/{}.txt", id.slug()), &d);
    }
}

#[test]
fn every_omitted_binding_is_reported() {
    for id in TemplateId::ALL {
        let full: Bindings = id.required_bindings().iter().map(|k| (k.to_string(), "0".to_string())).collect();
        assert!(render(id, &full).is_ok());
        for k in id.required_bindings() {
            let mut b = full.clone();
            b.remove(*k);
            assert_eq!(render(id, &b), Err(CodegenError::MissingBinding(vec![k.to_string()])));
        }
    }
}
