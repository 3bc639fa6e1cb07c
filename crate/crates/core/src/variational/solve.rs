//! End-to-end TSP (VQE) and knapsack (QAOA) solves with best-of-sampled selection.

use super::{
    diagonal_energies, expectation, optimize, qaoa_state, sample_bits, top_k, vqe_energy, vqe_state,
    OptimizeConfig, QaoaParams, VariationalError, VqeAnsatz, MAX_QUBITS,
};
use crate::qubo::{
    decode_kp, decode_tsp, index_to_bits, kp_to_qubo, qubo_to_ising, slack_coefficients,
    tsp_to_qubo, KpInstance, Selection, Tour, TspInstance,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub seed: u64,
    /// QAOA layer count `p`.
    pub qaoa_layers: usize,
    /// VQE entangling layer count `L`.
    pub vqe_layers: usize,
    pub shots: usize,
    pub max_evals: usize,
    pub starts: usize,
    pub top_k: usize,
    pub penalty: Option<f64>,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            qaoa_layers: 2,
            vqe_layers: 2,
            shots: 4096,
            max_evals: 400,
            starts: 4,
            top_k: 100,
            penalty: None,
            deadline: None,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<(), VariationalError> {
        if self.qaoa_layers == 0 || self.vqe_layers == 0 {
            return Err(VariationalError::InvalidParams("layer counts must be at least 1".into()));
        }
        if self.shots == 0 || self.top_k == 0 {
            return Err(VariationalError::InvalidParams("shots and top_k must be at least 1".into()));
        }
        Ok(())
    }

    fn optimizer(&self) -> OptimizeConfig {
        OptimizeConfig {
            starts: self.starts,
            max_evals_per_start: self.max_evals,
            initial_step: PI / 2.0,
            seed: self.seed,
            deadline: self.deadline,
        }
    }

    fn sample_seed(&self) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5851_F42D
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// One character per QUBO variable, variable 0 first.
    pub best_bits: String,
    /// Tour cost, or the negated total value for knapsack.
    pub objective: f64,
    pub energy_history: Vec<f64>,
    pub evaluations: usize,
    pub seed: u64,
}

pub fn tsp_qubits(n_cities: usize) -> usize {
    n_cities * n_cities
}

pub fn kp_qubits(inst: &KpInstance) -> usize {
    inst.n() + slack_coefficients(inst.capacity.max(1)).len()
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Inspects the `top_k` most frequent samples and keeps the best feasible decode.
fn select<T>(
    state: &crate::quantum::Statevector,
    config: &SolveConfig,
    n_vars: usize,
    decode: impl Fn(&[bool]) -> Option<(T, f64)>,
) -> Result<(Vec<bool>, T, f64), VariationalError> {
    let draws = sample_bits(state, config.shots, config.sample_seed());
    let mut best: Option<(Vec<bool>, T, f64)> = None;
    for (z, _) in top_k(&draws, config.top_k) {
        let bits = index_to_bits(z, n_vars);
        if let Some((value, objective)) = decode(&bits) {
            if best.as_ref().is_none_or(|b| objective < b.2) {
                best = Some((bits, value, objective));
            }
        }
    }
    best.ok_or(VariationalError::NoFeasibleSolution)
}

pub fn solve_tsp(inst: &TspInstance, config: &SolveConfig) -> Result<(SolveResult, Tour), VariationalError> {
    config.validate()?;
    inst.validate()?;
    let n_qubits = tsp_qubits(inst.n());
    if n_qubits > MAX_QUBITS {
        return Err(VariationalError::InstanceTooLarge { qubits: n_qubits });
    }
    let tq = tsp_to_qubo(inst, config.penalty)?;
    let energies = diagonal_energies(&qubo_to_ising(&tq.qubo), n_qubits)?;
    let layers = config.vqe_layers;
    let n_params = VqeAnsatz::param_count(n_qubits, layers);
    let objective = |x: &[f64]| {
        let ansatz = VqeAnsatz {
            n_qubits,
            layers,
            thetas: x.to_vec(),
        };
        vqe_energy(&ansatz, &energies).expect("dimensions agree")
    };
    let opt = optimize(
        objective,
        &vec![0.0; n_params],
        &vec![(-PI, PI); n_params],
        &config.optimizer(),
    )?;
    let state = vqe_state(&VqeAnsatz::new(n_qubits, layers, opt.best_params)?)?;
    let (bits, tour, cost) = select(&state, config, n_qubits, |bits| {
        decode_tsp(bits, &tq.var_map, inst).map(|t| {
            let c = t.cost;
            (t, c)
        })
    })?;
    Ok((
        SolveResult {
            best_bits: bit_string(&bits),
            objective: cost,
            energy_history: opt.history,
            evaluations: opt.evaluations,
            seed: config.seed,
        },
        tour,
    ))
}

pub fn solve_kp(inst: &KpInstance, config: &SolveConfig) -> Result<(SolveResult, Selection), VariationalError> {
    config.validate()?;
    inst.validate()?;
    let n_qubits = kp_qubits(inst);
    if n_qubits > MAX_QUBITS {
        return Err(VariationalError::InstanceTooLarge { qubits: n_qubits });
    }
    let kq = kp_to_qubo(inst, config.penalty)?;
    let energies = diagonal_energies(&qubo_to_ising(&kq.qubo), n_qubits)?;
    let p = config.qaoa_layers;
    let objective = |x: &[f64]| {
        let params = QaoaParams {
            gammas: x[..p].to_vec(),
            betas: x[p..].to_vec(),
        };
        expectation(&qaoa_state(&energies, &params).expect("size checked"), &energies)
            .expect("dimensions agree")
    };
    let mut ranges = vec![(-PI, PI); p];
    ranges.extend(vec![(-PI / 2.0, PI / 2.0); p]);
    let mut initial = vec![0.1; p];
    initial.extend(vec![0.1; p]);
    let opt = optimize(objective, &initial, &ranges, &config.optimizer())?;
    let state = qaoa_state(&energies, &QaoaParams::from_flat(&opt.best_params)?)?;
    let (bits, selection, objective) = select(&state, config, n_qubits, |bits| {
        decode_kp(bits, &kq.var_map, inst).map(|s| {
            let o = -(s.total_value as f64);
            (s, o)
        })
    })?;
    Ok((
        SolveResult {
            best_bits: bit_string(&bits),
            objective,
            energy_history: opt.history,
            evaluations: opt.evaluations,
            seed: config.seed,
        },
        selection,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::oracles::{kp_dp, tsp_enumerate};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn two_cities_single_tour() {
        let inst = TspInstance::new(labels(2), vec![vec![0., 4.], vec![6., 0.]]).unwrap();
        let (r, tour) = solve_tsp(&inst, &SolveConfig::default()).unwrap();
        assert_eq!(tour.cost, 10.0);
        assert_eq!(r.objective, 10.0);
    }

    #[test]
    fn triangle_matches_enumeration() {
        let inst = TspInstance::new(
            labels(3),
            vec![vec![0., 3., 4.], vec![3., 0., 5.], vec![4., 5., 0.]],
        )
        .unwrap();
        let (r, tour) = solve_tsp(&inst, &SolveConfig::default()).unwrap();
        assert_eq!(tour.cost, tsp_enumerate(&inst));
        assert_eq!(r.best_bits.len(), 9);
        let mut running = f64::INFINITY;
        for &e in &r.energy_history {
            running = running.min(e);
        }
        assert!(running.is_finite());
    }

    #[test]
    fn knapsack_cases() {
        let cfg = SolveConfig::default();
        let one = KpInstance::new(labels(1), vec![2], vec![3], 2).unwrap();
        assert_eq!(solve_kp(&one, &cfg).unwrap().1.items, vec![0]);

        let three = KpInstance::new(labels(3), vec![3, 4, 5], vec![4, 5, 6], 7).unwrap();
        let (r, sel) = solve_kp(&three, &cfg).unwrap();
        assert_eq!(sel.total_value, kp_dp(&three));
        assert_eq!(r.objective, -9.0);

        let roomy = KpInstance::new(labels(3), vec![1, 2, 3], vec![2, 2, 2], 6).unwrap();
        assert_eq!(solve_kp(&roomy, &cfg).unwrap().1.items, vec![0, 1, 2]);
    }

    #[test]
    fn too_large_instances() {
        let n = 5;
        let mut d = vec![vec![1.0; n]; n];
        (0..n).for_each(|i| d[i][i] = 0.0);
        let inst = TspInstance::new(labels(n), d).unwrap();
        assert_eq!(
            solve_tsp(&inst, &SolveConfig::default()).unwrap_err(),
            VariationalError::InstanceTooLarge { qubits: 25 }
        );
        let kp = KpInstance::new(labels(12), vec![1; 12], vec![1; 12], 100).unwrap();
        assert!(matches!(
            solve_kp(&kp, &SolveConfig::default()),
            Err(VariationalError::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn repeatable() {
        let three = KpInstance::new(labels(3), vec![3, 4, 5], vec![4, 5, 6], 7).unwrap();
        let cfg = SolveConfig {
            seed: 11,
            ..Default::default()
        };
        let a = serde_json::to_string(&solve_kp(&three, &cfg).unwrap().0).unwrap();
        let b = serde_json::to_string(&solve_kp(&three, &cfg).unwrap().0).unwrap();
        assert_eq!(a, b);
    }
}
