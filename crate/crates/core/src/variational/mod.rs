//! Exact-statevector VQE and QAOA over diagonal Ising cost Hamiltonians.

mod optimize;
mod solve;

pub use optimize::{halton_starts, optimize, OptimizeConfig, OptimizeResult};
pub use solve::{kp_qubits, solve_kp, solve_tsp, tsp_qubits, SolveConfig, SolveResult};

use crate::quantum::{Amplitude, Statevector};
use crate::qubo::{IsingModel, QuboError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationalError {
    #[error("{0} qubits exceed the simulation limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("instance needs {qubits} qubits; in-process solves are limited to {MAX_QUBITS}")]
    InstanceTooLarge { qubits: usize },
    #[error("no feasible solution among the sampled candidates; retry with a new seed or a higher penalty")]
    NoFeasibleSolution,
    #[error("evaluation budget must be at least 1")]
    BudgetZero,
    #[error("length mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("deadline exceeded during optimization")]
    DeadlineExceeded,
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, VariationalError> {
        let p = Self { gammas, betas };
        p.validate()?;
        Ok(p)
    }

    /// Splits a flat `[γ_1..γ_p, β_1..β_p]` vector.
    pub fn from_flat(x: &[f64]) -> Result<Self, VariationalError> {
        if !x.len().is_multiple_of(2) {
            return Err(VariationalError::InvalidParams(
                "flat QAOA vector must have even length".into(),
            ));
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    fn validate(&self) -> Result<(), VariationalError> {
        if self.gammas.is_empty() {
            return Err(VariationalError::InvalidParams("p must be at least 1".into()));
        }
        if self.gammas.len() != self.betas.len() {
            return Err(VariationalError::DimensionMismatch {
                expected: self.gammas.len(),
                actual: self.betas.len(),
            });
        }
        if self.gammas.iter().chain(&self.betas).any(|x| !x.is_finite()) {
            return Err(VariationalError::InvalidParams("non-finite angle".into()));
        }
        Ok(())
    }
}

/// Hardware-efficient ansatz: `L + 1` RY layers separated by CZ rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeAnsatz {
    pub n_qubits: usize,
    pub layers: usize,
    /// `thetas[layer * n_qubits + qubit]`.
    pub thetas: Vec<f64>,
}

impl VqeAnsatz {
    pub fn new(n_qubits: usize, layers: usize, thetas: Vec<f64>) -> Result<Self, VariationalError> {
        if layers == 0 || n_qubits == 0 {
            return Err(VariationalError::InvalidParams(
                "layers and qubit count must be at least 1".into(),
            ));
        }
        let expected = Self::param_count(n_qubits, layers);
        if thetas.len() != expected {
            return Err(VariationalError::DimensionMismatch {
                expected,
                actual: thetas.len(),
            });
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(VariationalError::InvalidParams("non-finite angle".into()));
        }
        Ok(Self {
            n_qubits,
            layers,
            thetas,
        })
    }

    pub fn param_count(n_qubits: usize, layers: usize) -> usize {
        n_qubits * (layers + 1)
    }
}

/// Neighbor pairs of the CZ ring; two qubits share a single edge.
pub fn cz_ring(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => vec![],
        2 => vec![(0, 1)],
        _ => (0..n).map(|q| (q, (q + 1) % n)).collect(),
    }
}

fn check_size(n: usize) -> Result<(), VariationalError> {
    if n > MAX_QUBITS {
        Err(VariationalError::TooLarge(n))
    } else {
        Ok(())
    }
}

/// Ising energy for every basis index; bit 0 of a qubit means spin +1.
pub fn diagonal_energies(ising: &IsingModel, n_qubits: usize) -> Result<Vec<f64>, VariationalError> {
    check_size(n_qubits)?;
    if ising.n_spins() != n_qubits {
        return Err(VariationalError::DimensionMismatch {
            expected: n_qubits,
            actual: ising.n_spins(),
        });
    }
    let spin = |z: usize, q: usize| if (z >> q) & 1 == 0 { 1.0 } else { -1.0 };
    let couplings: Vec<(usize, usize, f64)> = ising.j.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
    Ok((0..1usize << n_qubits)
        .map(|z| {
            let mut e = ising.constant;
            for (q, &h) in ising.h.iter().enumerate() {
                e += h * spin(z, q);
            }
            for &(a, b, c) in &couplings {
                e += c * spin(z, a) * spin(z, b);
            }
            e
        })
        .collect())
}

fn rx(theta: f64) -> [Amplitude; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    let m = Amplitude::new(0.0, -s);
    [Amplitude::new(c, 0.0), m, m, Amplitude::new(c, 0.0)]
}

fn ry(theta: f64) -> [Amplitude; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        Amplitude::new(c, 0.0),
        Amplitude::new(-s, 0.0),
        Amplitude::new(s, 0.0),
        Amplitude::new(c, 0.0),
    ]
}

pub fn qaoa_state(energies: &[f64], params: &QaoaParams) -> Result<Statevector, VariationalError> {
    params.validate()?;
    let n = energies.len().trailing_zeros() as usize;
    if !energies.len().is_power_of_two() {
        return Err(VariationalError::InvalidParams(
            "energy table length must be a power of two".into(),
        ));
    }
    check_size(n)?;
    let mut state = Statevector::uniform(n);
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for (amp, &e) in state.amplitudes_mut().iter_mut().zip(energies) {
            *amp *= Amplitude::from_polar(1.0, -gamma * e);
        }
        let mixer = rx(2.0 * beta);
        for q in 0..n {
            state.apply_1q(&mixer, q);
        }
    }
    Ok(state)
}

pub fn qaoa_state_for(ising: &IsingModel, params: &QaoaParams) -> Result<Statevector, VariationalError> {
    qaoa_state(&diagonal_energies(ising, ising.n_spins())?, params)
}

pub fn vqe_state(ansatz: &VqeAnsatz) -> Result<Statevector, VariationalError> {
    let n = ansatz.n_qubits;
    check_size(n)?;
    let ring = cz_ring(n);
    let mut state = Statevector::zero(n);
    for layer in 0..=ansatz.layers {
        if layer > 0 {
            for &(a, b) in &ring {
                state.apply_cz(a, b);
            }
        }
        for q in 0..n {
            state.apply_1q(&ry(ansatz.thetas[layer * n + q]), q);
        }
    }
    Ok(state)
}

/// Real-arithmetic path for the RY+CZ circuit, whose amplitudes stay real.
fn vqe_real_amplitudes(n: usize, layers: usize, thetas: &[f64]) -> Vec<f64> {
    let ring = cz_ring(n);
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    for layer in 0..=layers {
        if layer > 0 {
            for &(a, b) in &ring {
                let mask = (1usize << a) | (1usize << b);
                for (z, v) in amps.iter_mut().enumerate() {
                    if z & mask == mask {
                        *v = -*v;
                    }
                }
            }
        }
        for q in 0..n {
            let (s, c) = (thetas[layer * n + q] / 2.0).sin_cos();
            let stride = 1usize << q;
            for base in (0..amps.len()).step_by(stride << 1) {
                for lo in base..base + stride {
                    let (a0, a1) = (amps[lo], amps[lo + stride]);
                    amps[lo] = c * a0 - s * a1;
                    amps[lo + stride] = s * a0 + c * a1;
                }
            }
        }
    }
    amps
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` for the VQE ansatz without building a complex state.
pub fn vqe_energy(ansatz: &VqeAnsatz, energies: &[f64]) -> Result<f64, VariationalError> {
    check_size(ansatz.n_qubits)?;
    let amps = vqe_real_amplitudes(ansatz.n_qubits, ansatz.layers, &ansatz.thetas);
    if amps.len() != energies.len() {
        return Err(VariationalError::DimensionMismatch {
            expected: amps.len(),
            actual: energies.len(),
        });
    }
    Ok(amps.iter().zip(energies).map(|(a, e)| a * a * e).sum())
}

pub fn expectation(state: &Statevector, energies: &[f64]) -> Result<f64, VariationalError> {
    if state.dim() != energies.len() {
        return Err(VariationalError::DimensionMismatch {
            expected: state.dim(),
            actual: energies.len(),
        });
    }
    Ok(state
        .amplitudes()
        .iter()
        .zip(energies)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum())
}

/// I.i.d. basis-index draws from the Born distribution.
pub fn sample_bits(state: &Statevector, shots: usize, rng_seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in state.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
        })
        .collect()
}

/// The `k` most frequent draws, by count descending then index ascending.
pub fn top_k(draws: &[usize], k: usize) -> Vec<(usize, usize)> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &z in draws {
        *counts.entry(z).or_default() += 1;
    }
    let mut ranked: Vec<(usize, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{qubo_to_ising, Qubo};
    use rand::seq::SliceRandom;
    use std::f64::consts::{FRAC_PI_2, PI};

    type Dense = Vec<Vec<Amplitude>>;

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    fn identity(d: usize) -> Dense {
        (0..d)
            .map(|i| (0..d).map(|j| c((i == j) as u8 as f64, 0.0)).collect())
            .collect()
    }

    fn matmul(a: &Dense, b: &Dense) -> Dense {
        let d = a.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    fn matvec(a: &Dense, v: &[Amplitude]) -> Vec<Amplitude> {
        a.iter()
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect()
    }

    /// Full operator for a 2×2 gate on `q`, built entry by entry.
    fn lift(m: [Amplitude; 4], q: usize, n: usize) -> Dense {
        let d = 1 << n;
        let mut out = vec![vec![c(0.0, 0.0); d]; d];
        for row in 0..d {
            for col in 0..d {
                if (row ^ col) & !(1 << q) != 0 {
                    continue;
                }
                let r = (row >> q) & 1;
                let k = (col >> q) & 1;
                out[row][col] = m[r * 2 + k];
            }
        }
        out
    }

    fn diag(entries: Vec<Amplitude>) -> Dense {
        let d = entries.len();
        let mut out = vec![vec![c(0.0, 0.0); d]; d];
        for (i, e) in entries.into_iter().enumerate() {
            out[i][i] = e;
        }
        out
    }

    fn seeded_ising(rng: &mut ChaCha8Rng, n: usize) -> IsingModel {
        let mut q = Qubo::zero(n);
        q.offset = rng.gen_range(-1.0..1.0);
        for i in 0..n {
            q.linear[i] = rng.gen_range(-2.0..2.0);
            for j in i + 1..n {
                q.add_quadratic(i, j, rng.gen_range(-2.0..2.0));
            }
        }
        qubo_to_ising(&q)
    }

    fn close(a: &[Amplitude], b: &[Amplitude], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn energies_sign_convention() {
        let zero = IsingModel {
            h: vec![0.0; 2],
            j: Default::default(),
            constant: 0.0,
        };
        assert_eq!(diagonal_energies(&zero, 2).unwrap(), vec![0.0; 4]);
        let single = IsingModel {
            h: vec![1.0],
            j: Default::default(),
            constant: 0.0,
        };
        assert_eq!(diagonal_energies(&single, 1).unwrap(), vec![1.0, -1.0]);
        assert_eq!(
            diagonal_energies(&single, 17),
            Err(VariationalError::TooLarge(17))
        );
    }

    #[test]
    fn energies_match_per_assignment_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ising = seeded_ising(&mut rng, 4);
        let table = diagonal_energies(&ising, 4).unwrap();
        for (z, &e) in table.iter().enumerate() {
            let spins: Vec<i8> = (0..4).map(|q| if z >> q & 1 == 1 { -1 } else { 1 }).collect();
            assert!((ising.energy(&spins) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn qaoa_trivial_angles() {
        let energies = [0.3, -1.0, 2.0, 0.5];
        let s = qaoa_state(&energies, &QaoaParams::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
        assert!(close(s.amplitudes(), Statevector::uniform(2).amplitudes(), 1e-15));
        let s = qaoa_state(&energies, &QaoaParams::new(vec![0.0], vec![FRAC_PI_2]).unwrap()).unwrap();
        for p in s.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn qaoa_matches_dense_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ising = seeded_ising(&mut rng, 2);
        let energies = diagonal_energies(&ising, 2).unwrap();
        let params = QaoaParams::new(
            vec![rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)],
            vec![rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)],
        )
        .unwrap();
        let mut u = identity(4);
        for k in 0..2 {
            let cost = diag(energies.iter().map(|&e| Amplitude::from_polar(1.0, -params.gammas[k] * e)).collect());
            let (s, co) = params.betas[k].sin_cos();
            let rx = [c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)];
            let mixer = matmul(&lift(rx, 1, 2), &lift(rx, 0, 2));
            u = matmul(&mixer, &matmul(&cost, &u));
        }
        let expected = matvec(&u, &[c(0.5, 0.0); 4]);
        let got = qaoa_state_for(&ising, &params).unwrap();
        assert!(close(got.amplitudes(), &expected, 1e-12));
    }

    #[test]
    fn vqe_trivial_angles() {
        let a = VqeAnsatz::new(3, 2, vec![0.0; 9]).unwrap();
        let s = vqe_state(&a).unwrap();
        assert!(close(s.amplitudes(), Statevector::zero(3).amplitudes(), 1e-15));
        let a = VqeAnsatz::new(1, 1, vec![PI, 0.0]).unwrap();
        let s = vqe_state(&a).unwrap();
        assert!((s.probabilities()[1] - 1.0).abs() < 1e-15);
        assert!(VqeAnsatz::new(2, 1, vec![0.0; 3]).is_err());
        assert!(VqeAnsatz::new(2, 0, vec![]).is_err());
    }

    #[test]
    fn vqe_matches_dense_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 3;
        let layers = 2;
        let thetas: Vec<f64> = (0..n * (layers + 1)).map(|_| rng.gen_range(-PI..PI)).collect();
        let ry = |t: f64| {
            let (s, co) = (t / 2.0).sin_cos();
            [c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]
        };
        let cz = |a: usize, b: usize| {
            diag((0..1 << n).map(|z| c(if z >> a & 1 == 1 && z >> b & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect())
        };
        let mut u = identity(1 << n);
        for layer in 0..=layers {
            if layer > 0 {
                for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                    u = matmul(&cz(a, b), &u);
                }
            }
            for q in 0..n {
                u = matmul(&lift(ry(thetas[layer * n + q]), q, n), &u);
            }
        }
        let mut zero = vec![c(0.0, 0.0); 1 << n];
        zero[0] = c(1.0, 0.0);
        let expected = matvec(&u, &zero);
        let got = vqe_state(&VqeAnsatz::new(n, layers, thetas).unwrap()).unwrap();
        assert!(close(got.amplitudes(), &expected, 1e-10));
    }

    #[test]
    fn real_path_agrees_with_complex_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..6 {
            let thetas = (0..n * 3).map(|_| rng.gen_range(-PI..PI)).collect();
            let ansatz = VqeAnsatz::new(n, 2, thetas).unwrap();
            let energies: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let a = expectation(&vqe_state(&ansatz).unwrap(), &energies).unwrap();
            let b = vqe_energy(&ansatz, &energies).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_shapes() {
        assert!(cz_ring(1).is_empty());
        assert_eq!(cz_ring(2), vec![(0, 1)]);
        assert_eq!(cz_ring(3), vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn expectation_cases() {
        let energies = [1.5, -2.0, 0.25, 4.0];
        let b = Statevector::basis(2, 1);
        assert_eq!(expectation(&b, &energies).unwrap(), -2.0);
        let u = Statevector::uniform(2);
        assert!((expectation(&u, &energies).unwrap() - 3.75 / 4.0).abs() < 1e-12);
        assert!(expectation(&u, &energies[..2]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = crate::quantum::tests::random_state(&mut rng, 5);
        let e: Vec<f64> = (0..32).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mut order: Vec<usize> = (0..32).collect();
        order.shuffle(&mut rng);
        let shuffled: f64 = order.iter().map(|&z| s.amplitudes()[z].norm_sqr() * e[z]).sum();
        assert!((expectation(&s, &e).unwrap() - shuffled).abs() < 1e-10);
    }

    #[test]
    fn uniform_qaoa_expectation_is_mean_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ising = seeded_ising(&mut rng, 3);
        let energies = diagonal_energies(&ising, 3).unwrap();
        let s = qaoa_state(&energies, &QaoaParams::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
        let mean = energies.iter().sum::<f64>() / 8.0;
        assert!((expectation(&s, &energies).unwrap() - mean).abs() < 1e-12);
    }

    #[test]
    fn sampling() {
        let b = Statevector::basis(3, 5);
        assert!(sample_bits(&b, 100, 1).iter().all(|&z| z == 5));
        let u = Statevector::uniform(1);
        let draws = sample_bits(&u, 10_000, 2024);
        let ones = draws.iter().filter(|&&z| z == 1).count() as f64 / 1e4;
        assert!((ones - 0.5).abs() <= 0.02, "{ones}");
        assert_eq!(draws, sample_bits(&u, 10_000, 2024));
        assert_eq!(top_k(&[3, 1, 3, 2, 1, 0], 2), vec![(1, 2), (3, 2)]);
    }

    mod props {
        use super::*;
        use rand::Rng;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn circuits_preserve_norm(seed in any::<u64>(), n in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ising = seeded_ising(&mut rng, n);
                let params = QaoaParams::new(
                    (0..2).map(|_| rng.gen_range(-PI..PI)).collect(),
                    (0..2).map(|_| rng.gen_range(-PI..PI)).collect(),
                ).unwrap();
                let s = qaoa_state_for(&ising, &params).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                let thetas = (0..n * 3).map(|_| rng.gen_range(-PI..PI)).collect();
                let s = vqe_state(&VqeAnsatz::new(n, 2, thetas).unwrap()).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }
}
