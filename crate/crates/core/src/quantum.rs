//! Dense statevector mechanics for small registers.
//!
//! Basis index convention: bit `b` of a basis index is the state of qubit `b`
//! (qubit 0 is the least-significant bit).

use num_complex::Complex64;
use thiserror::Error;

pub type Amplitude = Complex64;

/// Structural tolerance used for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-12;
/// State-level tolerance used for norm checks.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("matrix is not unitary (max deviation {0:e})")]
    NonUnitaryInput(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid bit value {0}; expected 0 or 1")]
    InvalidBit(u8),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("non-finite amplitude")]
    NonFinite,
}

/// A normalized pure state over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Amplitude>,
}

impl Statevector {
    /// Builds a state from raw amplitudes, checking length, finiteness and norm.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self, QuantumError> {
        if amps.is_empty() {
            return Err(QuantumError::EmptyInput);
        }
        if !amps.len().is_power_of_two() || amps.len() < 2 {
            return Err(QuantumError::DimensionMismatch(format!(
                "amplitude count {} is not 2^n with n >= 1",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized(norm_sqr));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    /// Builds a state without the norm check. Callers guarantee normalization.
    pub(crate) fn from_amplitudes_unchecked(amps: Vec<Amplitude>) -> Self {
        let n_qubits = amps.len().trailing_zeros() as usize;
        Self { n_qubits, amps }
    }

    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Amplitude::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// `|+⟩^⊗n`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Amplitude::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n_qubits,
            amps: vec![a; dim],
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut s = Self {
            n_qubits,
            amps: vec![Amplitude::new(0.0, 0.0); 1 << n_qubits],
        };
        s.amps[index] = Amplitude::new(1.0, 0.0);
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a 2×2 matrix (row-major) to `qubit` in place.
    pub(crate) fn apply_1q(&mut self, m: &[Amplitude; 4], qubit: usize) {
        let stride = 1usize << qubit;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for lo in base..base + stride {
                let hi = lo + stride;
                let a0 = self.amps[lo];
                let a1 = self.amps[hi];
                self.amps[lo] = m[0] * a0 + m[1] * a1;
                self.amps[hi] = m[2] * a0 + m[3] * a1;
            }
            base += stride << 1;
        }
    }

    /// Controlled-Z between two qubits in place.
    pub(crate) fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (z, amp) in self.amps.iter_mut().enumerate() {
            if z & mask == mask {
                *amp = -*amp;
            }
        }
    }
}

/// A dense 2×2 or 4×4 matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl UnitaryMatrix {
    /// Wraps row-major entries. Unitarity is not checked here; see [`is_unitary`].
    pub fn new(dim: usize, entries: Vec<Amplitude>) -> Result<Self, QuantumError> {
        if dim != 2 && dim != 4 {
            return Err(QuantumError::DimensionMismatch(format!(
                "matrix dimension {dim} not in {{2, 4}}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(QuantumError::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self, QuantumError> {
        Self::new(dim, entries.iter().map(|&r| Amplitude::new(r, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Amplitude::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Amplitude::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![Amplitude::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// Matrix product `self · rhs`. Panics if dimensions differ.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let d = self.dim;
        let mut entries = vec![Amplitude::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = (0..d).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        Self { dim: d, entries }
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn unitarity_error(&self) -> f64 {
        self.mul(&self.dagger())
            .max_abs_diff(&Self::identity(self.dim))
    }
}

/// True iff `max |U·U† − I| ≤ tol` elementwise.
pub fn is_unitary(m: &UnitaryMatrix, tol: f64) -> bool {
    m.unitarity_error() <= tol
}

/// Applies `u` to the listed target qubits, identity elsewhere.
///
/// Local bit `k` of the matrix index corresponds to qubit `targets[k]`, so a
/// two-qubit matrix with control on local bit 0 applied with `targets = [1, 0]`
/// uses qubit 1 as control.
pub fn apply_unitary(
    state: &Statevector,
    u: &UnitaryMatrix,
    targets: &[usize],
) -> Result<Statevector, QuantumError> {
    if targets.is_empty() || 1usize << targets.len() != u.dim() {
        return Err(QuantumError::DimensionMismatch(format!(
            "{}x{} matrix acting on {} target(s)",
            u.dim(),
            u.dim(),
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= state.n_qubits {
            return Err(QuantumError::IndexOutOfRange {
                index: t,
                n_qubits: state.n_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(QuantumError::DimensionMismatch(format!(
                "target qubit {t} listed twice"
            )));
        }
    }
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(QuantumError::NonUnitaryInput(err));
    }

    let d = u.dim();
    let target_mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let mut out = vec![Amplitude::new(0.0, 0.0); state.dim()];
    let mut local = vec![Amplitude::new(0.0, 0.0); d];
    let scatter = |base: usize, k: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .fold(base, |z, (bit, &q)| z | (((k >> bit) & 1) << q))
    };
    for base in 0..state.dim() {
        if base & target_mask != 0 {
            continue;
        }
        for (k, slot) in local.iter_mut().enumerate() {
            *slot = state.amps[scatter(base, k)];
        }
        for r in 0..d {
            let v: Amplitude = (0..d).map(|c| u.get(r, c) * local[c]).sum();
            out[scatter(base, r)] = v;
        }
    }
    Ok(Statevector {
        n_qubits: state.n_qubits,
        amps: out,
    })
}

/// Product state with `bits[b]` the value of qubit `b`.
pub fn tensor_basis_state(bits: &[u8]) -> Result<Statevector, QuantumError> {
    if bits.is_empty() {
        return Err(QuantumError::EmptyInput);
    }
    let mut index = 0usize;
    for (b, &bit) in bits.iter().enumerate() {
        match bit {
            0 => {}
            1 => index |= 1 << b,
            other => return Err(QuantumError::InvalidBit(other)),
        }
    }
    Ok(Statevector::basis(bits.len(), index))
}
