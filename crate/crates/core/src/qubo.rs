//! QUBO reductions for TSP and knapsack, the Ising substitution, decoders and
//! an exhaustive minimizer.
//!
//! TSP uses the position encoding: variable `x[i][p]` is 1 when city `i` is
//! visited at tour position `p`, index `i * N + p`.
//!
//! ```text
//! E = A Σ_i (1 − Σ_p x[i][p])² + A Σ_p (1 − Σ_i x[i][p])²
//!   + Σ_{i≠j} d[i][j] Σ_p x[i][p] · x[j][(p+1) mod N]
//! ```
//!
//! Knapsack uses binary slack bits covering exactly `[0, W]`:
//!
//! ```text
//! E = −Σ v_i x_i + λ (Σ w_i x_i + Σ c_k s_k − W)²
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const BRUTE_FORCE_MAX_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{0} variables exceed the exhaustive-search limit of {BRUTE_FORCE_MAX_VARS}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub labels: Vec<String>,
    /// `distances[i][j]` is the cost of travelling from city `i` to city `j`.
    pub distances: Vec<Vec<f64>>,
}

impl TspInstance {
    pub fn new(labels: Vec<String>, distances: Vec<Vec<f64>>) -> Result<Self, QuboError> {
        let inst = Self { labels, distances };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), QuboError> {
        let n = self.labels.len();
        if n < 2 {
            return Err(QuboError::InvalidInstance("at least two cities are required".into()));
        }
        if self.distances.len() != n || self.distances.iter().any(|r| r.len() != n) {
            return Err(QuboError::InvalidInstance(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        for (i, row) in self.distances.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(QuboError::InvalidInstance(format!(
                        "distance [{i}][{j}] = {d} must be finite and nonnegative"
                    )));
                }
                if i == j && d != 0.0 {
                    return Err(QuboError::InvalidInstance(format!(
                        "distance [{i}][{i}] must be zero"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Cost of visiting cities in `order` and returning to the start.
    pub fn tour_cost(&self, order: &[usize]) -> f64 {
        let n = order.len();
        (0..n)
            .map(|p| self.distances[order[p]][order[(p + 1) % n]])
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpInstance {
    pub items: Vec<String>,
    pub weights: Vec<u64>,
    pub values: Vec<u64>,
    pub capacity: u64,
}

impl KpInstance {
    pub fn new(
        items: Vec<String>,
        weights: Vec<u64>,
        values: Vec<u64>,
        capacity: u64,
    ) -> Result<Self, QuboError> {
        let inst = Self {
            items,
            weights,
            values,
            capacity,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Accepts real-valued data that must be positive integers.
    pub fn from_reals(
        items: Vec<String>,
        weights: &[f64],
        values: &[f64],
        capacity: f64,
    ) -> Result<Self, QuboError> {
        let to_int = |what: &str, x: f64| -> Result<u64, QuboError> {
            if x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                Ok(x as u64)
            } else {
                Err(QuboError::InvalidInstance(format!(
                    "{what} {x} must be a positive integer"
                )))
            }
        };
        let weights = weights
            .iter()
            .map(|&w| to_int("weight", w))
            .collect::<Result<Vec<_>, _>>()?;
        let values = values
            .iter()
            .map(|&v| to_int("value", v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(items, weights, values, to_int("capacity", capacity)?)
    }

    pub fn validate(&self) -> Result<(), QuboError> {
        let n = self.items.len();
        if n == 0 {
            return Err(QuboError::InvalidInstance("no items".into()));
        }
        if self.weights.len() != n || self.values.len() != n {
            return Err(QuboError::InvalidInstance(
                "weights and values must have one entry per item".into(),
            ));
        }
        if self.weights.iter().chain(&self.values).any(|&x| x == 0) {
            return Err(QuboError::InvalidInstance(
                "weights and values must be positive".into(),
            ));
        }
        if self.capacity == 0 {
            return Err(QuboError::InvalidInstance("capacity must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }
}

/// Quadratic objective over binary variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qubo {
    pub n_vars: usize,
    pub linear: Vec<f64>,
    /// Keyed by `(i, j)` with `i < j`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl Qubo {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            linear: vec![0.0; n_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.linear[i] += c;
    }

    /// Adds `c · x_i · x_j`; `i == j` folds into the linear term since `x² = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.linear[i] += c;
            return;
        }
        let key = (i.min(j), i.max(j));
        *self.quadratic.entry(key).or_insert(0.0) += c;
    }

    pub fn energy(&self, bits: &[bool]) -> f64 {
        let mut e = self.offset;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                e += self.linear[i];
            }
        }
        for (&(i, j), &q) in &self.quadratic {
            if bits[i] && bits[j] {
                e += q;
            }
        }
        e
    }

    pub fn energy_of_index(&self, z: usize) -> f64 {
        self.energy(&index_to_bits(z, self.n_vars))
    }
}

pub fn index_to_bits(z: usize, n: usize) -> Vec<bool> {
    (0..n).map(|b| (z >> b) & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |z, (b, &v)| z | ((v as usize) << b))
}

/// Spin model with `s_i ∈ {−1, +1}`; related to a QUBO by `x = (1 − s) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Keyed by `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
}

impl IsingModel {
    pub fn n_spins(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.constant;
        for (i, &s) in spins.iter().enumerate() {
            e += self.h[i] * s as f64;
        }
        for (&(a, b), &c) in &self.j {
            e += c * (spins[a] * spins[b]) as f64;
        }
        e
    }
}

pub fn qubo_to_ising(q: &Qubo) -> IsingModel {
    let mut h = vec![0.0; q.n_vars];
    let mut j = BTreeMap::new();
    let mut constant = q.offset;
    for (i, &a) in q.linear.iter().enumerate() {
        constant += a / 2.0;
        h[i] -= a / 2.0;
    }
    for (&(a, b), &c) in &q.quadratic {
        constant += c / 4.0;
        h[a] -= c / 4.0;
        h[b] -= c / 4.0;
        *j.entry((a, b)).or_insert(0.0) += c / 4.0;
    }
    IsingModel { h, j, constant }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TspVarMap {
    pub n: usize,
}

impl TspVarMap {
    pub fn index(&self, city: usize, position: usize) -> usize {
        city * self.n + position
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspQubo {
    pub qubo: Qubo,
    pub var_map: TspVarMap,
    pub penalty: f64,
}

/// Auto penalty `A = N · max(d) + 1`.
pub fn tsp_auto_penalty(inst: &TspInstance) -> f64 {
    inst.n() as f64 * inst.max_distance() + 1.0
}

pub fn tsp_to_qubo(inst: &TspInstance, penalty: Option<f64>) -> Result<TspQubo, QuboError> {
    inst.validate()?;
    let a = match penalty {
        Some(p) if p > 0.0 && p.is_finite() => p,
        Some(p) => {
            return Err(QuboError::InvalidInstance(format!(
                "penalty {p} must be positive"
            )))
        }
        None => tsp_auto_penalty(inst),
    };
    let n = inst.n();
    let map = TspVarMap { n };
    let mut q = Qubo::zero(n * n);

    let rows = (0..n).map(|i| (0..n).map(|p| map.index(i, p)).collect::<Vec<_>>());
    let cols = (0..n).map(|p| (0..n).map(|i| map.index(i, p)).collect::<Vec<_>>());
    for group in rows.chain(cols) {
        // A (1 − Σx)² = A − A Σx + 2A Σ_{a<b} x_a x_b
        q.offset += a;
        for (k, &u) in group.iter().enumerate() {
            q.add_linear(u, -a);
            for &v in &group[k + 1..] {
                q.add_quadratic(u, v, 2.0 * a);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = inst.distances[i][j];
            if d == 0.0 {
                continue;
            }
            for p in 0..n {
                q.add_quadratic(map.index(i, p), map.index(j, (p + 1) % n), d);
            }
        }
    }
    Ok(TspQubo {
        qubo: q,
        var_map: map,
        penalty: a,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KpVarMap {
    pub n_items: usize,
    /// Coefficient of each slack bit, in variable order after the items.
    pub slack_coeffs: Vec<u64>,
}

impl KpVarMap {
    pub fn item(&self, i: usize) -> usize {
        i
    }

    pub fn slack(&self, k: usize) -> usize {
        self.n_items + k
    }

    pub fn n_vars(&self) -> usize {
        self.n_items + self.slack_coeffs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpQubo {
    pub qubo: Qubo,
    pub var_map: KpVarMap,
    pub penalty: f64,
    /// Every item is heavier than the capacity, so only the empty selection is feasible.
    pub capacity_too_small: bool,
}

/// Slack coefficients `1, 2, …, 2^(m−1), W + 1 − 2^m` with `m = ⌊log2 W⌋`.
pub fn slack_coefficients(capacity: u64) -> Vec<u64> {
    assert!(capacity >= 1);
    let m = 63 - capacity.leading_zeros() as u64;
    let mut c: Vec<u64> = (0..m).map(|k| 1u64 << k).collect();
    c.push(capacity + 1 - (1u64 << m));
    c
}

/// Auto penalty `λ = Σ v + 1`.
pub fn kp_auto_penalty(inst: &KpInstance) -> f64 {
    inst.values.iter().sum::<u64>() as f64 + 1.0
}

pub fn kp_to_qubo(inst: &KpInstance, penalty: Option<f64>) -> Result<KpQubo, QuboError> {
    inst.validate()?;
    let lambda = match penalty {
        Some(p) if p > 0.0 && p.is_finite() => p,
        Some(p) => {
            return Err(QuboError::InvalidInstance(format!(
                "penalty {p} must be positive"
            )))
        }
        None => kp_auto_penalty(inst),
    };
    let slack = slack_coefficients(inst.capacity);
    let map = KpVarMap {
        n_items: inst.n(),
        slack_coeffs: slack.clone(),
    };
    let coeffs: Vec<f64> = inst
        .weights
        .iter()
        .chain(&slack)
        .map(|&c| c as f64)
        .collect();
    let w = inst.capacity as f64;
    let mut q = Qubo::zero(coeffs.len());
    // λ (Σ a_k y_k − W)² = λ W² + λ Σ (a_k² − 2 W a_k) y_k + 2λ Σ_{k<l} a_k a_l y_k y_l
    q.offset = lambda * w * w;
    for (k, &ak) in coeffs.iter().enumerate() {
        q.add_linear(k, lambda * (ak * ak - 2.0 * w * ak));
        for (l, &al) in coeffs.iter().enumerate().skip(k + 1) {
            q.add_quadratic(k, l, 2.0 * lambda * ak * al);
        }
    }
    for (i, &v) in inst.values.iter().enumerate() {
        q.add_linear(map.item(i), -(v as f64));
    }
    Ok(KpQubo {
        qubo: q,
        var_map: map,
        penalty: lambda,
        capacity_too_small: inst.weights.iter().all(|&wi| wi > inst.capacity),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub bits: Vec<bool>,
    pub energy: f64,
}

/// Global minimizer by enumeration; ties go to the lowest integer bitstring.
pub fn brute_force(q: &Qubo) -> Result<BruteForceResult, QuboError> {
    let n = q.n_vars;
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(QuboError::TooLarge(n));
    }
    let mut dense = vec![0.0; n * n];
    for (&(i, j), &c) in &q.quadratic {
        dense[i * n + j] = c;
    }
    let energy = |z: usize| -> f64 {
        let mut e = q.offset;
        let mut rest = z;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            e += q.linear[i];
            let mut higher = rest;
            while higher != 0 {
                let j = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                e += dense[i * n + j];
            }
        }
        e
    };
    let total = 1usize << n;
    let chunk = 1usize << 12;
    let (best_z, best_e) = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut best = (start, energy(start));
            for z in start + 1..end {
                let e = energy(z);
                if e < best.1 {
                    best = (z, e);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        // chunks arrive in index order, so strict comparison keeps the lowest index on ties
        .fold((0usize, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    Ok(BruteForceResult {
        bits: index_to_bits(best_z, n),
        energy: best_e,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    /// City indices by tour position.
    pub order: Vec<usize>,
    pub labels: Vec<String>,
    /// Includes the closing leg back to the first city.
    pub cost: f64,
}

pub fn decode_tsp(bits: &[bool], map: &TspVarMap, inst: &TspInstance) -> Option<Tour> {
    let n = map.n;
    if bits.len() != n * n || inst.n() != n {
        return None;
    }
    let mut order = Vec::with_capacity(n);
    for p in 0..n {
        let mut at: Option<usize> = None;
        for i in 0..n {
            if bits[map.index(i, p)] {
                if at.is_some() {
                    return None;
                }
                at = Some(i);
            }
        }
        order.push(at?);
    }
    let mut seen = vec![false; n];
    for &c in &order {
        if std::mem::replace(&mut seen[c], true) {
            return None;
        }
    }
    Some(Tour {
        labels: order.iter().map(|&i| inst.labels[i].clone()).collect(),
        cost: inst.tour_cost(&order),
        order,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub items: Vec<usize>,
    pub names: Vec<String>,
    pub total_value: u64,
    pub total_weight: u64,
}

/// Reads the item bits only; feasibility is checked against the capacity directly.
pub fn decode_kp(bits: &[bool], map: &KpVarMap, inst: &KpInstance) -> Option<Selection> {
    if bits.len() < map.n_items || inst.n() != map.n_items {
        return None;
    }
    let items: Vec<usize> = (0..map.n_items).filter(|&i| bits[map.item(i)]).collect();
    let total_weight = items.iter().map(|&i| inst.weights[i]).sum();
    let total_value = items.iter().map(|&i| inst.values[i]).sum();
    (total_weight <= inst.capacity).then(|| Selection {
        names: items.iter().map(|&i| inst.items[i].clone()).collect(),
        items,
        total_value,
        total_weight,
    })
}

#[cfg(test)]
pub(crate) mod oracles {
    use super::*;

    /// Minimum tour cost over all permutations fixing city 0 first.
    pub fn tsp_enumerate(inst: &TspInstance) -> f64 {
        fn rec(inst: &TspInstance, order: &mut Vec<usize>, used: &mut [bool], best: &mut f64) {
            let n = inst.n();
            if order.len() == n {
                let mut cost = 0.0;
                for p in 0..n {
                    cost += inst.distances[order[p]][order[(p + 1) % n]];
                }
                if cost < *best {
                    *best = cost;
                }
                return;
            }
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    order.push(c);
                    rec(inst, order, used, best);
                    order.pop();
                    used[c] = false;
                }
            }
        }
        let mut used = vec![false; inst.n()];
        used[0] = true;
        let mut best = f64::INFINITY;
        rec(inst, &mut vec![0], &mut used, &mut best);
        best
    }

    /// 0/1 knapsack optimum by dynamic programming over capacity.
    pub fn kp_dp(inst: &KpInstance) -> u64 {
        let cap = inst.capacity as usize;
        let mut best = vec![0u64; cap + 1];
        for (&w, &v) in inst.weights.iter().zip(&inst.values) {
            let w = w as usize;
            for c in (w..=cap).rev() {
                best[c] = best[c].max(best[c - w] + v);
            }
        }
        best[cap]
    }
}
