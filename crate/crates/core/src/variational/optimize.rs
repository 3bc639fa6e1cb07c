//! Multi-start Nelder-Mead with a fixed evaluation budget per start.

use super::VariationalError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    /// Total starts including the caller's initial point.
    pub starts: usize,
    pub max_evals_per_start: usize,
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
    pub seed: u64,
    pub deadline: Option<Instant>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            starts: 4,
            max_evals_per_start: 400,
            initial_step: 0.5,
            seed: 0,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Every objective value in evaluation order, starts concatenated.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

struct Evaluator<'a, F> {
    f: &'a F,
    budget: usize,
    deadline: Option<Instant>,
    history: Vec<f64>,
    best: Option<(Vec<f64>, f64)>,
    timed_out: bool,
}

impl<F: Fn(&[f64]) -> f64> Evaluator<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.history.len() >= self.budget {
            return None;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            return None;
        }
        let v = (self.f)(x);
        self.history.push(v);
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(ev: &mut Evaluator<'_, F>, x0: &[f64], step: f64) {
    let n = x0.len();
    // dimension-adapted coefficients help on the larger ansatz parameter counts
    let (alpha, beta, gamma, delta) = if n >= 3 {
        let nf = n as f64;
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f0) = ev.eval(x0) else { return };
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let Some(f) = ev.eval(&x) else { return };
        simplex.push((x, f));
    }
    if n == 0 {
        return;
    }
    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = along(&centroid, &worst.0, -alpha);
        let Some(fr) = ev.eval(&xr) else { return };
        if fr < simplex[0].1 {
            let xe = along(&centroid, &worst.0, -alpha * beta);
            let Some(fe) = ev.eval(&xe) else { return };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(&centroid, &xr, gamma);
            let Some(fc) = ev.eval(&xc) else { return };
            (xc, fc)
        } else {
            let xc = along(&centroid, &worst.0, gamma);
            let Some(fc) = ev.eval(&xc) else { return };
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = along(&best, &vertex.0, delta);
            let Some(f) = ev.eval(&x) else { return };
            *vertex = (x, f);
        }
    }
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Halton points with a seeded random shift, mapped into per-coordinate ranges.
pub fn halton_starts(count: usize, ranges: &[(f64, f64)], seed: u64) -> Vec<Vec<f64>> {
    let bases = primes(ranges.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = ranges.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            ranges
                .iter()
                .zip(&bases)
                .zip(&shift)
                .map(|((&(lo, hi), &b), &s)| {
                    let u = (radical_inverse(i, b) + s).fract();
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect()
}

/// Runs Nelder-Mead from `initial` and from `starts − 1` Halton points; the
/// overall best wins, earlier starts on ties.
pub fn optimize<F>(
    objective: F,
    initial: &[f64],
    ranges: &[(f64, f64)],
    config: &OptimizeConfig,
) -> Result<OptimizeResult, VariationalError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if config.max_evals_per_start == 0 || config.starts == 0 {
        return Err(VariationalError::BudgetZero);
    }
    if ranges.len() != initial.len() {
        return Err(VariationalError::DimensionMismatch {
            expected: initial.len(),
            actual: ranges.len(),
        });
    }
    let mut points = vec![initial.to_vec()];
    points.extend(halton_starts(config.starts - 1, ranges, config.seed));

    let runs: Vec<Evaluator<'_, F>> = points
        .par_iter()
        .map(|x0| {
            let mut ev = Evaluator {
                f: &objective,
                budget: config.max_evals_per_start,
                deadline: config.deadline,
                history: Vec::new(),
                best: None,
                timed_out: false,
            };
            nelder_mead(&mut ev, x0, config.initial_step);
            ev
        })
        .collect();

    if runs.iter().any(|r| r.timed_out) {
        return Err(VariationalError::DeadlineExceeded);
    }
    let mut history = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for run in runs {
        history.extend(run.history);
        if let Some((x, v)) = run.best {
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((x, v));
            }
        }
    }
    let (best_params, best_value) = best.expect("budget of at least one evaluation");
    Ok(OptimizeResult {
        best_params,
        best_value,
        evaluations: history.len(),
        history,
    })
}
