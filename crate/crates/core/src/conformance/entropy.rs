//! Short-circuit topological entropy of a trimmed automaton.
//!
//! Every final state gets one extra transition back to the initial state
//! (a fresh symbol). The entropy is `log2 ρ(A)` for the resulting
//! state-to-state transition-count matrix `A`. Because the automaton is
//! trimmed, the short-circuited graph is strongly connected, so `A + I` is
//! primitive and power iteration on it converges to `ρ(A) + 1`.

use thiserror::Error;

use super::automaton::Automaton;

pub const RELATIVE_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("automaton is not trimmed")]
    NotTrimmed,
}

/// Sparse row-major transition-count matrix.
struct CountMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl CountMatrix {
    fn short_circuit(a: &Automaton) -> Self {
        let n = a.num_states();
        let rows = (0..n)
            .map(|s| {
                let mut targets: Vec<usize> = a.transitions(s).values().copied().collect();
                if a.is_final(s) {
                    targets.push(a.initial());
                }
                targets.sort_unstable();
                let mut row: Vec<(usize, f64)> = Vec::new();
                for t in targets {
                    match row.last_mut() {
                        Some((last, c)) if *last == t => *c += 1.0,
                        _ => row.push((t, 1.0)),
                    }
                }
                row
            })
            .collect();
        CountMatrix { rows }
    }

    /// `y = (A + I) x`
    fn shifted_mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            y[i] = x[i] + row.iter().map(|&(j, c)| c * x[j]).sum::<f64>();
        }
    }
}

/// Perron root of `A` via power iteration on `A + I`, stopped when the
/// Collatz–Wielandt bounds `min_i (Mx)_i / x_i ≤ ρ(M) ≤ max_i (Mx)_i / x_i`
/// agree to the relative tolerance.
fn spectral_radius(m: &CountMatrix) -> f64 {
    let n = m.rows.len();
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..MAX_ITERATIONS {
        m.shifted_mul(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        estimate = 0.5 * (lo + hi);
        if hi - lo <= RELATIVE_TOLERANCE * lo {
            break;
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / scale;
        }
    }
    estimate - 1.0
}

pub fn short_circuit_entropy(a: &Automaton) -> Result<f64, EntropyError> {
    if !a.is_trimmed() {
        return Err(EntropyError::NotTrimmed);
    }
    if a.is_empty_language() || a.is_single_word() {
        return Ok(0.0);
    }
    let rho = spectral_radius(&CountMatrix::short_circuit(a));
    Ok(rho.log2().max(0.0))
}
