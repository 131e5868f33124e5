//! Gauss–Hermite rules for the weight `exp(-t²)`.
//!
//! Nodes and weights come from the Golub–Welsch eigenproblem of the
//! Hermite Jacobi matrix, solved by implicit QL while tracking only the
//! first row of the eigenvector matrix. That keeps the build `O(n²)` and
//! avoids the overflow of three-term polynomial recurrences at large `n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Terms whose weight falls below this are dropped when integrating. The
/// integrands used in this crate are bounded, so their total contribution
/// stays far below double-precision resolution.
const WEIGHT_FLOOR: f64 = 1e-30;

/// An `n`-point Gauss–Hermite rule, stored in `f64`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Index range of the nodes whose weight exceeds `WEIGHT_FLOOR`.
    active: std::ops::Range<usize>,
}

impl GaussHermite {
    /// Builds the rule. Fails only if the QL iteration stalls.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::domain("Gauss-Hermite rule needs at least one node"));
        }
        let mut diag = vec![0.0; n];
        let mut off: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        off[n - 1] = 0.0;
        let mut first_row = vec![0.0; n];
        first_row[0] = 1.0;
        tridiagonal_ql(&mut diag, &mut off, &mut first_row)?;

        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = diag
            .into_iter()
            .zip(first_row)
            .map(|(t, v)| (t, sqrt_pi * v * v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

        let start = weights.iter().position(|&w| w >= WEIGHT_FLOOR).unwrap_or(0);
        let end = weights.iter().rposition(|&w| w >= WEIGHT_FLOOR).map_or(n, |i| i + 1);
        Ok(Self { nodes, weights, active: start..end })
    }

    /// Shared, lazily built rule for `n` nodes.
    pub fn cached(n: usize) -> Result<Arc<Self>> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let rules = RULES.get_or_init(Default::default);
        if let Some(rule) = rules.lock().expect("rule cache poisoned").get(&n) {
            return Ok(Arc::clone(rule));
        }
        // Built outside the lock; a concurrent duplicate build is harmless.
        let rule = Arc::new(Self::new(n)?);
        let mut guard = rules.lock().expect("rule cache poisoned");
        Ok(Arc::clone(guard.entry(n).or_insert(rule)))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ wᵢ f(tᵢ) ≈ ∫ exp(-t²) f(t) dt`.
    pub fn integrate<T: Real>(&self, mut f: impl FnMut(T) -> T) -> T {
        let range = self.active.clone();
        self.nodes[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .fold(T::zero(), |acc, (&t, &w)| acc + lit::<T>(w) * f(lit(t)))
    }
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal
/// matrix. `diag` receives the eigenvalues; `off[i]` couples rows `i` and
/// `i + 1` (the last entry is ignored); `row` is the first row of the
/// accumulated eigenvector matrix.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], row: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let n = diag.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Convergence { method: "Gauss-Hermite QL", budget: MAX_SWEEPS });
            }

            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                let z = row[i + 1];
                row[i + 1] = s * row[i] + c * z;
                row[i] = c * row[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}
