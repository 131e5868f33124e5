//! Seeded Monte Carlo simulation of the identification experiment.
//!
//! Trial `i` observes `x + Z₀` on the signal branch and `Z₁ … Z_{m-1}` on the
//! noise branches and succeeds when the signal branch is strictly the
//! largest. Every variate comes from ChaCha8 seeded with `seed` and set to
//! stream `i`, taking one 64-bit word per variate in branch order. The top
//! 53 bits `k` of a word give the uniform `U = (k + 1/2) 2⁻⁵³` and the normal
//! `Z = F⁻¹(U)`.
//!
//! A noise branch beats the signal iff `U_j >= F(x + Z₀)`, so competitors are
//! compared as integers `k_j` against one threshold per trial instead of
//! being transformed. A trial stops at its first losing comparison.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::forward::{check_m, invariant, std_normal_cdf, std_normal_quantile, ChannelParams};
use crate::scalar::{lit, to_f64, Real};

const UNIT_BITS: u32 = 53;
const UNIT_SCALE: f64 = (1u64 << UNIT_BITS) as f64;
/// Trials per parallel work item.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Result<Self> {
        let cfg = Self { n_samples, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(domain("n_samples must be >= 1"));
        }
        Ok(())
    }
}

/// Success fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub q_hat: T,
    pub std_err: T,
    pub n: u64,
}

/// Estimates `Q_m(x)` from `cfg.n_samples` simulated trials.
///
/// Trials run in parallel; each owns its stream, so the estimate does not
/// depend on the thread count.
pub fn simulate_q<T: Real>(x: T, m: u64, cfg: &McConfig) -> Result<McEstimate<T>> {
    check_m(m)?;
    cfg.validate()?;
    let shift = to_f64(x);
    if !shift.is_finite() {
        return Err(domain(format!("x must be finite, got {x}")));
    }
    let n = cfg.n_samples;
    let successes: u64 = if m == 1 {
        n
    } else {
        let root = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let end = ((c + 1) * CHUNK).min(n);
                (c * CHUNK..end).filter(|&i| trial(&root, i, shift, m - 1)).count() as u64
            })
            .sum()
    };
    let q = successes as f64 / n as f64;
    let se = (q * (1.0 - q) / n as f64).sqrt();
    Ok(McEstimate { q_hat: lit(q), std_err: lit(se), n })
}

/// `simulate_q` at the invariant of `params`.
pub fn simulate_q_params<T: Real>(params: &ChannelParams<T>, cfg: &McConfig) -> Result<McEstimate<T>> {
    simulate_q(invariant(params)?, params.m, cfg)
}

fn trial(root: &ChaCha8Rng, index: u64, x: f64, competitors: u64) -> bool {
    let mut rng = root.clone();
    rng.set_stream(index);
    let u0 = (top_bits(rng.next_u64()) as f64 + 0.5) / UNIT_SCALE;
    let z0 = std_normal_quantile(u0).expect("uniform lies strictly inside (0, 1)");
    // k + 1/2 < s  <=>  k < ceil(s - 1/2).
    let s = std_normal_cdf(x + z0) * UNIT_SCALE;
    let whole = s.floor();
    let threshold = if s - whole > 0.5 { whole as u64 + 1 } else { whole as u64 };
    if threshold >= 1u64 << UNIT_BITS {
        return true;
    }
    (0..competitors).all(|_| top_bits(rng.next_u64()) < threshold)
}

#[inline]
fn top_bits(word: u64) -> u64 {
    word >> (64 - UNIT_BITS)
}
