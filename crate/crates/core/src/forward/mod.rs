//! Forward model: the probability of correct identification of an
//! orthogonal signal in an m-ary channel,
//!
//! ```text
//! q = 1/√(2π) ∫ exp(-(z - x)²/2) F(z)^{m-1} dz,    x = (1 - δ) g √B,  g² = P_s / P_n.
//! ```
//!
//! The four continuous parameters enter only through the invariant `x`, so
//! the model reduces to the one-dimensional `Q_m(x)`.

mod hermite;
mod reference;
pub mod special;

pub use hermite::GaussHermite;
pub use reference::q_m_reference;
pub use special::{
    ln_std_normal_pdf, log_std_normal_cdf, std_normal_cdf, std_normal_pdf, std_normal_quantile,
};

use crate::error::{domain, Result};
use crate::scalar::{count, lit, Real};

/// Largest alphabet size accepted by the numerical routines.
pub const MAX_M: u64 = 1_000_000;

/// Physical parameters of the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    /// Relative cancel-interval thickness, `0 <= delta < 1`.
    pub delta: T,
    /// Averaged signal power.
    pub p_s: T,
    /// Averaged noise power, same units as `p_s`.
    pub p_n: T,
    /// Signal base (duration times spectrum width).
    pub base: T,
    /// Signal dimension / alphabet size.
    pub m: u64,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(delta: T, p_s: T, p_n: T, base: T, m: u64) -> Result<Self> {
        let params = Self { delta, p_s, p_n, base, m };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        check_positive("p_s", self.p_s)?;
        check_positive("p_n", self.p_n)?;
        check_positive("base", self.base)?;
        check_m(self.m)
    }
}

pub(crate) fn check_delta<T: Real>(delta: T) -> Result<()> {
    if delta >= T::zero() && delta < T::one() {
        Ok(())
    } else {
        Err(domain(format!("delta must satisfy 0 <= delta < 1, got {delta}")))
    }
}

pub(crate) fn check_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {v}")))
    }
}

pub(crate) fn check_m(m: u64) -> Result<()> {
    if (1..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(domain(format!("m must lie in [1, {MAX_M}], got {m}")))
    }
}

/// Controls for evaluating `Q_m` and its reference cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Gauss–Hermite node count of the primary method.
    pub gh_nodes: usize,
    /// Absolute tolerance of the adaptive reference quadrature.
    pub ref_abs_tol: T,
    /// Upper truncation of the reference integral, in noise standard
    /// deviations above the signal mean.
    pub ref_half_width: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            gh_nodes: 1024,
            ref_abs_tol: lit::<T>(1e-12).max(lit::<T>(1e3) * T::epsilon()),
            ref_half_width: lit(12.0),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.gh_nodes < 8 {
            return Err(domain(format!("gh_nodes must be >= 8, got {}", self.gh_nodes)));
        }
        if !(self.ref_abs_tol > T::zero()) {
            return Err(domain("ref_abs_tol must be positive"));
        }
        if !(self.ref_half_width >= lit(8.0)) || !self.ref_half_width.is_finite() {
            return Err(domain("ref_half_width must be finite and >= 8"));
        }
        Ok(())
    }
}

/// Amplitude signal-to-noise ratio `g = √(P_s / P_n)`.
pub fn snr_g<T: Real>(p_s: T, p_n: T) -> Result<T> {
    check_positive("p_s", p_s)?;
    check_positive("p_n", p_n)?;
    Ok((p_s / p_n).sqrt())
}

/// The invariant `x = (1 - δ) g √B` through which the continuous
/// parameters act.
pub fn invariant<T: Real>(params: &ChannelParams<T>) -> Result<T> {
    params.validate()?;
    Ok((T::one() - params.delta) * snr_g(params.p_s, params.p_n)? * params.base.sqrt())
}

fn check_args<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<()> {
    check_m(m)?;
    if !x.is_finite() {
        return Err(domain(format!("x must be finite, got {x}")));
    }
    cfg.validate()
}

/// `Q_m(x) = ∫ φ(u) F(u + x)^{m-1} du`, by Gauss–Hermite quadrature after
/// `u = √2 t`. The power is taken as `exp((m-1) ln F)` so large `m` cannot
/// underflow intermediate products.
pub fn q_m<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<T> {
    check_args(x, m, cfg)?;
    if m == 1 {
        return Ok(T::one());
    }
    let rule = GaussHermite::cached(cfg.gh_nodes)?;
    let k = count::<T>(m - 1);
    let sqrt2 = T::SQRT_2();
    let sum = rule.integrate(|t: T| (k * log_std_normal_cdf(sqrt2 * t + x)).exp());
    Ok((sum / T::PI().sqrt()).max(T::zero()).min(T::one()))
}

/// `Q_m` of a full parameter tuple.
pub fn q_params<T: Real>(params: &ChannelParams<T>, cfg: &QuadratureConfig<T>) -> Result<T> {
    q_m(invariant(params)?, params.m, cfg)
}

/// `Q′_m(x) = (m-1) ∫ φ(u) φ(u + x) F(u + x)^{m-2} du`.
pub fn dq_dx<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<T> {
    check_args(x, m, cfg)?;
    if m == 1 {
        return Ok(T::zero());
    }
    let rule = GaussHermite::cached(cfg.gh_nodes)?;
    let k = count::<T>(m - 2);
    let sqrt2 = T::SQRT_2();
    let sum = rule.integrate(|t: T| {
        let z = sqrt2 * t + x;
        (ln_std_normal_pdf(z) + k * log_std_normal_cdf(z)).exp()
    });
    Ok((count::<T>(m - 1) * sum / T::PI().sqrt()).max(T::zero()))
}
