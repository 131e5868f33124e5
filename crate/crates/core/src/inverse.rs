//! Inverse problem: solve `Q_m(x) = q*` for the invariant, then map the
//! invariant back to whichever channel parameter is unknown.
//!
//! The sensitivity `|dx/dq*| = 1/Q′_m(x)` is reported with every recovery;
//! it is what makes the instability of the inversion near `q* ≈ 1` (and for
//! small `q*` at large `m`) measurable.

use crate::error::{domain, Error, Result};
use crate::forward::{check_delta, check_m, check_positive, dq_dx, q_m, snr_g, QuadratureConfig};
use crate::scalar::{count, lit, to_f64, Real};

/// Default physical search bracket for the invariant.
pub const DEFAULT_BRACKET: (f64, f64) = (0.0, 50.0);
/// Default iteration budget of the safeguarded Newton solver.
pub const DEFAULT_MAX_ITER: usize = 200;

/// A target probability to invert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseQuery<T> {
    pub q_star: T,
    pub m: u64,
    pub x_lo: T,
    pub x_hi: T,
    pub tol_x: T,
    pub max_iter: usize,
}

impl<T: Real> InverseQuery<T> {
    /// Query on the default bracket `[0, 50]`.
    pub fn new(q_star: T, m: u64) -> Self {
        Self {
            q_star,
            m,
            x_lo: lit(DEFAULT_BRACKET.0),
            x_hi: lit(DEFAULT_BRACKET.1),
            tol_x: default_tol_x(),
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_bracket(mut self, lo: T, hi: T) -> Self {
        self.x_lo = lo;
        self.x_hi = hi;
        self
    }

    pub fn with_tol(mut self, tol_x: T) -> Self {
        self.tol_x = tol_x;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.q_star)?;
        if self.m < 2 {
            return Err(domain(format!("inversion needs m >= 2, got {}", self.m)));
        }
        check_m(self.m)?;
        if !(self.x_lo.is_finite() && self.x_hi.is_finite() && self.x_lo < self.x_hi) {
            return Err(domain(format!("invalid bracket [{}, {}]", self.x_lo, self.x_hi)));
        }
        if !(self.tol_x > T::zero()) {
            return Err(domain("tol_x must be positive"));
        }
        Ok(())
    }
}

fn default_tol_x<T: Real>() -> T {
    lit::<T>(1e-12).max(lit::<T>(4.0) * T::epsilon())
}

fn check_probability<T: Real>(q: T) -> Result<()> {
    if q > T::zero() && q < T::one() {
        Ok(())
    } else {
        Err(domain(format!("q* must satisfy 0 < q* < 1, got {q}")))
    }
}

/// Outcome of recovering one parameter. `V` is `T` for the continuous
/// parameters and `u64` for the alphabet size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryResult<T, V = T> {
    pub x_star: T,
    pub value: V,
    /// `|dx/dq*|`; `+inf` when the slope underflows.
    pub condition_number: T,
    /// `|Q_m(x_star) - q*|`.
    pub residual: T,
}

/// `Q_m(0) = 1/m` exactly: with no signal every branch is equally likely to
/// win.
fn q_at<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<T> {
    if x == T::zero() {
        Ok(count::<T>(m).recip())
    } else {
        q_m(x, m, cfg)
    }
}

/// Solves `Q_m(x) = q*` for `x` inside the query bracket by Newton steps
/// kept inside a shrinking bisection bracket.
pub fn invert_q<T: Real>(query: &InverseQuery<T>, cfg: &QuadratureConfig<T>) -> Result<T> {
    query.validate()?;
    let InverseQuery { q_star, m, x_lo, x_hi, tol_x, max_iter } = *query;
    let q_lo = q_at(x_lo, m, cfg)?;
    let q_hi = q_at(x_hi, m, cfg)?;
    if q_star < q_lo || q_star > q_hi {
        return Err(Error::InfeasibleTarget {
            q_star: to_f64(q_star),
            q_lo: to_f64(q_lo),
            q_hi: to_f64(q_hi),
        });
    }
    if q_star == q_lo {
        return Ok(x_lo);
    }
    if q_star == q_hi {
        return Ok(x_hi);
    }

    let half = lit::<T>(0.5);
    let (mut a, mut b) = (x_lo, x_hi);
    let mut x = initial_guess(q_star, m);
    if !(x > a && x < b) {
        x = half * (a + b);
    }
    for _ in 0..max_iter {
        let f = q_m(x, m, cfg)? - q_star;
        if f == T::zero() {
            return Ok(x);
        }
        if f < T::zero() {
            a = x;
        } else {
            b = x;
        }
        let slope = dq_dx(x, m, cfg)?;
        let mut next = x - f / slope;
        if !(slope > T::zero()) || !(next > a && next < b) {
            next = half * (a + b);
        }
        if (next - x).abs() <= tol_x || b - a <= tol_x || next == a || next == b {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence { method: "safeguarded Newton", budget: max_iter })
}

/// Starting point from the Gaussian approximation
/// `Q_m(x) ≈ F((x - c_m)/√2)` with `c_m` the median of the largest of the
/// `m - 1` competing outputs.
fn initial_guess<T: Real>(q_star: T, m: u64) -> T {
    use crate::forward::std_normal_quantile;
    let median_max = lit::<T>(0.5).powf(count::<T>(m - 1).recip());
    let c = std_normal_quantile(median_max).unwrap_or(T::zero());
    let z = std_normal_quantile(q_star).unwrap_or(T::zero());
    c + T::SQRT_2() * z
}

/// First-order sensitivity `|dx/dq*| = 1/Q′_m(x)`; `+inf` flags a slope
/// that underflowed.
pub fn condition_number<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<T> {
    if m < 2 {
        return Err(domain(format!("condition number needs m >= 2, got {m}")));
    }
    let slope = dq_dx(x, m, cfg)?;
    Ok(if slope > T::zero() { slope.recip() } else { T::infinity() })
}

/// `invert_q` with its residual and condition number; `value` is `x_star`.
pub fn invert<T: Real>(query: &InverseQuery<T>, cfg: &QuadratureConfig<T>) -> Result<RecoveryResult<T>> {
    let x = invert_q(query, cfg)?;
    let residual = (q_at(x, query.m, cfg)? - query.q_star).abs();
    let condition_number = condition_number(x, query.m, cfg)?;
    Ok(RecoveryResult { x_star: x, value: x, condition_number, residual })
}

fn solve<T: Real>(q_star: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<(T, T, T, T)> {
    let query = InverseQuery::new(q_star, m);
    let r = invert(&query, cfg)?;
    Ok((r.x_star, r.residual, r.condition_number, query.tol_x))
}

/// Recovers `δ = 1 - x*/(g√B)`.
pub fn recover_delta<T: Real>(
    q_star: T,
    p_s: T,
    p_n: T,
    base: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RecoveryResult<T>> {
    check_positive("base", base)?;
    let scale = snr_g(p_s, p_n)? * base.sqrt();
    let (x, residual, cond, tol) = solve(q_star, m, cfg)?;
    let mut delta = T::one() - x / scale;
    // x* may overshoot g√B by solver tolerance when the true δ is 0.
    if delta < T::zero() && x - scale <= tol.max(lit::<T>(4.0) * T::epsilon() * scale) {
        delta = T::zero();
    }
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(Error::InfeasibleParameter { name: "delta", value: to_f64(delta) });
    }
    Ok(RecoveryResult { x_star: x, value: delta, condition_number: cond, residual })
}

/// `g = x*/((1-δ)√B)` for the power-type recoveries; zero invariant is
/// degenerate.
fn solve_g<T: Real>(
    name: &'static str,
    q_star: T,
    delta: T,
    base: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<(T, T, T, T)> {
    check_delta(delta)?;
    check_positive("base", base)?;
    let (x, residual, cond, _) = solve(q_star, m, cfg)?;
    if x == T::zero() {
        return Err(Error::DegenerateInvariant { name });
    }
    let g = x / ((T::one() - delta) * base.sqrt());
    Ok((x, g, residual, cond))
}

/// Recovers the signal power `P_s = g² P_n`.
pub fn recover_ps<T: Real>(
    q_star: T,
    delta: T,
    p_n: T,
    base: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RecoveryResult<T>> {
    check_positive("p_n", p_n)?;
    let (x, g, residual, cond) = solve_g("p_s", q_star, delta, base, m, cfg)?;
    Ok(RecoveryResult { x_star: x, value: g * g * p_n, condition_number: cond, residual })
}

/// Recovers the noise power `P_n = P_s / g²`.
pub fn recover_pn<T: Real>(
    q_star: T,
    delta: T,
    p_s: T,
    base: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RecoveryResult<T>> {
    check_positive("p_s", p_s)?;
    let (x, g, residual, cond) = solve_g("p_n", q_star, delta, base, m, cfg)?;
    Ok(RecoveryResult { x_star: x, value: p_s / (g * g), condition_number: cond, residual })
}

/// Recovers the signal base `B = (x*/((1-δ)g))²`.
pub fn recover_base<T: Real>(
    q_star: T,
    delta: T,
    p_s: T,
    p_n: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RecoveryResult<T>> {
    check_delta(delta)?;
    let g = snr_g(p_s, p_n)?;
    let (x, residual, cond, _) = solve(q_star, m, cfg)?;
    if x == T::zero() {
        return Err(Error::DegenerateInvariant { name: "base" });
    }
    let root = x / ((T::one() - delta) * g);
    Ok(RecoveryResult { x_star: x, value: root * root, condition_number: cond, residual })
}

/// Recovers the alphabet size at a known invariant `x`.
///
/// `Q_m(x)` strictly decreases in `m` for `x > 0`, so the best integer is
/// bracketed by binary search; the closer of the two neighbours wins, the
/// smaller on a tie. At `x = 0` the answer is the nearest `m` to `1/q*`.
pub fn recover_m<T: Real>(
    q_star: T,
    x: T,
    m_max: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<RecoveryResult<T, u64>> {
    check_probability(q_star)?;
    if m_max < 2 {
        return Err(domain(format!("m_max must be >= 2, got {m_max}")));
    }
    check_m(m_max)?;
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(domain(format!("recover_m needs a finite x >= 0, got {x}")));
    }

    let residual_at = |m: u64| -> Result<T> { Ok((q_at(x, m, cfg)? - q_star).abs()) };
    let best = if x == T::zero() {
        let ratio = q_star.recip().floor().to_u64().unwrap_or(u64::MAX);
        let lo = ratio.clamp(1, m_max);
        let hi = (lo + 1).min(m_max);
        pick(lo, hi, &residual_at)?
    } else if q_at(x, m_max, cfg)? >= q_star {
        m_max
    } else {
        // Invariant: Q(lo) >= q* > Q(hi).
        let (mut lo, mut hi) = (1u64, m_max);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if q_at(x, mid, cfg)? >= q_star {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        pick(lo, hi, &residual_at)?
    };

    let residual = residual_at(best)?;
    let condition_number = if best >= 2 { condition_number(x, best, cfg)? } else { T::infinity() };
    Ok(RecoveryResult { x_star: x, value: best, condition_number, residual })
}

fn pick<T: Real>(lo: u64, hi: u64, residual_at: &impl Fn(u64) -> Result<T>) -> Result<u64> {
    if lo == hi {
        return Ok(lo);
    }
    Ok(if residual_at(hi)? < residual_at(lo)? { hi } else { lo })
}
