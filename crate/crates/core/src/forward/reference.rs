//! Independent evaluation of `Q_m(x)` by adaptive Simpson quadrature in the
//! original variable `z`, used to cross-check the Gauss–Hermite path.

use super::special::{ln_std_normal_pdf, log_std_normal_cdf};
use super::{check_args, QuadratureConfig};
use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Nats below the peak at which the lower end of the integrand is cut.
const LOG_CUTOFF: f64 = 750.0;
const INITIAL_PANELS: usize = 64;
const MAX_DEPTH: u32 = 40;
const MAX_EVALS: usize = 8_000_000;

/// `Q_m(x)` by adaptive Simpson on `[z_lo, x + ref_half_width]`, where `z_lo`
/// is where the (concave) log-integrand has fallen 750 nats below its peak.
pub fn q_m_reference<T: Real>(x: T, m: u64, cfg: &QuadratureConfig<T>) -> Result<T> {
    check_args(x, m, cfg)?;
    if m == 1 {
        return Ok(T::one());
    }
    let k = count::<T>(m - 1);
    let log_integrand = |z: T| ln_std_normal_pdf(z - x) + k * log_std_normal_cdf(z);
    let log_slope = |z: T| x - z + k * (ln_std_normal_pdf(z) - log_std_normal_cdf(z)).exp();

    let hi = x + cfg.ref_half_width;
    // The log-slope is decreasing and non-negative at z = x.
    let peak = if log_slope(hi) >= T::zero() {
        hi
    } else {
        let (mut l, mut r) = (x, hi);
        for _ in 0..200 {
            let mid = lit::<T>(0.5) * (l + r);
            if mid <= l || mid >= r {
                break;
            }
            if log_slope(mid) >= T::zero() {
                l = mid;
            } else {
                r = mid;
            }
        }
        l
    };

    let floor = log_integrand(peak) - lit(LOG_CUTOFF);
    let mut reach = T::one();
    let mut below = peak - reach;
    while log_integrand(below) > floor {
        reach = reach + reach;
        below = peak - reach;
    }
    let (mut l, mut r) = (below, peak);
    for _ in 0..200 {
        let mid = lit::<T>(0.5) * (l + r);
        if mid <= l || mid >= r {
            break;
        }
        if log_integrand(mid) <= floor {
            l = mid;
        } else {
            r = mid;
        }
    }

    let q = adaptive_simpson(|z| log_integrand(z).exp(), l, hi, cfg.ref_abs_tol)?;
    Ok(q.max(T::zero()).min(T::one()))
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

/// Adaptive Simpson with Richardson correction. The absolute tolerance is
/// split across panels in proportion to their width.
pub(crate) fn adaptive_simpson<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    abs_tol: T,
) -> Result<T> {
    let half = lit::<T>(0.5);
    let width = (b - a) / count(INITIAL_PANELS as u64);
    let panel_tol = abs_tol / count(INITIAL_PANELS as u64);
    let mut stack = Vec::with_capacity(2 * INITIAL_PANELS);
    let mut evals = 0usize;
    for i in (0..INITIAL_PANELS).rev() {
        let pa = a + width * count(i as u64);
        let pb = if i + 1 == INITIAL_PANELS { b } else { pa + width };
        let (fa, fm, fb) = (f(pa), f(half * (pa + pb)), f(pb));
        evals += 3;
        let whole = simpson(pa, pb, fa, fm, fb);
        stack.push(Panel { a: pa, b: pb, fa, fm, fb, whole, tol: panel_tol, depth: 0 });
    }

    let mut total = T::zero();
    let mut compensation = T::zero();
    let eps_floor = lit::<T>(64.0) * T::epsilon();
    while let Some(p) = stack.pop() {
        let mid = half * (p.a + p.b);
        let flm = f(half * (p.a + mid));
        let frm = f(half * (mid + p.b));
        evals += 2;
        let left = simpson(p.a, mid, p.fa, flm, p.fm);
        let right = simpson(mid, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= lit::<T>(15.0) * p.tol || delta.abs() <= eps_floor * (left.abs() + right.abs()) {
            // Neumaier summation keeps the sum of many small panels exact
            // enough for a 1e-12 tolerance.
            let term = left + right + delta / lit(15.0);
            let t = total + term;
            compensation = compensation
                + if total.abs() >= term.abs() { (total - t) + term } else { (term - t) + total };
            total = t;
            continue;
        }
        if p.depth >= MAX_DEPTH || evals > MAX_EVALS {
            return Err(Error::Convergence { method: "adaptive Simpson", budget: MAX_EVALS });
        }
        let tol = p.tol * half;
        let depth = p.depth + 1;
        stack.push(Panel { a: mid, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
        stack.push(Panel { a: p.a, b: mid, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
    }
    Ok(total + compensation)
}
