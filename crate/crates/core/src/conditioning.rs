//! Well-posedness of the inverse problem and the "tuning" that restores it.
//!
//! The inversion of `Q_m` is declared well-posed where the slope
//! `Q′_m(x) >= ε`. The set of such `x >= 0` is the interval `[a_m, b_m]`
//! around the slope peak. Because the invariant factors as
//!
//! ```text
//! x = (1 - δ) · √P_s · (1/√P_n) · √B,
//! ```
//!
//! the adjustable parameters can be chosen so that `x` stays inside
//! `[a_m, b_m]` for every admissible value of the unknown one.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::forward::{check_delta, check_m, check_positive, dq_dx, invariant, ChannelParams, QuadratureConfig};
use crate::scalar::{count, lit, to_f64, Real};

/// Default slope threshold.
pub const DEFAULT_EPSILON: f64 = 0.03;

/// Certification grid for the unimodality of `Q′_m` on `x >= 0`.
const GRID_END: f64 = 16.0;
const GRID_POINTS: u64 = 161;
/// Search span above the peak for the upper endpoint.
const UPPER_SPAN: f64 = 20.0;
const ROOT_TOL: f64 = 1e-9;
/// Relative margin kept from the window edges so that rounding in the
/// back-mapped parameters cannot push the invariant outside `[a_m, b_m]`.
const EDGE_MARGIN: f64 = 1e-12;

/// Interval of invariants on which `Q′_m(x) >= epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellPosedInterval<T> {
    pub m: u64,
    pub epsilon: T,
    pub a: T,
    pub b: T,
    /// Location of the slope maximum on `x >= 0`.
    pub peak_x: T,
    pub peak_slope: T,
}

impl<T: Real> WellPosedInterval<T> {
    pub fn contains(&self, x: T) -> bool {
        check_condition5(x, self)
    }
}

/// Computes `[a_m, b_m]` for the slope threshold `epsilon`.
///
/// The slope is first sampled on a grid over `[0, 16]`, which both
/// certifies that it is unimodal and brackets the peak for a
/// golden-section refinement. Endpoints are found by bisection and the
/// inner end of the final bracket is returned, so `Q′_m >= epsilon` holds on
/// the whole closed interval.
pub fn well_posed_interval<T: Real>(
    m: u64,
    epsilon: T,
    cfg: &QuadratureConfig<T>,
) -> Result<WellPosedInterval<T>> {
    if m < 2 {
        return Err(domain(format!("no inverse problem for m = {m}: Q_1 is identically 1")));
    }
    check_m(m)?;
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(domain(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    let slope = |x: T| dq_dx(x, m, cfg);

    let step = lit::<T>(GRID_END) / count(GRID_POINTS - 1);
    let grid: Vec<T> = (0..GRID_POINTS).map(|i| step * count(i)).collect();
    let values = grid.iter().map(|&x| slope(x)).collect::<Result<Vec<T>>>()?;
    let top = (0..values.len())
        .fold(0, |best, i| if values[i] > values[best] { i } else { best });
    let noise = lit::<T>(1e-12).max(lit::<T>(64.0) * T::epsilon() * values[top]);
    let rising = values[..=top].windows(2).all(|w| w[1] >= w[0] - noise);
    let falling = values[top..].windows(2).all(|w| w[1] <= w[0] + noise);
    if !(rising && falling) {
        return Err(Error::NotUnimodal { m });
    }

    let lo = if top == 0 { T::zero() } else { grid[top - 1] };
    let hi = grid[(top + 1).min(grid.len() - 1)];
    let peak_x = golden_section_max(&slope, lo, hi)?;
    let peak_slope = slope(peak_x)?;
    if epsilon > peak_slope {
        return Err(Error::ThresholdTooHigh {
            m,
            epsilon: to_f64(epsilon),
            peak_slope: to_f64(peak_slope),
        });
    }

    let above = |x: T| -> Result<bool> { Ok(slope(x)? >= epsilon) };
    let a = if above(T::zero())? {
        T::zero()
    } else {
        // below at 0, above at the peak; keep the end that is above.
        bisect(&above, T::zero(), peak_x)?.1
    };
    let far = peak_x + lit(UPPER_SPAN);
    if above(far)? {
        return Err(domain(format!("epsilon = {epsilon} too small to bound the interval")));
    }
    let b = bisect(&above, peak_x, far)?.0;
    Ok(WellPosedInterval { m, epsilon, a, b, peak_x, peak_slope })
}

/// Bisects a predicate that flips between `lo` and `hi`. Returns the final
/// `(lower, upper)` bracket.
fn bisect<T: Real>(pred: &impl Fn(T) -> Result<bool>, lo: T, hi: T) -> Result<(T, T)> {
    let at_lo = pred(lo)?;
    let (mut l, mut r) = (lo, hi);
    let half = lit::<T>(0.5);
    while r - l > lit(ROOT_TOL) {
        let mid = half * (l + r);
        if mid <= l || mid >= r {
            break;
        }
        if pred(mid)? == at_lo {
            l = mid;
        } else {
            r = mid;
        }
    }
    Ok((l, r))
}

fn golden_section_max<T: Real>(f: &impl Fn(T) -> Result<T>, lo: T, hi: T) -> Result<T> {
    let inv_phi = lit::<T>(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > lit(ROOT_TOL) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let mid = lit::<T>(0.5) * (a + b);
    // A boundary peak (m = 2 peaks at x = 0) is returned exactly.
    if lo == T::zero() {
        let at_mid = f(mid)?;
        if f(T::zero())? >= at_mid - lit::<T>(64.0) * T::epsilon() * at_mid {
            return Ok(T::zero());
        }
    }
    Ok(mid)
}

/// `a_m <= x <= b_m` (closed endpoints).
pub fn check_condition5<T: Real>(x: T, interval: &WellPosedInterval<T>) -> bool {
    interval.a <= x && x <= interval.b
}

/// Whether the invariant of `params` lies in the well-posed interval.
pub fn is_well_posed<T: Real>(
    params: &ChannelParams<T>,
    epsilon: T,
    cfg: &QuadratureConfig<T>,
) -> Result<bool> {
    let x = invariant(params)?;
    let interval = well_posed_interval(params.m, epsilon, cfg)?;
    Ok(check_condition5(x, &interval))
}

/// First-order bound on the invariant error caused by an error `q_error`
/// in the observed probability: `q_error / Q′_m(x)`, `+inf` on underflow.
pub fn recovery_error_bound<T: Real>(
    q_error: T,
    x: T,
    m: u64,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if !(q_error > T::zero()) || !q_error.is_finite() {
        return Err(domain(format!("q_error must be positive, got {q_error}")));
    }
    if m < 2 {
        return Err(domain(format!("error bound needs m >= 2, got {m}")));
    }
    let slope = dq_dx(x, m, cfg)?;
    Ok(if slope > T::zero() { q_error / slope } else { T::infinity() })
}

/// A continuous channel parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Delta,
    Ps,
    Pn,
    Base,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Delta, Param::Ps, Param::Pn, Param::Base];

    pub fn name(self) -> &'static str {
        match self {
            Param::Delta => "delta",
            Param::Ps => "ps",
            Param::Pn => "pn",
            Param::Base => "base",
        }
    }

    /// Multiplicative contribution of this parameter to the invariant.
    pub fn factor<T: Real>(self, v: T) -> T {
        match self {
            Param::Delta => T::one() - v,
            Param::Ps | Param::Base => v.sqrt(),
            Param::Pn => v.sqrt().recip(),
        }
    }

    /// Parameter value that produces the factor `f`.
    pub fn from_factor<T: Real>(self, f: T) -> T {
        match self {
            Param::Delta => T::one() - f,
            Param::Ps | Param::Base => f * f,
            Param::Pn => (f * f).recip(),
        }
    }

    pub fn validate<T: Real>(self, v: T) -> Result<()> {
        match self {
            Param::Delta => check_delta(v),
            p => check_positive(p.name(), v),
        }
    }

    /// Factor interval swept by a parameter range. Every factor is
    /// monotone, so the endpoints suffice.
    pub fn factor_range<T: Real>(self, r: &ParamRange<T>) -> (T, T) {
        let (f0, f1) = (self.factor(r.lo), self.factor(r.hi));
        (f0.min(f1), f0.max(f1))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(Param::Delta),
            "ps" => Ok(Param::Ps),
            "pn" => Ok(Param::Pn),
            "base" => Ok(Param::Base),
            other => Err(domain(format!("unknown parameter '{other}'"))),
        }
    }
}

/// Closed range `[lo, hi]` of a parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ParamRange<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    fn validate(&self, p: Param) -> Result<()> {
        p.validate(self.lo)?;
        p.validate(self.hi)?;
        if self.lo > self.hi {
            return Err(domain(format!("{p} range [{}, {}] is reversed", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// Which side of the interval cannot be reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockingBound {
    /// `a_m / u_min > b_m / u_max`: the unknown's range is too wide for the
    /// interval whatever the settings.
    EmptyWindow,
    /// The invariant cannot be raised to `a_m`.
    Lower,
    /// The invariant cannot be lowered to `b_m`.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningProblem<T> {
    pub m: u64,
    pub unknown: (Param, ParamRange<T>),
    /// Parameters the operator may set, each within its range.
    pub adjustables: Vec<(Param, ParamRange<T>)>,
    pub fixed: Vec<(Param, T)>,
    pub epsilon: T,
}

impl<T: Real> TuningProblem<T> {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(domain("tuning needs m >= 2"));
        }
        check_m(self.m)?;
        let mut seen = Vec::with_capacity(4);
        let mut mark = |p: Param| -> Result<()> {
            if seen.contains(&p) {
                return Err(domain(format!("parameter {p} appears more than once")));
            }
            seen.push(p);
            Ok(())
        };
        mark(self.unknown.0)?;
        self.unknown.1.validate(self.unknown.0)?;
        for (p, r) in &self.adjustables {
            mark(*p)?;
            r.validate(*p)?;
        }
        for (p, v) in &self.fixed {
            mark(*p)?;
            p.validate(*v)?;
        }
        if let Some(missing) = Param::ALL.iter().find(|p| !seen.contains(p)) {
            return Err(domain(format!("parameter {missing} is neither unknown, adjustable nor fixed")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult<T> {
    pub feasible: bool,
    /// Chosen value per adjustable, in declaration order; empty if
    /// infeasible.
    pub settings: Vec<(Param, T)>,
    /// Invariant range swept by the unknown under the chosen settings.
    pub x_range: Option<(T, T)>,
    pub interval: WellPosedInterval<T>,
    pub blocking: Option<BlockingBound>,
}

/// Outcome of the factor-space planning step.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPlan<T> {
    pub feasible: bool,
    pub blocking: Option<BlockingBound>,
    /// Chosen product of the non-unknown factors.
    pub target: Option<T>,
    /// Natural log of each adjustable factor.
    pub log_factors: Vec<T>,
}

/// Plans the adjustable factors.
///
/// `unknown` is the factor interval `[u_min, u_max]` of the unknown,
/// `fixed` the product of fixed factors and `adjustables` the factor
/// interval of each adjustable. Keeping `x` in `[a, b]` for every unknown
/// value means the product `c` of all other factors lies in
/// `[a/u_min, b/u_max]` (no lower bound when `a = 0`). The largest
/// attainable `c` in that window is chosen and spread over the adjustables
/// by one shared interpolation parameter in log space.
pub fn plan_factors<T: Real>(a: T, b: T, unknown: (T, T), fixed: T, adjustables: &[(T, T)]) -> FactorPlan<T> {
    let (u_min, u_max) = unknown;
    let w_lo = if a > T::zero() { a / u_min } else { T::zero() };
    let w_hi = b / u_max;
    let c_min = adjustables.iter().fold(fixed, |acc, r| acc * r.0);
    let c_max = adjustables.iter().fold(fixed, |acc, r| acc * r.1);

    let lower = w_lo.max(c_min);
    let upper = w_hi.min(c_max);
    if lower > upper {
        let blocking = if w_lo > w_hi {
            BlockingBound::EmptyWindow
        } else if c_max < w_lo {
            BlockingBound::Lower
        } else {
            BlockingBound::Upper
        };
        return FactorPlan { feasible: false, blocking: Some(blocking), target: None, log_factors: Vec::new() };
    }

    let margin = lit::<T>(EDGE_MARGIN);
    let inner_lower = (w_lo * (T::one() + margin)).max(c_min).min(upper);
    let target = (w_hi * (T::one() - margin)).min(c_max).max(inner_lower);

    let logs: Vec<(T, T)> = adjustables.iter().map(|&(lo, hi)| (lo.ln(), hi.ln())).collect();
    let base: T = logs.iter().fold(T::zero(), |acc, r| acc + r.0);
    let span: T = logs.iter().fold(T::zero(), |acc, r| acc + (r.1 - r.0));
    let needed = target.ln() - fixed.ln();
    let t = if span > T::zero() {
        ((needed - base) / span).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let log_factors = logs.iter().map(|&(lo, hi)| lo + t * (hi - lo)).collect();
    FactorPlan { feasible: true, blocking: None, target: Some(target), log_factors }
}

/// Chooses adjustable settings so that the invariant stays in the
/// well-posed interval for every admissible value of the unknown, preferring the largest such invariant.
pub fn tune<T: Real>(problem: &TuningProblem<T>, cfg: &QuadratureConfig<T>) -> Result<TuningResult<T>> {
    problem.validate()?;
    let interval = well_posed_interval(problem.m, problem.epsilon, cfg)?;
    let (unknown, unknown_range) = problem.unknown;
    let u = unknown.factor_range(&unknown_range);
    let fixed = problem.fixed.iter().fold(T::one(), |acc, &(p, v)| acc * p.factor(v));
    let ranges: Vec<(T, T)> = problem.adjustables.iter().map(|(p, r)| p.factor_range(r)).collect();

    let plan = plan_factors(interval.a, interval.b, u, fixed, &ranges);
    if !plan.feasible {
        return Ok(TuningResult {
            feasible: false,
            settings: Vec::new(),
            x_range: None,
            interval,
            blocking: plan.blocking,
        });
    }

    let settings: Vec<(Param, T)> = problem
        .adjustables
        .iter()
        .zip(&plan.log_factors)
        .map(|(&(p, r), &lf)| (p, p.from_factor(lf.exp()).max(r.lo).min(r.hi)))
        .collect();
    let c = settings.iter().fold(fixed, |acc, &(p, v)| acc * p.factor(v));
    Ok(TuningResult {
        feasible: true,
        settings,
        x_range: Some((c * u.0, c * u.1)),
        interval,
        blocking: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    /// Closed form for m = 2: Q′_2(x) = φ(x/√2)/√2 = ε  ⇒  x = √2·√(-2 ln(√(2π)·√2·ε)).
    fn b2_closed_form(eps: f64) -> f64 {
        let s = (2.0 * std::f64::consts::PI).sqrt() * std::f64::consts::SQRT_2 * eps;
        std::f64::consts::SQRT_2 * (-2.0 * s.ln()).sqrt()
    }

    #[test]
    fn interval_m2_matches_closed_form() {
        let iv = well_posed_interval(2, 0.03, &cfg()).unwrap();
        assert_eq!(iv.a, 0.0);
        assert!((iv.b - 2.994).abs() <= 0.01);
        assert!((iv.b - b2_closed_form(0.03)).abs() <= 1e-8, "{}", iv.b);
        assert_eq!(iv.peak_x, 0.0);
        assert!((iv.peak_slope - 0.282_094_791_773_878_14).abs() < 1e-12);
    }

    #[test]
    fn interval_threshold_too_high() {
        let err = well_posed_interval(2, 0.29, &cfg()).unwrap_err();
        assert!(matches!(err, Error::ThresholdTooHigh { m: 2, .. }));
    }

    #[test]
    fn interval_large_m_has_positive_lower_end() {
        let iv = well_posed_interval(100, 0.03, &cfg()).unwrap();
        assert!(iv.a > 0.0);
        assert!(dq_dx(iv.a, 100, &cfg()).unwrap() >= 0.03);
        assert!(dq_dx(iv.a - 1e-3, 100, &cfg()).unwrap() < 0.03);
    }

    #[test]
    fn interval_domain_errors() {
        assert!(well_posed_interval(1, 0.03, &cfg()).is_err());
        assert!(well_posed_interval(2, 0.0, &cfg()).is_err());
        assert!(well_posed_interval(2, -1.0, &cfg()).is_err());
        let err = well_posed_interval(2, 1e-300, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn interval_membership_examples() {
        let iv = WellPosedInterval { m: 2, epsilon: 0.03, a: 0.0, b: 2.994, peak_x: 0.0, peak_slope: 0.28 };
        assert!(check_condition5(2.0, &iv));
        assert!(!check_condition5(3.5, &iv));
        assert!(check_condition5(iv.a, &iv));
        assert!(check_condition5(iv.b, &iv));
    }

    #[test]
    fn well_posed_examples() {
        let p = ChannelParams::new(0.5, 4.0, 1.0, 4.0, 2).unwrap();
        assert!(is_well_posed(&p, 0.03, &cfg()).unwrap());
        let p = ChannelParams::new(0.0, 4.0, 1.0, 4.0, 2).unwrap();
        assert!(!is_well_posed(&p, 0.03, &cfg()).unwrap());
        let p = ChannelParams::new(0.0, 4.0, 1.0, 4.0, 1).unwrap();
        assert!(matches!(is_well_posed(&p, 0.03, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn error_bound_examples() {
        let e = recovery_error_bound(0.003, 0.0, 2, &cfg()).unwrap();
        assert!((e - 0.010_634_723_105_433_1).abs() < 1e-9);
        assert!(recovery_error_bound(0.003, 8.0, 2, &cfg()).unwrap() > 10.0);
        let iv = well_posed_interval(8, 0.03, &cfg()).unwrap();
        for i in 0..=20 {
            let x = iv.a + (iv.b - iv.a) * i as f64 / 20.0;
            assert!(recovery_error_bound(0.003, x, 8, &cfg()).unwrap() <= 0.1 + 1e-12);
        }
        assert!(recovery_error_bound(0.0, 1.0, 2, &cfg()).is_err());
    }

    fn problem(m: u64, unknown: (Param, f64, f64), adjust: &[(Param, f64, f64)], fixed: &[(Param, f64)]) -> TuningProblem<f64> {
        TuningProblem {
            m,
            unknown: (unknown.0, ParamRange::new(unknown.1, unknown.2)),
            adjustables: adjust.iter().map(|&(p, lo, hi)| (p, ParamRange::new(lo, hi))).collect(),
            fixed: fixed.to_vec(),
            epsilon: 0.03,
        }
    }

    #[test]
    fn tune_m2_base() {
        let pr = problem(2, (Param::Delta, 0.0, 0.5), &[(Param::Base, 1.0, 64.0)], &[(Param::Ps, 1.0), (Param::Pn, 1.0)]);
        let r = tune(&pr, &cfg()).unwrap();
        assert!(r.feasible);
        let b = r.settings[0].1;
        let b_m = b2_closed_form(0.03);
        assert!((b - b_m * b_m).abs() < 1e-6, "B = {b}");
        assert!((b - 8.96).abs() < 0.01);
        let (lo, hi) = r.x_range.unwrap();
        assert!((lo - 0.5 * b_m).abs() < 1e-8 && (hi - b_m).abs() < 1e-8);
        assert!(r.interval.a <= lo && hi <= r.interval.b);
    }

    #[test]
    fn tune_reports_blocking_bound() {
        // δ up to 0.99 needs a window [a/0.01, b/1], empty once a_100 > 0.
        let pr = problem(100, (Param::Delta, 0.0, 0.99), &[(Param::Base, 1.0, 64.0)], &[(Param::Ps, 1.0), (Param::Pn, 1.0)]);
        let r = tune(&pr, &cfg()).unwrap();
        assert!(!r.feasible);
        assert!(r.settings.is_empty());
        assert_eq!(r.blocking, Some(BlockingBound::EmptyWindow));

        // Tiny base cannot lift the invariant to a_100.
        let pr = problem(100, (Param::Delta, 0.0, 0.5), &[(Param::Base, 0.001, 0.002)], &[(Param::Ps, 1.0), (Param::Pn, 1.0)]);
        assert_eq!(tune(&pr, &cfg()).unwrap().blocking, Some(BlockingBound::Lower));

        // Huge fixed power overshoots b_m.
        let pr = problem(2, (Param::Delta, 0.0, 0.5), &[(Param::Base, 1.0, 2.0)], &[(Param::Ps, 100.0), (Param::Pn, 1.0)]);
        assert_eq!(tune(&pr, &cfg()).unwrap().blocking, Some(BlockingBound::Upper));
    }

    #[test]
    fn tune_degenerate_unknown() {
        let pr = problem(2, (Param::Base, 4.0, 4.0), &[(Param::Ps, 0.01, 100.0)], &[(Param::Delta, 0.0), (Param::Pn, 1.0)]);
        let r = tune(&pr, &cfg()).unwrap();
        assert!(r.feasible);
        let (lo, hi) = r.x_range.unwrap();
        assert_eq!(lo, hi);
        assert!(check_condition5(lo, &r.interval));
    }

    #[test]
    fn tune_rejects_bad_partition() {
        let dup = problem(2, (Param::Delta, 0.0, 0.5), &[(Param::Base, 1.0, 4.0)], &[(Param::Base, 1.0), (Param::Pn, 1.0)]);
        assert!(matches!(tune(&dup, &cfg()), Err(Error::Domain(_))));
        let missing = problem(2, (Param::Delta, 0.0, 0.5), &[(Param::Base, 1.0, 4.0)], &[(Param::Pn, 1.0)]);
        assert!(tune(&missing, &cfg()).is_err());
        let reversed = problem(2, (Param::Delta, 0.5, 0.0), &[(Param::Base, 1.0, 4.0)], &[(Param::Ps, 1.0), (Param::Pn, 1.0)]);
        assert!(tune(&reversed, &cfg()).is_err());
    }

    #[test]
    fn allocation_is_scale_consistent() {
        let adj = [(0.5, 2.0), (1.0, 8.0)];
        let base = plan_factors(0.2f64, 3.0, (0.5, 1.0), 1.5, &adj);
        for k in [2.0f64, 0.25, 3.7] {
            let scaled = plan_factors(0.2 * k, 3.0 * k, (0.5, 1.0), 1.5 * k, &adj);
            assert_eq!(scaled.feasible, base.feasible);
            for (a, b) in base.log_factors.iter().zip(&scaled.log_factors) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "k = {k}");
            }
        }
    }

    #[test]
    fn allocation_is_order_independent() {
        let a = plan_factors(0.0, 3.0, (0.5, 1.0), 1.0, &[(0.5, 2.0), (1.0, 8.0)]);
        let b = plan_factors(0.0, 3.0, (0.5, 1.0), 1.0, &[(1.0, 8.0), (0.5, 2.0)]);
        assert_eq!(a.log_factors[0], b.log_factors[1]);
        assert_eq!(a.log_factors[1], b.log_factors[0]);
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
            let v = 0.3f64;
            assert!((p.from_factor(p.factor(v)) - v).abs() < 1e-15);
        }
        assert!("gamma".parse::<Param>().is_err());
    }
}
