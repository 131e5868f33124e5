//! Correct-identification probability of orthogonal signals in an m-ary
//! channel, the inverse problem of recovering one channel parameter from
//! an observed probability, and the tools that make that inversion
//! well-posed.
//!
//! All numerics are generic over [`Real`] (`f64` and `f32`); the aliases at
//! the crate root fix the scalar to `f64`.

// `!(v > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditioning;
pub mod error;
pub mod forward;
pub mod inverse;
pub mod mc;
pub mod scalar;

pub use conditioning::{
    check_condition5, is_well_posed, plan_factors, recovery_error_bound, tune, well_posed_interval,
    BlockingBound, FactorPlan, Param, ParamRange, TuningProblem, TuningResult, WellPosedInterval,
    DEFAULT_EPSILON,
};
pub use error::{Error, Result};
pub use forward::{
    dq_dx, invariant, q_m, q_m_reference, q_params, snr_g, std_normal_cdf, std_normal_quantile,
    ChannelParams, QuadratureConfig, MAX_M,
};
pub use inverse::{
    condition_number, invert, invert_q, recover_base, recover_delta, recover_m, recover_pn, recover_ps,
    InverseQuery, RecoveryResult,
};
pub use mc::{simulate_q, simulate_q_params, McConfig, McEstimate};
pub use scalar::Real;

pub type Params = ChannelParams<f64>;
pub type Quadrature = QuadratureConfig<f64>;
pub type Query = InverseQuery<f64>;
pub type Recovery = RecoveryResult<f64>;
pub type MRecovery = RecoveryResult<f64, u64>;
pub type Interval = WellPosedInterval<f64>;
pub type Range = ParamRange<f64>;
pub type Problem = TuningProblem<f64>;
pub type Tuning = TuningResult<f64>;
pub type Estimate = McEstimate<f64>;
