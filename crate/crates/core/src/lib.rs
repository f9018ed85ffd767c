//! Probabilistic saddle-point asymptotics for the power-series coefficients
//! of infinite products `f = ∏ f_k` with non-negative coefficients.
//!
//! At radius `t = e^{-r}` the coefficients define a law `P(X_t = n) = a_n t^n / f(t)`,
//! which for a product is the law of a sum of independent factor variables.
//! When the standardized sum is asymptotically normal the coefficients obey
//! `a_n ~ f(t_n) / (√(2π) σ(t_n) t_n^n)` with `m(t_n) = n`.
//!
//! Numeric code is generic over [`Real`] (`f32`/`f64`); exact coefficient
//! tables use arbitrary-precision integers and rationals. The `*64` aliases
//! below fix the scalar to `f64`.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod charfn;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod moments;
pub mod quadrature;
pub mod real;
pub mod saddle;
pub mod series_core;
pub mod summation;

pub use error::{Error, Result};
pub use real::Real;
pub use series_core::{
    brute_force_distinct, distinct_partition_count, distinct_partition_counts, expand_product,
    CoefficientTable, Coefficients, CustomFactors, FactorFamily, FamilyKind,
};

pub use asymptotics::{
    closed_form_q, estimate, estimate_equivalents, estimate_general, estimate_general_with, euler_maclaurin_logf, log_f,
    AsymptoticEstimate, EstimateComponents, EstimateMethod,
};
pub use charfn::{
    cramer_bound_check, cramer_grid_check, cramer_sharp_check, lemma_a_region_check, lemma_b_region_check,
    phi_z, strong_gaussian_integral, strong_gaussian_with, CharFn, CharFnSample, QuadRule, StrongGaussian,
};
pub use diagnostics::{clt_report, clt_report_at_n, product_limit_demo, taylor_remainder_check, CltReport, SequenceFamily};
pub use format::fmt_sig17;
pub use moments::{
    aggregate_moments, factor_law, gamma3_constant, m1, sigma1_sq, FactorLaw, Gamma3Constant, MomentSummary,
    RadialParam,
};
pub use saddle::{hypothesis1_gap, solve_saddle, tau_n, SaddleMethod, SaddleSolution};

pub type RadialParam64 = RadialParam<f64>;
pub type FactorLaw64 = FactorLaw<f64>;
pub type MomentSummary64 = MomentSummary<f64>;
pub type SaddleSolution64 = SaddleSolution<f64>;
pub type CharFn64 = CharFn<f64>;
pub type CharFnSample64 = CharFnSample<f64>;
pub type AsymptoticEstimate64 = AsymptoticEstimate<f64>;
pub type CltReport64 = CltReport<f64>;

pub type RadialParam32 = RadialParam<f32>;
pub type MomentSummary32 = MomentSummary<f32>;
pub type CharFn32 = CharFn<f32>;
