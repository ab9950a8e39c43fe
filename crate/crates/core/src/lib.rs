//! Two-sample location testing based on the cross-variance statistic.
//!
//! The crate provides the statistics themselves ([`stats`]), the exact null
//! distribution of the equal-variance statistic T* ([`tstar`]), the general
//! known-variance distribution of T ([`general`]), user-facing tests
//! ([`hypothesis`]), Monte Carlo power and size studies ([`simulation`]), the
//! bundled example datasets ([`datasets`]) and report rendering ([`report`]).
//!
//! ```
//! use crossvar::{crossvar_test, pooled_t_test, Alpha, NPolicy, Sample};
//!
//! let x = Sample::new(vec![5.0, 7.0, 5.0, 3.0, 5.0, 3.0, 3.0, 9.0]).unwrap();
//! let y = Sample::new(vec![8.0, 1.0, 4.0, 6.0, 6.0, 4.0, 1.0, 2.0]).unwrap();
//! let alpha = Alpha::new(0.01).unwrap();
//! let c = crossvar_test(&x, &y, alpha, NPolicy::Max).unwrap();
//! let t = pooled_t_test(&x, &y, alpha).unwrap();
//! assert!((c.p_value - t.p_value).abs() < 1e-12);
//! ```

pub mod datasets;
pub mod error;
pub mod general;
pub mod hypothesis;
pub mod quadrature;
pub mod report;
pub mod simulation;
pub mod special;
pub mod stats;
pub mod tstar;

pub use error::{Error, Result};
pub use general::{
    general_cdf_quadrature, general_cdf_series, general_pdf_quadrature, general_pdf_series, joint_pdf_z1z2, sample_t,
    GeneralModel, SeriesCaps, SeriesOutcome, SeriesVariant,
};
pub use hypothesis::{crossvar_test, f_variance_test, pooled_t_test, Alpha, Decision, Method, TestResult};
pub use simulation::{
    empirical_quantile, make_normal_generator, run_power_study, run_type1_study, ErrorRateTable, PowerCurve,
    QuantileMode, StudyConfig,
};
pub use special::{beta_fn, f_cdf, gen_binom, log_gamma, reg_inc_beta, student_t_cdf};
pub use stats::{cross_variance, statistic_j, statistic_t, statistic_tstar, summarize, NPolicy, Sample};
pub use tstar::{tstar_cdf, tstar_cdf_series, tstar_pdf, tstar_quantile, SeriesControl, TstarModel};
