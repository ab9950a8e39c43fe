//! The cross-variance test, the pooled two-sample t-test and the F-test of
//! equal variances, all reporting a common [`TestResult`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{f_cdf, student_t_two_sided_p};
use crate::stats::{tstar_from_moments, NPolicy, Sample};
use crate::tstar::{tstar_cdf, TstarModel};

/// A significance level strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Alpha::new(alpha)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Crossvar,
    PooledT,
    FVariance,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Crossvar => "CROSSVAR",
            Method::PooledT => "POOLED_T",
            Method::FVariance => "F_VARIANCE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Reject,
    Accept,
}

impl Decision {
    /// Strict rule: a p-value equal to α is not significant.
    pub fn from_p(p_value: f64, alpha: Alpha) -> Self {
        if p_value < alpha.get() {
            Decision::Reject
        } else {
            Decision::Accept
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Reject => "REJECT",
            Decision::Accept => "ACCEPT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreesOfFreedom {
    Single(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub df: DegreesOfFreedom,
    pub p_value: f64,
    pub alpha: Alpha,
    pub decision: Decision,
    /// Set for the cross-variance test when the group sizes differ.
    pub n_policy_used: Option<NPolicy>,
    /// Group size fed to the T* distribution (cross-variance test only).
    pub effective_n: Option<f64>,
}

impl TestResult {
    fn new(method: Method, statistic: f64, df: DegreesOfFreedom, p_value: f64, alpha: Alpha) -> Self {
        Self {
            method,
            statistic,
            df,
            p_value,
            alpha,
            decision: Decision::from_p(p_value, alpha),
            n_policy_used: None,
            effective_n: None,
        }
    }
}

/// Reject equal means when F_{T*}(T*) < α. The T* distribution uses the group
/// size chosen by `policy`; with equal sizes the policy has no effect.
pub fn crossvar_test(x: &Sample, y: &Sample, alpha: Alpha, policy: NPolicy) -> Result<TestResult> {
    let (mx, my) = (x.moments(), y.moments());
    if mx.variance + my.variance == 0.0 {
        return Err(Error::Degenerate("both samples are constant".into()));
    }
    let n = policy.effective_n(x.len(), y.len());
    let tstar = tstar_from_moments(mx, my, n)?;
    let model = TstarModel::new(n)?;
    let p = tstar_cdf(tstar, &model)?;
    let mut r = TestResult::new(Method::Crossvar, tstar, DegreesOfFreedom::Single(model.df()), p, alpha);
    r.effective_n = Some(n);
    if x.len() != y.len() {
        r.n_policy_used = Some(policy);
    }
    Ok(r)
}

/// Classical two-sided t-test with the df-weighted pooled variance.
pub fn pooled_t_test(x: &Sample, y: &Sample, alpha: Alpha) -> Result<TestResult> {
    let (mx, my) = (x.moments(), y.moments());
    let (n1, n2) = (mx.n as f64, my.n as f64);
    let df = n1 + n2 - 2.0;
    let sp2 = ((n1 - 1.0) * mx.variance + (n2 - 1.0) * my.variance) / df;
    if sp2 == 0.0 {
        return Err(Error::Degenerate("pooled variance is zero".into()));
    }
    let t = (mx.mean - my.mean) / (sp2 * (1.0 / n1 + 1.0 / n2)).sqrt();
    let p = student_t_two_sided_p(t, df)?;
    Ok(TestResult::new(Method::PooledT, t, DegreesOfFreedom::Single(df), p, alpha))
}

/// Two-sided F-test of σx² = σy² on Vx/Vy. REJECT means the variances differ.
pub fn f_variance_test(x: &Sample, y: &Sample, alpha: Alpha) -> Result<TestResult> {
    let (mx, my) = (x.moments(), y.moments());
    if mx.variance == 0.0 || my.variance == 0.0 {
        return Err(Error::Degenerate("F-test needs both variances positive".into()));
    }
    let f = mx.variance / my.variance;
    let (d1, d2) = (mx.n as f64 - 1.0, my.n as f64 - 1.0);
    let c = f_cdf(f, d1, d2)?;
    let p = (2.0 * c.min(1.0 - c)).min(1.0);
    Ok(TestResult::new(Method::FVariance, f, DegreesOfFreedom::Pair(d1, d2), p, alpha))
}
