//! Sample moments, cross-variances and the T, T* and J statistics.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// One group's observations. Always holds at least two finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    moments: MomentSummary,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Degenerate(format!(
                "a sample needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain("Sample::new", format!("value at index {i} is not finite")));
        }
        let moments = MomentSummary::of(&values);
        Ok(Self { values, moments })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moments(&self) -> &MomentSummary {
        &self.moments
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn variance(&self) -> f64 {
        self.moments.variance
    }
}

impl TryFrom<&[f64]> for Sample {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Sample::new(values.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased (divisor n − 1).
    pub variance: f64,
}

impl MomentSummary {
    /// Two-pass mean and variance. Callers guarantee `values.len() >= 2`.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self {
            n,
            mean,
            variance: ss / (n as f64 - 1.0),
        }
    }
}

pub fn summarize(sample: &Sample) -> MomentSummary {
    *sample.moments()
}

/// Σ(xᵢ − other_mean)² / (n − 1): the dispersion of a sample about the other
/// group's mean.
pub fn cross_variance(sample: &Sample, other_mean: f64) -> f64 {
    let ss: f64 = sample
        .values()
        .iter()
        .map(|v| (v - other_mean) * (v - other_mean))
        .sum();
    ss / (sample.len() as f64 - 1.0)
}

/// How the effective group size is chosen when the two groups differ in size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NPolicy {
    Min,
    Max,
    #[serde(rename = "avg")]
    Average,
}

impl NPolicy {
    pub fn effective_n(self, n1: usize, n2: usize) -> f64 {
        match self {
            NPolicy::Min => n1.min(n2) as f64,
            NPolicy::Max => n1.max(n2) as f64,
            NPolicy::Average => (n1 + n2) as f64 / 2.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NPolicy::Min => "min",
            NPolicy::Max => "max",
            NPolicy::Average => "avg",
        }
    }
}

impl std::str::FromStr for NPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" => Ok(NPolicy::Min),
            "max" => Ok(NPolicy::Max),
            "avg" | "average" | "mean" => Ok(NPolicy::Average),
            other => Err(Error::InvalidConfig(format!("unknown n-policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossVarianceBreakdown {
    pub vx: f64,
    pub vy: f64,
    pub vx_star: f64,
    pub vy_star: f64,
    pub z1: f64,
    pub z2: f64,
    pub t: f64,
}

/// The general cross-variance statistic T = Z₁ + Z₂ with
/// Zᵢ = Vᵢ / (2Vᵢ*), Vᵢ* = Vᵢ + nᵢΔ²/(nᵢ − 1).
pub fn statistic_t(x: &Sample, y: &Sample) -> Result<CrossVarianceBreakdown> {
    let mx = x.moments();
    let my = y.moments();
    let delta2 = (my.mean - mx.mean).powi(2);
    let m = mx.n as f64;
    let n = my.n as f64;
    let vx_star = mx.variance + m * delta2 / (m - 1.0);
    let vy_star = my.variance + n * delta2 / (n - 1.0);
    if vx_star == 0.0 || vy_star == 0.0 {
        return Err(Error::Degenerate(
            "zero variance with coinciding means leaves T undefined".into(),
        ));
    }
    let z1 = mx.variance / (2.0 * vx_star);
    let z2 = my.variance / (2.0 * vy_star);
    Ok(CrossVarianceBreakdown {
        vx: mx.variance,
        vy: my.variance,
        vx_star,
        vy_star,
        z1,
        z2,
        t: z1 + z2,
    })
}

/// T* from summary moments: S²/(S² + nΔ²/(n − 1)) with S² = (Vx + Vy)/2 and
/// `n` the effective group size.
pub fn tstar_from_moments(x: &MomentSummary, y: &MomentSummary, n: f64) -> Result<f64> {
    let sp2 = 0.5 * (x.variance + y.variance);
    let delta = y.mean - x.mean;
    if sp2 == 0.0 && delta == 0.0 {
        return Err(Error::Degenerate(
            "pooled variance is zero and the means coincide".into(),
        ));
    }
    Ok(sp2 / (sp2 + n * delta * delta / (n - 1.0)))
}

/// The special-case statistic T* using the unweighted pooled variance.
pub fn statistic_tstar(x: &Sample, y: &Sample, policy: NPolicy) -> Result<f64> {
    let n = policy.effective_n(x.len(), y.len());
    tstar_from_moments(x.moments(), y.moments(), n)
}

/// J = √((n − 1)(1/T* − 1)).
pub fn statistic_j(tstar: f64, n: f64) -> Result<f64> {
    if !(tstar > 0.0 && tstar <= 1.0) {
        return Err(domain("statistic_j", format!("T* must lie in (0, 1], got {tstar}")));
    }
    if !(n > 1.0) {
        return Err(domain("statistic_j", format!("n must exceed 1, got {n}")));
    }
    Ok(((n - 1.0) * (1.0 / tstar - 1.0)).sqrt())
}
