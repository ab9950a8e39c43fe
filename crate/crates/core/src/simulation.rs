//! Monte Carlo power and type-I error studies comparing the cross-variance
//! test with the pooled t-test.
//!
//! Every replicate owns a ChaCha8 substream: the generator is seeded from the
//! study seed and the stream id is the replicate index. Replicates therefore
//! produce the same draws regardless of which thread runs them or in what
//! order, and the aggregated report is bitwise reproducible.
//! Standard normals come from the ziggurat sampler in `rand_distr`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{crossvar_test, pooled_t_test, Alpha, Decision};
use crate::stats::{tstar_from_moments, MomentSummary, NPolicy, Sample};
use crate::tstar::{tstar_quantile, TstarModel};

/// A seeded stream of standard normal deviates.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    /// Substream `id` of the generator seeded with `seed`. Distinct ids give
    /// non-overlapping ChaCha streams.
    pub fn substream(seed: u64, id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id);
        Self { rng }
    }

    pub fn next_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `len` draws of N(mean, sd²).
    pub fn fill(&mut self, len: usize, mean: f64, sd: f64) -> Vec<f64> {
        (0..len).map(|_| mean + sd * self.next_normal()).collect()
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

/// Stream 0 of the generator seeded with `seed`.
pub fn make_normal_generator(seed: u64) -> NormalStream {
    NormalStream::substream(seed, 0)
}

/// SplitMix64 finaliser, used to derive independent seeds from (seed, index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample quantile with linear interpolation between closest ranks: for
/// sorted values v₁ ≤ … ≤ v_M the q-quantile sits at position h = (M − 1)q
/// (zero-based) and interpolates v_⌊h⌋ and v_⌊h⌋₊₁.
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidConfig(format!("quantile level must lie in (0, 1), got {q}")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("quantile input contains NaN".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuantileMode {
    /// α-quantile of the simulated null T* values.
    #[default]
    Empirical,
    /// α-quantile of the exact T* distribution.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n: usize,
    pub reps: usize,
    pub alpha: Alpha,
    pub mu_x: f64,
    /// Means of the second group under the alternative; type-I studies
    /// leave this empty.
    pub mu_y_grid: Vec<f64>,
    pub sigma: f64,
    pub seed: u64,
    pub quantile_mode: QuantileMode,
}

impl StudyConfig {
    fn validate_common(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n must be at least 2, got {}", self.n)));
        }
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.mu_x.is_finite() || self.mu_y_grid.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidConfig("means must be finite".into()));
        }
        Ok(())
    }

    pub fn validate_power(&self) -> Result<()> {
        self.validate_common()?;
        if self.mu_y_grid.is_empty() {
            return Err(Error::InvalidConfig("power study needs a nonempty mean grid".into()));
        }
        Ok(())
    }

    pub fn validate_type1(&self) -> Result<()> {
        self.validate_common()?;
        if self.mu_y_grid.iter().any(|&m| m != self.mu_x) {
            return Err(Error::InvalidConfig("type-I study requires mu_y = mu_x".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub mu_y: f64,
    pub delta_mu: f64,
    pub proposed_power: f64,
    pub t_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub config: StudyConfig,
    /// Rejection threshold t*₀,α for the proposed test.
    pub critical_value: f64,
    pub points: Vec<PowerPoint>,
}

/// Draws for one replicate, as standard normals: null X, null Y, alternative
/// X, alternative Y. Scaling and shifting happens per grid point so every
/// point of a curve sees the same underlying noise.
fn replicate_draws(seed: u64, rep: usize, n: usize) -> [Vec<f64>; 4] {
    let mut s = NormalStream::substream(seed, rep as u64);
    [s.fill(n, 0.0, 1.0), s.fill(n, 0.0, 1.0), s.fill(n, 0.0, 1.0), s.fill(n, 0.0, 1.0)]
}

fn scaled(z: &[f64], mean: f64, sd: f64) -> Vec<f64> {
    z.iter().map(|v| mean + sd * v).collect()
}

struct ReplicateOutcome {
    tstar_null: f64,
    tstar_alt: Vec<f64>,
    t_reject: Vec<bool>,
}

/// Power of both tests along `config.mu_y_grid`.
pub fn run_power_study(config: &StudyConfig) -> Result<PowerCurve> {
    config.validate_power()?;
    let StudyConfig {
        n, reps, alpha, mu_x, sigma, seed, ..
    } = *config;
    let nf = n as f64;
    let grid = &config.mu_y_grid;

    let outcomes: Vec<ReplicateOutcome> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<ReplicateOutcome> {
            let [x0, y0, x1, y1] = replicate_draws(seed, rep, n);
            let null_x = MomentSummary::of(&scaled(&x0, mu_x, sigma));
            let null_y = MomentSummary::of(&scaled(&y0, mu_x, sigma));
            let tstar_null = tstar_from_moments(&null_x, &null_y, nf)?;
            let alt_x = Sample::new(scaled(&x1, mu_x, sigma))?;
            let mut tstar_alt = Vec::with_capacity(grid.len());
            let mut t_reject = Vec::with_capacity(grid.len());
            for &mu_y in grid {
                let alt_y = Sample::new(scaled(&y1, mu_y, sigma))?;
                tstar_alt.push(tstar_from_moments(alt_x.moments(), alt_y.moments(), nf)?);
                t_reject.push(pooled_t_test(&alt_x, &alt_y, alpha)?.decision == Decision::Reject);
            }
            Ok(ReplicateOutcome {
                tstar_null,
                tstar_alt,
                t_reject,
            })
        })
        .collect::<Result<_>>()?;

    let critical_value = match config.quantile_mode {
        QuantileMode::Empirical => {
            let null: Vec<f64> = outcomes.iter().map(|o| o.tstar_null).collect();
            empirical_quantile(&null, alpha.get())?
        }
        QuantileMode::Analytic => tstar_quantile(alpha.get(), &TstarModel::new(nf)?)?,
    };
    let m = reps as f64;
    let points = grid
        .iter()
        .enumerate()
        .map(|(g, &mu_y)| {
            let below = outcomes.iter().filter(|o| o.tstar_alt[g] < critical_value).count();
            let t_rej = outcomes.iter().filter(|o| o.t_reject[g]).count();
            PowerPoint {
                mu_y,
                delta_mu: mu_y - mu_x,
                proposed_power: below as f64 / m,
                t_power: t_rej as f64 / m,
            }
        })
        .collect();
    Ok(PowerCurve {
        config: config.clone(),
        critical_value,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    pub alpha: f64,
    pub proposed: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateRow {
    pub n: usize,
    pub sigma: f64,
    pub label: Option<String>,
    pub reps: usize,
    pub seed: u64,
    pub rates: Vec<RateCell>,
    /// Whether both tests made the same decision in every replicate, at every
    /// tabulated level.
    pub identical_decisions: bool,
    #[serde(skip)]
    pub p_proposed: Vec<f64>,
    #[serde(skip)]
    pub p_t: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateTable {
    pub rows: Vec<ErrorRateRow>,
}

/// Levels at which type-I rates are tabulated.
pub const TYPE1_LEVELS: [f64; 2] = [0.05, 0.01];

/// Rejection rates under H₀ for both tests on the same generated pairs.
pub fn run_type1_study(config: &StudyConfig) -> Result<ErrorRateTable> {
    Ok(ErrorRateTable {
        rows: vec![type1_row(config, None)?],
    })
}

fn type1_row(config: &StudyConfig, label: Option<String>) -> Result<ErrorRateRow> {
    config.validate_type1()?;
    let StudyConfig {
        n, reps, alpha, mu_x, sigma, seed, ..
    } = *config;
    let pairs: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64)> {
            let mut s = NormalStream::substream(seed, rep as u64);
            let x = Sample::new(s.fill(n, mu_x, sigma))?;
            let y = Sample::new(s.fill(n, mu_x, sigma))?;
            let c = crossvar_test(&x, &y, alpha, NPolicy::Max)?;
            let t = pooled_t_test(&x, &y, alpha)?;
            Ok((c.p_value, t.p_value))
        })
        .collect::<Result<_>>()?;
    let mut levels = TYPE1_LEVELS.to_vec();
    if !levels.contains(&alpha.get()) {
        levels.push(alpha.get());
    }
    let m = reps as f64;
    let mut identical = true;
    let rates = levels
        .iter()
        .map(|&a| {
            let mut prop = 0usize;
            let mut tt = 0usize;
            for &(pc, pt) in &pairs {
                let (rc, rt) = (pc < a, pt < a);
                prop += rc as usize;
                tt += rt as usize;
                identical &= rc == rt;
            }
            RateCell {
                alpha: a,
                proposed: prop as f64 / m,
                t: tt as f64 / m,
            }
        })
        .collect();
    Ok(ErrorRateRow {
        n,
        sigma,
        label,
        reps,
        seed,
        rates,
        identical_decisions: identical,
        p_proposed: pairs.iter().map(|p| p.0).collect(),
        p_t: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Sample sizes used by the published studies.
pub const PAPER_SIZES: [usize; 4] = [5, 25, 100, 500];
/// Standard deviations for the type-I study, labelled low/medium/high.
pub const TYPE1_SIGMAS: [(&str, f64); 3] = [("low", 1.25), ("medium", 3.5), ("high", 10.0)];
/// Standard deviations for the power study, labelled low/medium/high.
pub const POWER_SIGMAS: [(&str, f64); 3] = [("low", 0.2), ("medium", 1.2), ("high", 7.0)];
pub const PAPER_MU: f64 = 9.2;
pub const PAPER_REPS: usize = 500;
pub const PAPER_POWER_ALPHA: f64 = 0.01;

/// The twelve-row type-I table: n ∈ {5, 25, 100, 500} × σ ∈ {1.25, 3.5, 10}
/// at μ = 9.2. Row i draws from `derive_seed(seed, i)`.
pub fn run_type1_table(seed: u64, reps: usize) -> Result<ErrorRateTable> {
    let mut rows = Vec::with_capacity(12);
    for (i, (n, (label, sigma))) in PAPER_SIZES
        .iter()
        .flat_map(|&n| TYPE1_SIGMAS.iter().map(move |s| (n, *s)))
        .enumerate()
    {
        let cfg = StudyConfig {
            n,
            reps,
            alpha: Alpha::new(0.05)?,
            mu_x: PAPER_MU,
            mu_y_grid: Vec::new(),
            sigma,
            seed: derive_seed(seed, i as u64),
            quantile_mode: QuantileMode::Empirical,
        };
        rows.push(type1_row(&cfg, Some(label.to_string()))?);
    }
    Ok(ErrorRateTable { rows })
}

/// Standardised mean shifts δ = Δμ / (σ√(2/n)) used for the preset power
/// grids: 0, 0.5, …, 6.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=12).map(|i| 0.5 * i as f64).collect()
}

/// μ_y values giving the standardised shifts `deltas` for a given n and σ.
pub fn mu_grid(mu_x: f64, sigma: f64, n: usize, deltas: &[f64]) -> Vec<f64> {
    let scale = sigma * (2.0 / n as f64).sqrt();
    deltas.iter().map(|d| mu_x + d * scale).collect()
}

/// Power-study configurations for one published figure (1 to 4), one per
/// variance level.
pub fn power_preset(figure: usize, seed: u64, reps: usize) -> Result<Vec<StudyConfig>> {
    let n = *PAPER_SIZES
        .get(figure.wrapping_sub(1))
        .ok_or_else(|| Error::InvalidConfig(format!("power presets are figures 1-4, got {figure}")))?;
    POWER_SIGMAS
        .iter()
        .enumerate()
        .map(|(i, &(_, sigma))| {
            Ok(StudyConfig {
                n,
                reps,
                alpha: Alpha::new(PAPER_POWER_ALPHA)?,
                mu_x: PAPER_MU,
                mu_y_grid: mu_grid(PAPER_MU, sigma, n, &default_delta_grid()),
                sigma,
                seed: derive_seed(seed, i as u64),
                quantile_mode: QuantileMode::Empirical,
            })
        })
        .collect()
}
