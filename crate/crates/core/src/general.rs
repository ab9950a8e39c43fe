//! Distribution of the general statistic T = Z₁ + Z₂ when both variances are
//! known, with
//!
//! ```text
//! Z₁ = U/(2U + 2abV),  Z₂ = S/(2S + 2bcV),
//! U, S ~ χ²ₙ₋₁,  V ~ χ²₁ independent,
//! a = 1/σx²,  b = σx² + σy²,  c = 1/σy².
//! ```
//!
//! Integrating V out gives a closed-form joint density for (Z₁, Z₂) on
//! (0, ½)². The cdf of T is computed by nested adaptive quadrature of that
//! density over {z₁ + z₂ ≤ t}; the five-fold power series is provided as an
//! experimental evaluator for small t.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{gen_binom_ln, ln_beta, ln_gamma};

const LN_2: f64 = std::f64::consts::LN_2;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralModel {
    n: usize,
    sigma_x2: f64,
    sigma_y2: f64,
    a: f64,
    b: f64,
    c: f64,
    ln_norm: f64,
}

impl GeneralModel {
    pub fn new(n: usize, sigma_x2: f64, sigma_y2: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain("GeneralModel::new", format!("n must be at least 2, got {n}")));
        }
        if !(sigma_x2 > 0.0 && sigma_y2 > 0.0 && sigma_x2.is_finite() && sigma_y2.is_finite()) {
            return Err(domain(
                "GeneralModel::new",
                format!("variances must be positive, got ({sigma_x2}, {sigma_y2})"),
            ));
        }
        let a = 1.0 / sigma_x2;
        let b = sigma_x2 + sigma_y2;
        let c = 1.0 / sigma_y2;
        let nf = n as f64;
        let alpha = 0.5 * (nf - 1.0);
        let ln_norm = alpha * (4.0 * a * b * b * c).ln() + ln_gamma(nf - 0.5)
            - (nf - 0.5) * LN_2
            - ln_gamma(0.5)
            - 2.0 * ln_gamma(alpha);
        Ok(Self {
            n,
            sigma_x2,
            sigma_y2,
            a,
            b,
            c,
            ln_norm,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma_x2(&self) -> f64 {
        self.sigma_x2
    }

    pub fn sigma_y2(&self) -> f64 {
        self.sigma_y2
    }

    /// (a, b, c)
    pub fn constants(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    /// ln f(z₁, z₂) written in terms of zᵢ and wᵢ = 1 − 2zᵢ so that callers
    /// holding an accurate wᵢ near the upper edge can pass it directly.
    fn ln_joint(&self, z1: f64, w1: f64, z2: f64, w2: f64) -> f64 {
        let nf = self.n as f64;
        let ab = self.a * self.b;
        let bc = self.b * self.c;
        let denom = 0.5 * w1 * w2 + ab * z1 * w2 + bc * z2 * w1;
        self.ln_norm + 0.5 * (nf - 3.0) * (z1.ln() + z2.ln()) + 0.5 * (nf - 2.0) * (w1.ln() + w2.ln())
            - (nf - 0.5) * denom.ln()
    }

    /// The density in θ coordinates, zᵢ = ½ sin²θᵢ, including the Jacobian.
    /// Bounded away from the corner (π/2, π/2) for every n ≥ 2.
    fn theta_integrand(&self, th1: f64, th2: f64) -> f64 {
        let (s1, c1) = th1.sin_cos();
        let (s2, c2) = th2.sin_cos();
        if s1 <= 0.0 || s2 <= 0.0 || c1 <= 0.0 || c2 <= 0.0 {
            return 0.0;
        }
        let z1 = 0.5 * s1 * s1;
        let z2 = 0.5 * s2 * s2;
        (self.ln_joint(z1, c1 * c1, z2, c2 * c2) + (s1 * c1 * s2 * c2).ln()).exp()
    }
}

/// Joint density of (Z₁, Z₂) on the open square (0, ½)².
pub fn joint_pdf_z1z2(z1: f64, z2: f64, model: &GeneralModel) -> Result<f64> {
    let inside = |z: f64| z > 0.0 && z < 0.5;
    if !inside(z1) || !inside(z2) {
        return Err(domain(
            "joint_pdf_z1z2",
            format!("(z1, z2) must lie in (0, 1/2)², got ({z1}, {z2})"),
        ));
    }
    Ok(model.ln_joint(z1, 1.0 - 2.0 * z1, z2, 1.0 - 2.0 * z2).exp())
}

/// Value plus accumulated quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureValue {
    pub value: f64,
    pub error_estimate: f64,
}

fn theta_of(z: f64) -> f64 {
    (2.0 * z).sqrt().min(1.0).asin()
}

const INNER: QuadOptions = QuadOptions {
    abs_tol: 1e-12,
    rel_tol: 1e-11,
    max_intervals: 400,
};
const OUTER: QuadOptions = QuadOptions {
    abs_tol: 1e-10,
    rel_tol: 1e-10,
    max_intervals: 400,
};

/// P(T ≤ t) by nested adaptive quadrature of the joint density over
/// {z₁ + z₂ ≤ t} ∩ (0, ½)². Both axes use zᵢ = ½ sin²θᵢ, which absorbs the
/// power-law edges of the density on either side.
pub fn general_cdf_quadrature(t: f64, model: &GeneralModel) -> Result<QuadratureValue> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("general_cdf_quadrature", format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(QuadratureValue {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let mut inner_err = 0.0_f64;
    let mut inner_fail: Option<Error> = None;
    let mut outer_fn = |th1: f64| -> f64 {
        let s1 = th1.sin();
        let z1 = 0.5 * s1 * s1;
        let upper = (t - z1).min(0.5);
        if upper <= 0.0 {
            return 0.0;
        }
        let th2_max = theta_of(upper);
        match integrate(|th2| model.theta_integrand(th1, th2), 0.0, th2_max, INNER) {
            Ok(r) => {
                inner_err = inner_err.max(r.error_estimate);
                r.value
            }
            Err(e) => {
                if let Error::Quadrature { value, error_estimate } = e {
                    inner_err = inner_err.max(error_estimate);
                    inner_fail.get_or_insert(e);
                    value
                } else {
                    inner_fail.get_or_insert(e);
                    f64::NAN
                }
            }
        }
    };
    let th1_max = theta_of(t.min(0.5));
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    // the outer integrand has a kink where t − z₁ crosses ½
    let breaks: Vec<f64> = if t > 0.5 {
        vec![0.0, theta_of(t - 0.5), th1_max]
    } else {
        vec![0.0, th1_max]
    };
    for w in breaks.windows(2) {
        let r = integrate(&mut outer_fn, w[0], w[1], OUTER)?;
        value += r.value;
        error_estimate += r.error_estimate;
    }
    let error_estimate = error_estimate + inner_err * HALF_PI;
    if let Some(e) = inner_fail {
        if error_estimate > 1e-6 {
            return Err(match e {
                Error::Quadrature { .. } => Error::Quadrature { value, error_estimate },
                other => other,
            });
        }
    }
    Ok(QuadratureValue {
        value: value.clamp(0.0, 1.0),
        error_estimate,
    })
}

/// Density of T as the convolution ∫ f(z, t − z) dz over the admissible z.
pub fn general_pdf_quadrature(t: f64, model: &GeneralModel) -> Result<QuadratureValue> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("general_pdf_quadrature", format!("t must lie in (0, 1), got {t}")));
    }
    let lo = (t - 0.5).max(0.0);
    let hi = t.min(0.5);
    let width = hi - lo;
    // z = lo + width·sin²(πu/2) clusters nodes quadratically at both ends
    let f = |u: f64| {
        let s = (HALF_PI * u).sin();
        let z1 = lo + width * s * s;
        let z2 = t - z1;
        if z1 <= 0.0 || z2 <= 0.0 || z1 >= 0.5 || z2 >= 0.5 {
            return 0.0;
        }
        let jac = width * HALF_PI * (std::f64::consts::PI * u).sin();
        model.ln_joint(z1, 1.0 - 2.0 * z1, z2, 1.0 - 2.0 * z2).exp() * jac
    };
    let r = integrate(f, 0.0, 1.0, OUTER)?;
    Ok(QuadratureValue {
        value: r.value,
        error_estimate: r.error_estimate,
    })
}

/// Which form of the five-fold series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVariant {
    /// Re-derived expansion; every term carries t^{n−1+k+l+m+p+q}.
    #[default]
    Derived,
    /// The closed five-fold form with t^{k+l−m−p−q} and C((n−1)/2 + k, k)·2^k.
    PrintedClosedForm,
    /// The intermediate form with t^{(n+1)/2+k+l}, C((n+1)/2, k)·(−2)^k and the
    /// inner factor divided by t^{(n−1)/2+m+p+q}.
    PrintedIntermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCaps {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub abs_tol: f64,
    pub variant: SeriesVariant,
}

impl Default for SeriesCaps {
    fn default() -> Self {
        Self {
            k: 40,
            l: 40,
            m: 40,
            p: 40,
            q: 40,
            abs_tol: 1e-8,
            variant: SeriesVariant::Derived,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOutcome {
    pub value: f64,
    pub converged: bool,
    pub terms: usize,
    pub shells: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// (sign, ln|C(r, i)|) for i = 0..=cap.
fn binom_table(r: f64, cap: usize) -> Vec<(f64, f64)> {
    (0..=cap).map(|i| gen_binom_ln(r, i)).collect()
}

/// sign and ln|x^i| as a pair.
fn signed_ln_pow(x: f64, i: usize) -> (f64, f64) {
    if i == 0 {
        return (1.0, 0.0);
    }
    if x == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let sign = if x < 0.0 && i % 2 == 1 { -1.0 } else { 1.0 };
    (sign, i as f64 * x.abs().ln())
}

const LN_OVERFLOW_GUARD: f64 = 690.0;

fn series(t: f64, model: &GeneralModel, caps: SeriesCaps, derivative: bool) -> Result<SeriesOutcome> {
    if caps.k.min(caps.l).min(caps.m).min(caps.p).min(caps.q) == 0 || !(caps.abs_tol > 0.0) {
        return Err(Error::InvalidConfig("series caps must be ≥ 1 with abs_tol > 0".into()));
    }
    let nf = model.n as f64;
    let alpha = 0.5 * (nf - 1.0);
    let r = nf - 1.5;
    let (a, b, c) = model.constants();
    let ab = a * b;
    let bc = b * c;
    let bc1 = bc - 1.0;
    let beta = 2.0 * (1.0 - ab - bc) / bc1;
    let omega = 2.0 * (1.0 - ab);
    let ln_p0 = alpha * (4.0 * ab * b * c).ln() + ln_gamma(nf - 0.5) - ln_gamma(0.5) - 2.0 * ln_gamma(alpha);
    let ln_t = t.ln();

    let variant = caps.variant;
    let (k_upper, k_base, k_ratio) = match variant {
        SeriesVariant::Derived => (0.5 * (nf - 2.0), false, -2.0),
        SeriesVariant::PrintedClosedForm => (0.0, true, 2.0),
        SeriesVariant::PrintedIntermediate => (0.5 * (nf + 1.0), false, -2.0),
    };
    let m_upper = match variant {
        SeriesVariant::Derived => 0.5 * (nf - 2.0),
        _ => 0.5 * nf,
    };
    let bc_ratio = match variant {
        SeriesVariant::Derived => 2.0 * bc1,
        _ => -2.0 * bc1,
    };
    let q_ratio = match variant {
        SeriesVariant::Derived => omega,
        _ => -omega,
    };
    // C(α + k, k) in the closed form depends on k through the upper index
    let k_binoms: Vec<(f64, f64)> = if k_base {
        (0..=caps.k).map(|k| gen_binom_ln(alpha + k as f64, k)).collect()
    } else {
        binom_table(k_upper, caps.k)
    };
    let m_binoms = binom_table(m_upper, caps.m);
    let (lcap, pcap, qcap) = (caps.l, caps.p.min(caps.l), caps.q);
    let l_binoms: Vec<(f64, f64)> = (0..=lcap).map(|l| gen_binom_ln(r + l as f64, l)).collect();
    // C(l, p) and C(r + l + q, q), row-major in l
    let lp_binoms: Vec<(f64, f64)> = (0..=lcap)
        .flat_map(|l| (0..=pcap).map(move |p| gen_binom_ln(l as f64, p)))
        .collect();
    let lq_binoms: Vec<(f64, f64)> = (0..=lcap)
        .flat_map(|l| (0..=qcap).map(move |q| gen_binom_ln(r + (l + q) as f64, q)))
        .collect();
    let pows = |x: f64, cap: usize| -> Vec<(f64, f64)> { (0..=cap).map(|i| signed_ln_pow(x, i)).collect() };
    let k_pows = pows(k_ratio, caps.k);
    let l_pows = pows(bc_ratio, lcap);
    let m_pows = pows(-2.0, caps.m);
    let p_pows = pows(beta, pcap);
    let q_pows = pows(q_ratio, qcap);
    // ln B(α + m + p + q, ·) indexed by (k + l, m + p + q)
    let inner_max = caps.m + pcap + qcap;
    let kl_terms: Vec<(f64, f64)> = (0..=caps.k + lcap)
        .map(|j| match variant {
            SeriesVariant::PrintedIntermediate => {
                let e = 0.5 * (nf + 1.0) + j as f64;
                (e.ln(), e)
            }
            _ => ((alpha + j as f64).ln(), alpha + 1.0 + j as f64),
        })
        .collect();
    let ln_betas: Vec<f64> = kl_terms
        .iter()
        .flat_map(|&(_, b)| (0..=inner_max).map(move |i| ln_beta(alpha + i as f64, b)))
        .collect();

    let mut acc = CompensatedSum::default();
    let mut terms = 0usize;
    let mut quiet_shells = 0usize;
    // shells up to the smallest cap contain every index tuple of that degree;
    // beyond it truncation makes shell magnitudes meaningless
    let max_shell = caps.k.min(lcap).min(caps.m).min(caps.p).min(qcap);
    for s in 0..=max_shell {
        let mut shell_max = 0.0_f64;
        for k in 0..=caps.k.min(s) {
            let (sk, lk) = k_binoms[k];
            let (sk2, lk2) = k_pows[k];
            for l in 0..=lcap.min(s - k) {
                let (sl, ll) = l_binoms[l];
                let (sl2, ll2) = l_pows[l];
                let sign_l = if matches!(variant, SeriesVariant::Derived) && l % 2 == 1 { -1.0 } else { 1.0 };
                let ln_kl_den = kl_terms[k + l].0;
                let outer_sign = sk * sk2 * sl * sl2 * sign_l;
                let outer_ln = ln_p0 + lk + lk2 + ll + ll2 - ln_kl_den;
                for m in 0..=caps.m.min(s - k - l) {
                    let (sm, lm) = m_binoms[m];
                    let (sm2, lm2) = m_pows[m];
                    let rest = s - k - l - m;
                    for p in rest.saturating_sub(qcap)..=pcap.min(l).min(rest) {
                        let q = rest - p;
                        let (sp, lp) = lp_binoms[l * (pcap + 1) + p];
                        let (sp2, lp2) = p_pows[p];
                        let (sq, lq) = lq_binoms[l * (qcap + 1) + q];
                        let (sq2, lq2) = q_pows[q];
                        let sign = outer_sign * sm * sm2 * sp * sp2 * sq * sq2;
                        if sign == 0.0 {
                            continue;
                        }
                        let t_pow = match variant {
                            SeriesVariant::Derived => nf - 1.0 + s as f64,
                            SeriesVariant::PrintedClosedForm => (k + l) as f64 - (m + p + q) as f64,
                            SeriesVariant::PrintedIntermediate => 1.0 + (k + l) as f64 - (m + p + q) as f64,
                        };
                        let mut ln_mag = outer_ln + lm + lm2 + lp + lp2 + lq + lq2
                            + ln_betas[(k + l) * (inner_max + 1) + m + p + q]
                            + t_pow * ln_t;
                        let mut sign = sign;
                        if derivative {
                            if t_pow == 0.0 {
                                continue;
                            }
                            if t_pow < 0.0 {
                                sign = -sign;
                            }
                            ln_mag += t_pow.abs().ln() - ln_t;
                        }
                        if ln_mag > LN_OVERFLOW_GUARD {
                            return Err(Error::Overflow {
                                index: terms,
                                log_magnitude: ln_mag,
                            });
                        }
                        let term = ln_mag.exp();
                        shell_max = shell_max.max(term);
                        acc.add(sign * term);
                        terms += 1;
                    }
                }
            }
        }
        if shell_max < caps.abs_tol {
            quiet_shells += 1;
            if quiet_shells >= 2 {
                return Ok(SeriesOutcome {
                    value: acc.value(),
                    converged: t <= 0.5 || !matches!(variant, SeriesVariant::Derived),
                    terms,
                    shells: s + 1,
                });
            }
        } else {
            quiet_shells = 0;
        }
    }
    Ok(SeriesOutcome {
        value: acc.value(),
        converged: false,
        terms,
        shells: max_shell + 1,
    })
}

/// EXPERIMENTAL. P(T ≤ t) from the five-fold series, summed shell by shell in
/// total index degree. `converged` is set once two consecutive shells have all
/// terms below `abs_tol`. The derived variant is only meaningful for t ≤ ½
/// (beyond that the series integrates outside the unit square).
pub fn general_cdf_series(t: f64, model: &GeneralModel, caps: SeriesCaps) -> Result<SeriesOutcome> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("general_cdf_series", format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(SeriesOutcome {
            value: 0.0,
            converged: true,
            terms: 0,
            shells: 0,
        });
    }
    series(t, model, caps, false)
}

/// EXPERIMENTAL. Term-wise t-derivative of [`general_cdf_series`].
pub fn general_pdf_series(t: f64, model: &GeneralModel, caps: SeriesCaps) -> Result<SeriesOutcome> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("general_pdf_series", format!("t must lie in (0, 1), got {t}")));
    }
    series(t, model, caps, true)
}

/// Draw `reps` realisations of T from independent χ² variables.
pub fn sample_t(model: &GeneralModel, reps: usize, seed: u64) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chi_n = ChiSquared::new(model.n as f64 - 1.0).map_err(|e| domain("sample_t", e.to_string()))?;
    let chi_1 = ChiSquared::new(1.0).map_err(|e| domain("sample_t", e.to_string()))?;
    let ab = model.a * model.b;
    let bc = model.b * model.c;
    Ok((0..reps)
        .map(|_| {
            let u = chi_n.sample(&mut rng);
            let s = chi_n.sample(&mut rng);
            let v = chi_1.sample(&mut rng);
            u / (2.0 * u + 2.0 * ab * v) + s / (2.0 * s + 2.0 * bc * v)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_constants() {
        let m = GeneralModel::new(5, 1.0, 1.0).unwrap();
        let (a, b, c) = m.constants();
        assert_eq!((a * b, b * c), (2.0, 2.0));
        assert_eq!(b * c - 1.0, 1.0);
        assert_eq!(1.0 - a * b - b * c, -3.0);
        assert_eq!(2.0 * (1.0 - a * b - b * c) / (b * c - 1.0), -6.0);
        let m = GeneralModel::new(3, 1.0, 4.0).unwrap();
        let (a, b, c) = m.constants();
        assert!(a * b >= 1.0 && b * c >= 1.0);
        assert!(GeneralModel::new(1, 1.0, 1.0).is_err());
        assert!(GeneralModel::new(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn joint_pdf_domain_and_symmetry() {
        let m = GeneralModel::new(4, 2.0, 2.0).unwrap();
        assert!(joint_pdf_z1z2(0.0, 0.2, &m).is_err());
        assert!(joint_pdf_z1z2(0.2, 0.5, &m).is_err());
        for (z1, z2) in [(0.1, 0.3), (0.01, 0.45), (0.25, 0.26)] {
            let f = joint_pdf_z1z2(z1, z2, &m).unwrap();
            let g = joint_pdf_z1z2(z2, z1, &m).unwrap();
            assert!((f - g).abs() <= 1e-12 * f.abs().max(1.0));
        }
    }

    #[test]
    fn cdf_endpoints() {
        let m = GeneralModel::new(5, 1.0, 2.0).unwrap();
        assert_eq!(general_cdf_quadrature(0.0, &m).unwrap().value, 0.0);
        let full = general_cdf_quadrature(1.0, &m).unwrap();
        assert!((full.value - 1.0).abs() < 1e-6, "{full:?}");
        assert!(general_cdf_quadrature(1.5, &m).is_err());
    }

    #[test]
    fn sample_t_is_deterministic_and_bounded() {
        let m = GeneralModel::new(5, 1.0, 3.0).unwrap();
        let a = sample_t(&m, 1000, 9).unwrap();
        let b = sample_t(&m, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&t| t > 0.0 && t < 1.0));
        assert_ne!(a, sample_t(&m, 1000, 10).unwrap());
        assert!(sample_t(&m, 0, 1).is_err());
    }

    #[test]
    fn series_at_zero_and_domain() {
        let m = GeneralModel::new(3, 1.0, 1.0).unwrap();
        let z = general_cdf_series(0.0, &m, SeriesCaps::default()).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.converged);
        assert!(general_pdf_series(0.0, &m, SeriesCaps::default()).is_err());
        let bad = SeriesCaps { k: 0, ..Default::default() };
        assert!(general_cdf_series(0.1, &m, bad).is_err());
    }
}
