//! Null distribution of the equal-variance statistic T* = U/(U + 4V) with
//! U ~ χ²₂₍ₙ₋₁₎ and V ~ χ²₁.
//!
//! With G = V/U (a beta-prime(½, n − 1) variable), T* = 1/(1 + 4G) and the
//! cdf has the closed form
//!
//! ```text
//! P(T* ≤ t) = I_{4t/(1+3t)}(n − 1, ½)
//! ```
//!
//! which is the production path. [`tstar_cdf_series`] evaluates the
//! alternating expansion of (1 + 3t)^{−(n−½)} integrated term by term; it is
//! only convergent for t < 1/3 and is kept for cross-validation. Its density
//! prefactor is 4^{n−1}/B(½, n − 1); the 3^{n−1} variant does not normalize.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{inc_beta_split, ln_beta};

type Big = FBig<HalfEven, 2>;

const LN_4: f64 = std::f64::consts::LN_2 * 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TstarModel {
    n: f64,
    ln_beta_half: f64,
}

impl TstarModel {
    /// `n` is the (possibly fractional) per-group size; it must exceed 1.
    pub fn new(n: f64) -> Result<Self> {
        if !(n > 1.0 && n.is_finite()) {
            return Err(domain("TstarModel::new", format!("n must be finite and exceed 1, got {n}")));
        }
        Ok(Self {
            n,
            ln_beta_half: ln_beta(0.5, n - 1.0),
        })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn df(&self) -> f64 {
        2.0 * (self.n - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

/// A converged series value and the number of terms summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
}

/// Density of G = V/U (beta prime with shapes ½ and n − 1).
pub fn g_pdf(g: f64, model: &TstarModel) -> Result<f64> {
    if !(g > 0.0) {
        return Err(domain("g_pdf", format!("g must be positive, got {g}")));
    }
    if g.is_infinite() {
        return Ok(0.0);
    }
    let n = model.n;
    Ok((-0.5 * g.ln() - model.ln_beta_half - (n - 0.5) * g.ln_1p()).exp())
}

/// Density of Y = 1 + 4G on [1, ∞).
pub fn y_pdf(y: f64, model: &TstarModel) -> Result<f64> {
    if !(y >= 1.0) {
        return Err(domain("y_pdf", format!("y must be at least 1, got {y}")));
    }
    if y == 1.0 {
        return Ok(f64::INFINITY);
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    let n = model.n;
    Ok(((n - 1.0) * LN_4 - 0.5 * (y - 1.0).ln() - model.ln_beta_half - (n - 0.5) * (y + 3.0).ln()).exp())
}

/// Density of T* on (0, 1).
pub fn tstar_pdf(t: f64, model: &TstarModel) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain("tstar_pdf", format!("t must lie in (0, 1), got {t}")));
    }
    let n = model.n;
    let ln = (n - 1.0) * LN_4 + (n - 2.0) * t.ln() - 0.5 * (-t).ln_1p()
        - model.ln_beta_half
        - (n - 0.5) * (3.0 * t).ln_1p();
    Ok(ln.exp())
}

/// Exact cdf of T*.
pub fn tstar_cdf(t: f64, model: &TstarModel) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("tstar_cdf", format!("t must lie in [0, 1], got {t}")));
    }
    let d = 1.0 + 3.0 * t;
    inc_beta_split(4.0 * t / d, (1.0 - t) / d, model.n - 1.0, 0.5)
}

/// e_k = B_t(n − 1 + k, ½) / (t^{n−1+k} (1 − t)^{½}) via its hypergeometric
/// series; only used to seed the recurrences.
fn scaled_inc_beta(a: f64, t: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 0..100_000 {
        let j = j as f64;
        term *= (a + 0.5 + j) / (a + 1.0 + j) * t;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / a
}

/// Term-by-term series for the T* cdf.
///
/// The k-th term is
/// `(−3)^k C(n − 3/2 + k, k) B(n − 1 + k, ½) I_t(n − 1 + k, ½)`, scaled by
/// `4^{n−1}/B(½, n − 1)`. Summation stops at the first term past the peak
/// whose magnitude is below `abs_tol`; since the terms alternate and decrease
/// from there on, the truncation error is bounded by that term.
///
/// The terms grow to many orders of magnitude above the result as t → 1/3,
/// so a first f64 pass finds the stopping index and the largest term, and the
/// signed sum is then formed in binary floating point with enough bits to
/// absorb the cancellation.
pub fn tstar_cdf_series(t: f64, model: &TstarModel, ctl: SeriesControl) -> Result<SeriesSum> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("tstar_cdf_series", format!("t must lie in [0, 1], got {t}")));
    }
    if !(ctl.abs_tol > 0.0) || ctl.max_terms == 0 {
        return Err(Error::InvalidConfig("series control needs abs_tol > 0 and max_terms ≥ 1".into()));
    }
    if t == 0.0 {
        return Ok(SeriesSum { value: 0.0, terms: 1 });
    }
    let n = model.n;
    let ln_t = t.ln();
    let ln_pre = (n - 1.0) * LN_4 - model.ln_beta_half + (n - 1.0) * ln_t + 0.5 * (-t).ln_1p();
    // at t = 1 the scaled form degenerates; use the complete beta directly
    let ln_pre_pass1 = if t < 1.0 { ln_pre } else { (n - 1.0) * LN_4 - model.ln_beta_half };
    let ln_3t = 3f64.ln() + ln_t;

    // pass 1: magnitudes in f64
    let mut ln_binom = 0.0;
    let mut max_ln = f64::NEG_INFINITY;
    let mut prev_ln = f64::INFINITY;
    let mut naive = 0.0;
    let mut last = None;
    for k in 0..ctl.max_terms {
        if k > 0 {
            ln_binom += (n - 1.5 + k as f64).ln() - (k as f64).ln();
        }
        let a = n - 1.0 + k as f64;
        let ln_b = if t < 1.0 { scaled_inc_beta(a, t).ln() } else { ln_beta(a, 0.5) };
        let ln_mag = ln_pre_pass1 + k as f64 * ln_3t + ln_binom + ln_b;
        if ln_mag > 600.0 {
            return Err(Error::NonConvergence {
                partial_sum: naive,
                terms: k,
            });
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        naive += sign * ln_mag.exp();
        max_ln = max_ln.max(ln_mag);
        if ln_mag.exp() < ctl.abs_tol && ln_mag < prev_ln {
            last = Some(k);
            break;
        }
        prev_ln = ln_mag;
    }
    let Some(last) = last else {
        return Err(Error::NonConvergence {
            partial_sum: naive,
            terms: ctl.max_terms,
        });
    };

    // pass 2: signed sum with enough working precision
    let spread = ((max_ln - ctl.abs_tol.ln()) / std::f64::consts::LN_2).max(0.0);
    let bits = 64 + spread.ceil() as usize;
    let big = |x: f64| -> Big { Big::try_from(x).expect("finite").with_precision(bits).value() };

    let extra = ((bits as f64 * std::f64::consts::LN_2) / (-ln_t)).ceil() as usize + 8;
    let top = last + extra;
    // coefficients are built from n in full precision; rounding n − 1 + k in
    // f64 is enough to wreck the cancellation for non-integer n
    let t_big = big(t);
    let n_big = big(n);
    let shape = |k: usize, off: f64| -> Big { &n_big + big(k as f64 + off) };
    let mut e = vec![Big::ZERO; last + 1];
    let mut e_next = big(scaled_inc_beta(n - 1.0 + top as f64, t));
    for k in (0..top).rev() {
        let cur = (shape(k, -0.5) * &t_big * &e_next + big(1.0)) / shape(k, -1.0);
        if k <= last {
            e[k] = cur.clone();
        }
        e_next = cur;
    }
    let ratio = big(-3.0) * &t_big;
    let mut d = big(1.0);
    let mut sum = big(0.0);
    for (k, ek) in e.iter().enumerate() {
        if k > 0 {
            d = d * &ratio * shape(k, -1.5) / big(k as f64);
        }
        sum += &d * ek;
    }
    let value = sum.to_f64().value() * ln_pre.exp();
    Ok(SeriesSum {
        value: value.clamp(0.0, 1.0),
        terms: last + 1,
    })
}

/// The p-quantile of T*, by bisection on the monotone cdf.
pub fn tstar_quantile(p: f64, model: &TstarModel) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("tstar_quantile", format!("p must lie strictly inside (0, 1), got {p}")));
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = tstar_cdf(mid, model)?;
        if (c - p).abs() <= 1e-13 {
            return Ok(mid);
        }
        if c < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use crate::special::beta_fn;

    fn m(n: f64) -> TstarModel {
        TstarModel::new(n).unwrap()
    }

    #[test]
    fn model_validation() {
        assert!(TstarModel::new(1.0).is_err());
        assert!(TstarModel::new(f64::NAN).is_err());
        assert_eq!(m(5.0).df(), 8.0);
    }

    #[test]
    fn g_pdf_values() {
        let want = 1.0 / (2.0 * 2f64.powf(1.5));
        assert!((g_pdf(1.0, &m(2.0)).unwrap() - want).abs() < 1e-14);
        assert!((g_pdf(1.0, &m(2.0)).unwrap() - 0.17678).abs() < 5e-6);
        assert!(g_pdf(0.0, &m(2.0)).is_err());
        // g^{-1/2} blow-up at the origin
        let r = g_pdf(1e-12, &m(4.0)).unwrap() / g_pdf(1e-10, &m(4.0)).unwrap();
        assert!((r - 10.0).abs() < 1e-6);
    }

    #[test]
    fn g_pdf_integrates_to_one() {
        for n in [2.0, 3.5, 10.0] {
            let model = m(n);
            // g = u/(1 − u), then u = w² to tame the origin
            let f = |w: f64| {
                let u = w * w;
                if u <= 0.0 || u >= 1.0 {
                    return 0.0;
                }
                let g = u / (1.0 - u);
                g_pdf(g, &model).unwrap() * 2.0 * w / ((1.0 - u) * (1.0 - u))
            };
            let r = integrate(f, 0.0, 1.0, QuadOptions::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "n={n}: {}", r.value);
        }
    }

    #[test]
    fn y_pdf_values() {
        let model = m(2.0);
        assert!((y_pdf(5.0, &model).unwrap() - 0.044194).abs() < 1e-6);
        for y in [1.3, 4.0, 17.0] {
            let want = g_pdf((y - 1.0) / 4.0, &model).unwrap() / 4.0;
            assert!((y_pdf(y, &model).unwrap() - want).abs() < 1e-15);
        }
        assert!(y_pdf(0.5, &model).is_err());
    }

    #[test]
    fn y_pdf_integrates_to_one() {
        let model = m(6.0);
        // y = 1 + 4u²/(1 − u)² maps [0,1) onto [1,∞)
        let f = |u: f64| {
            if u <= 0.0 || u >= 1.0 {
                return 0.0;
            }
            let s = u / (1.0 - u);
            let y = 1.0 + 4.0 * s * s;
            y_pdf(y, &model).unwrap() * 8.0 * s / ((1.0 - u) * (1.0 - u))
        };
        let r = integrate(f, 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tstar_pdf_values() {
        assert!((tstar_pdf(1e-12, &m(2.0)).unwrap() - 2.0).abs() < 1e-9);
        let b = beta_fn(0.5, 2.0).unwrap();
        let want = 16.0 * 0.5 * 0.5f64.powf(-0.5) / (b * 2.5f64.powf(2.5));
        assert!((tstar_pdf(0.5, &m(3.0)).unwrap() - want).abs() < 1e-13);
        assert!((want - 0.8589).abs() < 5e-4);
        assert!(tstar_pdf(0.0, &m(3.0)).is_err());
        assert!(tstar_pdf(1.0, &m(3.0)).is_err());
    }

    #[test]
    fn tstar_cdf_endpoints_and_anchors() {
        for n in [2.0, 5.0, 40.0] {
            assert_eq!(tstar_cdf(0.0, &m(n)).unwrap(), 0.0);
            assert_eq!(tstar_cdf(1.0, &m(n)).unwrap(), 1.0);
        }
        assert!((tstar_cdf(0.8298, &m(8.0)).unwrap() - 0.411).abs() < 5e-4);
        assert!((tstar_cdf(0.1430, &m(5.0)).unwrap() - 0.009).abs() < 5e-4);
        assert!(tstar_cdf(-0.1, &m(5.0)).is_err());
    }

    #[test]
    fn series_matches_closed_form() {
        let ctl = SeriesControl::default();
        assert_eq!(tstar_cdf_series(0.0, &m(5.0), ctl).unwrap().value, 0.0);
        let s = tstar_cdf_series(0.2, &m(5.0), ctl).unwrap();
        assert!((s.value - tstar_cdf(0.2, &m(5.0)).unwrap()).abs() < 1e-8);
        let s = tstar_cdf_series(0.25, &m(10.0), ctl).unwrap();
        assert!((s.value - tstar_cdf(0.25, &m(10.0)).unwrap()).abs() < 1e-8);
        assert!(s.terms <= 200, "used {} terms", s.terms);
    }

    #[test]
    fn series_fails_beyond_one_third() {
        let ctl = SeriesControl::default();
        for t in [0.4, 0.7, 1.0] {
            let r = tstar_cdf_series(t, &m(5.0), ctl);
            assert!(matches!(r, Err(Error::NonConvergence { .. })), "t={t}: {r:?}");
        }
        let short = SeriesControl { abs_tol: 1e-10, max_terms: 5 };
        assert!(matches!(
            tstar_cdf_series(0.3, &m(5.0), short),
            Err(Error::NonConvergence { terms: 5, .. })
        ));
    }

    #[test]
    fn quantile_roundtrip_and_limits() {
        for n in [2.0, 5.0, 25.0, 100.0] {
            for p in [0.01, 0.05, 0.5, 0.99] {
                let q = tstar_quantile(p, &m(n)).unwrap();
                assert!((tstar_cdf(q, &m(n)).unwrap() - p).abs() < 1e-9);
            }
        }
        let q = tstar_quantile(0.411, &m(8.0)).unwrap();
        assert!((q - 0.8298).abs() < 5e-4);
        assert!(tstar_quantile(1.0 - 1e-9, &m(5.0)).unwrap() > 0.999_999);
        assert!(tstar_quantile(1.0, &m(5.0)).is_err());
        assert!(tstar_quantile(0.0, &m(5.0)).is_err());
    }
}
