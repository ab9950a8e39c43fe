//! Serializable reports. Every report embeds a [`RunManifest`]; nothing in a
//! report depends on wall-clock time or thread scheduling, so identical
//! inputs render to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::hypothesis::{DegreesOfFreedom, TestResult};
use crate::simulation::{ErrorRateTable, PowerCurve};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: Option<u64>,
    /// Input name → lowercase hex SHA-256 of its bytes.
    pub input_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            flags: BTreeMap::new(),
            seed: None,
            input_digests: BTreeMap::new(),
        }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn digest(mut self, name: &str, bytes: &[u8]) -> Self {
        self.input_digests.insert(name.to_string(), sha256_hex(bytes));
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Three-decimal p-value; anything below 0.0005 prints as "0.000".
pub fn fmt_p(p: f64) -> String {
    if p < 0.0005 {
        "0.000".to_string()
    } else {
        format!("{p:.3}")
    }
}

pub fn fmt_df(df: &DegreesOfFreedom) -> String {
    match df {
        DegreesOfFreedom::Single(d) => format!("{d}"),
        DegreesOfFreedom::Pair(a, b) => format!("{a},{b}"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub manifest: RunManifest,
    pub x: GroupSummary,
    pub y: GroupSummary,
    pub results: Vec<TestResult>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistRow {
    pub input: f64,
    pub output: f64,
    pub method: String,
    pub error_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistReport {
    pub manifest: RunManifest,
    pub rows: Vec<DistRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub manifest: RunManifest,
    pub curves: Vec<PowerCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Report {
    pub manifest: RunManifest,
    pub table: ErrorRateTable,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn csv_string(rows: Vec<Vec<String>>) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TestReport {
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut rows = vec![[
            "method",
            "statistic",
            "df",
            "p_value",
            "alpha",
            "decision",
            "n_policy",
            "effective_n",
        ]
        .map(String::from)
        .to_vec()];
        for r in &self.results {
            rows.push(vec![
                r.method.as_str().to_string(),
                r.statistic.to_string(),
                fmt_df(&r.df),
                r.p_value.to_string(),
                r.alpha.get().to_string(),
                r.decision.as_str().to_string(),
                r.n_policy_used.map(|p| p.as_str().to_string()).unwrap_or_default(),
                opt(r.effective_n),
            ]);
        }
        csv_string(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "x: n={} mean={:.3} var={:.3}\ny: n={} mean={:.3} var={:.3}\n\n",
            self.x.n, self.x.mean, self.x.variance, self.y.n, self.y.mean, self.y.variance
        ));
        out.push_str(&format!(
            "{:<12} {:>12} {:>10} {:>8} {:>6}  {}\n",
            "method", "statistic", "df", "p", "alpha", "decision"
        ));
        for r in &self.results {
            let mut decision = r.decision.as_str().to_string();
            if let Some(p) = r.n_policy_used {
                decision.push_str(&format!(" (n={})", p.as_str()));
            }
            out.push_str(&format!(
                "{:<12} {:>12.6} {:>10} {:>8} {:>6}  {}\n",
                r.method.as_str(),
                r.statistic,
                fmt_df(&r.df),
                fmt_p(r.p_value),
                r.alpha.get(),
                decision
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

impl DistReport {
    pub fn to_csv(&self, digits: usize) -> csv::Result<String> {
        let mut rows = vec![["input", "output", "method", "error_estimate"].map(String::from).to_vec()];
        for r in &self.rows {
            rows.push(vec![
                r.input.to_string(),
                fmt_value(r.output, digits),
                r.method.clone(),
                r.error_estimate.map(|e| format!("{e:.1e}")).unwrap_or_default(),
            ]);
        }
        csv_string(rows)
    }
}

/// Fixed decimals, switching to scientific notation for tiny nonzero values.
pub fn fmt_value(v: f64, digits: usize) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:.digits$e}")
    } else {
        format!("{v:.digits$}")
    }
}

impl PowerReport {
    /// One row per (curve, grid point).
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut rows = vec![[
            "n",
            "sigma",
            "alpha",
            "reps",
            "quantile_mode",
            "critical_value",
            "mu_x",
            "mu_y",
            "delta_mu",
            "proposed_power",
            "t_power",
        ]
        .map(String::from)
        .to_vec()];
        for c in &self.curves {
            for p in &c.points {
                rows.push(vec![
                    c.config.n.to_string(),
                    c.config.sigma.to_string(),
                    c.config.alpha.get().to_string(),
                    c.config.reps.to_string(),
                    format!("{:?}", c.config.quantile_mode).to_uppercase(),
                    c.critical_value.to_string(),
                    c.config.mu_x.to_string(),
                    p.mu_y.to_string(),
                    p.delta_mu.to_string(),
                    p.proposed_power.to_string(),
                    p.t_power.to_string(),
                ]);
            }
        }
        csv_string(rows)
    }

    /// Minimal columns for plotting power against the mean difference.
    pub fn plot_csv(&self) -> csv::Result<String> {
        let mut rows = vec![["n", "sigma", "delta_mu", "proposed_power", "t_power"].map(String::from).to_vec()];
        for c in &self.curves {
            for p in &c.points {
                rows.push(vec![
                    c.config.n.to_string(),
                    c.config.sigma.to_string(),
                    p.delta_mu.to_string(),
                    p.proposed_power.to_string(),
                    p.t_power.to_string(),
                ]);
            }
        }
        csv_string(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.curves {
            out.push_str(&format!(
                "n={} sigma={} alpha={} reps={} critical t*={:.6}\n",
                c.config.n,
                c.config.sigma,
                c.config.alpha.get(),
                c.config.reps,
                c.critical_value
            ));
            out.push_str(&format!("{:>12} {:>10} {:>10}\n", "delta_mu", "proposed", "t"));
            for p in &c.points {
                out.push_str(&format!("{:>12.6} {:>10.4} {:>10.4}\n", p.delta_mu, p.proposed_power, p.t_power));
            }
            out.push('\n');
        }
        out
    }
}

impl Type1Report {
    /// One row per table cell: (n, sigma, alpha).
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut rows = vec![["n", "variance", "sigma", "reps", "alpha", "proposed_rate", "t_rate", "identical"]
            .map(String::from)
            .to_vec()];
        for r in &self.table.rows {
            for c in &r.rates {
                rows.push(vec![
                    r.n.to_string(),
                    r.label.clone().unwrap_or_default(),
                    r.sigma.to_string(),
                    r.reps.to_string(),
                    c.alpha.to_string(),
                    c.proposed.to_string(),
                    c.t.to_string(),
                    r.identical_decisions.to_string(),
                ]);
            }
        }
        csv_string(rows)
    }

    /// Raw p-value streams, one row per replicate, for histograms.
    pub fn pvalues_csv(&self) -> csv::Result<String> {
        let mut rows = vec![["n", "sigma", "replicate", "p_proposed", "p_t"].map(String::from).to_vec()];
        for r in &self.table.rows {
            for (i, (pc, pt)) in r.p_proposed.iter().zip(&r.p_t).enumerate() {
                rows.push(vec![r.n.to_string(), r.sigma.to_string(), i.to_string(), pc.to_string(), pt.to_string()]);
            }
        }
        csv_string(rows)
    }

    pub fn to_text(&self) -> String {
        let mut levels: Vec<f64> = Vec::new();
        for r in &self.table.rows {
            for c in &r.rates {
                if !levels.contains(&c.alpha) {
                    levels.push(c.alpha);
                }
            }
        }
        let mut out = format!("{:>5} {:>8} {:>7}", "n", "variance", "sigma");
        for a in &levels {
            out.push_str(&format!(" {:>9}", format!("prop@{a}")));
        }
        for a in &levels {
            out.push_str(&format!(" {:>9}", format!("t@{a}")));
        }
        out.push_str("  identical\n");
        for r in &self.table.rows {
            out.push_str(&format!("{:>5} {:>8} {:>7}", r.n, r.label.as_deref().unwrap_or("-"), r.sigma));
            let cell = |a: f64| r.rates.iter().find(|c| c.alpha == a);
            for &a in &levels {
                out.push_str(&format!(" {:>9}", cell(a).map(|c| format!("{:.3}", c.proposed)).unwrap_or_default()));
            }
            for &a in &levels {
                out.push_str(&format!(" {:>9}", cell(a).map(|c| format!("{:.3}", c.t)).unwrap_or_default()));
            }
            out.push_str(&format!("  {}\n", r.identical_decisions));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_formatting() {
        assert_eq!(fmt_p(0.000_49), "0.000");
        assert_eq!(fmt_p(0.4112), "0.411");
        assert_eq!(fmt_p(0.0101), "0.010");
        assert_eq!(fmt_p(1.0), "1.000");
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn value_formatting() {
        assert_eq!(fmt_value(1.0, 6), "1.000000");
        assert_eq!(fmt_value(0.0, 3), "0.000");
        assert_eq!(fmt_value(2.5e-7, 3), "2.500e-7");
    }
}
