//! Parameter sweeps and verification runs behind the `qswitch` binary.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{
    h_min, h_min_general, holevo_analytic, optimize_ensemble, reduced_control_state, CapacityReport,
};
use crate::channels::depolarizing_channel;
use crate::error::{Error, Result};
use crate::oracle::{verify_equivalence, ComparisonReport, Suite};
use crate::qmat::von_neumann_entropy;
use crate::switch::{ControlState, SwitchedChannel};

pub const CSV_HEADER: &str = "d,q,p,chi_analytic,chi_numeric,entropy_control,h_min";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::param("format", format!("expected csv or json, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub q_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub optimizer_trials: usize,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: vec![2],
            q_values: vec![0.0],
            p_values: vec![0.5],
            optimizer_trials: 200,
            seed: 0,
            format: OutputFormat::Csv,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Empty("dimension list"));
        }
        if self.q_values.is_empty() {
            return Err(Error::Empty("q list"));
        }
        if self.p_values.is_empty() {
            return Err(Error::Empty("p list"));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::param("dims", format!("dimension must be at least 2, got {d}")));
        }
        for (name, list) in [("q", &self.q_values), ("p", &self.p_values)] {
            if let Some(x) = list.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::param(name, format!("{x} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Rows in `(d, q, p)` lexicographic order, duplicates removed.
    fn grid(&self) -> Vec<(usize, f64, f64)> {
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        dims.dedup();
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let (qs, ps) = (sorted(&self.q_values), sorted(&self.p_values));
        let mut rows = Vec::new();
        for &d in &dims {
            for &q in &qs {
                for &p in &ps {
                    rows.push((d, q, p));
                }
            }
        }
        rows
    }
}

fn is_plus(p: f64) -> bool {
    (p - 0.5).abs() < 1e-12
}

fn row_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn sweep_row(d: usize, q: f64, p: f64, trials: usize, seed: u64) -> Result<CapacityReport> {
    let ctrl = ControlState::coherent(p)?;
    let dep = depolarizing_channel(d, q)?;
    let sw = SwitchedChannel::new(&dep, &dep, ctrl)?;
    let numeric = optimize_ensemble(&sw, trials, seed)?;
    let entropy_control = von_neumann_entropy(&reduced_control_state(d, q, &ctrl)?)?;
    let (chi_analytic, h) = if is_plus(p) {
        (Some(holevo_analytic(d, q)?.chi), h_min(d, q)?)
    } else {
        (None, h_min_general(d, q, &ctrl)?)
    };
    Ok(CapacityReport {
        d,
        q,
        p,
        chi_analytic,
        chi_numeric: numeric.chi,
        entropy_control,
        h_min: h,
        optimizer_diagnostics: numeric.diagnostics,
    })
}

/// One row per `(d, q, p)`; rows may be computed in parallel but come back
/// in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<CapacityReport>> {
    cfg.validate()?;
    cfg.grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, (d, q, p))| sweep_row(d, q, p, cfg.optimizer_trials, row_seed(cfg.seed, i)))
        .collect()
}

/// `printf("%.{sig}g")`-style formatting.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(rows: &[CapacityReport]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let chi_analytic = r.chi_analytic.map(|c| format_sig(c, 12)).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.d,
            format_sig(r.q, 12),
            format_sig(r.p, 12),
            chi_analytic,
            format_sig(r.chi_numeric, 12),
            format_sig(r.entropy_control, 12),
            format_sig(r.h_min, 12),
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    d: usize,
    q: f64,
    p: f64,
    chi_analytic: Option<f64>,
    chi_numeric: f64,
    entropy_control: f64,
    h_min: f64,
}

pub fn render_json(rows: &[CapacityReport]) -> String {
    let rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            d: r.d,
            q: r.q,
            p: r.p,
            chi_analytic: r.chi_analytic,
            chi_numeric: r.chi_numeric,
            entropy_control: r.entropy_control,
            h_min: r.h_min,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn render(rows: &[CapacityReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(rows),
    }
}

/// Runs the named suite; fails only on an unknown name.
pub fn run_verify(suite: &str, tolerance: f64) -> Result<ComparisonReport> {
    verify_equivalence(suite.parse::<Suite>()?, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.25, 12), "0.25");
        assert_eq!(format_sig(0.0487949406953985, 12), "0.0487949406954");
        assert_eq!(format_sig(1.90563906222957, 12), "1.90563906223");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_sig(-2.0e-13, 12), "-2e-13");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e+14");
    }

    #[test]
    fn config_validation() {
        let ok = SweepConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SweepConfig { dims: vec![], ..ok.clone() },
            SweepConfig { dims: vec![1], ..ok.clone() },
            SweepConfig { q_values: vec![1.5], ..ok.clone() },
            SweepConfig { p_values: vec![-0.5], ..ok.clone() },
            SweepConfig { p_values: vec![], ..ok.clone() },
        ] {
            assert!(run_sweep(&bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn grid_is_sorted_and_deduplicated() {
        let cfg = SweepConfig {
            dims: vec![3, 2, 3],
            q_values: vec![0.5, 0.0],
            p_values: vec![0.5],
            ..SweepConfig::default()
        };
        assert_eq!(cfg.grid(), vec![(2, 0.0, 0.5), (2, 0.5, 0.5), (3, 0.0, 0.5), (3, 0.5, 0.5)]);
    }

    #[test]
    fn sweep_reference_row() {
        let cfg = SweepConfig {
            optimizer_trials: 20,
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!((r.chi_analytic.unwrap() - 0.048795).abs() < 1e-6);
        assert!((r.chi_numeric - 0.048795).abs() < 1e-6);
        assert!((r.entropy_control - 0.954434).abs() < 1e-6);
        assert!((r.h_min - 1.905639).abs() < 1e-6);
    }

    #[test]
    fn off_plus_rows_have_no_analytic_value() {
        let cfg = SweepConfig {
            p_values: vec![0.3],
            optimizer_trials: 10,
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows[0].chi_analytic.is_none());
        let csv = render_csv(&rows);
        let line = csv.lines().nth(1).unwrap();
        assert!(line.starts_with("2,0,0.3,,"), "{line}");
        let json: serde_json::Value = serde_json::from_str(&render_json(&rows)).unwrap();
        assert!(json[0]["chi_analytic"].is_null());
    }

    #[test]
    fn noiseless_row_is_one_bit() {
        let cfg = SweepConfig {
            q_values: vec![1.0],
            optimizer_trials: 10,
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert!((rows[0].chi_analytic.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_verify("nonexistent", 1e-9), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn json_keys_follow_csv_header() {
        let rows = run_sweep(&SweepConfig {
            optimizer_trials: 2,
            ..SweepConfig::default()
        })
        .unwrap();
        let json = render_json(&rows);
        let keys: Vec<&str> = CSV_HEADER.split(',').collect();
        let mut last = 0;
        for k in keys {
            let pos = json.find(&format!("\"{k}\"")).unwrap();
            assert!(pos >= last, "key {k} out of order");
            last = pos;
        }
    }
}
