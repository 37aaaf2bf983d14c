//! CSV emission, console summary and per-trial diagnostic dumps.
//!
//! Result CSV: header
//! `mode,metric,snr_db,bs_count,theta_deg,nc,ns,trials,failures,rmse`, one
//! row per (point, mode, metric) in sweep order, LF line endings, numbers
//! printed like C's `%g` with 6 significant digits, `theta_deg` empty for
//! ring layouts and `rmse` `nan` when every trial failed.
//!
//! Lattice dumps: header `i,j,x,y,weight`, one row per lattice node in
//! row-major order.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;

use super::sweep::ResultRow;
use crate::error::Result;
use crate::fusion::Lattice;

pub const CSV_HEADER: &str = "mode,metric,snr_db,bs_count,theta_deg,nc,ns,trials,failures,rmse";

/// Formats like `%g` with 6 significant digits.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders rows as CSV text.
pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let theta = r.theta_deg.map(format_g).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.mode,
            r.metric,
            format_g(r.snr_db),
            r.bs_count,
            theta,
            r.nc,
            r.ns,
            r.trials,
            r.failures,
            format_g(r.rmse)
        );
    }
    s
}

/// Writes rows to `path` as CSV.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(render_csv(rows).as_bytes())?;
    Ok(())
}

/// Fixed-width table for the console.
pub fn summary_table(rows: &[ResultRow]) -> String {
    let mut s = format!(
        "{:<7} {:<25} {:>7} {:>3} {:>6} {:>5} {:>5} {:>7} {:>5} {:>12}\n",
        "mode", "metric", "snr_db", "W", "theta", "nc", "ns", "trials", "fail", "rmse"
    );
    for r in rows {
        let theta = r.theta_deg.map(format_g).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<7} {:<25} {:>7} {:>3} {:>6} {:>5} {:>5} {:>7} {:>5} {:>12}",
            r.mode.as_str(),
            r.metric.as_str(),
            format_g(r.snr_db),
            r.bs_count,
            theta,
            r.nc,
            r.ns,
            r.trials,
            r.failures,
            format_g(r.rmse)
        );
    }
    s
}

/// Lattice weights as CSV text.
pub fn render_lattice_csv(lattice: &Lattice<f64>, weights: &Array2<f64>) -> String {
    let mut s = String::from("i,j,x,y,weight\n");
    for ((i, j), w) in weights.indexed_iter() {
        let p = lattice.node(i, j);
        let _ = writeln!(s, "{i},{j},{},{},{}", p.x, p.y, w);
    }
    s
}
