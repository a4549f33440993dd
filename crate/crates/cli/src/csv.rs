//! Plot-ready CSV output: 17 significant digits, `.` decimal separator,
//! `-inf` for the max-plus zero.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// `%.17g`-style formatting: shortest of fixed or scientific notation with
/// 17 significant digits and trailing zeros removed.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if v == f64::INFINITY {
        return "inf".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// In-memory table written in one go.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_matches_percent_17g() {
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(200.0), "200");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(123456.0), "123456");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 2.615_629_123_456_789, -7.77e-300, 6.02e23] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_render() {
        let mut t = Table::new(&["t", "value"]);
        t.push_numbers(&[0.0, f64::NEG_INFINITY]);
        t.push_numbers(&[1.0, 0.5]);
        assert_eq!(t.render(), "t,value\n0,-inf\n1,0.5\n");
    }
}
