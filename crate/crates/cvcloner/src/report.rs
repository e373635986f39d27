//! Flat result rows and their table, CSV, and JSON renderings.
//!
//! All three renderings are emitted by hand so the byte output is stable:
//! floats are printed with [`format_sig`] (12 significant digits, fixed
//! notation for exponents in [-4, 12), scientific otherwise, trailing zeros
//! trimmed), fields appear in [`CSV_HEADER`] order, and absent values are an
//! empty CSV field, a JSON `null`, and `-` in tables. Lines end with `\n`.

use crate::cloners::{CloneReport, Machine};
use crate::CloneCount;

/// Column order of every rendering.
pub const CSV_HEADER: &str =
    "machine,n,m,epsilon,r,gain,var_x,var_p,fidelity_analytic,fidelity_circuit,fidelity_mc,mc_stderr,seed";

/// One cloning result, flattened for output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub machine: Machine,
    pub n: u32,
    pub m: CloneCount,
    pub epsilon: f64,
    pub r: f64,
    pub gain: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub fidelity_analytic: f64,
    pub fidelity_circuit: Option<f64>,
    pub fidelity_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// Seed of the Monte Carlo run, when one was attached.
    pub seed: Option<u64>,
}

impl From<&CloneReport> for ReportRow {
    fn from(rep: &CloneReport) -> Self {
        Self {
            machine: rep.machine,
            n: rep.params.n,
            m: rep.params.m,
            epsilon: rep.params.epsilon,
            r: rep.params.r,
            gain: rep.gain,
            var_x: rep.var_x,
            var_p: rep.var_p,
            fidelity_analytic: rep.fidelity_analytic,
            fidelity_circuit: rep.fidelity_circuit,
            fidelity_mc: rep.fidelity_mc.map(|(mean, _)| mean),
            mc_stderr: rep.fidelity_mc.map(|(_, stderr)| stderr),
            seed: None,
        }
    }
}

impl ReportRow {
    fn cells(&self) -> Vec<String> {
        vec![
            self.machine.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            format_sig(self.epsilon),
            format_sig(self.r),
            format_sig(self.gain),
            format_sig(self.var_x),
            format_sig(self.var_p),
            format_sig(self.fidelity_analytic),
            self.fidelity_circuit.map(format_sig).unwrap_or_default(),
            self.fidelity_mc.map(format_sig).unwrap_or_default(),
            self.mc_stderr.map(format_sig).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    /// One CSV line (no header, no trailing newline).
    pub fn csv(&self) -> String {
        self.cells().join(",")
    }

    /// One JSON object with explicit nulls. `m` is a number or the string
    /// `"inf"`.
    pub fn json(&self) -> String {
        let m = match self.m {
            CloneCount::Finite(m) => m.to_string(),
            CloneCount::Inf => "\"inf\"".to_string(),
        };
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_else(|| "null".into());
        format!(
            "{{\"machine\":\"{}\",\"n\":{},\"m\":{},\"epsilon\":{},\"r\":{},\"gain\":{},\
             \"var_x\":{},\"var_p\":{},\"fidelity_analytic\":{},\"fidelity_circuit\":{},\
             \"fidelity_mc\":{},\"mc_stderr\":{},\"seed\":{}}}",
            self.machine,
            self.n,
            m,
            format_sig(self.epsilon),
            format_sig(self.r),
            format_sig(self.gain),
            format_sig(self.var_x),
            format_sig(self.var_p),
            format_sig(self.fidelity_analytic),
            opt(self.fidelity_circuit),
            opt(self.fidelity_mc),
            opt(self.mc_stderr),
            self.seed.map(|s| s.to_string()).unwrap_or_else(|| "null".into()),
        )
    }
}

/// Renders rows as CSV with the header line.
pub fn csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv());
        out.push('\n');
    }
    out
}

/// Renders rows as a JSON array, one object per line.
pub fn json(rows: &[ReportRow]) -> String {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(if i == 0 { "\n  " } else { ",\n  " });
        out.push_str(&row.json());
    }
    out.push_str("\n]\n");
    out
}

/// Renders rows as an aligned text table; absent values show as `-`.
pub fn table(rows: &[ReportRow]) -> String {
    let header: Vec<String> = CSV_HEADER.split(',').map(str::to_string).collect();
    let mut grid = vec![header];
    for row in rows {
        grid.push(
            row.cells()
                .into_iter()
                .map(|c| if c.is_empty() { "-".to_string() } else { c })
                .collect(),
        );
    }
    render_grid(&grid)
}

/// Aligns a grid of cells into columns two spaces apart.
pub(crate) fn render_grid(grid: &[Vec<String>]) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().filter_map(|row| row.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in grid {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<width$}", width = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Formats a float with 12 significant digits: fixed notation while the
/// decimal exponent lies in [-4, 12), scientific (`1.5e-7`) otherwise, and
/// trailing zeros trimmed in both. The output parses as a JSON number.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // {:.11e} yields sign, one leading digit, 11 fraction digits, exponent.
    let sci = format!("{x:.11e}");
    let (mantissa, exp_str) = sci.split_once('e').expect("e-format always has an exponent");
    let exp: i32 = exp_str.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    debug_assert_eq!(digits.len(), 12);

    let body = if (-4..12).contains(&exp) {
        if exp >= 0 {
            let split = exp as usize + 1;
            let int_part = &digits[..split];
            let frac = digits[split..].trim_end_matches('0');
            if frac.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac}")
            }
        } else {
            let frac = digits.trim_end_matches('0');
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), frac)
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{exp}", &digits[..1])
        } else {
            format!("{}.{frac}e{exp}", &digits[..1])
        }
    };
    format!("{sign}{body}")
}
