//! Locale-free numeric formatting and in-memory CSV tables.

use crate::error::Result;

/// Format `v` with `digits` significant digits. Fixed notation for
/// `1e-3 ≤ |v| < 1e6`, scientific otherwise; `nan` for NaN.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    // exponent after rounding decides the notation
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if !(-3..6).contains(&exp) {
        return sci;
    }
    // rebuild fixed notation from the rounded mantissa digits
    let (sign, body) = sci.strip_prefix('-').map_or(("", sci.as_str()), |b| ("-", b));
    let mantissa: String = body[..body.find('e').expect("exponent")].chars().filter(|c| *c != '.').collect();
    let fixed = if exp >= 0 {
        let split = exp as usize + 1;
        let padded = format!("{mantissa:0<split$}");
        let (int, frac) = padded.split_at(split);
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        format!("0.{}{mantissa}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{fixed}")
}

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    digits: usize,
}

impl Table {
    pub fn new(header: &[&str], digits: usize) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            digits,
        }
    }

    pub fn push_numbers(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.header.len(), "row width");
        self.rows.push(values.iter().map(|&v| format_sig(v, self.digits)).collect());
    }

    pub fn push_cells(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells);
    }

    pub fn fmt(&self, v: f64) -> String {
        format_sig(v, self.digits)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
    }
}
