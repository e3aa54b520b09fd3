//! Line-oriented coefficient files in ascending powers of `z⁻¹`.
//!
//! A plain file holds one value per line. A rational filter uses two sections
//! headed `[num]` and `[den]`. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// Contents of a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffFile {
    pub num: Vec<f64>,
    pub den: Option<Vec<f64>>,
}

/// Decimal form with 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_values(out: &mut String, values: &[f64]) {
    for &v in values {
        let _ = writeln!(out, "{}", format_value(v));
    }
}

pub fn format_list(values: &[f64]) -> String {
    let mut out = String::new();
    push_values(&mut out, values);
    out
}

pub fn format_rational(num: &[f64], den: &[f64]) -> String {
    let mut out = String::from("[num]\n");
    push_values(&mut out, num);
    out.push_str("[den]\n");
    push_values(&mut out, den);
    out
}

pub fn parse(text: &str) -> Result<CoeffFile> {
    #[derive(PartialEq)]
    enum Section {
        Plain,
        Num,
        Den,
    }
    let mut section = Section::Plain;
    let mut plain = Vec::new();
    let mut num = Vec::new();
    let mut den = Vec::new();
    let mut seen_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[num]" | "[den]" => {
                if !plain.is_empty() {
                    return Err(CliError::validation(format!(
                        "line {}: section header after unsectioned values",
                        lineno + 1
                    )));
                }
                seen_header = true;
                section = if line == "[num]" {
                    Section::Num
                } else {
                    Section::Den
                };
                continue;
            }
            _ => {}
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::validation(format!("line {}: not a number: {line:?}", lineno + 1))
        })?;
        if !v.is_finite() {
            return Err(CliError::validation(format!(
                "line {}: non-finite coefficient",
                lineno + 1
            )));
        }
        match section {
            Section::Plain => plain.push(v),
            Section::Num => num.push(v),
            Section::Den => den.push(v),
        }
    }
    if seen_header {
        if num.is_empty() || den.is_empty() {
            return Err(CliError::validation(
                "both [num] and [den] must be non-empty",
            ));
        }
        Ok(CoeffFile {
            num,
            den: Some(den),
        })
    } else {
        if plain.is_empty() {
            return Err(CliError::validation("coefficient file is empty"));
        }
        Ok(CoeffFile {
            num: plain,
            den: None,
        })
    }
}

pub fn read(path: &Path) -> Result<CoeffFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn write_list(path: &Path, values: &[f64]) -> Result<()> {
    std::fs::write(path, format_list(values)).map_err(|e| CliError::io(path, e))
}

pub fn write_rational(path: &Path, num: &[f64], den: &[f64]) -> Result<()> {
    std::fs::write(path, format_rational(num, den)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            f64::MIN_POSITIVE,
            123456.789e10,
            -0.0,
        ] {
            let back: f64 = format_value(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn sections_and_comments() {
        let c = parse("# filter\n[num]\n1\n0.5\n\n[den]\n1\n-0.25\n").unwrap();
        assert_eq!(c.num, vec![1.0, 0.5]);
        assert_eq!(c.den, Some(vec![1.0, -0.25]));
        let p = parse("0.25\n0.5\n0.25\n").unwrap();
        assert_eq!(p.den, None);
        assert_eq!(p.num.len(), 3);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse("").is_err());
        assert!(parse("1\nabc\n").is_err());
        assert!(parse("[num]\n1\n").is_err());
        assert!(parse("1\n[num]\n2\n[den]\n1\n").is_err());
        assert!(parse("nan\n").is_err());
    }
}
