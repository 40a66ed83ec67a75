//! Parsers for command-line literals: complex coefficients and `p` grid entries.

use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

/// Parses `3`, `-2.5`, `1e-3`, `3+4i`, `3-4i`, `2i`, `-i`.
pub fn parse_scalar(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("not a real or complex literal: {s:?}");
    if s.is_empty() {
        return Err(bad());
    }
    let finite = |z: Complex64| if z.is_finite() { Ok(z) } else { Err(bad()) };
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        return finite(Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    finite(Complex64::new(re, im))
}

/// Comma-separated list of [`parse_scalar`] literals.
pub fn parse_scalar_list(s: &str) -> Result<Vec<Complex64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_scalar).collect()
}

/// Coefficients from JSON: numbers, `[re, im]` pairs or literal strings,
/// either as a bare array or under a `"coeffs"` key.
pub fn scalars_from_json(value: &Value) -> Result<Vec<Complex64>, String> {
    let items = match value {
        Value::Array(items) => items,
        Value::Object(map) => match map.get("coeffs") {
            Some(Value::Array(items)) => items,
            _ => return Err("expected an array or an object with a \"coeffs\" array".into()),
        },
        _ => return Err("expected an array of coefficients".into()),
    };
    items
        .iter()
        .map(|item| match item {
            Value::Number(x) => x
                .as_f64()
                .map(|re| Complex64::new(re, 0.0))
                .ok_or_else(|| format!("bad number {x}")),
            Value::String(s) => parse_scalar(s),
            Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0].as_f64().ok_or("bad real part")?;
                let im = pair[1].as_f64().ok_or("bad imaginary part")?;
                Ok(Complex64::new(re, im))
            }
            other => Err(format!("unsupported coefficient {other}")),
        })
        .collect()
}

pub fn scalars_from_file(path: &Path) -> Result<Vec<Complex64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    scalars_from_json(&value)
}

/// Round-trippable literal for a scalar.
pub fn format_scalar(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn format_scalar_list(v: &[Complex64]) -> String {
    v.iter()
        .map(|&z| format_scalar(z))
        .collect::<Vec<_>>()
        .join(",")
}

/// Exponent grid entry, absolute (`3.5`) or relative to the degree
/// (`k`, `2k`, `k+1`, `k-0.5`, `1.5k+2`).
#[derive(Debug, Clone, PartialEq)]
pub enum PSpec {
    Absolute(f64),
    Relative { scale: f64, shift: f64 },
}

impl PSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("not an exponent expression: {s:?}");
        let Some(pos) = s.find('k') else {
            return s.parse().map(PSpec::Absolute).map_err(|_| bad());
        };
        let (head, tail) = (&s[..pos], &s[pos + 1..]);
        let scale = match head {
            "" => 1.0,
            h => h.trim_end_matches('*').parse().map_err(|_| bad())?,
        };
        let shift = match tail {
            "" => 0.0,
            t if t.starts_with('+') || t.starts_with('-') => t.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        };
        Ok(PSpec::Relative { scale, shift })
    }

    pub fn resolve(&self, k: u32) -> f64 {
        match *self {
            PSpec::Absolute(p) => p,
            PSpec::Relative { scale, shift } => scale * f64::from(k) + shift,
        }
    }
}

impl std::fmt::Display for PSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            PSpec::Absolute(p) => write!(f, "{p}"),
            PSpec::Relative { scale, shift } => {
                if scale != 1.0 {
                    write!(f, "{scale}")?;
                }
                write!(f, "k")?;
                if shift > 0.0 {
                    write!(f, "+{shift}")?;
                } else if shift < 0.0 {
                    write!(f, "{shift}")?;
                }
                Ok(())
            }
        }
    }
}
