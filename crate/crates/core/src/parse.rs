//! Text and JSON polynomial formats.
//!
//! Text: comma-separated complex literals in ascending degree, e.g.
//! `1,0,1,1i` for `1 + z^2 + i z^3` or `1,0,1,0.001+1i`.
//! JSON: `{"coeffs": [[re, im], ...]}` with an optional `"truncated": true`.

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("invalid coefficient {token:?} at position {position} (term {index}): {reason}")]
    Literal {
        token: String,
        /// Byte offset of the token in the input.
        position: usize,
        /// Zero-based coefficient index (= degree).
        index: usize,
        reason: &'static str,
    },
    #[error("empty polynomial")]
    Empty,
    #[error("invalid polynomial JSON: {0}")]
    Json(String),
}

fn parse_real(s: &str) -> Option<f64> {
    if s.is_empty() || s.contains(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(s),
    }
}

/// Parses one complex literal such as `2`, `-1.5e-3`, `1i`, `-i` or `0.001+1i`.
pub fn parse_complex(token: &str) -> Result<Complex64, &'static str> {
    let s = token.trim();
    if s.is_empty() {
        return Err("empty literal");
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(s)
            .map(|re| Complex64::new(re, 0.0))
            .ok_or("not a real number");
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(pos) => {
            let re = parse_real(&body[..pos]).ok_or("bad real part")?;
            let im = parse_imag(&body[pos..]).ok_or("bad imaginary part")?;
            Ok(Complex64::new(re, im))
        }
        None => parse_imag(body)
            .map(|im| Complex64::new(0.0, im))
            .ok_or("bad imaginary part"),
    }
}

pub fn parse_poly(text: &str) -> Result<Polynomial, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for (index, raw) in text.split(',').enumerate() {
        let lead = raw.len() - raw.trim_start().len();
        let value = parse_complex(raw).map_err(|reason| ParseError::Literal {
            token: raw.trim().to_string(),
            position: offset + lead,
            index,
            reason,
        })?;
        coeffs.push(value);
        offset += raw.len() + 1;
    }
    Ok(Polynomial::new(coeffs))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    truncated: bool,
}

pub fn parse_poly_json(text: &str) -> Result<Polynomial, ParseError> {
    let raw: PolyJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    if raw.coeffs.is_empty() {
        return Err(ParseError::Empty);
    }
    let p = Polynomial::new(
        raw.coeffs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
    );
    Ok(if raw.truncated {
        p.into_truncated_series()
    } else {
        p
    })
}

/// `[[re, im], ...]` as used by the JSON format and the reports.
pub fn coeffs_to_pairs(p: &Polynomial) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn literals() {
        assert_eq!(parse_complex("1"), Ok(c(1.0, 0.0)));
        assert_eq!(parse_complex("-2.5"), Ok(c(-2.5, 0.0)));
        assert_eq!(parse_complex("1i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("0.001+1i"), Ok(c(0.001, 1.0)));
        assert_eq!(parse_complex("3-i"), Ok(c(3.0, -1.0)));
        assert_eq!(parse_complex("+2.-.5i"), Ok(c(2.0, -0.5)));
        assert_eq!(parse_complex("1e-3+2e2i"), Ok(c(1e-3, 200.0)));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("inf").is_err());
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn figure_polynomials() {
        let p = parse_poly("1,0,1,1i").unwrap();
        assert_eq!(
            p.coeffs(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]
        );
        let q = parse_poly("1, 0, 1, 0.001+1i").unwrap();
        assert_eq!(q.coeff(3), c(0.001, 1.0));
    }

    #[test]
    fn error_names_token_and_position() {
        let err = parse_poly("1,0,x2,1").unwrap_err();
        assert_eq!(
            err,
            ParseError::Literal {
                token: "x2".into(),
                position: 4,
                index: 2,
                reason: "not a real number"
            }
        );
        assert!(err.to_string().contains("\"x2\""));
        assert_eq!(parse_poly("  "), Err(ParseError::Empty));
        assert!(matches!(
            parse_poly("1,,2"),
            Err(ParseError::Literal { index: 1, .. })
        ));
    }

    #[test]
    fn zero_parses_to_zero_polynomial() {
        assert!(parse_poly("0").unwrap().is_zero());
    }

    #[test]
    fn json_format() {
        let p = parse_poly_json(r#"{"coeffs": [[1,0],[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(p, parse_poly("1,0,1,1i").unwrap());
        let t = parse_poly_json(r#"{"coeffs": [[1,0],[1,0]], "truncated": true}"#).unwrap();
        assert!(t.is_truncated_series());
        assert!(parse_poly_json(r#"{"coeffs": [[1]]}"#).is_err());
        assert!(parse_poly_json(r#"{"coeffs": []}"#).is_err());
    }
}
