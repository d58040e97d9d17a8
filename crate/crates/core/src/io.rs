//! Plain-text file formats.
//!
//! Floats are written with Rust's shortest round-trip formatting (see
//! [`fmt_f64`]), so every value reads back bit-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::blowup::BlowupProfile;
use crate::error::{Error, Result};
use crate::measure::CirculationMeasure;
use crate::minimizer::TraceRow;
use crate::torus::{Field, SpectralTorus};

/// Shortest round-trip decimal; exponent notation outside `[1e-4, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Parses `alpha weight` pairs, one per line. Blank lines and text after `#`
/// are ignored.
pub fn parse_atoms(text: &str, path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected `alpha weight`, got {line:?}")));
        }
        let number = |s: &str| s.parse::<f64>().map_err(|_| parse_err(format!("not a number: {s:?}")));
        pairs.push((number(fields[0])?, number(fields[1])?));
    }
    Ok(pairs)
}

pub fn read_measure(path: &Path) -> Result<CirculationMeasure> {
    let text = fs::read_to_string(path)?;
    CirculationMeasure::new_atomic(&parse_atoms(&text, path)?)
}

pub fn format_measure(measure: &CirculationMeasure) -> String {
    let mut out = String::from("# alpha weight\n");
    for a in measure.atoms() {
        out.push_str(&format!("{} {}\n", fmt_f64(a.alpha), fmt_f64(a.weight)));
    }
    out
}

/// Field CSV: header `# torus L=<L> n=<n>`, then `n` rows of `n` values.
pub fn format_field(torus: &SpectralTorus, field: &Field) -> String {
    let n = field.n();
    let mut out = format!("# torus L={} n={}\n", fmt_f64(torus.side()), n);
    for row in field.values().chunks(n) {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Reads a field CSV, returning the side length from its header.
pub fn parse_field(text: &str, path: &Path) -> Result<(f64, Field)> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
    let mut side = None;
    let mut n = None;
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = token.strip_prefix("L=") {
            side = v.parse::<f64>().ok();
        } else if let Some(v) = token.strip_prefix("n=") {
            n = v.parse::<usize>().ok();
        }
    }
    let (side, n) = match (side, n) {
        (Some(s), Some(n)) => (s, n),
        _ => return Err(parse_err(1, format!("bad header {header:?}"))),
    };
    let mut values = Vec::with_capacity(n * n);
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(idx + 2, e.to_string()))?;
        if row.len() != n {
            return Err(parse_err(idx + 2, format!("expected {n} values, got {}", row.len())));
        }
        values.extend(row);
    }
    Ok((side, Field::from_values(n, values)?))
}

pub fn read_field(path: &Path) -> Result<(f64, Field)> {
    parse_field(&fs::read_to_string(path)?, path)
}

pub fn format_trace(trace: &[TraceRow], seed: u64) -> String {
    let mut out = format!("# seed={seed}\niter,J,residual_norm,step,max_v\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.iter,
            fmt_f64(r.energy),
            fmt_f64(r.residual_norm),
            fmt_f64(r.step),
            fmt_f64(r.max_v)
        ));
    }
    out
}

pub fn format_profile(profile: &BlowupProfile) -> String {
    let mut out = String::from("r,dw,fit_prediction\n");
    for s in &profile.samples {
        let prediction = profile
            .fit
            .map(|f| fmt_f64(f.predict(s.r, profile.sigma)))
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", fmt_f64(s.r), fmt_f64(s.dw), prediction));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_with_comments() {
        let text = "# header\n1.0 0.5  # first\n\n-0.5 0.5\n";
        let pairs = parse_atoms(text, Path::new("m.txt")).unwrap();
        assert_eq!(pairs, vec![(1.0, 0.5), (-0.5, 0.5)]);
    }

    #[test]
    fn malformed_line_is_named() {
        let err = parse_atoms("1.0 1.0\nx y\n", Path::new("m.txt")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_atoms("1.0\n", Path::new("m.txt")).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.0, 1.0, 0.1, 1e-20, -3.25e-7, 2.0e17, f64::MIN_POSITIVE, f64::MAX, 8.0 * std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(0.5), "0.5");
    }

    #[test]
    fn field_round_trip_is_exact() {
        let t = SpectralTorus::new(0.7, 16).unwrap();
        let f = t.project_zero_mean(&t.sample(|x, y| (x * 9.1).sin() * (y * 3.3).exp() / 3.0));
        let text = format_field(&t, &f);
        assert!(text.starts_with("# torus L=0.7 n=16\n"));
        let (side, back) = parse_field(&text, Path::new("f.csv")).unwrap();
        assert_eq!(side, 0.7);
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn measure_round_trip() {
        let p = CirculationMeasure::new_atomic(&[(0.1, 0.3), (1.0, 0.7)]).unwrap();
        let back = parse_atoms(&format_measure(&p), Path::new("p")).unwrap();
        let q = CirculationMeasure::new_atomic(&back).unwrap();
        assert_eq!(p, q);
    }
}
