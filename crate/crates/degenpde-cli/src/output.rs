//! Deterministic CSV and JSON writers.

use std::fs;
use std::path::Path;

use degenpde::SolutionField;
use serde::Serialize;

use crate::CliError;

/// 17 significant digits.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Six decimals; times too small for that to tell apart fall back to
/// scientific notation.
pub fn snapshot_name(t: f64) -> String {
    let fixed = format!("{t:.6}");
    match fixed.parse::<f64>() {
        Ok(r) if (r - t).abs() <= 1e-3 * t.abs() => format!("snap_t{fixed}.csv"),
        _ => format!("snap_t{t:.6e}.csv"),
    }
}

pub fn write_snapshot(dir: &Path, field: &SolutionField) -> Result<(), CliError> {
    let rows = field.u.iter().enumerate().map(|(i, &u)| vec![field.x(i), u]);
    write(&dir.join(snapshot_name(field.t)), &csv(&["x", "u"], rows))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Pretty JSON with sorted keys: values pass through serde_json::Value,
/// whose map is ordered.
pub fn json<T: Serialize>(v: &T, pretty: bool) -> String {
    let value = serde_json::to_value(v).expect("report values serialize");
    let mut s = if pretty { serde_json::to_string_pretty(&value) } else { serde_json::to_string(&value) }.unwrap();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(snapshot_name(0.05), "snap_t0.050000.csv");
        assert_eq!(snapshot_name(0.0), "snap_t0.000000.csv");
        assert_eq!(snapshot_name(1.5e-50), "snap_t1.500000e-50.csv");
        assert_eq!(csv(&["x", "u"], vec![vec![1.0, 0.0]]), "x,u\n1.0000000000000000e0,0\n");
    }

    #[test]
    fn sorted_keys() {
        let mut m = std::collections::HashMap::new();
        m.insert("b", 1);
        m.insert("a", 2);
        assert_eq!(json(&m, false), "{\"a\":2,\"b\":1}\n");
    }
}
