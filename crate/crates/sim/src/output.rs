//! CSV and gnuplot output.
//!
//! A sweep CSV starts with a `#` comment block: an optional generation
//! timestamp, the full spec as TOML between `# spec:` and `# end spec`, and
//! per-row annotations (`# row <i> truncated`, `# row <i> estimates <k>`,
//! `# row <i> error <text>`). Then comes the header
//! `axis,errors,bits,ber,rmse_amp,rmse_phase,seed` and one line per point.
//! Fields that do not apply to the sweep are left empty. Floats use Rust's
//! shortest round-trip formatting.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::spec::ExperimentSpec;
use crate::sweep::{Row, SweepResult};

pub const HEADER: &str = "axis,errors,bits,ber,rmse_amp,rmse_phase,seed";

/// Renders `result`; `timestamp` (Unix seconds) goes in the comment block.
pub fn to_csv(result: &SweepResult, timestamp: Option<u64>) -> String {
    let mut s = String::from("# semofdm sweep\n");
    if let Some(t) = timestamp {
        let _ = writeln!(s, "# generated_unix {t}");
    }
    let _ = writeln!(s, "# axis {}", result.spec.sweep.kind.axis_name());
    s.push_str("# spec:\n");
    for line in result.spec.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            let _ = writeln!(s, "# {line}");
        }
    }
    s.push_str("# end spec\n");
    for (i, row) in result.rows.iter().enumerate() {
        if row.truncated {
            let _ = writeln!(s, "# row {i} truncated");
        }
        if let Some(k) = row.estimates {
            let _ = writeln!(s, "# row {i} estimates {k}");
        }
        if let Some(e) = &row.error {
            let _ = writeln!(s, "# row {i} error {}", e.replace('\n', " "));
        }
    }
    s.push_str(HEADER);
    s.push('\n');
    for row in &result.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row.axis,
            opt(row.errors),
            opt(row.bits),
            opt(row.ber),
            opt(row.rmse_amp),
            opt(row.rmse_phase),
            row.seed
        );
    }
    s
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Non-comment lines of a CSV: the part that must be reproducible.
pub fn body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

pub fn write_csv(result: &SweepResult, path: &Path, timestamp: Option<u64>) -> Result<()> {
    write_file(path, &to_csv(result, timestamp))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| SimError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text).map_err(|(line, msg)| SimError::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

/// Inverse of [`to_csv`]. Errors carry a 1-based line number.
pub fn parse_csv(text: &str) -> std::result::Result<SweepResult, (usize, String)> {
    let mut spec_text = String::new();
    let mut in_spec = false;
    let mut notes: Vec<(usize, &str, &str)> = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        if let Some(c) = line.strip_prefix('#') {
            let c = c.strip_prefix(' ').unwrap_or(c);
            if in_spec {
                if c == "end spec" {
                    in_spec = false;
                } else {
                    spec_text.push_str(c);
                    spec_text.push('\n');
                }
            } else if c == "spec:" {
                in_spec = true;
            } else if let Some(rest) = c.strip_prefix("row ") {
                let mut parts = rest.splitn(3, ' ');
                let idx = parts
                    .next()
                    .and_then(|i| i.parse().ok())
                    .ok_or((ln, "bad row annotation".to_string()))?;
                let key = parts.next().unwrap_or("");
                notes.push((idx, key, parts.next().unwrap_or("")));
            }
            continue;
        }
        if !header_seen {
            if line != HEADER {
                return Err((ln, format!("expected header {HEADER:?}")));
            }
            header_seen = true;
            continue;
        }
        rows.push(parse_row(line).map_err(|m| (ln, m))?);
    }
    if !header_seen {
        return Err((text.lines().count(), "missing header".into()));
    }
    let spec = ExperimentSpec::from_toml(&spec_text).map_err(|e| (0, format!("embedded spec: {e}")))?;
    for (idx, key, value) in notes {
        let row: &mut Row = rows.get_mut(idx).ok_or((0, format!("annotation for missing row {idx}")))?;
        match key {
            "truncated" => row.truncated = true,
            "estimates" => row.estimates = Some(value.parse().map_err(|_| (0, "bad estimates".to_string()))?),
            "error" => row.error = Some(value.to_string()),
            other => return Err((0, format!("unknown row annotation {other:?}"))),
        }
    }
    Ok(SweepResult { spec, rows })
}

fn parse_row(line: &str) -> std::result::Result<Row, String> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 7 {
        return Err(format!("expected 7 fields, got {}", f.len()));
    }
    fn num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
        s.parse().map_err(|_| format!("bad number {s:?}"))
    }
    fn opt<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, String> {
        if s.is_empty() { Ok(None) } else { num(s).map(Some) }
    }
    Ok(Row {
        axis: num(f[0])?,
        errors: opt(f[1])?,
        bits: opt(f[2])?,
        ber: opt(f[3])?,
        rmse_amp: opt(f[4])?,
        rmse_phase: opt(f[5])?,
        seed: num(f[6])?,
        ..Row::default()
    })
}

/// One curve of a plot: a CSV file and its legend label.
pub struct Curve<'a> {
    pub csv: &'a Path,
    pub label: &'a str,
}

/// Gnuplot script drawing `curves` (BER or RMSE against the sweep axis,
/// log-scaled y) into `<stem>.png` next to the script.
pub fn plot_script(title: &str, spec: &ExperimentSpec, curves: &[Curve<'_>], png: &Path) -> String {
    let is_ber = spec.sweep.kind.is_ber();
    let (col, ylabel) = if is_ber { (4, "BER") } else { (5, "amplitude RMSE") };
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    let _ = writeln!(s, "set output \"{}\"", png.display());
    let _ = writeln!(s, "set title \"{title}\"");
    let _ = writeln!(s, "set xlabel \"{}\"", spec.sweep.kind.axis_name());
    let _ = writeln!(s, "set ylabel \"{ylabel}\"");
    let _ = writeln!(s, "set logscale y");
    if !is_ber {
        let _ = writeln!(s, "set logscale x");
    }
    let _ = writeln!(s, "set format y \"10^{{%L}}\"");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key outside right");
    let plots: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "\"{}\" every ::1 using 1:{col} with linespoints title \"{}\"",
                c.csv.display(),
                c.label
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Writes a gnuplot script for a single sweep CSV.
pub fn emit_plot_script(result: &SweepResult, csv: &Path, script: &Path) -> Result<()> {
    let png = script.with_extension("png");
    let label = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let text = plot_script(label, &result.spec, &[Curve { csv, label }], &png);
    write_file(script, &text)
}
