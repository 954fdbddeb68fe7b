use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::{BenchError, Result};

/// Path of `target` as seen from `base`, when `target` lies under it.
fn relative_to(target: &Path, base: &Path) -> PathBuf {
    target.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| target.to_path_buf())
}

fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\'', "''")
}

/// Gnuplot script drawing `f_gap` (log scale) against cumulative
/// communications, one curve per `(title, csv)` pair. CSV paths under
/// `script_dir` are written relative to it.
pub fn plotscript(curves: &[(String, PathBuf)], script_dir: &Path) -> Result<String> {
    if curves.is_empty() {
        return Err(BenchError::EmptyTraces);
    }
    let mut s = String::new();
    s.push_str("# run from this directory: gnuplot plot.gp\n");
    s.push_str("set terminal pngcairo size 1000,650\n");
    s.push_str("set output 'convergence.png'\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside right\n");
    s.push_str("set xlabel 'communications'\n");
    s.push_str("set ylabel 'f(x) - f*'\n");
    s.push_str("set logscale y\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("plot \\\n");
    for (i, (title, path)) in curves.iter().enumerate() {
        let p = relative_to(path, script_dir);
        let sep = if i + 1 == curves.len() { "\n" } else { ", \\\n" };
        let _ = write!(
            s,
            "  '{}' every ::1 using 2:5 with lines title '{}'{sep}",
            quote(&p.to_string_lossy()),
            quote(title)
        );
    }
    Ok(s)
}

pub fn write_plotscript(curves: &[(String, PathBuf)], script: &Path) -> Result<()> {
    let dir = script.parent().unwrap_or_else(|| Path::new("."));
    std::fs::write(script, plotscript(curves, dir)?)?;
    Ok(())
}

/// Trace CSVs in `dir` (every `*.csv` except `summary.csv`), sorted by name.
pub fn find_traces(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_csv = path.extension().is_some_and(|e| e == "csv");
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if is_csv && name != "summary" {
            out.push((name.replace("_seed", " seed "), path));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}
