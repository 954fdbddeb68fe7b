use std::io::BufRead;
use std::path::Path;

use super::{assemble_ridge, paper_delta, DeltaSource, RidgeComponent};
use crate::numkit::{DenseMatrix, DenseVector};
use crate::oracle::Problem;
use crate::{Error, Real, Result};

/// One parsed LIBSVM row: label and sparse 0-based `(index, value)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct LibsvmRow {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses one `label idx:val idx:val ...` line (`line` is 1-based, for errors).
pub fn parse_line(text: &str, line: usize) -> Result<LibsvmRow> {
    let mut tokens = text.split_whitespace();
    let label_tok = tokens.next().ok_or_else(|| parse_err(line, "empty line"))?;
    let label: f64 = label_tok.parse().map_err(|_| parse_err(line, format!("bad label `{label_tok}`")))?;
    if !label.is_finite() {
        return Err(parse_err(line, "non-finite label"));
    }
    let mut features = Vec::new();
    let mut last = 0usize;
    for tok in tokens {
        let (idx, val) = tok.split_once(':').ok_or_else(|| parse_err(line, format!("expected idx:val, got `{tok}`")))?;
        let idx: usize = idx.parse().map_err(|_| parse_err(line, format!("bad index `{idx}`")))?;
        if idx == 0 {
            return Err(parse_err(line, "indices are 1-based"));
        }
        if idx <= last {
            return Err(parse_err(line, format!("index {idx} not increasing")));
        }
        last = idx;
        let val: f64 = val.parse().map_err(|_| parse_err(line, format!("bad value `{val}`")))?;
        if !val.is_finite() {
            return Err(parse_err(line, "non-finite value"));
        }
        features.push((idx - 1, val));
    }
    Ok(LibsvmRow { label, features })
}

/// Reads every non-blank line of a LIBSVM file.
pub fn read_libsvm<R: BufRead>(reader: R) -> Result<Vec<LibsvmRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_line(&line, i + 1)?);
    }
    Ok(rows)
}

/// Splits the first `n_clients * per_client` rows contiguously into ridge
/// components. Features and labels are divided by `sqrt(per_client / 2)`;
/// the dimension is the largest feature index in the file.
pub fn rows_to_problem<T: Real>(rows: &[LibsvmRow], n_clients: usize, per_client: usize, mu: f64) -> Result<Problem<T>> {
    if n_clients == 0 || per_client == 0 {
        return Err(Error::InvalidParameter("n_clients and per_client must be positive".into()));
    }
    let needed = n_clients * per_client;
    if rows.len() < needed {
        return Err(Error::InsufficientRows { needed, available: rows.len() });
    }
    let d = rows.iter().flat_map(|r| r.features.iter().map(|&(i, _)| i + 1)).max().unwrap_or(0);
    if d == 0 {
        return Err(Error::InvalidParameter("file has no features".into()));
    }
    let scale = 1.0 / (per_client as f64 / 2.0).sqrt();
    let mut comps = Vec::with_capacity(n_clients);
    let mut zs = Vec::with_capacity(n_clients);
    for chunk in rows[..needed].chunks(per_client) {
        let mut z = DenseMatrix::<T>::zeros(d, per_client);
        let mut y = DenseVector::<T>::zeros(per_client);
        for (j, row) in chunk.iter().enumerate() {
            y[j] = T::lit(row.label * scale);
            for &(i, v) in &row.features {
                z[(i, j)] = T::lit(v * scale);
            }
        }
        zs.push(z.clone());
        comps.push(RidgeComponent::new(z, y, T::lit(mu))?);
    }
    let delta_paper = paper_delta(&zs)?;
    assemble_ridge(comps, T::lit(mu), delta_paper, DeltaSource::Paper, "libsvm", None)
}

pub fn load_libsvm<T: Real>(path: &Path, n_clients: usize, per_client: usize, mu: f64) -> Result<Problem<T>> {
    let file = std::fs::File::open(path)?;
    let rows = read_libsvm(std::io::BufReader::new(file))?;
    rows_to_problem(&rows, n_clients, per_client, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_feature_line() {
        let row = parse_line("+1 3:0.5", 1).unwrap();
        assert_eq!(row.label, 1.0);
        assert_eq!(row.features, vec![(2, 0.5)]);
    }

    #[test]
    fn scientific_notation_is_exact() {
        let row = parse_line("-1 1:1.5e-3 7:2E2", 1).unwrap();
        assert_eq!(row.label, -1.0);
        assert_eq!(row.features, vec![(0, 1.5e-3), (6, 200.0)]);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let text = "+1 1:1\n-1 2:x\n";
        match read_libsvm(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_line("+1 0:1", 4).is_err());
        assert!(parse_line("+1 3:1 2:1", 4).is_err());
        assert!(parse_line("+1 3", 4).is_err());
        assert!(parse_line("abc 1:1", 4).is_err());
    }

    #[test]
    fn densifies_to_max_index() {
        let rows = read_libsvm("+1 3:0.5\n-1 1:1\n+1 4:2\n-1 2:1\n".as_bytes()).unwrap();
        let p = rows_to_problem::<f64>(&rows, 2, 2, 0.1).unwrap();
        assert_eq!(p.dim(), 4);
        assert_eq!(p.n(), 2);
        assert!(matches!(rows_to_problem::<f64>(&rows, 3, 2, 0.1), Err(Error::InsufficientRows { needed: 6, available: 4 })));
    }
}
