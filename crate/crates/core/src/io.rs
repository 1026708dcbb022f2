//! Readers and writers for the text formats used by the command line.
//!
//! * count tables: `11 2 36`, `11,2,36`, `[11, 2, 36]` or `{"counts": [11, 2, 36]}`;
//!   `#` starts a comment in the plain form
//! * parameter vectors: comma or whitespace separated reals, fractions like
//!   `2/15` allowed
//! * replicate samples: CSV with header
//!   `replicate,pearson,lr,bregman,existed,fitted_total,observed_total`
//! * matrices: CSV of numbers, one row per line, no header

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mle::ObservedTable;
use crate::simulate::ReplicateRecord;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsFile {
    counts: Vec<u64>,
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c == ';' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
}

/// Parses an observed count table.
pub fn parse_counts(text: &str) -> Result<ObservedTable> {
    let trimmed = text.trim_start();
    let counts = if trimmed.starts_with('{') {
        serde_json::from_str::<CountsFile>(text)
            .map_err(|e| Error::Parse(format!("counts: {e}")))?
            .counts
    } else if trimmed.starts_with('[') {
        serde_json::from_str::<Vec<u64>>(text).map_err(|e| Error::Parse(format!("counts: {e}")))?
    } else {
        tokens(text)
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("`{t}` is not a non-negative integer count")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if counts.is_empty() {
        return Err(Error::Parse("no counts found".into()));
    }
    Ok(ObservedTable::new(counts))
}

fn parse_real(t: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("`{t}` is not a finite number"));
    let v = match t.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| bad())?;
            let d: f64 = den.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Parses a list of reals such as `5,8,40` or `1/5 2/3 2/15`.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let v = tokens(text).map(parse_real).collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    Ok(v)
}

pub fn write_samples_csv<W: std::io::Write>(out: W, records: &[ReplicateRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    if records.is_empty() {
        w.write_record([
            "replicate",
            "pearson",
            "lr",
            "bregman",
            "existed",
            "fitted_total",
            "observed_total",
        ])
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_samples_csv<R: std::io::Read>(input: R) -> Result<Vec<ReplicateRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|rec| rec.map_err(|e| Error::Parse(format!("samples: {e}"))))
        .collect()
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn matrix_from_csv(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|t| parse_real(t.trim())).collect())
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn count_formats() {
        for text in [
            "11 2 36",
            "11,2,36\n",
            "# crabs\n11, 2\n36",
            "[11,2,36]",
            "{\"counts\": [11, 2, 36]}",
        ] {
            assert_eq!(parse_counts(text).unwrap().counts(), &[11, 2, 36], "{text}");
        }
        assert!(parse_counts("").is_err());
        assert!(parse_counts("1 -2").is_err());
        assert!(parse_counts("1.5").is_err());
        assert!(parse_counts("{\"counts\": [1], \"x\": 2}").is_err());
    }

    #[test]
    fn vectors_with_fractions() {
        let v = parse_vector("1/5, 2/3 ,2/15").unwrap();
        assert_eq!(v, vec![0.2, 2.0 / 3.0, 2.0 / 15.0]);
        assert!(parse_vector("1/0").is_err());
        assert!(parse_vector("nan").is_err());
        assert!(parse_vector(" ").is_err());
    }

    #[test]
    fn empty_samples_file_has_header() {
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("replicate,pearson"));
    }

    proptest! {
        #[test]
        fn samples_round_trip(values in proptest::collection::vec((any::<f64>(), -1e6..1e6f64, 0.0..1e6f64, any::<bool>()), 0..20)) {
            let records: Vec<ReplicateRecord> = values
                .iter()
                .enumerate()
                .filter(|(_, v)| v.0.is_finite())
                .map(|(i, &(a, b, c, e))| ReplicateRecord {
                    replicate: i,
                    pearson: a,
                    lr: b,
                    bregman: c,
                    existed: e,
                    fitted_total: c + 1.5,
                    observed_total: c.floor(),
                })
                .collect();
            let mut buf = Vec::new();
            write_samples_csv(&mut buf, &records).unwrap();
            let back = read_samples_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, records);
        }

        #[test]
        fn matrix_round_trip(data in proptest::collection::vec(-1e3..1e3f64, 9)) {
            let m = DMatrix::from_row_slice(3, 3, &data);
            prop_assert_eq!(matrix_from_csv(&matrix_to_csv(&m)).unwrap(), m);
        }
    }
}
