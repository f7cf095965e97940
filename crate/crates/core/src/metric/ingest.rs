use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::PointCloud;

/// CSV layout: one point per row, every column a coordinate.
#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    /// Drop repeated points instead of failing.
    pub dedupe: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: false,
            dedupe: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ingested {
    pub cloud: PointCloud,
    /// Data-row positions discarded as repeats (only with `dedupe`).
    pub dropped_rows: Vec<usize>,
}

pub fn read_csv<R: Read>(reader: R, options: CsvOptions) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let coords = record
            .iter()
            .enumerate()
            .map(|(column, field)| {
                field.parse::<f64>().map_err(|e| Error::BadValue {
                    row,
                    column,
                    reason: format!("`{field}`: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(coords);
    }

    let (cloud, dropped_rows) = if options.dedupe {
        PointCloud::dedup(rows)?
    } else {
        (PointCloud::new(rows)?, Vec::new())
    };
    Ok(Ingested {
        cloud,
        dropped_rows,
    })
}

pub fn read_csv_path(path: impl AsRef<Path>, options: CsvOptions) -> Result<Ingested> {
    read_csv(File::open(path)?, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, options: CsvOptions) -> Result<Ingested> {
        read_csv(text.as_bytes(), options)
    }

    #[test]
    fn plain_rows() {
        let got = parse("0,0\n1, 2.5\n-3,4e-1\n", CsvOptions::default()).unwrap();
        assert_eq!(got.cloud.len(), 3);
        assert_eq!(got.cloud.point(1), &[1.0, 2.5]);
        assert_eq!(got.cloud.point(2), &[-3.0, 0.4]);
    }

    #[test]
    fn header_and_delimiter() {
        let opts = CsvOptions {
            delimiter: b';',
            has_header: true,
            ..CsvOptions::default()
        };
        let got = parse("x;y\n1;2\n3;4\n", opts).unwrap();
        assert_eq!(got.cloud.to_rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        // without the flag the header is data and fails to parse
        assert!(matches!(
            parse(
                "x;y\n1;2\n",
                CsvOptions {
                    delimiter: b';',
                    ..CsvOptions::default()
                }
            ),
            Err(Error::BadValue { row: 0, .. })
        ));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(
            parse("1,2\n3\n", CsvOptions::default()),
            Err(Error::RaggedRow {
                row: 1,
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn duplicates() {
        assert!(matches!(
            parse("1\n2\n1\n", CsvOptions::default()),
            Err(Error::DuplicatePoint {
                first: 0,
                second: 2
            })
        ));
        let got = parse(
            "1\n2\n1\n",
            CsvOptions {
                dedupe: true,
                ..CsvOptions::default()
            },
        )
        .unwrap();
        assert_eq!(got.cloud.len(), 2);
        assert_eq!(got.dropped_rows, vec![2]);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse("", CsvOptions::default()),
            Err(Error::EmptyCloud)
        ));
    }
}
