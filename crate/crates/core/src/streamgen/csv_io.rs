//! Stream CSV: a header `x0,…,x{p-1},index,label`, then one row per point.
//! The label column is empty for unlabeled data.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::streamgen::{Label, LabeledSample};

pub fn write_csv<W: Write>(out: W, samples: &[LabeledSample]) -> Result<()> {
    let p = samples.first().map_or(0, |s| s.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..p).map(|i| format!("x{i}")).collect();
    header.push("index".into());
    header.push("label".into());
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(p + 2);
    for s in samples {
        if s.x.len() != p {
            return Err(Error::Dimension {
                expected: p,
                got: s.x.len(),
            });
        }
        row.clear();
        row.extend(s.x.iter().map(|v| v.to_string()));
        row.push(s.index.to_string());
        row.push(s.label.map_or("", Label::as_str).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Row-by-row reader; nothing beyond the current record is buffered.
pub struct CsvReader<R: Read> {
    inner: csv::Reader<R>,
    record: csv::StringRecord,
    p: usize,
    row: usize,
    last_index: Option<u64>,
}

impl CsvReader<File> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::new(file)
    }
}

impl<R: Read> CsvReader<R> {
    pub fn new(input: R) -> Result<Self> {
        let mut inner = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(input);
        let header = inner.headers()?.clone();
        let n = header.len();
        let malformed = |m: String| Error::MalformedCsv { row: 0, message: m };
        if n < 3 || &header[n - 2] != "index" || &header[n - 1] != "label" {
            return Err(malformed(
                "header must be x0,…,x{p-1},index,label with p ≥ 1".into(),
            ));
        }
        for (i, h) in header.iter().take(n - 2).enumerate() {
            if h != format!("x{i}") {
                return Err(malformed(format!("column {i} is `{h}`, expected `x{i}`")));
            }
        }
        Ok(CsvReader {
            inner,
            record: csv::StringRecord::new(),
            p: n - 2,
            row: 0,
            last_index: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn next_sample(&mut self) -> Result<Option<LabeledSample>> {
        if !self.inner.read_record(&mut self.record)? {
            return Ok(None);
        }
        self.row += 1;
        let row = self.row;
        let malformed = |message: String| Error::MalformedCsv { row, message };
        let rec = &self.record;
        if rec.len() != self.p + 2 {
            return Err(malformed(format!(
                "{} fields, expected {}",
                rec.len(),
                self.p + 2
            )));
        }
        let x = (0..self.p)
            .map(|i| {
                let v = rec[i].trim();
                v.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| malformed(format!("x{i} = `{v}` is not a finite number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let index: u64 = rec[self.p].trim().parse().map_err(|_| {
            malformed(format!(
                "index `{}` is not a non-negative integer",
                &rec[self.p]
            ))
        })?;
        if self.last_index.is_some_and(|l| index <= l) {
            return Err(malformed(format!("index {index} is not increasing")));
        }
        self.last_index = Some(index);
        let label = match rec[self.p + 1].trim() {
            "" => None,
            l => Some(l.parse::<Label>().map_err(malformed)?),
        };
        Ok(Some(LabeledSample { x, index, label }))
    }
}

impl<R: Read> Iterator for CsvReader<R> {
    type Item = Result<LabeledSample>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_sample().transpose()
    }
}

/// Reads a whole stream file into memory.
pub fn read_csv(path: &Path) -> Result<Vec<LabeledSample>> {
    CsvReader::open(path)?.collect()
}
