//! CSV input and output for the measured and synthetic datasets.
//!
//! Every file has a header row and three numeric columns. Numbers are
//! written in shortest round-trip form so regenerated files are identical.

use std::io::{Read, Write};

use thiserror::Error;

use crate::cavity::{DecayDataset, SpectrumDataset};
use crate::ensemble::SpillDataset;
use crate::kinetics::TimeSeries;

pub const SPECTRUM_HEADER: [&str; 3] = ["detuning_Hz", "value", "sigma"];
pub const DECAY_HEADER: [&str; 3] = ["time_s", "value", "sigma"];
pub const SPILL_HEADER: [&str; 3] = ["dU_min_uK", "CN", "sigma"];
pub const SERIES_HEADER: [&str; 3] = ["t_s", "value", "sigma"];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("dataset has no data rows")]
    Empty,
}

fn read_columns<R: Read>(reader: R, header: &[&str; 3]) -> Result<[Vec<f64>; 3], DataError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let got: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
    if got.len() < 3 || got[..3].iter().zip(header).any(|(a, b)| !a.eq_ignore_ascii_case(b)) {
        return Err(DataError::Parse { line: 1, message: format!("expected header {}", header.join(",")) });
    }
    let mut cols: [Vec<f64>; 3] = Default::default();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() < 3 {
            return Err(DataError::Parse { line, message: "expected 3 columns".into() });
        }
        for (c, col) in cols.iter_mut().enumerate() {
            let v: f64 = rec[c]
                .parse()
                .map_err(|_| DataError::Parse { line, message: format!("not a number: {:?}", &rec[c]) })?;
            col.push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(DataError::Empty);
    }
    Ok(cols)
}

fn write_columns<W: Write>(writer: W, header: &[&str; 3], cols: [&[f64]; 3]) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header)?;
    for i in 0..cols[0].len() {
        wtr.write_record([cols[0][i].to_string(), cols[1][i].to_string(), cols[2][i].to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_spectrum<R: Read>(reader: R) -> Result<SpectrumDataset, DataError> {
    let [d, t, s] = read_columns(reader, &SPECTRUM_HEADER)?;
    SpectrumDataset::new(d, t, s).map_err(|e| DataError::Invalid(e.to_string()))
}

pub fn write_spectrum<W: Write>(writer: W, data: &SpectrumDataset) -> Result<(), DataError> {
    write_columns(writer, &SPECTRUM_HEADER, [&data.detunings, &data.transmissions, &data.uncertainties])
}

/// Decay counts; the sigma column is read but unused (Poisson weights are
/// derived from the counts).
pub fn read_decay<R: Read>(reader: R, background: f64) -> Result<DecayDataset, DataError> {
    let [t, c, _] = read_columns(reader, &DECAY_HEADER)?;
    DecayDataset::new(t, c, background).map_err(|e| DataError::Invalid(e.to_string()))
}

pub fn write_decay<W: Write>(writer: W, data: &DecayDataset) -> Result<(), DataError> {
    let sigma: Vec<f64> = data.counts.iter().map(|c| c.max(1.0).sqrt()).collect();
    write_columns(writer, &DECAY_HEADER, [&data.times, &data.counts, &sigma])
}

/// Spill data with ΔU_min in μK on disk and K in memory.
pub fn read_spill<R: Read>(reader: R) -> Result<SpillDataset, DataError> {
    let [d, c, s] = read_columns(reader, &SPILL_HEADER)?;
    let d = d.into_iter().map(|v| v / 1e6).collect();
    SpillDataset::new(d, c, s).map_err(|e| DataError::Invalid(e.to_string()))
}

pub fn write_spill<W: Write>(writer: W, data: &SpillDataset) -> Result<(), DataError> {
    let d: Vec<f64> = data.barrier_minima.iter().map(|v| v * 1e6).collect();
    write_columns(writer, &SPILL_HEADER, [&d, &data.cn, &data.sigma])
}

pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries, DataError> {
    let [t, v, s] = read_columns(reader, &SERIES_HEADER)?;
    TimeSeries::new(t, v, s).map_err(|e| DataError::Invalid(e.to_string()))
}

pub fn write_series<W: Write>(writer: W, data: &TimeSeries) -> Result<(), DataError> {
    write_columns(writer, &SERIES_HEADER, [&data.times, &data.values, &data.sigmas])
}
