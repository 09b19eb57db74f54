//! CSV formats.
//!
//! Datasets: header `x1,...,xd,label`, one row per example, integer
//! coordinates and a 0/1 label. Explicit distributions add a trailing `prob`
//! column holding a decimal (`0.25`) or a rational (`1/4`).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::{Dataset, ExplicitDistribution, GridDomain, LabeledExample};

fn dimension_from_header(header: &csv::StringRecord, trailing: &[&str]) -> Result<usize> {
    let n = header.len();
    if n < trailing.len() + 1 {
        return Err(Error::Parse(format!("header has only {n} columns")));
    }
    let d = n - trailing.len();
    for i in 0..d {
        let want = format!("x{}", i + 1);
        if header.get(i).map(str::trim) != Some(want.as_str()) {
            return Err(Error::Parse(format!("expected column {want}")));
        }
    }
    for (j, name) in trailing.iter().enumerate() {
        if header.get(d + j).map(str::trim) != Some(*name) {
            return Err(Error::Parse(format!("expected column {name}")));
        }
    }
    Ok(d)
}

fn parse_row(record: &csv::StringRecord, d: usize) -> Result<LabeledExample> {
    let mut coords = Vec::with_capacity(d);
    for i in 0..d {
        let field = record.get(i).unwrap_or("").trim();
        coords.push(
            field
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad coordinate {field:?}")))?,
        );
    }
    let label = match record.get(d).map(str::trim) {
        Some("0") => false,
        Some("1") => true,
        other => return Err(Error::Parse(format!("bad label {other:?}"))),
    };
    Ok(LabeledExample::new(coords, label))
}

fn parse_probability(field: &str) -> Result<f64> {
    let field = field.trim();
    let bad = || Error::Parse(format!("bad probability {field:?}"));
    if let Some((num, den)) = field.split_once('/') {
        let num: f64 = num.trim().parse::<u64>().map_err(|_| bad())? as f64;
        let den: f64 = den.trim().parse::<u64>().map_err(|_| bad())? as f64;
        if den == 0.0 {
            return Err(bad());
        }
        Ok(num / den)
    } else {
        field.parse::<f64>().map_err(|_| bad())
    }
}

fn header(d: usize, trailing: &[&str]) -> Vec<String> {
    (1..=d)
        .map(|i| format!("x{i}"))
        .chain(trailing.iter().map(|s| s.to_string()))
        .collect()
}

pub fn read_dataset<R: Read>(reader: R, x_max: u32) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let d = dimension_from_header(rdr.headers()?, &["label"])?;
    let domain = GridDomain::new(x_max, d)?;
    let mut examples = Vec::new();
    for record in rdr.records() {
        examples.push(parse_row(&record?, d)?);
    }
    Dataset::from_examples(domain, examples)
}

pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header(data.dim(), &["label"]))?;
    for id in 0..data.len() {
        let mut row: Vec<String> = data.point(id).iter().map(u32::to_string).collect();
        row.push(if data.label(id) { "1" } else { "0" }.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_distribution<R: Read>(reader: R, x_max: u32) -> Result<ExplicitDistribution> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let d = dimension_from_header(rdr.headers()?, &["label", "prob"])?;
    let domain = GridDomain::new(x_max, d)?;
    let mut support = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let ex = parse_row(&record, d)?;
        let p = parse_probability(record.get(d + 1).unwrap_or(""))?;
        support.push((ex, p));
    }
    ExplicitDistribution::new(domain, support)
}

pub fn write_distribution<W: Write>(writer: W, dist: &ExplicitDistribution) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(header(dist.domain().d, &["label", "prob"]))?;
    for (ex, p) in dist.support() {
        let mut row: Vec<String> = ex.coords.iter().map(u32::to_string).collect();
        row.push(if ex.label { "1" } else { "0" }.to_string());
        row.push(format!("{p}"));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
