//! NSL-KDD comma-separated files.
//!
//! Input rows carry the 41 features and the label, optionally followed by
//! the difficulty score, which is dropped. A header row whose first field
//! is `duration` is accepted, so exported files read back. Row numbers in
//! errors are 1-based line numbers.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use emffs_core::{Column, Dataset, Schema};

use crate::builder::Builder;
use crate::{FormatError, FormatResult};

const FEATURES: usize = 41;

pub fn parse_csv<R: Read>(reader: R) -> FormatResult<Dataset> {
    let schema = Arc::new(Schema::nsl_kdd());
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut builder = Builder::new(Arc::clone(&schema));
    let mut record = csv::StringRecord::new();
    let mut first = true;
    while rdr.read_record(&mut record)? {
        let row = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if std::mem::take(&mut first) && record[0].eq_ignore_ascii_case(schema.features()[0].name.as_str()) {
            check_header(&schema, &record, row)?;
            continue;
        }
        if record.len() != FEATURES + 1 && record.len() != FEATURES + 2 {
            return Err(FormatError::row(
                row,
                format!("{} columns, expected {} or {}", record.len(), FEATURES + 1, FEATURES + 2),
            ));
        }
        builder.push(row, record.iter().take(FEATURES), &record[FEATURES])?;
    }
    builder.finish()
}

fn check_header(schema: &Schema, record: &csv::StringRecord, row: u64) -> FormatResult<()> {
    if record.len() != FEATURES + 1 {
        return Err(FormatError::row(row, "header must list 41 features and `class`"));
    }
    for (spec, name) in schema.features().iter().zip(record.iter()) {
        if !spec.name.eq_ignore_ascii_case(name) {
            return Err(FormatError::row(
                row,
                format!("header column {} is `{name}`, expected `{}`", spec.index, spec.name),
            ));
        }
    }
    Ok(())
}

pub fn read_csv_path(path: &Path) -> FormatResult<Dataset> {
    parse_csv(BufReader::new(File::open(path)?))
}

/// Writes a header row of feature names plus `class`, then one row per
/// instance. Numbers use the shortest text that parses back to the same
/// value.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> FormatResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    let mut header: Vec<&str> = d.schema().features().iter().map(|f| f.name.as_str()).collect();
    header.push("class");
    w.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(d.schema().len() + 1);
    for row in 0..d.len() {
        fields.clear();
        for col in d.columns() {
            fields.push(match col {
                Column::Numeric(v) => v[row].to_string(),
                Column::Binned { codes, .. } => codes[row].to_string(),
                Column::Nominal { codes, values } => values[codes[row] as usize].clone(),
            });
        }
        fields.push(d.label_name(row).to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}
