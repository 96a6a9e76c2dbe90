//! Readers and writers for the on-disk formats.
//!
//! - **Annotations**: JSON Lines, one annotation object per line (a single
//!   JSON array of objects is accepted too). Field names: `id`, `createdAt`,
//!   `editsIQ`, `edits[{timestamp, kind, authorId, weight}]`,
//!   `authors[{id, role{name, rank, roleFactor}, iq, attribution,
//!   complexEdits, simpleEdits}]`.
//! - **Design**: one JSON document with `attributes`, `tasks`, `kind`, `seed`.
//! - **Choices**: CSV, one record per line:
//!   `respondentId,taskId,chosenIndex,timestamp`. A header line is written
//!   and optional on input.
//! - **Results**: two CSV tables separated by a blank line, part-worths
//!   (`attribute,level,utility`) then importances (`attribute,importance`).
//!   Numbers carry six fractional digits.
//!
//! Record-oriented loaders skip invalid records and report each one as a
//! [`DataError`]; only an unreadable stream fails the whole load.

use std::io::{self, BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjoint::{
    AttributePartWorths, ChoiceRecord, ConjointError, Design, Importance, ImportanceVector,
    PartWorths,
};
use crate::trust::Annotation;

/// One rejected input record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataError {
    /// Zero-based index of the record among the data records of the stream.
    pub record_index: usize,
    pub field: String,
    pub reason: String,
}

impl DataError {
    fn new(record_index: usize, field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            record_index,
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Accepted records plus one error per rejected record.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub items: Vec<T>,
    pub errors: Vec<DataError>,
}

impl<T> Default for Loaded<T> {
    fn default() -> Self {
        Self {
            items: Vec::new(),
            errors: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Io(#[from] io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed input at line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Invalid(#[from] ConjointError),
}

/// Best-effort name of the field a serde error is about.
fn serde_field(err: &serde_json::Error) -> String {
    let msg = err.to_string();
    msg.split('`')
        .nth(1)
        .map(str::to_owned)
        .unwrap_or_else(|| "record".into())
}

fn accept_annotation(value: serde_json::Value, index: usize, out: &mut Loaded<Annotation>) {
    match serde_json::from_value::<Annotation>(value) {
        Ok(a) => match a.validate() {
            Ok(()) => out.items.push(a),
            Err(e) => out
                .errors
                .push(DataError::new(index, e.field(), e.to_string())),
        },
        Err(e) => out
            .errors
            .push(DataError::new(index, serde_field(&e), e.to_string())),
    }
}

/// Reads annotations, validating every invariant.
pub fn load_annotations<R: Read>(source: R) -> Result<Loaded<Annotation>, IngestError> {
    let mut text = String::new();
    BufReader::new(source).read_to_string(&mut text)?;
    let mut out = Loaded::default();
    if text.trim_start().starts_with('[') {
        let values: Vec<serde_json::Value> = serde_json::from_str(&text)?;
        for (i, v) in values.into_iter().enumerate() {
            accept_annotation(v, i, &mut out);
        }
        return Ok(out);
    }
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        match serde_json::from_str::<serde_json::Value>(line) {
            Ok(v) => accept_annotation(v, i, &mut out),
            Err(e) => out.errors.push(DataError::new(i, "record", e.to_string())),
        }
    }
    Ok(out)
}

/// Writes annotations as JSON Lines.
pub fn write_annotations<W: Write>(
    annotations: &[Annotation],
    mut sink: W,
) -> Result<(), IngestError> {
    for a in annotations {
        serde_json::to_writer(&mut sink, a)?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_design<R: Read>(source: R) -> Result<Design, IngestError> {
    let design: Design = serde_json::from_reader(BufReader::new(source))?;
    design.validate()?;
    Ok(design)
}

pub fn write_design<W: Write>(design: &Design, mut sink: W) -> Result<(), IngestError> {
    serde_json::to_writer_pretty(&mut sink, design)?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// Header line of a choice file.
pub const CHOICE_HEADER: &str = "respondentId,taskId,chosenIndex,timestamp";

/// One choice as a CSV line, without the trailing newline.
pub fn format_choice(choice: &ChoiceRecord) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record([
        choice.respondent_id.as_str(),
        &choice.task_id.to_string(),
        &choice.chosen_index.to_string(),
        &choice.timestamp.to_string(),
    ])
    .expect("writing to memory cannot fail");
    let mut bytes = w.into_inner().expect("writing to memory cannot fail");
    while bytes.last().is_some_and(|b| *b == b'\n' || *b == b'\r') {
        bytes.pop();
    }
    String::from_utf8(bytes).expect("input fields are UTF-8")
}

pub fn write_choices<W: Write>(choices: &[ChoiceRecord], mut sink: W) -> Result<(), IngestError> {
    writeln!(sink, "{CHOICE_HEADER}")?;
    for c in choices {
        writeln!(sink, "{}", format_choice(c))?;
    }
    Ok(())
}

fn parse_choice(record: &csv::StringRecord, index: usize) -> Result<ChoiceRecord, DataError> {
    if record.len() != 4 {
        return Err(DataError::new(
            index,
            "record",
            format!("expected 4 fields, found {}", record.len()),
        ));
    }
    let field = |i: usize, name: &str| -> Result<&str, DataError> {
        let v = record[i].trim();
        if v.is_empty() {
            Err(DataError::new(index, name, "empty value"))
        } else {
            Ok(v)
        }
    };
    let number = |i: usize, name: &str| -> Result<i64, DataError> {
        field(i, name)?
            .parse::<i64>()
            .map_err(|e| DataError::new(index, name, format!("not an integer: {e}")))
    };
    let task_id = number(1, "taskId")?;
    let chosen_index = number(2, "chosenIndex")?;
    Ok(ChoiceRecord {
        respondent_id: field(0, "respondentId")?.to_owned(),
        task_id: u32::try_from(task_id)
            .map_err(|_| DataError::new(index, "taskId", "out of range"))?,
        chosen_index: usize::try_from(chosen_index)
            .map_err(|_| DataError::new(index, "chosenIndex", "must be nonnegative"))?,
        timestamp: number(3, "timestamp")?,
    })
}

/// Reads a choice file, rejecting records that do not fit `design`.
pub fn load_choices<R: Read>(
    source: R,
    design: &Design,
) -> Result<Loaded<ChoiceRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut out = Loaded::default();
    let mut index = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if line == 0 && record.get(0).map(str::trim) == Some("respondentId") {
            continue;
        }
        match parse_choice(&record, index) {
            Ok(choice) => match design.task(choice.task_id) {
                None => out.errors.push(DataError::new(
                    index,
                    "taskId",
                    format!("unknown task {}", choice.task_id),
                )),
                Some(task) if choice.chosen_index >= task.concepts.len() => {
                    out.errors.push(DataError::new(
                        index,
                        "chosenIndex",
                        format!(
                            "index {} out of range for {} alternatives",
                            choice.chosen_index,
                            task.concepts.len()
                        ),
                    ))
                }
                Some(_) => out.items.push(choice),
            },
            Err(e) => out.errors.push(e),
        }
        index += 1;
    }
    Ok(out)
}

const PART_WORTHS_HEADER: &str = "attribute,level,utility";
const IMPORTANCE_HEADER: &str = "attribute,importance";

fn csv_line(fields: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(fields)
        .expect("writing to memory cannot fail");
    String::from_utf8(w.into_inner().expect("writing to memory cannot fail"))
        .expect("fields are UTF-8")
}

/// Writes the part-worth and importance tables.
pub fn export_results<W: Write>(
    pw: &PartWorths,
    imp: &ImportanceVector,
    mut sink: W,
) -> Result<(), IngestError> {
    writeln!(sink, "{PART_WORTHS_HEADER}")?;
    for a in &pw.attributes {
        for (level, utility) in a.levels.iter().zip(&a.utilities) {
            sink.write_all(
                csv_line(&[&a.name, &format!("{level:.6}"), &format!("{utility:.6}")]).as_bytes(),
            )?;
        }
    }
    writeln!(sink)?;
    writeln!(sink, "{IMPORTANCE_HEADER}")?;
    for e in &imp.entries {
        sink.write_all(csv_line(&[&e.attribute, &format!("{:.6}", e.importance)]).as_bytes())?;
    }
    sink.flush()?;
    Ok(())
}

/// Rounding to six decimals can move an attribute's utility sum off zero by
/// up to half a unit in the last place per level.
const ROUNDED_SUM_SLACK: f64 = 1e-5;

/// Reads a results file. The importance table may be absent, which allows
/// hand-written part-worth files.
pub fn read_results<R: Read>(source: R) -> Result<(PartWorths, ImportanceVector), IngestError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        PartWorths,
        Importance,
    }
    let mut section = Section::None;
    let mut attributes: Vec<AttributePartWorths> = Vec::new();
    let mut importance = ImportanceVector::default();
    let reader = BufReader::new(source);
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == PART_WORTHS_HEADER {
            section = Section::PartWorths;
            continue;
        }
        if trimmed == IMPORTANCE_HEADER {
            section = Section::Importance;
            continue;
        }
        let fields: Vec<String> = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(trimmed.as_bytes())
            .records()
            .next()
            .transpose()?
            .map(|r| r.iter().map(|f| f.trim().to_owned()).collect())
            .unwrap_or_default();
        let bad = |reason: String| IngestError::Format {
            line: n + 1,
            reason,
        };
        let number = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        match section {
            Section::None => return Err(bad("expected a table header".into())),
            Section::PartWorths => {
                let [name, level, utility] = fields.as_slice() else {
                    return Err(bad(format!("expected 3 fields, found {}", fields.len())));
                };
                let (level, utility) = (number(level)?, number(utility)?);
                match attributes.iter_mut().find(|a| &a.name == name) {
                    Some(a) => {
                        a.levels.push(level);
                        a.utilities.push(utility);
                    }
                    None => attributes.push(AttributePartWorths {
                        name: name.clone(),
                        levels: vec![level],
                        utilities: vec![utility],
                    }),
                }
            }
            Section::Importance => {
                let [name, value] = fields.as_slice() else {
                    return Err(bad(format!("expected 2 fields, found {}", fields.len())));
                };
                importance.entries.push(Importance {
                    attribute: name.clone(),
                    importance: number(value)?,
                });
            }
        }
    }
    for a in &attributes {
        let sum: f64 = a.utilities.iter().sum();
        if sum.abs() > ROUNDED_SUM_SLACK {
            return Err(ConjointError::NotZeroSum {
                attribute: a.name.clone(),
                sum,
            }
            .into());
        }
    }
    Ok((PartWorths::centered(attributes)?, importance))
}

/// Reads one number per line, skipping blank lines.
pub fn load_values<R: Read>(source: R) -> Result<Loaded<f64>, IngestError> {
    let mut out = Loaded::default();
    for (i, line) in BufReader::new(source)
        .lines()
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
    {
        match line.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => out.items.push(v),
            Ok(_) => out.errors.push(DataError::new(i, "value", "not finite")),
            Err(e) => out.errors.push(DataError::new(i, "value", e.to_string())),
        }
    }
    Ok(out)
}
