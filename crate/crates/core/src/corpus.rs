//! Dataset ingestion from CSV, seeded shuffling and dataset fingerprints.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::learners::Label;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sample {
    pub text: String,
    pub sarcastic: Label,
    pub dialect: Option<String>,
    pub rephrase: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// File path or `"synthetic"`.
    pub source: String,
}

/// Column names to read. `dialect` and `rephrase` are optional columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Schema {
    pub text: String,
    pub label: String,
    pub dialect: String,
    pub rephrase: String,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            text: "text".into(),
            label: "sarcastic".into(),
            dialect: "dialect".into(),
            rephrase: "rephrase".into(),
        }
    }
}

/// Accepts `1/0`, `true/false`, `sarcastic/non_sarcastic` in any case.
pub fn parse_label(raw: &str) -> Option<Label> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "sarcastic" => Some(1),
        "0" | "false" | "non_sarcastic" => Some(0),
        _ => None,
    }
}

/// A CSV file kept verbatim: header plus string rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.iter().map(str::to_owned).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { headers, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column(name).ok_or_else(|| Error::MissingColumn {
            column: name.to_owned(),
        })
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.to_writer(file)
    }
}

impl Dataset {
    pub fn from_table(table: &Table, schema: &Schema, source: impl Into<String>) -> Result<Self> {
        let text_col = table.require_column(&schema.text)?;
        let label_col = table.require_column(&schema.label)?;
        let dialect_col = table.column(&schema.dialect);
        let rephrase_col = table.column(&schema.rephrase);
        let optional =
            |row: &[String], col: Option<usize>| col.and_then(|c| row.get(c)).filter(|v| !v.is_empty()).cloned();
        let samples = table
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let row_no = i + 1;
                let text = &row[text_col];
                if text.trim().is_empty() {
                    return Err(Error::Row {
                        row: row_no,
                        message: "empty text".into(),
                    });
                }
                let raw = &row[label_col];
                let sarcastic = parse_label(raw).ok_or_else(|| Error::Row {
                    row: row_no,
                    message: format!("unparseable label `{raw}`"),
                })?;
                Ok(Sample {
                    text: text.clone(),
                    sarcastic,
                    dialect: optional(row, dialect_col),
                    rephrase: optional(row, rephrase_col),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            samples,
            source: source.into(),
        })
    }

    pub fn from_reader<R: Read>(reader: R, schema: &Schema, source: impl Into<String>) -> Result<Self> {
        Self::from_table(&Table::from_reader(reader)?, schema, source)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.sarcastic).collect()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.samples.iter().map(|s| s.text.as_str()).collect()
    }

    /// Hex SHA-256 of the samples in order, each field followed by a unit
    /// separator and each record by a record separator.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.samples {
            for field in [
                s.text.as_str(),
                if s.sarcastic == 1 { "1" } else { "0" },
                s.dialect.as_deref().unwrap_or(""),
                s.rephrase.as_deref().unwrap_or(""),
            ] {
                h.update(field.as_bytes());
                h.update([0x1f]);
            }
            h.update([0x1e]);
        }
        hex::encode(h.finalize())
    }
}

/// Reads a labelled dataset; rows keep file order.
pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset> {
    let table = Table::read(path)?;
    Dataset::from_table(&table, schema, path.display().to_string())
}

/// Seeded permutation that spreads each class evenly over the output.
///
/// Each class is shuffled on its own, then item `j` of a class with `n_c`
/// members is placed at relative position `(j + ½) / n_c`.
pub fn stratified_shuffle(dataset: &Dataset, seed: u64) -> Dataset {
    let mut rng = crate::seed::rng(seed);
    let mut keyed: Vec<(f64, Label, usize)> = Vec::with_capacity(dataset.len());
    let mut by_class: HashMap<Label, Vec<usize>> = HashMap::new();
    for (i, s) in dataset.samples.iter().enumerate() {
        by_class.entry(s.sarcastic).or_default().push(i);
    }
    for class in [0, 1] {
        let Some(mut members) = by_class.remove(&class) else {
            continue;
        };
        members.shuffle(&mut rng);
        let n = members.len() as f64;
        keyed.extend(
            members
                .into_iter()
                .enumerate()
                .map(|(j, i)| ((j as f64 + 0.5) / n, class, i)),
        );
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Dataset {
        samples: keyed.into_iter().map(|(_, _, i)| dataset.samples[i].clone()).collect(),
        source: dataset.source.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(csv: &str) -> Result<Dataset> {
        Dataset::from_reader(csv.as_bytes(), &Schema::default(), "inline")
    }

    #[test]
    fn reads_rows_in_order() {
        let ds = parse("text,sarcastic,dialect,rephrase\n\"يوم, جميل\",1,egypt,يوم سيء\nمرحبا,0,,\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.samples[0].text, "يوم, جميل");
        assert_eq!(ds.samples[0].dialect.as_deref(), Some("egypt"));
        assert_eq!(ds.samples[1].sarcastic, 0);
        assert_eq!(ds.samples[1].rephrase, None);
    }

    #[test]
    fn missing_label_column() {
        let err = parse("text,dialect\nمرحبا,msa\n").unwrap_err();
        assert!(matches!(&err, Error::MissingColumn { column } if column == "sarcastic"));
    }

    #[test]
    fn bad_label_and_empty_text_name_the_row() {
        let err = parse("text,sarcastic\nا,1\nب,2\n").unwrap_err();
        assert!(matches!(err, Error::Row { row: 2, .. }));
        let err = parse("text,sarcastic\n  ,1\n").unwrap_err();
        assert!(matches!(err, Error::Row { row: 1, .. }));
    }

    #[test]
    fn label_aliases() {
        for (raw, y) in [
            ("1", 1),
            ("TRUE", 1),
            ("Sarcastic", 1),
            ("0", 0),
            ("false", 0),
            ("NON_SARCASTIC", 0),
        ] {
            assert_eq!(parse_label(raw), Some(y));
        }
        assert_eq!(parse_label("2"), None);
        assert_eq!(parse_label("yes"), None);
    }

    fn numbered(n: usize) -> Dataset {
        Dataset {
            samples: (0..n)
                .map(|i| Sample {
                    text: format!("نص {i}"),
                    sarcastic: Label::from(i % 3 == 0),
                    dialect: None,
                    rephrase: None,
                })
                .collect(),
            source: "synthetic".into(),
        }
    }

    #[test]
    fn shuffle_is_seeded_permutation() {
        let ds = numbered(10);
        assert_eq!(stratified_shuffle(&ds, 42), stratified_shuffle(&ds, 42));
        let sorted = |d: &Dataset| {
            let mut t: Vec<String> = d.samples.iter().map(|s| s.text.clone()).collect();
            t.sort();
            t
        };
        for seed in [1, 2] {
            assert_eq!(sorted(&stratified_shuffle(&ds, seed)), sorted(&ds));
        }
        assert_ne!(stratified_shuffle(&ds, 1).samples, stratified_shuffle(&ds, 2).samples);
        let one = numbered(1);
        assert_eq!(stratified_shuffle(&one, 7), one);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = numbered(5);
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.samples[3].sarcastic ^= 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn table_round_trip_is_byte_stable() {
        let src = "text,sarcastic,x\n\"a,b\",1,\"q\"\"uote\"\nc,0,\n";
        let t = Table::from_reader(src.as_bytes()).unwrap();
        let mut out = Vec::new();
        t.to_writer(&mut out).unwrap();
        let t2 = Table::from_reader(out.as_slice()).unwrap();
        let mut out2 = Vec::new();
        t2.to_writer(&mut out2).unwrap();
        assert_eq!(t, t2);
        assert_eq!(out, out2);
    }
}
