//! Delimited text in and out.
//!
//! Input is UTF-8 with a header row of unique variable names. Every other
//! column is categorical; an optional mass column holds a non-negative real
//! per row (counts or probabilities). Rows with zero mass are skipped.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use catassoc_core::{CategoricalDataset, DatasetBuilder, MissingPolicy};

use crate::error::{Error, Result};

pub const DEFAULT_MISSING_TOKEN: &str = "__NA__";

#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub missing_token: String,
    pub missing_policy: MissingPolicy,
    pub mass_column: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            missing_token: DEFAULT_MISSING_TOKEN.to_string(),
            missing_policy: MissingPolicy::OwnCategory,
            mass_column: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub dataset: CategoricalDataset,
    /// Records read, excluding the header.
    pub records: usize,
    pub dropped_rows: usize,
    pub dropped_mass: f64,
}

pub fn load_delimited(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_delimited(BufReader::new(file), options, &path.display().to_string())
}

/// Parses from any reader; `source_name` prefixes error messages.
pub fn read_delimited<R: Read>(
    reader: R,
    options: &LoadOptions,
    source_name: &str,
) -> Result<Loaded> {
    let parse_err = |line: u64, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Empty {
            source_name: source_name.to_string(),
        });
    }
    let mass_at = match &options.mass_column {
        None => None,
        Some(name) => Some(header.iter().position(|h| h == name).ok_or_else(|| {
            Error::usage(
                "--mass-column",
                format!(
                    "no column '{name}' in {source_name} (available: {})",
                    header.iter().collect::<Vec<_>>().join(", ")
                ),
            )
        })?),
    };
    let names: Vec<&str> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != mass_at)
        .map(|(_, h)| h)
        .collect();
    let mut builder = DatasetBuilder::new(&names)
        .map_err(|e| parse_err(1, e.to_string()))?
        .with_missing(options.missing_token.clone(), options.missing_policy);

    let mut records = 0;
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => format!("expected {expected_len} fields, found {len}"),
                _ => e.to_string(),
            };
            parse_err(line, message)
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        records += 1;
        let mut labels = Vec::with_capacity(names.len());
        let mut mass = 1.0;
        for (i, field) in record.iter().enumerate() {
            if Some(i) == mass_at {
                mass = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(line, format!("mass '{field}' is not a number")))?;
            } else {
                labels.push(field);
            }
        }
        builder
            .push(&labels, mass)
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    let (dropped_rows, dropped_mass) = builder.dropped();
    let dataset = builder.finish().map_err(|e| match e {
        catassoc_core::Error::EmptyMass => {
            parse_err(records as u64 + 1, "no rows with positive mass".to_string())
        }
        other => Error::Data(other),
    })?;
    Ok(Loaded {
        dataset,
        records,
        dropped_rows,
        dropped_mass,
    })
}

/// Writes a header and one record per row. A `mass` column is appended
/// unless every row has unit mass.
pub fn write_delimited<W: Write>(
    writer: W,
    dataset: &CategoricalDataset,
    delimiter: u8,
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(writer);
    let with_mass = !dataset.is_unit_mass();
    let mut header: Vec<&str> = dataset.variables().iter().map(|v| v.name()).collect();
    if with_mass {
        header.push("mass");
    }
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for row in 0..dataset.n_rows() {
        record.clear();
        for (v, meta) in dataset.variables().iter().enumerate() {
            record.push(meta.level(dataset.column(v)[row] as usize).to_string());
        }
        if with_mass {
            record.push(dataset.mass()[row].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()
}

pub fn save_delimited(
    path: impl AsRef<Path>,
    dataset: &CategoricalDataset,
    delimiter: u8,
) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_delimited(BufWriter::new(file), dataset, delimiter).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, options: &LoadOptions) -> Result<Loaded> {
        read_delimited(text.as_bytes(), options, "input")
    }

    #[test]
    fn reads_levels_in_first_appearance_order() {
        let loaded = read("A,B\nb,x\na,x\nb,x\n", &LoadOptions::default()).unwrap();
        let ds = &loaded.dataset;
        assert_eq!(ds.variable(0).levels(), ["b", "a"]);
        assert_eq!(ds.variable(1).cardinality(), 1);
        assert_eq!(ds.total_mass(), 3.0);
        assert_eq!(loaded.records, 3);
    }

    #[test]
    fn missing_policies() {
        let text = "A,B\na,x\n__NA__,y\nb,x\na,__NA__\n";
        let own = read(text, &LoadOptions::default()).unwrap().dataset;
        assert_eq!(own.variable(0).levels(), ["a", "b", "__NA__"]);
        assert_eq!(own.total_mass(), 4.0);
        let drop = read(
            text,
            &LoadOptions {
                missing_policy: MissingPolicy::DropRow,
                ..LoadOptions::default()
            },
        )
        .unwrap();
        assert_eq!(drop.dataset.total_mass(), 2.0);
        assert_eq!(drop.dropped_rows, 2);
    }

    #[test]
    fn mass_column_and_delimiter() {
        let options = LoadOptions {
            delimiter: b';',
            mass_column: Some("n".into()),
            ..LoadOptions::default()
        };
        let loaded = read("X;n;Y\na;2.5;u\nb;0;v\na;1;v\n", &options).unwrap();
        assert_eq!(loaded.dataset.n_variables(), 2);
        assert_eq!(loaded.dataset.total_mass(), 3.5);
        assert_eq!(loaded.dropped_rows, 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let ragged = read("A,B\na,b\nc\n", &LoadOptions::default()).unwrap_err();
        assert!(matches!(ragged, Error::Parse { line: 3, .. }), "{ragged}");
        let mass = LoadOptions {
            mass_column: Some("m".into()),
            ..LoadOptions::default()
        };
        let neg = read("A,m\na,1\nb,-2\n", &mass).unwrap_err();
        assert!(matches!(neg, Error::Parse { line: 3, .. }), "{neg}");
        let nan = read("A,m\na,NaN\n", &mass).unwrap_err();
        assert!(matches!(nan, Error::Parse { line: 2, .. }), "{nan}");
        let text = read("A,m\na,lots\n", &mass).unwrap_err();
        assert!(text.to_string().contains("input:2"), "{text}");
        assert!(matches!(
            read("", &LoadOptions::default()).unwrap_err(),
            Error::Empty { .. }
        ));
        assert!(matches!(
            read("A,A\nx,y\n", &LoadOptions::default()).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        let missing_col = read("A\nx\n", &mass).unwrap_err();
        assert_eq!(missing_col.exit_code(), 1);
    }

    #[test]
    fn round_trip() {
        let options = LoadOptions {
            mass_column: Some("mass".into()),
            ..LoadOptions::default()
        };
        let loaded = read("A,B,mass\nx,\"p,q\",0.25\ny,r,0.75\n", &options).unwrap();
        let mut buf = Vec::new();
        write_delimited(&mut buf, &loaded.dataset, b',').unwrap();
        let again = read_delimited(buf.as_slice(), &options, "buf").unwrap();
        assert_eq!(again.dataset, loaded.dataset);
    }
}
