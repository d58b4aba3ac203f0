//! Report rendering.
//!
//! A [`Report`] is an ordered list of named entries. It renders three ways:
//!
//! * `human`: aligned text for reading.
//! * `delimited`: one record per scalar/list entry, a header plus one record
//!   per row for matrices and tables.
//! * `structured`: one `key=value` line per leaf. Matrix cells are
//!   `key.<row>.<col>`, table cells `key.<n>.<column>` with `n` from 1, list
//!   items are joined with commas.
//!
//! Reals are printed with fixed precision in every mode.

use std::fmt::Write as _;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Mode {
    #[default]
    Human,
    Delimited,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormat {
    pub mode: Mode,
    pub precision: usize,
    pub delimiter: u8,
}

impl Default for OutputFormat {
    fn default() -> Self {
        Self {
            mode: Mode::Human,
            precision: 4,
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Entry {
    Scalar(Cell),
    List(Vec<String>),
    Matrix {
        rows: Vec<String>,
        cols: Vec<String>,
        values: Vec<Vec<Cell>>,
    },
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Cell>>,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Entry)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scalar(&mut self, key: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.entries.push((key.into(), Entry::Scalar(value.into())));
        self
    }

    pub fn list<S: ToString>(&mut self, key: impl Into<String>, items: &[S]) -> &mut Self {
        self.entries.push((
            key.into(),
            Entry::List(items.iter().map(ToString::to_string).collect()),
        ));
        self
    }

    pub fn matrix<C: Into<Cell> + Clone>(
        &mut self,
        key: impl Into<String>,
        rows: Vec<String>,
        cols: Vec<String>,
        values: &[Vec<C>],
    ) -> &mut Self {
        let values = values
            .iter()
            .map(|r| r.iter().cloned().map(Into::into).collect())
            .collect();
        self.entries
            .push((key.into(), Entry::Matrix { rows, cols, values }));
        self
    }

    pub fn table(
        &mut self,
        key: impl Into<String>,
        columns: &[&str],
        rows: Vec<Vec<Cell>>,
    ) -> &mut Self {
        self.entries.push((
            key.into(),
            Entry::Table {
                columns: columns.iter().map(|c| c.to_string()).collect(),
                rows,
            },
        ));
        self
    }

    pub fn render(&self, format: &OutputFormat) -> String {
        match format.mode {
            Mode::Human => self.human(format.precision),
            Mode::Structured => self.structured(format.precision),
            Mode::Delimited => self.delimited(format),
        }
    }

    pub fn write_to<W: Write>(&self, out: &mut W, format: &OutputFormat) -> io::Result<()> {
        out.write_all(self.render(format).as_bytes())
    }

    fn human(&self, precision: usize) -> String {
        let mut out = String::new();
        let width = self
            .entries
            .iter()
            .filter(|(_, e)| matches!(e, Entry::Scalar(_) | Entry::List(_)))
            .map(|(k, _)| k.chars().count())
            .max()
            .unwrap_or(0);
        for (key, entry) in &self.entries {
            match entry {
                Entry::Scalar(c) => {
                    let _ = writeln!(out, "{key:<width$}  {}", cell(c, precision));
                }
                Entry::List(items) => {
                    let shown = if items.is_empty() {
                        "(none)".to_string()
                    } else {
                        items.join(", ")
                    };
                    let _ = writeln!(out, "{key:<width$}  {shown}");
                }
                Entry::Matrix { rows, cols, values } => {
                    let mut grid = vec![std::iter::once(String::new())
                        .chain(cols.iter().cloned())
                        .collect::<Vec<_>>()];
                    for (label, row) in rows.iter().zip(values) {
                        grid.push(
                            std::iter::once(label.clone())
                                .chain(row.iter().map(|c| cell(c, precision)))
                                .collect(),
                        );
                    }
                    let _ = writeln!(out, "{key}:");
                    aligned(&mut out, &grid);
                }
                Entry::Table { columns, rows } => {
                    let mut grid = vec![columns.clone()];
                    grid.extend(
                        rows.iter()
                            .map(|r| r.iter().map(|c| cell(c, precision)).collect()),
                    );
                    let _ = writeln!(out, "{key}:");
                    aligned(&mut out, &grid);
                }
            }
        }
        out
    }

    fn structured(&self, precision: usize) -> String {
        let mut out = String::new();
        for (key, entry) in &self.entries {
            match entry {
                Entry::Scalar(c) => {
                    let _ = writeln!(out, "{key}={}", cell(c, precision));
                }
                Entry::List(items) => {
                    let _ = writeln!(out, "{key}={}", items.join(","));
                }
                Entry::Matrix { rows, cols, values } => {
                    for (r, row) in rows.iter().zip(values) {
                        for (c, v) in cols.iter().zip(row) {
                            let _ = writeln!(out, "{key}.{r}.{c}={}", cell(v, precision));
                        }
                    }
                }
                Entry::Table { columns, rows } => {
                    for (n, row) in rows.iter().enumerate() {
                        for (c, v) in columns.iter().zip(row) {
                            let _ = writeln!(out, "{key}.{}.{c}={}", n + 1, cell(v, precision));
                        }
                    }
                }
            }
        }
        out
    }

    fn delimited(&self, format: &OutputFormat) -> String {
        let mut w = csv::WriterBuilder::new()
            .delimiter(format.delimiter)
            .flexible(true)
            .from_writer(Vec::new());
        let p = format.precision;
        for (key, entry) in &self.entries {
            let result = match entry {
                Entry::Scalar(c) => w.write_record([key.as_str(), &cell(c, p)]),
                Entry::List(items) => w.write_record(
                    std::iter::once(key.as_str()).chain(items.iter().map(String::as_str)),
                ),
                Entry::Matrix { rows, cols, values } => {
                    let mut res =
                        w.write_record(std::iter::once(key.clone()).chain(cols.iter().cloned()));
                    for (label, row) in rows.iter().zip(values) {
                        if res.is_ok() {
                            res = w.write_record(
                                std::iter::once(label.clone())
                                    .chain(row.iter().map(|c| cell(c, p))),
                            );
                        }
                    }
                    res
                }
                Entry::Table { columns, rows } => {
                    let mut res =
                        w.write_record(std::iter::once(key.clone()).chain(columns.iter().cloned()));
                    for (n, row) in rows.iter().enumerate() {
                        if res.is_ok() {
                            res = w.write_record(
                                std::iter::once((n + 1).to_string())
                                    .chain(row.iter().map(|c| cell(c, p))),
                            );
                        }
                    }
                    res
                }
            };
            result.expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
    }
}

fn cell(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Real(v) => format!("{v:.precision$}"),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn aligned(out: &mut String, grid: &[Vec<String>]) {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            grid.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in grid {
        let mut line = String::from("  ");
        for (c, s) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let w = widths[c];
            if c == 0 {
                let _ = write!(line, "{s:<w$}");
            } else {
                let _ = write!(line, "{s:>w$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new();
        r.scalar("tau", 0.048601)
            .list("given", &["OnTime"])
            .matrix(
                "gamma",
                vec!["low".into(), "hi".into()],
                vec!["low".into(), "hi".into()],
                &[vec![0.75, 0.25], vec![0.5, 0.5]],
            )
            .table(
                "trace",
                &["added", "value"],
                vec![vec!["X1".into(), 0.2.into()]],
            );
        r
    }

    #[test]
    fn structured_lines() {
        let text = sample().render(&OutputFormat {
            mode: Mode::Structured,
            ..OutputFormat::default()
        });
        assert_eq!(
            text,
            "tau=0.0486\ngiven=OnTime\ngamma.low.low=0.7500\ngamma.low.hi=0.2500\n\
             gamma.hi.low=0.5000\ngamma.hi.hi=0.5000\ntrace.1.added=X1\ntrace.1.value=0.2000\n"
        );
    }

    #[test]
    fn delimited_records() {
        let text = sample().render(&OutputFormat {
            mode: Mode::Delimited,
            precision: 2,
            delimiter: b'\t',
        });
        assert_eq!(
            text,
            "tau\t0.05\ngiven\tOnTime\ngamma\tlow\thi\nlow\t0.75\t0.25\nhi\t0.50\t0.50\n\
             trace\tadded\tvalue\n1\tX1\t0.20\n"
        );
    }

    #[test]
    fn human_alignment() {
        let text = sample().render(&OutputFormat::default());
        assert!(text.starts_with("tau    0.0486\ngiven  OnTime\ngamma:\n"));
        assert!(text.contains("  low  0.7500  0.2500\n"));
    }
}
