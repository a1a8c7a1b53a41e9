//! Result tables, their CSV form and gnuplot scripts.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    /// The first column is the sweep axis.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Ordered `# key=value` header entries. Values are single-line.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// `Display` for `f64` is the shortest string that parses back to the same bits.
fn fmt_cell(x: f64) -> String {
    format!("{x}")
}

pub fn write_csv<W: Write>(table: &ResultTable, out: W) -> Result<(), CliError> {
    let mut out = out;
    for (k, v) in &table.metadata {
        writeln!(out, "# {k}={}", v.replace('\n', " "))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| fmt_cell(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<ResultTable, CliError> {
    let mut metadata = Vec::new();
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        match line.strip_prefix("# ") {
            Some(entry) => {
                let (k, v) = entry.split_once('=').ok_or_else(|| {
                    CliError::Format(format!("metadata line without '=': {line}"))
                })?;
                metadata.push((k.to_string(), v.to_string()));
            }
            None => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Format(format!("row {}: not a number: {s:?}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(ResultTable {
        columns,
        rows,
        metadata,
    })
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), CliError> {
    let f = std::fs::File::create(path)?;
    write_csv(table, std::io::BufWriter::new(f))
}

pub fn parse_csv(path: &Path) -> Result<ResultTable, CliError> {
    let f = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(f))
}

fn is_interval_column(name: &str) -> bool {
    ["_se", "_ci_low", "_ci_high"]
        .iter()
        .any(|s| name.ends_with(s) || name.contains(&format!("{s}@")))
}

/// A gnuplot script drawing one series per metric column of the CSV at
/// `csv_name`, which is resolved relative to the script's own directory.
pub fn plot_script(table: &ResultTable, csv_name: &str, title: &str) -> String {
    let log_y = table
        .columns
        .iter()
        .skip(1)
        .any(|c| c.starts_with("outage"));
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# gnuplot script; run from this directory: gnuplot -p {title}.gp"
    );
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set title '{title}' noenhanced");
    let _ = writeln!(s, "set xlabel '{}' noenhanced", table.columns[0]);
    let _ = writeln!(
        s,
        "set ylabel '{}'",
        if log_y {
            "outage probability"
        } else {
            "ergodic rate (bit/s)"
        }
    );
    if log_y {
        let _ = writeln!(s, "set logscale y");
    }
    let _ = writeln!(s, "set key outside right noenhanced");
    let _ = writeln!(s, "set grid");
    let series: Vec<String> = table
        .columns
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !is_interval_column(c))
        .map(|(i, _)| {
            format!(
                "'{csv_name}' using 1:{} with linespoints title columnheader({})",
                i + 1,
                i + 1
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    s
}

pub fn emit_plot_script(table: &ResultTable, csv_path: &Path, path: &Path) -> Result<(), CliError> {
    let csv_name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Format(format!("bad CSV path {}", csv_path.display())))?;
    let title = path.file_stem().and_then(|n| n.to_str()).unwrap_or("plot");
    std::fs::write(path, plot_script(table, csv_name, title))?;
    Ok(())
}
