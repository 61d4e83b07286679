//! CSV, JSON report and gnuplot rendering, plus a CSV reader.
//!
//! CSV layout: a `#` comment block (`# command = ...`, then one
//! `# param <key> = <value>` line per resolved input and one
//! `# meta <key> = <value>` line per result annotation), a header row of
//! `name_unit` column names, then data rows. Numbers carry 12 significant
//! digits in scientific notation; lines end in `\n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::CliError;
use crate::tradeoffs::Curve;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

/// Tabular result of one command, renderable as CSV or a JSON report.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Structured result for the report format.
    pub result: serde_json::Value,
    pub plot: PlotStyle,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlotStyle {
    pub log_x: bool,
    pub log_y: bool,
    /// Plot one series per distinct value of this text column.
    pub series_column: Option<usize>,
}

impl Document {
    pub fn from_curve(command: &str, params: BTreeMap<String, String>, curve: &Curve) -> Self {
        let mut columns = vec![curve.x_label().to_string(), curve.y_label().to_string()];
        let mut rows: Vec<Vec<Cell>> = curve
            .points()
            .iter()
            .map(|&(x, y)| vec![Cell::Num(x), Cell::Num(y)])
            .collect();
        if let Some(p) = curve.parameter() {
            columns.push(p.label.clone());
            for (row, &v) in rows.iter_mut().zip(&p.values) {
                row.push(Cell::Num(v));
            }
        }
        Self {
            command: command.to_string(),
            params,
            metadata: curve.metadata().clone(),
            columns,
            rows,
            result: serde_json::to_value(curve).unwrap_or(serde_json::Value::Null),
            plot: PlotStyle::default(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command = {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# param {k} = {v}");
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# meta {k} = {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_report(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            command: &'a str,
            parameters: &'a BTreeMap<String, String>,
            metadata: &'a BTreeMap<String, String>,
            result: &'a serde_json::Value,
        }
        let report = Report {
            command: &self.command,
            parameters: &self.params,
            metadata: &self.metadata,
            result: &self.result,
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Gnuplot script plotting `data_file` (the CSV written for this document).
    pub fn to_gnuplot(&self, data_file: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.command);
        s.push_str("set datafile separator ','\n");
        s.push_str("set datafile commentschars '#'\n");
        s.push_str("set key autotitle columnhead\n");
        let _ = writeln!(
            s,
            "set xlabel '{}'",
            self.columns.first().map_or("", String::as_str)
        );
        let _ = writeln!(
            s,
            "set ylabel '{}'",
            self.columns.get(1).map_or("", String::as_str)
        );
        if self.plot.log_x {
            s.push_str("set logscale x\n");
        }
        if self.plot.log_y {
            s.push_str("set logscale y\n");
        }
        s.push_str("set grid\n");
        let file = data_file.replace('\'', "");
        match self.plot.series_column {
            Some(col) => {
                let mut names: Vec<&str> = Vec::new();
                for row in &self.rows {
                    if let Some(Cell::Text(t)) = row.get(col) {
                        if !names.contains(&t.as_str()) {
                            names.push(t);
                        }
                    }
                }
                let parts: Vec<String> = names
                    .iter()
                    .map(|n| {
                        format!(
                            "'{file}' using 1:(strcol({c}) eq '{n}' ? $2 : NaN) with linespoints title '{n}'",
                            c = col + 1
                        )
                    })
                    .collect();
                let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
            }
            None => {
                let _ = writeln!(s, "plot '{file}' using 1:2 with lines");
            }
        }
        s
    }
}

/// 12 significant digits, scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

/// A CSV file as written by [`Document::to_csv`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    /// `# key = value` lines in file order.
    pub comments: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut table = CsvTable::default();
        let mut have_header = false;
        for (i, line) in text.lines().enumerate() {
            if let Some(c) = line.strip_prefix('#') {
                if have_header {
                    return Err(CliError::Schema(format!(
                        "line {}: comment after header",
                        i + 1
                    )));
                }
                let (k, v) = c.trim_start().split_once(" = ").ok_or_else(|| {
                    CliError::Schema(format!("line {}: malformed comment", i + 1))
                })?;
                table.comments.push((k.to_string(), v.to_string()));
            } else if !have_header {
                table.columns = line.split(',').map(str::to_string).collect();
                have_header = true;
            } else {
                let row: Vec<String> = line.split(',').map(str::to_string).collect();
                if row.len() != table.columns.len() {
                    return Err(CliError::Schema(format!(
                        "line {}: expected {} fields, got {}",
                        i + 1,
                        table.columns.len(),
                        row.len()
                    )));
                }
                table.rows.push(row);
            }
        }
        if !have_header {
            return Err(CliError::Schema("missing header row".into()));
        }
        Ok(table)
    }

    pub fn comment(&self, key: &str) -> Option<&str> {
        self.comments
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `# param` entries.
    pub fn params(&self) -> BTreeMap<String, String> {
        self.prefixed("param ")
    }

    /// `# meta` entries.
    pub fn metadata(&self) -> BTreeMap<String, String> {
        self.prefixed("meta ")
    }

    fn prefixed(&self, prefix: &str) -> BTreeMap<String, String> {
        self.comments
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(prefix).map(|k| (k.to_string(), v.clone())))
            .collect()
    }

    pub fn numeric_column(&self, index: usize) -> Result<Vec<f64>, CliError> {
        self.rows
            .iter()
            .map(|r| {
                r[index].parse::<f64>().map_err(|_| {
                    CliError::Schema(format!(
                        "column {}: not a number: '{}'",
                        index + 1,
                        r[index]
                    ))
                })
            })
            .collect()
    }

    /// Rebuilds the curve of a two-column, or parametric three-column, file.
    pub fn to_curve(&self) -> Result<Curve, CliError> {
        let xs = self.numeric_column(0)?;
        let ys = self.numeric_column(1)?;
        let mut curve = match self.columns.len() {
            2 => Curve::new(
                &self.columns[0],
                &self.columns[1],
                xs.into_iter().zip(ys).collect(),
            )?,
            3 => {
                let ps = self.numeric_column(2)?;
                let triples = ps
                    .into_iter()
                    .zip(xs)
                    .zip(ys)
                    .map(|((p, x), y)| (p, x, y))
                    .collect();
                Curve::parametric(
                    &self.columns[0],
                    &self.columns[1],
                    &self.columns[2],
                    triples,
                )?
            }
            n => {
                return Err(CliError::Schema(format!(
                    "a curve has 2 or 3 columns, got {n}"
                )))
            }
        };
        for (k, v) in self.metadata() {
            curve.insert_metadata(k, v);
        }
        Ok(curve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed_width_scientific() {
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(
            format_number(std::f64::consts::LN_2 * 1e12),
            "6.93147180560e11"
        );
    }

    #[test]
    fn curve_csv_round_trip_is_idempotent() {
        let curve = Curve::new("a_unit", "b_unit", vec![(0.1, 1.0 / 3.0), (0.2, 2.0 / 3.0)])
            .unwrap()
            .with_metadata("kind", "test");
        let params = BTreeMap::from([("n0".to_string(), "1".to_string())]);
        let doc = Document::from_curve("curve test", params.clone(), &curve);
        let csv = doc.to_csv();
        let table = CsvTable::parse(&csv).unwrap();
        assert_eq!(table.comment("command"), Some("curve test"));
        assert_eq!(table.params(), params);
        let back = table.to_curve().unwrap();
        assert_eq!(back.metadata(), curve.metadata());
        for (a, b) in back.points().iter().zip(curve.points()) {
            assert!((a.1 - b.1).abs() <= 1e-11 * b.1.abs());
        }
        assert_eq!(
            Document::from_curve("curve test", params, &back).to_csv(),
            csv
        );
    }

    #[test]
    fn parametric_curve_round_trip() {
        let curve = Curve::parametric(
            "de",
            "ee",
            "radius_m",
            vec![(1.0, 5.0, 2.0), (2.0, 4.0, 3.0)],
        )
        .unwrap();
        let csv = Document::from_curve("c", BTreeMap::new(), &curve).to_csv();
        let back = CsvTable::parse(&csv).unwrap().to_curve().unwrap();
        assert_eq!(back, curve);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(CsvTable::parse("").is_err());
        assert!(CsvTable::parse("a,b\n1\n").is_err());
        assert!(CsvTable::parse("# nonsense\na,b\n").is_err());
        assert!(CsvTable::parse("a,b\nx,1\n").unwrap().to_curve().is_err());
    }
}
