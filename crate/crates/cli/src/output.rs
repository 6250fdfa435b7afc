//! CSV tables with a `#` comment header, and gnuplot scripts that plot them.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(field: &str) -> Self {
        field.parse().map(Cell::Num).unwrap_or_else(|_| Cell::Text(field.to_owned()))
    }
}

/// Shortest decimal that parses back to the same bits, in exponent form for
/// very small or very large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Comment lines (without the `# ` prefix), column names and rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(comments: Vec<String>, columns: Vec<String>) -> Self {
        Self {
            comments,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        self.rows.iter().map(|r| r[k].as_num()).collect()
    }
}

fn write_comments<W: Write>(out: &mut W, comments: &[String]) -> io::Result<()> {
    for c in comments {
        if c.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "# {c}")?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(mut out: W, table: &Table) -> io::Result<()> {
    write_comments(&mut out, &table.comments)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()
}

pub fn read_csv<R: BufRead>(mut input: R) -> io::Result<Table> {
    let mut comments = Vec::new();
    let mut rest = String::new();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        match line.strip_prefix('#') {
            Some(c) => {
                let c = c.trim_end_matches(['\n', '\r']);
                comments.push(c.strip_prefix(' ').unwrap_or(c).to_owned());
            }
            None => {
                rest.push_str(&line);
                break;
            }
        }
    }
    input.read_to_string(&mut rest)?;

    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let columns = r.headers()?.iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(Cell::parse).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { comments, columns, rows })
}

/// One line of a plot: column names for x and y, and a legend title.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x: String,
    pub y: String,
    pub title: String,
}

impl Series {
    pub fn new(x: &str, y: &str, title: &str) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
            title: title.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub series: Vec<Series>,
}

/// Gnuplot script rendering `csv_name` (relative to the script) to a PNG
/// next to it.
pub fn gnuplot_script(comments: &[String], table: &Table, csv_name: &str, spec: &PlotSpec) -> String {
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let mut s = String::new();
    let mut header = Vec::new();
    write_comments(&mut header, comments).expect("writing to a Vec cannot fail");
    s.push_str(std::str::from_utf8(&header).expect("comments are UTF-8"));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set datafile columnheaders\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set title '{}'", spec.title);
    let _ = writeln!(s, "set xlabel '{}'", spec.xlabel);
    let _ = writeln!(s, "set ylabel '{}'", spec.ylabel);
    s.push_str("set key outside right\nset grid\n");
    let plots: Vec<String> = spec
        .series
        .iter()
        .filter_map(|se| {
            let x = table.column(&se.x)? + 1;
            let y = table.column(&se.y)? + 1;
            Some(format!("'{csv_name}' using {x}:{y} with linespoints title '{}'", se.title))
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Write `name.csv` and, when `plot` is given, `name.gp` into `dir`.
pub fn emit(dir: &Path, name: &str, table: &Table, plot: Option<&PlotSpec>) -> io::Result<Vec<PathBuf>> {
    let csv_name = format!("{name}.csv");
    let csv_path = dir.join(&csv_name);
    let mut buf = Vec::new();
    write_csv(&mut buf, table)?;
    fs::write(&csv_path, buf)?;
    let mut files = vec![csv_path];
    if let Some(spec) = plot {
        let gp_path = dir.join(format!("{name}.gp"));
        fs::write(&gp_path, gnuplot_script(&table.comments, table, &csv_name, spec))?;
        files.push(gp_path);
    }
    Ok(files)
}
