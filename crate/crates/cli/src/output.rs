//! Row-oriented CSV and JSON writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value as Json};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// `x` with 12 significant digits, in the style of `%.12g`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => sig12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            // NaN has no JSON form and becomes null
            Cell::Num(x) => sig12(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Json::Null, Json::Number),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Output {
    pub metadata: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Output {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.metadata.push((key.to_owned(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl Write) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text))?;
        }
        out.flush()
    }

    pub fn write_json(&self, mut w: impl Write) -> io::Result<()> {
        let metadata: Map<String, Json> = self.metadata.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| Json::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        let doc = json!({ "metadata": metadata, "rows": rows });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Csv => self.write_csv(sink),
            Format::Json => self.write_json(sink),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}
