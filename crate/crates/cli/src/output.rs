use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// A command's result, held in full before anything is written.
#[derive(Debug, Clone)]
pub struct Output {
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    result: &'a Value,
}

/// 17 significant digits, `.` as decimal separator regardless of locale.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Output {
    pub fn render<C: Serialize>(&self, command: &str, config: &C, format: Format) -> String {
        match format {
            Format::Json => {
                let env = Envelope {
                    command,
                    version: env!("CARGO_PKG_VERSION"),
                    config,
                    result: &self.result,
                };
                let mut s = serde_json::to_string_pretty(&env).expect("output is serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let fields: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(v) => format_number(*v),
                            Cell::Int(v) => v.to_string(),
                            Cell::Text(t) => csv_field(t),
                            Cell::Bool(b) => b.to_string(),
                            Cell::Empty => String::new(),
                        })
                        .collect();
                    s.push_str(&fields.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}
