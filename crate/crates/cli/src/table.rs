//! Result rows and CSV output.

use std::io::Write;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Printed with 12 significant digits.
    Real(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_significant(*v, 12),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// `x` with `digits` significant digits: positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Columns shared by every experiment kind, in order.
pub const COMMON_COLUMNS: [&str; 7] = ["experiment", "n", "T", "engine", "probability", "runtime_ms", "seed"];

/// One output row: the common fields plus experiment-specific extras.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub n: usize,
    pub horizon: Option<usize>,
    pub engine: String,
    pub probability: Option<f64>,
    pub runtime_ms: u64,
    pub seed: u64,
    pub extra: Vec<Cell>,
}

/// Rows of one experiment kind with a fixed column set.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub kind: String,
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<ResultRow>,
    /// `key: value` lines emitted as `#` comments above the header.
    pub provenance: Vec<(String, String)>,
}

impl Table {
    pub fn new(kind: &str, extra_columns: &[&'static str]) -> Self {
        Self {
            kind: kind.to_string(),
            extra_columns: extra_columns.to_vec(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn columns(&self) -> Vec<&'static str> {
        COMMON_COLUMNS
            .iter()
            .copied()
            .chain(self.extra_columns.iter().copied())
            .collect()
    }

    pub fn push(&mut self, row: ResultRow) {
        assert_eq!(row.extra.len(), self.extra_columns.len(), "row width for {}", self.kind);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.provenance.push((key.to_string(), value.to_string()));
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.provenance {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns())?;
        for r in &self.rows {
            let mut rec = vec![
                r.experiment.clone(),
                r.n.to_string(),
                Cell::from(r.horizon).render(),
                r.engine.clone(),
                Cell::from(r.probability).render(),
                r.runtime_ms.to_string(),
                r.seed.to_string(),
            ];
            rec.extend(r.extra.iter().map(Cell::render));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("UTF-8 output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_significant(0.847923407207159, 12), "0.847923407207");
        assert_eq!(format_significant(1.0, 12), "1.00000000000");
        assert_eq!(format_significant(1186.5396825396824, 12), "1186.53968254");
        assert_eq!(format_significant(2.5e-9, 12), "2.50000000000e-9");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(-0.125, 3), "-0.125");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &["extra"]);
        t.note("config", "{}");
        t.push(ResultRow {
            experiment: "demo".into(),
            n: 3,
            horizon: Some(5),
            engine: "direct".into(),
            probability: Some(0.5),
            runtime_ms: 7,
            seed: 1,
            extra: vec![Cell::Empty],
        });
        let s = t.to_csv_string();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# config: {}");
        assert_eq!(lines[1], "experiment,n,T,engine,probability,runtime_ms,seed,extra");
        assert_eq!(lines[2], "demo,3,5,direct,0.500000000000,7,1,");
    }
}
