//! Locale-free number formatting and record emission.

use serde_json::Value;

/// `%g`-style rendering with `digits` significant digits: fixed notation for
/// decimal exponents in [−5, digits), scientific otherwise, trailing zeros
/// dropped. Always uses '.' and never groups thousands.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt9(x: f64) -> String {
    fmt_sig(x, 9)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self, digits: usize) -> String {
        match self {
            Cell::Num(Some(x)) => fmt_sig(*x, digits),
            Cell::Num(None) => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(Some(x)) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Num(None) => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// A table with a fixed column order.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub digits: usize,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            digits: 9,
        }
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.csv(self.digits)).collect();
            out += &cells.join(",");
            out.push('\n');
        }
        out
    }

    /// Rows as JSON objects, keys in column order.
    pub fn json_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|row| {
                let fields: Vec<String> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| format!("{}:{}", Value::from(k.as_str()), v.json()))
                    .collect();
                format!("{{{}}}", fields.join(","))
            })
            .collect()
    }
}
