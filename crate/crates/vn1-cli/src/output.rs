//! Machine-readable emission: JSON-style records for single runs and CSV for
//! sweeps and tables. Every float is printed with 17 significant digits so a
//! reader recovers the exact bit pattern.

use std::fmt::Write as _;

use crate::CliError;

/// 17 significant digits: exact f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Conventions stamped on every output.
pub const CONVENTIONS: &[(&str, &str)] = &[
    ("basis_order", "|+1>,|0>,|-1>"),
    (
        "discrete_q_eigenvalues",
        "2*pi*k/d so that exp(iQ) is the unit pointer translation; the 2*pi*k/sqrt(d) labels appear in the wigner dump as q_root_scale",
    ),
    (
        "lambda_insertion",
        "canonical-readout commutator terms (cos, sin, 1-cos coefficients) carry the factor lambda",
    ),
    (
        "readout_centering",
        "formulas evaluate O - <O>; the subtracted offset is restored in avg_output and reported as readout_offset",
    ),
    ("float_format", "%.16e (17 significant digits)"),
];

/// Seconds since the epoch; honors SOURCE_DATE_EPOCH for reproducible output.
pub fn timestamp_unix() -> u64 {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(t) = v.trim().parse::<u64>() {
            return t;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    /// Pre-rendered nested object or array.
    Raw(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Float(x) => fmt_f64(*x),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => format!("\"{}\"", s.replace('"', "'")),
            Value::Bool(b) => b.to_string(),
            Value::Raw(raw) => raw.clone(),
        }
    }
}

/// Ordered key/value record, renderable as a JSON object or as two-column
/// CSV.
pub struct Record {
    entries: Vec<(String, String)>,
}

impl Record {
    pub fn new(command: &str, config_hash: &str) -> Self {
        let mut r = Self { entries: Vec::new() };
        r.push("schema", Value::Str("vn1.record/1".into()));
        r.push("command", Value::Str(command.into()));
        r.push("config_hash", Value::Str(config_hash.into()));
        r.push("timestamp_unix", Value::Int(timestamp_unix() as i64));
        let mut conv = String::from("{");
        for (i, (k, v)) in CONVENTIONS.iter().enumerate() {
            if i > 0 {
                conv.push(',');
            }
            let _ = write!(conv, "\"{k}\":\"{v}\"");
        }
        conv.push('}');
        r.push("conventions", Value::Raw(conv));
        r
    }

    pub fn push(&mut self, key: &str, value: Value) {
        self.entries.push((key.to_string(), value.render()));
    }

    pub fn push_complex(&mut self, key: &str, re: f64, im: f64) {
        self.push(
            key,
            Value::Raw(format!("{{\"re\":{},\"im\":{}}}", fmt_f64(re), fmt_f64(im))),
        );
    }

    /// Labeled term breakdown as a nested object.
    pub fn push_terms(&mut self, key: &str, terms: &[(&'static str, f64)]) {
        let mut obj = String::from("{");
        for (i, (label, value)) in terms.iter().enumerate() {
            if i > 0 {
                obj.push(',');
            }
            let _ = write!(obj, "\"{label}\":{}", fmt_f64(*value));
        }
        obj.push('}');
        self.push(key, Value::Raw(obj));
    }

    pub fn push_float_array(&mut self, key: &str, values: &[f64]) {
        let mut arr = String::from("[");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                arr.push(',');
            }
            arr.push_str(&fmt_f64(*v));
        }
        arr.push(']');
        self.push(key, Value::Raw(arr));
    }

    pub fn push_str_array(&mut self, key: &str, values: &[String]) {
        let mut arr = String::from("[");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                arr.push(',');
            }
            let _ = write!(arr, "\"{}\"", v.replace('"', "'"));
        }
        arr.push(']');
        self.push(key, Value::Raw(arr));
    }

    /// Structured single-object rendering.
    pub fn finish(self) -> Result<String, CliError> {
        let mut body = String::from("{");
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                body.push(',');
            }
            let _ = write!(body, "\"{k}\":{v}");
        }
        body.push_str("}\n");
        validate_emission(&body)?;
        Ok(body)
    }

    /// Two-column key,value CSV rendering of the same record.
    pub fn finish_csv(self) -> Result<String, CliError> {
        let mut text = String::from("key,value\n");
        for (k, v) in &self.entries {
            // nested objects stay as one quoted cell
            let cell = if v.starts_with('{') || v.starts_with('[') {
                format!("\"{}\"", v.replace('"', "'"))
            } else {
                v.trim_matches('"').to_string()
            };
            let _ = writeln!(text, "{k},{cell}");
        }
        validate_emission(&text)?;
        Ok(text)
    }
}

/// CSV table with a leading conventions block as comment lines.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(command: &str, config_hash: &str, header: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# command: {command}");
        let _ = writeln!(text, "# config_hash: {config_hash}");
        let _ = writeln!(text, "# timestamp_unix: {}", timestamp_unix());
        for (k, v) in CONVENTIONS {
            let _ = writeln!(text, "# {k}: {v}");
        }
        let _ = writeln!(text, "{}", header.join(","));
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn finish(self) -> Result<String, CliError> {
        validate_emission(&self.text)?;
        Ok(self.text)
    }
}

/// Emission gate: no NaN or infinity may reach an output file.
fn validate_emission(text: &str) -> Result<(), CliError> {
    if text.contains("NaN") || text.contains("inf") {
        return Err(CliError::internal(
            "refusing to emit a non-finite number; inputs are inconsistent",
        ));
    }
    Ok(())
}

pub fn write_out(path: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
