use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Output of every command. `input_digest` is the SHA-256 of the input
/// bytes; together with `params` and `version` it identifies a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub input_digest: Option<String>,
    pub params: Value,
    pub results: Value,
    pub notes: Vec<String>,
    /// Human-readable rendering used by the text format.
    #[serde(skip)]
    pub table: Option<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &str, input: Option<&[u8]>, params: Value, results: Value) -> Self {
        Self {
            command: command.to_string(),
            version: crate::VERSION.to_string(),
            input_digest: input.map(digest),
            params,
            results,
            notes: Vec::new(),
            table: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `key,value` rows with dotted paths into the report.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "value"]).expect("in-memory write");
        for (k, v) in self.flatten() {
            w.write_record([k, v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
    }

    pub fn to_text(&self) -> String {
        if let Some(t) = &self.table {
            let mut out = t.clone();
            for n in &self.notes {
                out.push_str(&format!("note: {n}\n"));
            }
            return out;
        }
        self.flatten().into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = self.to_json();
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    fn flatten(&self) -> Vec<(String, String)> {
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut out = Vec::new();
        flatten_into(&v, String::new(), &mut out);
        out
    }
}

fn flatten_into(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten_into(child, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten_into(child, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((prefix, s.clone())),
        Value::Null => out.push((prefix, String::new())),
        other => out.push((prefix, other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_and_floats() {
        let r = Report::new("t", Some(b"abc"), json!({"nu": 12}), json!({"a": [0.1, {"b": 1e-300}], "c": null}));
        assert_eq!(
            r.input_digest.as_deref(),
            Some("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
        );
        let csv = r.to_csv();
        assert!(csv.contains("results.a.0,0.1\n"));
        assert!(csv.contains("results.a.1.b,1e-300\n"));
        assert!(csv.contains("params.nu,12\n"));
        let back: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back["results"]["a"][1]["b"].as_f64(), Some(1e-300));
    }
}
