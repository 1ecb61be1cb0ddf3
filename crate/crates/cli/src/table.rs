//! Plot-ready numeric tables with a `#`-prefixed metadata header.
//!
//! CSV numbers use 17 significant digits in scientific notation so output is
//! byte-for-byte reproducible and round-trips every `f64`.

use serde_json::{Map, Value};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
}

impl OutputTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: vec![("format_version".into(), FORMAT_VERSION.to_string())],
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"metadata": {...}, "columns": {"name": [values...], ...}}`.
    pub fn to_json(&self) -> String {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let columns: Map<String, Value> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let values = self.rows.iter().map(|r| json_number(r[i])).collect();
                (name.clone(), Value::Array(values))
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("metadata".into(), Value::Object(metadata));
        doc.insert("columns".into(), Value::Object(columns));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = OutputTable::new(["t", "c"]);
        t.meta("command", "otoc");
        t.push_row(vec![0.0, 0.1]);
        t.push_row(vec![0.5, -2.0]);
        let csv = t.to_csv();
        assert_eq!(
            csv,
            "# format_version = 1\n# command = otoc\nt,c\n\
             0.0000000000000000e0,1.0000000000000001e-1\n\
             5.0000000000000000e-1,-2.0000000000000000e0\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02214076e23] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    #[should_panic]
    fn ragged_row_rejected() {
        OutputTable::new(["a", "b"]).push_row(vec![1.0]);
    }

    #[test]
    fn json_layout() {
        let mut t = OutputTable::new(["x", "y"]);
        t.push_row(vec![1.0, 2.5]);
        t.push_row(vec![2.0, 3.5]);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["metadata"]["format_version"], "1");
        assert_eq!(v["columns"]["y"], serde_json::json!([2.5, 3.5]));
        let keys: Vec<&String> = v["columns"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["x", "y"]);
    }
}
