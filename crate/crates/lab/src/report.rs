//! In-memory run outputs: JSON-lines records and CSV summaries.
//!
//! Every mass is written as an exact `num/den` string.

use std::collections::BTreeMap;

use serde::Serialize;

/// Files produced by one command, keyed by file name, plus summary lines
/// for the manifest. A command may finish its reports and still fail a
/// gate or hit a cap; those outcomes set the exit status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub files: BTreeMap<String, String>,
    pub summary: Vec<String>,
    pub gate_failure: Option<String>,
    pub cap_hit: Option<String>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.gate_failure.is_some() {
            2
        } else if self.cap_hit.is_some() {
            3
        } else {
            0
        }
    }

    pub fn file(&mut self, name: &str, contents: String) {
        self.files.insert(name.to_string(), contents);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

/// One JSON object per line.
pub fn json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// A CSV table with a header row.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        #[derive(Serialize)]
        struct R {
            point: String,
            multiplicity: usize,
        }
        let s = json_lines(&[R { point: "3".into(), multiplicity: 1 }]);
        assert_eq!(s, "{\"point\":\"3\",\"multiplicity\":1}\n");
        let t = csv_table(&["a", "b"], &[vec!["1/2".into(), "x,y".into()]]);
        assert_eq!(t, "a,b\n1/2,\"x,y\"\n");
    }
}
