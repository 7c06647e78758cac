use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Axis;
use crate::samplers::Method;
use crate::Result;

pub const STATUS_OK: &str = "ok";

pub const COLUMNS: [&str; 11] = [
    "problem",
    "method",
    "axis",
    "axis_value",
    "dim",
    "n_samples",
    "seed",
    "q_hat",
    "q_se",
    "q_pred",
    "status",
];

/// One (method, grid value) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub problem: String,
    pub method: Method,
    pub axis: Axis,
    pub axis_value: f64,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub q_hat: Option<f64>,
    pub q_se: Option<f64>,
    pub q_pred: Option<f64>,
    pub status: String,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK && self.q_hat.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

impl ResultTable {
    pub fn n_failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }

    /// Successful rows of one method, in grid order.
    pub fn method_rows(&self, method: Method) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.method == method && r.is_ok())
    }

    /// Methods present in the table, in canonical order.
    pub fn methods(&self) -> Vec<Method> {
        Method::ALL
            .into_iter()
            .filter(|m| self.rows.iter().any(|r| r.method == *m))
            .collect()
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?;
        Ok(Self { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
pub(crate) fn sample_row(method: Method, x: f64, q: f64) -> Row {
    Row {
        problem: "random_walk".into(),
        method,
        axis: Axis::Epsilon,
        axis_value: x,
        dim: 2,
        n_samples: 100,
        seed: 3,
        q_hat: Some(q),
        q_se: Some(q / 10.0),
        q_pred: None,
        status: STATUS_OK.into(),
    }
}
