//! Tabular CSV/JSON export with round-trip float formatting.

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::AbsorptionReport;
use crate::closedform::ThresholdSweep;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::meanfield::Trajectory;
use crate::scalar::Scalar;
use crate::sim::SimResult;

/// Shortest representation that parses back to the same `f64`, switching to
/// exponent notation outside `[1e-4, 1e15)`.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Appends the rows of another table with the same columns.
    pub fn extend(&mut self, other: Table) -> Result<()> {
        if other.columns != self.columns {
            return Err(Error::domain("cannot concatenate tables with different columns"));
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// `{"columns": [...], "rows": [[...], ...]}`; non-finite floats become null.
    pub fn to_json_value(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Columns `(state_index, blue_count, label, t_i, c_die, c_force)`; the
/// probability columns are empty under SARPZF.
pub fn report_table<T: Scalar>(r: &AbsorptionReport<T>) -> Table {
    report_table_with_p(r, false)
}

/// As [`report_table`], optionally prefixed with a `p` column for sweeps.
pub fn report_table_with_p<T: Scalar>(r: &AbsorptionReport<T>, with_p: bool) -> Table {
    let mut cols = vec!["state_index", "blue_count", "label", "t_i", "c_die", "c_force"];
    if with_p {
        cols.insert(0, "p");
    }
    let mut t = Table::new(&cols);
    for (row, &state) in r.states.iter().enumerate() {
        let (die, force) = match &r.c {
            Some(c) => (Cell::from(c[(row, 0)].to_f64_lossy()), Cell::from(c[(row, 1)].to_f64_lossy())),
            None => (Cell::from(""), Cell::from("")),
        };
        let mut cells = vec![
            Cell::from(state),
            Cell::from(r.blue_counts[row]),
            Cell::from(r.labels[row].clone()),
            Cell::from(r.t[row].to_f64_lossy()),
            die,
            force,
        ];
        if with_p {
            cells.insert(0, Cell::from(r.p.to_f64_lossy()));
        }
        t.push(cells);
    }
    t
}

/// Columns `(n, b_n, metric_value)`.
pub fn sweep_table(s: &ThresholdSweep) -> Table {
    let mut t = Table::new(&["n", "b_n", "metric_value"]);
    for ((&n, &b), &v) in s.n_grid.iter().zip(&s.b_values).zip(&s.values) {
        t.push(vec![n.into(), b.into(), v.into()]);
    }
    t
}

/// Columns `(p, die_out_fraction, se_die_out, mean_abs_time, se_abs_time,
/// censored_count, trials, seed)`, one row per result.
pub fn sim_table(results: &[SimResult]) -> Table {
    let mut t = Table::new(&[
        "p",
        "die_out_fraction",
        "se_die_out",
        "mean_abs_time",
        "se_abs_time",
        "censored_count",
        "trials",
        "seed",
    ]);
    for r in results {
        t.push(vec![
            r.p.into(),
            r.die_out_fraction.into(),
            r.se_die_out.into(),
            r.mean_abs_time.into(),
            r.se_abs_time.into(),
            r.censored_count.into(),
            r.trials.into(),
            r.seed.into(),
        ]);
    }
    t
}

/// Columns `(t, rho)` plus `p_0 .. p_{n-1}` when `per_vertex` is set.
pub fn trajectory_table(tr: &Trajectory, per_vertex: bool) -> Table {
    let n = tr.probs.first().map_or(0, Vec::len);
    let mut cols = vec!["t".to_string(), "rho".to_string()];
    if per_vertex {
        cols.extend((0..n).map(|v| format!("p_{v}")));
    }
    let mut t = Table {
        columns: cols,
        rows: Vec::new(),
    };
    for (i, (&time, &rho)) in tr.t.iter().zip(&tr.rho).enumerate() {
        let mut row = vec![Cell::from(time), Cell::from(rho)];
        if per_vertex {
            row.extend(tr.probs[i].iter().map(|&x| Cell::from(x)));
        }
        t.rows.push(row);
    }
    t
}

/// A matrix as CSV with header `c0..c{m-1}`.
pub fn matrix_table<T: Scalar>(m: &Matrix<T>) -> Table {
    let cols: Vec<String> = (0..m.cols()).map(|j| format!("c{j}")).collect();
    let rows = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| Cell::from(x.to_f64_lossy())).collect())
        .collect();
    Table { columns: cols, rows }
}
