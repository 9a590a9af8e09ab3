//! Critical-value tables for `T_n*`: the embedded published table, tables
//! built by simulation, and CSV round-tripping.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistic::ScaleEstimator;

/// Significance levels of the published table, in column order.
pub const TABLE_ALPHAS: [f64; 7] = [0.15, 0.1, 0.075, 0.05, 0.025, 0.01, 0.001];

const EMBEDDED_CSV: &str = include_str!("../data/critical_values.csv");

/// Where a table came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Published,
    Simulated { reps: usize, seed: u64 },
    File { path: String },
}

/// One row: a critical value per alpha column, plus `a_n` and `C_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub critical: Vec<f64>,
    pub a_n: f64,
    pub c_n: f64,
}

/// A critical value found in a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lookup {
    pub value: f64,
    pub interpolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    alphas: Vec<f64>,
    rows: BTreeMap<usize, TableRow>,
    pub provenance: Provenance,
    /// Scale estimator the critical values were simulated with.
    pub scale: ScaleEstimator,
}

impl CriticalValueTable {
    /// Builds a table, checking column counts and that critical values
    /// strictly increase as alpha decreases.
    pub fn new(
        alphas: Vec<f64>,
        rows: Vec<TableRow>,
        provenance: Provenance,
        scale: ScaleEstimator,
    ) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Domain(
                "table needs at least one alpha column".into(),
            ));
        }
        if let Some(&bad) = alphas.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::Domain(format!("alpha {bad} is not in (0, 1)")));
        }
        if alphas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Domain(
                "alpha columns must be strictly decreasing".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for row in rows {
            if row.critical.len() != alphas.len() {
                return Err(Error::Domain(format!(
                    "row n = {} has {} critical values, expected {}",
                    row.n,
                    row.critical.len(),
                    alphas.len()
                )));
            }
            if row.critical.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Domain(format!(
                    "row n = {}: critical values must increase as alpha decreases",
                    row.n
                )));
            }
            let n = row.n;
            if map.insert(n, row).is_some() {
                return Err(Error::Domain(format!("duplicate row n = {n}")));
            }
        }
        if map.is_empty() {
            return Err(Error::Domain("table has no rows".into()));
        }
        Ok(Self {
            alphas,
            rows: map,
            provenance,
            scale,
        })
    }

    /// The published table shipped with the crate. Its values match
    /// statistics standardized with the divisor-(n-1) standard deviation.
    pub fn embedded() -> &'static CriticalValueTable {
        static TABLE: OnceLock<CriticalValueTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            Self::from_csv(
                EMBEDDED_CSV,
                Provenance::Published,
                ScaleEstimator::Unbiased,
            )
            .expect("embedded critical-value table is well formed")
        })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn rows(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.values()
    }

    pub fn row(&self, n: usize) -> Option<&TableRow> {
        self.rows.get(&n)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Smallest and largest tabulated n.
    pub fn coverage(&self) -> (usize, usize) {
        let min = *self.rows.keys().next().expect("non-empty");
        let max = *self.rows.keys().next_back().expect("non-empty");
        (min, max)
    }

    fn column(&self, alpha: f64) -> Result<usize> {
        self.alphas
            .iter()
            .position(|&a| (a - alpha).abs() <= 1e-12)
            .ok_or(Error::UnsupportedAlpha(alpha))
    }

    /// Critical value at `(n, alpha)`. Between rows the value is linear in
    /// `ln n`; outside the tabulated range it is an error.
    pub fn lookup(&self, n: usize, alpha: f64) -> Result<Lookup> {
        let col = self.column(alpha)?;
        let (min, max) = self.coverage();
        if n < min || n > max {
            return Err(Error::TableCoverage { n, min, max });
        }
        if let Some(row) = self.rows.get(&n) {
            return Ok(Lookup {
                value: row.critical[col],
                interpolated: false,
            });
        }
        let (lo, below) = self.rows.range(..n).next_back().expect("n > min");
        let (hi, above) = self.rows.range(n..).next().expect("n < max");
        let w = ((n as f64).ln() - (*lo as f64).ln()) / ((*hi as f64).ln() - (*lo as f64).ln());
        Ok(Lookup {
            value: below.critical[col] + w * (above.critical[col] - below.critical[col]),
            interpolated: true,
        })
    }

    /// CSV with header `n,<alphas...>,a_n,C_n`, one row per n ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for a in &self.alphas {
            write!(out, ",{a}").expect("write to String");
        }
        out.push_str(",a_n,C_n\n");
        for row in self.rows.values() {
            out.push_str(&format_row(row));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, provenance: Provenance, scale: ScaleEstimator) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::TableParse {
            line: 1,
            message: "empty table".into(),
        })?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        let bad_header = |message: String| Error::TableParse {
            line: hline,
            message,
        };
        if fields.len() < 4
            || fields[0] != "n"
            || fields[fields.len() - 2] != "a_n"
            || fields[fields.len() - 1] != "C_n"
        {
            return Err(bad_header(format!(
                "expected header `n,<alphas>,a_n,C_n`, got `{header}`"
            )));
        }
        let alphas = fields[1..fields.len() - 2]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad_header(format!("bad alpha column: {e}")))?;

        let mut rows = Vec::new();
        for (line, text) in lines {
            let cells: Vec<&str> = text.split(',').map(str::trim).collect();
            if cells.len() != fields.len() {
                return Err(Error::TableParse {
                    line,
                    message: format!("expected {} fields, got {}", fields.len(), cells.len()),
                });
            }
            let n = cells[0].parse::<usize>().map_err(|e| Error::TableParse {
                line,
                message: format!("bad n `{}`: {e}", cells[0]),
            })?;
            let nums = cells[1..]
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::TableParse {
                            line,
                            message: format!("bad number `{c}`"),
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            let k = alphas.len();
            rows.push(TableRow {
                n,
                critical: nums[..k].to_vec(),
                a_n: nums[k],
                c_n: nums[k + 1],
            });
        }
        Self::new(alphas, rows, provenance, scale)
    }
}

/// One CSV line for `row`, without a trailing newline.
pub fn format_row(row: &TableRow) -> String {
    let mut out = row.n.to_string();
    for v in row.critical.iter().chain([&row.a_n, &row.c_n]) {
        write!(out, ",{v}").expect("write to String");
    }
    out
}
