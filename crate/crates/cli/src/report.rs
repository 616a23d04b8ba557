//! Aggregates an experiment directory into the summary table (metric by q,
//! median and interquartile range, missing cells dashed) and the per-figure
//! CSVs. Reading only on-disk artifacts keeps re-runs byte-identical.

use crate::io::{fmt_f64, median_iqr};
use crate::plan::ExperimentPlan;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use strobo_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub median: f64,
    pub iqr: f64,
}

/// One metric row of the summary table: a cell per sweep q plus the
/// ground-truth baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub cells: Vec<Option<Cell>>,
    pub baseline: Option<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub eps: f64,
    pub columns: Vec<usize>,
    pub dim: MetricRow,
    /// Wasserstein rows for H0, H1, H2.
    pub h: Vec<MetricRow>,
}

impl Summary {
    pub fn cd_for_q(&self, q: usize) -> Option<Cell> {
        let i = self.columns.iter().position(|&c| c == q)?;
        self.dim.cells[i]
    }

    pub fn w1_for_q(&self, k: usize, q: usize) -> Option<Cell> {
        let i = self.columns.iter().position(|&c| c == q)?;
        self.h[k].cells[i]
    }
}

fn parse_csv_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|c| c.to_string()).collect())
        .collect())
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| Error::InvalidArgument(format!("bad {what} '{s}': {e}")))
}

fn cell_text(cell: &Option<Cell>) -> String {
    match cell {
        Some(c) => format!("{} ({})", fmt_f64(c.median), fmt_f64(c.iqr)),
        None => "-".to_string(),
    }
}

fn row_from_samples(
    columns: &[usize],
    samples: &BTreeMap<usize, Vec<f64>>,
    baseline_q: usize,
) -> MetricRow {
    let cell_of = |q: usize| -> Option<Cell> {
        samples
            .get(&q)
            .and_then(|v| median_iqr(v))
            .map(|(median, iqr)| Cell { median, iqr })
    };
    MetricRow {
        cells: columns.iter().map(|&q| cell_of(q)).collect(),
        baseline: cell_of(baseline_q),
    }
}

pub fn report(dir: &Path) -> Result<Summary> {
    let plan = ExperimentPlan::load(&dir.join("plan.json"))?;
    if !dir.join("analysis/cd.csv").exists() {
        return Err(Error::InvalidArgument(format!(
            "{} is not a complete experiment directory",
            dir.display()
        )));
    }
    let columns = plan.q_sweep.clone();

    // correlation dimension samples per q
    let mut cd_samples: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in parse_csv_rows(&dir.join("analysis/cd.csv"))? {
        if row.len() < 3 {
            continue;
        }
        let q: usize = row[0]
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad q '{}': {e}", row[0])))?;
        cd_samples
            .entry(q)
            .or_default()
            .push(parse_f64(&row[2], "slope")?);
    }
    let dim = row_from_samples(&columns, &cd_samples, plan.q_truth);

    // Wasserstein samples per (k, q); the baseline column comes from the
    // truth-vs-truth pair file
    let mut w1_samples: [BTreeMap<usize, Vec<f64>>; 3] = Default::default();
    for row in parse_csv_rows(&dir.join("tda/w1.csv"))? {
        if row.len() < 5 {
            continue;
        }
        let q: usize = row[0]
            .parse()
            .map_err(|e| Error::InvalidArgument(format!("bad q '{}': {e}", row[0])))?;
        for k in 0..3 {
            w1_samples[k]
                .entry(q)
                .or_default()
                .push(parse_f64(&row[2 + k], "distance")?);
        }
    }
    let mut baseline_samples: [Vec<f64>; 3] = Default::default();
    for row in parse_csv_rows(&dir.join("tda/baseline.csv"))? {
        if row.len() < 5 {
            continue;
        }
        for k in 0..3 {
            baseline_samples[k].push(parse_f64(&row[2 + k], "distance")?);
        }
    }
    let h: Vec<MetricRow> = (0..3)
        .map(|k| {
            let mut row = row_from_samples(&columns, &w1_samples[k], usize::MAX);
            row.baseline = median_iqr(&baseline_samples[k]).map(|(median, iqr)| Cell { median, iqr });
            row
        })
        .collect();

    // tables.csv in the published layout
    let mut table = String::from("eps,metric");
    for q in &columns {
        let _ = write!(table, ",{q}");
    }
    table.push_str(",baseline\n");
    let eps_text = fmt_f64(plan.system.eps);
    for (name, row) in [("Dim.", &dim), ("H0", &h[0]), ("H1", &h[1]), ("H2", &h[2])] {
        let _ = write!(table, "{eps_text},{name}");
        for cell in &row.cells {
            let _ = write!(table, ",{}", cell_text(cell));
        }
        let _ = writeln!(table, ",{}", cell_text(&row.baseline));
    }
    fs::write(dir.join("tables.csv"), table)?;

    // figure data: ground-truth Lissajou curve and per-q peak overlays
    let figures = dir.join("figures");
    fs::create_dir_all(&figures)?;
    let truth_dir = crate::experiment::run_dir(dir, 0, plan.q_truth);
    if truth_dir.join("lissajou.csv").exists() {
        fs::copy(
            truth_dir.join("lissajou.csv"),
            figures.join("lissajou_truth.csv"),
        )?;
    }
    for &q in &columns {
        let approx = crate::experiment::run_dir(dir, 0, q).join("p2p.csv");
        let truth = truth_dir.join("p2p.csv");
        if !(approx.exists() && truth.exists()) {
            continue;
        }
        let mut out = String::from("source,p_k,p_k1\n");
        for (label, path) in [("truth", &truth), ("approx", &approx)] {
            for row in parse_csv_rows(path)? {
                if row.len() == 2 {
                    let _ = writeln!(out, "{label},{},{}", row[0], row[1]);
                }
            }
        }
        fs::write(figures.join(format!("p2p_q{q:02}.csv")), out)?;
    }

    let summary = Summary {
        eps: plan.system.eps,
        columns,
        dim,
        h,
    };
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(summary)
}
