//! Metric records, CSV emission, cross-seed aggregation, and report-time
//! smoothing.
//!
//! CSV schema (fixed): `env_steps,ext_reward_mean,ext_reward_std,ext_success`
//! followed, in goal-conditioned runs, by `avg_goal_success` and one column
//! per evaluation goal. Baseline runs stop after `ext_success`. Floats are
//! written with Rust's shortest round-trip formatting, so re-parsing a CSV
//! reproduces the records exactly; raw CSVs are never smoothed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::env::Observation;
use crate::error::{Error, Result};
use crate::goal::GoalSpec;

/// One evaluation snapshot during training.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub env_steps: u64,
    pub ext_reward_mean: f64,
    pub ext_reward_std: f64,
    pub ext_success: f64,
    /// Mean of `per_goal_success`; absent in baseline mode.
    pub avg_goal_success: Option<f64>,
    /// Success rate per evaluation goal, aligned with the run's goal set;
    /// empty in baseline mode.
    pub per_goal_success: Vec<f64>,
}

/// Column name for an evaluation goal: `goal_<state>` for discrete spaces,
/// `goal_<dim0>_<dim1>...` for box spaces.
pub fn goal_column_name(goal: &GoalSpec) -> String {
    match &goal.point {
        Observation::Discrete(i) => format!("goal_{i}"),
        Observation::Continuous(v) => {
            let dims: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("goal_{}", dims.join("_"))
        }
    }
}

pub fn csv_header(goal_names: &[String]) -> String {
    let mut cols = vec![
        "env_steps".to_string(),
        "ext_reward_mean".to_string(),
        "ext_reward_std".to_string(),
        "ext_success".to_string(),
    ];
    if !goal_names.is_empty() {
        cols.push("avg_goal_success".to_string());
        cols.extend(goal_names.iter().cloned());
    }
    cols.join(",")
}

pub fn write_csv(path: &Path, records: &[EvalRecord], goal_names: &[String]) -> Result<()> {
    let io_err = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(w, "{}", csv_header(goal_names)).map_err(io_err)?;
    for r in records {
        write!(
            w,
            "{},{},{},{}",
            r.env_steps, r.ext_reward_mean, r.ext_reward_std, r.ext_success
        )
        .map_err(io_err)?;
        if !goal_names.is_empty() {
            assert_eq!(r.per_goal_success.len(), goal_names.len(), "goal column mismatch");
            write!(w, ",{}", r.avg_goal_success.expect("goal runs carry the average"))
                .map_err(io_err)?;
            for v in &r.per_goal_success {
                write!(w, ",{v}").map_err(io_err)?;
            }
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Parsed CSV: header names plus rows of f64 (env_steps included as f64).
#[derive(Clone, Debug)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::Format {
        what: "metrics csv",
        detail: "empty file".into(),
    })?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| Error::Format {
            what: "metrics csv",
            detail: format!("row {}: {e}", i + 2),
        })?;
        if row.len() != columns.len() {
            return Err(Error::Format {
                what: "metrics csv",
                detail: format!("row {} has {} fields, header has {}", i + 2, row.len(), columns.len()),
            });
        }
        rows.push(row);
    }
    Ok(CsvTable { columns, rows })
}

pub fn read_records(path: &Path) -> Result<(Vec<EvalRecord>, Vec<String>)> {
    let table = read_csv(path)?;
    let goal_names: Vec<String> = table.columns.iter().skip(5).cloned().collect();
    let has_goals = table.columns.len() > 4;
    let records = table
        .rows
        .iter()
        .map(|row| EvalRecord {
            env_steps: row[0] as u64,
            ext_reward_mean: row[1],
            ext_reward_std: row[2],
            ext_success: row[3],
            avg_goal_success: if has_goals { Some(row[4]) } else { None },
            per_goal_success: if has_goals { row[5..].to_vec() } else { Vec::new() },
        })
        .collect();
    Ok((records, goal_names))
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    assert!(n > 0.0, "mean of nothing");
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Align per-seed run CSVs on `env_steps` and emit mean and one standard
/// deviation per value column: `env_steps,<col>_mean,<col>_std,...`.
pub fn aggregate_tables(tables: &[CsvTable]) -> Result<CsvTable> {
    let first = tables.first().ok_or(Error::Format {
        what: "aggregate input",
        detail: "no run files matched".into(),
    })?;
    for t in tables {
        if t.columns != first.columns {
            return Err(Error::Format {
                what: "aggregate input",
                detail: "runs have different column schemas".into(),
            });
        }
        if t.rows.len() != first.rows.len() {
            return Err(Error::Format {
                what: "aggregate input",
                detail: "runs have different numbers of evaluation points".into(),
            });
        }
    }
    let mut columns = vec!["env_steps".to_string()];
    for c in &first.columns[1..] {
        columns.push(format!("{c}_mean"));
        columns.push(format!("{c}_std"));
    }
    let mut rows = Vec::with_capacity(first.rows.len());
    for i in 0..first.rows.len() {
        let steps = first.rows[i][0];
        for t in tables {
            if t.rows[i][0] != steps {
                return Err(Error::Format {
                    what: "aggregate input",
                    detail: format!("env_steps mismatch at row {}", i + 1),
                });
            }
        }
        let mut row = vec![steps];
        for c in 1..first.columns.len() {
            let vals: Vec<f64> = tables.iter().map(|t| t.rows[i][c]).collect();
            let (m, s) = mean_std(&vals);
            row.push(m);
            row.push(s);
        }
        rows.push(row);
    }
    Ok(CsvTable { columns, rows })
}

pub fn write_table(path: &Path, table: &CsvTable) -> Result<()> {
    let io_err = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    writeln!(w, "{}", table.columns.join(",")).map_err(io_err)?;
    for row in &table.rows {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", fields.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Gaussian kernel smoothing with reflect padding; `sigma = 0` is the
/// identity. Report-time only.
pub fn smooth_series(values: &[f64], sigma: f64) -> Vec<f64> {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 || values.len() <= 1 {
        return values.to_vec();
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k as f64) * (k as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let n = values.len() as i64;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, w) in kernel.iter().enumerate() {
                let mut idx = i + (j as i64 - radius);
                // reflect at both ends
                if idx < 0 {
                    idx = -idx - 1;
                }
                if idx >= n {
                    idx = 2 * n - 1 - idx;
                }
                let idx = idx.clamp(0, n - 1) as usize;
                acc += w * values[idx];
            }
            acc / norm
        })
        .collect()
}

/// Run manifest: config, environment, code version, and run counters.
pub fn write_manifest(path: &Path, manifest: &serde_json::Value) -> Result<()> {
    let io_err = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    serde_json::to_writer_pretty(&mut w, manifest).map_err(|e| Error::Format {
        what: "manifest",
        detail: e.to_string(),
    })?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(steps: u64, goals: usize) -> EvalRecord {
        let per: Vec<f64> = (0..goals).map(|g| (g as f64) / goals.max(1) as f64).collect();
        let avg = if goals > 0 {
            Some(per.iter().sum::<f64>() / goals as f64)
        } else {
            None
        };
        EvalRecord {
            env_steps: steps,
            ext_reward_mean: -13.25,
            ext_reward_std: 0.5,
            ext_success: 0.75,
            avg_goal_success: avg,
            per_goal_success: per,
        }
    }

    #[test]
    fn empty_record_stream_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_csv(&path, &[], &["goal_0".into()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "env_steps,ext_reward_mean,ext_reward_std,ext_success,avg_goal_success,goal_0\n");
    }

    #[test]
    fn csv_round_trip_reproduces_records_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let names: Vec<String> = (0..3).map(|i| format!("goal_{i}")).collect();
        let records = vec![record(100, 3), record(200, 3)];
        write_csv(&path, &records, &names).unwrap();
        let (back, back_names) = read_records(&path).unwrap();
        assert_eq!(back, records);
        assert_eq!(back_names, names);
    }

    #[test]
    fn baseline_csv_has_no_goal_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        write_csv(&path, &[record(50, 0)], &[]).unwrap();
        let (back, names) = read_records(&path).unwrap();
        assert!(names.is_empty());
        assert_eq!(back[0].avg_goal_success, None);
    }

    #[test]
    fn eight_seed_aggregate_uses_population_std() {
        let tables: Vec<CsvTable> = (0..8)
            .map(|s| CsvTable {
                columns: vec!["env_steps".into(), "ext_success".into()],
                rows: vec![vec![100.0, s as f64]],
            })
            .collect();
        let agg = aggregate_tables(&tables).unwrap();
        assert_eq!(agg.columns, vec!["env_steps", "ext_success_mean", "ext_success_std"]);
        let vals: Vec<f64> = (0..8).map(|s| s as f64).collect();
        let (m, sd) = mean_std(&vals);
        assert_relative_eq!(agg.rows[0][1], m);
        assert_relative_eq!(agg.rows[0][2], sd);
    }

    #[test]
    fn smoothing_keeps_constants_and_identity_at_sigma_zero() {
        let series = vec![2.5; 20];
        for v in smooth_series(&series, 3.0) {
            assert_relative_eq!(v, 2.5, max_relative = 1e-12);
        }
        let series: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(smooth_series(&series, 0.0), series);
    }

    #[test]
    fn smoothing_conserves_impulse_mass() {
        let mut series = vec![0.0; 41];
        series[20] = 1.0;
        let smoothed = smooth_series(&series, 2.0);
        assert_relative_eq!(smoothed.iter().sum::<f64>(), 1.0, max_relative = 1e-9);
        assert!(smoothed[20] < 1.0 && smoothed[20] > smoothed[15]);
    }

    #[test]
    fn goal_column_names_cover_both_spaces() {
        use crate::env::Observation;
        let g = GoalSpec::new(Observation::Discrete(15), 0.1);
        assert_eq!(goal_column_name(&g), "goal_15");
        let g = GoalSpec::new(Observation::Continuous(vec![-1.6, 0.0]), 0.1);
        assert_eq!(goal_column_name(&g), "goal_-1.6_0");
    }
}
