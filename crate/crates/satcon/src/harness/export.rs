//! Trajectory CSV and run-summary JSON export, plus the CSV reader used for
//! round-trip checks and external tooling.
//!
//! CSV values are printed with 17 significant digits, enough to reproduce
//! every `f64` bit for bit on re-import.

use super::{RunError, RunSummary};
use crate::dynamics::{Model, Trajectory};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

const MAX_COLUMNS: usize = 65_536;

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a trajectory as CSV: header `t,x_1,...,x_N[,v_1,...,v_N]`, one
/// row per stored sample, newline-terminated.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let n = traj.node_count();
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    if traj.model() == Model::Double {
        for i in 1..=n {
            let _ = write!(out, ",v_{i}");
        }
    }
    out.push('\n');
    for k in 0..traj.len() {
        out.push_str(&format_value(traj.times()[k]));
        for v in traj.state(k) {
            out.push(',');
            out.push_str(&format_value(*v));
        }
        out.push('\n');
    }
    out
}

pub fn export_csv(traj: &Trajectory, path: &Path) -> Result<(), RunError> {
    std::fs::write(path, trajectory_to_csv(traj)).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a trajectory CSV produced by [`trajectory_to_csv`].
pub fn import_csv(text: &str) -> Result<Trajectory, CsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| CsvError::Format {
        line: 1,
        message: "empty document".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() > MAX_COLUMNS {
        return Err(CsvError::Format {
            line: 1,
            message: "too many columns".into(),
        });
    }
    if columns.first() != Some(&"t") {
        return Err(CsvError::Format {
            line: 1,
            message: "header must start with `t`".into(),
        });
    }
    let data_cols = columns.len() - 1;
    let mut n = 0;
    while n < data_cols && columns[1 + n] == format!("x_{}", n + 1) {
        n += 1;
    }
    if n == 0 {
        return Err(CsvError::Format {
            line: 1,
            message: "header must list x_1..x_N".into(),
        });
    }
    let model = if data_cols == n {
        Model::Single
    } else if data_cols == 2 * n && (0..n).all(|i| columns[1 + n + i] == format!("v_{}", i + 1)) {
        Model::Double
    } else {
        return Err(CsvError::Format {
            line: 1,
            message: "header columns must be x_1..x_N optionally followed by v_1..v_N".into(),
        });
    };

    let mut times = Vec::new();
    let mut states = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t = parse_field(fields.next(), line_no, "t")?;
        if let Some(&last) = times.last() {
            if t <= last {
                return Err(CsvError::Format {
                    line: line_no,
                    message: format!("time {t} does not increase past {last}"),
                });
            }
        }
        let mut row = Vec::with_capacity(data_cols);
        for c in 1..=data_cols {
            row.push(parse_field(fields.next(), line_no, columns[c])?);
        }
        if fields.next().is_some() {
            return Err(CsvError::Format {
                line: line_no,
                message: "row has more fields than the header".into(),
            });
        }
        times.push(t);
        states.extend_from_slice(&row);
    }
    if times.is_empty() {
        return Err(CsvError::Format {
            line: 2,
            message: "no data rows".into(),
        });
    }
    let dt = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let dt = if dt.is_finite() { dt } else { 0.0 };
    Ok(Trajectory::from_parts(model, n, dt, times, states))
}

/// Reads and parses a trajectory CSV file.
pub fn read_csv(path: &Path) -> Result<Trajectory, CsvError> {
    let text = std::fs::read_to_string(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    import_csv(&text)
}

fn parse_field(field: Option<&str>, line: usize, what: &str) -> Result<f64, CsvError> {
    let raw = field.ok_or_else(|| CsvError::Format {
        line,
        message: format!("missing field `{what}`"),
    })?;
    let v: f64 = raw.parse().map_err(|_| CsvError::Format {
        line,
        message: format!("invalid number `{raw}` in field `{what}`"),
    })?;
    if !v.is_finite() {
        return Err(CsvError::Format {
            line,
            message: format!("non-finite value in field `{what}`"),
        });
    }
    Ok(v)
}

/// Serializes a run summary as pretty JSON with stable key order.
pub fn summary_to_json(summary: &RunSummary) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    text
}

pub fn export_summary(summary: &RunSummary, path: &Path) -> Result<(), RunError> {
    std::fs::write(path, summary_to_json(summary)).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Model, Network, SaturationSpec, SimConfig};
    use crate::graph::Graph;

    fn small_trajectory() -> Trajectory {
        let g = Graph::undirected(2, &[(0, 1, 1.0)]).unwrap();
        let sat = SaturationSpec::homogeneous(2, 1.0).unwrap();
        let cfg = SimConfig::new(0.125, 1.0).unwrap();
        simulate(
            Model::Single,
            &[0.75, -0.25],
            &Network::Fixed(&g),
            &sat,
            &cfg,
        )
        .unwrap()
    }

    #[test]
    fn csv_layout_single() {
        let traj = small_trajectory();
        let csv = trajectory_to_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x_1,x_2");
        assert!(csv.ends_with('\n'));
        // Header plus one row per stored sample.
        assert_eq!(csv.lines().count(), traj.len() + 1);
    }

    #[test]
    fn csv_three_samples_make_four_lines() {
        let traj = Trajectory::from_parts(
            Model::Single,
            2,
            0.5,
            vec![0.0, 0.5, 1.0],
            vec![1.0, -1.0, 0.5, -0.5, 0.25, -0.25],
        );
        let csv = trajectory_to_csv(&traj);
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let traj = small_trajectory();
        let csv = trajectory_to_csv(&traj);
        let back = import_csv(&csv).unwrap();
        assert_eq!(back.times(), traj.times());
        assert_eq!(back.node_count(), traj.node_count());
        for k in 0..traj.len() {
            assert_eq!(back.state(k), traj.state(k));
        }
        assert_eq!(trajectory_to_csv(&back), csv);
    }

    #[test]
    fn csv_rejects_decreasing_times() {
        let text = "t,x_1\n0.0,1.0\n0.0,2.0\n";
        assert!(matches!(
            import_csv(text),
            Err(CsvError::Format { line: 3, .. })
        ));
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(import_csv("a,b\n1,2\n").is_err());
        assert!(import_csv("t,x_1,v_1,v_2\n0,1,2,3\n").is_err());
        assert!(import_csv("").is_err());
    }

    #[test]
    fn double_model_column_count() {
        let g =
            Graph::undirected(10, &(0..9).map(|i| (i, i + 1, 1.0)).collect::<Vec<_>>()).unwrap();
        let sat = SaturationSpec::homogeneous(10, 1.0).unwrap();
        let cfg = SimConfig::new(0.1, 0.5).unwrap();
        let x0 = vec![0.0; 20];
        let traj = simulate(Model::Double, &x0, &Network::Fixed(&g), &sat, &cfg).unwrap();
        let csv = trajectory_to_csv(&traj);
        let header = csv.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 21);
        let back = import_csv(&csv).unwrap();
        assert_eq!(back.model(), Model::Double);
        assert_eq!(back.node_count(), 10);
    }
}
