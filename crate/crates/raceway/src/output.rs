//! CSV and JSON artifacts. Every CSV starts with a header row and writes reals
//! with Rust's shortest round-trip formatting, so values reload bitwise.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use raceway_core::lagrange::LayerTrace;
use raceway_core::{EnvironmentConfig, FlowState, FourierShape, GradientReport, OptimizeReport};
use serde::Serialize;

use crate::error::{Error, Result};

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `header` then every row.
pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut writer = csv::Writer::from_path(path).map_err(csv_error(path))?;
    writer.write_record(header).map_err(csv_error(path))?;
    for row in rows {
        writer.write_record(row).map_err(csv_error(path))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::to_writer_pretty(BufWriter::new(file), value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Columns `n,a`, one row per coefficient, `n` starting at 1.
pub fn write_shape(path: &Path, shape: &FourierShape) -> Result<()> {
    let rows = shape
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| vec![(i + 1).to_string(), a.to_string()]);
    write_table(path, &["n", "a"], rows)
}

pub fn read_shape(path: &Path) -> Result<FourierShape> {
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let header = reader.headers().map_err(csv_error(path))?;
    if header.iter().collect::<Vec<_>>() != ["n", "a"] {
        return Err(format("expected header `n,a`".into()));
    }
    let mut coeffs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error(path))?;
        let line = i + 2;
        let n: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| format(format!("line {line}: invalid index `{}`", &record[0])))?;
        if n != i + 1 {
            return Err(format(format!(
                "line {line}: expected index {}, found {n}",
                i + 1
            )));
        }
        let a: f64 = record[1]
            .trim()
            .parse()
            .map_err(|_| format(format!("line {line}: invalid coefficient `{}`", &record[1])))?;
        coeffs.push(a);
    }
    Ok(FourierShape::new(coeffs))
}

/// Columns `t,x,z,I,C,mu` at every Heun node.
pub fn write_trace(path: &Path, trace: &LayerTrace) -> Result<()> {
    let rows = trace.samples.iter().map(|s| {
        [s.t, s.x, s.z, s.light, s.c, s.mu]
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
    });
    write_table(path, &["t", "x", "z", "I", "C", "mu"], rows)
}

/// Columns `iteration,mu,grad_norm,step`; `step` is the accepted step that led to
/// the iterate and is empty for the start.
pub fn write_history(path: &Path, report: &OptimizeReport) -> Result<()> {
    let rows = report
        .mu_history
        .iter()
        .zip(&report.grad_norm_history)
        .enumerate()
        .map(|(k, (mu, g))| {
            let step = k.checked_sub(1).and_then(|i| report.step_history.get(i));
            vec![
                k.to_string(),
                mu.to_string(),
                g.to_string(),
                step.map(f64::to_string).unwrap_or_default(),
            ]
        });
    write_table(path, &["iteration", "mu", "grad_norm", "step"], rows)
}

/// Columns `n,analytic,fd,relative_error`.
pub fn write_grad_check(path: &Path, report: &GradientReport) -> Result<()> {
    let rows = report.fd_check.iter().flatten().enumerate().map(|(i, c)| {
        vec![
            (i + 1).to_string(),
            c.analytic.to_string(),
            c.finite_difference.to_string(),
            c.relative_error.to_string(),
        ]
    });
    write_table(path, &["n", "analytic", "fd", "relative_error"], rows)
}

/// Flow quantities on a uniform grid over `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopographyDump {
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub zb: Vec<f64>,
    pub eta: Vec<f64>,
    pub u: Vec<f64>,
}

impl TopographyDump {
    /// `n_samples >= 2` points, both endpoints included.
    pub fn sample(shape: &FourierShape, env: &EnvironmentConfig, n_samples: usize) -> Result<Self> {
        let n = n_samples.max(2);
        let mut dump = TopographyDump {
            x: vec![],
            h: vec![],
            zb: vec![],
            eta: vec![],
            u: vec![],
        };
        for i in 0..n {
            let x = if i == n - 1 {
                env.length
            } else {
                env.length * i as f64 / (n - 1) as f64
            };
            let flow = FlowState::new(shape, env, x)?;
            dump.x.push(x);
            dump.h.push(flow.h);
            dump.zb.push(flow.zb);
            dump.eta.push(flow.eta);
            dump.u.push(flow.u);
        }
        Ok(dump)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Columns `x,h,zb,eta,u`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let rows = (0..self.len()).map(|i| {
            [self.x[i], self.h[i], self.zb[i], self.eta[i], self.u[i]]
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
        });
        write_table(path, &["x", "h", "zb", "eta", "u"], rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a_star.csv");
        let shape = FourierShape::new(vec![
            0.1 / 3.0,
            -1e-17,
            5e-300,
            std::f64::consts::PI * 1e-3,
            0.0,
        ]);
        write_shape(&path, &shape).unwrap();
        let back = read_shape(&path).unwrap();
        for (a, b) in shape.coeffs().iter().zip(back.coeffs()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.order(), 5);
    }

    #[test]
    fn bad_shape_files_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "k,v\n1,0.1\n").unwrap();
        assert!(matches!(read_shape(&path), Err(Error::Format { .. })));
        fs::write(&path, "n,a\n2,0.1\n").unwrap();
        assert!(matches!(read_shape(&path), Err(Error::Format { .. })));
        fs::write(&path, "n,a\n1,abc\n").unwrap();
        assert!(matches!(read_shape(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn flat_dump_columns() {
        let env = EnvironmentConfig::default();
        let dump = TopographyDump::sample(&FourierShape::flat(2), &env, 11).unwrap();
        assert_eq!(dump.len(), 11);
        assert_eq!(dump.x[0], 0.0);
        assert_eq!(dump.x[10], env.length);
        for i in 0..dump.len() {
            assert!((dump.zb[i] + 0.4).abs() < 1e-12);
            assert!(dump.eta[i].abs() < 1e-12);
            assert!((dump.h[i] * dump.u[i] - env.q0).abs() < 1e-12);
        }
    }
}
