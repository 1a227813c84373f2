use std::io::Write;

use serde::Serialize;

/// Max and mean of one residual family, with its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub name: String,
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Summary {
    pub fn new(name: impl Into<String>, values: &[f64], tolerance: f64) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        let finite = values.iter().all(|v| v.is_finite());
        Self {
            name: name.into(),
            count: values.len(),
            max,
            mean,
            tolerance,
            pass: finite && max <= tolerance,
        }
    }

    /// A count compared against an expected value.
    pub fn count(name: impl Into<String>, found: usize, expected: usize) -> Self {
        Self {
            name: name.into(),
            count: found,
            max: found as f64,
            mean: found as f64,
            tolerance: expected as f64,
            pass: found == expected,
        }
    }
}

/// One row of the CSV form of a report.
pub trait Row {
    fn header() -> Vec<String>;
    fn row(&self) -> Vec<String>;
}

/// Deterministic in `(command, seed)`; timing is kept out of it.
#[derive(Debug, Serialize)]
pub struct Report<I> {
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub summaries: Vec<Summary>,
    pub items: Vec<I>,
}

impl<I: Serialize + Row> Report<I> {
    pub fn new(command: String, seed: u64, summaries: Vec<Summary>, items: Vec<I>) -> Self {
        let pass = summaries.iter().all(|s| s.pass);
        Self {
            command,
            seed,
            pass,
            summaries,
            items,
        }
    }

    pub fn write_json<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut out = out;
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(I::header())?;
        for item in &self.items {
            w.write_record(item.row())?;
        }
        w.flush()?;
        Ok(())
    }

    /// One line per summary, for the terminal.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for m in &self.summaries {
            s.push_str(&format!(
                "{} {}: n={} max={:.3e} mean={:.3e} tol={:.1e}\n",
                if m.pass { "PASS" } else { "FAIL" },
                m.name,
                m.count,
                m.max,
                m.mean,
                m.tolerance
            ));
        }
        s
    }
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}
