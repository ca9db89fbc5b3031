//! Check records and their JSON / CSV serialization.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Acceptance rule of a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Tolerance {
    AtMost { limit: f64 },
    AtLeast { limit: f64 },
    Within { lo: f64, hi: f64 },
}

impl Tolerance {
    pub fn accepts(&self, v: f64) -> bool {
        match *self {
            Tolerance::AtMost { limit } => v <= limit,
            Tolerance::AtLeast { limit } => v >= limit,
            Tolerance::Within { lo, hi } => lo <= v && v <= hi,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Tolerance::AtMost { limit } => write!(f, "<={limit:e}"),
            Tolerance::AtLeast { limit } => write!(f, ">={limit}"),
            Tolerance::Within { lo, hi } => write!(f, "[{lo},{hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub value: f64,
    pub tol: Tolerance,
    pub pass: bool,
    #[serde(default)]
    pub order: Option<f64>,
    #[serde(default)]
    pub coverage: Option<f64>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, value: f64, tol: Tolerance) -> Self {
        CheckRecord {
            check: check.into(),
            value,
            pass: tol.accepts(value),
            tol,
            order: None,
            coverage: None,
        }
    }

    pub fn at_most(check: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(check, value, Tolerance::AtMost { limit })
    }

    pub fn at_least(check: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(check, value, Tolerance::AtLeast { limit })
    }

    /// A convergence-order check; `value` and `order` coincide.
    pub fn order(check: impl Into<String>, order: f64, lo: f64, hi: f64) -> Self {
        let mut r = Self::new(check, order, Tolerance::Within { lo, hi });
        r.order = Some(order);
        r
    }

    pub fn with_coverage(mut self, coverage: f64) -> Self {
        self.coverage = Some(coverage);
        self
    }
}

/// Everything a subcommand produced, stamped with version and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One row per check with columns check, value, tol, pass, order, coverage.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check", "value", "tol", "pass", "order", "coverage"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for c in &self.checks {
            w.write_record([
                c.check.clone(),
                format!("{:e}", c.value),
                c.tol.to_string(),
                c.pass.to_string(),
                opt(c.order),
                opt(c.coverage),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<dir>/<stem>.json` or `.csv` and returns the path.
    pub fn export(&self, dir: &Path, stem: &str, format: Format) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!(
            "{stem}.{}",
            match format {
                Format::Json => "json",
                Format::Csv => "csv",
            }
        ));
        match format {
            Format::Json => std::fs::write(&path, self.to_json())?,
            Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                std::fs::write(&path, buf)?;
            }
        }
        Ok(path)
    }

    /// Human-readable summary, one line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let extra = match (c.coverage, c.order.is_some()) {
                (Some(cov), _) => format!("  coverage {cov:.3}"),
                _ => String::new(),
            };
            s.push_str(&format!(
                "{} {:<44} {:>12.4e}  tol {}{}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.check,
                c.value,
                c.tol,
                extra
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s
    }
}
