use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::json;
use std::io::Write;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub grid: String,
    pub seeds: Seeds,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Seeds {
    pub set: Option<u64>,
    pub monte_carlo: u64,
}

impl Header {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        let g = config.grid;
        Header {
            tool: "aniso",
            version: VERSION,
            command: command.to_string(),
            grid: format!("dim={} side={} cells={}", g.dim, g.side, g.cells),
            seeds: Seeds { set: config.set.seed(), monte_carlo: config.monte_carlo.seed },
            config: config.clone(),
        }
    }

    /// `# key: value` lines for CSV reports.
    pub fn write_comments(&self, out: &mut impl Write, extra: &[(String, String)]) -> Result<()> {
        let config = serde_json::to_string(&self.config).map_err(|e| Error::Serde(e.to_string()))?;
        writeln!(out, "# {} {}", self.tool, self.version)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# grid: {}", self.grid)?;
        let set = self.seeds.set.map_or("none".to_string(), |s| s.to_string());
        writeln!(out, "# seeds: set={} monte_carlo={}", set, self.seeds.monte_carlo)?;
        writeln!(out, "# config: {config}")?;
        for (k, v) in extra {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }

    pub fn write_json_line(&self, out: &mut impl Write) -> Result<()> {
        let line = json!({ "kind": "header", "header": self });
        writeln!(out, "{line}")?;
        Ok(())
    }
}

/// Writes a header plus CSV rows.
pub fn write_csv<R: Serialize>(
    out: &mut impl Write,
    header: &Header,
    extra: &[(String, String)],
    rows: &[R],
) -> Result<()> {
    header.write_comments(out, extra)?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serde(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
