use std::path::{Path, PathBuf};

use oped::phantom::GridMetrics;
use oped::radon::ScanGeometry;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path.display(), e))?;
        Ok(Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometrySummary {
    pub d: usize,
    pub scan: String,
    pub order: usize,
    pub views: usize,
    pub nodes: usize,
    pub node_degree: usize,
    pub direction_degree: usize,
}

impl GeometrySummary {
    pub fn of(g: &ScanGeometry) -> Self {
        Self {
            d: g.dimension,
            scan: g.scan.to_string(),
            order: g.m_or_n,
            views: g.view_count(),
            nodes: g.node_count(),
            node_degree: g.node_degree,
            direction_degree: g.directions.degree,
        }
    }
}

/// Written next to every output as `<output>.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub threads: usize,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySummary>,
    pub timing_seconds: f64,
    /// Masked error norms against a reference, when one was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<GridMetrics>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn new(inputs: &[&Path]) -> CliResult<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            threads: rayon::current_num_threads(),
            inputs: inputs.iter().map(|p| FileHash::of(p)).collect::<CliResult<_>>()?,
            outputs: Vec::new(),
            geometry: None,
            timing_seconds: 0.0,
            metrics: None,
            details: serde_json::Value::Null,
        })
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        s.into()
    }

    /// Hashes `outputs` and writes the manifest next to the first one.
    pub fn write(mut self, outputs: &[&Path], seconds: f64) -> CliResult<()> {
        self.outputs = outputs.iter().map(|p| FileHash::of(p)).collect::<CliResult<_>>()?;
        self.timing_seconds = seconds;
        let path = Self::path_for(outputs[0]);
        let text = serde_json::to_string_pretty(&self).map_err(|e| CliError::Validation(e.to_string()))?;
        std::fs::write(&path, text).map_err(|e| CliError::io(path.display(), e))
    }
}
