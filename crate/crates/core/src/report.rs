//! Run reports: a line-oriented `key=value` text body whose bytes depend
//! only on the metrics, plus a JSON companion carrying the same values, the
//! resolved run configuration, the toolkit version, and a timestamp.
//!
//! The text body is the reproducibility surface — identical deterministic
//! runs must reproduce it byte for byte — so it carries no timestamp and its
//! keys are emitted in lexicographic order regardless of insertion order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::error::{Error, Result};

/// An ordered metric map headed for disk.
#[derive(Debug, Clone, Default)]
pub struct Report {
    metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// Record one metric; later writes to the same key win.
    pub fn set(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.metrics.is_empty()
    }

    /// The deterministic text body: one `key=value` line per metric, keys
    /// sorted, values at six decimals, trailing newline.
    pub fn text_body(&self) -> Result<String> {
        let mut out = String::new();
        for (key, value) in &self.metrics {
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "metric {key} is not finite ({value}); refusing to report it"
                )));
            }
            out.push_str(&format!("{key}={value:.6}\n"));
        }
        Ok(out)
    }

    /// Write `<dir>/<name>.txt` (text body) and `<dir>/<name>.json` (same
    /// metrics plus the resolved config, version, and a timestamp); returns
    /// both paths.
    pub fn write(
        &self,
        dir: &Path,
        name: &str,
        config: serde_json::Value,
    ) -> Result<(PathBuf, PathBuf)> {
        let body = self.text_body()?;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let text_path = dir.join(format!("{name}.txt"));
        fs::write(&text_path, &body).map_err(|e| Error::io(&text_path, e))?;

        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let doc = json!({
            "config": config,
            "metrics": self.metrics,
            "timestamp_unix": timestamp,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let json_path = dir.join(format!("{name}.json"));
        fs::write(&json_path, format!("{doc:#}\n")).map_err(|e| Error::io(&json_path, e))?;
        Ok((text_path, json_path))
    }
}
