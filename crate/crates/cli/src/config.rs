//! Flat JSON config file support. Every JSON result the tool prints embeds
//! the resolved command and inputs at the top level, so an output file can be
//! fed straight back through `--config` to reproduce the run (the `result`
//! field is simply ignored on input).

use committee_core::ProcessConfig;
use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
pub struct FileConfig {
    pub command: Option<String>,
    pub p0: Option<f64>,
    pub c: Option<f64>,
    pub r: Option<f64>,
    pub lambda_a: Option<f64>,
    pub lambda_b: Option<f64>,
    pub alpha: Option<f64>,
    pub variant: Option<String>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub deadline: Option<f64>,
    pub grid: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_size: Option<usize>,
    pub process: Option<ProcessConfig>,
    pub out: Option<String>,
}

/// Flag value if present, else the config-file value, else the default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: Option<T>) -> Option<T> {
    flag.or(file).or(default)
}

/// As `pick`, but the field is mandatory.
pub fn require<T: Clone>(
    flag: Option<T>,
    file: Option<T>,
    default: Option<T>,
    name: &str,
) -> Result<T, String> {
    pick(flag, file, default).ok_or_else(|| format!("missing required parameter --{name}"))
}
