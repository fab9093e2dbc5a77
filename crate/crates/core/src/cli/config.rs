use std::path::Path;

use crate::error::{Error, Result};
use crate::simloop::ScenarioConfig;

/// Parses and validates a scenario document.
///
/// Top-level sections are `plant`, `sensor`, `disturbance`, `setpoints`,
/// `controller` and `sim`; all are optional and unknown keys are rejected.
/// The returned config has every default made explicit.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    cfg.normalise();
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Pretty-printed JSON with every effective value.
pub fn dump_config(cfg: &ScenarioConfig) -> String {
    let mut cfg = cfg.clone();
    cfg.normalise();
    serde_json::to_string_pretty(&cfg).expect("scenario config is always serialisable")
}
