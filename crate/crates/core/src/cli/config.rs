//! TOML economy files.
//!
//! Keys mirror [`EconomyConfig`] field names; unknown keys are rejected.
//!
//! ```toml
//! g = 0.05
//! mode = "steady_state"            # or { finite_horizon = 20 }
//!
//! [agents.cognitive]
//! pi = 0.5
//! z = 2.0
//!
//! [agents.manual]
//! pi = 0.5
//! z = 1.0
//!
//! [prefs]
//! beta = 0.96
//! u_form = "log"                   # or { crra = 2.0 }
//! nu_form = { psi = 1.0, phi = 1.0 }
//!
//! [tech]
//! form = "nest_complements"
//! scale = 1.0
//! mu_top = 0.5
//! lambda_c = 0.3
//! theta_m = 0.3
//! sigma_top = 0.5
//! rho_c = -1.0
//! rho_m = -1.0
//! a_ai = 0.1
//! delta_k = 0.1
//! delta_ai = 0.1
//! ```

use std::path::Path;

use crate::economy::{validate_config, EconomyConfig};
use crate::error::{Error, Result};

/// Parsed and validated config plus the raw bytes it came from.
pub struct LoadedConfig {
    pub config: EconomyConfig,
    pub bytes: Vec<u8>,
}

pub fn parse_config(text: &str) -> Result<EconomyConfig> {
    let config: EconomyConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate_config(&config).into_result()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    Ok(LoadedConfig {
        config: parse_config(text)?,
        bytes,
    })
}

pub fn to_toml(config: &EconomyConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| Error::Parse(e.to_string()))
}
