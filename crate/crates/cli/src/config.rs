//! Experiment config files (TOML).
//!
//! ```toml
//! [[experiment]]
//! name = "small-block"
//! repetitions = 3
//!
//! [experiment.matrix]
//! kind = "gaussian-symmetric"
//! n = 128
//! seed = 11
//!
//! [experiment.solver]
//! solver = "block"
//! b = 16
//! pivot = "lupp"
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use crate::experiment::ExperimentSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: Vec<ExperimentSpec>,
}

pub fn parse_config(src: &str) -> Result<Vec<ExperimentSpec>> {
    let file: ConfigFile = toml::from_str(src)?;
    if file.experiment.is_empty() {
        bail!("config defines no experiments");
    }
    let mut seen = HashSet::new();
    for spec in &file.experiment {
        if !seen.insert(spec.name.as_str()) {
            bail!("duplicate experiment name {:?}", spec.name);
        }
        spec.solver.to_spec().with_context(|| format!("experiment {:?}", spec.name))?;
    }
    Ok(file.experiment)
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentSpec>> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&src).with_context(|| format!("parsing {}", path.display()))
}
