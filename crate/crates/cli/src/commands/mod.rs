//! One module per CLI verb. Each `run` returns a typed report whose
//! `Display` is what the binary prints.

pub mod coexistence;
pub mod equilibria;
pub mod evolve;
pub mod mms;
pub mod mollifier;
pub mod steady;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::config::Config;

/// Destination for artifact files; `None` skips writing.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub csv: bool,
    pub svg: bool,
}

impl Output {
    pub fn from_config(config: &Config, dir_override: Option<&Path>) -> Self {
        let dir = dir_override
            .map(Path::to_path_buf)
            .or_else(|| config.get("output.directory").map(PathBuf::from));
        Self {
            dir,
            csv: config.wants("csv"),
            svg: config.wants("svg"),
        }
    }

    pub fn discard() -> Self {
        Self::default()
    }

    fn write(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    pub fn csv(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        if self.csv {
            self.write(name, contents)?;
        }
        Ok(())
    }

    pub fn svg(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        if self.svg {
            self.write(name, contents)?;
        }
        Ok(())
    }
}

pub const VERBS: &[&str] = &["equilibria", "coexistence", "evolve", "steady", "mms", "mollifier-check"];

/// Runs `verb` and returns the text to print.
pub fn dispatch(verb: &str, config: &Config, out: &Output) -> anyhow::Result<String> {
    Ok(match verb {
        "equilibria" => equilibria::run(config, out)?.to_string(),
        "coexistence" => coexistence::run(config, out)?.to_string(),
        "evolve" => evolve::run(config, out)?.to_string(),
        "steady" => steady::run(config, out)?.to_string(),
        "mms" => mms::run(config, out)?.to_string(),
        "mollifier-check" => mollifier::run(config, out)?.to_string(),
        other => anyhow::bail!("unknown verb `{other}`"),
    })
}
