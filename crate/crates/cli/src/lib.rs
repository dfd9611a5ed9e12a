//! Library side of the `taperlith` binary: configuration, output formats and
//! the `litho`, `bpm` and `sweep` commands.

pub mod commands;
pub mod config;
pub mod csv;
pub mod dump;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::RunConfig;
pub use dump::FieldDump;

/// Environment variable that overrides the output directory of the config
/// (the `--out` flag still wins).
pub const OUT_DIR_ENV: &str = "TAPERLITH_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<taperlith_core::Error> for CliError {
    fn from(e: taperlith_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Files written by one run, removed again if the run fails.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    created: bool,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        let created = !root.exists();
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            created,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        self.written.push(path.clone());
        std::fs::write(&path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    /// Deletes everything this run wrote.
    pub fn discard(self) {
        for p in &self.written {
            let _ = std::fs::remove_file(p);
        }
        if self.created {
            let _ = std::fs::remove_dir(&self.root);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Litho,
    Bpm,
    Sweep,
}

/// Output directory: `--out`, else the environment override, else the
/// config.
pub fn resolve_out_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(&config.output.dir),
    }
}

/// Runs `command` into `out`, leaving no files behind on failure.
pub fn execute(command: Command, config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut dir = OutputDir::create(out)?;
    let result = match command {
        Command::Litho => commands::litho(config, &mut dir),
        Command::Bpm => commands::bpm(config, &mut dir),
        Command::Sweep => commands::sweep(config, &mut dir),
    };
    match result {
        Ok(()) => Ok(dir.files().to_vec()),
        Err(e) => {
            dir.discard();
            Err(e)
        }
    }
}
