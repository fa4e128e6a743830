use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const OUT_ENV: &str = "DIMERLAB_OUT";

/// Output directory: the flag, then the config, then the environment,
/// then `dimerlab-out`.
pub fn resolve_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("dimerlab-out"))
}

/// Write through a temporary file in the same directory and rename it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Minimal CSV builder; fields are numbers, booleans or identifiers, so no
/// quoting is needed.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, self.text.as_bytes())
    }
}

/// Shorthand for building CSV rows from mixed displayable values.
#[macro_export]
macro_rules! fields {
    ($($x:expr),* $(,)?) => { [$($x.to_string()),*] };
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seeds: Vec<(u64, u64)>,
    outputs: &'a [String],
    config: &'a ExperimentConfig,
}

/// The resolved configuration and enough metadata to reproduce a run.
pub fn write_manifest(dir: &Path, command: &str, cfg: &ExperimentConfig, streams: &[u64], outputs: &[String]) -> Result<(), CliError> {
    let m = Manifest {
        command,
        version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        seeds: streams.iter().map(|&s| (cfg.sampler.seed, s)).collect(),
        outputs,
        config: cfg,
    };
    write_json(&dir.join("manifest.json"), &m)?;
    write_atomic(&dir.join("config.toml"), cfg.to_toml().as_bytes())
}
