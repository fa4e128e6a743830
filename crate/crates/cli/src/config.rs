//! Experiment configuration: a TOML file with optional sections, every key
//! defaulted, unknown keys rejected.

use std::path::{Path, PathBuf};

use dimerlab_core::disagree::SealScales;
use dimerlab_core::sampler::{ChainSpec, Init, MoveSet};
use dimerlab_core::{BoundaryCondition, ModelParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const REFERENCE: &str = "\
CONFIGURATION KEYS (TOML; every section and key is optional)

[model]
  beta = 1.0              inverse temperature (> 0)
  lambda = 0.0            vacancy chemical potential
  a = 1.0                 link attraction (> 0)
  beta_ladder = []        annealing ladder before burn-in, [[beta, sweeps], ...]
  beta_scan = []          extra inverse temperatures tabulated by `transfer`

[geometry]
  width = 8
  height = 8
  bc = \"periodic\"         periodic | vacant | packed-vertical | packed-horizontal | pattern token

[sampler]
  seed = 1                master seed; chain i uses stream i of this seed
  chains = 1              independent chains (run in parallel, see --threads)
  sweeps = 1000           measurement sweeps (one proposal per edge each)
  burn_in = 100
  measure_every = 1
  init = \"empty\"          empty | packed-vertical | packed-horizontal | path to a configuration file
  moves = []              extra moves: \"rotate\", \"slide\"

[analysis]
  n = 3                   margin parameter of proper division (> 2)
  b_values = [1, 2]       grid scales K = L = b
  lengths = [2, 4, 6, 8]  segment lengths tabulated by `transfer`
  max_dx = 3              displacement range of disagreement connections
  max_dy = 6

[sealing]
  a_scale = 1
  c_scale = 3             used unless `c` is given
  c = 0.0                 when > 0, c_scale = max(1, round(c * ell0 / n))
  n = 3
  anchor_stride = 1       anchors scanned on a grid of this step

[disagree]
  pairs = 100             pairs sampled inline when no --pair files are given
  spacing = 10            sweeps between successive pairs of one chain pair

[output]
  dir = \"dimerlab-out\"    overridden by --out; default also from DIMERLAB_OUT
";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub geometry: Geometry,
    pub sampler: Sampler,
    pub analysis: Analysis,
    pub sealing: Sealing,
    pub disagree: Disagree,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model {
    pub beta: f64,
    pub lambda: f64,
    pub a: f64,
    pub beta_ladder: Vec<(f64, u64)>,
    pub beta_scan: Vec<f64>,
}

impl Default for Model {
    fn default() -> Self {
        Model { beta: 1.0, lambda: 0.0, a: 1.0, beta_ladder: Vec::new(), beta_scan: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub width: usize,
    pub height: usize,
    pub bc: String,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { width: 8, height: 8, bc: "periodic".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampler {
    pub seed: u64,
    pub chains: u64,
    pub sweeps: u64,
    pub burn_in: u64,
    pub measure_every: u64,
    pub init: String,
    pub moves: Vec<String>,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { seed: 1, chains: 1, sweeps: 1000, burn_in: 100, measure_every: 1, init: "empty".into(), moves: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    pub n: i64,
    pub b_values: Vec<i64>,
    pub lengths: Vec<usize>,
    pub max_dx: i64,
    pub max_dy: i64,
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis { n: 3, b_values: vec![1, 2], lengths: vec![2, 4, 6, 8], max_dx: 3, max_dy: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sealing {
    pub a_scale: i64,
    pub c_scale: i64,
    pub c: f64,
    pub n: i64,
    pub anchor_stride: usize,
}

impl Default for Sealing {
    fn default() -> Self {
        Sealing { a_scale: 1, c_scale: 3, c: 0.0, n: 3, anchor_stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Disagree {
    pub pairs: u64,
    pub spacing: u64,
}

impl Default for Disagree {
    fn default() -> Self {
        Disagree { pairs: 100, spacing: 10 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.model.beta, self.model.lambda, self.model.a).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn bc(&self) -> Result<BoundaryCondition, CliError> {
        self.geometry.bc.parse().map_err(|e| CliError::Config(format!("geometry.bc: {e}")))
    }

    pub fn init(&self) -> Init {
        match self.sampler.init.as_str() {
            "empty" => Init::Empty,
            "packed-vertical" => Init::PackedVertical,
            "packed-horizontal" => Init::PackedHorizontal,
            path => Init::FromFile(PathBuf::from(path)),
        }
    }

    pub fn moves(&self) -> Result<MoveSet, CliError> {
        let mut m = MoveSet::default();
        for name in &self.sampler.moves {
            match name.as_str() {
                "rotate" => m.rotate = true,
                "slide" => m.slide = true,
                other => return Err(CliError::Config(format!("sampler.moves: unknown move {other:?}"))),
            }
        }
        Ok(m)
    }

    /// The chain with stream index `chain`.
    pub fn chain_spec(&self, chain: u64) -> Result<ChainSpec, CliError> {
        if self.sampler.sweeps == 0 {
            return Err(CliError::Config("sampler.sweeps must be positive".into()));
        }
        for &(beta, _) in &self.model.beta_ladder {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(CliError::Config(format!("model.beta_ladder: beta must be positive, got {beta}")));
            }
        }
        let mut spec = ChainSpec::new(self.geometry.width, self.geometry.height, self.params()?, self.sampler.seed);
        spec.chain = chain;
        spec.sweeps = self.sampler.sweeps;
        spec.burn_in = self.sampler.burn_in;
        spec.measure_every = self.sampler.measure_every;
        spec.init = self.init();
        spec.anneal = self.model.beta_ladder.clone();
        spec.moves = self.moves()?;
        Ok(spec)
    }

    pub fn seal_scales(&self) -> Result<SealScales, CliError> {
        let s = &self.sealing;
        let c_scale = if s.c > 0.0 { SealScales::c_scale_for(s.c, self.params()?.ell0(), s.n) } else { s.c_scale };
        SealScales::new(s.a_scale, c_scale, s.n).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("[model]\nbetta = 2.0\n").unwrap_err();
        assert!(err.contains("betta"), "{err}");
        let err = ExperimentConfig::parse("[modle]\n").unwrap_err();
        assert!(err.contains("modle"), "{err}");
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = ExperimentConfig::default();
        c.model.beta_ladder = vec![(4.0, 10), (5.0, 10)];
        c.sampler.moves = vec!["rotate".into()];
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn c_knob_sets_column_scale() {
        let mut c = ExperimentConfig::default();
        c.model.beta = 2.0;
        c.sealing.c = 0.3;
        // ell0 = e^3 ≈ 20.1, so 0.3 * 20.1 / 3 ≈ 2
        assert_eq!(c.seal_scales().unwrap().c_scale, 2);
    }

    #[test]
    fn shipped_configs_parse() {
        for name in ["nematic.toml", "hot.toml"] {
            let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
            let c = ExperimentConfig::load(&path).unwrap();
            c.chain_spec(0).unwrap();
            c.seal_scales().unwrap();
        }
    }
}
