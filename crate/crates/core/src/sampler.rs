//! Seeded Metropolis dynamics on tori.
//!
//! The default move picks a uniformly random edge and proposes to delete it
//! if occupied or insert it if both endpoints are free; blocked insertions
//! count as rejected. Optional rotation (pivot a dimer about one endpoint)
//! and slide (shift a dimer sideways by one) moves are symmetric proposals
//! with their own Metropolis ratios.
//!
//! Random numbers come from ChaCha8 seeded with the 64-bit master seed; chain
//! `i` uses stream `i` of that key, so results do not depend on scheduling.

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{EdgeId, Rect, VertexId};
use crate::model::{BoundaryCondition, DimerConfig, ModelError, ModelParams};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("the sampler needs a periodic configuration anchored at (-1/2, -1/2)")]
    NotATorus,
    #[error("packed initial states need even torus sides, got {0}x{1}")]
    OddTorus(i64, i64),
    #[error("sweeps must be positive")]
    NoSweeps,
    #[error("initial configuration has {0}x{1} sides but the chain expects {2}x{3}")]
    SizeMismatch(i64, i64, i64, i64),
    #[error("reading initial configuration {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Hard-core occupancy of a `w×h` torus with running defect counts. Edge
/// `2·(y·w + x)` is horizontal from `(x, y)`, edge `2·(y·w + x) + 1` vertical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusState {
    w: usize,
    h: usize,
    occ: Vec<bool>,
    cover: Vec<bool>,
    n_h: i64,
    n_v: i64,
    n_vac: i64,
    n_bl: i64,
}

impl TorusState {
    pub fn empty(w: usize, h: usize) -> Result<Self, SamplerError> {
        if w < 2 || h < 2 {
            return Err(SamplerError::Model(ModelError::TorusTooSmall(w as i64, h as i64)));
        }
        Ok(TorusState { w, h, occ: vec![false; 2 * w * h], cover: vec![false; w * h], n_h: 0, n_v: 0, n_vac: (w * h) as i64, n_bl: 0 })
    }

    pub fn from_config(cfg: &DimerConfig) -> Result<Self, SamplerError> {
        let r = cfg.window();
        if !cfg.is_periodic() || r.x0d() != -1 || r.y0d() != -1 {
            return Err(SamplerError::NotATorus);
        }
        let mut s = TorusState::empty(r.width() as usize, r.height() as usize)?;
        for e in cfg.dimers() {
            let i = s.index_of(e);
            if !s.can_toggle(i) {
                return Err(SamplerError::Model(ModelError::HardCore(e.base())));
            }
            let d = s.toggle_delta(i);
            s.apply(i, d);
        }
        Ok(s)
    }

    pub fn to_config(&self) -> DimerConfig {
        let r = Rect::origin(self.w as i64, self.h as i64).expect("positive torus");
        let mut c = DimerConfig::empty(r, BoundaryCondition::Periodic).expect("torus at least 2x2");
        for i in (0..self.occ.len()).filter(|&i| self.occ[i]) {
            c.set(self.edge_id(i), true).expect("torus edges are free");
        }
        c
    }

    pub fn width(&self) -> usize {
        self.w
    }
    pub fn height(&self) -> usize {
        self.h
    }
    pub fn edge_count(&self) -> usize {
        self.occ.len()
    }
    pub fn occupied(&self, i: usize) -> bool {
        self.occ[i]
    }
    pub fn horizontal_dimers(&self) -> i64 {
        self.n_h
    }
    pub fn vertical_dimers(&self) -> i64 {
        self.n_v
    }
    pub fn vacancies(&self) -> i64 {
        self.n_vac
    }
    pub fn broken_links(&self) -> i64 {
        self.n_bl
    }

    pub fn energy(&self, params: &ModelParams) -> f64 {
        params.energy_of(self.n_vac, self.n_bl)
    }

    pub fn edge_id(&self, i: usize) -> EdgeId {
        let v = i / 2;
        let (x, y) = ((v % self.w) as i64, (v / self.w) as i64);
        if i.is_multiple_of(2) {
            EdgeId::horizontal(x, y)
        } else {
            EdgeId::vertical(x, y)
        }
    }

    pub fn index_of(&self, e: EdgeId) -> usize {
        let b = e.base();
        let v = self.vertex(b.x, b.y);
        2 * v + if e.is_horizontal() { 0 } else { 1 }
    }

    fn vertex(&self, x: i64, y: i64) -> usize {
        let x = x.rem_euclid(self.w as i64) as usize;
        let y = y.rem_euclid(self.h as i64) as usize;
        y * self.w + x
    }

    fn coords(&self, v: usize) -> (i64, i64) {
        ((v % self.w) as i64, (v / self.w) as i64)
    }

    fn endpoints(&self, i: usize) -> [usize; 2] {
        let (x, y) = self.coords(i / 2);
        if i.is_multiple_of(2) {
            [i / 2, self.vertex(x + 1, y)]
        } else {
            [i / 2, self.vertex(x, y + 1)]
        }
    }

    fn colinear(&self, i: usize, k: i64) -> usize {
        let (x, y) = self.coords(i / 2);
        if i.is_multiple_of(2) {
            2 * self.vertex(x + k, y)
        } else {
            2 * self.vertex(x, y + k) + 1
        }
    }

    /// Whether toggling edge `i` keeps the state hard-core.
    pub fn can_toggle(&self, i: usize) -> bool {
        self.occ[i] || self.endpoints(i).iter().all(|&v| !self.cover[v])
    }

    /// Change in (vacancies, broken links) from toggling edge `i`.
    pub fn toggle_delta(&self, i: usize) -> (i64, i64) {
        let sign = if self.occ[i] { 1 } else { -1 };
        let dvac = 2 * sign;
        let c1 = self.colinear(i, -1);
        let c2 = self.colinear(i, 1);
        let both = [c1, c2];
        let centres = if c1 == c2 { &both[..1] } else { &both[..] };
        let mut dbl = 0;
        for &c in centres {
            let (n1, n2) = (self.colinear(c, -1), self.colinear(c, 1));
            let flip = |n: usize| self.occ[n] ^ (n == i);
            dbl += (flip(n1) != flip(n2)) as i64 - (self.occ[n1] != self.occ[n2]) as i64;
        }
        (dvac, dbl)
    }

    fn apply(&mut self, i: usize, (dvac, dbl): (i64, i64)) {
        let on = !self.occ[i];
        self.occ[i] = on;
        for v in self.endpoints(i) {
            self.cover[v] = on;
        }
        let d = if on { 1 } else { -1 };
        if i.is_multiple_of(2) {
            self.n_h += d;
        } else {
            self.n_v += d;
        }
        self.n_vac += dvac;
        self.n_bl += dbl;
    }

    /// Toggle edge `i` and return the energy change.
    pub fn toggle(&mut self, i: usize, params: &ModelParams) -> f64 {
        let d = self.toggle_delta(i);
        self.apply(i, d);
        params.energy_of(d.0, d.1)
    }

    /// Recount defects from scratch and compare with the running counts.
    pub fn audit(&self) -> bool {
        let cfg = self.to_config();
        cfg.validate().is_ok()
            && cfg.defect_counts(cfg.window()).ok() == Some((self.n_vac, self.n_bl))
            && self.cover.iter().enumerate().all(|(v, &c)| {
                let (x, y) = self.coords(v);
                c == cfg.is_covered(VertexId::new(x, y))
            })
    }

    /// Probability that the horizontal edge from `(x, y)` is occupied given
    /// every edge outside the plaquette with corners `(x, y)` and
    /// `(x+1, y+1)`. Averaging it over samples estimates the occupancy
    /// without waiting for the rare event itself. Needs both sides ≥ 3.
    pub fn plaquette_conditional(&mut self, x: i64, y: i64, params: &ModelParams) -> f64 {
        let bottom = 2 * self.vertex(x, y);
        let top = 2 * self.vertex(x, y + 1);
        let left = 2 * self.vertex(x, y) + 1;
        let right = 2 * self.vertex(x + 1, y) + 1;
        let inner = [bottom, top, left, right];
        let saved: Vec<bool> = inner.iter().map(|&i| self.occ[i]).collect();
        for &i in &inner {
            if self.occ[i] {
                self.toggle(i, params);
            }
        }
        // the seven matchings of a 4-cycle
        let patterns: [&[usize]; 7] = [&[], &[bottom], &[top], &[left], &[right], &[bottom, top], &[left, right]];
        let mut logs = [f64::NEG_INFINITY; 7];
        for (k, pat) in patterns.iter().enumerate() {
            if !pat.iter().all(|&i| self.can_toggle(i)) {
                continue;
            }
            let e: f64 = pat.iter().map(|&i| self.toggle(i, params)).sum();
            logs[k] = -params.beta * e;
            for &i in pat.iter().rev() {
                self.toggle(i, params);
            }
        }
        for (&i, &was) in inner.iter().zip(&saved) {
            if was {
                self.toggle(i, params);
            }
        }
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
        let total: f64 = w.iter().sum();
        (w[1] + w[5]) / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveSet {
    pub rotate: bool,
    pub slide: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Init {
    Empty,
    PackedVertical,
    PackedHorizontal,
    FromFile(PathBuf),
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub width: usize,
    pub height: usize,
    pub params: ModelParams,
    pub seed: u64,
    /// Stream index within the seed's key.
    pub chain: u64,
    pub sweeps: u64,
    pub burn_in: u64,
    pub measure_every: u64,
    pub init: Init,
    /// Sweeps run at each listed inverse temperature before burn-in.
    pub anneal: Vec<(f64, u64)>,
    pub moves: MoveSet,
}

impl ChainSpec {
    pub fn new(width: usize, height: usize, params: ModelParams, seed: u64) -> Self {
        ChainSpec {
            width,
            height,
            params,
            seed,
            chain: 0,
            sweeps: 1000,
            burn_in: 100,
            measure_every: 1,
            init: Init::Empty,
            anneal: Vec::new(),
            moves: MoveSet::default(),
        }
    }

    fn initial_state(&self) -> Result<TorusState, SamplerError> {
        let (w, h) = (self.width as i64, self.height as i64);
        let torus = Rect::origin(w, h).map_err(ModelError::from)?;
        let packed = |cfg: Result<DimerConfig, ModelError>| -> Result<TorusState, SamplerError> {
            if w % 2 != 0 || h % 2 != 0 {
                return Err(SamplerError::OddTorus(w, h));
            }
            TorusState::from_config(&cfg?)
        };
        let from_text = |text: &str| -> Result<TorusState, SamplerError> {
            let cfg = DimerConfig::from_text(text)?;
            let r = cfg.window();
            if r.width() != w || r.height() != h {
                return Err(SamplerError::SizeMismatch(r.width(), r.height(), w, h));
            }
            TorusState::from_config(&cfg)
        };
        match &self.init {
            Init::Empty => TorusState::empty(self.width, self.height),
            Init::PackedVertical => packed(DimerConfig::packed_vertical(torus, BoundaryCondition::Periodic)),
            Init::PackedHorizontal => packed(DimerConfig::packed_horizontal(torus, BoundaryCondition::Periodic)),
            Init::FromFile(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| SamplerError::Io { path: path.clone(), source })?;
                from_text(&text)
            }
            Init::Config(text) => from_text(text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveStats {
    pub proposed: u64,
    pub accepted: u64,
    /// Proposals rejected by the hard-core rule before any energy test.
    pub blocked: u64,
}

impl MoveStats {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Acceptance {
    pub insert: MoveStats,
    pub delete: MoveStats,
    pub rotate: MoveStats,
    pub slide: MoveStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub sweep: u64,
    pub horizontal: i64,
    pub vertical: i64,
    pub vacancies: i64,
    pub broken_links: i64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub measurements: Vec<Measurement>,
    pub acceptance: Acceptance,
    pub final_config: DimerConfig,
}

#[derive(Debug, Clone, Copy)]
enum MoveKind {
    Flip,
    Rotate,
    Slide,
}

/// Metropolis acceptance probability for an energy change at inverse
/// temperature `beta`.
pub fn acceptance_probability(beta: f64, delta: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-beta * delta).exp()
    }
}

/// Probability that one flip step moves the state across edge `i`.
pub fn flip_transition_probability(state: &TorusState, i: usize, params: &ModelParams) -> f64 {
    if !state.can_toggle(i) {
        return 0.0;
    }
    let (dv, db) = state.toggle_delta(i);
    acceptance_probability(params.beta, params.energy_of(dv, db)) / state.edge_count() as f64
}

/// One Markov chain: state, parameters and its private random stream.
#[derive(Debug, Clone)]
pub struct Chain {
    state: TorusState,
    params: ModelParams,
    beta: f64,
    rng: ChaCha8Rng,
    moves: Vec<MoveKind>,
    acceptance: Acceptance,
}

impl Chain {
    pub fn new(spec: &ChainSpec) -> Result<Self, SamplerError> {
        let state = spec.initial_state()?;
        Ok(Chain::from_state(state, spec.params, spec.seed, spec.chain, spec.moves))
    }

    pub fn from_state(state: TorusState, params: ModelParams, seed: u64, stream: u64, moves: MoveSet) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut kinds = vec![MoveKind::Flip];
        if moves.rotate {
            kinds.push(MoveKind::Rotate);
        }
        if moves.slide {
            kinds.push(MoveKind::Slide);
        }
        Chain { state, beta: params.beta, params, rng, moves: kinds, acceptance: Acceptance::default() }
    }

    pub fn state(&self) -> &TorusState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut TorusState {
        &mut self.state
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn config(&self) -> DimerConfig {
        self.state.to_config()
    }

    /// Change the inverse temperature used for acceptance tests.
    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
        self.params.beta = beta;
    }

    fn accept(&mut self, delta: f64) -> bool {
        delta <= 0.0 || self.rng.gen::<f64>() < (-self.beta * delta).exp()
    }

    pub fn step(&mut self) {
        let kind = if self.moves.len() == 1 { self.moves[0] } else { self.moves[self.rng.gen_range(0..self.moves.len())] };
        let i = self.rng.gen_range(0..self.state.edge_count());
        match kind {
            MoveKind::Flip => self.flip(i),
            MoveKind::Rotate => {
                let pivot_end = self.rng.gen_range(0..2usize);
                let side = self.rng.gen_range(0..2usize);
                self.rotate(i, pivot_end, side)
            }
            MoveKind::Slide => {
                let side = if self.rng.gen::<bool>() { 1 } else { -1 };
                self.slide(i, side)
            }
        }
        debug_assert!(self.state.cover.iter().filter(|&&c| c).count() as i64 == 2 * (self.state.n_h + self.state.n_v));
    }

    fn flip(&mut self, i: usize) {
        let deleting = self.state.occ[i];
        let stats = if deleting { &mut self.acceptance.delete } else { &mut self.acceptance.insert };
        stats.proposed += 1;
        if !self.state.can_toggle(i) {
            stats.blocked += 1;
            return;
        }
        let d = self.state.toggle_delta(i);
        let delta = self.params.energy_of(d.0, d.1);
        if self.accept(delta) {
            self.state.apply(i, d);
            let stats = if deleting { &mut self.acceptance.delete } else { &mut self.acceptance.insert };
            stats.accepted += 1;
        }
    }

    /// Move the dimer on `from` to `to` (sharing no vertex with other dimers
    /// after removal) under one Metropolis test.
    fn relocate(&mut self, from: usize, to: usize) -> Option<bool> {
        if !self.state.occ[from] || self.state.occ[to] {
            return None;
        }
        let mut delta = self.state.toggle(from, &self.params);
        if !self.state.can_toggle(to) {
            self.state.toggle(from, &self.params);
            return None;
        }
        delta += self.state.toggle(to, &self.params);
        if self.accept(delta) {
            Some(true)
        } else {
            self.state.toggle(to, &self.params);
            self.state.toggle(from, &self.params);
            Some(false)
        }
    }

    fn rotate(&mut self, i: usize, pivot_end: usize, side: usize) {
        self.acceptance.rotate.proposed += 1;
        let pivot = self.state.endpoints(i)[pivot_end];
        let (x, y) = self.state.coords(pivot);
        // the two edges at the pivot perpendicular to edge i
        let to = if i.is_multiple_of(2) {
            [2 * self.state.vertex(x, y) + 1, 2 * self.state.vertex(x, y - 1) + 1][side]
        } else {
            [2 * self.state.vertex(x, y), 2 * self.state.vertex(x - 1, y)][side]
        };
        match self.relocate(i, to) {
            None => self.acceptance.rotate.blocked += 1,
            Some(true) => self.acceptance.rotate.accepted += 1,
            Some(false) => {}
        }
    }

    fn slide(&mut self, i: usize, side: i64) {
        self.acceptance.slide.proposed += 1;
        let (x, y) = self.state.coords(i / 2);
        let to = if i.is_multiple_of(2) { 2 * self.state.vertex(x, y + side) } else { 2 * self.state.vertex(x + side, y) + 1 };
        match self.relocate(i, to) {
            None => self.acceptance.slide.blocked += 1,
            Some(true) => self.acceptance.slide.accepted += 1,
            Some(false) => {}
        }
    }

    /// One proposal per edge.
    pub fn sweep(&mut self) {
        for _ in 0..self.state.edge_count() {
            self.step();
        }
    }

    pub fn measure(&self, sweep: u64) -> Measurement {
        Measurement {
            sweep,
            horizontal: self.state.n_h,
            vertical: self.state.n_v,
            vacancies: self.state.n_vac,
            broken_links: self.state.n_bl,
            energy: self.state.energy(&self.params),
        }
    }
}

/// Run a chain, calling `observe` after every measurement sweep.
pub fn run_with(spec: &ChainSpec, mut observe: impl FnMut(u64, &mut Chain)) -> Result<RunRecord, SamplerError> {
    if spec.sweeps == 0 {
        return Err(SamplerError::NoSweeps);
    }
    let mut chain = Chain::new(spec)?;
    for &(beta, sweeps) in &spec.anneal {
        chain.set_beta(beta);
        for _ in 0..sweeps {
            chain.sweep();
        }
    }
    chain.set_beta(spec.params.beta);
    for _ in 0..spec.burn_in {
        chain.sweep();
    }
    let every = spec.measure_every.max(1);
    let mut measurements = Vec::with_capacity((spec.sweeps / every) as usize);
    for s in 1..=spec.sweeps {
        chain.sweep();
        if s % every == 0 {
            measurements.push(chain.measure(s));
            observe(s, &mut chain);
        }
    }
    if !chain.state.audit() {
        panic!("running defect counts drifted from recomputation");
    }
    Ok(RunRecord { measurements, acceptance: chain.acceptance, final_config: chain.config() })
}

pub fn run(spec: &ChainSpec) -> Result<RunRecord, SamplerError> {
    run_with(spec, |_, _| {})
}

/// Final configurations of two chains that differ only in their seeds.
pub fn sample_pair(spec: &ChainSpec, seed2: u64) -> Result<(DimerConfig, DimerConfig), SamplerError> {
    let a = run(spec)?;
    let b = run(&ChainSpec { seed: seed2, ..spec.clone() })?;
    Ok((a.final_config, b.final_config))
}
