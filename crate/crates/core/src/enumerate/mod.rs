//! Exhaustive enumeration of hard-core configurations on small windows, and
//! the exact Gibbs quantities built on it.

pub mod chain;
pub mod reflection;

use std::collections::HashMap;

use thiserror::Error;

use crate::lattice::{EdgeId, Rect, VertexId};
use crate::model::{BoundaryCondition, DimerConfig, ModelError, ModelParams};

/// Largest number of free edges accepted by [`Enumerator`].
pub const EDGE_LIMIT: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error("{0} free edges exceed the enumeration limit of {EDGE_LIMIT}")]
    TooManyEdges(usize),
    #[error("prefix of length {0} is longer than the edge list")]
    BadPrefix(usize),
    #[error("{inner} is not a block of {outer}")]
    NotABlock { inner: Rect, outer: Rect },
    #[error("reflection arguments need a periodic ensemble")]
    NotPeriodic,
    #[error("reflection does not match the doubled-rectangle geometry")]
    Geometry,
    #[error("rectangle has {0} edges; local views hold at most 64")]
    TooLocal(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Descend,
    Backtrack,
    Done,
}

/// Depth-first stream over every valid configuration. Edges are decided in
/// lexicographic order, "empty" before "occupied".
#[derive(Debug, Clone)]
pub struct Enumerator {
    template: DimerConfig,
    edges: Vec<EdgeId>,
    ends: Vec<[usize; 2]>,
    cover: Vec<bool>,
    assign: Vec<bool>,
    floor: usize,
    pos: usize,
    phase: Phase,
}

impl Enumerator {
    pub fn new(window: Rect, bc: BoundaryCondition) -> Result<Self, EnumError> {
        Enumerator::with_prefix(window, bc, &[])
    }

    /// Enumerate only the subtree in which the first `prefix.len()` edges
    /// take the given values.
    pub fn with_prefix(window: Rect, bc: BoundaryCondition, prefix: &[bool]) -> Result<Self, EnumError> {
        let template = DimerConfig::empty(window, bc)?;
        let edges = template.free_edges();
        if edges.len() > EDGE_LIMIT {
            return Err(EnumError::TooManyEdges(edges.len()));
        }
        if prefix.len() > edges.len() {
            return Err(EnumError::BadPrefix(prefix.len()));
        }
        let mut index: HashMap<VertexId, usize> = HashMap::new();
        let mut cover = Vec::new();
        let mut ends = Vec::with_capacity(edges.len());
        for e in &edges {
            let mut pair = [0; 2];
            for (k, v) in e.endpoints().into_iter().enumerate() {
                let v = template.canonical_vertex(v);
                let next = index.len();
                let id = *index.entry(v).or_insert(next);
                if id == cover.len() {
                    // vertices already covered by the fixed exterior count as used
                    cover.push(template.is_covered(v));
                }
                pair[k] = id;
            }
            ends.push(pair);
        }
        let mut it = Enumerator { template, edges, ends, cover, assign: Vec::new(), floor: prefix.len(), pos: 0, phase: Phase::Descend };
        it.assign = vec![false; it.edges.len()];
        for (i, &on) in prefix.iter().enumerate() {
            if on {
                if !it.can_place(i) {
                    it.phase = Phase::Done;
                    return Ok(it);
                }
                it.place(i, true);
            }
            it.pos = i + 1;
        }
        Ok(it)
    }

    /// Split the search tree on the first `depth` edges; the union of the
    /// returned streams is the full enumeration, each configuration once.
    pub fn split(window: Rect, bc: BoundaryCondition, depth: usize) -> Result<Vec<Enumerator>, EnumError> {
        let n = Enumerator::new(window, bc.clone())?.edges.len();
        let depth = depth.min(n);
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << depth) {
            let prefix: Vec<bool> = (0..depth).map(|i| mask >> (depth - 1 - i) & 1 == 1).collect();
            let e = Enumerator::with_prefix(window, bc.clone(), &prefix)?;
            if e.phase != Phase::Done {
                out.push(e);
            }
        }
        Ok(out)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    fn can_place(&self, i: usize) -> bool {
        let [u, v] = self.ends[i];
        u != v && !self.cover[u] && !self.cover[v]
    }

    fn place(&mut self, i: usize, on: bool) {
        let [u, v] = self.ends[i];
        self.cover[u] = on;
        self.cover[v] = on;
        self.assign[i] = on;
    }

    fn build(&self) -> DimerConfig {
        let mut cfg = self.template.clone();
        for (e, &on) in self.edges.iter().zip(&self.assign) {
            if on {
                cfg.set(*e, true).expect("enumerated edges are free");
            }
        }
        cfg
    }
}

impl Iterator for Enumerator {
    type Item = DimerConfig;

    fn next(&mut self) -> Option<DimerConfig> {
        loop {
            match self.phase {
                Phase::Done => return None,
                Phase::Descend => {
                    if self.pos == self.edges.len() {
                        self.phase = Phase::Backtrack;
                        return Some(self.build());
                    }
                    self.assign[self.pos] = false;
                    self.pos += 1;
                }
                Phase::Backtrack => loop {
                    if self.pos == self.floor {
                        self.phase = Phase::Done;
                        break;
                    }
                    self.pos -= 1;
                    let i = self.pos;
                    if self.assign[i] {
                        self.place(i, false);
                    } else if self.can_place(i) {
                        self.place(i, true);
                        self.pos += 1;
                        self.phase = Phase::Descend;
                        break;
                    }
                },
            }
        }
    }
}

pub fn enumerate(window: Rect, bc: BoundaryCondition) -> Result<Enumerator, EnumError> {
    Enumerator::new(window, bc)
}

/// Neumaier-compensated sum of `exp(x - shift)` taken in descending order.
pub(crate) fn log_sum_exp(mut logs: Vec<f64>) -> f64 {
    if logs.is_empty() {
        return f64::NEG_INFINITY;
    }
    logs.sort_by(|a, b| b.total_cmp(a));
    let shift = logs[0];
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for l in logs {
        let x = (l - shift).exp();
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    shift + (sum + comp).ln()
}

/// Log of the partition function restricted to configurations satisfying
/// `constraint` (all of them when `None`).
pub fn log_partition_function(
    window: Rect,
    bc: BoundaryCondition,
    params: &ModelParams,
    constraint: Option<&dyn Fn(&DimerConfig) -> bool>,
) -> Result<f64, EnumError> {
    let mut logs = Vec::new();
    for cfg in enumerate(window, bc)? {
        if constraint.is_none_or(|c| c(&cfg)) {
            logs.push(cfg.log_weight(&window, params)?);
        }
    }
    Ok(log_sum_exp(logs))
}

pub fn partition_function(
    window: Rect,
    bc: BoundaryCondition,
    params: &ModelParams,
    constraint: Option<&dyn Fn(&DimerConfig) -> bool>,
) -> Result<f64, EnumError> {
    log_partition_function(window, bc, params, constraint).map(f64::exp)
}

pub fn expectation(window: Rect, bc: BoundaryCondition, params: &ModelParams, f: &dyn Fn(&DimerConfig) -> f64) -> Result<f64, EnumError> {
    Ok(Ensemble::new(window, bc, params)?.expectation(f))
}

/// Every configuration of a window with its Gibbs probability.
#[derive(Debug, Clone)]
pub struct Ensemble {
    window: Rect,
    bc: BoundaryCondition,
    configs: Vec<DimerConfig>,
    log_weights: Vec<f64>,
    probs: Vec<f64>,
    log_z: f64,
}

impl Ensemble {
    pub fn new(window: Rect, bc: BoundaryCondition, params: &ModelParams) -> Result<Self, EnumError> {
        let configs: Vec<DimerConfig> = enumerate(window, bc.clone())?.collect();
        let log_weights = configs.iter().map(|c| c.log_weight(&window, params)).collect::<Result<Vec<_>, _>>()?;
        let log_z = log_sum_exp(log_weights.clone());
        let probs = log_weights.iter().map(|l| (l - log_z).exp()).collect();
        Ok(Ensemble { window, bc, configs, log_weights, probs, log_z })
    }

    pub fn window(&self) -> &Rect {
        &self.window
    }
    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }
    pub fn configs(&self) -> &[DimerConfig] {
        &self.configs
    }
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }
    pub fn log_z(&self) -> f64 {
        self.log_z
    }
    pub fn len(&self) -> usize {
        self.configs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn expectation(&self, f: &dyn Fn(&DimerConfig) -> f64) -> f64 {
        let mut terms: Vec<f64> = self.configs.iter().zip(&self.probs).map(|(c, p)| p * f(c)).collect();
        terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        terms.iter().sum()
    }

    pub fn probability(&self, event: &dyn Fn(&DimerConfig) -> bool) -> f64 {
        self.expectation(&|c| if event(c) { 1.0 } else { 0.0 })
    }

    /// Log partition function restricted to `event`.
    pub fn log_z_of(&self, event: &dyn Fn(&DimerConfig) -> bool) -> f64 {
        let logs = self.configs.iter().zip(&self.log_weights).filter(|(c, _)| event(c)).map(|(_, l)| *l).collect();
        log_sum_exp(logs)
    }
}
