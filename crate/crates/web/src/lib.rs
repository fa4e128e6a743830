//! WebAssembly bindings for the browser demo in `www/`. Everything crosses
//! the boundary as flat numeric arrays or JSON strings.

use dimerlab_core::disagree::{sealing_events, PairSample, SealScales};
use dimerlab_core::order::{percolation_report, psi_grid};
use dimerlab_core::sampler::{Chain, ChainSpec, Init};
use dimerlab_core::transfer1d::{z_fullpacked, Transfer1D};
use dimerlab_core::{DimerConfig, EdgeId, ModelParams, Orientation, VertexId};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn params(beta: f64, lambda: f64, a: f64) -> Result<ModelParams, JsError> {
    ModelParams::new(beta, lambda, a).map_err(|e| JsError::new(&e.to_string()))
}

fn chain(width: usize, height: usize, q: ModelParams, seed: u64, stream: u64, packed: bool) -> Result<Chain, JsError> {
    let mut spec = ChainSpec::new(width, height, q, seed);
    spec.chain = stream;
    spec.init = if packed { Init::PackedVertical } else { Init::Empty };
    Chain::new(&spec).map_err(|e| JsError::new(&e.to_string()))
}

/// Occupied edges as `[x, y, horizontal]` triples of their lower-left vertex.
fn flat_edges<'a>(edges: impl IntoIterator<Item = &'a EdgeId>) -> Vec<i32> {
    let mut out = Vec::new();
    for e in edges {
        let horizontal = e.orientation() == Orientation::Horizontal;
        let (x, y) = if horizontal { ((e.dx - 1) / 2, e.dy / 2) } else { (e.dx / 2, (e.dy - 1) / 2) };
        out.extend([x as i32, y as i32, horizontal as i32]);
    }
    out
}

fn orientation(vertical: bool) -> Orientation {
    if vertical {
        Orientation::Vertical
    } else {
        Orientation::Horizontal
    }
}

/// A single Metropolis chain on a torus.
#[wasm_bindgen]
pub struct Simulation {
    chain: Chain,
    sweeps: u64,
}

#[derive(Serialize)]
struct SimStats {
    sweeps: u64,
    horizontal: i64,
    vertical: i64,
    vacancies: i64,
    broken_links: i64,
    energy: f64,
    insert_rate: f64,
    delete_rate: f64,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(width: usize, height: usize, beta: f64, lambda: f64, a: f64, seed: u32, packed: bool) -> Result<Simulation, JsError> {
        Ok(Simulation { chain: chain(width, height, params(beta, lambda, a)?, seed as u64, 0, packed)?, sweeps: 0 })
    }

    pub fn set_beta(&mut self, beta: f64) -> Result<(), JsError> {
        params(beta, 0.0, 1.0)?;
        self.chain.set_beta(beta);
        Ok(())
    }

    pub fn run(&mut self, sweeps: u32) {
        for _ in 0..sweeps {
            self.chain.sweep();
        }
        self.sweeps += sweeps as u64;
    }

    pub fn dimers(&self) -> Vec<i32> {
        flat_edges(&self.chain.config().dimers())
    }

    /// Points of the vertical (or horizontal) order-parameter grid at scale
    /// `b`, as `[x, y]` pairs in grid units.
    pub fn grid(&self, b: i32, vertical: bool) -> Result<Vec<i32>, JsError> {
        let g = psi_grid(&self.chain.config(), b as i64, b as i64, 3, orientation(vertical)).map_err(|e| JsError::new(&e.to_string()))?;
        Ok(g.points.iter().flat_map(|p| [p.x as i32, p.y as i32]).collect())
    }

    /// Largest-cluster fraction and spanning flags of a grid, as JSON.
    pub fn grid_report(&self, b: i32, vertical: bool) -> Result<String, JsError> {
        let g = psi_grid(&self.chain.config(), b as i64, b as i64, 3, orientation(vertical)).map_err(|e| JsError::new(&e.to_string()))?;
        Ok(serde_json::to_string(&percolation_report(&g.points, &g.domain)).expect("serializable"))
    }

    pub fn stats(&self) -> String {
        let s = self.chain.state();
        let m = self.chain.acceptance();
        let q = self.chain.params();
        serde_json::to_string(&SimStats {
            sweeps: self.sweeps,
            horizontal: s.horizontal_dimers(),
            vertical: s.vertical_dimers(),
            vacancies: s.vacancies(),
            broken_links: s.broken_links(),
            energy: s.energy(q),
            insert_rate: m.insert.rate(),
            delete_rate: m.delete.rate(),
        })
        .expect("serializable")
    }
}

#[derive(Serialize)]
struct TransferRow {
    length: usize,
    log_z_vacant: f64,
    z_fullpacked: Option<f64>,
    packed_lower_bound: f64,
}

#[derive(Serialize)]
struct TransferTable {
    x1: f64,
    x2: f64,
    x3: f64,
    x1_minus_one: f64,
    ell0: f64,
    correlation_length: f64,
    rows: Vec<TransferRow>,
}

/// Spectrum, mesoscopic length and segment partition functions up to
/// `max_len`, as JSON.
#[wasm_bindgen]
pub fn transfer_table(beta: f64, lambda: f64, a: f64, max_len: usize) -> Result<String, JsError> {
    let q = params(beta, lambda, a)?;
    let t = Transfer1D::new(q);
    let err = |e: dimerlab_core::transfer1d::TransferError| JsError::new(&e.to_string());
    let s = t.spectrum().map_err(err)?;
    let rows = (1..=max_len)
        .map(|l| TransferRow {
            length: l,
            log_z_vacant: t.log_z_vacant(l),
            z_fullpacked: z_fullpacked(l, &q).ok(),
            packed_lower_bound: 1.0 + (l * l) as f64 / (16.0 * q.ell0().powi(2)),
        })
        .collect();
    let table = TransferTable {
        x1: s.x1,
        x2: s.x2,
        x3: s.x3,
        x1_minus_one: t.x1_minus_one().map_err(err)?,
        ell0: q.ell0(),
        correlation_length: t.correlation_length().map_err(err)?,
        rows,
    };
    Ok(serde_json::to_string(&table).expect("serializable"))
}

/// Two chains with different streams and the same start, for watching
/// their disagreement set and the sealed anchors.
#[wasm_bindgen]
pub struct Disagreement {
    left: Chain,
    right: Chain,
}

#[wasm_bindgen]
impl Disagreement {
    #[wasm_bindgen(constructor)]
    pub fn new(width: usize, height: usize, beta: f64, seed: u32) -> Result<Disagreement, JsError> {
        let q = params(beta, 0.0, 1.0)?;
        Ok(Disagreement { left: chain(width, height, q, seed as u64, 0, true)?, right: chain(width, height, q, seed as u64, 1, true)? })
    }

    pub fn run(&mut self, sweeps: u32) {
        for _ in 0..sweeps {
            self.left.sweep();
            self.right.sweep();
        }
    }

    fn pair(&self) -> PairSample {
        PairSample::new(self.left.config(), self.right.config()).expect("same geometry")
    }

    pub fn left(&self) -> Vec<i32> {
        flat_edges(&self.left.config().dimers())
    }

    pub fn right(&self) -> Vec<i32> {
        flat_edges(&self.right.config().dimers())
    }

    pub fn delta(&self) -> Vec<i32> {
        flat_edges(&self.pair().delta)
    }

    /// Anchors `[x, y]` whose rectangle of scales `(a_scale, c_scale, n)`
    /// is sealed in both configurations.
    pub fn sealed_anchors(&self, a_scale: i32, c_scale: i32, n: i32) -> Result<Vec<i32>, JsError> {
        let sc = SealScales::new(a_scale as i64, c_scale as i64, n as i64).map_err(|e| JsError::new(&e.to_string()))?;
        let (s, t): (DimerConfig, DimerConfig) = (self.left.config(), self.right.config());
        let (w, h) = (s.window().width(), s.window().height());
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let e = sealing_events(&s, &t, VertexId::new(x, y), &sc).map_err(|e| JsError::new(&e.to_string()))?;
                if e.sealed() {
                    out.extend([x as i32, y as i32]);
                }
            }
        }
        Ok(out)
    }
}
