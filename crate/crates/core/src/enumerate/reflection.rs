//! Reflection positivity and chessboard estimates, evaluated exactly on
//! small tori.

use super::{Ensemble, EnumError};
use crate::lattice::{block_transforms, EdgeId, Isometry, Rect};
use crate::model::DimerConfig;

/// Occupancy of the edges of a rectangle, read in that rectangle's frame.
#[derive(Debug, Clone, Copy)]
pub struct Local<'a> {
    edges: &'a [EdgeId],
    bits: u64,
}

impl<'a> Local<'a> {
    pub fn edges(&self) -> &'a [EdgeId] {
        self.edges
    }

    /// Bit `i` is the occupancy of `edges()[i]`.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Occupancy of an edge of the rectangle; edges outside read as empty.
    pub fn occupied(&self, e: EdgeId) -> bool {
        match self.edges.binary_search(&e) {
            Ok(i) => self.bits >> i & 1 == 1,
            Err(_) => false,
        }
    }
}

/// A real function of the local views of a k-tuple of configurations.
pub type Observable<'f> = dyn Fn(&[Local<'_>]) -> f64 + 'f;

fn local_bits(cfg: &DimerConfig, edges: &[EdgeId], tau: &Isometry) -> u64 {
    edges.iter().enumerate().fold(0u64, |acc, (i, e)| acc | (cfg.occupied(tau.apply_edge(*e)) as u64) << i)
}

/// Local views of every configuration of a periodic ensemble under a list of
/// isometries.
struct ViewTable {
    edges: Vec<EdgeId>,
    // bits[config][isometry]
    bits: Vec<Vec<u64>>,
}

impl ViewTable {
    fn new(ens: &Ensemble, r: &Rect, maps: &[Isometry]) -> Result<Self, EnumError> {
        if !ens.configs().first().is_some_and(|c| c.is_periodic()) {
            return Err(EnumError::NotPeriodic);
        }
        let edges = r.edges();
        if edges.len() > 64 {
            return Err(EnumError::TooLocal(edges.len()));
        }
        let bits = ens.configs().iter().map(|c| maps.iter().map(|t| local_bits(c, &edges, t)).collect()).collect();
        Ok(ViewTable { edges, bits })
    }

    /// `Σ_tuple Π p(σ_j) · Π_m f_m(views of the tuple under map m)` over the
    /// k-fold product, iterated lazily.
    fn product_expectation(&self, probs: &[f64], k: usize, factors: &[(usize, &Observable<'_>)]) -> f64 {
        let n = probs.len();
        let mut idx = vec![0usize; k];
        let mut views: Vec<Local<'_>> = vec![Local { edges: &self.edges, bits: 0 }; k];
        let mut terms = Vec::with_capacity(n.pow(k as u32));
        loop {
            let p: f64 = idx.iter().map(|&i| probs[i]).product();
            let mut val = 1.0;
            for &(m, f) in factors {
                for (j, &i) in idx.iter().enumerate() {
                    views[j].bits = self.bits[i][m];
                }
                val *= f(&views);
                if val == 0.0 {
                    break;
                }
            }
            terms.push(p * val);
            // odometer step
            let mut j = 0;
            loop {
                if j == k {
                    terms.sort_by(|a: &f64, b: &f64| b.abs().total_cmp(&a.abs()));
                    return terms.iter().sum();
                }
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }
}

fn group(ens: &Ensemble, r: &Rect) -> Result<Vec<Isometry>, EnumError> {
    block_transforms(r, ens.window()).map_err(|_| EnumError::NotABlock { inner: *r, outer: *ens.window() })
}

/// The (R, Λ)-chessboard seminorm of `f` under the k-fold product of the
/// periodic measure of `ens`.
pub fn chessboard_seminorm(ens: &Ensemble, f: &Observable<'_>, r: &Rect, k: usize) -> Result<f64, EnumError> {
    let maps = group(ens, r)?;
    let table = ViewTable::new(ens, r, &maps)?;
    let factors: Vec<(usize, &Observable<'_>)> = (0..maps.len()).map(|m| (m, f)).collect();
    let e = table.product_expectation(ens.probabilities(), k, &factors);
    Ok(e.max(0.0).powf(1.0 / maps.len() as f64))
}

/// Left and right sides of the chessboard estimate for events attached to a
/// subset of the reflection group: `E[Π τ f_τ]` and `Π ‖f_τ‖`.
pub fn chessboard_check(ens: &Ensemble, events: &[(Isometry, &Observable<'_>)], r: &Rect, k: usize) -> Result<(f64, f64), EnumError> {
    let maps = group(ens, r)?;
    let table = ViewTable::new(ens, r, &maps)?;
    let mut factors = Vec::with_capacity(events.len());
    for (tau, f) in events {
        let m = maps.iter().position(|t| t == tau).ok_or(EnumError::Geometry)?;
        factors.push((m, *f));
    }
    let lhs = table.product_expectation(ens.probabilities(), k, &factors);
    let mut rhs = 1.0;
    for (_, f) in events {
        rhs *= chessboard_seminorm(ens, *f, r, k)?;
    }
    Ok((lhs, rhs))
}

/// The two reflections for which positivity is asserted: `r` onto its right
/// neighbour when the torus is `2K×L`, or onto its upper neighbour when it is
/// `K×2L`.
pub fn rp_reflections(torus: &Rect, r: &Rect) -> Vec<Isometry> {
    let mut out = Vec::new();
    let anchored = torus.x0d() == -1 && torus.y0d() == -1;
    if anchored && torus.width() == 2 * r.width() && torus.height() == r.height() {
        out.push(Isometry::reflect_x(r.x0d() + 2 * r.width()));
    }
    if anchored && torus.width() == r.width() && torus.height() == 2 * r.height() {
        out.push(Isometry::reflect_y(r.y0d() + 2 * r.height()));
    }
    out
}

/// `μ(f · τf)` on the periodic ensemble.
pub fn rp_check(ens: &Ensemble, f: &Observable<'_>, r: &Rect, tau: &Isometry) -> Result<f64, EnumError> {
    if !rp_reflections(ens.window(), r).contains(tau) {
        return Err(EnumError::Geometry);
    }
    let maps = [Isometry::IDENTITY, *tau];
    let table = ViewTable::new(ens, r, &maps)?;
    Ok(table.product_expectation(ens.probabilities(), 1, &[(0, f), (1, f)]))
}
