//! Disagreement sets of two configurations and the sealed-rectangle events
//! that confine them.
//!
//! Scales follow the sealed rectangle `S`, of size `Na × Nc` with its lower
//! left vertex at the anchor, where `Na = N·a_scale` and `Nc = N·c_scale`.
//! The central slab is `S` stretched to three times its height (one `Nc`
//! block below, one above); the side slabs are its copies shifted by `±Na`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{ddag_neighbors, group_by_root, line_neighbors, EdgeId, Orientation, Rect, VertexId};
use crate::model::DimerConfig;
use crate::stats::Proportion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DisagreeError {
    #[error("configurations live on different windows or boundary conditions")]
    GeometryMismatch,
    #[error("sealing scales need N > 2 and positive scales")]
    BadScales,
    #[error("window {0} cannot hold the {1}x{2} sealing region")]
    WindowTooSmall(Rect, i64, i64),
    #[error("rectangle at the anchor is not sealed")]
    NotSealed,
    #[error("fit is degenerate: {0}")]
    DegenerateFit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealScales {
    pub a_scale: i64,
    pub c_scale: i64,
    pub n: i64,
}

impl SealScales {
    pub fn new(a_scale: i64, c_scale: i64, n: i64) -> Result<Self, DisagreeError> {
        if n <= 2 || a_scale < 1 || c_scale < 1 {
            return Err(DisagreeError::BadScales);
        }
        Ok(SealScales { a_scale, c_scale, n })
    }

    /// Vertical scale tied to the mesoscopic length: `max(1, round(c·ℓ₀/N))`.
    pub fn c_scale_for(c: f64, ell0: f64, n: i64) -> i64 {
        ((c * ell0 / n as f64).round() as i64).max(1)
    }

    pub fn na(&self) -> i64 {
        self.n * self.a_scale
    }

    pub fn nc(&self) -> i64 {
        self.n * self.c_scale
    }
}

fn same_geometry(a: &DimerConfig, b: &DimerConfig) -> bool {
    a.window() == b.window() && a.bc() == b.bc()
}

/// Edges of `region` occupied in exactly one configuration. On a torus
/// analysed over its window each edge class appears once.
pub fn delta(s: &DimerConfig, t: &DimerConfig, region: &Rect) -> Result<BTreeSet<EdgeId>, DisagreeError> {
    if !same_geometry(s, t) {
        return Err(DisagreeError::GeometryMismatch);
    }
    let candidates = if s.is_periodic() && region == s.window() { s.free_edges() } else { region.edges() };
    Ok(candidates.into_iter().filter(|e| s.occupied(*e) != t.occupied(*e)).collect())
}

/// Components of an edge set under ‡-adjacency, optionally on a `w × h`
/// torus (edges given canonically with base vertex in `[0,w)×[0,h)`).
pub fn ddag_components(delta: &BTreeSet<EdgeId>, period: Option<(i64, i64)>) -> Vec<Vec<EdgeId>> {
    components_with(delta, period, |e| ddag_neighbors(e).to_vec())
}

/// Components under plain line-graph adjacency (edges sharing a vertex).
pub fn line_components(delta: &BTreeSet<EdgeId>, period: Option<(i64, i64)>) -> Vec<Vec<EdgeId>> {
    components_with(delta, period, |e| line_neighbors(e).to_vec())
}

fn wrap(e: EdgeId, period: Option<(i64, i64)>) -> EdgeId {
    match period {
        None => e,
        Some((w, h)) => {
            let b = e.base();
            e.shifted(b.x.rem_euclid(w) - b.x, b.y.rem_euclid(h) - b.y)
        }
    }
}

fn components_with(delta: &BTreeSet<EdgeId>, period: Option<(i64, i64)>, nbrs: impl Fn(EdgeId) -> Vec<EdgeId>) -> Vec<Vec<EdgeId>> {
    let items: Vec<EdgeId> = delta.iter().copied().collect();
    let index: HashMap<EdgeId, usize> = items.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut uf = UnionFind::new(items.len());
    for (i, e) in items.iter().enumerate() {
        for f in nbrs(*e) {
            if let Some(&j) = index.get(&wrap(f, period)) {
                uf.union(i, j);
            }
        }
    }
    group_by_root(&items, &mut uf)
}

/// Extent of one ‡-component traced in unrolled coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentShape {
    pub size: usize,
    /// Width and height of the midpoint bounding box, in lattice units.
    pub extent: (i64, i64),
    /// The component winds around the torus.
    pub wraps: bool,
}

pub fn component_shapes(delta: &BTreeSet<EdgeId>, period: Option<(i64, i64)>) -> Vec<ComponentShape> {
    ddag_components(delta, period)
        .into_iter()
        .map(|comp| {
            let members: BTreeSet<EdgeId> = comp.iter().copied().collect();
            let mut seen: HashMap<EdgeId, EdgeId> = HashMap::from([(comp[0], comp[0])]);
            let mut queue = VecDeque::from([comp[0]]);
            let mut wraps = false;
            while let Some(u) = queue.pop_front() {
                for f in ddag_neighbors(u) {
                    let c = wrap(f, period);
                    if !members.contains(&c) {
                        continue;
                    }
                    match seen.get(&c) {
                        Some(&prev) => wraps |= prev != f,
                        None => {
                            seen.insert(c, f);
                            queue.push_back(f);
                        }
                    }
                }
            }
            let xs = seen.values().map(|e| e.dx);
            let ys = seen.values().map(|e| e.dy);
            let span = |it: &mut dyn Iterator<Item = i64>| {
                let v: Vec<i64> = it.collect();
                (v.iter().max().unwrap() - v.iter().min().unwrap()) / 2
            };
            ComponentShape { size: comp.len(), extent: (span(&mut xs.into_iter()), span(&mut ys.into_iter())), wraps }
        })
        .collect()
}

/// Two configurations on the same geometry together with their
/// disagreement set over the whole window.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub sigma: DimerConfig,
    pub sigma_prime: DimerConfig,
    pub delta: BTreeSet<EdgeId>,
}

impl PairSample {
    pub fn new(sigma: DimerConfig, sigma_prime: DimerConfig) -> Result<Self, DisagreeError> {
        let delta = delta(&sigma, &sigma_prime, &sigma.window().clone())?;
        Ok(PairSample { sigma, sigma_prime, delta })
    }

    pub fn period(&self) -> Option<(i64, i64)> {
        self.sigma.period()
    }

    pub fn components(&self) -> Vec<Vec<EdgeId>> {
        ddag_components(&self.delta, self.period())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealingEvents {
    pub sigma0: bool,
    pub sigma0_prime: bool,
    pub sigma1: bool,
    pub sigma1_prime: bool,
    pub sigma2: bool,
}

impl SealingEvents {
    pub fn sealed(&self) -> bool {
        self.sigma1 && self.sigma1_prime && self.sigma2
    }
}

fn check_room(cfg: &DimerConfig, anchor: VertexId, sc: &SealScales) -> Result<(), DisagreeError> {
    let (na, nc) = (sc.na(), sc.nc());
    let w = cfg.window();
    let fits = if cfg.is_periodic() {
        w.width() >= 3 * na && w.height() >= 3 * nc
    } else {
        let need = Rect::new(2 * (anchor.x - na) - 1, 2 * (anchor.y - nc) - 1, 3 * na, 3 * nc).expect("positive scales");
        w.contains_doubled(need.x0d(), need.y0d()) && w.contains_doubled(need.x1d(), need.y1d())
    };
    if fits {
        Ok(())
    } else {
        Err(DisagreeError::WindowTooSmall(*w, 3 * na, 3 * nc))
    }
}

fn vertically_covered(cfg: &DimerConfig, v: VertexId) -> bool {
    cfg.covering_edge(v).is_some_and(|e| e.orientation() == Orientation::Vertical)
}

/// Every row of both side slabs has a vertex covered by a vertical dimer.
fn sigma0(cfg: &DimerConfig, anchor: VertexId, sc: &SealScales) -> bool {
    let (na, nc) = (sc.na(), sc.nc());
    [anchor.x - na, anchor.x + na]
        .iter()
        .all(|&x0| (anchor.y - nc..anchor.y + 2 * nc).all(|y| (x0..x0 + na).any(|x| vertically_covered(cfg, VertexId::new(x, y)))))
}

/// No horizontal dimer touches the central slab.
fn sigma1(cfg: &DimerConfig, anchor: VertexId, sc: &SealScales) -> bool {
    let (na, nc) = (sc.na(), sc.nc());
    (anchor.y - nc..anchor.y + 2 * nc)
        .all(|y| (anchor.x..anchor.x + na).all(|x| cfg.covering_edge(VertexId::new(x, y)).is_none_or(|e| !e.is_horizontal())))
}

/// Every column of the lower and upper guard blocks holds a vacancy of both
/// configurations or a vertical dimer of both lying inside the block.
fn sigma2(s: &DimerConfig, t: &DimerConfig, anchor: VertexId, sc: &SealScales) -> bool {
    let (na, nc) = (sc.na(), sc.nc());
    [anchor.y - nc, anchor.y + nc].iter().all(|&y0| {
        (anchor.x..anchor.x + na).all(|x| {
            (y0..y0 + nc).any(|y| {
                let v = VertexId::new(x, y);
                let e = EdgeId::vertical(x, y);
                (!s.is_covered(v) && !t.is_covered(v)) || (y + 1 < y0 + nc && s.occupied(e) && t.occupied(e))
            })
        })
    })
}

pub fn sealing_events(s: &DimerConfig, t: &DimerConfig, anchor: VertexId, sc: &SealScales) -> Result<SealingEvents, DisagreeError> {
    if !same_geometry(s, t) {
        return Err(DisagreeError::GeometryMismatch);
    }
    check_room(s, anchor, sc)?;
    Ok(SealingEvents {
        sigma0: sigma0(s, anchor, sc),
        sigma0_prime: sigma0(t, anchor, sc),
        sigma1: sigma1(s, anchor, sc),
        sigma1_prime: sigma1(t, anchor, sc),
        sigma2: sigma2(s, t, anchor, sc),
    })
}

pub fn sealed(s: &DimerConfig, t: &DimerConfig, anchor: VertexId, sc: &SealScales) -> Result<bool, DisagreeError> {
    Ok(sealing_events(s, t, anchor, sc)?.sealed())
}

/// The sealed rectangle at `anchor`.
pub fn sealed_rect(anchor: VertexId, sc: &SealScales) -> Rect {
    Rect::at_vertex(anchor, sc.na(), sc.nc()).expect("positive scales")
}

/// For every disagreement edge in the sealed rectangle, members of its
/// ‡-component that leave its column or the band from `Nc` below to `2Nc`
/// above the anchor row. The search runs in unrolled coordinates so a
/// component winding around a torus is reported.
pub fn confinement_check(pair: &PairSample, anchor: VertexId, sc: &SealScales) -> Result<Vec<(EdgeId, EdgeId)>, DisagreeError> {
    if !sealed(&pair.sigma, &pair.sigma_prime, anchor, sc)? {
        return Err(DisagreeError::NotSealed);
    }
    let period = pair.period();
    let s = sealed_rect(anchor, sc);
    let (lo, hi) = (2 * (anchor.y - sc.nc()) - 1, 2 * (anchor.y + 2 * sc.nc()) - 1);
    let mut out = Vec::new();
    let seeds: Vec<EdgeId> = match period {
        Some(_) => s.edges().into_iter().filter(|e| pair.delta.contains(&wrap(*e, period))).collect(),
        None => s.edges().into_iter().filter(|e| pair.delta.contains(e)).collect(),
    };
    for e in seeds {
        let inside = |f: EdgeId| f.dx == e.dx && lo < f.dy && f.dy < hi;
        let mut seen = BTreeSet::from([e]);
        let mut queue = VecDeque::from([e]);
        while let Some(u) = queue.pop_front() {
            if !inside(u) {
                out.push((e, u));
                continue;
            }
            for f in ddag_neighbors(u) {
                if pair.delta.contains(&wrap(f, period)) && seen.insert(f) {
                    queue.push_back(f);
                }
            }
        }
    }
    Ok(out)
}

/// Fraction of pairs whose disagreement set ‡-connects `a` to `b`.
pub fn connection_stats(pairs: &[PairSample], a: &[EdgeId], b: &[EdgeId]) -> Result<Proportion, DisagreeError> {
    let mut hits = 0;
    for p in pairs {
        if !same_geometry(&p.sigma, &pairs[0].sigma) {
            return Err(DisagreeError::GeometryMismatch);
        }
        let period = p.period();
        let a: BTreeSet<EdgeId> = a.iter().map(|e| wrap(*e, period)).collect();
        let b: BTreeSet<EdgeId> = b.iter().map(|e| wrap(*e, period)).collect();
        if p.components().iter().any(|c| c.iter().any(|e| a.contains(e)) && c.iter().any(|e| b.contains(e))) {
            hits += 1;
        }
    }
    Ok(Proportion::new(hits, pairs.len() as u64))
}

/// Connection frequency at one displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementStat {
    pub dx: i64,
    pub dy: i64,
    pub successes: u64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha1Fit {
    pub log_c: f64,
    /// Horizontal decay rate; absent when every displacement has the same |dx|.
    pub c_x: Option<f64>,
    pub c_y: Option<f64>,
    /// `c_x / c_y` when both rates are fitted.
    pub anisotropy: Option<f64>,
    pub points_used: usize,
    /// Weighted residuals of log p at the points used.
    pub residuals: Vec<f64>,
}

/// Weighted least squares of `log p = log C − c_x|dx| − c_y|dy|`, with
/// inverse delta-method variances `n·p/(1−p)` as weights. Points with an
/// empirical frequency of 0 or 1 are skipped.
pub fn alpha1_fit(stats: &[DisplacementStat]) -> Result<Alpha1Fit, DisagreeError> {
    let pts: Vec<(f64, f64, f64, f64)> = stats
        .iter()
        .filter(|s| s.trials > 0 && s.successes > 0 && s.successes < s.trials)
        .map(|s| {
            let p = s.successes as f64 / s.trials as f64;
            (s.dx.abs() as f64, s.dy.abs() as f64, p.ln(), s.trials as f64 * p / (1.0 - p))
        })
        .collect();
    let varies = |f: fn(&(f64, f64, f64, f64)) -> f64| pts.iter().any(|p| f(p) != f(&pts[0]));
    if pts.is_empty() {
        return Err(DisagreeError::DegenerateFit("no displacement with a frequency strictly between 0 and 1".into()));
    }
    let (fit_x, fit_y) = (varies(|p| p.0), varies(|p| p.1));
    let cols = 1 + fit_x as usize + fit_y as usize;
    if pts.len() < cols + 1 || cols == 1 {
        return Err(DisagreeError::DegenerateFit(format!("{} usable points for {} parameters", pts.len(), cols)));
    }
    let mut x = DMatrix::<f64>::zeros(pts.len(), cols);
    let mut y = DVector::<f64>::zeros(pts.len());
    for (i, &(dx, dy, lp, w)) in pts.iter().enumerate() {
        let sw = w.sqrt();
        x[(i, 0)] = sw;
        let mut c = 1;
        if fit_x {
            x[(i, c)] = -dx * sw;
            c += 1;
        }
        if fit_y {
            x[(i, c)] = -dy * sw;
        }
        y[i] = lp * sw;
    }
    let xtx = x.transpose() * &x;
    let beta =
        xtx.cholesky().ok_or_else(|| DisagreeError::DegenerateFit("normal equations are singular".into()))?.solve(&(x.transpose() * &y));
    let residuals = (&y - &x * &beta).iter().copied().collect();
    let c_x = fit_x.then(|| beta[1]);
    let c_y = fit_y.then(|| beta[cols - 1]);
    Ok(Alpha1Fit { log_c: beta[0], c_x, c_y, anisotropy: c_x.zip(c_y).map(|(a, b)| a / b), points_used: pts.len(), residuals })
}

/// Period of a pair and the component index of each disagreement edge.
type ComponentIndex = (Option<(i64, i64)>, BTreeMap<EdgeId, usize>);

/// Connection statistics between the vertical edge at `origin` and its
/// translates by each displacement, over a batch of pairs.
pub fn displacement_stats(
    pairs: &[PairSample],
    origin: EdgeId,
    displacements: &[(i64, i64)],
) -> Result<Vec<DisplacementStat>, DisagreeError> {
    let mut out = Vec::with_capacity(displacements.len());
    let comps: Vec<ComponentIndex> = pairs
        .iter()
        .map(|p| {
            let mut m = BTreeMap::new();
            for (i, c) in p.components().into_iter().enumerate() {
                m.extend(c.into_iter().map(|e| (e, i)));
            }
            (p.period(), m)
        })
        .collect();
    for &(dx, dy) in displacements {
        let target = origin.shifted(dx, dy);
        let successes = comps
            .iter()
            .filter(|(period, m)| match (m.get(&wrap(origin, *period)), m.get(&wrap(target, *period))) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            })
            .count() as u64;
        out.push(DisplacementStat { dx, dy, successes, trials: pairs.len() as u64 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Isometry;
    use crate::model::BoundaryCondition;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn torus(w: i64, h: i64) -> DimerConfig {
        DimerConfig::empty(Rect::origin(w, h).unwrap(), BoundaryCondition::Periodic).unwrap()
    }

    fn packed(w: i64, h: i64, offset: i64) -> DimerConfig {
        let mut c = torus(w, h);
        for x in 0..w {
            for j in (0..h).step_by(2) {
                c.set(EdgeId::vertical(x, j + offset), true).unwrap();
            }
        }
        c
    }

    #[test]
    fn delta_basics() {
        let s = torus(4, 4);
        let mut t = s.clone();
        assert!(delta(&s, &t, s.window()).unwrap().is_empty());
        t.set(EdgeId::vertical(1, 1), true).unwrap();
        assert_eq!(delta(&s, &t, s.window()).unwrap(), BTreeSet::from([EdgeId::vertical(1, 1)]));
        assert_eq!(delta(&t, &s, s.window()).unwrap(), delta(&s, &t, s.window()).unwrap());
        assert!(matches!(delta(&s, &torus(4, 6), s.window()), Err(DisagreeError::GeometryMismatch)));
    }

    #[test]
    fn ddag_joins_colinear_gap() {
        let d = BTreeSet::from([EdgeId::vertical(0, 0), EdgeId::vertical(0, 2)]);
        assert_eq!(ddag_components(&d, None).len(), 1);
        assert_eq!(line_components(&d, None).len(), 2);
    }

    #[test]
    fn column_offset_is_one_component() {
        let r = Rect::origin(3, 8).unwrap();
        let mut s = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
        let mut t = s.clone();
        for j in (0..8).step_by(2) {
            s.set(EdgeId::vertical(1, j), true).unwrap();
        }
        for j in (1..7).step_by(2) {
            t.set(EdgeId::vertical(1, j), true).unwrap();
        }
        let p = PairSample::new(s, t).unwrap();
        let column: BTreeSet<EdgeId> = (0..7).map(|j| EdgeId::vertical(1, j)).collect();
        assert_eq!(p.delta, column);
        assert_eq!(p.components().len(), 1);
    }

    fn scales() -> SealScales {
        SealScales::new(1, 1, 4).unwrap()
    }

    #[test]
    fn identical_packed_pair_is_sealed() {
        let s = packed(12, 12, 0);
        let ev = sealing_events(&s, &s, VertexId::new(4, 4), &scales()).unwrap();
        assert_eq!(ev, SealingEvents { sigma0: true, sigma0_prime: true, sigma1: true, sigma1_prime: true, sigma2: true });
        let p = PairSample::new(s.clone(), s).unwrap();
        assert!(confinement_check(&p, VertexId::new(4, 4), &scales()).unwrap().is_empty());
        assert!(matches!(
            sealing_events(&packed(8, 12, 0), &packed(8, 12, 0), VertexId::new(0, 0), &scales()),
            Err(DisagreeError::WindowTooSmall(..))
        ));
    }

    #[test]
    fn horizontal_dimer_breaks_sigma1() {
        let s = packed(12, 12, 0);
        let mut t = s.clone();
        t.set(EdgeId::vertical(5, 6), false).unwrap();
        t.set(EdgeId::vertical(6, 6), false).unwrap();
        t.set(EdgeId::horizontal(5, 6), true).unwrap();
        let ev = sealing_events(&s, &t, VertexId::new(4, 4), &scales()).unwrap();
        assert!(ev.sigma1 && !ev.sigma1_prime);
        assert!(!sealed(&t, &s, VertexId::new(4, 4), &scales()).unwrap());
        let p = PairSample::new(s, t).unwrap();
        assert!(matches!(confinement_check(&p, VertexId::new(4, 4), &scales()), Err(DisagreeError::NotSealed)));
    }

    #[test]
    fn offset_packing_breaks_sigma2() {
        let ev = sealing_events(&packed(12, 12, 0), &packed(12, 12, 1), VertexId::new(4, 4), &scales()).unwrap();
        assert!(ev.sigma1 && ev.sigma1_prime && !ev.sigma2);
    }

    #[test]
    fn shifted_segment_is_confined() {
        let s = packed(12, 12, 0);
        let mut t = s.clone();
        t.set(EdgeId::vertical(5, 4), false).unwrap();
        t.set(EdgeId::vertical(5, 6), false).unwrap();
        t.set(EdgeId::vertical(5, 5), true).unwrap();
        let p = PairSample::new(s.clone(), t.clone()).unwrap();
        assert_eq!(p.delta.len(), 3);
        assert!(sealed(&s, &t, VertexId::new(4, 4), &scales()).unwrap());
        assert!(confinement_check(&p, VertexId::new(4, 4), &scales()).unwrap().is_empty());
        let shapes = component_shapes(&p.delta, p.period());
        assert_eq!(shapes, vec![ComponentShape { size: 3, extent: (0, 2), wraps: false }]);
    }

    #[test]
    fn winding_component_is_detected() {
        let d: BTreeSet<EdgeId> = (0..4).map(|j| EdgeId::vertical(1, j)).collect();
        let shapes = component_shapes(&d, Some((4, 4)));
        assert!(shapes[0].wraps);
    }

    #[test]
    fn connection_with_itself_is_hit_frequency() {
        let s = torus(4, 4);
        let mut t = s.clone();
        t.set(EdgeId::vertical(0, 0), true).unwrap();
        let pairs = vec![PairSample::new(s.clone(), t).unwrap(), PairSample::new(s.clone(), s).unwrap()];
        let a = [EdgeId::vertical(0, 0)];
        assert_eq!(connection_stats(&pairs, &a, &a).unwrap().successes, 1);
    }

    #[test]
    fn fit_recovers_synthetic_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (cx, cy, c0) = (0.9, 0.25, 0.6_f64);
        let mut stats = Vec::new();
        for dx in 0..4 {
            for dy in 0..8 {
                let p = c0 * (-cx * dx as f64 - cy * dy as f64).exp();
                let n = 20_000;
                let k = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
                stats.push(DisplacementStat { dx, dy, successes: k, trials: n });
            }
        }
        let fit = alpha1_fit(&stats).unwrap();
        assert!((fit.c_x.unwrap() - cx).abs() < 0.05 * cx);
        assert!((fit.c_y.unwrap() - cy).abs() < 0.05 * cy);
        assert!((fit.log_c - c0.ln()).abs() < 0.05);
        assert!(alpha1_fit(&stats[..1]).is_err());
    }

    #[test]
    fn geometric_columns_fit_vertical_rate() {
        // Δ is a vertical run from the origin with geometric height, so the
        // origin connects to height dy with probability q^dy.
        let q: f64 = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let base = torus(4, 64);
        let pairs: Vec<PairSample> = (0..4000)
            .map(|_| {
                let mut j = 0;
                while j < 30 && rng.gen::<f64>() < q {
                    j += 1;
                }
                let d = (0..=j).map(|y| EdgeId::vertical(1, y)).collect();
                PairSample { sigma: base.clone(), sigma_prime: base.clone(), delta: d }
            })
            .collect();
        let disp: Vec<(i64, i64)> = (1..8).map(|dy| (0, dy)).collect();
        let stats = displacement_stats(&pairs, EdgeId::vertical(1, 0), &disp).unwrap();
        let fit = alpha1_fit(&stats).unwrap();
        let rate = -q.ln();
        assert!(fit.c_x.is_none());
        assert!((fit.c_y.unwrap() - rate).abs() < 0.1 * rate, "{:?} vs {rate}", fit.c_y);
    }

    fn translate(c: &DimerConfig, x: i64, y: i64) -> DimerConfig {
        let mut out = torus(c.window().width(), c.window().height());
        let iso = Isometry::translation(x, y);
        for e in c.dimers() {
            out.set(iso.apply_edge(e), true).unwrap();
        }
        out
    }

    proptest! {
        #[test]
        fn sealing_is_translation_invariant(seed in 0u64..200, x in -12i64..12, y in -12i64..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = packed(12, 12, 0);
            let mut t = packed(12, 12, 0);
            for c in [&mut s, &mut t] {
                for _ in 0..6 {
                    let e = EdgeId::vertical(rng.gen_range(0..12), rng.gen_range(0..12));
                    if c.occupied(e) {
                        c.set(e, false).unwrap();
                    } else if c.can_insert(e) {
                        c.set(e, true).unwrap();
                    }
                    let h = EdgeId::horizontal(rng.gen_range(0..12), rng.gen_range(0..12));
                    if rng.gen::<f64>() < 0.3 && c.can_insert(h) {
                        c.set(h, true).unwrap();
                    }
                }
            }
            let anchor = VertexId::new(rng.gen_range(0..12), rng.gen_range(0..12));
            let moved = VertexId::new(anchor.x + x, anchor.y + y);
            let a = sealing_events(&s, &t, anchor, &scales()).unwrap();
            let b = sealing_events(&translate(&s, x, y), &translate(&t, x, y), moved, &scales()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
