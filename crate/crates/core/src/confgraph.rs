//! Configuration graphs of vacant-boundary configurations.
//!
//! The graph lives on the dual lattice points of `Λ'`, the window padded by
//! one unit. A dual edge is present unless it crosses a dimer or the link
//! between two colinear dimers, and is labelled `v` next to a vacancy, `b`
//! across a broken link, `bv` for both, and `s` otherwise (a stick edge).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::lattice::{EdgeId, Orientation, Rect, VertexId};
use crate::model::{BoundaryCondition, DimerConfig, ModelParams};
use crate::order::{sticks, Segment, Stick};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfGraphError {
    #[error("configuration graphs need a vacant boundary")]
    NotVacant,
    #[error("configuration graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    S,
    B,
    V,
    BV,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::S => "s",
            Label::B => "b",
            Label::V => "v",
            Label::BV => "bv",
        })
    }
}

/// A dual edge between two graph vertices (indices), remembering the primal
/// edge it crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualEdge {
    pub a: usize,
    pub b: usize,
    pub label: Label,
    pub crossed: EdgeId,
}

impl DualEdge {
    pub fn orientation(&self) -> Orientation {
        self.crossed.orientation().flip()
    }
}

#[derive(Debug, Clone)]
pub struct ConfigGraph {
    lambda: Rect,
    lambda_prime: Rect,
    /// Dual points in doubled coordinates.
    vertices: Vec<(i64, i64)>,
    edges: Vec<DualEdge>,
    vacancies: Vec<VertexId>,
    links: Vec<EdgeId>,
    sticks: Vec<Stick>,
}

fn is_link(cfg: &DimerConfig, e: EdgeId) -> bool {
    cfg.occupied(e.colinear(-1)) && cfg.occupied(e.colinear(1))
}

/// The two dual points joined by the dual edge crossing `e`.
fn dual_ends(e: EdgeId) -> [(i64, i64); 2] {
    if e.is_horizontal() {
        [(e.dx, e.dy - 1), (e.dx, e.dy + 1)]
    } else {
        [(e.dx - 1, e.dy), (e.dx + 1, e.dy)]
    }
}

pub fn build(cfg: &DimerConfig, lambda: &Rect) -> Result<ConfigGraph, ConfGraphError> {
    if *cfg.bc() != BoundaryCondition::Vacant {
        return Err(ConfGraphError::NotVacant);
    }
    let lp = lambda.padded(1);
    let mut vertices = Vec::new();
    for yd in (lp.y0d()..=lp.y1d()).step_by(2) {
        for xd in (lp.x0d()..=lp.x1d()).step_by(2) {
            vertices.push((xd, yd));
        }
    }
    let index: HashMap<(i64, i64), usize> = vertices.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    // primal vertices whose dual faces tile Λ'
    let faces = lambda.padded(1).vertices();
    let vacant: BTreeSet<VertexId> = faces.iter().copied().filter(|v| !cfg.is_covered(*v)).collect();
    let mut edges = Vec::new();
    for e in lp.padded(1).edges() {
        let [p, q] = dual_ends(e);
        let (Some(&a), Some(&b)) = (index.get(&p), index.get(&q)) else { continue };
        if cfg.occupied(e) || is_link(cfg, e) {
            continue;
        }
        let v = e.endpoints().iter().any(|u| !cfg.is_covered(*u));
        let bl = cfg.is_broken_link(e);
        let label = match (bl, v) {
            (true, true) => Label::BV,
            (true, false) => Label::B,
            (false, true) => Label::V,
            (false, false) => Label::S,
        };
        edges.push(DualEdge { a, b, label, crossed: e });
    }
    let present: BTreeSet<EdgeId> = edges.iter().map(|e| e.crossed).collect();
    let vacancies: Vec<VertexId> =
        vacant.into_iter().filter(|v| crate::lattice::incident_edges(*v).iter().all(|e| present.contains(e))).collect();
    let links: Vec<EdgeId> = edges.iter().filter(|e| matches!(e.label, Label::B | Label::BV)).map(|e| e.crossed).collect();
    let g = ConfigGraph { lambda: *lambda, lambda_prime: lp, vertices, edges, vacancies, links, sticks: sticks(cfg, &lp) };
    if !g.is_connected() {
        return Err(ConfGraphError::Disconnected);
    }
    Ok(g)
}

fn union_of(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> (UnionFind<usize>, Vec<bool>) {
    let mut uf = UnionFind::new(n);
    let mut touched = vec![false; n];
    for (a, b) in edges {
        uf.union(a, b);
        touched[a] = true;
        touched[b] = true;
    }
    (uf, touched)
}

fn nontrivial_count(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let (mut uf, touched) = union_of(n, edges);
    (0..n).filter(|&i| touched[i]).map(|i| uf.find_mut(i)).collect::<BTreeSet<_>>().len()
}

fn keeps(label: Label, o: Orientation, removed: Orientation) -> bool {
    !(label == Label::S && o == removed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubComponents {
    pub k_ver: usize,
    pub k_hor: usize,
    pub k: usize,
}

impl ConfigGraph {
    pub fn lambda(&self) -> &Rect {
        &self.lambda
    }
    pub fn lambda_prime(&self) -> &Rect {
        &self.lambda_prime
    }
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }
    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }
    /// Vacancies whose four surrounding dual edges are in the graph.
    pub fn vacancies(&self) -> &[VertexId] {
        &self.vacancies
    }
    /// Broken links whose crossing dual edge is in the graph.
    pub fn links(&self) -> &[EdgeId] {
        &self.links
    }
    pub fn v_count(&self) -> usize {
        self.vacancies.len()
    }
    pub fn b_count(&self) -> usize {
        self.links.len()
    }
    pub fn sticks(&self) -> &[Stick] {
        &self.sticks
    }

    pub fn is_connected(&self) -> bool {
        let (mut uf, _) = union_of(self.vertices.len(), self.edges.iter().map(|e| (e.a, e.b)));
        let r = uf.find_mut(0);
        (0..self.vertices.len()).all(|i| uf.find_mut(i) == r)
    }

    pub fn log_weight(&self, params: &ModelParams) -> f64 {
        self.v_count() as f64 * params.log_vacancy_weight() + self.b_count() as f64 * params.log_link_weight()
    }

    pub fn sub_components(&self) -> SubComponents {
        let n = self.vertices.len();
        let count =
            |removed| nontrivial_count(n, self.edges.iter().filter(|e| keeps(e.label, e.orientation(), removed)).map(|e| (e.a, e.b)));
        let k_ver = count(Orientation::Horizontal);
        let k_hor = count(Orientation::Vertical);
        SubComponents { k_ver, k_hor, k: k_ver + k_hor }
    }

    /// For every intersecting pair of a vertical and a horizontal
    /// sub-component, the numbers of vacancies and broken links belonging
    /// to both.
    pub fn shared_defects(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let index: HashMap<EdgeId, &DualEdge> = self.edges.iter().map(|e| (e.crossed, e)).collect();
        let sub = |removed| union_of(n, self.edges.iter().filter(|e| keeps(e.label, e.orientation(), removed)).map(|e| (e.a, e.b)));
        let (mut ver, tv) = sub(Orientation::Horizontal);
        let (mut hor, th) = sub(Orientation::Vertical);
        let mut pairs: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for i in (0..n).filter(|&i| tv[i] && th[i]) {
            pairs.insert((ver.find_mut(i), hor.find_mut(i)), (0, 0));
        }
        for v in &self.vacancies {
            let e = index[&crate::lattice::incident_edges(*v)[0]];
            let key = (ver.find_mut(e.a), hor.find_mut(e.a));
            if let Some(c) = pairs.get_mut(&key) {
                c.0 += 1;
            }
        }
        for l in &self.links {
            let e = index[l];
            let key = (ver.find_mut(e.a), hor.find_mut(e.a));
            if let Some(c) = pairs.get_mut(&key) {
                c.1 += 1;
            }
        }
        pairs.into_values().collect()
    }

    /// One line per dual edge: `x1d y1d x2d y2d LABEL`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            let (p, q) = (self.vertices[e.a], self.vertices[e.b]);
            s.push_str(&format!("{} {} {} {} {}\n", p.0, p.1, q.0, q.1, e.label));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressedEdge {
    pub a: usize,
    pub b: usize,
    pub label: Label,
    pub orientation: Orientation,
}

#[derive(Debug, Clone)]
pub struct CompressedGraph {
    pub vertices: Vec<(i64, i64)>,
    pub edges: Vec<CompressedEdge>,
}

impl CompressedGraph {
    pub fn sub_components(&self) -> SubComponents {
        let n = self.vertices.len();
        let count = |removed| nontrivial_count(n, self.edges.iter().filter(|e| keeps(e.label, e.orientation, removed)).map(|e| (e.a, e.b)));
        let k_ver = count(Orientation::Horizontal);
        let k_hor = count(Orientation::Vertical);
        SubComponents { k_ver, k_hor, k: k_ver + k_hor }
    }
}

/// Replace every stick by one `s` edge between its end points.
pub fn compress(g: &ConfigGraph) -> CompressedGraph {
    let mut interior: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut long = Vec::new();
    for s in &g.sticks {
        let point = |p| match s.orientation {
            Orientation::Vertical => (s.axis, p),
            Orientation::Horizontal => (p, s.axis),
        };
        interior.extend((s.start + 2..s.end).step_by(2).map(point));
        long.push((point(s.start), point(s.end), s.orientation));
    }
    let kept: Vec<(i64, i64)> = g.vertices.iter().copied().filter(|p| !interior.contains(p)).collect();
    let index: HashMap<(i64, i64), usize> = kept.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let in_stick: BTreeSet<EdgeId> = g.sticks.iter().flat_map(Stick::edges).collect();
    let mut edges: Vec<CompressedEdge> = g
        .edges
        .iter()
        .filter(|e| !in_stick.contains(&e.crossed))
        .map(|e| CompressedEdge { a: index[&g.vertices[e.a]], b: index[&g.vertices[e.b]], label: e.label, orientation: e.orientation() })
        .collect();
    edges.extend(long.into_iter().map(|(p, q, orientation)| CompressedEdge { a: index[&p], b: index[&q], label: Label::S, orientation }));
    CompressedGraph { vertices: kept, edges }
}

/// Every stick has length at most `m`.
pub fn in_em(cfg: &DimerConfig, m: i64) -> bool {
    analysed_sticks(cfg).iter().all(|s| !s.cyclic && s.len() <= m)
}

/// Every stick longer than `m` lies inside one of the segments.
pub fn in_ema(cfg: &DimerConfig, m: i64, segments: &[Segment]) -> bool {
    analysed_sticks(cfg).iter().filter(|s| s.cyclic || s.len() > m).all(|s| {
        let seg = s.segment();
        segments.iter().any(|a| a.orientation == seg.orientation && a.axis == seg.axis && a.start <= seg.start && seg.end <= a.end)
    })
}

fn analysed_sticks(cfg: &DimerConfig) -> Vec<Stick> {
    let region = if cfg.is_periodic() { *cfg.window() } else { cfg.window().padded(1) };
    sticks(cfg, &region)
}

/// Defect count bound implied by the absence of sticks longer than `m`.
pub fn defect_lower_bound_check(g: &ConfigGraph, m: i64) -> bool {
    let (b, v) = (g.b_count() as i64, g.v_count() as i64);
    (2 * m + 1) * b + (8 * m + 5) * v >= g.lambda_prime.area()
}

/// Upper bound on `k` from the defect counts. Only claimed for
/// configurations with at least one dimer.
pub fn component_bound_holds(g: &ConfigGraph) -> bool {
    let (b, v) = (g.b_count() as f64, g.v_count() as f64);
    let k = g.sub_components().k as f64;
    let bound = if b < 2.0 * v { b / 2.0 + 1.0 } else { 2.0 * v / 3.0 + b / 6.0 + 1.0 };
    k <= bound + 1e-12
}

/// Every intersecting vertical/horizontal sub-component pair shares two
/// broken links and a vacancy, or six broken links.
pub fn defect_chasing_holds(g: &ConfigGraph) -> bool {
    g.shared_defects().iter().all(|&(v, b)| (v >= 1 && b >= 2) || b >= 6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate;

    fn window(w: i64, h: i64) -> Rect {
        Rect::origin(w, h).unwrap()
    }

    fn empty(w: i64, h: i64) -> DimerConfig {
        DimerConfig::empty(window(w, h), BoundaryCondition::Vacant).unwrap()
    }

    #[test]
    fn empty_two_by_two() {
        let c = empty(2, 2);
        let g = build(&c, c.window()).unwrap();
        assert_eq!(g.vertex_count(), 25);
        assert_eq!(g.edges().len(), 40);
        assert!(g.edges().iter().all(|e| e.label == Label::V));
        assert_eq!((g.v_count(), g.b_count()), (16, 0));
        assert_eq!(g.sub_components(), SubComponents { k_ver: 1, k_hor: 1, k: 2 });
        assert_eq!(g.dump().lines().count(), 40);
    }

    #[test]
    fn packed_vertical_four_by_four() {
        let c = DimerConfig::packed_vertical(window(4, 4), BoundaryCondition::Vacant).unwrap();
        let g = build(&c, c.window()).unwrap();
        // four columns of two linked dimers: each column end has a broken
        // link just outside the window
        assert_eq!(g.b_count(), 8);
        assert_eq!(g.v_count(), 20);
        let s = g.sticks();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|s| s.len() == 4 && s.orientation == Orientation::Vertical));
        let comp = compress(&g);
        assert_eq!(comp.vertices.len(), g.vertex_count() - 3 * 3);
        assert_eq!(comp.sub_components(), g.sub_components());
    }

    #[test]
    fn non_vacant_rejected() {
        let c = DimerConfig::empty(window(2, 2), BoundaryCondition::Periodic).unwrap();
        assert!(matches!(build(&c, c.window()), Err(ConfGraphError::NotVacant)));
    }

    #[test]
    fn invariants_on_small_windows() {
        let p = ModelParams::new(1.3, -0.2, 0.7).unwrap();
        for (w, h) in [(2, 2), (4, 2), (2, 4), (3, 3)] {
            for cfg in enumerate(window(w, h), BoundaryCondition::Vacant).unwrap() {
                let g = build(&cfg, cfg.window()).unwrap();
                let lhs = g.log_weight(&p);
                let rhs = 4.0 * p.log_vacancy_weight() + cfg.log_weight(cfg.window(), &p).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "{w}x{h}: {lhs} vs {rhs}");
                assert_eq!(compress(&g).sub_components(), g.sub_components());
                if !cfg.dimers().is_empty() {
                    assert!(component_bound_holds(&g));
                    assert!(defect_chasing_holds(&g));
                }
                for m in [1, 2, 4] {
                    if in_em(&cfg, m) {
                        assert!(defect_lower_bound_check(&g, m));
                    }
                }
            }
        }
    }

    #[test]
    fn em_membership() {
        let c = empty(4, 4);
        assert!(in_em(&c, 1) && in_ema(&c, 1, &[]));
        let mut c = empty(2, 4);
        for x in [0, 1] {
            c.set(EdgeId::vertical(x, 0), true).unwrap();
            c.set(EdgeId::vertical(x, 2), true).unwrap();
        }
        // a stick of length 4 at x = 1/2
        assert!(in_em(&c, 4));
        assert!(!in_em(&c, 3) && !in_ema(&c, 3, &[]));
        let carrier = Segment { orientation: Orientation::Vertical, axis: 1, start: -1, end: 7 };
        assert!(in_ema(&c, 3, &[carrier]));
        assert!(!in_ema(&c, 3, &[Segment { end: 5, ..carrier }]));
    }
}
