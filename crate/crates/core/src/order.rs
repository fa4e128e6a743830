//! Sticks, division of rectangles, Ψ grids and their percolation.
//!
//! A dual edge is identified with the primal edge it bisects, so a vertical
//! stick edge is stored as the horizontal [`EdgeId`] it crosses. A stick edge
//! needs both endpoints of that primal edge to be covered by dimers of the
//! stick edge's own orientation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{components, Connectivity, EdgeId, LatticeError, Orientation, Rect, VertexId};
use crate::model::DimerConfig;
use crate::stats::Proportion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderError {
    #[error("margin N must exceed 2, got {0}")]
    BadMargin(i64),
    #[error("rectangle {0} has sides not divisible by {1}")]
    NotDivisible(Rect, i64),
    #[error("grid scales must be positive, got {0}x{1}")]
    BadScale(i64, i64),
    #[error("torus {0}x{1} is not tiled by {2}x{3} grid cells")]
    GridMismatch(i64, i64, i64, i64),
    #[error("escape distance must be at least 1")]
    BadDistance,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Orientation of the dual edge bisecting `e`.
pub fn dual_orientation(e: EdgeId) -> Orientation {
    e.orientation().flip()
}

fn cover_orientation(cfg: &DimerConfig, v: VertexId) -> Option<Orientation> {
    cfg.covering_edge(v).map(EdgeId::orientation)
}

pub fn is_stick_edge(cfg: &DimerConfig, e: EdgeId) -> bool {
    let o = Some(dual_orientation(e));
    e.endpoints().iter().all(|v| cover_orientation(cfg, *v) == o)
}

/// Stick edges whose bisected edge has its midpoint in `region`, sorted. On
/// a torus analysed over its whole window each edge class appears once.
pub fn stick_edges(cfg: &DimerConfig, region: &Rect) -> Vec<EdgeId> {
    let candidates = if cfg.is_periodic() && region == cfg.window() { cfg.free_edges() } else { region.edges() };
    candidates.into_iter().filter(|e| is_stick_edge(cfg, *e)).collect()
}

/// A straight dual segment in doubled coordinates. `axis` is the fixed
/// coordinate, `start..end` the span along the segment; infinite ends use
/// `i64::MIN` / `i64::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub orientation: Orientation,
    pub axis: i64,
    pub start: i64,
    pub end: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Stick {
    pub orientation: Orientation,
    /// Doubled coordinate of the dual line carrying the stick.
    pub axis: i64,
    /// Doubled coordinates of the two dual-vertex ends along the line. A
    /// stick crossing the seam of a torus keeps `start` inside the window
    /// and lets `end` run past it.
    pub start: i64,
    pub end: i64,
    /// The run closes on itself around a torus.
    pub cyclic: bool,
}

impl Stick {
    pub fn len(&self) -> i64 {
        (self.end - self.start) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bisected primal edges in unrolled coordinates.
    pub fn edges(&self) -> Vec<EdgeId> {
        (self.start + 1..self.end)
            .step_by(2)
            .map(|p| match self.orientation {
                Orientation::Vertical => EdgeId::new(self.axis, p),
                Orientation::Horizontal => EdgeId::new(p, self.axis),
            })
            .map(|e| e.expect("stick edges have one odd coordinate"))
            .collect()
    }

    pub fn segment(&self) -> Segment {
        let (start, end) = if self.cyclic { (i64::MIN, i64::MAX) } else { (self.start, self.end) };
        Segment { orientation: self.orientation, axis: self.axis, start, end }
    }

    pub fn translated(&self, x: i64, y: i64) -> Stick {
        let (da, ds) = match self.orientation {
            Orientation::Vertical => (2 * x, 2 * y),
            Orientation::Horizontal => (2 * y, 2 * x),
        };
        Stick { axis: self.axis + da, start: self.start + ds, end: self.end + ds, ..*self }
    }
}

fn line_key(e: EdgeId) -> (Orientation, i64, i64) {
    match dual_orientation(e) {
        Orientation::Vertical => (Orientation::Vertical, e.dx, e.dy),
        Orientation::Horizontal => (Orientation::Horizontal, e.dy, e.dx),
    }
}

/// Maximal runs of stick edges inside `region`. Runs are cut at the region
/// boundary, except that for a periodic configuration analysed over its
/// whole window runs are joined across the seam.
pub fn sticks(cfg: &DimerConfig, region: &Rect) -> Vec<Stick> {
    let mut lines: BTreeMap<(Orientation, i64), Vec<i64>> = BTreeMap::new();
    for e in stick_edges(cfg, region) {
        let (o, axis, pos) = line_key(e);
        lines.entry((o, axis)).or_default().push(pos);
    }
    let wraps = cfg.is_periodic() && region == cfg.window();
    let mut out = Vec::new();
    for ((o, axis), pos) in lines {
        let (lo, hi) = match o {
            Orientation::Vertical => (2 * region.ymin(), 2 * (region.ymin() + region.height() - 1)),
            Orientation::Horizontal => (2 * region.xmin(), 2 * (region.xmin() + region.width() - 1)),
        };
        let period = hi - lo + 2;
        let mut runs: Vec<(i64, i64)> = Vec::new();
        for p in pos {
            match runs.last_mut() {
                Some(r) if r.1 + 2 == p => r.1 = p,
                _ => runs.push((p, p)),
            }
        }
        let stick = |(a, b): (i64, i64), cyclic| Stick { orientation: o, axis, start: a - 1, end: b + 1, cyclic };
        if wraps && runs.len() == 1 && runs[0] == (lo, hi) {
            out.push(stick(runs[0], true));
            continue;
        }
        if wraps && runs.len() > 1 && runs[0].0 == lo && runs.last().unwrap().1 == hi {
            let first = runs.remove(0);
            runs.last_mut().unwrap().1 = first.1 + period;
        }
        out.extend(runs.into_iter().map(|r| stick(r, false)));
    }
    out.sort();
    out
}

/// Number of sticks of each length.
pub fn stick_length_histogram(sticks: &[Stick]) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for s in sticks {
        *h.entry(s.len()).or_insert(0) += 1;
    }
    h
}

/// Whether a vertical and a horizontal stick edge meet at a dual vertex
/// inside `region` (padded by one). Always empty for valid configurations.
pub fn orientation_conflicts(cfg: &DimerConfig, region: &Rect) -> Vec<(EdgeId, EdgeId)> {
    let mut out = Vec::new();
    let r = region.padded(1);
    for p in r.xmin()..r.xmin() + r.width() {
        for q in r.ymin()..r.ymin() + r.height() {
            // dual vertex (p - 1/2, q - 1/2)
            let vert = [EdgeId::horizontal(p - 1, q), EdgeId::horizontal(p - 1, q - 1)];
            let hor = [EdgeId::vertical(p, q - 1), EdgeId::vertical(p - 1, q - 1)];
            for &a in &vert {
                for &b in &hor {
                    if is_stick_edge(cfg, a) && is_stick_edge(cfg, b) {
                        out.push((a, b));
                    }
                }
            }
        }
    }
    out
}

/// Whether the segment divides `r`: it passes strictly between the two
/// sides it runs parallel to and covers the full extent in its direction.
pub fn divides(seg: &Segment, r: &Rect) -> bool {
    match seg.orientation {
        Orientation::Vertical => r.x0d() < seg.axis && seg.axis < r.x1d() && seg.start <= r.y0d() && r.y1d() <= seg.end,
        Orientation::Horizontal => r.y0d() < seg.axis && seg.axis < r.y1d() && seg.start <= r.x0d() && r.x1d() <= seg.end,
    }
}

/// The concentric rectangle with sides scaled by `1 - 2/n`.
pub fn inner_rect(r: &Rect, n: i64) -> Result<Rect, OrderError> {
    if n <= 2 {
        return Err(OrderError::BadMargin(n));
    }
    if r.width() % n != 0 || r.height() % n != 0 {
        return Err(OrderError::NotDivisible(*r, n));
    }
    let (mx, my) = (r.width() / n, r.height() / n);
    Ok(Rect::new(r.x0d() + 2 * mx, r.y0d() + 2 * my, r.width() - 2 * mx, r.height() - 2 * my)?)
}

pub fn properly_divides(stick: &Stick, r: &Rect, n: i64) -> Result<bool, OrderError> {
    let inner = inner_rect(r, n)?;
    let seg = stick.segment();
    Ok(divides(&seg, r) && divides(&seg, &inner))
}

/// The `KN × LN` rectangle attached to grid point `p`.
pub fn grid_rect(p: VertexId, k: i64, l: i64, n: i64) -> Rect {
    Rect::new(2 * p.x * k - 1, 2 * p.y * l - 1, k * n, l * n).expect("positive grid scales")
}

/// A rectangular block of grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDomain {
    pub x0: i64,
    pub y0: i64,
    pub width: i64,
    pub height: i64,
}

impl GridDomain {
    pub fn contains(&self, p: VertexId) -> bool {
        p.x >= self.x0 && p.x < self.x0 + self.width && p.y >= self.y0 && p.y < self.y0 + self.height
    }

    pub fn points(&self) -> impl Iterator<Item = VertexId> + '_ {
        (self.y0..self.y0 + self.height).flat_map(move |y| (self.x0..self.x0 + self.width).map(move |x| VertexId::new(x, y)))
    }

    pub fn area(&self) -> i64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiGrid {
    pub k: i64,
    pub l: i64,
    pub n: i64,
    pub orientation: Orientation,
    pub domain: GridDomain,
    /// The grid repeats with the domain's period (periodic configurations).
    pub periodic: bool,
    pub points: BTreeSet<VertexId>,
}

/// Window origin, size and per-vertex cover orientation of a torus.
type TorusCovers = (i64, i64, i64, i64, Vec<Option<Orientation>>);

/// Vertex cover orientations, precomputed over a torus.
struct Covers<'a> {
    cfg: &'a DimerConfig,
    torus: Option<TorusCovers>,
}

impl<'a> Covers<'a> {
    fn new(cfg: &'a DimerConfig) -> Self {
        let torus = cfg.is_periodic().then(|| {
            let r = cfg.window();
            let cells = r.vertices().into_iter().map(|v| cover_orientation(cfg, v)).collect();
            (r.xmin(), r.ymin(), r.width(), r.height(), cells)
        });
        Covers { cfg, torus }
    }

    fn get(&self, x: i64, y: i64) -> Option<Orientation> {
        match &self.torus {
            Some((x0, y0, w, h, cells)) => cells[((y - y0).rem_euclid(*h) * w + (x - x0).rem_euclid(*w)) as usize],
            None => cover_orientation(self.cfg, VertexId::new(x, y)),
        }
    }

    /// Stick edge on dual line `line` at position `pos` along it.
    fn stick(&self, o: Orientation, line: i64, pos: i64) -> bool {
        match o {
            Orientation::Vertical => {
                self.get(line - 1, pos) == Some(Orientation::Vertical) && self.get(line, pos) == Some(Orientation::Vertical)
            }
            Orientation::Horizontal => {
                self.get(pos, line - 1) == Some(Orientation::Horizontal) && self.get(pos, line) == Some(Orientation::Horizontal)
            }
        }
    }
}

/// Grid points whose `KN × LN` rectangle is properly divided by a stick of
/// the given orientation. On a torus the grid covers one period (requires
/// `K | W` and `L | H`); otherwise it covers the points whose rectangle lies
/// inside the window.
pub fn psi_grid(cfg: &DimerConfig, k: i64, l: i64, n: i64, orientation: Orientation) -> Result<PsiGrid, OrderError> {
    if k < 1 || l < 1 {
        return Err(OrderError::BadScale(k, l));
    }
    if n <= 2 {
        return Err(OrderError::BadMargin(n));
    }
    let w = cfg.window();
    let domain = if cfg.is_periodic() {
        if w.width() % k != 0 || w.height() % l != 0 {
            return Err(OrderError::GridMismatch(w.width(), w.height(), k, l));
        }
        GridDomain { x0: 0, y0: 0, width: w.width() / k, height: w.height() / l }
    } else {
        let (xmax, ymax) = (w.xmin() + w.width() - 1, w.ymin() + w.height() - 1);
        let x0 = w.xmin().div_euclid(k) + (w.xmin().rem_euclid(k) != 0) as i64;
        let y0 = w.ymin().div_euclid(l) + (w.ymin().rem_euclid(l) != 0) as i64;
        let x1 = (xmax - k * n + 1).div_euclid(k);
        let y1 = (ymax - l * n + 1).div_euclid(l);
        GridDomain { x0, y0, width: (x1 - x0 + 1).max(0), height: (y1 - y0 + 1).max(0) }
    };
    let covers = Covers::new(cfg);
    // (scale across the line, scale along it, grid coordinate across, along)
    let divided = |p: VertexId| -> bool {
        let (ka, la, xa, ya) = match orientation {
            Orientation::Vertical => (k, l, p.x, p.y),
            Orientation::Horizontal => (l, k, p.y, p.x),
        };
        (xa * ka + ka + 1..=xa * ka + ka * n - ka - 1)
            .any(|line| (ya * la..ya * la + la * n).all(|pos| covers.stick(orientation, line, pos)))
    };
    let points = domain.points().filter(|p| divided(*p)).collect();
    Ok(PsiGrid { k, l, n, orientation, domain, periodic: cfg.is_periodic(), points })
}

/// Box-adjacent pairs `(p, q)` with `p` in `ver` and `q` in `hor`, with
/// wraparound when `period` is given.
pub fn psi_adjacency_violations(
    ver: &BTreeSet<VertexId>,
    hor: &BTreeSet<VertexId>,
    period: Option<(i64, i64)>,
) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for p in ver {
        for &(sx, sy) in Connectivity::Box.steps() {
            let mut q = VertexId::new(p.x + sx, p.y + sy);
            if let Some((w, h)) = period {
                q = VertexId::new(q.x.rem_euclid(w), q.y.rem_euclid(h));
            }
            if hor.contains(&q) {
                out.push((*p, q));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationReport {
    /// Box-component sizes, largest first.
    pub component_sizes: Vec<usize>,
    pub spans_horizontally: bool,
    pub spans_vertically: bool,
    pub largest_fraction: f64,
}

/// Box-components of the points inside `domain` (no wraparound). A
/// component spans horizontally when it touches both the left and right
/// columns of the domain.
pub fn percolation_report(points: &BTreeSet<VertexId>, domain: &GridDomain) -> PercolationReport {
    let inside: Vec<VertexId> = points.iter().copied().filter(|p| domain.contains(*p)).collect();
    let comps = components(&inside, Connectivity::Box);
    let (x1, y1) = (domain.x0 + domain.width - 1, domain.y0 + domain.height - 1);
    let spans = |c: &Vec<VertexId>, horizontal: bool| {
        if horizontal {
            c.iter().any(|p| p.x == domain.x0) && c.iter().any(|p| p.x == x1)
        } else {
            c.iter().any(|p| p.y == domain.y0) && c.iter().any(|p| p.y == y1)
        }
    };
    let mut component_sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let largest = component_sizes.first().copied().unwrap_or(0);
    PercolationReport {
        spans_horizontally: comps.iter().any(|c| spans(c, true)),
        spans_vertically: comps.iter().any(|c| spans(c, false)),
        largest_fraction: if domain.area() > 0 { largest as f64 / domain.area() as f64 } else { 0.0 },
        component_sizes,
    }
}

/// Whether a Boxtimes path avoiding `set` leads from `u` to sup-distance
/// `d` from `u`. A path cannot start on a point of the set.
pub fn escapes(set: &BTreeSet<VertexId>, u: VertexId, d: i64) -> bool {
    if set.contains(&u) {
        return false;
    }
    let mut seen = BTreeSet::from([u]);
    let mut queue = VecDeque::from([u]);
    while let Some(p) = queue.pop_front() {
        if (p.x - u.x).abs().max((p.y - u.y).abs()) >= d {
            return true;
        }
        for &(sx, sy) in Connectivity::Boxtimes.steps() {
            let q = VertexId::new(p.x + sx, p.y + sy);
            if !set.contains(&q) && seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
    false
}

/// Fraction of samples in which the complement lets `u` escape to
/// distance `d`.
pub fn escape_probability(samples: &[BTreeSet<VertexId>], u: VertexId, d: i64) -> Result<Proportion, OrderError> {
    if d < 1 {
        return Err(OrderError::BadDistance);
    }
    let k = samples.iter().filter(|s| escapes(s, u, d)).count() as u64;
    Ok(Proportion::new(k, samples.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate;
    use crate::model::BoundaryCondition;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vacant(w: i64, h: i64) -> DimerConfig {
        DimerConfig::empty(Rect::origin(w, h).unwrap(), BoundaryCondition::Vacant).unwrap()
    }

    fn torus(w: i64, h: i64) -> DimerConfig {
        DimerConfig::empty(Rect::origin(w, h).unwrap(), BoundaryCondition::Periodic).unwrap()
    }

    fn two_columns(rows: i64) -> DimerConfig {
        let mut c = vacant(4, rows + 2);
        for x in [1, 2] {
            for j in (0..rows).step_by(2) {
                c.set(EdgeId::vertical(x, j), true).unwrap();
            }
        }
        c
    }

    #[test]
    fn empty_has_no_sticks() {
        let c = vacant(4, 4);
        assert!(stick_edges(&c, c.window()).is_empty());
        assert!(sticks(&c, c.window()).is_empty());
        for o in [Orientation::Vertical, Orientation::Horizontal] {
            assert!(psi_grid(&torus(8, 8), 1, 1, 4, o).unwrap().points.is_empty());
        }
    }

    #[test]
    fn packed_column_pair_gives_one_stick() {
        let c = two_columns(6);
        let edges = stick_edges(&c, c.window());
        let expect: Vec<EdgeId> = (0..6).map(|j| EdgeId::horizontal(1, j)).collect();
        assert_eq!(edges, expect);
        let s = sticks(&c, c.window());
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), 6);
        assert_eq!((s[0].axis, s[0].start, s[0].end), (3, -1, 11));
        assert_eq!(s[0].edges(), expect);
    }

    #[test]
    fn gap_splits_a_stick() {
        let mut c = two_columns(6);
        c.set(EdgeId::vertical(2, 2), false).unwrap();
        let s = sticks(&c, c.window());
        let lens: Vec<i64> = s.iter().map(Stick::len).collect();
        assert_eq!(lens, vec![2, 2]);
    }

    #[test]
    fn division_excludes_the_boundary() {
        let r = Rect::new(-1, -1, 8, 8).unwrap();
        let seg = |axis| Segment { orientation: Orientation::Vertical, axis, start: -1, end: 15 };
        assert!(divides(&seg(7), &r));
        assert!(!divides(&seg(-1), &r));
        assert!(!divides(&seg(15), &r));
        // covers R but stops inside the inner rectangle's vertical span
        let short = Stick { orientation: Orientation::Vertical, axis: 7, start: -1, end: 15, cyclic: false };
        assert!(properly_divides(&short, &r, 4).unwrap());
        let off = Stick { axis: 1, ..short };
        assert!(divides(&off.segment(), &r));
        assert!(!properly_divides(&off, &r, 4).unwrap());
        assert!(matches!(properly_divides(&short, &Rect::new(-1, -1, 6, 8).unwrap(), 4), Err(OrderError::NotDivisible(..))));
    }

    #[test]
    fn packed_double_column_properly_divides_eight_square() {
        let mut c = vacant(8, 8);
        for x in [3, 4] {
            for j in (0..8).step_by(2) {
                c.set(EdgeId::vertical(x, j), true).unwrap();
            }
        }
        let s = sticks(&c, c.window());
        assert_eq!(s.len(), 1);
        assert!(properly_divides(&s[0], &Rect::origin(8, 8).unwrap(), 4).unwrap());
    }

    #[test]
    fn packed_torus_grids() {
        let r = Rect::origin(8, 8).unwrap();
        let c = DimerConfig::packed_vertical(r, BoundaryCondition::Periodic).unwrap();
        for (k, l) in [(1, 1), (2, 2), (1, 2)] {
            let v = psi_grid(&c, k, l, 4, Orientation::Vertical).unwrap();
            assert_eq!(v.points.len() as i64, v.domain.area());
            assert!(psi_grid(&c, k, l, 4, Orientation::Horizontal).unwrap().points.is_empty());
            let rep = percolation_report(&v.points, &v.domain);
            assert_eq!(rep.component_sizes.len(), 1);
            assert!(rep.spans_horizontally && rep.spans_vertically);
            assert_eq!(rep.largest_fraction, 1.0);
        }
        assert!(sticks(&c, c.window()).iter().all(|s| s.cyclic));
        assert!(matches!(psi_grid(&c, 3, 1, 4, Orientation::Vertical), Err(OrderError::GridMismatch(..))));
    }

    /// Ψ recomputed from `sticks` and `properly_divides`, trying every
    /// periodic image of each stick.
    fn psi_via_sticks(cfg: &DimerConfig, k: i64, l: i64, n: i64, o: Orientation) -> BTreeSet<VertexId> {
        let grid = psi_grid(cfg, k, l, n, o).unwrap();
        let all = sticks(cfg, cfg.window());
        let (w, h) = cfg.period().unwrap_or((0, 0));
        let shifts: Vec<(i64, i64)> =
            if grid.periodic { (-3..=3).flat_map(|a| (-3..=3).map(move |b| (a * w, b * h))).collect() } else { vec![(0, 0)] };
        grid.domain
            .points()
            .filter(|p| {
                let r = grid_rect(*p, k, l, n);
                all.iter()
                    .filter(|s| s.orientation == o)
                    .any(|s| shifts.iter().any(|&(a, b)| properly_divides(&s.translated(a, b), &r, n).unwrap()))
            })
            .collect()
    }

    #[test]
    fn psi_matches_stick_route_on_enumerated_windows() {
        for (w, h, bc) in [(4, 4, BoundaryCondition::Periodic), (4, 4, BoundaryCondition::Vacant), (3, 4, BoundaryCondition::Vacant)] {
            let r = Rect::origin(w, h).unwrap();
            for cfg in enumerate(r, bc.clone()).unwrap() {
                for o in [Orientation::Vertical, Orientation::Horizontal] {
                    let direct = psi_grid(&cfg, 1, 1, 3, o).unwrap();
                    assert_eq!(direct.points, psi_via_sticks(&cfg, 1, 1, 3, o));
                }
                assert!(orientation_conflicts(&cfg, cfg.window()).is_empty());
            }
        }
    }

    fn random_torus(rng: &mut ChaCha8Rng, w: i64, h: i64, tries: usize) -> DimerConfig {
        let mut c = torus(w, h);
        for _ in 0..tries {
            let (x, y) = (rng.gen_range(0..w), rng.gen_range(0..h));
            let e = if rng.gen::<bool>() { EdgeId::horizontal(x, y) } else { EdgeId::vertical(x, y) };
            if c.can_insert(e) {
                c.set(e, true).unwrap();
            }
        }
        c
    }

    #[test]
    fn psi_matches_stick_route_on_random_tori() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let c = random_torus(&mut rng, 8, 8, 80);
            for (k, l) in [(1, 1), (2, 1), (1, 2)] {
                for o in [Orientation::Vertical, Orientation::Horizontal] {
                    assert_eq!(psi_grid(&c, k, l, 4, o).unwrap().points, psi_via_sticks(&c, k, l, 4, o));
                }
            }
            let ver = psi_grid(&c, 1, 1, 4, Orientation::Vertical).unwrap();
            let hor = psi_grid(&c, 1, 1, 4, Orientation::Horizontal).unwrap();
            assert!(psi_adjacency_violations(&ver.points, &hor.points, Some((8, 8))).is_empty());
        }
    }

    #[test]
    fn seam_crossing_stick_is_joined() {
        let mut c = torus(4, 8);
        for x in [0, 1] {
            c.set(EdgeId::vertical(x, 6), true).unwrap();
            c.set(EdgeId::vertical(x, 0), true).unwrap();
        }
        let s = sticks(&c, c.window());
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].start, s[0].end, s[0].cyclic), (11, 19, false));
        assert_eq!(s[0].len(), 4);
    }

    fn flood_largest(points: &BTreeSet<VertexId>, domain: &GridDomain) -> usize {
        let mut seen = BTreeSet::new();
        let mut best = 0;
        for &p in points.iter().filter(|p| domain.contains(**p)) {
            if !seen.insert(p) {
                continue;
            }
            let mut stack = vec![p];
            let mut size = 0;
            while let Some(q) = stack.pop() {
                size += 1;
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let r = VertexId::new(q.x + dx, q.y + dy);
                    if points.contains(&r) && domain.contains(r) && seen.insert(r) {
                        stack.push(r);
                    }
                }
            }
            best = best.max(size);
        }
        best
    }

    #[test]
    fn percolation_largest_fraction_matches_flood_fill() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let domain = GridDomain { x0: 0, y0: 0, width: 30, height: 20 };
        for density in [0.1, 0.5, 0.7] {
            for _ in 0..20 {
                let pts: BTreeSet<VertexId> = domain.points().filter(|_| rng.gen::<f64>() < density).collect();
                let rep = percolation_report(&pts, &domain);
                assert_eq!(rep.largest_fraction, flood_largest(&pts, &domain) as f64 / 600.0);
                assert_eq!(rep.component_sizes.iter().sum::<usize>(), pts.len());
            }
        }
        let rep = percolation_report(&BTreeSet::new(), &domain);
        assert!(rep.component_sizes.is_empty() && !rep.spans_horizontally);
    }

    /// Depth-first search over the whole sup-ball, independent of `escapes`.
    fn escapes_dfs(set: &BTreeSet<VertexId>, u: VertexId, d: i64) -> bool {
        fn go(set: &BTreeSet<VertexId>, u: VertexId, p: VertexId, d: i64, seen: &mut BTreeSet<VertexId>) -> bool {
            if set.contains(&p) || !seen.insert(p) {
                return false;
            }
            if (p.x - u.x).abs() == d || (p.y - u.y).abs() == d {
                return true;
            }
            (-1..=1).flat_map(|a| (-1..=1).map(move |b| (a, b))).any(|(a, b)| go(set, u, VertexId::new(p.x + a, p.y + b), d, seen))
        }
        go(set, u, u, d, &mut BTreeSet::new())
    }

    #[test]
    fn escape_matches_path_search_oracle() {
        let u = VertexId::new(0, 0);
        let d = 5;
        let ball = GridDomain { x0: -d, y0: -d, width: 2 * d + 1, height: 2 * d + 1 };
        let full: BTreeSet<VertexId> = ball.points().collect();
        assert_eq!(escape_probability(&[full], u, d).unwrap().estimate, 0.0);
        assert_eq!(escape_probability(&[BTreeSet::new()], u, d).unwrap().estimate, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for p in [0.3, 0.5, 0.6] {
            let samples: Vec<BTreeSet<VertexId>> = (0..300).map(|_| ball.points().filter(|_| rng.gen::<f64>() < p).collect()).collect();
            let est = escape_probability(&samples, u, d).unwrap();
            let oracle = samples.iter().filter(|s| escapes_dfs(s, u, d)).count() as u64;
            assert_eq!(est.successes, oracle);
            assert!(est.lower <= est.estimate && est.estimate <= est.upper);
        }
        assert!(escape_probability(&[], u, 0).is_err());
    }

    proptest! {
        #[test]
        fn proper_division_implies_division(axis in -20i64..20, s in -20i64..0, len in 1i64..30, x in -3i64..3, y in -3i64..3) {
            let st = Stick { orientation: Orientation::Vertical, axis: 2 * axis + 1, start: 2 * s + 1, end: 2 * (s + len) + 1, cyclic: false };
            let r = Rect::new(2 * x - 1, 2 * y - 1, 8, 8).unwrap();
            if properly_divides(&st, &r, 4).unwrap() {
                prop_assert!(divides(&st.segment(), &r));
                prop_assert!(divides(&st.segment(), &inner_rect(&r, 4).unwrap()));
            }
        }

        #[test]
        fn sticks_partition_stick_edges(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_torus(&mut rng, 6, 6, 60);
            let mut from_sticks: Vec<EdgeId> = sticks(&c, c.window())
                .iter()
                .flat_map(|s| s.edges())
                .map(|e| c.canonical_edge(e))
                .collect();
            from_sticks.sort();
            let n = from_sticks.len();
            from_sticks.dedup();
            prop_assert_eq!(n, from_sticks.len());
            prop_assert_eq!(from_sticks, stick_edges(&c, c.window()));
            prop_assert!(orientation_conflicts(&c, c.window()).is_empty());
        }
    }
}
