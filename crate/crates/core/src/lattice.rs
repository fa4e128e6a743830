//! Square-lattice geometry in doubled integer coordinates.
//!
//! Every point with integer or half-integer coordinates is stored as twice its
//! value, so vertices have two even coordinates, edge midpoints exactly one odd
//! coordinate and dual vertices (rectangle corners) two odd coordinates.

use std::collections::HashMap;
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("doubled coordinates ({0}, {1}) are not an edge midpoint")]
    NotAnEdge(i64, i64),
    #[error("rectangle corner ({0}, {1}) is not a dual vertex")]
    NotADualCorner(i64, i64),
    #[error("rectangle must have positive width and height, got {0}x{1}")]
    EmptyRect(i64, i64),
    #[error("{inner} is not a block of {outer}")]
    NotABlock { inner: Rect, outer: Rect },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub x: i64,
    pub y: i64,
}

impl VertexId {
    pub const fn new(x: i64, y: i64) -> Self {
        VertexId { x, y }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An edge of Z², identified by its doubled midpoint. Ordering is
/// lexicographic on `(dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub dx: i64,
    pub dy: i64,
}

impl EdgeId {
    pub fn new(dx: i64, dy: i64) -> Result<Self, LatticeError> {
        if (dx.rem_euclid(2) + dy.rem_euclid(2)) == 1 {
            Ok(EdgeId { dx, dy })
        } else {
            Err(LatticeError::NotAnEdge(dx, dy))
        }
    }

    /// The horizontal edge from `(x, y)` to `(x + 1, y)`.
    pub const fn horizontal(x: i64, y: i64) -> Self {
        EdgeId { dx: 2 * x + 1, dy: 2 * y }
    }

    /// The vertical edge from `(x, y)` to `(x, y + 1)`.
    pub const fn vertical(x: i64, y: i64) -> Self {
        EdgeId { dx: 2 * x, dy: 2 * y + 1 }
    }

    pub fn orientation(self) -> Orientation {
        if self.dx.rem_euclid(2) == 1 {
            Orientation::Horizontal
        } else {
            Orientation::Vertical
        }
    }

    pub fn is_horizontal(self) -> bool {
        self.orientation() == Orientation::Horizontal
    }

    /// Left (horizontal) or bottom (vertical) endpoint.
    pub fn base(self) -> VertexId {
        VertexId::new(self.dx.div_euclid(2), self.dy.div_euclid(2))
    }

    pub fn endpoints(self) -> [VertexId; 2] {
        let b = self.base();
        match self.orientation() {
            Orientation::Horizontal => [b, VertexId::new(b.x + 1, b.y)],
            Orientation::Vertical => [b, VertexId::new(b.x, b.y + 1)],
        }
    }

    /// Shift along the edge's own axis by `k` edges.
    pub fn colinear(self, k: i64) -> EdgeId {
        match self.orientation() {
            Orientation::Horizontal => EdgeId { dx: self.dx + 2 * k, dy: self.dy },
            Orientation::Vertical => EdgeId { dx: self.dx, dy: self.dy + 2 * k },
        }
    }

    pub fn shifted(self, x: i64, y: i64) -> EdgeId {
        EdgeId { dx: self.dx + 2 * x, dy: self.dy + 2 * y }
    }

    pub fn shares_vertex(self, other: EdgeId) -> bool {
        let [a, b] = self.endpoints();
        let [c, d] = other.endpoints();
        self != other && (a == c || a == d || b == c || b == d)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", self.dx, self.dy)
    }
}

/// Edges at `v` in the order east, north, west, south.
pub fn incident_edges(v: VertexId) -> [EdgeId; 4] {
    [EdgeId::horizontal(v.x, v.y), EdgeId::vertical(v.x, v.y), EdgeId::horizontal(v.x - 1, v.y), EdgeId::vertical(v.x, v.y - 1)]
}

/// Neighbours of `e` in the line graph augmented by colinear pairs at
/// distance two.
pub fn ddag_neighbors(e: EdgeId) -> [EdgeId; 8] {
    let (dx, dy) = (e.dx, e.dy);
    match e.orientation() {
        Orientation::Horizontal => [
            EdgeId { dx: dx - 4, dy },
            EdgeId { dx: dx - 2, dy },
            EdgeId { dx: dx - 1, dy: dy - 1 },
            EdgeId { dx: dx - 1, dy: dy + 1 },
            EdgeId { dx: dx + 1, dy: dy - 1 },
            EdgeId { dx: dx + 1, dy: dy + 1 },
            EdgeId { dx: dx + 2, dy },
            EdgeId { dx: dx + 4, dy },
        ],
        Orientation::Vertical => [
            EdgeId { dx: dx - 1, dy: dy - 1 },
            EdgeId { dx: dx - 1, dy: dy + 1 },
            EdgeId { dx, dy: dy - 4 },
            EdgeId { dx, dy: dy - 2 },
            EdgeId { dx, dy: dy + 2 },
            EdgeId { dx, dy: dy + 4 },
            EdgeId { dx: dx + 1, dy: dy - 1 },
            EdgeId { dx: dx + 1, dy: dy + 1 },
        ],
    }
}

/// Plain line-graph neighbours (edges sharing a vertex).
pub fn line_neighbors(e: EdgeId) -> [EdgeId; 6] {
    let n = ddag_neighbors(e);
    match e.orientation() {
        Orientation::Horizontal => [n[1], n[2], n[3], n[4], n[5], n[6]],
        Orientation::Vertical => [n[0], n[1], n[3], n[4], n[6], n[7]],
    }
}

/// Closed axis-parallel rectangle with corners on the dual lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    x0d: i64,
    y0d: i64,
    width: i64,
    height: i64,
}

impl Rect {
    pub fn new(x0d: i64, y0d: i64, width: i64, height: i64) -> Result<Self, LatticeError> {
        if x0d.rem_euclid(2) != 1 || y0d.rem_euclid(2) != 1 {
            return Err(LatticeError::NotADualCorner(x0d, y0d));
        }
        if width < 1 || height < 1 {
            return Err(LatticeError::EmptyRect(width, height));
        }
        Ok(Rect { x0d, y0d, width, height })
    }

    /// `R_{K×L}`: the K×L rectangle whose lower-left corner is (-1/2, -1/2).
    pub fn origin(width: i64, height: i64) -> Result<Self, LatticeError> {
        Rect::new(-1, -1, width, height)
    }

    /// The rectangle whose lower-left vertex inside is `v`.
    pub fn at_vertex(v: VertexId, width: i64, height: i64) -> Result<Self, LatticeError> {
        Rect::new(2 * v.x - 1, 2 * v.y - 1, width, height)
    }

    pub fn x0d(&self) -> i64 {
        self.x0d
    }
    pub fn y0d(&self) -> i64 {
        self.y0d
    }
    pub fn x1d(&self) -> i64 {
        self.x0d + 2 * self.width
    }
    pub fn y1d(&self) -> i64 {
        self.y0d + 2 * self.height
    }
    pub fn width(&self) -> i64 {
        self.width
    }
    pub fn height(&self) -> i64 {
        self.height
    }
    pub fn area(&self) -> i64 {
        self.width * self.height
    }

    /// First vertex column/row strictly inside.
    pub fn xmin(&self) -> i64 {
        (self.x0d + 1) / 2
    }
    pub fn ymin(&self) -> i64 {
        (self.y0d + 1) / 2
    }

    pub fn contains_doubled(&self, xd: i64, yd: i64) -> bool {
        self.x0d <= xd && xd <= self.x1d() && self.y0d <= yd && yd <= self.y1d()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.contains_doubled(2 * v.x, 2 * v.y)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.contains_doubled(e.dx, e.dy)
    }

    /// Vertices inside, row-major from the bottom row.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.area() as usize);
        for y in self.ymin()..self.ymin() + self.height {
            for x in self.xmin()..self.xmin() + self.width {
                out.push(VertexId::new(x, y));
            }
        }
        out
    }

    /// Every edge whose midpoint lies in the closed rectangle, sorted.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for dx in self.x0d..=self.x1d() {
            for dy in self.y0d..=self.y1d() {
                if (dx + dy).rem_euclid(2) == 1 {
                    out.push(EdgeId { dx, dy });
                }
            }
        }
        out
    }

    /// Grow by `m` on every side.
    pub fn padded(&self, m: i64) -> Rect {
        Rect { x0d: self.x0d - 2 * m, y0d: self.y0d - 2 * m, width: self.width + 2 * m, height: self.height + 2 * m }
    }

    pub fn translated(&self, x: i64, y: i64) -> Rect {
        Rect { x0d: self.x0d + 2 * x, y0d: self.y0d + 2 * y, ..*self }
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x0d <= other.x1d() && other.x0d <= self.x1d() && self.y0d <= other.y1d() && other.y0d <= self.y1d()
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} rectangle at ({}/2, {}/2)", self.width, self.height, self.x0d, self.y0d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Nearest neighbours in the 1-norm.
    Box,
    /// Nearest neighbours in the sup-norm.
    Boxtimes,
}

impl Connectivity {
    pub fn steps(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Box => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            Connectivity::Boxtimes => &[(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)],
        }
    }
}

/// Connected components of a finite point set. Each component is sorted and
/// components are ordered by their smallest point.
pub fn components(points: &[VertexId], connectivity: Connectivity) -> Vec<Vec<VertexId>> {
    let mut pts: Vec<VertexId> = points.to_vec();
    pts.sort();
    pts.dedup();
    let index: HashMap<VertexId, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut uf = UnionFind::<usize>::new(pts.len());
    for (i, p) in pts.iter().enumerate() {
        for &(sx, sy) in connectivity.steps() {
            if let Some(&j) = index.get(&VertexId::new(p.x + sx, p.y + sy)) {
                uf.union(i, j);
            }
        }
    }
    group_by_root(&pts, &mut uf)
}

pub(crate) fn group_by_root<T: Copy + Ord>(items: &[T], uf: &mut UnionFind<usize>) -> Vec<Vec<T>> {
    let mut groups: HashMap<usize, Vec<T>> = HashMap::new();
    for (i, item) in items.iter().enumerate() {
        groups.entry(uf.find_mut(i)).or_default().push(*item);
    }
    let mut out: Vec<Vec<T>> = groups.into_values().collect();
    for g in &mut out {
        g.sort();
    }
    out.sort();
    out
}

/// Affine map `(xd, yd) -> (sx*xd + tx, sy*yd + ty)` on doubled coordinates.
/// Translations are even so the integer lattice maps to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub sx: i64,
    pub tx: i64,
    pub sy: i64,
    pub ty: i64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { sx: 1, tx: 0, sy: 1, ty: 0 };

    pub fn translation(x: i64, y: i64) -> Isometry {
        Isometry { sx: 1, tx: 2 * x, sy: 1, ty: 2 * y }
    }

    /// Reflection across the vertical line with doubled abscissa `axis_d`.
    pub fn reflect_x(axis_d: i64) -> Isometry {
        Isometry { sx: -1, tx: 2 * axis_d, sy: 1, ty: 0 }
    }

    /// Reflection across the horizontal line with doubled ordinate `axis_d`.
    pub fn reflect_y(axis_d: i64) -> Isometry {
        Isometry { sx: 1, tx: 0, sy: -1, ty: 2 * axis_d }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { sx: self.sx * other.sx, tx: self.sx * other.tx + self.tx, sy: self.sy * other.sy, ty: self.sy * other.ty + self.ty }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { sx: self.sx, tx: -self.sx * self.tx, sy: self.sy, ty: -self.sy * self.ty }
    }

    pub fn apply_doubled(&self, xd: i64, yd: i64) -> (i64, i64) {
        (self.sx * xd + self.tx, self.sy * yd + self.ty)
    }

    pub fn apply_edge(&self, e: EdgeId) -> EdgeId {
        let (dx, dy) = self.apply_doubled(e.dx, e.dy);
        EdgeId { dx, dy }
    }

    pub fn apply_vertex(&self, v: VertexId) -> VertexId {
        let (xd, yd) = self.apply_doubled(2 * v.x, 2 * v.y);
        VertexId::new(xd / 2, yd / 2)
    }

    pub fn apply_rect(&self, r: &Rect) -> Rect {
        let (ax, ay) = self.apply_doubled(r.x0d, r.y0d);
        let (bx, by) = self.apply_doubled(r.x1d(), r.y1d());
        Rect { x0d: ax.min(bx), y0d: ay.min(by), width: r.width, height: r.height }
    }
}

/// The reflection group of `r` acting on the torus `lambda`: one isometry per
/// grid translate of `r`, obtained by reflecting across successive grid lines.
pub fn block_transforms(r: &Rect, lambda: &Rect) -> Result<Vec<Isometry>, LatticeError> {
    let (k, l) = (r.width, r.height);
    if lambda.width % (2 * k) != 0 || lambda.height % (2 * l) != 0 {
        return Err(LatticeError::NotABlock { inner: *r, outer: *lambda });
    }
    let axis_map = |m: i64, origin_d: i64, size: i64| -> (i64, i64) {
        if m % 2 == 0 {
            (1, 2 * m * size)
        } else {
            (-1, 2 * origin_d + 2 * (m + 1) * size)
        }
    };
    let mut out = Vec::with_capacity(((lambda.width / k) * (lambda.height / l)) as usize);
    for m in 0..lambda.width / k {
        for n in 0..lambda.height / l {
            let (sx, tx) = axis_map(m, r.x0d, k);
            let (sy, ty) = axis_map(n, r.y0d, l);
            out.push(Isometry { sx, tx, sy, ty });
        }
    }
    Ok(out)
}
