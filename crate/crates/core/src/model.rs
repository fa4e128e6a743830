//! Parameters, hard-core configurations, boundary conditions and the
//! shifted Hamiltonian built from vacancy and broken-link potentials.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{incident_edges, EdgeId, LatticeError, Orientation, Rect, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("edge {0} is not a free edge of this configuration")]
    NotFree(EdgeId),
    #[error("hard-core violation at vertex {0}")]
    HardCore(VertexId),
    #[error("{0} is not compatible with the configuration window")]
    IncompatibleWindow(Rect),
    #[error("periodic windows need width and height at least 2, got {0}x{1}")]
    TorusTooSmall(i64, i64),
    #[error("invalid reference pattern: {0}")]
    BadPattern(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub lambda: f64,
    pub a: f64,
}

impl ModelParams {
    pub fn new(beta: f64, lambda: f64, a: f64) -> Result<Self, ModelError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ModelError::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(ModelError::InvalidParams(format!("a must be positive, got {a}")));
        }
        if !lambda.is_finite() {
            return Err(ModelError::InvalidParams(format!("lambda must be finite, got {lambda}")));
        }
        Ok(ModelParams { beta, lambda, a })
    }

    pub fn log_ell0(&self) -> f64 {
        self.beta * (self.lambda + 3.0 * self.a) / 2.0
    }

    /// The mesoscopic length scale, leading order of the 1D correlation length.
    pub fn ell0(&self) -> f64 {
        self.log_ell0().exp()
    }

    pub fn log_vacancy_weight(&self) -> f64 {
        -self.beta * (self.lambda + self.a) / 2.0
    }

    pub fn vacancy_weight(&self) -> f64 {
        self.log_vacancy_weight().exp()
    }

    pub fn log_link_weight(&self) -> f64 {
        -self.beta * self.a / 2.0
    }

    pub fn link_weight(&self) -> f64 {
        self.log_link_weight().exp()
    }

    pub fn nematic_regime(&self) -> bool {
        self.lambda + self.a > 0.0 && self.a > self.lambda / 3.0
    }

    /// Energy of `vacancies` counted vacancy potentials and `links` counted
    /// broken-link potentials.
    pub fn energy_of(&self, vacancies: i64, links: i64) -> f64 {
        vacancies as f64 * (self.lambda + self.a) / 2.0 + links as f64 * self.a / 2.0
    }
}

/// A periodic reference configuration, used as a prescribed boundary
/// condition. Bits are indexed row-major by `(x mod px, y mod py)` of the
/// edge's base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicPattern {
    px: i64,
    py: i64,
    horizontal: Vec<bool>,
    vertical: Vec<bool>,
}

impl PeriodicPattern {
    pub fn new(px: i64, py: i64, horizontal: Vec<bool>, vertical: Vec<bool>) -> Result<Self, ModelError> {
        if !(1..=4).contains(&px) || !(1..=4).contains(&py) {
            return Err(ModelError::BadPattern(format!("periods must be in 1..=4, got {px}x{py}")));
        }
        let n = (px * py) as usize;
        if horizontal.len() != n || vertical.len() != n {
            return Err(ModelError::BadPattern(format!("expected {n} bits per orientation")));
        }
        let p = PeriodicPattern { px, py, horizontal, vertical };
        for x in 0..px {
            for y in 0..py {
                let v = VertexId::new(x, y);
                if incident_edges(v).iter().filter(|e| p.occupied(**e)).count() > 1 {
                    return Err(ModelError::BadPattern(format!("hard-core violation at {v}")));
                }
            }
        }
        Ok(p)
    }

    /// Columns of vertical dimers on edges `(x, 2k)-(x, 2k+1)`.
    pub fn packed_vertical() -> Self {
        PeriodicPattern::new(1, 2, vec![false, false], vec![true, false]).unwrap()
    }

    /// Rows of horizontal dimers on edges `(2k, y)-(2k+1, y)`.
    pub fn packed_horizontal() -> Self {
        PeriodicPattern::new(2, 1, vec![true, false], vec![false, false]).unwrap()
    }

    pub fn occupied(&self, e: EdgeId) -> bool {
        let b = e.base();
        let i = (b.y.rem_euclid(self.py) * self.px + b.x.rem_euclid(self.px)) as usize;
        match e.orientation() {
            Orientation::Horizontal => self.horizontal[i],
            Orientation::Vertical => self.vertical[i],
        }
    }

    fn token(&self) -> String {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        format!("prescribed:{}x{}:{}/{}", self.px, self.py, bits(&self.horizontal), bits(&self.vertical))
    }

    fn parse_token(s: &str) -> Result<Self, String> {
        let rest = s.strip_prefix("prescribed:").ok_or("unknown boundary condition")?;
        let (dims, bits) = rest.split_once(':').ok_or("missing pattern bits")?;
        let (px, py) = dims.split_once('x').ok_or("pattern size must look like PXxPY")?;
        let px: i64 = px.parse().map_err(|_| "bad pattern width")?;
        let py: i64 = py.parse().map_err(|_| "bad pattern height")?;
        let (h, v) = bits.split_once('/').ok_or("pattern bits must look like H/V")?;
        let parse_bits = |t: &str| -> Result<Vec<bool>, String> {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(format!("bad bit {c:?}")),
                })
                .collect()
        };
        PeriodicPattern::new(px, py, parse_bits(h)?, parse_bits(v)?).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// The window is a torus.
    Periodic,
    /// Every edge not contained in the window is empty.
    Vacant,
    /// Edges with midpoint outside the closed window follow the pattern.
    Prescribed(PeriodicPattern),
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Periodic => f.write_str("periodic"),
            BoundaryCondition::Vacant => f.write_str("vacant"),
            BoundaryCondition::Prescribed(p) => f.write_str(&p.token()),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "periodic" => Ok(BoundaryCondition::Periodic),
            "vacant" => Ok(BoundaryCondition::Vacant),
            "packed-vertical" => Ok(BoundaryCondition::Prescribed(PeriodicPattern::packed_vertical())),
            "packed-horizontal" => Ok(BoundaryCondition::Prescribed(PeriodicPattern::packed_horizontal())),
            _ => PeriodicPattern::parse_token(s).map(BoundaryCondition::Prescribed),
        }
    }
}

/// Hard-core edge occupancy on a finite window together with its boundary
/// condition. Storage covers the window padded by one vertex on every side,
/// indexed by the base vertex of each edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimerConfig {
    window: Rect,
    bc: BoundaryCondition,
    occ_h: Vec<bool>,
    occ_v: Vec<bool>,
}

impl DimerConfig {
    pub fn empty(window: Rect, bc: BoundaryCondition) -> Result<Self, ModelError> {
        if bc == BoundaryCondition::Periodic && (window.width() < 2 || window.height() < 2) {
            return Err(ModelError::TorusTooSmall(window.width(), window.height()));
        }
        let n = ((window.width() + 2) * (window.height() + 2)) as usize;
        Ok(DimerConfig { window, bc, occ_h: vec![false; n], occ_v: vec![false; n] })
    }

    /// Fill every free edge that the pattern occupies.
    pub fn from_pattern(window: Rect, bc: BoundaryCondition, pattern: &PeriodicPattern) -> Result<Self, ModelError> {
        let mut cfg = DimerConfig::empty(window, bc)?;
        for e in cfg.free_edges() {
            if pattern.occupied(e) {
                cfg.set(e, true)?;
            }
        }
        Ok(cfg)
    }

    pub fn packed_vertical(window: Rect, bc: BoundaryCondition) -> Result<Self, ModelError> {
        DimerConfig::from_pattern(window, bc, &PeriodicPattern::packed_vertical())
    }

    pub fn packed_horizontal(window: Rect, bc: BoundaryCondition) -> Result<Self, ModelError> {
        DimerConfig::from_pattern(window, bc, &PeriodicPattern::packed_horizontal())
    }

    pub fn window(&self) -> &Rect {
        &self.window
    }

    pub fn bc(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn is_periodic(&self) -> bool {
        self.bc == BoundaryCondition::Periodic
    }

    /// Torus dimensions, if periodic.
    pub fn period(&self) -> Option<(i64, i64)> {
        self.is_periodic().then(|| (self.window.width(), self.window.height()))
    }

    fn slot(&self, v: VertexId) -> Option<usize> {
        let i = v.x - self.window.xmin() + 1;
        let j = v.y - self.window.ymin() + 1;
        let w = self.window.width() + 2;
        let h = self.window.height() + 2;
        (0..w).contains(&i).then_some(())?;
        (0..h).contains(&j).then(|| (j * w + i) as usize)
    }

    pub fn canonical_vertex(&self, v: VertexId) -> VertexId {
        match self.period() {
            Some((w, h)) => VertexId::new(
                self.window.xmin() + (v.x - self.window.xmin()).rem_euclid(w),
                self.window.ymin() + (v.y - self.window.ymin()).rem_euclid(h),
            ),
            None => v,
        }
    }

    /// Periodic representative of `e` inside the window (identity otherwise).
    pub fn canonical_edge(&self, e: EdgeId) -> EdgeId {
        if !self.is_periodic() {
            return e;
        }
        let b = e.base();
        let c = self.canonical_vertex(b);
        e.shifted(c.x - b.x, c.y - b.y)
    }

    pub fn is_free(&self, e: EdgeId) -> bool {
        match &self.bc {
            BoundaryCondition::Periodic => true,
            BoundaryCondition::Vacant => e.endpoints().iter().all(|v| self.window.contains_vertex(*v)),
            BoundaryCondition::Prescribed(_) => self.window.contains_edge(e),
        }
    }

    /// Free edges in lexicographic order of their doubled midpoints; for a
    /// torus, one representative per edge.
    pub fn free_edges(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = match &self.bc {
            BoundaryCondition::Periodic => {
                self.window.vertices().into_iter().flat_map(|v| [EdgeId::horizontal(v.x, v.y), EdgeId::vertical(v.x, v.y)]).collect()
            }
            _ => self.window.padded(1).edges().into_iter().filter(|e| self.is_free(*e)).collect(),
        };
        out.sort();
        out
    }

    fn stored(&self, e: EdgeId) -> bool {
        match self.slot(e.base()) {
            Some(i) => match e.orientation() {
                Orientation::Horizontal => self.occ_h[i],
                Orientation::Vertical => self.occ_v[i],
            },
            None => false,
        }
    }

    pub fn occupied(&self, e: EdgeId) -> bool {
        match &self.bc {
            BoundaryCondition::Periodic => self.stored(self.canonical_edge(e)),
            BoundaryCondition::Vacant => self.is_free(e) && self.stored(e),
            BoundaryCondition::Prescribed(p) => {
                if self.window.contains_edge(e) {
                    self.stored(e)
                } else {
                    p.occupied(e)
                }
            }
        }
    }

    /// Set the occupancy of a free edge without checking the hard-core rule.
    pub fn set(&mut self, e: EdgeId, occupied: bool) -> Result<(), ModelError> {
        let e = self.canonical_edge(e);
        if !self.is_free(e) {
            return Err(ModelError::NotFree(e));
        }
        let i = self.slot(e.base()).ok_or(ModelError::NotFree(e))?;
        match e.orientation() {
            Orientation::Horizontal => self.occ_h[i] = occupied,
            Orientation::Vertical => self.occ_v[i] = occupied,
        }
        Ok(())
    }

    pub fn toggle(&mut self, e: EdgeId) -> Result<(), ModelError> {
        let cur = self.occupied(e);
        self.set(e, !cur)
    }

    /// Occupied free edges, sorted.
    pub fn dimers(&self) -> Vec<EdgeId> {
        self.free_edges().into_iter().filter(|e| self.occupied(*e)).collect()
    }

    pub fn covering_edge(&self, v: VertexId) -> Option<EdgeId> {
        incident_edges(v).into_iter().find(|e| self.occupied(*e))
    }

    pub fn is_covered(&self, v: VertexId) -> bool {
        self.covering_edge(v).is_some()
    }

    /// Whether inserting `e` respects the hard-core rule.
    pub fn can_insert(&self, e: EdgeId) -> bool {
        !self.occupied(e) && e.endpoints().iter().all(|v| !self.is_covered(*v))
    }

    fn checked_vertices(&self) -> Vec<VertexId> {
        match self.bc {
            BoundaryCondition::Periodic => self.window.vertices(),
            _ => self.window.padded(1).vertices(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for v in self.checked_vertices() {
            if incident_edges(v).iter().filter(|e| self.occupied(**e)).count() > 1 {
                return Err(ModelError::HardCore(v));
            }
        }
        Ok(())
    }

    /// Uncovered vertices inside `region`.
    pub fn vacancies(&self, region: &Rect) -> Vec<VertexId> {
        region.vertices().into_iter().filter(|v| !self.is_covered(*v)).collect()
    }

    /// Whether `e` is a broken link: exactly one of its two colinear
    /// neighbours is occupied.
    pub fn is_broken_link(&self, e: EdgeId) -> bool {
        self.occupied(e.colinear(-1)) != self.occupied(e.colinear(1))
    }

    /// Broken links with midpoint in `region`.
    pub fn broken_links(&self, region: &Rect) -> Vec<EdgeId> {
        region.edges().into_iter().filter(|e| self.is_broken_link(*e)).collect()
    }

    fn check_lambda(&self, lambda: &Rect) -> Result<(), ModelError> {
        if self.is_periodic() && lambda != &self.window {
            return Err(ModelError::IncompatibleWindow(*lambda));
        }
        Ok(())
    }

    /// Vertices whose vacancy potential meets `lambda`: for a torus one per
    /// vertex, otherwise every vertex with an incident edge midpoint in the
    /// closed rectangle.
    pub fn vacancy_supports(&self, lambda: &Rect) -> Result<Vec<VertexId>, ModelError> {
        self.check_lambda(lambda)?;
        if self.is_periodic() {
            return Ok(self.window.vertices());
        }
        Ok(lambda.padded(1).vertices().into_iter().filter(|v| incident_edges(*v).iter().any(|e| lambda.contains_edge(*e))).collect())
    }

    /// Centre edges of the broken-link potentials meeting `lambda`.
    pub fn link_supports(&self, lambda: &Rect) -> Result<Vec<EdgeId>, ModelError> {
        self.check_lambda(lambda)?;
        if self.is_periodic() {
            return Ok(self.free_edges());
        }
        Ok(lambda.padded(2).edges().into_iter().filter(|e| (-1..=1).any(|k| lambda.contains_edge(e.colinear(k)))).collect())
    }

    /// Number of firing vacancy and broken-link potentials meeting `lambda`.
    pub fn defect_counts(&self, lambda: &Rect) -> Result<(i64, i64), ModelError> {
        let vac = self.vacancy_supports(lambda)?.into_iter().filter(|v| !self.is_covered(*v)).count();
        let bl = self.link_supports(lambda)?.into_iter().filter(|e| self.is_broken_link(*e)).count();
        Ok((vac as i64, bl as i64))
    }

    pub fn energy(&self, lambda: &Rect, params: &ModelParams) -> Result<f64, ModelError> {
        let (v, b) = self.defect_counts(lambda)?;
        Ok(params.energy_of(v, b))
    }

    pub fn log_weight(&self, lambda: &Rect, params: &ModelParams) -> Result<f64, ModelError> {
        Ok(-params.beta * self.energy(lambda, params)?)
    }

    pub fn weight(&self, lambda: &Rect, params: &ModelParams) -> Result<f64, ModelError> {
        self.log_weight(lambda, params).map(f64::exp)
    }

    /// Energy change from toggling the free edge `e`, evaluated from the
    /// potentials touching `e` only. The toggled configuration must be valid.
    pub fn energy_delta(&self, e: EdgeId, lambda: &Rect, params: &ModelParams) -> Result<f64, ModelError> {
        self.check_lambda(lambda)?;
        let e = self.canonical_edge(e);
        if !self.is_free(e) {
            return Err(ModelError::NotFree(e));
        }
        let inserting = !self.occupied(e);
        if inserting && !self.can_insert(e) {
            let v = e.endpoints().into_iter().find(|v| self.is_covered(*v)).unwrap();
            return Err(ModelError::HardCore(v));
        }
        let after = |f: EdgeId| {
            if self.canonical_edge(f) == e {
                inserting
            } else {
                self.occupied(f)
            }
        };
        let periodic = self.is_periodic();
        let mut dv = 0i64;
        let vertices: BTreeSet<VertexId> = e.endpoints().iter().map(|v| self.canonical_vertex(*v)).collect();
        for v in vertices {
            let counted = periodic || incident_edges(v).iter().any(|f| lambda.contains_edge(*f));
            if counted {
                let before = !self.is_covered(v);
                let now = !incident_edges(v).iter().any(|f| after(*f));
                dv += now as i64 - before as i64;
            }
        }
        let mut db = 0i64;
        let centres: BTreeSet<EdgeId> = [e.colinear(-1), e.colinear(1)].iter().map(|c| self.canonical_edge(*c)).collect();
        for c in centres {
            let counted = periodic || (-1..=1).any(|k| lambda.contains_edge(c.colinear(k)));
            if counted {
                let before = self.is_broken_link(c);
                let now = after(c.colinear(-1)) != after(c.colinear(1));
                db += now as i64 - before as i64;
            }
        }
        Ok(params.energy_of(dv, db))
    }

    /// Text form: header `W H BC`, then one `dx dy` line per occupied free
    /// edge in lexicographic order. Only windows anchored at (-1/2, -1/2).
    pub fn to_text(&self) -> Result<String, ModelError> {
        if self.window.x0d() != -1 || self.window.y0d() != -1 {
            return Err(ModelError::IncompatibleWindow(self.window));
        }
        let mut s = format!("{} {} {}\n", self.window.width(), self.window.height(), self.bc);
        for e in self.dimers() {
            s.push_str(&format!("{} {}\n", e.dx, e.dy));
        }
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let perr = |line: usize, msg: String| ModelError::Parse { line, msg };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| perr(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(perr(1, "header must be `W H BC`".into()));
        }
        let w: i64 = fields[0].parse().map_err(|_| perr(1, format!("bad width {:?}", fields[0])))?;
        let h: i64 = fields[1].parse().map_err(|_| perr(1, format!("bad height {:?}", fields[1])))?;
        let bc: BoundaryCondition = fields[2].parse().map_err(|m| perr(1, m))?;
        let mut cfg = DimerConfig::empty(Rect::origin(w, h)?, bc)?;
        for (i, line) in lines {
            let mut it = line.split_whitespace();
            let mut num = || -> Result<i64, ModelError> {
                it.next().and_then(|t| t.parse().ok()).ok_or_else(|| perr(i + 1, format!("expected `dx dy`, got {line:?}")))
            };
            let (dx, dy) = (num()?, num()?);
            let e = EdgeId::new(dx, dy).map_err(|m| perr(i + 1, m.to_string()))?;
            if cfg.canonical_edge(e) != e {
                return Err(perr(i + 1, format!("edge {e} is not a canonical torus edge")));
            }
            cfg.set(e, true).map_err(|m| perr(i + 1, m.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(beta: f64, lambda: f64, a: f64) -> ModelParams {
        ModelParams::new(beta, lambda, a).unwrap()
    }

    #[test]
    fn params_validation_and_derived_values() {
        assert!(ModelParams::new(0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_err());
        let q = p(2.0, 0.5, 1.0);
        assert!((q.ell0() - (2.0f64 * 3.5 / 2.0).exp()).abs() < 1e-12);
        assert!((q.vacancy_weight() - (-1.5f64).exp()).abs() < 1e-15);
        assert!((q.link_weight() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(q.nematic_regime());
        assert!(!p(1.0, 3.0, 0.5).nematic_regime());
    }

    #[test]
    fn validate_catches_shared_vertex() {
        let mut c = DimerConfig::empty(Rect::origin(4, 4).unwrap(), BoundaryCondition::Vacant).unwrap();
        assert!(c.validate().is_ok());
        c.set(EdgeId::horizontal(0, 0), true).unwrap();
        c.set(EdgeId::vertical(0, 0), true).unwrap();
        assert_eq!(c.validate(), Err(ModelError::HardCore(VertexId::new(0, 0))));
    }

    #[test]
    fn validate_sees_torus_seam() {
        let mut c = DimerConfig::empty(Rect::origin(4, 4).unwrap(), BoundaryCondition::Periodic).unwrap();
        c.set(EdgeId::horizontal(3, 1), true).unwrap();
        c.set(EdgeId::vertical(0, 1), true).unwrap();
        assert!(c.validate().is_err());
        let packed = DimerConfig::packed_vertical(Rect::origin(4, 4).unwrap(), BoundaryCondition::Periodic).unwrap();
        assert!(packed.validate().is_ok());
        assert_eq!(packed.dimers().len(), 8);
    }

    #[test]
    fn validate_against_prescribed_reference() {
        let bc = BoundaryCondition::Prescribed(PeriodicPattern::packed_vertical());
        let mut c = DimerConfig::empty(Rect::origin(2, 2).unwrap(), bc).unwrap();
        // vertex (0,2) is covered by the reference dimer (0,2)-(0,3)
        c.set(EdgeId::vertical(0, 1), true).unwrap();
        assert_eq!(c.validate(), Err(ModelError::HardCore(VertexId::new(0, 2))));
    }

    #[test]
    fn vacancies_and_broken_links() {
        let r = Rect::origin(2, 2).unwrap();
        let c = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
        assert_eq!(c.vacancies(&r).len(), 4);
        assert!(c.broken_links(&r.padded(3)).is_empty());

        let big = Rect::new(-9, -9, 10, 10).unwrap();
        let mut c = DimerConfig::empty(big, BoundaryCondition::Vacant).unwrap();
        c.set(EdgeId::horizontal(0, 0), true).unwrap();
        let links = c.broken_links(&big);
        assert_eq!(links, vec![EdgeId { dx: -1, dy: 0 }, EdgeId { dx: 3, dy: 0 }]);

        let packed = DimerConfig::packed_vertical(Rect::origin(4, 4).unwrap(), BoundaryCondition::Periodic).unwrap();
        assert!(packed.broken_links(&Rect::origin(4, 4).unwrap()).is_empty());
        assert!(packed.vacancies(&Rect::origin(4, 4).unwrap()).is_empty());
    }

    #[test]
    fn packed_segment_has_no_vacancies() {
        let r = Rect::origin(6, 1).unwrap();
        let mut c = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
        for k in 0..3 {
            c.set(EdgeId::horizontal(2 * k, 0), true).unwrap();
        }
        assert!(c.vacancies(&r).is_empty());
    }

    #[test]
    fn empty_two_by_two_has_twelve_vacancy_potentials() {
        let r = Rect::origin(2, 2).unwrap();
        let c = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
        let q = p(1.3, 0.2, 0.7);
        assert_eq!(c.defect_counts(&r).unwrap(), (12, 0));
        assert!((c.energy(&r, &q).unwrap() - 12.0 * (0.2 + 0.7) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn vacancy_supports_match_brute_force() {
        // Oracle: scan a generous box and test the support of every potential directly.
        let r = Rect::new(1, -3, 3, 2).unwrap();
        let c = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
        let got = c.vacancy_supports(&r).unwrap();
        let mut want = Vec::new();
        for y in -10..10 {
            for x in -10..10 {
                let v = VertexId::new(x, y);
                if incident_edges(v).iter().any(|e| r.contains_doubled(e.dx, e.dy)) {
                    want.push(v);
                }
            }
        }
        let mut got_sorted = got.clone();
        got_sorted.sort();
        want.sort();
        assert_eq!(got_sorted, want);
        assert_eq!(want.len() as i64, 3 * 2 + 2 * 3 + 2 * 2);
    }

    #[test]
    fn torus_packed_weight_is_one() {
        let r = Rect::origin(4, 4).unwrap();
        let c = DimerConfig::packed_horizontal(r, BoundaryCondition::Periodic).unwrap();
        assert_eq!(c.energy(&r, &p(2.0, 0.3, 1.0)).unwrap(), 0.0);
        assert_eq!(c.weight(&r, &p(2.0, 0.3, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn insert_into_empty_torus_costs_minus_lambda() {
        let r = Rect::origin(4, 4).unwrap();
        let q = p(1.0, 0.37, 1.0);
        let mut c = DimerConfig::empty(r, BoundaryCondition::Periodic).unwrap();
        let e = EdgeId::vertical(1, 2);
        let d = c.energy_delta(e, &r, &q).unwrap();
        assert!((d + 0.37).abs() < 1e-12);
        c.set(e, true).unwrap();
        assert!((c.energy_delta(e, &r, &q).unwrap() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn deleting_isolated_dimer_is_free_at_zero_lambda() {
        // two vacancies gained and two broken links lost cancel when lambda = 0
        let r = Rect::origin(4, 4).unwrap();
        let q = p(3.0, 0.0, 1.0);
        let mut c = DimerConfig::empty(r, BoundaryCondition::Periodic).unwrap();
        c.set(EdgeId::vertical(0, 0), true).unwrap();
        assert_eq!(c.energy_delta(EdgeId::vertical(0, 0), &r, &q).unwrap(), 0.0);
    }

    #[test]
    fn text_round_trip() {
        let r = Rect::origin(4, 4).unwrap();
        for bc in
            [BoundaryCondition::Periodic, BoundaryCondition::Vacant, BoundaryCondition::Prescribed(PeriodicPattern::packed_vertical())]
        {
            let mut c = DimerConfig::empty(r, bc).unwrap();
            c.set(EdgeId::horizontal(1, 1), true).unwrap();
            c.set(EdgeId::vertical(3, 2), true).unwrap();
            let text = c.to_text().unwrap();
            assert_eq!(DimerConfig::from_text(&text).unwrap(), c);
        }
        assert!(DimerConfig::from_text("4 4 periodic\n0 0\n").is_err());
        assert!(DimerConfig::from_text("4 4 sideways\n").is_err());
    }

    fn random_valid(seed: u64, bc: BoundaryCondition, w: i64, h: i64) -> DimerConfig {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = DimerConfig::empty(Rect::origin(w, h).unwrap(), bc).unwrap();
        let edges = c.free_edges();
        for _ in 0..3 * edges.len() {
            let e = edges[rng.gen_range(0..edges.len())];
            if c.can_insert(e) && rng.gen_bool(0.5) {
                c.set(e, true).unwrap();
            } else if c.occupied(e) && rng.gen_bool(0.3) {
                c.set(e, false).unwrap();
            }
        }
        c
    }

    proptest! {
        #[test]
        fn vacancies_are_complement_of_endpoints(seed in any::<u64>()) {
            let c = random_valid(seed, BoundaryCondition::Vacant, 5, 4);
            let r = *c.window();
            let covered: BTreeSet<VertexId> = c.dimers().iter().flat_map(|e| e.endpoints()).collect();
            let want: Vec<VertexId> = r.vertices().into_iter().filter(|v| !covered.contains(v)).collect();
            prop_assert_eq!(c.vacancies(&r), want);
        }

        #[test]
        fn weight_is_product_of_defect_weights(seed in any::<u64>(), beta in 0.1f64..3.0, lambda in -1.0f64..1.0, a in 0.1f64..2.0) {
            let q = p(beta, lambda, a);
            for bc in [BoundaryCondition::Periodic, BoundaryCondition::Vacant] {
                let c = random_valid(seed, bc, 4, 4);
                let r = *c.window();
                let (v, b) = c.defect_counts(&r).unwrap();
                let prod = q.vacancy_weight().powi(v as i32) * q.link_weight().powi(b as i32);
                let w = c.weight(&r, &q).unwrap();
                prop_assert!(w > 0.0);
                prop_assert!(((w - prod) / prod).abs() < 1e-12);
                prop_assert!(((w - (-beta * c.energy(&r, &q).unwrap()).exp()) / w).abs() < 1e-14);
            }
        }

        #[test]
        fn torus_energy_is_translation_invariant(seed in any::<u64>(), sx in 0i64..4, sy in 0i64..4) {
            let q = p(1.0, 0.3, 0.8);
            let c = random_valid(seed, BoundaryCondition::Periodic, 4, 6);
            let r = *c.window();
            let mut t = DimerConfig::empty(r, BoundaryCondition::Periodic).unwrap();
            for e in c.dimers() {
                t.set(e.shifted(sx, sy), true).unwrap();
            }
            prop_assert!(t.validate().is_ok());
            prop_assert!((t.energy(&r, &q).unwrap() - c.energy(&r, &q).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn energy_is_reflection_invariant(seed in any::<u64>()) {
            let q = p(1.0, -0.2, 1.1);
            let c = random_valid(seed, BoundaryCondition::Vacant, 4, 3);
            let r = *c.window();
            let t = crate::lattice::Isometry::reflect_x((r.x0d() + r.x1d()) / 2);
            let mut m = DimerConfig::empty(r, BoundaryCondition::Vacant).unwrap();
            for e in c.dimers() {
                m.set(t.apply_edge(e), true).unwrap();
            }
            prop_assert!((m.energy(&r, &q).unwrap() - c.energy(&r, &q).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_delta_matches_global_recomputation() {
        use rand::{Rng, SeedableRng};
        let q = p(1.0, 0.41, 0.9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cases: [(BoundaryCondition, i64, i64); 4] = [
            (BoundaryCondition::Periodic, 4, 4),
            (BoundaryCondition::Periodic, 2, 2),
            (BoundaryCondition::Vacant, 4, 3),
            (BoundaryCondition::Prescribed(PeriodicPattern::packed_vertical()), 4, 4),
        ];
        let mut checked = 0;
        for (bc, w, h) in cases {
            let mut c = DimerConfig::empty(Rect::origin(w, h).unwrap(), bc).unwrap();
            let r = *c.window();
            let edges = c.free_edges();
            for _ in 0..25_000 {
                let e = edges[rng.gen_range(0..edges.len())];
                if !(c.occupied(e) || c.can_insert(e)) {
                    continue;
                }
                let before = c.energy(&r, &q).unwrap();
                let d = c.energy_delta(e, &r, &q).unwrap();
                c.toggle(e).unwrap();
                let after = c.energy(&r, &q).unwrap();
                assert!((after - before - d).abs() < 1e-12, "{e} in {:?}", c.bc());
                checked += 1;
            }
        }
        assert!(checked > 20_000);
    }
}
