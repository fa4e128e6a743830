use std::collections::{BTreeSet, HashMap};

use dimerlab_core::confgraph::{self, build, compress};
use dimerlab_core::enumerate::chain::{Chain as Segment1D, ChainBoundary};
use dimerlab_core::enumerate::reflection::{rp_check, rp_reflections, Local};
use dimerlab_core::enumerate::{enumerate, Ensemble};
use dimerlab_core::order::{orientation_conflicts, psi_adjacency_violations, psi_grid, sticks};
use dimerlab_core::sampler::{flip_transition_probability, TorusState};
use dimerlab_core::transfer1d::{char_poly, z_fullpacked, Transfer1D};
use dimerlab_core::{BoundaryCondition, DimerConfig, EdgeId, ModelParams, Orientation, Rect};

use crate::{CliError, Context, Suite};

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn grid() -> Vec<ModelParams> {
    let mut out = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        for (lambda, a) in [(0.0, 1.0), (-0.5, 1.0), (1.0, 0.5)] {
            out.push(ModelParams::new(beta, lambda, a).expect("valid grid"));
        }
    }
    out
}

fn segment_vs_transfer() -> Check {
    let mut worst: f64 = 0.0;
    for q in grid() {
        let t = Transfer1D::new(q);
        let logs: Vec<f64> =
            [2, 4, 6, 8].iter().map(|&l| Segment1D::new(l, ChainBoundary::Vacant).log_partition_function(&q) - t.log_z_vacant(l)).collect();
        worst = logs.iter().map(|x| (x - logs[0]).exp_m1().abs()).fold(worst, f64::max);
    }
    Check { name: "segment enumeration vs transfer matrix", pass: worst < 1e-10, detail: format!("ratio drift {worst:.1e}") }
}

fn cubic_vs_matrix() -> Check {
    let mut worst: f64 = 0.0;
    for q in grid() {
        let m = Transfer1D::new(q).matrix();
        let (t1, t2) = (m.trace(), (m * m).trace());
        let direct = [1.0, -t1, (t1 * t1 - t2) / 2.0, -m.determinant()];
        let c = char_poly(&q);
        worst = (0..4).map(|i| (c[i] - direct[i]).abs()).fold(worst, f64::max);
    }
    Check { name: "characteristic cubic vs matrix invariants", pass: worst < 1e-12, detail: format!("max error {worst:.1e}") }
}

fn packed_segment_bound() -> Check {
    let mut bad = 0;
    for q in grid() {
        for l in (4..=12).step_by(2) {
            let z = z_fullpacked(l, &q).expect("even length");
            bad += (z < 1.0 + (l * l) as f64 / (16.0 * q.ell0().powi(2))) as usize;
        }
    }
    Check { name: "packed-boundary segment lower bound", pass: bad == 0, detail: format!("{bad} violations") }
}

fn detailed_balance() -> Check {
    let mut worst: f64 = 0.0;
    for q in grid() {
        let ens = Ensemble::new(Rect::origin(2, 2).expect("rect"), BoundaryCondition::Periodic, &q).expect("enumerable");
        let pi: HashMap<DimerConfig, f64> = ens.configs().iter().cloned().zip(ens.probabilities().iter().copied()).collect();
        for (x, &px) in &pi {
            let sx = TorusState::from_config(x).expect("torus");
            for i in (0..sx.edge_count()).filter(|&i| sx.can_toggle(i)) {
                let mut sy = sx.clone();
                sy.toggle(i, &q);
                let py = pi[&sy.to_config()];
                worst = worst.max((px * flip_transition_probability(&sx, i, &q) - py * flip_transition_probability(&sy, i, &q)).abs());
            }
        }
    }
    Check { name: "detailed balance on the 2x2 torus", pass: worst <= 1e-12, detail: format!("max imbalance {worst:.1e}") }
}

fn reflection_positivity() -> Check {
    let q = ModelParams::new(1.0, 0.0, 1.0).expect("valid");
    let r = Rect::origin(2, 2).expect("rect");
    let mut worst = f64::MAX;
    for (w, h) in [(4, 2), (2, 4)] {
        let ens = Ensemble::new(Rect::origin(w, h).expect("rect"), BoundaryCondition::Periodic, &q).expect("enumerable");
        let tau = rp_reflections(ens.window(), &r)[0];
        for key in 0..16u64 {
            let f = move |v: &[Local<'_>]| if (v[0].bits() ^ key).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 63 == 0 { 1.0 } else { -1.0 };
            worst = worst.min(rp_check(&ens, &f, &r, &tau).expect("reflection geometry"));
        }
    }
    Check { name: "reflection positivity on 4x2 and 2x4", pass: worst >= -1e-10, detail: format!("smallest value {worst:.3e}") }
}

fn graph_invariants() -> Check {
    let q = ModelParams::new(1.3, -0.2, 0.7).expect("valid");
    let (mut n, mut bad, mut empty_bound) = (0, 0, 0);
    for w in 1..=3 {
        for h in 1..=3 {
            for cfg in enumerate(Rect::origin(w, h).expect("rect"), BoundaryCondition::Vacant).expect("enumerable") {
                n += 1;
                let g = build(&cfg, cfg.window()).expect("vacant window");
                let weight = (g.log_weight(&q) - 4.0 * q.log_vacancy_weight() - cfg.log_weight(cfg.window(), &q).expect("window")).abs();
                let nonempty = !cfg.dimers().is_empty();
                let bound = confgraph::component_bound_holds(&g);
                empty_bound += (!nonempty && !bound) as usize;
                let ok = g.is_connected()
                    && weight < 1e-12
                    && compress(&g).sub_components() == g.sub_components()
                    && (!nonempty || (bound && confgraph::defect_chasing_holds(&g)))
                    && [1, 2, 4].iter().all(|&m| !confgraph::in_em(&cfg, m) || confgraph::defect_lower_bound_check(&g, m));
                bad += !ok as usize;
            }
        }
    }
    Check {
        name: "configuration-graph invariants up to 3x3",
        pass: bad == 0,
        detail: format!("{n} configurations, {bad} violations; empty configurations over the component bound: {empty_bound}"),
    }
}

fn stick_invariants() -> Check {
    let (mut n, mut bad) = (0, 0);
    for (w, h) in [(2, 2), (4, 2), (2, 4), (4, 4)] {
        for cfg in enumerate(Rect::origin(w, h).expect("rect"), BoundaryCondition::Periodic).expect("enumerable") {
            n += 1;
            let all = sticks(&cfg, cfg.window());
            let total: usize = all.iter().map(|s| s.edges().len()).sum();
            let distinct: BTreeSet<EdgeId> = all.iter().flat_map(|s| s.edges()).collect();
            bad += total - distinct.len() + orientation_conflicts(&cfg, cfg.window()).len();
            if let (Ok(v), Ok(hz)) = (psi_grid(&cfg, 1, 1, 3, Orientation::Vertical), psi_grid(&cfg, 1, 1, 3, Orientation::Horizontal)) {
                bad += psi_adjacency_violations(&v.points, &hz.points, Some((v.domain.width, v.domain.height))).len();
            }
        }
    }
    Check {
        name: "stick disjointness and grid exclusion on small tori",
        pass: bad == 0,
        detail: format!("{n} configurations, {bad} violations"),
    }
}

pub fn run(_ctx: &Context, suite: Suite) -> Result<(), CliError> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Oracle | Suite::All) {
        checks.extend([segment_vs_transfer(), cubic_vs_matrix(), packed_segment_bound(), detailed_balance(), reflection_positivity()]);
    }
    if matches!(suite, Suite::Invariants | Suite::All) {
        checks.extend([graph_invariants(), stick_invariants()]);
    }
    let mut failed = Vec::new();
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.pass {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join("; ")))
    }
}
