use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use dimerlab_core::order::{
    escape_probability, percolation_report, psi_adjacency_violations, psi_grid, stick_length_histogram, sticks, PsiGrid,
};
use dimerlab_core::sampler;
use dimerlab_core::{DimerConfig, Orientation, VertexId};

use crate::output::{write_manifest, Csv};
use crate::{fields, CliError, Context};

/// The grid points of one period, repeated over the 3x3 block of periods
/// around the origin period for periodic grids.
fn tiled(g: &PsiGrid) -> BTreeSet<VertexId> {
    if !g.periodic {
        return g.points.clone();
    }
    let (w, h) = (g.domain.width, g.domain.height);
    let mut out = BTreeSet::new();
    for i in -1..=1 {
        for j in -1..=1 {
            out.extend(g.points.iter().map(|p| VertexId::new(p.x + i * w, p.y + j * h)));
        }
    }
    out
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Horizontal => "H",
        Orientation::Vertical => "V",
    }
}

pub fn run(ctx: &Context, inputs: &[PathBuf]) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let mut samples: Vec<(String, DimerConfig)> = Vec::new();
    let mut streams = Vec::new();
    if inputs.is_empty() {
        let spec = cfg.chain_spec(0)?;
        streams.push(0);
        sampler::run_with(&spec, |sweep, chain| samples.push((format!("sweep{sweep}"), chain.config()))).map_err(CliError::config)?;
    } else {
        for path in inputs {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let c = DimerConfig::from_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            samples.push((path.display().to_string().replace(',', "_"), c));
        }
    }

    let mut psi = Csv::new(&[
        "sample",
        "b",
        "orientation",
        "points",
        "domain_area",
        "largest_fraction",
        "spans_horizontally",
        "spans_vertically",
        "adjacency_violations",
    ]);
    let mut lengths: BTreeMap<(String, i64), usize> = BTreeMap::new();
    let mut grids: BTreeMap<(i64, &'static str), Vec<BTreeSet<VertexId>>> = BTreeMap::new();
    let mut anchor: BTreeMap<i64, (VertexId, i64)> = BTreeMap::new();
    for (name, c) in &samples {
        let all = sticks(c, c.window());
        for (len, n) in stick_length_histogram(&all) {
            *lengths.entry((name.clone(), len)).or_insert(0) += n;
        }
        for &b in &cfg.analysis.b_values {
            let ver = psi_grid(c, b, b, cfg.analysis.n, Orientation::Vertical).map_err(CliError::config)?;
            let hor = psi_grid(c, b, b, cfg.analysis.n, Orientation::Horizontal).map_err(CliError::config)?;
            let period = ver.periodic.then_some((ver.domain.width, ver.domain.height));
            let violations = psi_adjacency_violations(&ver.points, &hor.points, period).len();
            for g in [&ver, &hor] {
                let r = percolation_report(&g.points, &g.domain);
                let o = orientation_name(g.orientation);
                psi.row(&fields![
                    name,
                    b,
                    o,
                    g.points.len(),
                    g.domain.area(),
                    r.largest_fraction,
                    r.spans_horizontally,
                    r.spans_vertically,
                    violations
                ]);
                grids.entry((b, o)).or_default().push(tiled(g));
            }
            let centre = VertexId::new(ver.domain.x0 + ver.domain.width / 2, ver.domain.y0 + ver.domain.height / 2);
            anchor.insert(b, (centre, ver.domain.width.min(ver.domain.height).max(1)));
        }
    }
    let mut sticks_csv = Csv::new(&["sample", "length", "count"]);
    for ((name, len), n) in &lengths {
        sticks_csv.row(&fields![name, len, n]);
    }
    let mut escape = Csv::new(&["b", "grid", "u_x", "u_y", "distance", "successes", "trials", "estimate", "lower", "upper"]);
    for ((b, o), sets) in &grids {
        let (u, d) = anchor[b];
        let p = escape_probability(sets, u, d).map_err(CliError::config)?;
        escape.row(&fields![b, o, u.x, u.y, d, p.successes, p.trials, p.estimate, p.lower, p.upper]);
    }
    psi.write(&ctx.out.join("psi.csv"))?;
    sticks_csv.write(&ctx.out.join("sticks.csv"))?;
    escape.write(&ctx.out.join("escape.csv"))?;
    write_manifest(&ctx.out, "analyze", cfg, &streams, &["psi.csv".into(), "sticks.csv".into(), "escape.csv".into()])?;
    println!("analysed {} configurations into {}", samples.len(), ctx.out.display());
    Ok(())
}
