use dimerlab_core::enumerate::Ensemble;
use dimerlab_core::{Orientation, Rect};
use serde::Serialize;

use crate::output::{write_json, write_manifest, Csv};
use crate::{fields, CliError, Context};

#[derive(Serialize)]
struct Summary {
    configurations: usize,
    log_z: f64,
    mean_dimers: f64,
    mean_horizontal: f64,
    mean_vertical: f64,
    mean_vacancies: f64,
    mean_broken_links: f64,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let q = cfg.params()?;
    let window = Rect::origin(cfg.geometry.width as i64, cfg.geometry.height as i64).map_err(CliError::config)?;
    let ens = Ensemble::new(window, cfg.bc()?, &q).map_err(CliError::config)?;
    let count = |o: Orientation| move |c: &dimerlab_core::DimerConfig| c.dimers().iter().filter(|e| e.orientation() == o).count() as f64;
    let defects = |c: &dimerlab_core::DimerConfig| c.defect_counts(c.window()).expect("own window");
    let summary = Summary {
        configurations: ens.len(),
        log_z: ens.log_z(),
        mean_dimers: ens.expectation(&|c| c.dimers().len() as f64),
        mean_horizontal: ens.expectation(&count(Orientation::Horizontal)),
        mean_vertical: ens.expectation(&count(Orientation::Vertical)),
        mean_vacancies: ens.expectation(&|c| defects(c).0 as f64),
        mean_broken_links: ens.expectation(&|c| defects(c).1 as f64),
    };
    let mut marginals = Csv::new(&["dx", "dy", "orientation", "probability"]);
    let free = ens.configs().first().map(|c| c.free_edges()).unwrap_or_default();
    for e in free {
        let o = if e.is_horizontal() { "H" } else { "V" };
        marginals.row(&fields![e.dx, e.dy, o, ens.probability(&|c| c.occupied(e))]);
    }
    write_json(&ctx.out.join("summary.json"), &summary)?;
    marginals.write(&ctx.out.join("marginals.csv"))?;
    write_manifest(&ctx.out, "enumerate", cfg, &[], &["summary.json".into(), "marginals.csv".into()])?;
    println!("{} configurations, log Z = {:.12}", summary.configurations, summary.log_z);
    Ok(())
}
