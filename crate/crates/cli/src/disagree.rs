use std::path::PathBuf;

use dimerlab_core::disagree::{
    alpha1_fit, component_shapes, confinement_check, displacement_stats, sealing_events, Alpha1Fit, DisplacementStat, PairSample,
};
use dimerlab_core::sampler;
use dimerlab_core::{DimerConfig, EdgeId, VertexId};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{write_json, write_manifest, Csv};
use crate::{fields, CliError, Context};

#[derive(Serialize, Default)]
struct EventCounts {
    anchors: u64,
    sigma0_both: u64,
    sealed: u64,
    sealed_given_sigma0_both: Option<f64>,
    checked_edges: u64,
    violations: u64,
}

#[derive(Serialize)]
struct Summary {
    pairs: usize,
    disagreeing_pairs: usize,
    events: EventCounts,
    component_diameters: Vec<i64>,
    wrapping_components: usize,
    connections: Vec<DisplacementStat>,
    fit: Result<Alpha1Fit, String>,
    ell0: f64,
}

fn read_config(path: &PathBuf) -> Result<DimerConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    DimerConfig::from_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Snapshots of one chain every `spacing` sweeps after burn-in.
fn snapshots(ctx: &Context, stream: u64) -> Result<Vec<DimerConfig>, CliError> {
    let d = &ctx.cfg.disagree;
    let mut spec = ctx.cfg.chain_spec(stream)?;
    spec.measure_every = d.spacing.max(1);
    spec.sweeps = d.pairs.max(1) * spec.measure_every;
    let mut out = Vec::new();
    sampler::run_with(&spec, |_, chain| out.push(chain.config())).map_err(CliError::config)?;
    Ok(out)
}

pub fn run(ctx: &Context, files: &[PathBuf]) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let sc = cfg.seal_scales()?;
    let mut streams = Vec::new();
    let raw: Vec<(DimerConfig, DimerConfig)> = if files.is_empty() {
        let chains = cfg.sampler.chains.max(1);
        streams = (0..2 * chains).collect();
        let runs = ctx.pool(|| streams.par_iter().map(|&s| snapshots(ctx, s)).collect::<Vec<_>>())?;
        let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
        runs.chunks(2).flat_map(|c| c[0].iter().cloned().zip(c[1].iter().cloned())).collect()
    } else {
        files.chunks(2).map(|f| Ok((read_config(&f[0])?, read_config(&f[1])?))).collect::<Result<_, CliError>>()?
    };
    let pairs = raw.into_iter().map(|(a, b)| PairSample::new(a, b)).collect::<Result<Vec<_>, _>>().map_err(CliError::config)?;

    let mut csv = Csv::new(&[
        "pair",
        "x",
        "y",
        "sigma0",
        "sigma0_prime",
        "sigma1",
        "sigma1_prime",
        "sigma2",
        "sealed",
        "violations",
        "max_component_diameter",
    ]);
    let mut ev = EventCounts::default();
    let (mut diameters, mut wrapping) = (Vec::new(), 0);
    let stride = cfg.sealing.anchor_stride.max(1);
    for (i, pair) in pairs.iter().enumerate() {
        let shapes = component_shapes(&pair.delta, pair.period());
        let diameter = shapes.iter().map(|s| s.extent.0.max(s.extent.1)).max().unwrap_or(0);
        diameters.extend(shapes.iter().map(|s| s.extent.0.max(s.extent.1)));
        wrapping += shapes.iter().filter(|s| s.wraps).count();
        let w = pair.sigma.window();
        let (x0, y0) = ((w.x0d() + 1) / 2, (w.y0d() + 1) / 2);
        for y in (y0..y0 + w.height()).step_by(stride) {
            for x in (x0..x0 + w.width()).step_by(stride) {
                let a = VertexId::new(x, y);
                let e = sealing_events(&pair.sigma, &pair.sigma_prime, a, &sc).map_err(CliError::config)?;
                ev.anchors += 1;
                ev.sigma0_both += (e.sigma0 && e.sigma0_prime) as u64;
                let violations = if e.sealed() {
                    ev.sealed += 1;
                    let rect = dimerlab_core::disagree::sealed_rect(a, &sc);
                    ev.checked_edges += pair.delta.iter().filter(|f| rect.contains_edge(**f)).count() as u64;
                    confinement_check(pair, a, &sc).map_err(CliError::config)?.len()
                } else {
                    0
                };
                ev.violations += violations as u64;
                csv.row(&fields![i, x, y, e.sigma0, e.sigma0_prime, e.sigma1, e.sigma1_prime, e.sigma2, e.sealed(), violations, diameter]);
            }
        }
    }
    ev.sealed_given_sigma0_both = (ev.sigma0_both > 0).then(|| ev.sealed as f64 / ev.sigma0_both as f64);

    let a = &cfg.analysis;
    let displacements: Vec<(i64, i64)> = (0..=a.max_dx).flat_map(|dx| (0..=a.max_dy).map(move |dy| (dx, dy))).collect();
    let connections = displacement_stats(&pairs, EdgeId::vertical(0, 0), &displacements).map_err(CliError::config)?;
    let summary = Summary {
        pairs: pairs.len(),
        disagreeing_pairs: pairs.iter().filter(|p| !p.delta.is_empty()).count(),
        fit: alpha1_fit(&connections).map_err(|e| e.to_string()),
        events: ev,
        component_diameters: diameters,
        wrapping_components: wrapping,
        connections,
        ell0: cfg.params()?.ell0(),
    };
    csv.write(&ctx.out.join("sealing.csv"))?;
    write_json(&ctx.out.join("summary.json"), &summary)?;
    write_manifest(&ctx.out, "disagree", cfg, &streams, &["sealing.csv".into(), "summary.json".into()])?;
    let e = &summary.events;
    println!(
        "{} pairs ({} disagreeing); {}/{} anchors sealed; {} disagreement edges checked; {} violations",
        summary.pairs, summary.disagreeing_pairs, e.sealed, e.anchors, e.checked_edges, e.violations
    );
    if e.violations > 0 {
        return Err(CliError::Check(format!("{} confinement violations", e.violations)));
    }
    Ok(())
}
