use dimerlab_core::sampler::{self, Acceptance, RunRecord};
use dimerlab_core::stats::{summarize, SeriesSummary};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{write_atomic, write_json, write_manifest};
use crate::{CliError, Context};

#[derive(Serialize)]
struct ChainSummary {
    chain: u64,
    measurements: usize,
    horizontal: SeriesSummary,
    vertical: SeriesSummary,
    vacancies: SeriesSummary,
    broken_links: SeriesSummary,
    energy: SeriesSummary,
    acceptance: Acceptance,
}

fn summary(chain: u64, rec: &RunRecord) -> ChainSummary {
    let series = |f: fn(&sampler::Measurement) -> f64| summarize(&rec.measurements.iter().map(f).collect::<Vec<_>>());
    ChainSummary {
        chain,
        measurements: rec.measurements.len(),
        horizontal: series(|m| m.horizontal as f64),
        vertical: series(|m| m.vertical as f64),
        vacancies: series(|m| m.vacancies as f64),
        broken_links: series(|m| m.broken_links as f64),
        energy: series(|m| m.energy),
        acceptance: rec.acceptance,
    }
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let streams: Vec<u64> = (0..cfg.sampler.chains.max(1)).collect();
    let specs = streams.iter().map(|&i| cfg.chain_spec(i)).collect::<Result<Vec<_>, _>>()?;
    let records = ctx.pool(|| specs.par_iter().map(sampler::run).collect::<Vec<_>>())?;
    let mut outputs = Vec::new();
    let mut summaries = Vec::new();
    for (i, rec) in streams.iter().zip(records) {
        let rec = rec.map_err(CliError::config)?;
        let dir = ctx.out.join(format!("chain_{i}"));
        let mut jsonl = String::new();
        for m in &rec.measurements {
            jsonl.push_str(&serde_json::to_string(m).expect("serializable"));
            jsonl.push('\n');
        }
        write_atomic(&dir.join("measurements.jsonl"), jsonl.as_bytes())?;
        write_atomic(&dir.join("final.txt"), rec.final_config.to_text().map_err(CliError::config)?.as_bytes())?;
        outputs.extend([format!("chain_{i}/measurements.jsonl"), format!("chain_{i}/final.txt")]);
        summaries.push(summary(*i, &rec));
    }
    write_json(&ctx.out.join("summary.json"), &summaries)?;
    outputs.push("summary.json".into());
    write_manifest(&ctx.out, "sample", cfg, &streams, &outputs)?;
    for s in &summaries {
        println!(
            "chain {}: vertical {:.3} ± {:.3}, horizontal {:.3} ± {:.3}, vacancies {:.3}, broken links {:.3}",
            s.chain,
            s.vertical.mean,
            s.vertical.std_error,
            s.horizontal.mean,
            s.horizontal.std_error,
            s.vacancies.mean,
            s.broken_links.mean
        );
    }
    Ok(())
}
