use dimerlab_core::transfer1d::{z_fullpacked, Transfer1D};
use dimerlab_core::ModelParams;

use crate::output::{write_manifest, Csv};
use crate::{fields, CliError, Context};

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let mut betas = vec![cfg.model.beta];
    betas.extend(&cfg.model.beta_scan);
    let mut spectrum =
        Csv::new(&["beta", "lambda", "a", "x1", "x2", "x3", "x1_minus_one", "ell0", "correlation_length", "xi_log1p_inv_ell0"]);
    let mut segments = Csv::new(&["beta", "lambda", "a", "length", "log_z_vacant", "z_fullpacked", "packed_lower_bound"]);
    for &beta in &betas {
        let q = ModelParams::new(beta, cfg.model.lambda, cfg.model.a).map_err(CliError::config)?;
        let t = Transfer1D::new(q);
        match t.spectrum() {
            Ok(s) => {
                let xi = 1.0 / (s.x1 / s.x3).abs().ln();
                let d = t.x1_minus_one().map_err(CliError::config)?;
                spectrum.row(&fields![beta, q.lambda, q.a, s.x1, s.x2, s.x3, d, q.ell0(), xi, xi * (1.0 / q.ell0()).ln_1p()]);
            }
            Err(e) => eprintln!("dimerlab: beta {beta}: {e}"),
        }
        for &len in &cfg.analysis.lengths {
            let packed = match z_fullpacked(len, &q) {
                Ok(z) => z.to_string(),
                Err(_) => String::new(),
            };
            let bound = 1.0 + (len * len) as f64 / (16.0 * q.ell0().powi(2));
            segments.row(&fields![beta, q.lambda, q.a, len, t.log_z_vacant(len), packed, bound]);
        }
    }
    spectrum.write(&ctx.out.join("spectrum.csv"))?;
    segments.write(&ctx.out.join("segments.csv"))?;
    write_manifest(&ctx.out, "transfer", cfg, &[], &["spectrum.csv".into(), "segments.csv".into()])?;
    println!("wrote {}", ctx.out.display());
    Ok(())
}
