//! Numerical verification harness: seeded experiments that tabulate both
//! sides of the Grushin dispersive, Strichartz and restriction estimates.

pub mod config;
pub mod data;
pub mod experiments;
pub mod report;

pub use config::{Estimate, ExperimentConfig, Params, Resolution};
pub use report::{Format, Meta, Report, ReportRow};

use grushin::Result;

/// Runs the experiment named by `cfg.estimate`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    use experiments::*;
    let rows = match cfg.estimate {
        Estimate::Dispersive => verify_dispersive(cfg)?,
        Estimate::LocalStrichartz => verify_local_strichartz(cfg)?,
        Estimate::AnisoSchrodinger | Estimate::AnisoWave | Estimate::InhomogeneousSchrodinger | Estimate::InhomogeneousWave => verify_aniso(cfg)?,
        Estimate::Restriction => verify_restriction(cfg)?,
        Estimate::ScalingLaw => verify_scaling_law(cfg)?,
        Estimate::Lemma41 => verify_lemma41(cfg)?,
        Estimate::Prop11 => verify_prop11(cfg)?,
    };
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        estimate: cfg.estimate.as_str().to_string(),
        seed: cfg.seed,
        psi: cfg.psi.describe(),
        config: cfg.to_json(),
    };
    Ok(Report { meta, rows })
}
