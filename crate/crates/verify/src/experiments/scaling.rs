//! Dilation sweep behind the anisotropic Strichartz exponent relation.
//!
//! The datum at scale `R` is `ψ(R^{−2}G)(g∘δ_R)`, transformed on grids scaled
//! with `R` (λ by `R²`, x by `1/R`, t and s by `1/R²`), so each scale is
//! resolved as well as the first.

use crate::config::ExperimentConfig;
use crate::data::{fit_slope, rng};
use crate::params;
use crate::report::ReportRow;
use grushin::grid::{mixed_norm, tensor_points, Axis, Exponent, MixedNormSpec, Samples3};
use grushin::propagator::{frequency_localize, schrodinger_evolve};
use grushin::transform::{forward_transform, XRule};
use grushin::{Error, LambdaGrid, LocalizationWindow, Result, SpectralCoefficients, TimeGrid, TransformConfig, Wavepacket, C64};
use rand::Rng;

/// `e^{−isG}` of `c` sampled on `x × t × s` axes.
pub fn sample_schrodinger(c: &SpectralCoefficients, x_axis: &Axis, t_axis: &Axis, s_nodes: &[f64], s_weights: &[f64]) -> Result<Samples3> {
    let n = c.n;
    let (x_points, x_weights) = tensor_points(n, x_axis);
    let per_s: Vec<Vec<C64>> = s_nodes.iter().map(|&s| schrodinger_evolve(c, s).inverse().eval_grid(&x_points, &t_axis.nodes)).collect();
    Ok(assemble(n, x_points, x_weights, t_axis, s_nodes, s_weights, &per_s))
}

/// Stacks per-s `[t][x]` tables into `[t][s][x]` samples.
pub fn assemble(
    n: usize,
    x_points: Vec<Vec<f64>>,
    x_weights: Vec<f64>,
    t_axis: &Axis,
    s_nodes: &[f64],
    s_weights: &[f64],
    per_s: &[Vec<C64>],
) -> Samples3 {
    let nx = x_points.len();
    let mut values = Vec::with_capacity(nx * s_nodes.len() * t_axis.nodes.len());
    for it in 0..t_axis.nodes.len() {
        for tab in per_s {
            values.extend_from_slice(&tab[it * nx..(it + 1) * nx]);
        }
    }
    Samples3 {
        n,
        x_points,
        x_weights,
        t_nodes: t_axis.nodes.clone(),
        t_weights: t_axis.weights.clone(),
        s_nodes: s_nodes.to_vec(),
        s_weights: s_weights.to_vec(),
        values,
    }
}

pub fn verify_scaling_law(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let n = cfg.n;
    let p = &cfg.params;
    let res = cfg.refined_resolution();
    if p.radii.len() < 3 {
        return Err(Error::Configuration(format!("scaling_law needs at least 3 dyadic radii for a fit, got {}", p.radii.len())));
    }
    if p.radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Configuration("radii must be positive".into()));
    }
    if p.pairs.is_empty() {
        return Err(Error::Configuration("scaling_law needs at least one (p,q) pair".into()));
    }
    let mut r = rng(cfg.seed, 31);
    let g = Wavepacket {
        x0: vec![0.0; n],
        t0: 0.0,
        a: 1.0,
        b: 1.0,
        xi: (0..n).map(|_| r.random_range(-0.5..0.5)).collect(),
        tau: r.random_range(-0.5..0.5),
    };
    let base = g.field();
    let mut rho: Vec<Vec<f64>> = vec![Vec::new(); p.pairs.len()];
    for &big_r in &p.radii {
        let r2 = big_r * big_r;
        let tcfg = TransformConfig {
            n,
            max_degree: res.max_degree,
            lambda: LambdaGrid::uniform_covering(res.lambda_max * r2, res.lambda_spacing * r2)?,
            time: TimeGrid::new(res.time_half_width / r2, res.time_count)?,
            x_order: res.x_order,
            box_order: res.box_order,
            x_rule: XRule::GaussHermite,
        };
        let c = forward_transform(&base.dilate(big_r), &tcfg)?;
        let window = LocalizationWindow { psi: cfg.psi, radius: p.window_radius * big_r };
        let c = frequency_localize(&c, &window)?;
        let c = if p.zero_datum { c.map_multiplier(|_, _| C64::new(0.0, 0.0)) } else { c };
        let norm_f = c.physical_l2_norm();
        let x_axis = Axis::midpoint(-res.x_half_width / big_r, res.x_half_width / big_r, res.x_count);
        let t_axis = Axis::midpoint(-res.time_half_width / r2, res.time_half_width / r2, res.time_count);
        let s_axis = Axis::midpoint(-res.s_max / r2, res.s_max / r2, res.s_count);
        let u = sample_schrodinger(&c, &x_axis, &t_axis, &s_axis.nodes, &s_axis.weights)?;
        for (ip, &(pe, q)) in p.pairs.iter().enumerate() {
            let lhs = mixed_norm(&u, &MixedNormSpec::new(Exponent::INF, q, pe))?;
            rho[ip].push(crate::report::ratio(lhs, norm_f));
        }
    }
    let logr: Vec<f64> = p.radii.iter().map(|r| r.log2()).collect();
    let mut rows = Vec::new();
    for (ip, &(pe, q)) in p.pairs.iter().enumerate() {
        for (ir, &big_r) in p.radii.iter().enumerate() {
            let v = rho[ip][ir];
            rows.push(ReportRow::with_pass("scaling_law_rho", params!("p" => pe, "q" => q, "R" => big_r), v, 1.0, 0.0, v.is_finite()));
        }
        let predicted = (n as f64 + 2.0) / 2.0 - 2.0 * q.recip() - n as f64 * pe.recip();
        let logs: Vec<f64> = rho[ip].iter().map(|v| v.log2()).collect();
        let slope = fit_slope(&logr, &logs);
        let pass = slope.is_finite() && (slope - predicted).abs() <= cfg.tol;
        rows.push(ReportRow::with_pass("scaling_law_slope", params!("p" => pe, "q" => q), slope, predicted, cfg.tol, pass));
    }
    Ok(rows)
}
