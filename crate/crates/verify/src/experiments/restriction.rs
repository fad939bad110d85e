//! Ratio evidence for the restriction inequality
//! `‖R f‖_{L²(S, dσ_loc)} ≲ ‖f‖_{L¹_t L^q_s L^p_x}` and its extension dual.

use crate::config::{ExperimentConfig, Resolution};
use crate::data::wavepackets3;
use crate::params;
use crate::report::{ratio, ReportRow};
use grushin::grid::{mixed_norm, tensor_points, Axis, Exponent, MixedNormSpec, Samples3};
use grushin::restriction::{cross_term_table, extend, restrict, surface_l2_norm};
use grushin::transform::Transform2Config;
use grushin::{Error, LambdaGrid, LocalizedMeasure, Result, Surface, SurfaceDensity, TimeGrid};

/// Extension pairs `(p′, q′)` of the dual inequality.
const DUAL_PAIRS: [(f64, f64); 2] = [(4.0, 4.0), (4.0, f64::INFINITY)];

/// Largest degree whose surface frequency `(2k+n)|λ|` can reach the unit
/// support of ψ at the smallest `|λ|` of the grid.
pub fn auto_degree(n: usize, grid: &LambdaGrid) -> usize {
    let lmin = (0..grid.len()).map(|j| grid.node(j).abs()).fold(f64::INFINITY, f64::min);
    (((1.0 / lmin - n as f64) / 2.0).ceil().max(0.0)) as usize
}

fn transform2_config(n: usize, r: &Resolution) -> Result<Transform2Config> {
    let lambda = LambdaGrid::uniform_covering(r.lambda_max.max(1.0 / n as f64), r.lambda_spacing)?;
    Ok(Transform2Config {
        n,
        max_degree: auto_degree(n, &lambda),
        lambda,
        nu: TimeGrid::new(1.0, 2)?,
        time: TimeGrid::new(r.time_half_width, r.time_count)?,
        s_time: TimeGrid::new(r.s_max, r.s_count)?,
        x_half_width: r.x_half_width,
        x_order: r.x_order,
    })
}

fn one_level(n: usize, r: &Resolution, measure: &LocalizedMeasure, fields: &[grushin::Field3], pairs: &[(Exponent, Exponent)]) -> Result<(Vec<SurfaceDensity>, Vec<Vec<f64>>)> {
    let tcfg = transform2_config(n, r)?;
    let x_axis = Axis::midpoint(-r.x_half_width, r.x_half_width, r.x_count);
    let t_axis = Axis::midpoint(-r.time_half_width, r.time_half_width, r.time_count);
    let s_axis = Axis::midpoint(-r.s_max, r.s_max, r.s_count);
    let mut thetas = Vec::with_capacity(fields.len());
    // ratios[pair][function]
    let mut ratios = vec![Vec::with_capacity(fields.len()); pairs.len()];
    for f in fields {
        let theta = restrict(f, measure, &tcfg)?;
        let num = surface_l2_norm(&theta);
        let u = Samples3::sample(n, &x_axis, &t_axis, &s_axis, |x, t, s| f.eval(x, t, s))?;
        for (ip, &(p, q)) in pairs.iter().enumerate() {
            ratios[ip].push(ratio(num, mixed_norm(&u, &MixedNormSpec::new(Exponent(1.0), q, p))?));
        }
        thetas.push(theta);
    }
    Ok((thetas, ratios))
}

fn doubled(r: &Resolution) -> Resolution {
    let mut d = r.clone();
    d.lambda_spacing *= 0.5;
    d.time_count *= 2;
    d.s_count *= 2;
    d.x_count *= 2;
    d.x_order *= 2;
    d
}

pub fn verify_restriction(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let n = cfg.n;
    let p = &cfg.params;
    if p.pairs.is_empty() || p.family_size == 0 {
        return Err(Error::Configuration("restriction needs pairs and a non-empty family".into()));
    }
    if let Some(&(pe, q)) = p.pairs.iter().find(|(pe, q)| !(pe.0 >= 1.0 && pe.0 < 2.0 && q.0 >= 1.0 && q.0 < 2.0)) {
        return Err(Error::Configuration(format!("restriction pairs need 1 ≤ p, q < 2, got ({pe},{q})")));
    }
    let base = cfg.refined_resolution();
    let measure = LocalizedMeasure { psi: cfg.psi, ..LocalizedMeasure::new(Surface::Schrodinger) };
    let fields: Vec<grushin::Field3> = wavepackets3(cfg.seed, 1, n, p.family_size).iter().map(|w| w.field()).collect();
    let (thetas, r0) = one_level(n, &base, &measure, &fields, &p.pairs)?;
    let (_, r1) = one_level(n, &doubled(&base), &measure, &fields, &p.pairs)?;

    let mut rows = Vec::new();
    for (ip, &(pe, q)) in p.pairs.iter().enumerate() {
        for (i, &v) in r1[ip].iter().enumerate() {
            rows.push(ReportRow::with_pass("restriction_ratio", params!("p" => pe, "q" => q, "f" => i), v, r0[ip][i], cfg.tol, v.is_finite()));
        }
        let s0 = r0[ip].iter().copied().fold(0.0, f64::max);
        let s1 = r1[ip].iter().copied().fold(0.0, f64::max);
        let pass = s1.is_finite() && s1 > 0.0 && (s1 - s0).abs() < cfg.tol * s1;
        rows.push(ReportRow::with_pass("restriction_sup", params!("p" => pe, "q" => q), s1, s0, cfg.tol, pass));
    }

    // extension of the restricted family over a coarse box
    let x_axis = Axis::midpoint(-base.x_half_width, base.x_half_width, 32);
    let t_axis = Axis::midpoint(-base.time_half_width, base.time_half_width, 16);
    let s_axis = Axis::midpoint(-base.s_max, base.s_max, 32);
    let (points, xw) = tensor_points(n, &x_axis);
    let mut dual = vec![0.0f64; DUAL_PAIRS.len()];
    for theta in &thetas {
        let norm = surface_l2_norm(theta);
        let values = extend(theta).eval_grid(&points, &t_axis.nodes, &s_axis.nodes);
        let u = Samples3 {
            n,
            x_points: points.clone(),
            x_weights: xw.clone(),
            t_nodes: t_axis.nodes.clone(),
            t_weights: t_axis.weights.clone(),
            s_nodes: s_axis.nodes.clone(),
            s_weights: s_axis.weights.clone(),
            values,
        };
        for (ip, &(pp, qp)) in DUAL_PAIRS.iter().enumerate() {
            let lhs = mixed_norm(&u, &MixedNormSpec::new(Exponent::INF, Exponent(qp), Exponent(pp)))?;
            dual[ip] = dual[ip].max(ratio(lhs, norm));
        }
    }
    for (ip, &(pp, qp)) in DUAL_PAIRS.iter().enumerate() {
        let v = dual[ip];
        rows.push(ReportRow::with_pass("restriction_dual", params!("p" => Exponent(pp), "q" => Exponent(qp)), v, 1.0, 0.0, v.is_finite()));
    }

    if n == 1 {
        let table = cross_term_table(16, 1.0)?;
        for (k, row) in table.iter().enumerate() {
            let off = row.iter().copied().fold(0.0, f64::max);
            rows.push(ReportRow::with_pass("restriction_cross_term", params!("k" => k), off, row[k], 0.0, off.is_finite()));
        }
    }
    Ok(rows)
}
