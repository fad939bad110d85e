//! The non-dispersive datum: for `f̂(α, λ) = δ_{α0} Q(λ)` with `Q` supported in
//! `λ > 1`, the Schrödinger flow is a translation in `t`.

use crate::config::ExperimentConfig;
use crate::params;
use crate::report::ReportRow;
use grushin::grid::{lp_norm, tensor_points, Axis};
use grushin::propagator::schrodinger_evolve;
use grushin::quadrature::composite_gauss_legendre;
use grushin::{Error, LambdaGrid, LambdaLayout, Psi, Result, SpectralCoefficients, C64};
use std::f64::consts::PI;

/// Smooth `Q(λ) = ψ((λ−c)/h)·exp(−(λ−c)²/2σ²)`, supported in `(c−h, c+h)`.
#[derive(Debug, Clone, Copy)]
pub struct BumpQ {
    pub psi: Psi,
    pub center: f64,
    pub half_width: f64,
    pub sigma: f64,
}

impl BumpQ {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let p = &cfg.params;
        let q = Self { psi: cfg.psi, center: p.q_center, half_width: p.q_half_width, sigma: p.q_sigma };
        if !(q.half_width > 0.0 && q.sigma > 0.0) {
            return Err(Error::Configuration("Q needs positive half-width and sigma".into()));
        }
        if matches!(q.psi, Psi::One) {
            return Err(Error::Configuration("Q needs a compactly supported window ψ".into()));
        }
        if !(q.center - q.half_width > 1.0) {
            return Err(Error::Configuration(format!(
                "support of Q, ({}, {}), touches λ ≤ 1",
                q.center - q.half_width,
                q.center + q.half_width
            )));
        }
        Ok(q)
    }

    pub fn eval(&self, l: f64) -> f64 {
        let d = l - self.center;
        self.psi.eval(d / self.half_width) * (-0.5 * d * d / (self.sigma * self.sigma)).exp()
    }
}

/// `(2π)^{−1} ∫ e^{−iλτ} Φ_0^λ(x) Q(λ) dλ` by composite Gauss–Legendre.
pub fn datum_by_quadrature(q: &BumpQ, x: &[f64], tau: f64) -> Result<C64> {
    let (ls, ws) = composite_gauss_legendre(16, 96, q.center - q.half_width, q.center + q.half_width)?;
    let n = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let v: C64 = ls
        .iter()
        .zip(&ws)
        .map(|(&l, &w)| {
            let phi0 = (l / PI).powf(n / 4.0) * (-0.5 * l * r2).exp();
            C64::from_polar(w * phi0 * q.eval(l), -l * tau)
        })
        .sum();
    Ok(v / (2.0 * PI))
}

pub fn verify_prop11(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let n = cfg.n;
    let q = BumpQ::from_config(cfg)?;
    let res = cfg.refined_resolution();
    if res.layout != LambdaLayout::Uniform {
        return Err(Error::Configuration("prop11 uses the uniform λ layout".into()));
    }
    if res.lambda_max < q.center + q.half_width {
        return Err(Error::Configuration(format!("lambda_max = {} does not cover the support of Q", res.lambda_max)));
    }
    let p = &cfg.params;
    if p.s.is_empty() || p.p.is_empty() {
        return Err(Error::Configuration("prop11 needs non-empty s and p lists".into()));
    }
    let grid = LambdaGrid::uniform_covering(res.lambda_max, res.lambda_spacing)?;
    let mut c = SpectralCoefficients::zeros(n, res.max_degree, grid);
    for j in 0..grid.len() {
        let l = grid.node(j);
        if l > 0.0 {
            c.set(j, 0, C64::new(q.eval(l), 0.0));
        }
    }
    let x_axis = Axis::midpoint(-res.x_half_width, res.x_half_width, res.x_count);
    let t_axis = Axis::midpoint(-res.time_half_width, res.time_half_width, res.time_count);
    let (points, xw) = tensor_points(n, &x_axis);
    let ts = &t_axis.nodes;
    let weights: Vec<f64> = t_axis.weights.iter().flat_map(|&wt| xw.iter().map(move |&wx| wt * wx)).collect();
    let f_inv = c.inverse();
    let f_grid = f_inv.eval_grid(&points, ts);
    let f_sup = f_grid.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let f_l2 = c.physical_l2_norm();
    let mut rows = Vec::new();

    // the discretized datum against the defining integral
    let mut oracle_err = 0.0f64;
    for (it, &t) in ts.iter().enumerate() {
        for (ix, x) in points.iter().enumerate() {
            oracle_err = oracle_err.max((f_grid[it * points.len() + ix] - datum_by_quadrature(&q, x, t)?).norm());
        }
    }
    let scale = if f_sup > 0.0 { f_sup } else { 1.0 };
    rows.push(ReportRow::bound("prop11_datum", params!("s" => 0), oracle_err / scale, cfg.tol, 0.0));

    let f_abs: Vec<f64> = f_grid.iter().map(|v| v.norm()).collect();
    for &s in &p.s {
        let u = schrodinger_evolve(&c, s);
        let shift = n as f64 * s;
        let shifted: Vec<f64> = ts.iter().map(|t| t + shift).collect();
        let ug = u.inverse().eval_grid(&points, ts);
        let fg = f_inv.eval_grid(&points, &shifted);
        let disc = ug.iter().zip(&fg).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rows.push(ReportRow::bound("prop11_discrepancy", params!("s" => s), disc / scale, cfg.tol, 0.0));
        let u_abs: Vec<f64> = ug.iter().map(|v| v.norm()).collect();
        for &e in &p.p {
            let lu = lp_norm(&u_abs, &weights, e);
            let lf = lp_norm(&f_abs, &weights, e);
            rows.push(ReportRow::close("prop11_norm", params!("s" => s, "p" => e), lu, lf, cfg.tol, lf));
        }
        let l2 = u.physical_l2_norm();
        rows.push(ReportRow::close("prop11_l2", params!("s" => s), l2, f_l2, 1e-10, f_l2));
    }
    Ok(rows)
}
