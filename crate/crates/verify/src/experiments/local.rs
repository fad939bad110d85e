//! Local dispersive and local Strichartz estimates, through the strip kernel.

use crate::config::ExperimentConfig;
use crate::data::{ball_volume, bump_datum, compact_lp_norm, rng};
use crate::params;
use crate::report::ReportRow;
use grushin::grid::{ball_axes, ball_lp_norm, tensor_points, Ball, Exponent, Samples2};
use grushin::kernel::{dispersive_constant, kernel_propagate, schrodinger_kernel_strip, KernelQuadratureConfig, SourceQuadrature, StripKernelQuery};
use grushin::quadrature::gauss_legendre;
use grushin::{Error, Field, Result, C64};
use rand::Rng;

fn check_local(cfg: &ExperimentConfig) -> Result<()> {
    let p = &cfg.params;
    let n = cfg.n as f64;
    if !(p.k > 0.0 && p.k < n) {
        return Err(Error::Configuration(format!("need 0 < k < n, got k = {} with n = {}", p.k, cfg.n)));
    }
    if !(p.r0 > 0.0) {
        return Err(Error::Configuration(format!("need R0 > 0, got {}", p.r0)));
    }
    Ok(())
}

/// `C_k R₀ = 2R₀/(n−k)`, the smallest admissible `|s|`.
fn s_min(cfg: &ExperimentConfig) -> f64 {
    2.0 * cfg.params.r0 / (cfg.n as f64 - cfg.params.k)
}

fn datum(cfg: &ExperimentConfig) -> Result<Field> {
    let p = &cfg.params;
    if p.zero_datum {
        let ball = Ball::new(p.w0.clone(), p.r0)?;
        return Ok(Field::compact(cfg.n, ball, |_, _| C64::new(0.0, 0.0)));
    }
    bump_datum(cfg.n, &p.w0, p.r0, p.sigma)
}

/// `e^{−isG}f` sampled on the bounding grid of `B(w₀, ½k|s|)`; only points
/// inside the ball are propagated.
fn propagate_on_ball(cfg: &ExperimentConfig, f: &Field, s: f64, per_axis: usize, order: usize) -> Result<(Samples2, Ball)> {
    let n = cfg.n;
    let ball = Ball::new(cfg.params.w0.clone(), 0.5 * cfg.params.k * s.abs())?;
    let axes = ball_axes(&ball, per_axis);
    let (x_points, x_weights) = tensor_points(n, &axes[0]);
    // every x axis has the same extent only when w₀ is centered; shift per axis
    let x_points: Vec<Vec<f64>> = x_points
        .into_iter()
        .map(|x| x.iter().enumerate().map(|(j, v)| v - ball.center[0] + ball.center[j]).collect())
        .collect();
    let t_axis = &axes[n];
    let mut targets = Vec::new();
    let mut slots = Vec::new();
    for (it, &t) in t_axis.nodes.iter().enumerate() {
        for (ix, x) in x_points.iter().enumerate() {
            if ball.contains(x, t) {
                targets.push((x.clone(), t));
                slots.push(it * x_points.len() + ix);
            }
        }
    }
    let vals = kernel_propagate(f, s, &targets, &KernelQuadratureConfig::default(), &SourceQuadrature { order })?;
    let mut values = vec![C64::new(0.0, 0.0); x_points.len() * t_axis.nodes.len()];
    for (slot, v) in slots.into_iter().zip(vals) {
        values[slot] = v;
    }
    let extent = axes.iter().map(|a| (a.lo, a.hi)).collect();
    let u = Samples2 { n, x_points, x_weights, t_nodes: t_axis.nodes.clone(), t_weights: t_axis.weights.clone(), extent, values };
    Ok((u, ball))
}

/// Rows of the local dispersive estimate: `‖u(s)‖_{L^p(B(w₀,½k|s|))}` against
/// `(M/|s|^{n/2+1})^{1−2/p}‖f‖_{p′}`, then the kernel bound on sampled strip points.
pub fn verify_dispersive(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    check_local(cfg)?;
    let n = cfg.n;
    let p = &cfg.params;
    let res = cfg.refined_resolution();
    if p.s.is_empty() || p.p.is_empty() {
        return Err(Error::Configuration("dispersive needs non-empty s and p lists".into()));
    }
    let smin = s_min(cfg);
    if let Some(s) = p.s.iter().find(|s| !(s.abs() >= smin)) {
        return Err(Error::Configuration(format!("s = {s} violates |s| ≥ 2R0/(n−k) = {smin}")));
    }
    if p.p.iter().any(|e| e.0 < 2.0) {
        return Err(Error::Configuration("dispersive exponents must satisfy p ≥ 2".into()));
    }
    let f = datum(cfg)?;
    let support = f.support.clone().expect("compact datum");
    let m = dispersive_constant(n);
    let h = n as f64 / 2.0 + 1.0;
    let mut rows = Vec::new();
    let mut decay = Vec::new();
    for &s in &p.s {
        let (u, ball) = propagate_on_ball(cfg, &f, s, res.x_count, res.box_order)?;
        for &e in &p.p {
            let lhs = ball_lp_norm(&u, e, &ball)?;
            let fp = compact_lp_norm(&f, &support, res.box_order, e.conjugate())?;
            let rhs = (m / s.abs().powf(h)).powf(1.0 - 2.0 * e.recip()) * fp;
            rows.push(ReportRow::bound("dispersive", params!("s" => s, "p" => e), lhs, rhs, cfg.tol));
            if e.is_infinite() {
                decay.push((s, lhs * s.abs().powf(h), m * fp));
            }
        }
    }
    for (s, scaled, bound) in decay {
        rows.push(ReportRow::bound("dispersive_decay", params!("s" => s, "p" => "inf"), scaled, bound, cfg.tol));
    }
    rows.push(kernel_bound_row(cfg, m)?);
    Ok(rows)
}

/// `sup |H_s|·|s|^{n/2+1}` over seeded strip points with `|t−t₁| ≤ n|s|/2`, against `M`.
fn kernel_bound_row(cfg: &ExperimentConfig, m: f64) -> Result<ReportRow> {
    let n = cfg.n;
    let p = &cfg.params;
    let mut r = rng(cfg.seed, 11);
    let (lo, hi) = p.s.iter().fold((f64::INFINITY, 0.0f64), |(a, b), s| (a.min(s.abs()), b.max(s.abs())));
    let kq = KernelQuadratureConfig::default();
    let mut sup = 0.0f64;
    for _ in 0..p.kernel_samples {
        let s = if hi > lo { r.random_range(lo..hi) } else { lo } * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let t1 = r.random_range(-1.0..1.0);
        let t = t1 + r.random_range(-1.0..1.0) * 0.5 * n as f64 * s.abs();
        let q = StripKernelQuery::new((x, t), (y, t1), s)?;
        let v = schrodinger_kernel_strip(&q, &kq)?.norm() * s.abs().powf(n as f64 / 2.0 + 1.0);
        sup = sup.max(v);
    }
    Ok(ReportRow::bound("dispersive_kernel", params!("samples" => p.kernel_samples), sup, m, cfg.tol))
}

/// Constant `C(q,k)` of the local Strichartz bound, from the dispersive
/// estimate, Hölder on `B(w₀,R₀)` and the `s`-integral over `|s| ≥ C_kR₀`.
pub fn strichartz_constant(n: usize, q: Exponent, k: f64, r0: f64) -> f64 {
    if q.is_infinite() {
        return 1.0;
    }
    let m = dispersive_constant(n);
    let a = 2.0 * r0 / (n as f64 - k);
    let d = n as f64 + 1.0;
    let vol = ball_volume(n + 1, r0);
    (m * m * vol * 2.0 * a.powf(-d) / d).powf(q.recip())
}

fn check_a0(pair: (Exponent, Exponent)) -> Result<()> {
    let (p, q) = pair;
    if !(p.0 >= 2.0) || (p.recip() + q.recip() - 0.5).abs() > 1e-12 {
        return Err(Error::Configuration(format!(
            "pair (p,q) = ({p},{q}) is not in A0: need 2 ≤ p ≤ ∞ and 1/p + 1/q = 1/2, got 1/p + 1/q = {}",
            p.recip() + q.recip()
        )));
    }
    Ok(())
}

/// Rows of the local Strichartz estimate over `C_kR₀ ≤ |s| ≤ S`, and the
/// change of the left side when `S` doubles.
pub fn verify_local_strichartz(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    check_local(cfg)?;
    let n = cfg.n;
    let p = &cfg.params;
    let res = cfg.refined_resolution();
    if p.pairs.is_empty() {
        return Err(Error::Configuration("local_strichartz needs at least one (p,q) pair".into()));
    }
    for &pair in &p.pairs {
        check_a0(pair)?;
    }
    let a = s_min(cfg);
    let smax = res.s_max;
    if !(smax > a) {
        return Err(Error::Configuration(format!("S = {smax} must exceed C_k R0 = {a}")));
    }
    let f = datum(cfg)?;
    let support = f.support.clone().expect("compact datum");
    let f2 = compact_lp_norm(&f, &support, res.box_order, Exponent(2.0))?;
    // Gauss–Legendre in ln s on [a, S] and on [S, 2S]
    let (near, near_w) = gauss_legendre(res.s_count, a.ln(), smax.ln())?;
    let (far, far_w) = gauss_legendre(res.s_count.div_ceil(2).max(2), smax.ln(), (2.0 * smax).ln())?;
    let exps: Vec<Exponent> = {
        let mut v: Vec<Exponent> = Vec::new();
        for pq in &p.pairs {
            if !v.contains(&pq.0) {
                v.push(pq.0);
            }
        }
        v
    };
    // ‖u(s)‖_{L^p(B(w₀,½ks))} per node and exponent
    let norms = |nodes: &[f64]| -> Result<Vec<Vec<f64>>> {
        nodes
            .iter()
            .map(|&ls| {
                let s = ls.exp();
                let (u, ball) = propagate_on_ball(cfg, &f, s, res.x_count, res.box_order)?;
                exps.iter().map(|&e| ball_lp_norm(&u, e, &ball)).collect()
            })
            .collect()
    };
    let nn = norms(&near)?;
    let nf = norms(&far)?;
    // f is real, so |u(−s)| = |u(s)|: both half-lines contribute equally
    let outer = |vals: &[Vec<f64>], nodes: &[f64], w: &[f64], ie: usize, q: Exponent| -> f64 {
        if q.is_infinite() {
            vals.iter().map(|v| v[ie]).fold(0.0, f64::max)
        } else {
            2.0 * vals.iter().zip(nodes).zip(w).map(|((v, &ls), &wi)| wi * ls.exp() * v[ie].powf(q.0)).sum::<f64>()
        }
    };
    let mut rows = Vec::new();
    for &(pe, q) in &p.pairs {
        let ie = exps.iter().position(|&e| e == pe).expect("exponent listed");
        let i_near = outer(&nn, &near, &near_w, ie, q);
        let i_far = outer(&nf, &far, &far_w, ie, q);
        let (lhs, lhs2) = if q.is_infinite() { (i_near, i_near.max(i_far)) } else { (i_near.powf(q.recip()), (i_near + i_far).powf(q.recip())) };
        let c = strichartz_constant(n, q, p.k, p.r0);
        let tag = params!("p" => pe, "q" => q, "S" => smax);
        rows.push(ReportRow::bound("local_strichartz", tag.clone(), lhs, c * f2, 1e-6));
        let change = if lhs2 > 0.0 { (lhs2 - lhs).abs() / lhs2 } else { 0.0 };
        rows.push(ReportRow::bound("local_strichartz_truncation", params!("p" => pe, "q" => q, "S" => 2.0 * smax), change, cfg.tol, 0.0));
    }
    Ok(rows)
}
