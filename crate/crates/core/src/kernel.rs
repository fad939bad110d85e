//! Heat and Schrödinger kernels of G by direct λ-quadrature.

use crate::error::{Error, Result};
use crate::exec;
use crate::field::Field;
use crate::hermite::hermite_functions;
use crate::quadrature::{composite_gauss_legendre, gauss_legendre, integrate_adaptive};
use crate::special::{lambda_coth, lambda_over_sinh};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<usize> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Parameter(format!("points have dimensions {} and {}", x.len(), y.len())));
    }
    Ok(x.len())
}

/// Smallest Λ ≥ 1 with `(2Λ)^{n/2} e^{−gΛ} < τ`.
pub fn envelope_cutoff(n: usize, gap: f64, tolerance: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("envelope decay rate must be positive, got {gap}")));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::Parameter(format!("tolerance must lie in (0, 1), got {tolerance}")));
    }
    let h = n as f64 / 2.0;
    let mut l = (1.0f64).max((1.0 / tolerance).ln() / gap);
    for _ in 0..100 {
        let next = (1.0f64).max(((1.0 / tolerance).ln() + h * (2.0 * l).ln()) / gap);
        if (next - l).abs() < 1e-12 * l {
            l = next;
            break;
        }
        l = next;
    }
    // step past the root so the strict inequality holds
    let l = l * (1.0 + 1e-9) + 1e-9;
    debug_assert!(envelope(n, gap, l) < tolerance);
    Ok(l)
}

fn envelope(n: usize, gap: f64, l: f64) -> f64 {
    (2.0 * l).powf(n as f64 / 2.0) * (-gap * l).exp()
}

/// Heat kernel `K_s(x,t; y,t₁)` by Mehler's closed form in `λ`.
pub fn heat_kernel_mehler(x: &[f64], t: f64, y: &[f64], t1: f64, s: f64) -> Result<f64> {
    let n = check_pair(x, y)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("heat kernel needs s > 0, got {s}")));
    }
    let (r2, xy, dt) = (dot(x, x) + dot(y, y), dot(x, y), t - t1);
    let h = n as f64 / 2.0;
    let big = envelope_cutoff(n, n as f64 * s, 1e-17)? / s.min(1.0);
    // λ = μ² on [0, Λ]; the −λ half is the complex conjugate
    let f = |mu: f64| {
        let l = mu * mu;
        let a = lambda_over_sinh(s * l) / s;
        let c = lambda_coth(s * l) / s;
        let v = a.powf(h) * (-0.5 * c * r2 + a * xy).exp() * 2.0 * mu;
        C64::new(v * (l * dt).cos(), 0.0)
    };
    let (v, _) = integrate_adaptive(f, 0.0, big.sqrt(), 1e-15, 1e-13, 32)?;
    Ok(2.0 * v.re / (2.0 * PI).powf(h + 1.0))
}

/// Same kernel through the rescaled variable `sλ`.
pub fn heat_kernel_mehler_rescaled(x: &[f64], t: f64, y: &[f64], t1: f64, s: f64) -> Result<f64> {
    let n = check_pair(x, y)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("heat kernel needs s > 0, got {s}")));
    }
    let (r2, xy, dt) = (dot(x, x) + dot(y, y), dot(x, y), t - t1);
    let h = n as f64 / 2.0;
    let big = envelope_cutoff(n, n as f64, 1e-17)?;
    let f = |mu: f64| {
        let l = mu * mu;
        let a = lambda_over_sinh(l);
        let c = lambda_coth(l);
        let v = a.powf(h) * ((-0.5 * c * r2 + a * xy) / s).exp() * 2.0 * mu;
        C64::new(v * (l * dt / s).cos(), 0.0)
    };
    let (v, _) = integrate_adaptive(f, 0.0, big.sqrt(), 1e-15, 1e-13, 32)?;
    Ok(2.0 * v.re / (2.0 * PI * s).powf(h + 1.0))
}

/// Accuracy options for the truncated Hermite heat series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    /// Combine truncations `K`, `K/2`, `K/4` as `(8S_K − 6S_{K/2} + S_{K/4})/3`.
    pub richardson: bool,
    pub panels: usize,
    pub order: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { richardson: false, panels: 200, order: 16 }
    }
}

/// Per-degree sums `Σ_{|α|=k} Φ_α^λ(x)Φ_α^λ(y)` for `k ≤ K`.
fn block_products(x: &[f64], y: &[f64], lambda: f64, kmax: usize, hx: &mut [f64], hy: &mut [f64]) -> Vec<f64> {
    let a = lambda.abs();
    let r = a.sqrt();
    let mut acc = vec![0.0; kmax + 1];
    acc[0] = 1.0;
    for (xi, yi) in x.iter().zip(y) {
        hermite_functions(r * xi, hx);
        hermite_functions(r * yi, hy);
        let p: Vec<f64> = hx.iter().zip(hy.iter()).map(|(u, v)| u * v * r).collect();
        let mut next = vec![0.0; kmax + 1];
        for (i, &ai) in acc.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &pj) in p[..=kmax - i].iter().enumerate() {
                next[i + j] += ai * pj;
            }
        }
        acc = next;
    }
    acc
}

/// Heat kernel from the truncated series `Σ_{|α|≤K} e^{−s(2|α|+n)|λ|}Φ_α^λ(x)Φ_α^λ(y)`.
pub fn heat_kernel_series(x: &[f64], t: f64, y: &[f64], t1: f64, s: f64, kmax: usize) -> Result<f64> {
    heat_kernel_series_with(x, t, y, t1, s, kmax, SeriesOptions::default())
}

pub fn heat_kernel_series_with(x: &[f64], t: f64, y: &[f64], t1: f64, s: f64, kmax: usize, opts: SeriesOptions) -> Result<f64> {
    let n = check_pair(x, y)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("heat kernel needs s > 0, got {s}")));
    }
    if opts.richardson && kmax < 4 {
        return Err(Error::Parameter(format!("Richardson extrapolation needs K ≥ 4, got {kmax}")));
    }
    let dt = t - t1;
    // |λ|^{n/2} e^{−ns|λ|} bounds the integrand
    let big = envelope_cutoff(n, n as f64 * s, 1e-17)?;
    let (mus, ws) = composite_gauss_legendre(opts.order, opts.panels, 0.0, big.sqrt())?;
    let levels: Vec<usize> = if opts.richardson { vec![kmax / 4, kmax / 2, kmax] } else { vec![kmax] };
    let parts = exec::map_range(mus.len(), |i| {
        let mu = mus[i];
        let l = mu * mu;
        let mut hx = vec![0.0; kmax + 1];
        let mut hy = vec![0.0; kmax + 1];
        let b = block_products(x, y, l, kmax, &mut hx, &mut hy);
        let scale = ws[i] * 2.0 * mu * (l * dt).cos();
        let mut out = vec![0.0; levels.len()];
        let mut partial = 0.0;
        let mut lev = 0;
        for (k, bk) in b.iter().enumerate() {
            partial += (-s * (2 * k + n) as f64 * l).exp() * bk;
            while lev < levels.len() && levels[lev] == k {
                out[lev] = partial * scale;
                lev += 1;
            }
        }
        out
    });
    let sums: Vec<f64> = (0..levels.len()).map(|j| parts.iter().map(|p| p[j]).sum::<f64>()).collect();
    let v = if opts.richardson { (8.0 * sums[2] - 6.0 * sums[1] + sums[0]) / 3.0 } else { sums[0] };
    Ok(2.0 * v / (2.0 * PI))
}

/// Source `(y, t₁)`, target `(x, t)` and time `s` of a Schrödinger kernel query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripKernelQuery {
    pub source: (Vec<f64>, f64),
    pub target: (Vec<f64>, f64),
    pub s: f64,
}

impl StripKernelQuery {
    pub fn new(target: (Vec<f64>, f64), source: (Vec<f64>, f64), s: f64) -> Result<Self> {
        let q = Self { source, target, s };
        q.validate()?;
        Ok(q)
    }

    pub fn dimension(&self) -> usize {
        self.target.0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = check_pair(&self.target.0, &self.source.0)?;
        strip_check(n, self.target.1, self.source.1, self.s)
    }
}

fn strip_check(n: usize, t: f64, t1: f64, s: f64) -> Result<()> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!("kernel time must be finite and nonzero, got {s}")));
    }
    let d = (t - t1).abs();
    if !(d < n as f64 * s.abs()) {
        return Err(Error::Domain(format!(
            "strip condition |t−t₁| < n|s| violated: |{t} − {t1}| = {d} ≥ {n}·{}",
            s.abs()
        )));
    }
    Ok(())
}

/// λ-quadrature settings for the strip kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuadratureConfig {
    /// Λ; `None` picks it from the envelope and `tolerance`.
    pub lambda_cutoff: Option<f64>,
    /// Gauss–Legendre nodes per unit length in λ.
    pub nodes_per_unit: usize,
    pub tolerance: f64,
}

impl Default for KernelQuadratureConfig {
    fn default() -> Self {
        Self { lambda_cutoff: None, nodes_per_unit: 24, tolerance: 1e-10 }
    }
}

impl KernelQuadratureConfig {
    /// Λ for envelope rate `n − d/|s|`, checked against the tolerance.
    pub fn cutoff(&self, n: usize, dt_max: f64, s: f64) -> Result<f64> {
        if self.nodes_per_unit == 0 {
            return Err(Error::Configuration("nodes_per_unit must be positive".into()));
        }
        let gap = n as f64 - dt_max / s.abs();
        if !(gap > 0.0) {
            return Err(Error::Domain(format!("strip condition |t−t₁| < n|s| violated: {dt_max} ≥ {n}·{}", s.abs())));
        }
        match self.lambda_cutoff {
            None => envelope_cutoff(n, gap, self.tolerance),
            Some(l) => {
                let e = envelope(n, gap, l);
                if !(l > 0.0) || !(e < self.tolerance) {
                    return Err(Error::Configuration(format!(
                        "envelope (2Λ)^(n/2)·e^(−(n−|t−t₁|/|s|)Λ) = {e:.3e} at Λ = {l} is not below tolerance {}",
                        self.tolerance
                    )));
                }
                Ok(l)
            }
        }
    }

    fn rule(&self, big: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let panels = (2.0 * big).ceil() as usize;
        composite_gauss_legendre(self.nodes_per_unit, panels, -big, big)
    }
}

/// `(2π i s)^{−(n/2+1)}` on the principal branch.
fn strip_prefactor(n: usize, s: f64) -> C64 {
    C64::new(0.0, 2.0 * PI * s).powf(-(n as f64 / 2.0 + 1.0))
}

/// Grushin–Schrödinger kernel `H_s(x,t; y,t₁)` on the strip `|t−t₁| < n|s|`.
pub fn schrodinger_kernel_strip(q: &StripKernelQuery, cfg: &KernelQuadratureConfig) -> Result<C64> {
    q.validate()?;
    let n = q.dimension();
    let ((x, t), (y, t1), s) = (&q.target, &q.source, q.s);
    let big = cfg.cutoff(n, (t - t1).abs(), s)?;
    let (ls, ws) = cfg.rule(big)?;
    let (r2, xy, dt) = (dot(x, x) + dot(y, y), dot(x, y), t - t1);
    let h = n as f64 / 2.0;
    let v: C64 = ls
        .iter()
        .zip(&ws)
        .map(|(&l, &w)| {
            let a = lambda_over_sinh(l);
            let c = lambda_coth(l);
            let phase = (c * r2 - 2.0 * a * xy) / (2.0 * s);
            C64::from_polar(w * a.powf(h) * (-l * dt / s).exp(), phase)
        })
        .sum();
    Ok(v * strip_prefactor(n, s))
}

/// Constant `M` of the local dispersive bound `|H_s| ≤ M/|s|^{n/2+1}` on `|t−t₁| ≤ n|s|/2`.
pub fn dispersive_constant(n: usize) -> f64 {
    let big = envelope_cutoff(n, n as f64 / 2.0, 1e-18).expect("positive rate");
    dispersive_constant_with_cutoff(n, big).expect("valid cutoff")
}

pub fn dispersive_constant_with_cutoff(n: usize, big: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let h = n as f64 / 2.0;
    let f = |l: f64| C64::new(lambda_over_sinh(l).powf(h) * (h * l).exp(), 0.0);
    let (v, _) = integrate_adaptive(f, 0.0, big, 1e-16, 1e-15, 64)?;
    Ok(2.0 * v.re / (2.0 * PI).powf(h + 1.0))
}

/// Source quadrature for [`kernel_propagate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceQuadrature {
    /// Gauss–Legendre nodes per axis over the support's bounding box.
    pub order: usize,
}

impl Default for SourceQuadrature {
    fn default() -> Self {
        Self { order: 120 }
    }
}

/// `u(x,t) = ∫∫ H_s(x,t; y,t₁) f(y,t₁) dy dt₁` at each target.
pub fn kernel_propagate(
    f: &Field,
    s: f64,
    targets: &[(Vec<f64>, f64)],
    cfg: &KernelQuadratureConfig,
    src: &SourceQuadrature,
) -> Result<Vec<C64>> {
    let n = f.n;
    let ball = f
        .support
        .as_ref()
        .ok_or_else(|| Error::Parameter("kernel propagation needs a compactly supported field".into()))?;
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!("kernel time must be finite and nonzero, got {s}")));
    }
    let tc = ball.center[n];
    let mut dt_max: f64 = 0.0;
    for (x, t) in targets {
        if x.len() != n {
            return Err(Error::Parameter(format!("target {x:?} has dimension {}, expected {n}", x.len())));
        }
        // farthest source time from this target
        let t1 = if *t >= tc { tc - ball.radius } else { tc + ball.radius };
        strip_check(n, *t, t1, s).map_err(|e| Error::Domain(format!("target ({x:?}, {t}) with source time {t1}: {e}")))?;
        dt_max = dt_max.max((t - t1).abs());
    }
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let big = cfg.cutoff(n, dt_max, s)?;
    let (ls, lw) = cfg.rule(big)?;

    let (tn, tw) = gauss_legendre(src.order, tc - ball.radius, tc + ball.radius)?;
    let (rn, rw) = gauss_legendre(src.order, -ball.radius, ball.radius)?;
    let (mut ys, yw) = crate::hermite::tensor_rule(n, &rn, &rw);
    for y in ys.iter_mut() {
        for (yi, ci) in y.iter_mut().zip(&ball.center[..n]) {
            *yi += ci;
        }
    }

    // G(λ, y) = Σ_{t₁} w e^{λ(t₁−t_c)/s} f(y, t₁)
    let fvals: Vec<Vec<C64>> = exec::map_slice(&ys, |y| tn.iter().map(|&t1| f.eval(y, t1)).collect());
    let g: Vec<Vec<C64>> = exec::map_slice(&ls, |&l| {
        let e: Vec<f64> = tn.iter().zip(&tw).map(|(&t1, &w)| w * (l * (t1 - tc) / s).exp()).collect();
        fvals.iter().zip(&yw).map(|(row, &wy)| row.iter().zip(&e).map(|(v, &ei)| v * ei).sum::<C64>() * wy).collect()
    });
    let h = n as f64 / 2.0;
    let coef: Vec<(f64, f64, f64)> = ls
        .iter()
        .zip(&lw)
        .map(|(&l, &w)| (lambda_coth(l), lambda_over_sinh(l), w * lambda_over_sinh(l).powf(h)))
        .collect();
    let y2: Vec<f64> = ys.iter().map(|y| dot(y, y)).collect();
    let pref = strip_prefactor(n, s);

    // the y-sum depends on x only; evaluate it once per distinct x
    let mut xs: Vec<&Vec<f64>> = targets.iter().map(|(x, _)| x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup();
    let inner: Vec<Vec<C64>> = exec::map_slice(&xs, |x| {
        let x2 = dot(x, x);
        let xy: Vec<f64> = ys.iter().map(|y| dot(x, y)).collect();
        coef.iter()
            .zip(&g)
            .map(|(&(c, a, _), gl)| {
                gl.iter()
                    .zip(&y2)
                    .zip(&xy)
                    .map(|((gv, &yy), &xyv)| gv * C64::from_polar(1.0, (c * (x2 + yy) - 2.0 * a * xyv) / (2.0 * s)))
                    .sum()
            })
            .collect()
    });
    Ok(targets
        .iter()
        .map(|(x, t)| {
            let ix = xs.binary_search_by(|p| p.as_slice().partial_cmp(x.as_slice()).unwrap_or(std::cmp::Ordering::Equal)).expect("x present");
            let v: C64 = coef
                .iter()
                .zip(&ls)
                .zip(&inner[ix])
                .map(|((&(_, _, w), &l), iv)| iv * (w * (-l * (t - tc) / s).exp()))
                .sum();
            v * pref
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn mehler_symmetry_and_rescaled_form() {
        let (x, y) = ([0.3], [-0.2]);
        let a = heat_kernel_mehler(&x, 0.1, &y, 0.4, 0.5).unwrap();
        let b = heat_kernel_mehler(&y, 0.4, &x, 0.1, 0.5).unwrap();
        let c = heat_kernel_mehler_rescaled(&x, 0.1, &y, 0.4, 0.5).unwrap();
        assert!((a - b).abs() < 1e-10);
        assert!((a - c).abs() < 1e-10, "{a} {c}");
        assert!(heat_kernel_mehler(&x, 0.0, &y, 0.0, 0.0).is_err());
    }

    #[test]
    fn single_mode_series_matches_closed_form() {
        // (1/2π)∫ π^{−1/2}|λ|^{1/2} e^{−a|λ|} e^{−iλΔt} dλ = π^{−3/2} Re Γ(3/2)(a + iΔt)^{−3/2}
        let (x, y, dt, s): (f64, f64, f64, f64) = (0.3, -0.2, -0.3, 0.5);
        let a = s + 0.5 * (x * x + y * y);
        let want = PI.powf(-1.5) * (gamma(1.5) * C64::new(a, dt).powf(-1.5)).re;
        let got = heat_kernel_series(&[x], 0.1, &[y], 0.4, s, 0).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} {want}");
    }

    #[test]
    fn series_in_two_dimensions_matches_mehler() {
        let (x, y) = ([0.3, -0.1], [-0.2, 0.25]);
        let opts = SeriesOptions { richardson: true, ..Default::default() };
        let a = heat_kernel_series_with(&x, 0.2, &y, -0.1, 1.0, 128, opts).unwrap();
        let b = heat_kernel_mehler(&x, 0.2, &y, -0.1, 1.0).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn strip_kernel_rejects_boundary_and_conjugates() {
        let cfg = KernelQuadratureConfig::default();
        assert!(StripKernelQuery::new((vec![0.0], 1.0), (vec![0.0], 0.0), 1.0).is_err());
        let q = StripKernelQuery::new((vec![0.4], 0.3), (vec![-0.2], 0.1), 1.5).unwrap();
        let qm = StripKernelQuery { s: -1.5, ..q.clone() };
        let a = schrodinger_kernel_strip(&q, &cfg).unwrap();
        let b = schrodinger_kernel_strip(&qm, &cfg).unwrap();
        assert!((a - b.conj()).norm() < 1e-10);
        let fixed = KernelQuadratureConfig { lambda_cutoff: Some(2.0), ..cfg };
        assert!(matches!(schrodinger_kernel_strip(&q, &fixed), Err(Error::Configuration(_))));
        let denser = KernelQuadratureConfig { nodes_per_unit: 48, ..cfg };
        assert!((schrodinger_kernel_strip(&q, &denser).unwrap() - a).norm() < cfg.tolerance);
    }

    #[test]
    fn dispersive_constant_is_stable() {
        let m = dispersive_constant(1);
        let a = dispersive_constant_with_cutoff(1, 60.0).unwrap();
        let b = dispersive_constant_with_cutoff(1, 90.0).unwrap();
        assert!(m > 0.0 && (a - b).abs() < 1e-10 && (m - b).abs() < 1e-12);
        // cutting at 30 drops a tail bounded by 2(2π)^{−3/2}∫_30^∞ √(2λ)e^{−λ/2} dλ
        let c = dispersive_constant_with_cutoff(1, 30.0).unwrap();
        let (tail, _) = integrate_adaptive(|l| C64::new((2.0 * l).sqrt() * (-0.5 * l).exp(), 0.0), 30.0, 200.0, 1e-18, 1e-14, 16).unwrap();
        let bound = 2.0 * tail.re / (2.0 * PI).powf(1.5);
        assert!(m - c > 0.0 && m - c <= bound);
    }

    #[test]
    fn envelope_cutoff_satisfies_bound() {
        for &(n, g, tol) in &[(1usize, 0.5, 1e-10), (2, 0.1, 1e-8), (3, 2.0, 1e-14)] {
            let l = envelope_cutoff(n, g, tol).unwrap();
            assert!(envelope(n, g, l) < tol);
            assert!(envelope(n, g, 0.99 * l) >= tol || l <= 1.01);
        }
    }
}
