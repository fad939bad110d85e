//! Normalized Hermite functions, scaled Hermite functions, multi-indices,
//! Laguerre polynomials and the eigenspace projections `P_k(λ)`.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite_rule, gauss_legendre, GaussHermiteRule};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const RESCALE_HI: f64 = 1e150;
const LN_RESCALE: f64 = 345.38776394910684; // ln(1e150)

/// Fill `out[k] = h_k(x)` for `k < out.len()`.
///
/// The recurrence runs on normalized functions with a running exponent so
/// that neither the Gaussian seed underflows nor the iterates overflow.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -0.5 * x * x;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = cur * factor;
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_HI {
            cur /= RESCALE_HI;
            prev /= RESCALE_HI;
            log_scale += LN_RESCALE;
            factor = log_scale.exp();
        }
        out[k + 1] = if factor > 0.0 || cur == 0.0 {
            cur * factor
        } else {
            cur.signum() * (log_scale + cur.abs().ln()).exp()
        };
    }
}

/// `h_k(x)` alone.
pub fn hermite_eval(k: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; k + 1];
    hermite_functions(x, &mut buf);
    buf[k]
}

/// Truncated Hermite basis on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermiteBasis {
    pub max_index: usize,
    pub dimension: usize,
}

impl HermiteBasis {
    pub fn new(max_index: usize, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        Ok(Self { max_index, dimension })
    }

    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        if k > self.max_index {
            return Err(Error::Index(format!("k = {k} exceeds K = {}", self.max_index)));
        }
        Ok(hermite_eval(k, x))
    }

    /// Past this point in `√|λ|·|x_j|` every basis function is treated as 0.
    pub fn cutoff(&self) -> f64 {
        (2.0 * self.max_index as f64).sqrt() + 12.0
    }

    /// `Φ_α^λ(x)`, with the tail cutoff applied per coordinate.
    pub fn scaled_eval(&self, alpha: &[usize], lambda: f64, x: &[f64]) -> Result<f64> {
        if alpha.len() != self.dimension || x.len() != self.dimension {
            return Err(Error::Parameter("multi-index or point has wrong dimension".into()));
        }
        if let Some(&a) = alpha.iter().find(|&&a| a > self.max_index) {
            return Err(Error::Index(format!("α entry {a} exceeds K = {}", self.max_index)));
        }
        let sqrt_l = check_lambda(lambda)?.sqrt();
        let cut = self.cutoff();
        if x.iter().any(|&xj| sqrt_l * xj.abs() > cut) {
            return Ok(0.0);
        }
        Ok(scaled_hermite_unchecked(alpha, lambda, x))
    }
}

pub fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!("λ must be a nonzero real, got {lambda}")));
    }
    Ok(lambda.abs())
}

/// `Φ_α^λ(x) = |λ|^{n/4} ∏ h_{α_j}(√|λ| x_j)`.
pub fn scaled_hermite_eval(alpha: &[usize], lambda: f64, x: &[f64]) -> Result<f64> {
    if alpha.len() != x.len() {
        return Err(Error::Parameter("multi-index and point lengths differ".into()));
    }
    check_lambda(lambda)?;
    Ok(scaled_hermite_unchecked(alpha, lambda, x))
}

fn scaled_hermite_unchecked(alpha: &[usize], lambda: f64, x: &[f64]) -> f64 {
    let a = lambda.abs();
    let s = a.sqrt();
    let mut v = a.powf(0.25 * alpha.len() as f64);
    for (&k, &xj) in alpha.iter().zip(x) {
        v *= hermite_eval(k, s * xj);
    }
    v
}

/// All multi-indices with `|α| ≤ K` in graded lexicographic order: by degree,
/// then lexicographically with the first entry largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    n: usize,
    max_degree: usize,
    entries: Vec<u32>,
    block_start: Vec<usize>,
}

impl MultiIndexSet {
    pub fn new(n: usize, max_degree: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        let mut entries = Vec::new();
        let mut block_start = Vec::with_capacity(max_degree + 2);
        let mut count = 0;
        for k in 0..=max_degree {
            block_start.push(count);
            let mut cur = vec![0u32; n];
            push_compositions(k as u32, 0, &mut cur, &mut entries, &mut count);
        }
        block_start.push(count);
        Self { n, max_degree, entries, block_start }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.entries.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.get(i).iter().map(|&a| a as usize).sum()
    }

    /// Index range of the block `|α| = k`.
    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        self.block_start[k]..self.block_start[k + 1]
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        let k: u32 = alpha.iter().sum();
        if alpha.len() != self.n || k as usize > self.max_degree {
            return None;
        }
        self.block(k as usize).find(|&i| self.get(i) == alpha)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(self.n)
    }
}

fn push_compositions(rest: u32, j: usize, cur: &mut Vec<u32>, out: &mut Vec<u32>, count: &mut usize) {
    let n = cur.len();
    if j == n - 1 {
        cur[j] = rest;
        out.extend_from_slice(cur);
        *count += 1;
        return;
    }
    for a in (0..=rest).rev() {
        cur[j] = a;
        push_compositions(rest - a, j + 1, cur, out, count);
    }
}

/// Laguerre polynomials `L_k^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreBasis {
    pub type_parameter: f64,
    pub max_index: usize,
}

/// `L_k^δ(r)` by the three-term recurrence.
pub fn laguerre_eval(k: usize, delta: f64, r: f64) -> Result<f64> {
    if delta <= -1.0 {
        return Err(Error::Domain(format!("Laguerre type δ = {delta} must exceed −1")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("Laguerre argument r = {r} must be nonnegative")));
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + delta - r) * cur - (jf + delta) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Quadrature used for the inner products `⟨φ, Φ_α^λ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProjectionQuadrature {
    /// Gauss–Hermite in the variable `√|λ|x`, `order` nodes per axis.
    GaussHermite { order: usize },
    /// Gauss–Legendre on the box `[c−h, c+h]ⁿ`, for compactly supported φ.
    Box { center: f64, half_width: f64, order: usize },
}

/// `P_k(λ)φ` stored as its coefficients in the block `|α| = k`.
#[derive(Debug, Clone)]
pub struct ProjectedField {
    pub lambda: f64,
    pub alphas: Vec<Vec<usize>>,
    pub coefficients: Vec<C64>,
}

impl ProjectedField {
    pub fn eval(&self, x: &[f64]) -> C64 {
        self.alphas
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * scaled_hermite_unchecked(a, self.lambda, x))
            .sum()
    }

    /// ℓ² norm of the coefficients, which is the L² norm of the projection.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Tensor quadrature nodes/weights for unit-weight integrals over ℝⁿ.
pub(crate) fn tensor_rule(n: usize, nodes: &[f64], weights: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = nodes.len();
    let total = m.pow(n as u32);
    let mut pts = Vec::with_capacity(total);
    let mut ws = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut p = vec![0.0; n];
        let mut w = 1.0;
        for j in (0..n).rev() {
            let i = rem % m;
            rem /= m;
            p[j] = nodes[i];
            w *= weights[i];
        }
        pts.push(p);
        ws.push(w);
    }
    (pts, ws)
}

/// `P_k(λ)φ = Σ_{|α|=k} ⟨φ, Φ_α^λ⟩ Φ_α^λ` for φ on ℝⁿ.
pub fn projection_apply<F>(n: usize, k: usize, lambda: f64, phi: F, quad: ProjectionQuadrature) -> Result<ProjectedField>
where
    F: Fn(&[f64]) -> C64,
{
    let a = check_lambda(lambda)?;
    let set = MultiIndexSet::new(n, k);
    let alphas: Vec<Vec<usize>> = set.block(k).map(|i| set.get(i).iter().map(|&v| v as usize).collect()).collect();
    let (pts, ws) = match quad {
        ProjectionQuadrature::GaussHermite { order } => {
            let rule: GaussHermiteRule = gauss_hermite_rule(order)?;
            let s = a.sqrt();
            let (xi, w) = tensor_rule(n, &rule.nodes, &rule.unit_weights());
            let scale = a.powf(-0.5 * n as f64);
            let pts: Vec<Vec<f64>> = xi.into_iter().map(|p| p.into_iter().map(|v| v / s).collect()).collect();
            (pts, w.into_iter().map(|v| v * scale).collect::<Vec<_>>())
        }
        ProjectionQuadrature::Box { center, half_width, order } => {
            let (x, w) = gauss_legendre(order, center - half_width, center + half_width)?;
            tensor_rule(n, &x, &w)
        }
    };
    let coefficients = alphas
        .iter()
        .map(|al| {
            pts.iter()
                .zip(&ws)
                .map(|(p, &w)| phi(p) * (w * scaled_hermite_unchecked(al, lambda, p)))
                .sum()
        })
        .collect();
    Ok(ProjectedField { lambda, alphas, coefficients })
}
