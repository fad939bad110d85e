//! Scaled Hermite–Fourier transform on ℝ^{n+1} and ℝ^{n+2}, its inverse,
//! and the spectral realization of G.

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Decay, Field, Field3};
use crate::grid::{LambdaGrid, TimeGrid};
use crate::hermite::{hermite_functions, tensor_rule, MultiIndexSet};
use crate::quadrature::{gauss_hermite_rule, gauss_legendre};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// x-quadrature used for the inner products with `Φ_α^λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XRule {
    /// Gauss–Hermite at nodes scaled by `|λ|^{−1/2}`, or Gauss–Legendre on the
    /// support box for compact fields.
    #[default]
    Auto,
    GaussHermite,
    /// Gauss–Legendre on `[lo, hi]ⁿ`, whatever the field.
    Box { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub n: usize,
    pub max_degree: usize,
    pub lambda: LambdaGrid,
    pub time: TimeGrid,
    /// Gauss–Hermite nodes per x axis.
    pub x_order: usize,
    /// Gauss–Legendre nodes per axis for box rules.
    pub box_order: usize,
    #[serde(default)]
    pub x_rule: XRule,
}

impl TransformConfig {
    /// Desk-scale defaults: K = 128 for n = 1 and 32 for n = 2.
    pub fn default_for(n: usize) -> Self {
        let (k, x_order) = if n == 1 { (128, 192) } else { (32, 64) };
        Self {
            n,
            max_degree: k,
            lambda: LambdaGrid::uniform(160, 0.05).expect("valid grid"),
            time: TimeGrid::new(24.0, 256).expect("valid grid"),
            x_order,
            box_order: 96,
            x_rule: XRule::Auto,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if self.x_order == 0 || self.box_order == 0 {
            return Err(Error::Parameter("quadrature orders must be positive".into()));
        }
        Ok(())
    }
}

/// `f̂(α, λ_j)` over `|α| ≤ K` and a λ-grid; stored λ-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub n: usize,
    #[serde(rename = "K")]
    pub max_degree: usize,
    pub lambda_grid: LambdaGrid,
    pub values: Vec<C64>,
}

impl SpectralCoefficients {
    pub fn zeros(n: usize, max_degree: usize, lambda_grid: LambdaGrid) -> Self {
        let m = MultiIndexSet::new(n, max_degree).len();
        Self { n, max_degree, lambda_grid, values: vec![C64::new(0.0, 0.0); m * lambda_grid.len()] }
    }

    pub fn index_set(&self) -> MultiIndexSet {
        MultiIndexSet::new(self.n, self.max_degree)
    }

    pub fn modes(&self) -> usize {
        self.values.len() / self.lambda_grid.len()
    }

    /// `|α|` for each position of the index set.
    pub fn degrees(&self) -> Vec<usize> {
        let s = self.index_set();
        (0..s.len()).map(|i| s.degree(i)).collect()
    }

    pub fn row(&self, lambda_index: usize) -> &[C64] {
        let m = self.modes();
        &self.values[lambda_index * m..(lambda_index + 1) * m]
    }

    pub fn row_mut(&mut self, lambda_index: usize) -> &mut [C64] {
        let m = self.modes();
        &mut self.values[lambda_index * m..(lambda_index + 1) * m]
    }

    pub fn get(&self, lambda_index: usize, alpha_index: usize) -> C64 {
        self.values[lambda_index * self.modes() + alpha_index]
    }

    pub fn set(&mut self, lambda_index: usize, alpha_index: usize, v: C64) {
        let m = self.modes();
        self.values[lambda_index * m + alpha_index] = v;
    }

    pub fn validate(&self) -> Result<()> {
        let m = MultiIndexSet::new(self.n, self.max_degree).len();
        if self.values.len() != m * self.lambda_grid.len() {
            return Err(Error::Parameter(format!(
                "coefficient array has {} entries, expected {} modes × {} λ-nodes",
                self.values.len(),
                m,
                self.lambda_grid.len()
            )));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Evaluation("non-finite spectral coefficient".into()));
        }
        Ok(())
    }

    /// Multiply entry `(α, λ)` by `m(|α|, λ)`.
    pub fn map_multiplier(&self, m: impl Fn(usize, f64) -> C64 + Sync) -> Self {
        let deg = self.degrees();
        let grid = self.lambda_grid;
        let rows = exec::map_range(grid.len(), |j| {
            let l = grid.node(j);
            self.row(j).iter().zip(&deg).map(|(c, &k)| c * m(k, l)).collect::<Vec<_>>()
        });
        Self { values: rows.into_iter().flatten().collect(), ..self.clone() }
    }

    /// Discrete `‖f̂‖_{L²(ℕⁿ × ℝ*)}` with the λ-quadrature weights.
    pub fn l2_norm(&self) -> f64 {
        let terms: Vec<f64> = (0..self.lambda_grid.len())
            .map(|j| self.lambda_grid.weight(j) * self.row(j).iter().map(|c| c.norm_sqr()).sum::<f64>())
            .collect();
        exec::pairwise_sum(&terms).sqrt()
    }

    /// `‖f‖_{L²(ℝ^{n+1})}` predicted by Plancherel, `(2π)^{−1/2}‖f̂‖`.
    pub fn physical_l2_norm(&self) -> f64 {
        self.l2_norm() / (2.0 * PI).sqrt()
    }

    /// `Σ w_j Σ_α a·conj(b)`.
    pub fn inner(&self, other: &Self) -> C64 {
        (0..self.lambda_grid.len())
            .map(|j| self.row(j).iter().zip(other.row(j)).map(|(a, b)| a * b.conj()).sum::<C64>() * self.lambda_grid.weight(j))
            .sum()
    }

    /// `sup (1 + (2|α|+n)|λ|)^N |f̂(α,λ)| / |λ|^{n/4}` over the grid.
    pub fn decay_sup(&self, order: i32) -> f64 {
        let deg = self.degrees();
        let mut sup: f64 = 0.0;
        for j in 0..self.lambda_grid.len() {
            let l = self.lambda_grid.node(j).abs();
            for (c, &k) in self.row(j).iter().zip(&deg) {
                let w = (1.0 + (2 * k + self.n) as f64 * l).powi(order);
                sup = sup.max(w * c.norm() / l.powf(0.25 * self.n as f64));
            }
        }
        sup
    }

    pub fn inverse(&self) -> InverseField {
        InverseField { c: self.clone() }
    }
}

/// `(2|α|+n)|λ| · c(α, λ)`.
pub fn apply_g_spectral(c: &SpectralCoefficients) -> SpectralCoefficients {
    let n = c.n;
    c.map_multiplier(|k, l| C64::new((2 * k + n) as f64 * l.abs(), 0.0))
}

/// One-dimensional axis of the x-quadrature at a given λ.
#[derive(Debug, Clone)]
pub(crate) struct XPlan {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl XPlan {
    pub fn gauss_hermite(order: usize, lambda: f64) -> Result<Self> {
        let rule = gauss_hermite_rule(order)?;
        let s = lambda.abs().sqrt();
        Ok(Self { y: rule.nodes.iter().map(|v| v / s).collect(), w: rule.unit_weights_ref().iter().map(|v| v / s).collect() })
    }

    pub fn legendre(order: usize, lo: f64, hi: f64) -> Result<Self> {
        let (y, w) = gauss_legendre(order, lo, hi)?;
        Ok(Self { y, w })
    }

    pub fn tensor(&self, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        tensor_rule(n, &self.y, &self.w)
    }

    /// `T[a·(K+1)+k] = w_a · h_k(√|λ| y_a)`.
    pub fn weighted_table(&self, lambda: f64, kmax: usize) -> Vec<f64> {
        let s = lambda.abs().sqrt();
        let kp1 = kmax + 1;
        let mut t = vec![0.0; self.y.len() * kp1];
        for (a, (&y, &w)) in self.y.iter().zip(&self.w).enumerate() {
            let row = &mut t[a * kp1..(a + 1) * kp1];
            hermite_functions(s * y, row);
            row.iter_mut().for_each(|v| *v *= w);
        }
        t
    }
}

/// Contract a tensor sampled on `[N]ⁿ` against per-axis tables to all
/// coefficients `⟨g, Φ_α^λ⟩`, `|α| ≤ K`, in index-set order.
pub(crate) fn project_tensor(set: &MultiIndexSet, lambda: f64, table: &[f64], naxis: usize, g: &[C64]) -> Vec<C64> {
    let n = set.dimension();
    let kp1 = set.max_degree() + 1;
    let mut data = g.to_vec();
    let mut dims = vec![naxis; n];
    for axis in 0..n {
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let mut out = vec![C64::new(0.0, 0.0); outer * kp1 * inner];
        for o in 0..outer {
            for a in 0..naxis {
                let trow = &table[a * kp1..(a + 1) * kp1];
                let src = &data[(o * naxis + a) * inner..(o * naxis + a + 1) * inner];
                for (k, &tk) in trow.iter().enumerate() {
                    if tk == 0.0 {
                        continue;
                    }
                    let dst = &mut out[(o * kp1 + k) * inner..(o * kp1 + k + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * tk;
                    }
                }
            }
        }
        data = out;
        dims[axis] = kp1;
    }
    let pf = lambda.abs().powf(0.25 * n as f64);
    set.iter()
        .map(|alpha| {
            let mut idx = 0;
            for &a in alpha {
                idx = idx * kp1 + a as usize;
            }
            data[idx] * pf
        })
        .collect()
}

/// Values `Φ_α^λ(x)` for every α of the set.
pub(crate) fn basis_values(set: &MultiIndexSet, lambda: f64, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
    let n = set.dimension();
    let kp1 = set.max_degree() + 1;
    scratch.resize(n * kp1, 0.0);
    let a = lambda.abs();
    let s = a.sqrt();
    let cut = (2.0 * set.max_degree() as f64).sqrt() + 12.0;
    if x.iter().any(|&v| (s * v).abs() > cut) {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    for j in 0..n {
        hermite_functions(s * x[j], &mut scratch[j * kp1..(j + 1) * kp1]);
    }
    let pf = a.powf(0.25 * n as f64);
    for (i, alpha) in set.iter().enumerate() {
        let mut v = pf;
        for (j, &aj) in alpha.iter().enumerate() {
            v *= scratch[j * kp1 + aj as usize];
        }
        out[i] = v;
    }
}

enum Plan {
    Hermite,
    Fixed { axis: XPlan, t: Vec<f64>, tw: Vec<f64> },
}

fn check_field(decay: Decay, has_support: bool) -> Result<()> {
    if decay == Decay::Generic && !has_support {
        return Err(Error::Parameter("field declares neither decay nor support; truncation error is uncontrolled".into()));
    }
    Ok(())
}

/// Forward transform `f̂(α, λ_j) = ⟨f^{λ_j}, Φ_α^{λ_j}⟩`.
pub fn forward_transform(f: &Field, cfg: &TransformConfig) -> Result<SpectralCoefficients> {
    cfg.validate()?;
    if f.n != cfg.n {
        return Err(Error::Parameter(format!("field dimension {} differs from config dimension {}", f.n, cfg.n)));
    }
    check_field(f.decay, f.support.is_some())?;
    let n = cfg.n;
    let set = MultiIndexSet::new(n, cfg.max_degree);
    let grid = cfg.lambda;
    let (tg, tgw) = (cfg.time.nodes(), cfg.time.weights());

    let plan = match (cfg.x_rule, &f.support) {
        (XRule::GaussHermite, _) | (XRule::Auto, None) => Plan::Hermite,
        (XRule::Auto, Some(b)) => {
            let c = &b.center;
            if n > 1 && c[..n].iter().any(|&v| v != c[0]) {
                // one box for all axes; widen to cover every coordinate
                let lo = c[..n].iter().fold(f64::INFINITY, |m, &v| m.min(v)) - b.radius;
                let hi = c[..n].iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) + b.radius;
                let (t, tw) = gauss_legendre(cfg.box_order, c[n] - b.radius, c[n] + b.radius)?;
                Plan::Fixed { axis: XPlan::legendre(cfg.box_order, lo, hi)?, t, tw }
            } else {
                let (t, tw) = gauss_legendre(cfg.box_order, c[n] - b.radius, c[n] + b.radius)?;
                Plan::Fixed { axis: XPlan::legendre(cfg.box_order, c[0] - b.radius, c[0] + b.radius)?, t, tw }
            }
        }
        (XRule::Box { lo, hi }, support) => {
            let (t, tw) = match support {
                Some(b) => gauss_legendre(cfg.box_order, b.center[n] - b.radius, b.center[n] + b.radius)?,
                None => (tg.clone(), tgw.clone()),
            };
            Plan::Fixed { axis: XPlan::legendre(cfg.box_order, lo, hi)?, t, tw }
        }
    };

    let rows: Vec<Result<Vec<C64>>> = match plan {
        Plan::Hermite => {
            let base = XPlan::gauss_hermite(cfg.x_order, 1.0)?;
            exec::map_range(grid.len(), |j| {
                let l = grid.node(j);
                let s = l.abs().sqrt();
                let axis = XPlan { y: base.y.iter().map(|v| v / s).collect(), w: base.w.iter().map(|v| v / s).collect() };
                let (pts, _) = axis.tensor(n);
                let phase: Vec<C64> = tg.iter().zip(&tgw).map(|(&t, &w)| C64::from_polar(w, l * t)).collect();
                let flam: Vec<C64> = pts.iter().map(|x| tg.iter().zip(&phase).map(|(&t, p)| f.eval(x, t) * p).sum()).collect();
                let table = axis.weighted_table(l, cfg.max_degree);
                Ok(project_tensor(&set, l, &table, axis.y.len(), &flam))
            })
        }
        Plan::Fixed { axis, t, tw } => {
            let (pts, _) = axis.tensor(n);
            let fv: Vec<Vec<C64>> = exec::map_slice(&pts, |x| t.iter().map(|&tm| f.eval(x, tm)).collect());
            exec::map_range(grid.len(), |j| {
                let l = grid.node(j);
                let phase: Vec<C64> = t.iter().zip(&tw).map(|(&tm, &w)| C64::from_polar(w, l * tm)).collect();
                let flam: Vec<C64> = fv.iter().map(|row| row.iter().zip(&phase).map(|(a, b)| a * b).sum()).collect();
                let table = axis.weighted_table(l, cfg.max_degree);
                Ok(project_tensor(&set, l, &table, axis.y.len(), &flam))
            })
        }
    };
    let mut values = Vec::with_capacity(set.len() * grid.len());
    for r in rows {
        values.extend(r?);
    }
    Ok(SpectralCoefficients { n, max_degree: cfg.max_degree, lambda_grid: grid, values })
}

/// Transform on ℝ^{n+2}: `f̂(α, λ, ν)` stored `[λ][ν][α]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients2 {
    pub n: usize,
    #[serde(rename = "K")]
    pub max_degree: usize,
    pub lambda_grid: LambdaGrid,
    pub nu_grid: TimeGrid,
    pub values: Vec<C64>,
}

impl SpectralCoefficients2 {
    pub fn modes(&self) -> usize {
        self.values.len() / (self.lambda_grid.len() * self.nu_grid.count)
    }

    pub fn get(&self, lambda_index: usize, nu_index: usize, alpha_index: usize) -> C64 {
        self.values[(lambda_index * self.nu_grid.count + nu_index) * self.modes() + alpha_index]
    }

    /// Discrete `‖f̂‖` over `ℕⁿ × ℝ* × ℝ`.
    pub fn l2_norm(&self) -> f64 {
        let m = self.modes();
        let nv = self.nu_grid.count;
        let dv = self.nu_grid.step();
        let terms: Vec<f64> = (0..self.lambda_grid.len())
            .map(|j| {
                let row = &self.values[j * nv * m..(j + 1) * nv * m];
                self.lambda_grid.weight(j) * dv * row.iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .collect();
        exec::pairwise_sum(&terms).sqrt()
    }

    /// `‖f‖_{L²(ℝ^{n+2})}` predicted by Plancherel, `(2π)^{−1}‖f̂‖`.
    pub fn physical_l2_norm(&self) -> f64 {
        self.l2_norm() / (2.0 * PI)
    }

    pub fn inner(&self, other: &Self) -> C64 {
        let m = self.modes();
        let nv = self.nu_grid.count;
        let dv = self.nu_grid.step();
        (0..self.lambda_grid.len())
            .map(|j| {
                let a = &self.values[j * nv * m..(j + 1) * nv * m];
                let b = &other.values[j * nv * m..(j + 1) * nv * m];
                a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() * (self.lambda_grid.weight(j) * dv)
            })
            .sum()
    }
}

/// Quadrature for the ℝ^{n+2} transform: fixed x box plus uniform t and s grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform2Config {
    pub n: usize,
    pub max_degree: usize,
    pub lambda: LambdaGrid,
    pub nu: TimeGrid,
    pub time: TimeGrid,
    pub s_time: TimeGrid,
    /// Half-width of the x box `[−X, X]ⁿ`.
    pub x_half_width: f64,
    pub x_order: usize,
}

/// `f̂(α,λ,ν) = ⟨f^{λ,ν}, Φ_α^λ⟩`, `f^{λ,ν}(x) = ∫∫ f(x,t,s) e^{iλt} e^{iνs} dt ds`.
pub fn forward_transform2(f: &Field3, cfg: &Transform2Config) -> Result<SpectralCoefficients2> {
    check_field(f.decay, false)?;
    if f.n != cfg.n {
        return Err(Error::Parameter("field dimension differs from config dimension".into()));
    }
    let n = cfg.n;
    let set = MultiIndexSet::new(n, cfg.max_degree);
    let axis = XPlan::legendre(cfg.x_order, -cfg.x_half_width, cfg.x_half_width)?;
    let (pts, _) = axis.tensor(n);
    let (tg, tw) = (cfg.time.nodes(), cfg.time.weights());
    let (sg, sw) = (cfg.s_time.nodes(), cfg.s_time.weights());
    let nu = cfg.nu.nodes();
    let np = pts.len();
    let ns = sg.len();
    // samples [x][s][t]
    let fv: Vec<Vec<C64>> = exec::map_slice(&pts, |x| {
        let mut v = Vec::with_capacity(ns * tg.len());
        for &s in &sg {
            v.extend(tg.iter().map(|&t| f.eval(x, t, s)));
        }
        v
    });
    let grid = cfg.lambda;
    let rows = exec::map_range(grid.len(), |j| {
        let l = grid.node(j);
        let ph: Vec<C64> = tg.iter().zip(&tw).map(|(&t, &w)| C64::from_polar(w, l * t)).collect();
        // F[x][s] = Σ_t f e^{iλt}
        let nt = tg.len();
        let mut fl = Vec::with_capacity(np * ns);
        for row in &fv {
            for is in 0..ns {
                fl.push(row[is * nt..(is + 1) * nt].iter().zip(&ph).map(|(a, b)| a * b).sum::<C64>());
            }
        }
        let table = axis.weighted_table(l, cfg.max_degree);
        let mut out = Vec::with_capacity(nu.len() * set.len());
        for &v in &nu {
            let sph: Vec<C64> = sg.iter().zip(&sw).map(|(&s, &w)| C64::from_polar(w, v * s)).collect();
            let g: Vec<C64> = (0..np).map(|i| fl[i * ns..(i + 1) * ns].iter().zip(&sph).map(|(a, b)| a * b).sum()).collect();
            out.extend(project_tensor(&set, l, &table, axis.y.len(), &g));
        }
        out
    });
    Ok(SpectralCoefficients2 { n, max_degree: cfg.max_degree, lambda_grid: grid, nu_grid: cfg.nu, values: rows.into_iter().flatten().collect() })
}

/// `(x,t) ↦ (2π)^{−1} Σ_j w_j e^{−iλ_j t} Σ_α c(α,λ_j) Φ_α^{λ_j}(x)`.
#[derive(Debug, Clone)]
pub struct InverseField {
    c: SpectralCoefficients,
}

impl InverseField {
    pub fn coefficients(&self) -> &SpectralCoefficients {
        &self.c
    }

    pub fn eval(&self, x: &[f64], t: f64) -> C64 {
        self.eval_grid(&[x.to_vec()], &[t])[0]
    }

    /// Values on `points × ts`, stored `[t][x]`.
    pub fn eval_grid(&self, points: &[Vec<f64>], ts: &[f64]) -> Vec<C64> {
        let c = &self.c;
        let set = c.index_set();
        let grid = c.lambda_grid;
        // u^λ(x) per node, then the λ sum in node order
        let per_lambda: Vec<Vec<C64>> = exec::map_range(grid.len(), |j| {
            let l = grid.node(j);
            let row = c.row(j);
            let mut scratch = Vec::new();
            let mut phi = vec![0.0; set.len()];
            points
                .iter()
                .map(|x| {
                    basis_values(&set, l, x, &mut scratch, &mut phi);
                    row.iter().zip(&phi).map(|(a, &b)| a * b).sum::<C64>() * grid.weight(j)
                })
                .collect()
        });
        let np = points.len();
        let rows = exec::map_slice(ts, |&t| {
            let mut acc = vec![C64::new(0.0, 0.0); np];
            for (j, u) in per_lambda.iter().enumerate() {
                let e = C64::from_polar(1.0 / (2.0 * PI), -grid.node(j) * t);
                for (a, v) in acc.iter_mut().zip(u) {
                    *a += e * v;
                }
            }
            acc
        });
        rows.into_iter().flatten().collect()
    }

    pub fn field(&self) -> Field {
        let me = self.clone();
        Field::new(self.c.n, Decay::Generic, move |x, t| me.eval(x, t))
    }
}

pub fn inverse_transform(c: &SpectralCoefficients) -> InverseField {
    c.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Wavepacket;

    fn small_cfg() -> TransformConfig {
        TransformConfig {
            n: 1,
            max_degree: 48,
            lambda: LambdaGrid::uniform(80, 0.1).unwrap(),
            time: TimeGrid::new(16.0, 128).unwrap(),
            x_order: 96,
            box_order: 64,
            x_rule: XRule::Auto,
        }
    }

    #[test]
    fn zero_field_gives_zero_coefficients() {
        let c = forward_transform(&Field::zero(1), &small_cfg()).unwrap();
        assert!(c.values.iter().all(|v| *v == C64::new(0.0, 0.0)));
        assert_eq!(inverse_transform(&c).eval(&[0.3], 0.1), C64::new(0.0, 0.0));
    }

    #[test]
    fn generic_field_without_support_is_refused() {
        let f = Field::new(1, Decay::Generic, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(forward_transform(&f, &small_cfg()), Err(Error::Parameter(_))));
    }

    #[test]
    fn single_coefficient_inverse() {
        let g = LambdaGrid::uniform(4, 0.5).unwrap();
        let mut c = SpectralCoefficients::zeros(1, 3, g);
        c.set(5, 0, C64::new(1.0, 0.0));
        let l0 = g.node(5);
        let f = c.inverse();
        for &(x, t) in &[(0.0, 0.0), (0.7, -1.3), (-1.1, 2.0)] {
            let want = C64::from_polar(g.weight(5) / (2.0 * PI), -l0 * t) * crate::hermite::scaled_hermite_eval(&[0], l0, &[x]).unwrap();
            assert!((f.eval(&[x], t) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn plancherel_for_a_wavepacket() {
        let w = Wavepacket { x0: vec![0.2], t0: 0.3, a: 1.0, b: 2.0, xi: vec![0.5], tau: 2.5 };
        let c = forward_transform(&w.field(), &small_cfg()).unwrap();
        let rel = (c.physical_l2_norm() - w.l2_norm()).abs() / w.l2_norm();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn apply_g_multiplies_by_eigenvalue() {
        let g = LambdaGrid::uniform(3, 0.4).unwrap();
        let mut c = SpectralCoefficients::zeros(2, 2, g);
        for (i, v) in c.values.iter_mut().enumerate() {
            *v = C64::new(i as f64, 1.0);
        }
        let gc = apply_g_spectral(&c);
        let deg = c.degrees();
        for j in 0..g.len() {
            for a in 0..c.modes() {
                let w = (2 * deg[a] + 2) as f64 * g.node(j).abs();
                assert!((gc.get(j, a) - c.get(j, a) * w).norm() < 1e-14);
            }
        }
        let ggc = apply_g_spectral(&gc);
        for j in 0..g.len() {
            for a in 0..c.modes() {
                let w = (2 * deg[a] + 2) as f64 * g.node(j).abs();
                assert!((ggc.get(j, a) - c.get(j, a) * w * w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = LambdaGrid::sqrt(2, 0.3).unwrap();
        let mut c = SpectralCoefficients::zeros(1, 2, g);
        c.values[3] = C64::new(0.25, -1.5);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"K\":2") && s.contains("\"lambda_grid\""));
        let back: SpectralCoefficients = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        back.validate().unwrap();
    }
}
