//! Surfaces over `ℕⁿ × ℝ*`, localized surface measures, restriction and
//! extension, and the radial Laguerre form of the spectral projections.

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Decay, Field3};
use crate::grid::LambdaGrid;
use crate::hermite::{laguerre_eval, projection_apply, MultiIndexSet, ProjectionQuadrature};
use crate::quadrature::composite_gauss_legendre;
use crate::special::{gamma, ln_gamma};
use crate::transform::{basis_values, project_tensor, SpectralCoefficients, Transform2Config, XPlan};
use crate::window::Psi;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One graph `ν = ν(α, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sheet {
    /// `ν = (2|α|+n)|λ|`.
    Schrodinger,
    /// `ν = +√((2|α|+n)|λ|)`.
    WavePlus,
    /// `ν = −√((2|α|+n)|λ|)`.
    WaveMinus,
}

impl Sheet {
    pub fn nu(self, n: usize, k: usize, lambda: f64) -> f64 {
        let w = (2 * k + n) as f64 * lambda.abs();
        match self {
            Sheet::Schrodinger => w,
            Sheet::WavePlus => w.sqrt(),
            Sheet::WaveMinus => -w.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Schrodinger,
    WavePlus,
    WaveMinus,
    WaveUnion,
}

impl Surface {
    pub fn sheets(self) -> &'static [Sheet] {
        match self {
            Surface::Schrodinger => &[Sheet::Schrodinger],
            Surface::WavePlus => &[Sheet::WavePlus],
            Surface::WaveMinus => &[Sheet::WaveMinus],
            Surface::WaveUnion => &[Sheet::WavePlus, Sheet::WaveMinus],
        }
    }
}

/// `dσ_loc = ψ(ν/scale) dσ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedMeasure {
    pub surface: Surface,
    pub psi: Psi,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl LocalizedMeasure {
    /// ψ = 1 on `[−½, ½]`, supported in `(−1, 1)`.
    pub fn new(surface: Surface) -> Self {
        Self { surface, psi: Psi::Bump { plateau: 0.5 }, scale: 1.0 }
    }

    /// The unlocalized measure `dσ`.
    pub fn unweighted(surface: Surface) -> Self {
        Self { surface, psi: Psi::One, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        self.psi.validate()?;
        if !(self.scale > 0.0) {
            return Err(Error::Parameter(format!("measure scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn weight(&self, sheet: Sheet, n: usize, k: usize, lambda: f64) -> f64 {
        self.psi.eval(sheet.nu(n, k, lambda) / self.scale)
    }
}

/// `Θ(α, λ_j)` on each sheet of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDensity {
    pub n: usize,
    #[serde(rename = "K")]
    pub max_degree: usize,
    pub lambda_grid: LambdaGrid,
    pub measure: LocalizedMeasure,
    /// One λ-major table per sheet, laid out like [`SpectralCoefficients`].
    pub values: Vec<Vec<C64>>,
}

impl SurfaceDensity {
    pub fn zeros(n: usize, max_degree: usize, lambda_grid: LambdaGrid, measure: LocalizedMeasure) -> Self {
        let m = MultiIndexSet::new(n, max_degree).len();
        let sheets = measure.surface.sheets().len();
        Self { n, max_degree, lambda_grid, measure, values: vec![vec![C64::new(0.0, 0.0); m * lambda_grid.len()]; sheets] }
    }

    /// The pushforward `Θ = ĝ∘π` on every sheet.
    pub fn from_coefficients(c: &SpectralCoefficients, measure: LocalizedMeasure) -> Self {
        let sheets = measure.surface.sheets().len();
        Self { n: c.n, max_degree: c.max_degree, lambda_grid: c.lambda_grid, measure, values: vec![c.values.clone(); sheets] }
    }

    /// Density with separate data per sheet (e.g. half-wave data on `S₊`, `S₋`).
    pub fn from_sheets(parts: &[&SpectralCoefficients], measure: LocalizedMeasure) -> Result<Self> {
        if parts.len() != measure.surface.sheets().len() || parts.is_empty() {
            return Err(Error::Parameter(format!("surface has {} sheets, got {} tables", measure.surface.sheets().len(), parts.len())));
        }
        let c = parts[0];
        if parts.iter().any(|p| p.n != c.n || p.max_degree != c.max_degree || p.lambda_grid != c.lambda_grid) {
            return Err(Error::Parameter("sheet tables live on different grids".into()));
        }
        Ok(Self { n: c.n, max_degree: c.max_degree, lambda_grid: c.lambda_grid, measure, values: parts.iter().map(|p| p.values.clone()).collect() })
    }

    pub fn modes(&self) -> usize {
        self.values[0].len() / self.lambda_grid.len()
    }

    pub fn get(&self, sheet: usize, lambda_index: usize, alpha_index: usize) -> C64 {
        self.values[sheet][lambda_index * self.modes() + alpha_index]
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut().flatten() {
            *v *= c;
        }
        out
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.n != o.n || self.max_degree != o.max_degree || self.lambda_grid != o.lambda_grid || self.measure != o.measure {
            return Err(Error::Parameter("surface densities live on different grids or measures".into()));
        }
        Ok(())
    }

    /// `⟨Θ₁, Θ₂⟩_{L²(S, dσ_loc)}`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.same_shape(other)?;
        let set = MultiIndexSet::new(self.n, self.max_degree);
        let m = self.modes();
        let g = self.lambda_grid;
        let mut total = C64::new(0.0, 0.0);
        for (si, &sheet) in self.measure.surface.sheets().iter().enumerate() {
            for j in 0..g.len() {
                let l = g.node(j);
                for a in 0..m {
                    let psi = self.measure.weight(sheet, self.n, set.degree(a), l);
                    if psi != 0.0 {
                        total += self.get(si, j, a) * other.get(si, j, a).conj() * (g.weight(j) * psi);
                    }
                }
            }
        }
        Ok(total)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.values.iter().flatten().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Index(format!("surface density entry {i} is not finite")));
            }
        }
        Ok(())
    }
}

/// `‖Θ‖_{L²(S, dσ_loc)}`.
pub fn surface_l2_norm(theta: &SurfaceDensity) -> f64 {
    theta.inner(theta).expect("same shape").re.max(0.0).sqrt()
}

/// `Θ(α, λ) = f̂(α, λ, ν(α, λ))` on each sheet. The `s`-integral is taken
/// at the exact surface frequency; `cfg.nu` is not used.
pub fn restrict(f: &Field3, measure: &LocalizedMeasure, cfg: &Transform2Config) -> Result<SurfaceDensity> {
    measure.validate()?;
    if f.n != cfg.n {
        return Err(Error::Parameter("field dimension differs from config dimension".into()));
    }
    if f.decay == Decay::Generic {
        return Err(Error::Parameter("restriction needs a Gaussian or compactly supported field".into()));
    }
    let n = cfg.n;
    let set = MultiIndexSet::new(n, cfg.max_degree);
    let deg: Vec<usize> = (0..set.len()).map(|a| set.degree(a)).collect();
    let axis = XPlan::legendre(cfg.x_order, -cfg.x_half_width, cfg.x_half_width)?;
    let (pts, _) = axis.tensor(n);
    let (tg, tw) = (cfg.time.nodes(), cfg.time.weights());
    let (sg, sw) = (cfg.s_time.nodes(), cfg.s_time.weights());
    let (ns, nt) = (sg.len(), tg.len());
    let fv: Vec<Vec<C64>> = exec::map_slice(&pts, |x| {
        let mut v = Vec::with_capacity(ns * nt);
        for &s in &sg {
            v.extend(tg.iter().map(|&t| f.eval(x, t, s)));
        }
        v
    });
    let grid = cfg.lambda;
    let sheets = measure.surface.sheets();
    let rows: Vec<Vec<Vec<C64>>> = exec::map_range(grid.len(), |j| {
        let l = grid.node(j);
        let ph: Vec<C64> = tg.iter().zip(&tw).map(|(&t, &w)| C64::from_polar(w, l * t)).collect();
        let table = axis.weighted_table(l, cfg.max_degree);
        // P[s][α] = ⟨Σ_t w f e^{iλt}, Φ_α^λ⟩
        let proj: Vec<Vec<C64>> = (0..ns)
            .map(|is| {
                let g: Vec<C64> = fv.iter().map(|row| row[is * nt..(is + 1) * nt].iter().zip(&ph).map(|(a, b)| a * b).sum()).collect();
                project_tensor(&set, l, &table, axis.y.len(), &g)
            })
            .collect();
        sheets
            .iter()
            .map(|&sheet| {
                (0..set.len())
                    .map(|a| {
                        let nu = sheet.nu(n, deg[a], l);
                        sg.iter().zip(&sw).zip(&proj).map(|((&s, &w), p)| p[a] * C64::from_polar(w, nu * s)).sum()
                    })
                    .collect()
            })
            .collect()
    });
    let mut out = SurfaceDensity::zeros(n, cfg.max_degree, grid, *measure);
    let m = set.len();
    for (j, row) in rows.into_iter().enumerate() {
        for (si, vals) in row.into_iter().enumerate() {
            out.values[si][j * m..(j + 1) * m].copy_from_slice(&vals);
        }
    }
    Ok(out)
}

/// `E(Θ)(x,t,s) = (2π)^{−2} Σ_sheets Σ_j w_j Σ_α e^{−iνs} e^{−iλ_j t} Θ Φ_α^{λ_j}(x) ψ(ν)`.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    theta: SurfaceDensity,
}

pub fn extend(theta: &SurfaceDensity) -> ExtensionField {
    ExtensionField { theta: theta.clone() }
}

impl ExtensionField {
    pub fn eval(&self, x: &[f64], t: f64, s: f64) -> C64 {
        self.eval_grid(&[x.to_vec()], &[t], &[s])[0]
    }

    /// Values on `points × ts × ss`, stored `[t][s][x]`.
    pub fn eval_grid(&self, points: &[Vec<f64>], ts: &[f64], ss: &[f64]) -> Vec<C64> {
        let th = &self.theta;
        let n = th.n;
        let set = MultiIndexSet::new(n, th.max_degree);
        let grid = th.lambda_grid;
        let sheets = th.measure.surface.sheets();
        let kmax = th.max_degree;
        let np = points.len();
        // per λ: block sums b[sheet][k][x] = w_j Σ_{|α|=k} Θ ψ Φ_α(x)
        let per_lambda: Vec<Vec<Vec<Vec<C64>>>> = exec::map_range(grid.len(), |j| {
            let l = grid.node(j);
            let mut scratch = Vec::new();
            let mut phi = vec![0.0; set.len()];
            let mut out = vec![vec![vec![C64::new(0.0, 0.0); np]; kmax + 1]; sheets.len()];
            for (ix, x) in points.iter().enumerate() {
                basis_values(&set, l, x, &mut scratch, &mut phi);
                for (si, &sheet) in sheets.iter().enumerate() {
                    for k in 0..=kmax {
                        let psi = th.measure.weight(sheet, n, k, l);
                        if psi == 0.0 {
                            continue;
                        }
                        let v: C64 = set.block(k).map(|a| th.get(si, j, a) * phi[a]).sum();
                        out[si][k][ix] = v * (psi * grid.weight(j));
                    }
                }
            }
            out
        });
        let pairs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| ss.iter().map(move |&s| (t, s))).collect();
        let rows = exec::map_slice(&pairs, |&(t, s)| {
            let mut acc = vec![C64::new(0.0, 0.0); np];
            for (j, blocks) in per_lambda.iter().enumerate() {
                let l = grid.node(j);
                for (si, &sheet) in sheets.iter().enumerate() {
                    for (k, b) in blocks[si].iter().enumerate() {
                        let e = C64::from_polar(1.0 / (4.0 * PI * PI), -sheet.nu(n, k, l) * s - l * t);
                        for (a, v) in acc.iter_mut().zip(b) {
                            *a += e * v;
                        }
                    }
                }
            }
            acc
        });
        rows.into_iter().flatten().collect()
    }

    pub fn field(&self) -> Field3 {
        let me = self.clone();
        Field3::new(self.theta.n, Decay::Generic, move |x, t, s| me.eval(x, t, s))
    }
}

/// `P_{2k}(λ)φ = R_{2k}(φ) L_k^{n/2−1}(|λ||x|²) e^{−|λ||x|²/2}` for radial φ.
#[derive(Debug, Clone)]
pub struct RadialProjection {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// `R_{2k}(φ)`.
    pub coefficient: C64,
    /// `‖P_{2k+1}(λ)φ‖₂`, which vanishes for radial input.
    pub odd_norm: f64,
}

impl RadialProjection {
    pub fn eval(&self, x: &[f64]) -> C64 {
        let a = self.lambda.abs();
        let u = a * x.iter().map(|v| v * v).sum::<f64>();
        let d = self.n as f64 / 2.0 - 1.0;
        self.coefficient * laguerre_eval(self.k, d, u).expect("valid type") * (-0.5 * u).exp()
    }
}

fn radial_coefficient_norm(n: usize, k: usize) -> f64 {
    // k! Γ(n/2) / (π^{n/2} Γ(k + n/2)) = 1/∫ (L_k^{n/2−1}(|y|²) e^{−|y|²/2})² dy
    let h = n as f64 / 2.0;
    (ln_gamma(k as f64 + 1.0) + ln_gamma(h) - ln_gamma(k as f64 + h)).exp() / PI.powf(h)
}

/// Laguerre form of `P_{2k}(λ)` on a radial input.
pub fn radial_projection_laguerre<F>(n: usize, phi: F, k: usize, lambda: f64) -> Result<RadialProjection>
where
    F: Fn(&[f64]) -> C64,
{
    if n < 2 {
        return Err(Error::Parameter(format!("radial Laguerre projection needs n ≥ 2, got {n}")));
    }
    let a = crate::hermite::check_lambda(lambda)?;
    let rmax = ((4 * k + n) as f64).sqrt() + 12.0;
    let rmax = rmax / a.sqrt();
    // radial symmetry check on a few shells
    let scale = (1..=8).map(|i| phi(&radial_point(n, rmax * i as f64 / 16.0, 0)).norm()).fold(0.0f64, f64::max).max(1e-300);
    for i in 1..=8 {
        let r = rmax * i as f64 / 16.0;
        let base = phi(&radial_point(n, r, 0));
        for dir in 1..4 {
            let v = phi(&radial_point(n, r, dir));
            if (v - base).norm() > 1e-10 * scale {
                return Err(Error::Domain(format!("input is not radial: values {base} and {v} at radius {r}")));
            }
        }
    }
    let h = n as f64 / 2.0;
    let (rs, ws) = composite_gauss_legendre(16, 64, 0.0, rmax)?;
    let sphere = 2.0 * PI.powf(h) / gamma(h);
    let integral: C64 = rs
        .iter()
        .zip(&ws)
        .map(|(&r, &w)| {
            let u = a * r * r;
            phi(&radial_point(n, r, 0)) * (w * r.powi(n as i32 - 1) * laguerre_eval(k, h - 1.0, u).expect("valid type") * (-0.5 * u).exp())
        })
        .sum::<C64>()
        * sphere;
    let coefficient = integral * (radial_coefficient_norm(n, k) * a.powf(h));
    let order = (2 * (2 * k + 1) + 24).min(1024);
    let odd = projection_apply(n, 2 * k + 1, lambda, &phi, ProjectionQuadrature::GaussHermite { order })?;
    Ok(RadialProjection { n, k, lambda, coefficient, odd_norm: odd.l2_norm() })
}

fn radial_point(n: usize, r: f64, dir: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    match dir {
        0 => v[0] = r,
        1 => v[n - 1] = -r,
        2 => v.iter_mut().for_each(|c| *c = r / (n as f64).sqrt()),
        _ => {
            v[0] = 0.6 * r;
            v[1] = -0.8 * r;
        }
    }
    v
}

/// `(max(k,l)+1)·|⟨Φ_k^{λ/(2k+1)}, Φ_l^{λ/(2l+1)}⟩| / √((2k+1)(2l+1))` for `k, l ≤ kmax`, n = 1.
pub fn cross_term_table(kmax: usize, lambda: f64) -> Result<Vec<Vec<f64>>> {
    crate::hermite::check_lambda(lambda)?;
    let a = lambda.abs();
    let cut = ((2 * kmax + 1) as f64).sqrt() + 12.0;
    let xmax = cut * ((2 * kmax + 1) as f64 / a).sqrt();
    let panels = (xmax * 2.0).ceil() as usize;
    let (xs, ws) = composite_gauss_legendre(16, panels, -xmax, xmax)?;
    let table: Vec<Vec<f64>> = exec::map_range(kmax + 1, |k| {
        let ak = a / (2 * k + 1) as f64;
        xs.iter().map(|&x| crate::hermite::hermite_eval(k, ak.sqrt() * x) * ak.powf(0.25)).collect()
    });
    Ok((0..=kmax)
        .map(|k| {
            (0..=kmax)
                .map(|l| {
                    let ip: f64 = table[k].iter().zip(&table[l]).zip(&ws).map(|((p, q), w)| p * q * w).sum();
                    (k.max(l) + 1) as f64 * ip.abs() / (((2 * k + 1) * (2 * l + 1)) as f64).sqrt()
                })
                .collect()
        })
        .collect())
}
