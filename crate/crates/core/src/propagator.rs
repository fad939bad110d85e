//! Diagonal spectral propagators, frequency localization and Duhamel solves.

use crate::error::{Error, Result};
use crate::exec;
use crate::special::{expm1_i, fresnel_e};
use crate::transform::{basis_values, SpectralCoefficients};
use crate::window::Psi;
use crate::grid::LambdaLayout;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionKind {
    Schrodinger,
    Heat,
    Wave,
}

/// Coefficients sampled at a list of times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<SpectralCoefficients>,
}

#[derive(Debug, Clone)]
pub struct EvolutionRequest {
    pub kind: EvolutionKind,
    pub times: Vec<f64>,
    pub initial: SpectralCoefficients,
    pub velocity: Option<SpectralCoefficients>,
    pub forcing: Option<TimeSeries>,
}

impl EvolutionRequest {
    pub fn run(&self) -> Result<Vec<SpectralCoefficients>> {
        if let Some(g) = &self.forcing {
            return match self.kind {
                EvolutionKind::Schrodinger => duhamel_solve(&self.initial, g),
                EvolutionKind::Wave => {
                    let v = self.velocity.as_ref().ok_or_else(|| Error::Parameter("wave evolution needs velocity data".into()))?;
                    duhamel_wave(&self.initial, v, g)
                }
                EvolutionKind::Heat => Err(Error::Parameter("forced heat evolution is not supported".into())),
            };
        }
        self.times
            .iter()
            .map(|&s| match self.kind {
                EvolutionKind::Schrodinger => Ok(schrodinger_evolve(&self.initial, s)),
                EvolutionKind::Heat => heat_evolve(&self.initial, s),
                EvolutionKind::Wave => {
                    let v = self.velocity.as_ref().ok_or_else(|| Error::Parameter("wave evolution needs velocity data".into()))?;
                    wave_evolve(&self.initial, v, s)
                }
            })
            .collect()
    }
}

fn omega(n: usize, k: usize, lambda: f64) -> f64 {
    (2 * k + n) as f64 * lambda.abs()
}

/// Multiply by `e^{−is(2|α|+n)|λ|}`.
pub fn schrodinger_evolve(c: &SpectralCoefficients, s: f64) -> SpectralCoefficients {
    let n = c.n;
    c.map_multiplier(|k, l| C64::from_polar(1.0, -s * omega(n, k, l)))
}

/// Multiply by `e^{−s(2|α|+n)|λ|}`; backward times are refused.
pub fn heat_evolve(c: &SpectralCoefficients, s: f64) -> Result<SpectralCoefficients> {
    if s < 0.0 {
        return Err(Error::Domain(format!("heat evolution needs s ≥ 0, got {s}")));
    }
    let n = c.n;
    Ok(c.map_multiplier(|k, l| C64::new((-s * omega(n, k, l)).exp(), 0.0)))
}

fn same_shape(a: &SpectralCoefficients, b: &SpectralCoefficients) -> Result<()> {
    if a.n != b.n || a.max_degree != b.max_degree || a.lambda_grid != b.lambda_grid {
        return Err(Error::Parameter("coefficient sets live on different grids".into()));
    }
    Ok(())
}

fn zip_map(
    f: &SpectralCoefficients,
    g: &SpectralCoefficients,
    m: impl Fn(f64, C64, C64) -> C64 + Sync,
) -> Result<SpectralCoefficients> {
    same_shape(f, g)?;
    let deg = f.degrees();
    let n = f.n;
    let grid = f.lambda_grid;
    let rows = exec::map_range(grid.len(), |j| {
        let l = grid.node(j);
        f.row(j).iter().zip(g.row(j)).zip(&deg).map(|((a, b), &k)| m(omega(n, k, l).sqrt(), *a, *b)).collect::<Vec<_>>()
    });
    Ok(SpectralCoefficients { values: rows.into_iter().flatten().collect(), ..f.clone() })
}

/// `cos(sω) f̂ + sin(sω)/ω ĝ` with `ω = √((2|α|+n)|λ|)`.
pub fn wave_evolve(f: &SpectralCoefficients, g: &SpectralCoefficients, s: f64) -> Result<SpectralCoefficients> {
    zip_map(f, g, |w, a, b| a * (s * w).cos() + b * ((s * w).sin() / w))
}

/// `∂_s` of [`wave_evolve`].
pub fn wave_velocity(f: &SpectralCoefficients, g: &SpectralCoefficients, s: f64) -> Result<SpectralCoefficients> {
    zip_map(f, g, |w, a, b| -a * (w * (s * w).sin()) + b * (s * w).cos())
}

/// `‖ω û(s)‖² + ‖∂_s û(s)‖²` on the discrete grid.
pub fn wave_energy(f: &SpectralCoefficients, g: &SpectralCoefficients, s: f64) -> Result<f64> {
    let u = wave_evolve(f, g, s)?;
    let v = wave_velocity(f, g, s)?;
    let wu = zip_map(&u, &u, |w, a, _| a * w)?;
    Ok(wu.l2_norm().powi(2) + v.l2_norm().powi(2))
}

/// Half-wave data `φ̂_± = ½(f̂ ± i ĝ/ω)`, so that
/// `û(s) = e^{−isω} φ̂_+ + e^{+isω} φ̂_−`.
pub fn half_wave_split(f: &SpectralCoefficients, g: &SpectralCoefficients) -> Result<(SpectralCoefficients, SpectralCoefficients)> {
    let plus = zip_map(f, g, |w, a, b| 0.5 * (a + I * b / w))?;
    let minus = zip_map(f, g, |w, a, b| 0.5 * (a - I * b / w))?;
    Ok((plus, minus))
}

/// `ψ(R^{−2}(·))` applied to the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationWindow {
    pub psi: Psi,
    pub radius: f64,
}

impl LocalizationWindow {
    /// ψ = 1 on `[−¼, ¼]`.
    pub fn new(radius: f64) -> Self {
        Self { psi: Psi::Bump { plateau: 0.25 }, radius }
    }

    pub fn validate(&self) -> Result<()> {
        self.psi.validate()?;
        if !(self.radius > 0.0) {
            return Err(Error::Parameter(format!("localization radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }
}

/// Multiply by `ψ(R^{−2}(2|α|+n)|λ|)`.
pub fn frequency_localize(c: &SpectralCoefficients, window: &LocalizationWindow) -> Result<SpectralCoefficients> {
    window.validate()?;
    let n = c.n;
    let r2 = window.radius * window.radius;
    Ok(c.map_multiplier(|k, l| C64::new(window.psi.eval(omega(n, k, l) / r2), 0.0)))
}

/// Cumulative quadrature weights on a uniform grid: composite Simpson up to
/// even indices, Simpson plus a closing 3/8 panel at odd indices ≥ 3, and
/// the trapezoid at index 1.
fn check_uniform(s: &[f64]) -> Result<f64> {
    if s.len() < 3 {
        return Err(Error::Parameter(format!("Duhamel solve needs at least 3 time points, got {}", s.len())));
    }
    if s[0] != 0.0 {
        return Err(Error::Parameter("time grid must start at s = 0".into()));
    }
    let h = s[1] - s[0];
    if !(h > 0.0) || s.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Parameter("time grid must be uniform and increasing".into()));
    }
    Ok(h)
}

/// Integral of samples `a_0..a_m` over `[s_0, s_m]`, for every `m`.
fn cumulative_integrals(a: &[C64], h: f64) -> Vec<C64> {
    let m = a.len();
    let mut out = vec![C64::new(0.0, 0.0); m];
    let mut even = vec![C64::new(0.0, 0.0); m];
    for i in (2..m).step_by(2) {
        even[i] = even[i - 2] + (a[i - 2] + a[i - 1] * 4.0 + a[i]) * (h / 3.0);
    }
    for i in 1..m {
        out[i] = if i % 2 == 0 {
            even[i]
        } else if i == 1 {
            // integral of the interpolant through the first four (or three) samples
            if m >= 4 {
                (a[0] * 9.0 + a[1] * 19.0 - a[2] * 5.0 + a[3]) * (h / 24.0)
            } else {
                (a[0] * 5.0 + a[1] * 8.0 - a[2]) * (h / 12.0)
            }
        } else {
            even[i - 3] + (a[i - 3] + a[i - 2] * 3.0 + a[i - 1] * 3.0 + a[i]) * (3.0 * h / 8.0)
        };
    }
    out
}

/// `u(s) = e^{−isG}f̂ − i∫₀^s e^{−i(s−s′)G} g(s′) ds′` at every time of the
/// forcing series (uniform, starting at 0).
pub fn duhamel_solve(f: &SpectralCoefficients, g: &TimeSeries) -> Result<Vec<SpectralCoefficients>> {
    let h = check_uniform(&g.times)?;
    for gi in &g.values {
        same_shape(f, gi)?;
    }
    let n = f.n;
    let deg = f.degrees();
    let m = f.modes();
    let grid = f.lambda_grid;
    let times = &g.times;
    // per (λ, α): e^{is′ω} g(s′) integrated cumulatively
    let rows: Vec<Vec<Vec<C64>>> = exec::map_range(grid.len(), |j| {
        let l = grid.node(j);
        (0..m)
            .map(|a| {
                let w = omega(n, deg[a], l);
                let samples: Vec<C64> = times.iter().zip(&g.values).map(|(&s, gs)| gs.get(j, a) * C64::from_polar(1.0, s * w)).collect();
                let cum = cumulative_integrals(&samples, h);
                times.iter().zip(cum).map(|(&s, c)| C64::from_polar(1.0, -s * w) * (f.get(j, a) - I * c)).collect()
            })
            .collect()
    });
    Ok((0..times.len())
        .map(|it| {
            let mut out = f.clone();
            for j in 0..grid.len() {
                for a in 0..m {
                    out.set(j, a, rows[j][a][it]);
                }
            }
            out
        })
        .collect())
}

/// Inhomogeneous wave equation `∂²_s u + Gu = h`:
/// `û(s) = cos(sω)f̂ + sin(sω)/ω ĝ + ∫₀^s sin((s−s′)ω)/ω ĥ(s′) ds′`.
pub fn duhamel_wave(f: &SpectralCoefficients, g: &SpectralCoefficients, h_series: &TimeSeries) -> Result<Vec<SpectralCoefficients>> {
    let h = check_uniform(&h_series.times)?;
    same_shape(f, g)?;
    for hi in &h_series.values {
        same_shape(f, hi)?;
    }
    let n = f.n;
    let deg = f.degrees();
    let m = f.modes();
    let grid = f.lambda_grid;
    let times = &h_series.times;
    let rows: Vec<Vec<Vec<C64>>> = exec::map_range(grid.len(), |j| {
        let l = grid.node(j);
        (0..m)
            .map(|a| {
                let w = omega(n, deg[a], l).sqrt();
                let cs: Vec<C64> = times.iter().zip(&h_series.values).map(|(&s, hs)| hs.get(j, a) * (s * w).cos()).collect();
                let sn: Vec<C64> = times.iter().zip(&h_series.values).map(|(&s, hs)| hs.get(j, a) * (s * w).sin()).collect();
                let ic = cumulative_integrals(&cs, h);
                let is = cumulative_integrals(&sn, h);
                times
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let (sw, cw) = (s * w).sin_cos();
                        f.get(j, a) * cw + g.get(j, a) * (sw / w) + (ic[i] * sw - is[i] * cw) / w
                    })
                    .collect()
            })
            .collect()
    });
    Ok((0..times.len())
        .map(|it| {
            let mut out = f.clone();
            for j in 0..grid.len() {
                for a in 0..m {
                    out.set(j, a, rows[j][a][it]);
                }
            }
            out
        })
        .collect())
}

/// `∫` over the cells `[m_{j−1}, m_j]` (with `m_{−1} = 0`, value 0 there) of the
/// piecewise-linear interpolant of `g` times `e^{−iωμ²}`, integrated exactly.
fn fresnel_product_sum(mus: &[f64], g: &[C64], omega: f64) -> C64 {
    if omega < 0.0 {
        let gc: Vec<C64> = g.iter().map(|v| v.conj()).collect();
        return fresnel_product_sum(mus, &gc, -omega).conj();
    }
    let sw = omega.sqrt();
    let mut total = C64::new(0.0, 0.0);
    let (mut a, mut ga) = (0.0f64, C64::new(0.0, 0.0));
    let mut e_a: Option<C64> = Some(C64::new(0.0, 0.0));
    for (&b, &gb) in mus.iter().zip(g) {
        let h = b - a;
        let slope = (gb - ga) / h;
        let cell = if omega * b * b < 1e-3 {
            e_a = None;
            // Taylor series of the phase on a short cell
            let mut i0 = C64::new(0.0, 0.0);
            let mut i1 = C64::new(0.0, 0.0);
            let mut coef = C64::new(1.0, 0.0);
            for m in 0..10 {
                let p = 2 * m as i32;
                let (bp1, ap1) = (b.powi(p + 1), a.powi(p + 1));
                let (bp2, ap2) = (b.powi(p + 2), a.powi(p + 2));
                i0 += coef * ((bp1 - ap1) / (p + 1) as f64);
                i1 += coef * ((bp2 - ap2) / (p + 2) as f64);
                coef *= C64::new(0.0, -omega) / (m + 1) as f64;
            }
            ga * i0 + slope * (i1 - a * i0)
        } else {
            let ea = e_a.unwrap_or_else(|| fresnel_e(a * sw));
            let eb = fresnel_e(b * sw);
            let i0 = (eb - ea) / sw;
            let ph_a = C64::from_polar(1.0, -omega * a * a);
            let i1 = ph_a * expm1_i(-omega * h * (a + b)) / C64::new(0.0, -2.0 * omega);
            e_a = Some(eb);
            ga * i0 + slope * (i1 - a * i0)
        };
        total += cell;
        a = b;
        ga = gb;
    }
    total
}

/// Physical-space values of `e^{−isG}f` at `(x, t)` targets.
///
/// On a √-layout λ-grid each mode block `Σ_{|α|=k} c Φ_α^λ(x)` is
/// interpolated linearly in `μ = √|λ|` and integrated exactly against the
/// phase `e^{−i(±t + s(2k+n))μ²}`, so the transport of high modes does not
/// alias. On a uniform grid this is the plain inverse of the evolved data.
pub fn schrodinger_solution(c: &SpectralCoefficients, s: f64, targets: &[(Vec<f64>, f64)]) -> Result<Vec<C64>> {
    c.validate()?;
    let grid = c.lambda_grid;
    if grid.layout == LambdaLayout::Uniform {
        let inv = schrodinger_evolve(c, s).inverse();
        return Ok(targets.iter().map(|(x, t)| inv.eval(x, *t)).collect());
    }
    let set = c.index_set();
    let n = c.n;
    let kmax = c.max_degree;
    let big_j = grid.half_count;
    let mus: Vec<f64> = (0..big_j).map(|j| grid.mu(big_j + j)).collect();
    Ok(exec::map_slice(targets, |(x, t)| {
        let mut scratch = Vec::new();
        let mut phi = vec![0.0; set.len()];
        let mut total = C64::new(0.0, 0.0);
        for sign in [1.0, -1.0] {
            // blocks[k][j] = 2μ_j Σ_{|α|=k} c(α, ±μ_j²) Φ_α(x)
            let mut blocks = vec![vec![C64::new(0.0, 0.0); big_j]; kmax + 1];
            for j in 0..big_j {
                let i = if sign > 0.0 { big_j + j } else { big_j - 1 - j };
                let l = grid.node(i);
                basis_values(&set, l, x, &mut scratch, &mut phi);
                let row = c.row(i);
                for k in 0..=kmax {
                    let v: C64 = set.block(k).map(|a| row[a] * phi[a]).sum();
                    blocks[k][j] = v * (2.0 * mus[j]);
                }
            }
            for (k, b) in blocks.iter().enumerate() {
                let w = sign * t + s * (2 * k + n) as f64;
                total += fresnel_product_sum(&mus, b, w);
            }
        }
        total / (2.0 * PI)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::LambdaGrid;

    fn random_coeffs(n: usize, k: usize, grid: LambdaGrid, seed: u64) -> SpectralCoefficients {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = SpectralCoefficients::zeros(n, k, grid);
        for v in c.values.iter_mut() {
            *v = C64::new(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5));
        }
        c
    }

    #[test]
    fn schrodinger_identity_unitarity_group_law() {
        let c = random_coeffs(1, 6, LambdaGrid::uniform(10, 0.3).unwrap(), 1);
        assert_eq!(schrodinger_evolve(&c, 0.0), c);
        let u = schrodinger_evolve(&c, 1.7);
        assert!((u.l2_norm() - c.l2_norm()).abs() < 1e-12 * c.l2_norm());
        let ab = schrodinger_evolve(&schrodinger_evolve(&c, 0.4), 1.1);
        let direct = schrodinger_evolve(&c, 1.5);
        for (a, b) in ab.values.iter().zip(&direct.values) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn heat_semigroup_and_contractivity() {
        let c = random_coeffs(2, 3, LambdaGrid::uniform(6, 0.2).unwrap(), 2);
        assert_eq!(heat_evolve(&c, 0.0).unwrap(), c);
        let a = heat_evolve(&heat_evolve(&c, 0.3).unwrap(), 0.5).unwrap();
        let b = heat_evolve(&c, 0.8).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!(b.l2_norm() < c.l2_norm());
        assert!(matches!(heat_evolve(&c, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn wave_initial_data_and_single_mode() {
        let grid = LambdaGrid::uniform(4, 0.5).unwrap();
        let f = random_coeffs(1, 3, grid, 3);
        let g = random_coeffs(1, 3, grid, 4);
        assert_eq!(wave_evolve(&f, &g, 0.0).unwrap(), f);
        let ds = 1e-4;
        let d = wave_evolve(&f, &g, ds).unwrap();
        let m = wave_evolve(&f, &g, -ds).unwrap();
        for i in 0..f.values.len() {
            let deriv = (d.values[i] - m.values[i]) / (2.0 * ds);
            assert!((deriv - g.values[i]).norm() < 1e-6);
        }
        let mut one = SpectralCoefficients::zeros(1, 3, grid);
        one.set(6, 2, C64::new(1.0, 0.0));
        let zero = SpectralCoefficients::zeros(1, 3, grid);
        let u = wave_evolve(&one, &zero, 2.0).unwrap();
        let w = ((2 * 2 + 1) as f64 * grid.node(6).abs()).sqrt();
        assert!((u.get(6, 2).re - (2.0 * w).cos()).abs() < 1e-15);
    }

    #[test]
    fn half_wave_split_reproduces_wave() {
        let grid = LambdaGrid::uniform(4, 0.5).unwrap();
        let f = random_coeffs(1, 3, grid, 5);
        let g = random_coeffs(1, 3, grid, 6);
        let (p, m) = half_wave_split(&f, &g).unwrap();
        let s = 0.9;
        let u = wave_evolve(&f, &g, s).unwrap();
        let deg = f.degrees();
        for j in 0..grid.len() {
            for a in 0..f.modes() {
                let w = ((2 * deg[a] + 1) as f64 * grid.node(j).abs()).sqrt();
                let v = C64::from_polar(1.0, -s * w) * p.get(j, a) + C64::from_polar(1.0, s * w) * m.get(j, a);
                assert!((v - u.get(j, a)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn localization_kills_high_modes_and_commutes() {
        let grid = LambdaGrid::uniform(8, 0.25).unwrap();
        let c = random_coeffs(1, 10, grid, 7);
        let win = LocalizationWindow::new(1.5);
        let l = frequency_localize(&c, &win).unwrap();
        let deg = c.degrees();
        for j in 0..grid.len() {
            for a in 0..c.modes() {
                let w = (2 * deg[a] + 1) as f64 * grid.node(j).abs();
                if w >= 2.25 {
                    assert_eq!(l.get(j, a), C64::new(0.0, 0.0));
                }
                if w <= 0.25 * 2.25 {
                    assert_eq!(l.get(j, a), c.get(j, a));
                }
            }
        }
        assert!(l.l2_norm() <= c.l2_norm());
        let a = schrodinger_evolve(&l, 0.7);
        let b = frequency_localize(&schrodinger_evolve(&c, 0.7), &win).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-15);
        }
        assert!(frequency_localize(&c, &LocalizationWindow { psi: Psi::Bump { plateau: 2.0 }, radius: 1.0 }).is_err());
    }

    #[test]
    fn duhamel_without_forcing_is_free_flow() {
        let grid = LambdaGrid::uniform(3, 0.5).unwrap();
        let f = random_coeffs(1, 4, grid, 8);
        let times: Vec<f64> = (0..9).map(|i| i as f64 * 0.25).collect();
        let zero = SpectralCoefficients::zeros(1, 4, grid);
        let g = TimeSeries { times: times.clone(), values: vec![zero; 9] };
        let u = duhamel_solve(&f, &g).unwrap();
        for (s, us) in times.iter().zip(&u) {
            let want = schrodinger_evolve(&f, *s);
            for (a, b) in us.values.iter().zip(&want.values) {
                assert!((a - b).norm() < 1e-14);
            }
        }
        let short = TimeSeries { times: vec![0.0, 0.1], values: vec![f.clone(), f.clone()] };
        assert!(duhamel_solve(&f, &short).is_err());
    }

    #[test]
    fn cumulative_rule_is_exact_for_cubics() {
        let h = 0.1;
        let a: Vec<C64> = (0..12).map(|i| C64::new((i as f64 * h).powi(3), 0.0)).collect();
        let c = cumulative_integrals(&a, h);
        for (i, v) in c.iter().enumerate().skip(1) {
            let s = i as f64 * h;
            assert!((v.re - s.powi(4) / 4.0).abs() < 1e-14, "{i}");
        }
    }

    #[test]
    fn fresnel_product_rule_is_exact_for_linear_data() {
        // g(μ) = μ on every cell: ∫₀^B μ e^{−iωμ²} dμ = (1 − e^{−iωB²})/(2iω)
        let mus: Vec<f64> = (0..40).map(|j| (j as f64 + 0.5) * 0.05).collect();
        let g: Vec<C64> = mus.iter().map(|&m| C64::new(m, 0.0)).collect();
        for &w in &[0.0, 1e-6, 0.3, 7.0, 250.0, -3.0] {
            let b: f64 = *mus.last().unwrap();
            let want = if w == 0.0 { C64::new(0.5 * b * b, 0.0) } else { -expm1_i(-w * b * b) / C64::new(0.0, 2.0 * w) };
            let got = fresnel_product_sum(&mus, &g, w);
            assert!((got - want).norm() < 1e-12, "ω = {w}: {got} vs {want}");
        }
    }
}
