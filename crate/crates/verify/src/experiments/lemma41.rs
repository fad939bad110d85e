//! Tabulation of `‖P_k(λ)φ‖_∞ / (|λ|^{n/2}(2k+n)^{(n−1)/2}‖φ‖₁)`.

use crate::config::ExperimentConfig;
use crate::data::rng;
use crate::params;
use crate::report::ReportRow;
use grushin::field::unit_bump;
use grushin::hermite::{hermite_functions, projection_apply, ProjectionQuadrature, ProjectedField};
use grushin::quadrature::gauss_legendre;
use grushin::{Error, Result, C64};
use rand::Rng;

/// Bump of radius `r` about `(c, …, c)`.
#[derive(Debug, Clone, Copy)]
struct Bump {
    c: f64,
    r: f64,
}

impl Bump {
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| (v - self.c) * (v - self.c)).sum::<f64>() / (self.r * self.r);
        unit_bump(r2)
    }

    fn l1_norm(&self, n: usize, order: usize) -> Result<f64> {
        let (x, w) = gauss_legendre(order, self.c - self.r, self.c + self.r)?;
        Ok(match n {
            1 => x.iter().zip(&w).map(|(&a, &wa)| wa * self.eval(&[a])).sum(),
            _ => x.iter().zip(&w).map(|(&a, &wa)| x.iter().zip(&w).map(|(&b, &wb)| wa * wb * self.eval(&[a, b])).sum::<f64>()).sum(),
        })
    }
}

/// Max of `|Σ_α c_α Φ_α^λ|` over a grid resolving the oscillation of degree
/// `kmax`, for each projection in `proj` (indexed by degree).
fn sup_norms(n: usize, lambda: f64, kmax: usize, proj: &[ProjectedField]) -> Vec<f64> {
    let a = lambda.abs();
    let sq = a.sqrt();
    let m = (2 * kmax + n) as f64;
    let extent = (m.sqrt() + 6.0) / sq;
    let step = if n == 1 { 0.25 } else { 0.5 } / (a * m).sqrt();
    let count = (2.0 * extent / step).ceil() as usize + 1;
    let xs: Vec<f64> = (0..count).map(|i| -extent + i as f64 * step).collect();
    let mut table = vec![0.0; kmax + 1];
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            hermite_functions(sq * x, &mut table);
            table.clone()
        })
        .collect();
    let norm = a.powf(0.25);
    let mut sup = vec![0.0f64; kmax + 1];
    match n {
        1 => {
            for h in &rows {
                for (k, pf) in proj.iter().enumerate() {
                    sup[k] = sup[k].max((pf.coefficients[0] * h[k] * norm).norm());
                }
            }
        }
        _ => {
            for h1 in &rows {
                for h2 in &rows {
                    for (k, pf) in proj.iter().enumerate() {
                        let v: C64 = pf.alphas.iter().zip(&pf.coefficients).map(|(al, c)| c * (h1[al[0]] * h2[al[1]])).sum();
                        sup[k] = sup[k].max(v.norm() * norm * norm);
                    }
                }
            }
        }
    }
    sup
}

pub fn verify_lemma41(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let n = cfg.n;
    if n > 2 {
        return Err(Error::Configuration("lemma41 supports n = 1 and n = 2".into()));
    }
    let res = cfg.refined_resolution();
    let p = &cfg.params;
    let (e0, e1) = p.lambda_exponents;
    if e0 > e1 || p.family_size == 0 {
        return Err(Error::Configuration("lemma41 needs a non-empty λ range and family".into()));
    }
    let kmax = res.max_degree;
    let mut r = rng(cfg.seed, 41);
    let family: Vec<Bump> = (0..p.family_size).map(|_| Bump { c: r.random_range(-1.0..1.0), r: r.random_range(0.3..1.0) }).collect();
    let l1: Vec<f64> = family.iter().map(|b| b.l1_norm(n, res.box_order)).collect::<Result<_>>()?;
    let lambdas: Vec<f64> = (e0..=e1).map(|e| 2f64.powi(e)).collect();
    // best[k][i] = max over the family at λ_i
    let mut best = vec![vec![0.0f64; lambdas.len()]; kmax + 1];
    for (il, &l) in lambdas.iter().enumerate() {
        for (b, &norm1) in family.iter().zip(&l1) {
            let quad = ProjectionQuadrature::Box { center: b.c, half_width: b.r, order: res.box_order };
            let proj: Vec<ProjectedField> =
                (0..=kmax).map(|k| projection_apply(n, k, l, |x| C64::new(b.eval(x), 0.0), quad)).collect::<Result<_>>()?;
            let sup = sup_norms(n, l, kmax, &proj);
            for k in 0..=kmax {
                let denom = l.powf(n as f64 / 2.0) * ((2 * k + n) as f64).powf((n as f64 - 1.0) / 2.0) * norm1;
                best[k][il] = best[k][il].max(sup[k] / denom);
            }
        }
    }
    let mut rows = Vec::new();
    let mut overall = 0.0f64;
    for (k, row) in best.iter().enumerate() {
        for (il, &v) in row.iter().enumerate() {
            overall = overall.max(v);
            rows.push(ReportRow::bound("lemma41", params!("k" => k, "lambda" => lambdas[il]), v, p.cap, cfg.tol));
        }
    }
    rows.push(ReportRow::bound("lemma41_sup", params!("kmax" => kmax, "lambdas" => lambdas.len()), overall, p.cap, cfg.tol));
    Ok(rows)
}
