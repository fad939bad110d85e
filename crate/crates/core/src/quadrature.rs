//! Gauss–Hermite and Gauss–Legendre rules plus an adaptive Gauss–Kronrod
//! integrator.

use crate::error::{Error, Result};
use crate::hermite::hermite_functions;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples rows `i` and `i+1`), ascending.
/// Implicit QL with Wilkinson shifts.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).take(n).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Gauss–Hermite rule for the weight `e^{−x²}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussHermiteRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `weights[i]·e^{x_i²}`, the rule for plain `∫ g(x) dx`. Kept separately
    /// because the far weights underflow for large orders.
    unit: Vec<f64>,
}

impl GaussHermiteRule {
    pub fn unit_weights(&self) -> Vec<f64> {
        self.unit.clone()
    }

    pub fn unit_weights_ref(&self) -> &[f64] {
        &self.unit
    }
}

/// Nodes from the Golub–Welsch eigenproblem, polished by Newton on `h_N`;
/// weights from the Christoffel function `1/Σ_{k<N} h_k(x_i)²`, which stays
/// accurate where the eigenvector components would underflow.
pub fn gauss_hermite_rule(order: usize) -> Result<GaussHermiteRule> {
    if !(1..=1024).contains(&order) {
        return Err(Error::Parameter(format!("Gauss–Hermite order {order} outside 1..=1024")));
    }
    let n = order;
    let d = vec![0.0; n];
    let e: Vec<f64> = (1..n).map(|k| (0.5 * k as f64).sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(&d, &e);
    let mut buf = vec![0.0; n + 1];
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            hermite_functions(*x, &mut buf);
            let hn = buf[n];
            let dh = (2.0 * n as f64).sqrt() * buf[n - 1] - *x * hn;
            if dh == 0.0 {
                break;
            }
            let step = hn / dh;
            *x -= step;
            if step.abs() < 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    // exact symmetry
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mut unit = Vec::with_capacity(n);
    for &x in &nodes {
        hermite_functions(x, &mut buf[..n]);
        let s: f64 = buf[..n].iter().map(|v| v * v).sum();
        unit.push(1.0 / s);
    }
    for i in 0..n / 2 {
        let m = 0.5 * (unit[i] + unit[n - 1 - i]);
        unit[i] = m;
        unit[n - 1 - i] = m;
    }
    let weights = nodes.iter().zip(&unit).map(|(x, u)| u * (-x * x).exp()).collect();
    Ok(GaussHermiteRule { order: n, nodes, weights, unit })
}

/// Gauss–Legendre nodes and weights on `[a, b]`, ascending.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::Parameter("Gauss–Legendre order must be positive".into()));
    }
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() < 1e-15 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                break;
            }
        }
        if n % 2 == 1 && i == m - 1 {
            z = 0.0;
        }
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        let wi = 2.0 * half / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    Ok((x, w))
}

/// Composite Gauss–Legendre: `panels` equal panels of `order` nodes each.
pub fn composite_gauss_legendre(order: usize, panels: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if panels == 0 {
        return Err(Error::Parameter("need at least one panel".into()));
    }
    let (g, gw) = gauss_legendre(order, -1.0, 1.0)?;
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(order * panels);
    let mut w = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (gi, wi) in g.iter().zip(&gw) {
            x.push(c + 0.5 * h * gi);
            w.push(0.5 * h * wi);
        }
    }
    Ok((x, w))
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    ((k * h), ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err && self.seq == o.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err).then(o.seq.cmp(&self.seq))
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex integrand on
/// `[a, b]`, bisecting the panel with the largest error estimate until the
/// total estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, initial_panels: usize) -> Result<(C64, f64)> {
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let np = initial_panels.max(1);
    let h = (b - a) / np as f64;
    for i in 0..np {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (value, err) = gk15(&f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, err, seq });
        seq += 1;
    }
    for _ in 0..20000 {
        let total: C64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(sum_in_order(heap));
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        for (lo, hi) in [(p.a, m), (m, p.b)] {
            let (value, err) = gk15(&f, lo, hi);
            heap.push(Panel { a: lo, b: hi, value, err, seq });
            seq += 1;
        }
    }
    Err(Error::Configuration("adaptive quadrature did not reach tolerance".into()))
}

fn sum_in_order(heap: BinaryHeap<Panel>) -> (C64, f64) {
    let mut v = heap.into_vec();
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    let total = v.iter().map(|p| p.value).sum();
    let err = v.iter().map(|p| p.err).sum();
    (total, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        let r = gauss_hermite_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - PI.sqrt()).abs() < 1e-15);
        let r = gauss_hermite_rule(2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((r.nodes[0] + h).abs() < 1e-15 && (r.nodes[1] - h).abs() < 1e-15);
        for w in &r.weights {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }
        let r = gauss_hermite_rule(3).unwrap();
        let m4: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn order_out_of_range() {
        assert!(gauss_hermite_rule(0).is_err());
        assert!(gauss_hermite_rule(1025).is_err());
    }

    #[test]
    fn weights_sum_and_moments() {
        for &n in &[5, 20, 64, 200, 1024] {
            let r = gauss_hermite_rule(n).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-12, "n={n}: {s}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w >= 0.0));
        }
        // ∫ x^{2m} e^{-x²} = Γ(m+½), exact up to 2N−1
        let r = gauss_hermite_rule(12).unwrap();
        for m in 0..12 {
            let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(2 * m)).sum();
            let want = crate::special::gamma(m as f64 + 0.5);
            assert!(((got - want) / want).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn hermite_functions_orthonormal_under_unit_rule() {
        let r = gauss_hermite_rule(80).unwrap();
        let u = r.unit_weights();
        let mut tab = vec![vec![0.0; 60]; r.order];
        for (i, &x) in r.nodes.iter().enumerate() {
            hermite_functions(x, &mut tab[i]);
        }
        for j in 0..60 {
            for k in 0..60 {
                let g: f64 = (0..r.order).map(|i| u[i] * tab[i][j] * tab[i][k]).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "{j} {k} {g}");
            }
        }
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(7, 0.0, 2.0).unwrap();
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(13)).sum();
        assert!((m - 2f64.powi(14) / 14.0).abs() < 1e-9);
        let (x, w) = gauss_legendre(4000, -1.0, 1.0).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((s - 2.0 * 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn tridiagonal_small() {
        let ev = tridiagonal_eigenvalues(&[2.0, 2.0, 2.0], &[1.0, 1.0]);
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_gk() {
        let (v, _) = integrate_adaptive(|x| C64::new((-x * x).exp(), 0.0), -10.0, 10.0, 1e-14, 1e-14, 4).unwrap();
        assert!((v.re - PI.sqrt()).abs() < 1e-13);
        let (v, _) = integrate_adaptive(|x| C64::from_polar(1.0, 40.0 * x), 0.0, 1.0, 1e-13, 1e-13, 1).unwrap();
        let want = (C64::from_polar(1.0, 40.0) - 1.0) / C64::new(0.0, 40.0);
        assert!((v - want).norm() < 1e-12);
    }
}
