//! Seeded test data shared by the experiments.

use grushin::field::Decay;
use grushin::grid::{lp_norm, Ball, Exponent};
use grushin::quadrature::gauss_legendre;
use grushin::{Field, Field3, Psi, Result, Wavepacket, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` of the experiment seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Gaussian wavepackets with random centers in `[−1,1]`, widths in `[0.6,1.4]`
/// and modulations in `[−1,1]`.
pub fn wavepackets(seed: u64, stream: u64, n: usize, count: usize) -> Vec<Wavepacket> {
    let mut r = rng(seed, stream);
    (0..count)
        .map(|_| Wavepacket {
            x0: (0..n).map(|_| r.random_range(-1.0..1.0)).collect(),
            t0: r.random_range(-1.0..1.0),
            a: r.random_range(0.6..1.4),
            b: r.random_range(0.6..1.4),
            xi: (0..n).map(|_| r.random_range(-1.0..1.0)).collect(),
            tau: r.random_range(-1.0..1.0),
        })
        .collect()
}

/// Wavepacket on `ℝⁿ × ℝ × ℝ` with an anisotropic Gaussian envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket3 {
    pub center: Vec<f64>,
    pub widths: Vec<f64>,
    pub modulation: Vec<f64>,
}

impl Wavepacket3 {
    pub fn eval(&self, x: &[f64], t: f64, s: f64) -> C64 {
        let n = x.len();
        let mut e = 0.0;
        let mut ph = 0.0;
        for (j, v) in x.iter().copied().chain([t, s]).enumerate().take(n + 2) {
            let d = (v - self.center[j]) / self.widths[j];
            e -= 0.5 * d * d;
            ph += self.modulation[j] * v;
        }
        C64::from_polar(e.exp(), ph)
    }

    pub fn field(&self) -> Field3 {
        let w = self.clone();
        Field3::new(self.center.len() - 2, Decay::Gaussian, move |x, t, s| w.eval(x, t, s))
    }
}

pub fn wavepackets3(seed: u64, stream: u64, n: usize, count: usize) -> Vec<Wavepacket3> {
    let mut r = rng(seed, stream);
    (0..count)
        .map(|_| Wavepacket3 {
            center: (0..n + 2).map(|_| r.random_range(-1.0..1.0)).collect(),
            widths: (0..n + 2).map(|_| r.random_range(0.6..1.5)).collect(),
            modulation: (0..n + 2).map(|_| r.random_range(-1.0..1.0)).collect(),
        })
        .collect()
}

/// Real bump in `B(w₀, R₀)`: a Gaussian of width `σ` about `w₀` cut off
/// smoothly between `0.6R₀` and `R₀`.
pub fn bump_datum(n: usize, w0: &[f64], r0: f64, sigma: f64) -> Result<Field> {
    let ball = Ball::new(w0.to_vec(), r0)?;
    let cut = Psi::bump(0.6)?;
    let c = w0.to_vec();
    Ok(Field::compact(n, ball, move |x, t| {
        let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() + (t - c[n]).powi(2);
        C64::new((-0.5 * d2 / (sigma * sigma)).exp() * cut.eval(d2.sqrt() / r0), 0.0)
    }))
}

/// `‖f‖_{L^p}` of a field supported in `ball`, by tensor Gauss–Legendre on its
/// bounding box.
pub fn compact_lp_norm(f: &Field, ball: &Ball, order: usize, p: Exponent) -> Result<f64> {
    let n = f.n;
    let per_axis: Vec<(Vec<f64>, Vec<f64>)> =
        ball.center.iter().map(|&c| gauss_legendre(order, c - ball.radius, c + ball.radius)).collect::<Result<_>>()?;
    let total = order.pow(n as u32 + 1);
    let mut vals = Vec::with_capacity(total);
    let mut ws = Vec::with_capacity(total);
    let mut z = vec![0.0; n + 1];
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for j in (0..=n).rev() {
            let i = rem % order;
            rem /= order;
            z[j] = per_axis[j].0[i];
            w *= per_axis[j].1[i];
        }
        vals.push(f.eval(&z[..n], z[n]).norm());
        ws.push(w);
    }
    Ok(lp_norm(&vals, &ws, p))
}

/// Volume of a ball of radius `r` in `ℝ^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    let h = d as f64 / 2.0;
    std::f64::consts::PI.powf(h) / grushin::special::gamma(h + 1.0) * r.powi(d as i32)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `j·h` for `j = 0..=count`, with trapezoid weights.
pub fn uniform_from_zero(end: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let h = end / count as f64;
    let nodes: Vec<f64> = (0..=count).map(|j| j as f64 * h).collect();
    let mut w = vec![h; count + 1];
    w[0] = 0.5 * h;
    w[count] = 0.5 * h;
    (nodes, w)
}
