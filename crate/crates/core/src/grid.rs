//! Grids in λ, t and s, and the discretized (mixed) Lebesgue norms.

use crate::error::{Error, Result};
use crate::exec;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Placement of the λ nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LambdaLayout {
    /// `λ_j = ±(j+½)Δ`, weight Δ.
    #[default]
    Uniform,
    /// `λ_j = ±((j+½)Δ)²`, weight `2μ_jΔ`: midpoint rule in `μ = √|λ|`.
    Sqrt,
}

/// Symmetric λ-grid that never contains 0. Nodes are stored ascending: the
/// first `J` are negative, the last `J` positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub half_count: usize,
    pub spacing: f64,
    #[serde(default)]
    pub layout: LambdaLayout,
}

impl LambdaGrid {
    pub fn uniform(half_count: usize, spacing: f64) -> Result<Self> {
        Self::with_layout(half_count, spacing, LambdaLayout::Uniform)
    }

    pub fn sqrt(half_count: usize, spacing: f64) -> Result<Self> {
        Self::with_layout(half_count, spacing, LambdaLayout::Sqrt)
    }

    pub fn with_layout(half_count: usize, spacing: f64, layout: LambdaLayout) -> Result<Self> {
        if half_count == 0 || !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Parameter(format!("λ-grid needs J ≥ 1 and Δ > 0, got J = {half_count}, Δ = {spacing}")));
        }
        Ok(Self { half_count, spacing, layout })
    }

    /// Uniform grid covering `[−Λ, Λ]` with spacing Δ.
    pub fn uniform_covering(lambda_max: f64, spacing: f64) -> Result<Self> {
        Self::uniform((lambda_max / spacing).ceil().max(1.0) as usize, spacing)
    }

    /// √-layout grid covering `[−Λ, Λ]` with μ-spacing Δμ.
    pub fn sqrt_covering(lambda_max: f64, mu_spacing: f64) -> Result<Self> {
        Self::sqrt((lambda_max.sqrt() / mu_spacing).ceil().max(1.0) as usize, mu_spacing)
    }

    pub fn len(&self) -> usize {
        2 * self.half_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed half-index: `(sign, j)` with `λ = sign·m(j)`.
    fn split(&self, i: usize) -> (f64, usize) {
        let j = self.half_count;
        if i < j {
            (-1.0, j - 1 - i)
        } else {
            (1.0, i - j)
        }
    }

    /// `(j+½)Δ`, the magnitude in the grid's own variable.
    pub fn mu(&self, i: usize) -> f64 {
        (self.split(i).1 as f64 + 0.5) * self.spacing
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.split(i).0
    }

    pub fn node(&self, i: usize) -> f64 {
        let (sg, _) = self.split(i);
        let m = self.mu(i);
        match self.layout {
            LambdaLayout::Uniform => sg * m,
            LambdaLayout::Sqrt => sg * m * m,
        }
    }

    pub fn weight(&self, i: usize) -> f64 {
        match self.layout {
            LambdaLayout::Uniform => self.spacing,
            LambdaLayout::Sqrt => 2.0 * self.mu(i) * self.spacing,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.node(self.len() - 1)
    }

    /// Index of the node `-λ_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// Same grid with every node scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let spacing = match self.layout {
            LambdaLayout::Uniform => self.spacing * c,
            LambdaLayout::Sqrt => self.spacing * c.sqrt(),
        };
        Self { spacing, ..*self }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = (0..self.len()).map(|i| self.weight(i) * f(self.node(i))).collect();
        exec::pairwise_sum(&terms)
    }
}

/// Uniform midpoint grid on `[−T, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub half_width: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn new(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0) || count == 0 {
            return Err(Error::Parameter(format!("time grid needs T > 0 and N ≥ 1, got T = {half_width}, N = {count}")));
        }
        Ok(Self { half_width, count })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|m| -self.half_width + (m as f64 + 0.5) * h).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![self.step(); self.count]
    }
}

/// Midpoint nodes/weights on `[a, b]`.
pub fn midpoint_axis(a: f64, b: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / count as f64;
    ((0..count).map(|i| a + (i as f64 + 0.5) * h).collect(), vec![h; count])
}

/// Euclidean ball in `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        let n = x.len();
        let d2: f64 = x.iter().zip(&self.center[..n]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() + (t - self.center[n]).powi(2);
        d2 <= self.radius * self.radius
    }
}

/// Lebesgue exponent in `[1, ∞]`. Serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("exponent {p} outside [1, ∞]")));
        }
        Ok(Self(p))
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate.
    pub fn conjugate(&self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.is_infinite() {
            Exponent(1.0)
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// `1/p`, zero for ∞.
    pub fn recip(&self) -> f64 {
        1.0 / self.0
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "infinity" => Ok(Exponent::INF),
            v => Exponent::new(v.parse().map_err(|_| Error::Parameter(format!("bad exponent '{v}'")))?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `L^r_t L^q_s L^p_x`, optionally restricted to a ball in `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub r: Exponent,
    pub q: Exponent,
    pub p: Exponent,
    #[serde(default)]
    pub region: Option<Ball>,
}

impl MixedNormSpec {
    pub fn new(r: Exponent, q: Exponent, p: Exponent) -> Self {
        Self { r, q, p, region: None }
    }

    pub fn within(mut self, ball: Ball) -> Self {
        self.region = Some(ball);
        self
    }
}

/// Weighted `L^p` of `|v|`; `∞` gives the maximum.
pub fn lp_norm(values: &[f64], weights: &[f64], p: Exponent) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p.0 == 2.0 {
        let t: Vec<f64> = values.iter().zip(weights).map(|(v, w)| w * v * v).collect();
        return exec::pairwise_sum(&t).sqrt();
    }
    let t: Vec<f64> = values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p.0)).collect();
    exec::pairwise_sum(&t).powf(1.0 / p.0)
}

/// Samples of a field on a tensor grid in `(x, t)`; x is itself a tensor of
/// one-dimensional axes. Values are stored `[t][x]`.
#[derive(Debug, Clone)]
pub struct Samples2 {
    pub n: usize,
    pub x_points: Vec<Vec<f64>>,
    pub x_weights: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub t_weights: Vec<f64>,
    /// Axis-aligned extent `[(lo, hi); n+1]` covered by the grid.
    pub extent: Vec<(f64, f64)>,
    pub values: Vec<C64>,
}

/// Samples on `(x, t, s)`, stored `[t][s][x]`.
#[derive(Debug, Clone)]
pub struct Samples3 {
    pub n: usize,
    pub x_points: Vec<Vec<f64>>,
    pub x_weights: Vec<f64>,
    pub t_nodes: Vec<f64>,
    pub t_weights: Vec<f64>,
    pub s_nodes: Vec<f64>,
    pub s_weights: Vec<f64>,
    pub values: Vec<C64>,
}

/// One-dimensional axis: nodes, weights and the interval they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl Axis {
    pub fn midpoint(lo: f64, hi: f64, count: usize) -> Self {
        let (nodes, weights) = midpoint_axis(lo, hi, count);
        Self { nodes, weights, lo, hi }
    }

    pub fn refined(&self) -> Self {
        Self::midpoint(self.lo, self.hi, 2 * self.nodes.len())
    }
}

/// Tensor product of `n` copies of `axis`.
pub fn tensor_points(n: usize, axis: &Axis) -> (Vec<Vec<f64>>, Vec<f64>) {
    crate::hermite::tensor_rule(n, &axis.nodes, &axis.weights)
}

fn check_finite(v: C64, what: impl Fn() -> String) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Evaluation(format!("non-finite sample at {}", what())))
    }
}

impl Samples2 {
    pub fn sample<F>(n: usize, x_axis: &Axis, t_axis: &Axis, f: F) -> Result<Self>
    where
        F: Fn(&[f64], f64) -> C64 + Sync + Send,
    {
        let (x_points, x_weights) = tensor_points(n, x_axis);
        let rows = exec::map_slice(&t_axis.nodes, |&t| x_points.iter().map(|x| f(x, t)).collect::<Vec<_>>());
        let values: Vec<C64> = rows.into_iter().flatten().collect();
        let nx = x_points.len();
        for (i, v) in values.iter().enumerate() {
            check_finite(*v, || format!("x = {:?}, t = {}", x_points[i % nx], t_axis.nodes[i / nx]))?;
        }
        let mut extent = vec![(x_axis.lo, x_axis.hi); n];
        extent.push((t_axis.lo, t_axis.hi));
        Ok(Self { n, x_points, x_weights, t_nodes: t_axis.nodes.clone(), t_weights: t_axis.weights.clone(), extent, values })
    }
}

impl Samples3 {
    pub fn sample<F>(n: usize, x_axis: &Axis, t_axis: &Axis, s_axis: &Axis, f: F) -> Result<Self>
    where
        F: Fn(&[f64], f64, f64) -> C64 + Sync + Send,
    {
        let (x_points, x_weights) = tensor_points(n, x_axis);
        let rows = exec::map_slice(&t_axis.nodes, |&t| {
            let mut row = Vec::with_capacity(s_axis.nodes.len() * x_points.len());
            for &s in &s_axis.nodes {
                row.extend(x_points.iter().map(|x| f(x, t, s)));
            }
            row
        });
        let values: Vec<C64> = rows.into_iter().flatten().collect();
        let s = Self {
            n,
            x_points,
            x_weights,
            t_nodes: t_axis.nodes.clone(),
            t_weights: t_axis.weights.clone(),
            s_nodes: s_axis.nodes.clone(),
            s_weights: s_axis.weights.clone(),
            values,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        let nx = self.x_points.len();
        let ns = self.s_nodes.len();
        if self.values.len() != nx * ns * self.t_nodes.len() {
            return Err(Error::Parameter("sample array does not match the grid".into()));
        }
        for (i, v) in self.values.iter().enumerate() {
            check_finite(*v, || {
                format!("x = {:?}, s = {}, t = {}", self.x_points[i % nx], self.s_nodes[(i / nx) % ns], self.t_nodes[i / (nx * ns)])
            })?;
        }
        Ok(())
    }
}

/// Discretized `L^r_t L^q_s L^p_x` norm: x first, then s, then t.
pub fn mixed_norm(u: &Samples3, spec: &MixedNormSpec) -> Result<f64> {
    u.check()?;
    let nx = u.x_points.len();
    let ns = u.s_nodes.len();
    let per_t: Vec<f64> = exec::map_range(u.t_nodes.len(), |it| {
        let t = u.t_nodes[it];
        let mask: Vec<bool> = match &spec.region {
            Some(b) => u.x_points.iter().map(|x| b.contains(x, t)).collect(),
            None => vec![true; nx],
        };
        let mut xs_w = Vec::with_capacity(nx);
        for (w, &m) in u.x_weights.iter().zip(&mask) {
            if m {
                xs_w.push(*w);
            }
        }
        let inner: Vec<f64> = (0..ns)
            .map(|is| {
                let base = (it * ns + is) * nx;
                let vals: Vec<f64> = (0..nx).filter(|&ix| mask[ix]).map(|ix| u.values[base + ix].norm()).collect();
                lp_norm(&vals, &xs_w, spec.p)
            })
            .collect();
        lp_norm(&inner, &u.s_weights, spec.q)
    });
    Ok(lp_norm(&per_t, &u.t_weights, spec.r))
}

/// `L^p` norm over a ball in `(x, t)` by masked tensor quadrature.
pub fn ball_lp_norm(u: &Samples2, p: Exponent, ball: &Ball) -> Result<f64> {
    let n = u.n;
    if ball.center.len() != n + 1 {
        return Err(Error::Parameter("ball center must have n+1 coordinates".into()));
    }
    for (j, &(lo, hi)) in u.extent.iter().enumerate() {
        let c = ball.center[j];
        if c - ball.radius < lo - 1e-12 || c + ball.radius > hi + 1e-12 {
            return Err(Error::Coverage(format!(
                "ball [{}, {}] along axis {j} leaves the sampled extent [{lo}, {hi}]",
                c - ball.radius,
                c + ball.radius
            )));
        }
    }
    let nx = u.x_points.len();
    let mut vals = Vec::new();
    let mut ws = Vec::new();
    for (it, &t) in u.t_nodes.iter().enumerate() {
        for ix in 0..nx {
            if ball.contains(&u.x_points[ix], t) {
                vals.push(u.values[it * nx + ix].norm());
                ws.push(u.t_weights[it] * u.x_weights[ix]);
            }
        }
    }
    Ok(lp_norm(&vals, &ws, p))
}

/// Midpoint sampling grid on the bounding box of `ball`.
pub fn ball_axes(ball: &Ball, per_axis: usize) -> Vec<Axis> {
    ball.center.iter().map(|&c| Axis::midpoint(c - ball.radius, c + ball.radius, per_axis)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid_symmetry() {
        for g in [LambdaGrid::uniform(7, 0.3).unwrap(), LambdaGrid::sqrt(9, 0.2).unwrap()] {
            let nodes = g.nodes();
            assert!(nodes.iter().all(|&l| l != 0.0));
            for i in 0..g.len() {
                assert_eq!(nodes[i], -nodes[g.mirror(i)]);
                assert_eq!(g.weight(i), g.weight(g.mirror(i)));
            }
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
            let even = g.integrate(|l| (-l * l).exp());
            let half: f64 = (g.half_count..g.len()).map(|i| g.weight(i) * (-g.node(i).powi(2)).exp()).sum();
            assert!((even - 2.0 * half).abs() < 1e-12);
        }
        assert!(LambdaGrid::uniform(0, 1.0).is_err());
        assert!(LambdaGrid::uniform(3, 0.0).is_err());
    }

    #[test]
    fn sqrt_grid_integrates() {
        let g = LambdaGrid::sqrt_covering(40.0, 0.01).unwrap();
        let v = g.integrate(|l| (-l.abs()).exp());
        assert!((v - 2.0).abs() < 1e-4);
    }

    #[test]
    fn unit_cube_and_l2() {
        let ax = Axis::midpoint(0.0, 1.0, 8);
        let u = Samples3::sample(1, &ax, &ax, &ax, |_, _, _| C64::new(1.0, 0.0)).unwrap();
        let one = Exponent(1.0);
        let v = mixed_norm(&u, &MixedNormSpec::new(one, one, one)).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let u = Samples3::sample(1, &ax, &ax, &ax, |x, t, s| C64::new(x[0] * t + s, x[0])).unwrap();
        let two = Exponent(2.0);
        let v = mixed_norm(&u, &MixedNormSpec::new(two, two, two)).unwrap();
        let h3 = 1.0 / 512.0;
        let plain = (u.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * h3).sqrt();
        assert!((v - plain).abs() < 1e-12);
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let ax = Axis::midpoint(0.0, 1.0, 4);
        let e = Samples3::sample(1, &ax, &ax, &ax, |x, _, _| C64::new(if x[0] > 0.8 { f64::NAN } else { 0.0 }, 0.0)).unwrap_err();
        assert!(matches!(e, Error::Evaluation(ref m) if m.contains("x = [0.875]")));
    }

    #[test]
    fn ball_norms() {
        let ball = Ball::new(vec![0.2, -0.1], 0.7).unwrap();
        let axes = ball_axes(&ball, 200);
        let u = Samples2::sample(1, &axes[0], &axes[1], |_, _| C64::new(1.0, 0.0)).unwrap();
        assert_eq!(ball_lp_norm(&u, Exponent::INF, &ball).unwrap(), 1.0);
        let area = ball_lp_norm(&u, Exponent(1.0), &ball).unwrap();
        assert!((area / (std::f64::consts::PI * 0.49) - 1.0).abs() < 0.02);
        let off = Samples2::sample(1, &axes[0], &axes[1], |x, t| C64::new(if (x[0] - 0.2).powi(2) + (t + 0.1).powi(2) > 0.5 { 1.0 } else { 0.0 }, 0.0)).unwrap();
        assert_eq!(ball_lp_norm(&off, Exponent(2.0), &ball).unwrap(), 0.0);
        let big = Ball::new(vec![0.2, -0.1], 0.8).unwrap();
        assert!(matches!(ball_lp_norm(&u, Exponent(1.0), &big), Err(Error::Coverage(_))));
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert!("0.5".parse::<Exponent>().is_err());
        assert_eq!(Exponent(4.0).conjugate().0, 4.0 / 3.0);
        let s = serde_json::to_string(&MixedNormSpec::new(Exponent::INF, Exponent(4.0), Exponent(6.0))).unwrap();
        let back: MixedNormSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back.r, Exponent::INF);
    }
}
