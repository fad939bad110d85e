//! Evaluable input functions on ℝⁿ × ℝ and ℝⁿ × ℝ × ℝ.

use crate::grid::Ball;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// How quickly a field decays; decides how transforms truncate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    Gaussian,
    Compact,
    Generic,
}

type Eval2 = Arc<dyn Fn(&[f64], f64) -> C64 + Send + Sync>;
type Eval3 = Arc<dyn Fn(&[f64], f64, f64) -> C64 + Send + Sync>;

/// Complex field on `ℝⁿ × ℝ`.
#[derive(Clone)]
pub struct Field {
    pub n: usize,
    pub decay: Decay,
    /// Ball in `(x, t)` outside which the field vanishes.
    pub support: Option<Ball>,
    eval: Eval2,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("n", &self.n).field("decay", &self.decay).field("support", &self.support).finish()
    }
}

impl Field {
    pub fn new<F>(n: usize, decay: Decay, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> C64 + Send + Sync + 'static,
    {
        Self { n, decay, support: None, eval: Arc::new(f) }
    }

    /// Field supported in `ball`; the evaluator is masked to it.
    pub fn compact<F>(n: usize, ball: Ball, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> C64 + Send + Sync + 'static,
    {
        let b = ball.clone();
        Self {
            n,
            decay: Decay::Compact,
            support: Some(ball),
            eval: Arc::new(move |x, t| if b.contains(x, t) { f(x, t) } else { C64::new(0.0, 0.0) }),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, Decay::Gaussian, |_, _| C64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, x: &[f64], t: f64) -> C64 {
        (self.eval)(x, t)
    }

    /// `(f ∘ δ_r)(x, t) = f(r x, r² t)`.
    pub fn dilate(&self, r: f64) -> Self {
        let inner = self.clone();
        let support = self.support.as_ref().map(|b| {
            let mut c: Vec<f64> = b.center[..self.n].iter().map(|v| v / r).collect();
            c.push(b.center[self.n] / (r * r));
            // a ball maps to an ellipsoid; keep an enclosing ball
            Ball { center: c, radius: b.radius / r.min(r * r) }
        });
        Self {
            n: self.n,
            decay: self.decay,
            support,
            eval: Arc::new(move |x, t| {
                let y: Vec<f64> = x.iter().map(|v| r * v).collect();
                inner.eval(&y, r * r * t)
            }),
        }
    }
}

/// Complex field on `ℝⁿ × ℝ × ℝ`, arguments `(x, t, s)`.
#[derive(Clone)]
pub struct Field3 {
    pub n: usize,
    pub decay: Decay,
    eval: Eval3,
}

impl fmt::Debug for Field3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field3").field("n", &self.n).field("decay", &self.decay).finish()
    }
}

impl Field3 {
    pub fn new<F>(n: usize, decay: Decay, f: F) -> Self
    where
        F: Fn(&[f64], f64, f64) -> C64 + Send + Sync + 'static,
    {
        Self { n, decay, eval: Arc::new(f) }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, Decay::Gaussian, |_, _, _| C64::new(0.0, 0.0))
    }

    #[inline]
    pub fn eval(&self, x: &[f64], t: f64, s: f64) -> C64 {
        (self.eval)(x, t, s)
    }
}

/// `exp(−|x−x₀|²/2a² − (t−t₀)²/2b²) · e^{i(ξ·x + τt)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    pub x0: Vec<f64>,
    pub t0: f64,
    pub a: f64,
    pub b: f64,
    pub xi: Vec<f64>,
    pub tau: f64,
}

impl Wavepacket {
    pub fn eval(&self, x: &[f64], t: f64) -> C64 {
        let mut r2 = 0.0;
        let mut ph = self.tau * t;
        for j in 0..x.len() {
            let d = x[j] - self.x0[j];
            r2 += d * d;
            ph += self.xi[j] * x[j];
        }
        let dt = t - self.t0;
        C64::from_polar((-0.5 * r2 / (self.a * self.a) - 0.5 * dt * dt / (self.b * self.b)).exp(), ph)
    }

    /// Exact `‖·‖_{L²(ℝ^{n+1})}`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.x0.len() as i32;
        ((PI * self.a * self.a).powf(0.5 * n as f64) * (PI * self.b * self.b).sqrt()).sqrt()
    }

    pub fn field(&self) -> Field {
        let w = self.clone();
        Field::new(self.x0.len(), Decay::Gaussian, move |x, t| w.eval(x, t))
    }
}

/// Smooth bump `exp(1 − 1/(1 − r²))` on the unit ball, 0 outside.
pub fn unit_bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}
