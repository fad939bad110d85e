//! Small special-function kit: Fresnel integrals and the hyperbolic ratios
//! that appear in the Mehler-type kernels.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Fresnel integrals `(S(x), C(x))` with the `sin(πt²/2)`, `cos(πt²/2)` convention.
///
/// Power series for |x| ≤ 1.5, modified Lentz continued fraction beyond.
pub fn fresnel(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 200;
    const XMIN: f64 = 1.5;

    let ax = x.abs();
    let (s, c) = if ax < FPMIN.sqrt() {
        (0.0, ax)
    } else if ax <= XMIN {
        let mut sum = 0.0;
        let mut sums = 0.0;
        let mut sumc = ax;
        let mut sign = 1.0;
        let fact = FRAC_PI_2 * ax * ax;
        let mut odd = true;
        let mut term = ax;
        let mut n = 3.0;
        for k in 1..MAXIT {
            term *= fact / k as f64;
            sum += sign * term / n;
            let test = sum.abs() * EPS;
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if term < test {
                break;
            }
            odd = !odd;
            n += 2.0;
        }
        (sums, sumc)
    } else {
        let pix2 = PI * ax * ax;
        let mut b = C64::new(1.0, -pix2);
        let mut cc = C64::new(1.0 / FPMIN, 0.0);
        let mut d = b.inv();
        let mut h = d;
        let mut n = -1.0;
        for _ in 2..MAXIT {
            n += 2.0;
            let a = -n * (n + 1.0);
            b += 4.0;
            d = (d * a + b).inv();
            cc = b + cc.inv() * a;
            let del = cc * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < EPS {
                break;
            }
        }
        h *= C64::new(ax, -ax);
        let cs = C64::new(0.5, 0.5) * (C64::new(1.0, 0.0) - C64::from_polar(1.0, 0.5 * pix2) * h);
        (cs.im, cs.re)
    };
    if x < 0.0 {
        (-s, -c)
    } else {
        (s, c)
    }
}

/// `E(u) = ∫₀^u e^{−iv²} dv`.
pub fn fresnel_e(u: f64) -> C64 {
    let k = (2.0 / PI).sqrt();
    let (s, c) = fresnel(u * k);
    C64::new(c, -s) * (FRAC_PI_2).sqrt()
}

/// `e^{iθ} − 1` without cancellation for small θ.
pub fn expm1_i(theta: f64) -> C64 {
    let h = (0.5 * theta).sin();
    C64::new(-2.0 * h * h, theta.sin())
}

/// `|λ| / sinh(2|λ|)`, extended by its limit ½ at 0.
pub fn lambda_over_sinh(lambda: f64) -> f64 {
    let x = lambda.abs();
    if x < 1e-4 {
        let y2 = 4.0 * x * x;
        0.5 * (1.0 - y2 / 6.0 + 7.0 * y2 * y2 / 360.0)
    } else if x > 20.0 {
        let e = (-2.0 * x).exp();
        2.0 * x * e / (1.0 - e * e)
    } else {
        x / (2.0 * x).sinh()
    }
}

/// `|λ| coth(2|λ|)`, extended by its limit ½ at 0.
pub fn lambda_coth(lambda: f64) -> f64 {
    let x = lambda.abs();
    if x < 1e-4 {
        let y2 = 4.0 * x * x;
        0.5 * (1.0 + y2 / 3.0 - y2 * y2 / 45.0)
    } else {
        x / (2.0 * x).tanh()
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
