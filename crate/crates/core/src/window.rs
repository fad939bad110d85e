//! Smooth even cutoff functions ψ.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Even weight on ℝ with `0 ≤ ψ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Psi {
    /// C^∞ bump: 1 on `[−plateau, plateau]`, 0 outside `(−1, 1)`, smooth
    /// `e^{−1/u}` transition in between.
    Bump { plateau: f64 },
    /// ψ ≡ 1 (no localization).
    One,
}

impl Psi {
    pub fn bump(plateau: f64) -> Result<Self> {
        if !(0.0 < plateau && plateau < 1.0) {
            return Err(Error::Parameter(format!("bump plateau {plateau} must lie in (0, 1)")));
        }
        Ok(Psi::Bump { plateau })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Psi::Bump { plateau } => Psi::bump(plateau).map(|_| ()),
            Psi::One => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Psi::One => 1.0,
            Psi::Bump { plateau } => {
                let a = x.abs();
                if a <= plateau {
                    1.0
                } else if a >= 1.0 {
                    0.0
                } else {
                    let v = (a - plateau) / (1.0 - plateau);
                    let g = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
                    let (p, q) = (g(1.0 - v), g(v));
                    p / (p + q)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Psi::One => "psi=1".into(),
            Psi::Bump { plateau } => format!("bump(plateau={plateau},support=(-1,1),transition=exp(-1/u))"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_invariants() {
        let p = Psi::bump(0.25).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(0.25), 1.0);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(-3.0), 0.0);
        for i in 0..=400 {
            let x = -2.0 + 0.01 * i as f64;
            let v = p.eval(x);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, p.eval(-x));
        }
        assert!(Psi::bump(1.0).is_err());
        assert!(Psi::bump(0.0).is_err());
    }
}
