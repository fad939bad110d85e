//! Experiment configuration: per-estimate defaults, TOML files and dotted
//! `key=value` overrides, merged in that order.

use grushin::{Error, Exponent, LambdaLayout, Psi, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    Dispersive,
    LocalStrichartz,
    AnisoSchrodinger,
    AnisoWave,
    InhomogeneousSchrodinger,
    InhomogeneousWave,
    Restriction,
    ScalingLaw,
    Lemma41,
    Prop11,
}

impl Estimate {
    pub const ALL: [Estimate; 10] = [
        Estimate::Dispersive,
        Estimate::LocalStrichartz,
        Estimate::AnisoSchrodinger,
        Estimate::AnisoWave,
        Estimate::InhomogeneousSchrodinger,
        Estimate::InhomogeneousWave,
        Estimate::Restriction,
        Estimate::ScalingLaw,
        Estimate::Lemma41,
        Estimate::Prop11,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimate::Dispersive => "dispersive",
            Estimate::LocalStrichartz => "local_strichartz",
            Estimate::AnisoSchrodinger => "aniso_schrodinger",
            Estimate::AnisoWave => "aniso_wave",
            Estimate::InhomogeneousSchrodinger => "inhomogeneous_schrodinger",
            Estimate::InhomogeneousWave => "inhomogeneous_wave",
            Estimate::Restriction => "restriction",
            Estimate::ScalingLaw => "scaling_law",
            Estimate::Lemma41 => "lemma41",
            Estimate::Prop11 => "prop11",
        }
    }

    pub fn is_wave(self) -> bool {
        matches!(self, Estimate::AnisoWave | Estimate::InhomogeneousWave)
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Estimate::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown estimate '{s}'")))
    }
}

/// Grid sizes shared by the experiments. Not every experiment reads every field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Maximal Hermite degree.
    #[serde(rename = "K")]
    pub max_degree: usize,
    pub lambda_max: f64,
    /// Δλ for the uniform layout, Δμ for the √ layout.
    pub lambda_spacing: f64,
    pub layout: LambdaLayout,
    /// Half-width of the t box.
    #[serde(rename = "T")]
    pub time_half_width: f64,
    pub time_count: usize,
    /// Largest |s| sampled.
    #[serde(rename = "S")]
    pub s_max: f64,
    pub s_count: usize,
    pub x_half_width: f64,
    /// Sample points per x axis (or per ball axis).
    pub x_count: usize,
    /// Quadrature nodes per x axis for transforms.
    pub x_order: usize,
    pub box_order: usize,
    /// Number of grid doublings applied on top of the above.
    pub refine: u32,
}

/// Estimate-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub k: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub w0: Vec<f64>,
    /// Width of the Gaussian profile inside the bump datum.
    pub sigma: f64,
    pub s: Vec<f64>,
    pub p: Vec<Exponent>,
    /// `(p, q)` pairs.
    pub pairs: Vec<(Exponent, Exponent)>,
    #[serde(rename = "R")]
    pub radii: Vec<f64>,
    /// Frequency-window radius at `R = 1`.
    pub window_radius: f64,
    pub family_size: usize,
    pub cap: f64,
    pub enforce_admissibility: bool,
    pub forcing_scale: f64,
    pub zero_datum: bool,
    /// Bump `Q` for the non-dispersive datum: center, half-width, Gaussian width.
    pub q_center: f64,
    pub q_half_width: f64,
    pub q_sigma: f64,
    /// Dyadic λ = 2^e for e in this inclusive range.
    pub lambda_exponents: (i32, i32),
    pub kernel_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub estimate: Estimate,
    pub n: usize,
    pub seed: u64,
    /// Tolerance of the pass predicate.
    pub tol: f64,
    /// Window ψ; its role depends on the estimate.
    pub psi: Psi,
    pub resolution: Resolution,
    pub params: Params,
}

fn exps(v: &[f64]) -> Vec<Exponent> {
    v.iter().map(|&p| Exponent(p)).collect()
}

impl ExperimentConfig {
    /// Defaults for `estimate` in dimension `n`.
    pub fn defaults(estimate: Estimate, n: usize) -> Self {
        let inf = f64::INFINITY;
        let mut res = Resolution {
            max_degree: 32,
            lambda_max: 4.0,
            lambda_spacing: 0.05,
            layout: LambdaLayout::Uniform,
            time_half_width: 8.0,
            time_count: 32,
            s_max: 2.0,
            s_count: 17,
            x_half_width: 4.0,
            x_count: 16,
            x_order: 48,
            box_order: 64,
            refine: 0,
        };
        let mut params = Params {
            k: 0.5,
            r0: 0.5,
            w0: vec![0.0; n + 1],
            sigma: 0.1,
            s: vec![],
            p: vec![],
            pairs: vec![],
            radii: vec![],
            window_radius: 2.0,
            family_size: 10,
            cap: 1e3,
            enforce_admissibility: true,
            forcing_scale: 1.0,
            zero_datum: false,
            q_center: 7.0,
            q_half_width: 5.95,
            q_sigma: 1.0,
            lambda_exponents: (-4, 4),
            kernel_samples: 100,
        };
        let mut tol = 1e-6;
        let mut psi = Psi::bump(0.25).expect("valid plateau");
        match estimate {
            Estimate::Dispersive => {
                params.s = vec![2.5, 4.0, 8.0];
                params.p = exps(&[2.0, 4.0, inf]);
                res.x_count = 24;
                res.box_order = 96;
            }
            Estimate::LocalStrichartz => {
                params.pairs = vec![(Exponent::INF, Exponent(2.0)), (Exponent(4.0), Exponent(4.0))];
                res.s_max = 32.0;
                res.s_count = 8;
                res.x_count = 12;
                res.box_order = 64;
                tol = 0.02;
            }
            Estimate::AnisoSchrodinger | Estimate::InhomogeneousSchrodinger => {
                params.pairs = vec![(Exponent(4.0), Exponent(4.0))];
                res.max_degree = if n == 1 { 48 } else { 16 };
                res.x_count = if n == 1 { 48 } else { 16 };
                tol = 0.05;
            }
            Estimate::AnisoWave | Estimate::InhomogeneousWave => {
                params.pairs = vec![(Exponent(4.0), Exponent(4.0))];
                res.max_degree = if n == 1 { 48 } else { 16 };
                res.x_count = if n == 1 { 48 } else { 16 };
                tol = 0.05;
            }
            Estimate::Restriction => {
                params.pairs = vec![
                    (Exponent(1.0), Exponent(1.0)),
                    (Exponent(1.5), Exponent(1.0)),
                    (Exponent(1.5), Exponent(1.5)),
                    (Exponent(1.9), Exponent(1.9)),
                ];
                params.family_size = 20;
                res.lambda_spacing = 0.04;
                res.lambda_max = 1.0;
                res.time_half_width = 10.0;
                res.time_count = 64;
                res.s_max = 10.0;
                res.s_count = 64;
                res.x_half_width = 6.0;
                res.x_count = 32;
                res.x_order = 48;
                psi = Psi::bump(0.5).expect("valid plateau");
                tol = 0.1;
            }
            Estimate::ScalingLaw => {
                params.pairs = vec![(Exponent(4.0), Exponent(4.0)), (Exponent(4.0), Exponent::INF)];
                params.radii = vec![1.0, 2.0, 4.0, 8.0];
                res.max_degree = if n == 1 { 48 } else { 16 };
                res.lambda_max = 4.0 / n as f64;
                res.time_count = 32;
                res.s_max = 1.0;
                res.s_count = 16;
                res.x_count = if n == 1 { 48 } else { 16 };
                tol = 0.1;
            }
            Estimate::Lemma41 => {
                params.family_size = 5;
                res.max_degree = if n == 1 { 64 } else { 16 };
                res.box_order = 96;
                params.cap = 1.0;
                tol = 0.0;
            }
            Estimate::Prop11 => {
                params.s = vec![0.0, 0.5, 1.0, 2.0];
                params.p = exps(&[1.0, 2.0, inf]);
                res.max_degree = 4;
                res.lambda_max = 14.0;
                psi = Psi::bump(0.85).expect("valid plateau");
                res.time_half_width = 16.0;
                res.time_count = 128;
                res.x_half_width = 6.0;
                res.x_count = if n == 1 { 48 } else { 24 };
            }
        }
        Self { estimate, n, seed: 0x5EED, tol, psi, resolution: res, params }
    }

    /// Defaults for the estimate and dimension named in `text` (falling back
    /// to `estimate`/`n`), overlaid with the file contents and then `overrides`.
    pub fn load(text: Option<&str>, estimate: Option<Estimate>, n: Option<usize>, overrides: &[String]) -> Result<Self> {
        let file: toml::Table = match text {
            Some(t) => toml::from_str(t).map_err(|e| Error::Configuration(format!("config parse: {}", one_line(&e.to_string()))))?,
            None => toml::Table::new(),
        };
        let mut over = toml::Table::new();
        for o in overrides {
            let (key, value) = parse_override(o)?;
            insert_dotted(&mut over, &key, value)?;
        }
        let pick = |key: &str| over.get(key).or_else(|| file.get(key)).cloned();
        let est = match (estimate, pick("estimate")) {
            (Some(e), _) => e,
            (None, Some(toml::Value::String(s))) => s.parse()?,
            (None, Some(_)) => return Err(Error::Configuration("'estimate' must be a string".into())),
            (None, None) => return Err(Error::Configuration("no estimate given".into())),
        };
        let dim = match (n, pick("n")) {
            (Some(n), _) => n,
            (None, Some(toml::Value::Integer(v))) if v > 0 => v as usize,
            (None, Some(_)) => return Err(Error::Configuration("'n' must be a positive integer".into())),
            (None, None) => 1,
        };
        let mut merged = toml::Table::try_from(Self::defaults(est, dim)).map_err(|e| Error::Configuration(e.to_string()))?;
        merge(&mut merged, file);
        merge(&mut merged, over);
        merged.insert("estimate".into(), toml::Value::String(est.as_str().into()));
        merged.insert("n".into(), toml::Value::Integer(dim as i64));
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| Error::Configuration(one_line(&e.to_string())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if self.n == 0 || self.n > 3 {
            return bad(format!("dimension n = {} outside 1..=3", self.n));
        }
        if !(self.tol >= 0.0) {
            return bad("tol must be non-negative".into());
        }
        self.psi.validate().map_err(|e| Error::Configuration(e.to_string()))?;
        let r = &self.resolution;
        if !(r.lambda_max > 0.0 && r.lambda_spacing > 0.0 && r.time_half_width > 0.0 && r.s_max > 0.0 && r.x_half_width > 0.0) {
            return bad("resolution extents and spacings must be positive".into());
        }
        if r.time_count == 0 || r.s_count == 0 || r.x_count == 0 || r.x_order == 0 || r.box_order == 0 {
            return bad("resolution counts must be positive".into());
        }
        if r.refine > 3 {
            return bad("refine is limited to 3 doublings".into());
        }
        let p = &self.params;
        if p.w0.len() != self.n + 1 {
            return bad(format!("w0 needs n+1 = {} coordinates", self.n + 1));
        }
        if !(p.sigma > 0.0) || !(p.cap > 0.0) || !(p.forcing_scale >= 0.0) {
            return bad("sigma and cap must be positive, forcing_scale non-negative".into());
        }
        Ok(())
    }

    /// Resolution after `refine` doublings of every count and halving of spacings.
    pub fn refined_resolution(&self) -> Resolution {
        let mut r = self.resolution.clone();
        for _ in 0..r.refine {
            r.lambda_spacing *= 0.5;
            r.time_count *= 2;
            r.s_count = 2 * r.s_count - (r.s_count % 2 == 1) as usize;
            r.x_count *= 2;
            r.x_order *= 2;
            r.box_order *= 2;
        }
        r.refine = 0;
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is serializable")
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `a.b.c=value`; the value is read as a TOML literal, or as a bare string.
pub fn parse_override(s: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = s.split_once('=').ok_or_else(|| Error::Configuration(format!("override '{s}' is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Configuration(format!("override '{s}' has an empty key")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

fn insert_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts = key.split('.').peekable();
    let mut cur = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = cur.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| Error::Configuration(format!("override key '{key}' crosses a non-table value")))?;
    }
    Ok(())
}

/// Recursive overlay: tables merge key by key, everything else is replaced.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
