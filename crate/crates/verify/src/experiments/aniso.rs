//! Anisotropic Strichartz norms `L^∞_t L^q_s L^p_x` of homogeneous and forced
//! Schrödinger and wave solutions, with box-doubling stability.

use super::scaling::assemble;
use crate::config::{Estimate, ExperimentConfig};
use crate::data::{uniform_from_zero, wavepackets};
use crate::params;
use crate::report::{ratio, ReportRow};
use grushin::grid::{mixed_norm, tensor_points, Axis, Exponent, MixedNormSpec};
use grushin::propagator::{duhamel_solve, duhamel_wave, frequency_localize, schrodinger_evolve, wave_evolve};
use grushin::transform::{forward_transform, XRule};
use grushin::{Error, LambdaGrid, LocalizationWindow, Result, SpectralCoefficients, TimeGrid, TimeSeries, TransformConfig, C64};
use std::f64::consts::PI;

/// Checks `(p, q)` against `A` (Schrödinger) or `A_w` (wave), naming the failed condition.
pub fn check_admissible(n: usize, pair: (Exponent, Exponent), wave: bool) -> Result<()> {
    let (p, q) = pair;
    if !(p.0 > 2.0 && p.0 <= q.0) {
        return Err(Error::Configuration(format!("pair (p,q) = ({p},{q}) is not admissible: 2 < p ≤ q ≤ ∞ fails")));
    }
    let target = (n as f64 + 2.0) / 2.0;
    let (lhs, text) = if wave {
        (q.recip() + n as f64 * p.recip(), "1/q + n/p")
    } else {
        (2.0 * q.recip() + n as f64 * p.recip(), "2/q + n/p")
    };
    if (lhs - target).abs() > 1e-12 {
        return Err(Error::Configuration(format!(
            "pair (p,q) = ({p},{q}) is not admissible: {text} = {lhs} but (n+2)/2 = {target}"
        )));
    }
    Ok(())
}

/// Largest Δλ whose t-period `2π/Δλ` exceeds the doubled t box plus the
/// transport `S(2K+n)` of the doubled s range, with 20% margin.
fn revival_safe_spacing(cfg: &ExperimentConfig) -> f64 {
    let r = cfg.refined_resolution();
    let reach = 4.0 * r.time_half_width + 2.0 * r.s_max * (2 * r.max_degree + cfg.n) as f64;
    r.lambda_spacing.min(2.0 * PI / (1.2 * reach))
}

struct Setup {
    tcfg: TransformConfig,
    window: LocalizationWindow,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let r = cfg.refined_resolution();
        let tcfg = TransformConfig {
            n: cfg.n,
            max_degree: r.max_degree,
            lambda: LambdaGrid::uniform_covering(r.lambda_max, revival_safe_spacing(cfg))?,
            time: TimeGrid::new(r.time_half_width, 4 * r.time_count)?,
            x_order: r.x_order,
            box_order: r.box_order,
            x_rule: XRule::GaussHermite,
        };
        Ok(Self { tcfg, window: LocalizationWindow { psi: cfg.psi, radius: cfg.params.window_radius } })
    }

    fn transform(&self, w: &grushin::Wavepacket, zero: bool) -> Result<SpectralCoefficients> {
        let c = frequency_localize(&forward_transform(&w.field(), &self.tcfg)?, &self.window)?;
        Ok(if zero { c.map_multiplier(|_, _| C64::new(0.0, 0.0)) } else { c })
    }
}

/// `G^{−1/2}` on the spectral side (wave frequency `√((2k+n)|λ|)`).
fn inverse_sqrt_g(c: &SpectralCoefficients) -> Result<SpectralCoefficients> {
    let n = c.n;
    let out = c.map_multiplier(|k, l| C64::new(1.0 / ((2 * k + n) as f64 * l.abs()).sqrt(), 0.0));
    if out.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Configuration("G^(-1/2) weight is not finite on the grid".into()));
    }
    Ok(out)
}

/// Datum, velocity and forcing profile of one family member.
struct Member {
    f: SpectralCoefficients,
    g: Option<SpectralCoefficients>,
    h: Option<SpectralCoefficients>,
}

fn forcing_profile(cfg: &ExperimentConfig, s: f64) -> f64 {
    let s0 = cfg.refined_resolution().s_max;
    let (c, w) = (0.5 * s0, 0.125 * s0);
    cfg.params.forcing_scale * (-0.5 * ((s - c) / w).powi(2)).exp()
}

/// Solution samples on the box at doubling level `level`, and the data norm.
fn solve_and_sample(cfg: &ExperimentConfig, m: &Member, level: u32) -> Result<grushin::grid::Samples3> {
    let r = cfg.refined_resolution();
    let scale = f64::from(1u32 << level);
    let n = cfg.n;
    let x_axis = Axis::midpoint(-r.x_half_width * scale, r.x_half_width * scale, r.x_count << level);
    let t_axis = Axis::midpoint(-r.time_half_width * scale, r.time_half_width * scale, r.time_count << level);
    let steps = (r.s_count.max(3) - 1) << level;
    let (s_nodes, s_weights) = uniform_from_zero(r.s_max * scale, steps);
    let (x_points, x_weights) = tensor_points(n, &x_axis);
    let states: Vec<SpectralCoefficients> = match (&m.h, cfg.estimate.is_wave()) {
        (None, false) => s_nodes.iter().map(|&s| schrodinger_evolve(&m.f, s)).collect(),
        (None, true) => s_nodes.iter().map(|&s| wave_evolve(&m.f, m.g.as_ref().expect("wave velocity"), s)).collect::<Result<_>>()?,
        (Some(h), wave) => {
            let series = TimeSeries { times: s_nodes.clone(), values: s_nodes.iter().map(|&s| h.map_multiplier(|_, _| C64::new(forcing_profile(cfg, s), 0.0))).collect() };
            if wave {
                duhamel_wave(&m.f, m.g.as_ref().expect("wave velocity"), &series)?
            } else {
                duhamel_solve(&m.f, &series)?
            }
        }
    };
    let per_s: Vec<Vec<C64>> = states.iter().map(|c| c.inverse().eval_grid(&x_points, &t_axis.nodes)).collect();
    Ok(assemble(n, x_points, x_weights, &t_axis, &s_nodes, &s_weights, &per_s))
}

fn data_norm(cfg: &ExperimentConfig, m: &Member) -> Result<f64> {
    let mut total = m.f.physical_l2_norm();
    if let Some(g) = &m.g {
        total += inverse_sqrt_g(g)?.physical_l2_norm();
    }
    if let Some(h) = &m.h {
        let r = cfg.refined_resolution();
        let steps = (r.s_count.max(3) - 1) * 2;
        let (s_nodes, s_weights) = uniform_from_zero(2.0 * r.s_max, steps);
        let l1: f64 = s_nodes.iter().zip(&s_weights).map(|(&s, &w)| w * forcing_profile(cfg, s).abs()).sum();
        let hn = if cfg.estimate.is_wave() { inverse_sqrt_g(h)?.physical_l2_norm() } else { h.physical_l2_norm() };
        total += l1 * hn;
    }
    Ok(total)
}

/// Shared driver of the four anisotropic experiments.
pub fn verify_aniso(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let n = cfg.n;
    let p = &cfg.params;
    let wave = cfg.estimate.is_wave();
    let forced = matches!(cfg.estimate, Estimate::InhomogeneousSchrodinger | Estimate::InhomogeneousWave);
    if !matches!(cfg.estimate, Estimate::AnisoSchrodinger | Estimate::AnisoWave) && !forced {
        return Err(Error::Configuration(format!("{} is not an anisotropic experiment", cfg.estimate)));
    }
    if p.pairs.is_empty() {
        return Err(Error::Configuration(format!("{} needs at least one (p,q) pair", cfg.estimate)));
    }
    if p.enforce_admissibility {
        for &pair in &p.pairs {
            check_admissible(n, pair, wave)?;
        }
    }
    if p.family_size == 0 {
        return Err(Error::Configuration("family_size must be positive".into()));
    }
    let setup = Setup::new(cfg)?;
    let fs = wavepackets(cfg.seed, 21, n, p.family_size);
    let gs = wavepackets(cfg.seed, 22, n, p.family_size);
    let hs = wavepackets(cfg.seed, 23, n, p.family_size);
    let mut rows = Vec::new();
    for i in 0..p.family_size {
        let m = Member {
            f: setup.transform(&fs[i], p.zero_datum)?,
            g: if wave { Some(setup.transform(&gs[i], p.zero_datum)?) } else { None },
            h: if forced { Some(setup.transform(&hs[i], false)?) } else { None },
        };
        let rhs = data_norm(cfg, &m)?;
        let u0 = solve_and_sample(cfg, &m, 0)?;
        let u1 = solve_and_sample(cfg, &m, 1)?;
        for &(pe, q) in &p.pairs {
            let spec = MixedNormSpec::new(Exponent::INF, q, pe);
            let (l0, l1) = (mixed_norm(&u0, &spec)?, mixed_norm(&u1, &spec)?);
            let change = if l1 > 0.0 { (l1 - l0).abs() / l1 } else { 0.0 };
            let rt = ratio(l1, rhs);
            let tag = params!("datum" => i, "p" => pe, "q" => q);
            rows.push(ReportRow::with_pass(cfg.estimate.as_str(), tag.clone(), l1, rhs, cfg.tol, rt <= p.cap && change <= cfg.tol));
            rows.push(ReportRow::bound(&format!("{}_box", cfg.estimate), tag, change, cfg.tol, 0.0));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(estimate: Estimate) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(estimate, 1);
        cfg.params.enforce_admissibility = false;
        cfg.params.family_size = 1;
        cfg.resolution.max_degree = 16;
        cfg.resolution.x_count = 16;
        cfg.resolution.time_count = 8;
        cfg.resolution.s_count = 9;
        cfg
    }

    #[test]
    fn admissibility_errors_name_the_equation() {
        let e = check_admissible(2, (Exponent(4.0), Exponent(4.0)), false).unwrap_err().to_string();
        assert!(e.contains("2/q + n/p"), "{e}");
        let e = check_admissible(1, (Exponent(3.0), Exponent(6.0)), true).unwrap_err().to_string();
        assert!(e.contains("1/q + n/p"), "{e}");
        let e = check_admissible(1, (Exponent(2.0), Exponent(6.0)), true).unwrap_err().to_string();
        assert!(e.contains("2 < p"), "{e}");
        let cfg = ExperimentConfig::defaults(Estimate::AnisoSchrodinger, 2);
        assert!(matches!(verify_aniso(&cfg), Err(Error::Configuration(_))));
    }

    #[test]
    fn single_mode_wave_matches_closed_form() {
        let cfg = small(Estimate::AnisoWave);
        let grid = LambdaGrid::uniform(8, 0.25).unwrap();
        let j = (0..grid.len()).find(|&j| (grid.node(j) - 0.875).abs() < 1e-12).unwrap();
        let l = grid.node(j);
        let amp = C64::new(0.6, -0.8);
        let mut f = SpectralCoefficients::zeros(1, 4, grid);
        f.set(j, 0, amp);
        let g = SpectralCoefficients::zeros(1, 4, grid);
        let m = Member { f, g: Some(g), h: None };
        let u = solve_and_sample(&cfg, &m, 0).unwrap();
        let got = mixed_norm(&u, &MixedNormSpec::new(Exponent::INF, Exponent(4.0), Exponent(4.0))).unwrap();

        let w = l.sqrt();
        let a = amp.norm() * grid.weight(j) / (2.0 * PI);
        let phi = |x: f64| (l / PI).powf(0.25) * (-0.5 * l * x * x).exp();
        let xs: f64 = u.x_points.iter().zip(&u.x_weights).map(|(x, wx)| wx * phi(x[0]).powi(4)).sum();
        let ss: f64 = u.s_nodes.iter().zip(&u.s_weights).map(|(s, ws)| ws * (s * w).cos().abs().powi(4)).sum();
        let want = a * xs.powf(0.25) * ss.powf(0.25);
        assert!((got - want).abs() <= 1e-6 * want, "{got} vs {want}");
    }

    #[test]
    fn zero_data_give_zero_lhs() {
        let mut cfg = small(Estimate::AnisoWave);
        cfg.params.zero_datum = true;
        let rows = verify_aniso(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.lhs == 0.0 && r.pass));
    }

    #[test]
    fn forcing_norm_is_homogeneous() {
        for est in [Estimate::InhomogeneousSchrodinger, Estimate::InhomogeneousWave] {
            let mut cfg = small(est);
            let setup = Setup::new(&cfg).unwrap();
            let w = wavepackets(cfg.seed, 21, 1, 1).remove(0);
            let c = setup.transform(&w, false).unwrap();
            let m = Member { f: c.clone(), g: est.is_wave().then(|| c.clone()), h: Some(c.clone()) };
            let base = data_norm(&cfg, &Member { f: c.clone(), g: m.g.clone(), h: None }).unwrap();
            cfg.params.forcing_scale = 1.0;
            let one = data_norm(&cfg, &m).unwrap() - base;
            cfg.params.forcing_scale = 3.0;
            let three = data_norm(&cfg, &m).unwrap() - base;
            assert!(one > 0.0);
            assert!((three - 3.0 * one).abs() <= 1e-12 * three, "{three} vs {}", 3.0 * one);
        }
    }

    #[test]
    fn zero_forcing_reproduces_homogeneous_rows() {
        for (hom, inh) in [
            (Estimate::AnisoSchrodinger, Estimate::InhomogeneousSchrodinger),
            (Estimate::AnisoWave, Estimate::InhomogeneousWave),
        ] {
            let a = verify_aniso(&small(hom)).unwrap();
            let mut cfg = small(inh);
            cfg.params.forcing_scale = 0.0;
            let b = verify_aniso(&cfg).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.lhs - y.lhs).abs() <= 1e-12 * x.lhs.abs().max(1e-300), "{} vs {}", x.lhs, y.lhs);
                assert_eq!(x.rhs, y.rhs);
                assert_eq!(x.pass, y.pass);
            }
        }
    }
}
