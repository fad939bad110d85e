//! The twelve acceptance criteria. Each test prints one line
//! `criterion N: PASS|FAIL <measurement>`; run with `--nocapture` to see them.

use grushin::grid::{tensor_points, Axis};
use grushin::kernel::{heat_kernel_mehler, heat_kernel_mehler_rescaled, heat_kernel_series_with, kernel_propagate, KernelQuadratureConfig, SeriesOptions, SourceQuadrature};
use grushin::propagator::{duhamel_solve, schrodinger_evolve, schrodinger_solution, wave_energy};
use grushin::restriction::{extend, restrict, surface_l2_norm};
use grushin::transform::{forward_transform, Transform2Config};
use grushin::{Ball, Field, LambdaGrid, LocalizedMeasure, SpectralCoefficients, Surface, SurfaceDensity, TimeGrid, TimeSeries, TransformConfig, Wavepacket, C64};
use grushin_verify::data::{rng, wavepackets3};
use grushin_verify::report::rows_from_csv;
use grushin_verify::{run_experiment, Estimate, ExperimentConfig, Report, ReportRow};
use rand::Rng;
use std::f64::consts::PI;
use std::process::Command;

fn verdict(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn experiment(estimate: Estimate, n: usize, overrides: &[&str]) -> Report {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    run_experiment(&ExperimentConfig::load(None, Some(estimate), Some(n), &o).unwrap()).unwrap()
}

fn max_lhs<'a>(rows: impl Iterator<Item = &'a ReportRow>) -> f64 {
    rows.map(|r| r.lhs).fold(0.0, f64::max)
}

fn random_coefficients(seed: u64, n: usize, k: usize, grid: LambdaGrid) -> SpectralCoefficients {
    let mut r = rng(seed, 0);
    let mut c = SpectralCoefficients::zeros(n, k, grid);
    for v in c.values.iter_mut() {
        *v = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    }
    c
}

#[test]
fn criterion_01_plancherel_and_round_trip() {
    let cfg = TransformConfig::default_for(1);
    let x_axis = Axis::midpoint(-7.0, 7.0, 56);
    let t_axis = Axis::midpoint(-10.0, 10.0, 80);
    let (points, _) = tensor_points(1, &x_axis);
    let (mut plancherel, mut round_trip) = (0.0f64, 0.0f64);
    // t-modulations |τ| ≥ 2.5 with b ≥ 1.5 keep the spectrum away from λ = 0,
    // where Φ_α^λ spread like |λ|^{−1/2} and no finite K resolves the datum
    let mut r = rng(1, 0);
    let family: Vec<Wavepacket> = (0..10)
        .map(|_| Wavepacket {
            x0: vec![r.random_range(-1.0..1.0)],
            t0: r.random_range(-1.0..1.0),
            a: r.random_range(0.8..1.2),
            b: r.random_range(1.5..2.0),
            xi: vec![r.random_range(-1.0..1.0)],
            tau: r.random_range(2.5..3.5) * if r.random_bool(0.5) { 1.0 } else { -1.0 },
        })
        .collect();
    for w in family {
        let c = forward_transform(&w.field(), &cfg).unwrap();
        plancherel = plancherel.max((c.physical_l2_norm() - w.l2_norm()).abs() / w.l2_norm());
        let back = c.inverse().eval_grid(&points, &t_axis.nodes);
        let (mut err, mut norm) = (0.0, 0.0);
        for (it, &t) in t_axis.nodes.iter().enumerate() {
            for (ix, x) in points.iter().enumerate() {
                let f = w.eval(x, t);
                err += (back[it * points.len() + ix] - f).norm_sqr();
                norm += f.norm_sqr();
            }
        }
        round_trip = round_trip.max((err / norm).sqrt());
    }
    verdict(1, plancherel <= 1e-6 && round_trip <= 1e-5, format!("plancherel defect {plancherel:.3e} (≤ 1e-6), round-trip error {round_trip:.3e} (≤ 1e-5)"));
}

#[test]
fn criterion_02_non_dispersion() {
    let r = experiment(Estimate::Prop11, 1, &["params.s=[0.5, 1.0, 2.0]"]);
    let disc = max_lhs(r.rows.iter().filter(|row| row.experiment == "prop11_discrepancy"));
    let l2 = r.rows.iter().filter(|row| row.experiment == "prop11_l2").map(|row| (row.lhs / row.rhs - 1.0).abs()).fold(0.0, f64::max);
    verdict(2, disc <= 1e-6 && l2 <= 1e-10 && r.all_pass(), format!("max |u - f(t+ns)|/‖f‖∞ {disc:.3e} (≤ 1e-6), |‖u‖₂/‖f‖₂ - 1| {l2:.3e} (≤ 1e-10)"));
}

#[test]
fn criterion_03_heat_kernel_cross_validation() {
    let opts = SeriesOptions { richardson: true, ..Default::default() };
    let (mut series, mut rescaled) = (0.0f64, 0.0f64);
    let pts: Vec<f64> = (0..5).map(|i| -1.5 + 0.75 * i as f64).collect();
    for &s in &[0.5, 1.0, 2.0] {
        for &x in &pts {
            for &y in &pts {
                let a = heat_kernel_mehler(&[x], 0.3, &[y], 0.0, s).unwrap();
                let b = heat_kernel_series_with(&[x], 0.3, &[y], 0.0, s, 256, opts).unwrap();
                let c = heat_kernel_mehler_rescaled(&[x], 0.3, &[y], 0.0, s).unwrap();
                series = series.max((a - b).abs());
                rescaled = rescaled.max((a - c).abs());
            }
        }
    }
    verdict(3, series <= 1e-6 && rescaled <= 1e-10, format!("Mehler vs series {series:.3e} (≤ 1e-6), Mehler vs rescaled {rescaled:.3e} (≤ 1e-10) on 75 points"));
}

#[test]
fn criterion_04_kernel_vs_spectral_propagation() {
    let (r0, k, s) = (0.5, 0.5, 4.0);
    let ball = Ball::new(vec![0.0, 0.0], r0).unwrap();
    let f = Field::compact(1, ball, |x, t| C64::new((-(x[0] * x[0] + t * t) / 0.02).exp(), 0.0));
    // golden-angle points filling B(0, 0.95·ks/2)
    let targets: Vec<(Vec<f64>, f64)> = (0..20)
        .map(|i| {
            let a = i as f64 * 2.39996;
            let r = ((i as f64 + 0.5) / 20.0).sqrt() * 0.95 * k * s / 2.0;
            (vec![r * a.cos()], r * a.sin())
        })
        .collect();
    let uk = kernel_propagate(&f, s, &targets, &KernelQuadratureConfig::default(), &SourceQuadrature::default()).unwrap();
    let mut cfg = TransformConfig::default_for(1);
    cfg.max_degree = 256;
    cfg.box_order = 120;
    cfg.lambda = LambdaGrid::sqrt_covering(60.0, 0.005).unwrap();
    let c = forward_transform(&f, &cfg).unwrap();
    let us = schrodinger_solution(&c, s, &targets).unwrap();
    let scale = uk.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rel = uk.iter().zip(&us).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    verdict(4, rel <= 1e-3, format!("max relative difference {rel:.3e} (≤ 1e-3) at 20 targets"));
}

#[test]
fn criterion_05_dispersive_estimate() {
    let r = experiment(Estimate::Dispersive, 1, &[]);
    let worst = r.rows.iter().filter(|row| row.experiment != "dispersive_kernel").map(|row| row.ratio).fold(0.0, f64::max);
    let kernel = r.rows.iter().find(|row| row.experiment == "dispersive_kernel").unwrap();
    verdict(5, r.all_pass(), format!("max lhs/rhs {worst:.4} over (s,p), sup |H|·|s|^(3/2) / M = {:.4}", kernel.ratio));
}

fn scaling_rows(r: &Report) -> Vec<&ReportRow> {
    r.rows.iter().filter(|row| row.experiment == "scaling_law_slope").collect()
}

#[test]
fn criterion_06_scaling_law() {
    let r = experiment(Estimate::ScalingLaw, 2, &[]);
    let slopes = scaling_rows(&r);
    let ok = r.all_pass() && slopes.iter().all(|row| (row.lhs - row.rhs).abs() <= 0.1);
    let text: Vec<String> = slopes.iter().map(|row| format!("{}: slope {:.6} vs (n+2)/2-2/q-n/p = {}", row.params, row.lhs, row.rhs)).collect();
    let s44 = slopes.iter().find(|row| row.params == "p=4;q=4").unwrap().lhs;
    verdict(6, ok, format!("{}; (4,4) slope {s44:.3} vs the zero-slope clause 0 (see the ignored test)", text.join(", ")));
}

/// The zero-slope clause for (p,q) = (4,4), n = 2. The exponent relation
/// gives 2 − 2/4 − 2/4 = 1 for this pair, so this cannot hold.
#[test]
#[ignore = "(4,4) is not admissible for n = 2; the measured slope is 1, as the formula predicts"]
fn criterion_06_zero_slope_for_four_four() {
    let r = experiment(Estimate::ScalingLaw, 2, &["params.pairs=[[4.0, 4.0]]"]);
    let slope = scaling_rows(&r)[0].lhs;
    verdict(6, slope.abs() <= 0.1, format!("(4,4) slope {slope:.6} vs 0 ± 0.1"));
}

#[test]
fn criterion_07_unitarity_and_energy() {
    let grid = LambdaGrid::uniform(40, 0.05).unwrap();
    let (mut unit, mut energy) = (0.0f64, 0.0f64);
    for seed in 0..5 {
        let f = random_coefficients(seed, 1, 32, grid);
        let g = random_coefficients(seed + 100, 1, 32, grid);
        let n0 = f.l2_norm();
        let e0 = wave_energy(&f, &g, 0.0).unwrap();
        for i in 0..=40 {
            let s = 0.25 * i as f64;
            unit = unit.max((schrodinger_evolve(&f, s).l2_norm() - n0).abs() / n0);
            energy = energy.max((wave_energy(&f, &g, s).unwrap() - e0).abs() / e0);
        }
    }
    verdict(7, unit <= 1e-12 && energy <= 1e-10, format!("ℓ² drift {unit:.3e} (≤ 1e-12), wave energy drift {energy:.3e} (≤ 1e-10) over s ∈ [0, 10]"));
}

#[test]
fn criterion_08_restriction_duality() {
    let cfg = Transform2Config {
        n: 1,
        max_degree: 24,
        lambda: LambdaGrid::uniform(20, 0.05).unwrap(),
        nu: TimeGrid::new(1.0, 2).unwrap(),
        time: TimeGrid::new(10.0, 96).unwrap(),
        s_time: TimeGrid::new(10.0, 96).unwrap(),
        x_half_width: 7.0,
        x_order: 64,
    };
    let m = LocalizedMeasure::new(Surface::Schrodinger);
    // ⟨f, EΘ⟩ by an independent midpoint rule
    let h = 0.25;
    let axis = |a: f64| Axis::midpoint(-a, a, (2.0 * a / h) as usize);
    let (xa, ta, sa) = (axis(7.0), axis(9.0), axis(9.0));
    let (points, _) = tensor_points(1, &xa);
    let mut r = rng(8, 1);
    let mut worst = 0.0f64;
    for w in wavepackets3(8, 0, 1, 10) {
        let f = w.field();
        let rf = restrict(&f, &m, &cfg).unwrap();
        let mut th = SurfaceDensity::zeros(1, cfg.max_degree, cfg.lambda, m);
        for v in th.values[0].iter_mut() {
            *v = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        }
        let lhs = rf.inner(&th).unwrap();
        let e = extend(&th).eval_grid(&points, &ta.nodes, &sa.nodes);
        let mut rhs = C64::new(0.0, 0.0);
        for (it, &t) in ta.nodes.iter().enumerate() {
            for (is, &s) in sa.nodes.iter().enumerate() {
                for (ix, x) in points.iter().enumerate() {
                    rhs += f.eval(x, t, s) * e[(it * sa.nodes.len() + is) * points.len() + ix].conj();
                }
            }
        }
        rhs *= h * h * h * 4.0 * PI * PI;
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    // pushforward of a function of (α, λ) onto each sheet, unweighted measure
    let mut push = 0.0f64;
    for (i, surface) in [Surface::Schrodinger, Surface::WavePlus, Surface::WaveMinus].into_iter().enumerate() {
        let g = random_coefficients(20 + i as u64, 2, 6, LambdaGrid::uniform(12, 0.1).unwrap());
        let th = SurfaceDensity::from_coefficients(&g, LocalizedMeasure::unweighted(surface));
        let direct: f64 = (0..g.lambda_grid.len()).map(|j| g.lambda_grid.weight(j) * g.row(j).iter().map(|c| c.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt();
        push = push.max((surface_l2_norm(&th) - direct).abs() / direct);
    }
    verdict(8, worst <= 1e-5 && push <= 1e-10, format!("adjointness defect {worst:.3e} (≤ 1e-5) on 10 pairs, pushforward norm defect {push:.3e} (≤ 1e-10)"));
}

#[test]
fn criterion_09_restriction_inequality() {
    let r = experiment(Estimate::Restriction, 1, &["params.pairs=[[1.0, 1.0], [1.5, 1.5], [1.9, 1.9]]"]);
    let sups: Vec<&ReportRow> = r.rows.iter().filter(|row| row.experiment == "restriction_sup").collect();
    let ok = sups.len() == 3 && sups.iter().all(|row| row.pass && row.lhs.is_finite() && (row.lhs - row.rhs).abs() < 0.1 * row.lhs);
    let text: Vec<String> = sups.iter().map(|row| format!("{}: sup {:.4} (change {:.2e})", row.params, row.lhs, (row.lhs - row.rhs).abs() / row.lhs)).collect();
    verdict(9, ok, text.join(", "));
}

/// `∫₀^s e^{iκσ} cos(3σ) dσ`.
fn oscillatory_integral(kappa: f64, s: f64) -> C64 {
    let part = |k: f64| {
        if k == 0.0 {
            C64::new(s, 0.0)
        } else {
            (C64::from_polar(1.0, k * s) - 1.0) / C64::new(0.0, k)
        }
    };
    (part(kappa + 3.0) + part(kappa - 3.0)) * 0.5
}

#[test]
fn criterion_10_duhamel_order() {
    // forcing g(σ) = cos(3σ)·ĉ, exact solution e^{−isω}(f̂ − iĉ∫₀^s e^{iωσ}cos 3σ dσ)
    let grid = LambdaGrid::uniform(4, 0.25).unwrap();
    let f = random_coefficients(3, 1, 3, grid);
    let c = random_coefficients(4, 1, 3, grid);
    let deg = f.degrees();
    let end = 2.0;
    let mut errors = Vec::new();
    for steps in [20usize, 40, 80, 160] {
        let times: Vec<f64> = (0..=steps).map(|i| end * i as f64 / steps as f64).collect();
        let values = times.iter().map(|&s| c.map_multiplier(|_, _| C64::new((3.0 * s).cos(), 0.0))).collect();
        let u = duhamel_solve(&f, &TimeSeries { times: times.clone(), values }).unwrap();
        let mut err = 0.0f64;
        for (it, &s) in times.iter().enumerate() {
            for j in 0..grid.len() {
                for a in 0..f.modes() {
                    let w = (2 * deg[a] + 1) as f64 * grid.node(j).abs();
                    let exact = C64::from_polar(1.0, -s * w) * (f.get(j, a) - C64::i() * c.get(j, a) * oscillatory_integral(w, s));
                    err = err.max((u[it].get(j, a) - exact).norm());
                }
            }
        }
        errors.push(err);
    }
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let errs: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    let ords: Vec<String> = orders.iter().map(|o| format!("{o:.2}")).collect();
    verdict(10, worst >= 3.5, format!("errors [{}], observed orders [{}] (≥ 3.5)", errs.join(", "), ords.join(", ")));
}

#[test]
fn criterion_11_lemma41_tabulation() {
    let r = experiment(Estimate::Lemma41, 1, &[]);
    let sup = r.rows.iter().find(|row| row.experiment == "lemma41_sup").unwrap();
    let reference = rows_from_csv(include_str!("../../../reports/lemma41_n1.csv")).unwrap();
    let ref_sup = reference.iter().find(|row| row.experiment == "lemma41_sup").unwrap();
    let cells = r.rows.len() - 1;
    let ok = r.all_pass() && reference.len() == r.rows.len() && (sup.lhs - ref_sup.lhs).abs() <= 1e-9 * ref_sup.lhs;
    verdict(11, ok, format!("max ratio {:.6} over {cells} (k, λ) cells, k ≤ 64, λ ∈ 2^[-4,4]; reference report {:.6}", sup.lhs, ref_sup.lhs));
}

#[test]
fn criterion_12_determinism() {
    let dir = std::env::temp_dir().join(format!("grushin-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut same = true;
    let mut runs = Vec::new();
    for (estimate, format) in [("prop11", "csv"), ("scaling_law", "json"), ("lemma41", "csv")] {
        let outs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let out = dir.join(format!("{estimate}-{i}.{format}"));
                let status = Command::new(env!("CARGO_BIN_EXE_grushin"))
                    .args(["verify", "--estimate", estimate, "--n", "1", "--seed", "11", "--format", format, "--out"])
                    .arg(&out)
                    .status()
                    .unwrap();
                assert_eq!(status.code(), Some(0), "{estimate}");
                std::fs::read(&out).unwrap()
            })
            .collect();
        same &= outs[0] == outs[1] && !outs[0].is_empty();
        runs.push(format!("{estimate}/{format} {} bytes", outs[0].len()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(12, same, format!("byte-identical repeated runs: {}", runs.join(", ")));
}
