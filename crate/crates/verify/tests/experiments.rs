use grushin::Error;
use grushin_verify::{run_experiment, Estimate, ExperimentConfig, Format, Report};

fn cfg(estimate: Estimate, n: usize, overrides: &[&str]) -> ExperimentConfig {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ExperimentConfig::load(None, Some(estimate), Some(n), &o).unwrap()
}

fn rows<'a>(r: &'a Report, name: &'a str) -> impl Iterator<Item = &'a grushin_verify::ReportRow> + 'a {
    r.rows.iter().filter(move |row| row.experiment == name)
}

#[test]
fn dispersive_defaults_pass_and_decay_is_bounded() {
    let r = run_experiment(&cfg(Estimate::Dispersive, 1, &[])).unwrap();
    assert!(r.all_pass(), "{}", r.to_csv().unwrap());
    assert_eq!(rows(&r, "dispersive").count(), 9);
    assert_eq!(rows(&r, "dispersive_decay").count(), 3);
    assert_eq!(rows(&r, "dispersive_kernel").count(), 1);
}

#[test]
fn dispersive_refuses_times_inside_the_strip_threshold() {
    let e = run_experiment(&cfg(Estimate::Dispersive, 1, &["params.s=[1.0]"])).unwrap_err();
    assert!(matches!(e, Error::Configuration(_)), "{e}");
}

#[test]
fn local_strichartz_truncation_changes_less_than_two_percent() {
    let r = run_experiment(&cfg(Estimate::LocalStrichartz, 1, &[])).unwrap();
    assert!(r.all_pass(), "{}", r.to_csv().unwrap());
    for row in rows(&r, "local_strichartz_truncation") {
        assert!(row.lhs < 0.02, "{row:?}");
    }
}

#[test]
fn zero_datum_gives_zero_local_norms() {
    let r = run_experiment(&cfg(Estimate::Dispersive, 1, &["params.zero_datum=true"])).unwrap();
    assert!(rows(&r, "dispersive").all(|row| row.lhs == 0.0 && row.pass));
}

#[test]
fn prop11_translation_is_exact() {
    let r = run_experiment(&cfg(Estimate::Prop11, 1, &[])).unwrap();
    assert!(r.all_pass(), "{}", r.to_csv().unwrap());
    for row in rows(&r, "prop11_discrepancy") {
        assert!(row.lhs <= 1e-6, "{row:?}");
    }
    let at_zero = rows(&r, "prop11_discrepancy").find(|row| row.params == "s=0").unwrap();
    assert_eq!(at_zero.lhs, 0.0);
}

#[test]
fn prop11_refuses_q_touching_one() {
    let e = run_experiment(&cfg(Estimate::Prop11, 1, &["params.q_half_width=6.5"])).unwrap_err();
    assert!(e.to_string().contains("λ ≤ 1"), "{e}");
}

#[test]
fn scaling_law_slopes_follow_the_exponent_relation() {
    for n in [1, 2] {
        let r = run_experiment(&cfg(Estimate::ScalingLaw, n, &[])).unwrap();
        assert!(r.all_pass(), "{}", r.to_csv().unwrap());
        for row in rows(&r, "scaling_law_slope") {
            assert!((row.lhs - row.rhs).abs() < 1e-6, "{row:?}");
        }
    }
}

#[test]
fn scaling_law_needs_three_radii() {
    let e = run_experiment(&cfg(Estimate::ScalingLaw, 1, &["params.R=[1.0]"])).unwrap_err();
    assert!(matches!(e, Error::Configuration(_)), "{e}");
}

#[test]
fn lemma41_ratio_is_bounded() {
    let r = run_experiment(&cfg(Estimate::Lemma41, 1, &["params.lambda_exponents=[-2, 2]", "resolution.K=24"])).unwrap();
    assert!(r.all_pass(), "{}", r.to_csv().unwrap());
}

#[test]
fn restriction_rejects_exponents_at_two() {
    let e = run_experiment(&cfg(Estimate::Restriction, 1, &["params.pairs=[[2.0, 1.0]]"])).unwrap_err();
    assert!(matches!(e, Error::Configuration(_)), "{e}");
}

#[test]
fn restriction_small_family_is_stable() {
    let r = run_experiment(&cfg(Estimate::Restriction, 1, &["params.family_size=3"])).unwrap();
    assert!(r.all_pass(), "{}", r.to_csv().unwrap());
    assert_eq!(rows(&r, "restriction_sup").count(), 4);
    assert_eq!(rows(&r, "restriction_dual").count(), 2);
}

#[test]
fn aniso_defaults_are_refused_as_inadmissible() {
    for est in [Estimate::AnisoSchrodinger, Estimate::AnisoWave, Estimate::InhomogeneousSchrodinger, Estimate::InhomogeneousWave] {
        let e = run_experiment(&cfg(est, 2, &[])).unwrap_err();
        assert!(e.to_string().contains("n/p"), "{e}");
    }
}

#[test]
fn aniso_family_ratio_is_finite() {
    let r = run_experiment(&cfg(
        Estimate::AnisoSchrodinger,
        2,
        &["params.enforce_admissibility=false", "params.family_size=2", "resolution.x_count=8", "resolution.K=8"],
    ))
    .unwrap();
    assert!(rows(&r, "aniso_schrodinger").all(|row| row.ratio.is_finite() && row.ratio > 0.0));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let c = cfg(Estimate::ScalingLaw, 1, &["seed=7"]);
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.render(Format::Csv).unwrap(), b.render(Format::Csv).unwrap());
    let json = a.render(Format::Json).unwrap();
    assert_eq!(json, b.render(Format::Json).unwrap());
    assert_eq!(Report::from_json(&json).unwrap(), a);
    assert_eq!(a.meta.seed, 7);
    assert_eq!(a.meta.config["seed"], 7);
}
