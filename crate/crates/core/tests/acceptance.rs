//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::process::ExitCode;

use complementarity::dataio::{parse_density_matrix, parse_distribution, DistributionFile};
use complementarity::estimate::{inaccuracy_y_with, optimal_estimator, Estimator, EstimatorKind};
use complementarity::experiment::{self, Analysis, EstimatorChoice, ScenarioConfig, StateSource};
use complementarity::oracle::{direct_inaccuracy, DilatedSystem};
use complementarity::qcore::{pauli, BlochObservable, Pauli};
use complementarity::relations::Relation;
use complementarity::scenario::{effective_povm, epr_state, joint_distribution, slide_model};
use complementarity::verify::{run_verification, VerifyConfig, VerifySummary};
use complementarity::{Error, Tolerances};

const REF_R_H: f64 = 0.1244;
const REF_R_V: f64 = 0.4645;
const SWEEP: [f64; 5] = [135.0, 157.5, 180.0, 202.5, 225.0];

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn fixture_source() -> StateSource {
    let file = parse_density_matrix(&fixture("tomographic_state.csv"), &Tolerances::STANDARD).unwrap();
    StateSource::Tomographic {
        name: "tomographic_state.csv".into(),
        state: file.state,
        reference_gamma_deg: Some(22.5),
    }
}

fn table(phi: &str) -> complementarity::Result<DistributionFile> {
    parse_distribution(&fixture(&format!("measured_phi{phi}.csv")), &Tolerances::STANDARD)
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kappa_reproduction() -> Outcome {
    let k = slide_model(REF_R_H, REF_R_V).map_err(|e| e.to_string())?.kappa();
    check((k - 0.0749).abs() <= 5e-4, format!("kappa = {k:.6} (target 0.0749 ± 5e-4)"))
}

fn y_inaccuracy_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let rho = epr_state(0.3);
    let w = BlochObservable::from_degrees(70.0, 40.0);
    let mut points = 0;
    for i in 0..10 {
        for j in 0..5 {
            let r_h = 0.02 + 0.096 * i as f64;
            let r_v = 0.05 + 0.19 * j as f64 + 0.013;
            let slide = slide_model(r_h, r_v).map_err(|e| e.to_string())?;
            let two_kappa = 2.0 * slide.kappa();
            let dist = joint_distribution(&rho, &slide, w).map_err(|e| e.to_string())?;
            let rebuilt = inaccuracy_y_with(&dist, &slide, &Estimator::simple(), &Tolerances::STANDARD)
                .map_err(|e| e.to_string())?
                .raw_squared;
            let mut sys = DilatedSystem::with_ancilla(&rho).map_err(|e| e.to_string())?;
            let (up, _) = effective_povm(&slide);
            sys.register("Y", sys.embed(&pauli(Pauli::Y), &[0]).unwrap()).unwrap();
            sys.register("Y_est", sys.naimark_observable(&up, 0, (1.0, -1.0)).unwrap()).unwrap();
            let direct = direct_inaccuracy(&sys, "Y", "Y_est").map_err(|e| e.to_string())?.powi(2);
            worst = worst.max((rebuilt - two_kappa).abs()).max((direct - two_kappa).abs());
            points += 1;
        }
    }
    let reference = 2.0 * slide_model(REF_R_H, REF_R_V).unwrap().kappa();
    check(
        worst < 1e-12 && (reference - 0.15).abs() <= 0.02,
        format!("{points} grid points, max |eps_Y^2 - 2 kappa| = {worst:.2e}; at the reference probe 2 kappa = {reference:.4}"),
    )
}

fn suite_line(summary: &VerifySummary, name: &str) -> Result<(bool, String), String> {
    let s = summary.suite(name).ok_or_else(|| format!("missing suite {name}"))?;
    Ok((
        s.passed(),
        format!("{name}: {} trials, {} failures, worst {:.3e}", s.trials, s.failures, s.worst),
    ))
}

fn oracle_equivalence(summary: &VerifySummary) -> Outcome {
    let (ok, line) = suite_line(summary, "oracle_equivalence")?;
    let worst = summary.suite("oracle_equivalence").unwrap().worst;
    check(ok && worst < 1e-9 && summary.trials >= 10_000, line)
}

fn dispersion_identity(summary: &VerifySummary) -> Outcome {
    let (ok, line) = suite_line(summary, "dispersion")?;
    let worst = summary.suite("dispersion").unwrap().worst;
    check(ok && worst < 1e-9 && summary.trials >= 1_000, line)
}

fn universality(summary: &VerifySummary) -> Outcome {
    let (ok_u, line_u) = suite_line(summary, "universality")?;
    let (ok_c, line_c) = suite_line(summary, "chain")?;
    check(ok_u && ok_c && summary.trials >= 10_000, format!("{line_u}; {line_c}"))
}

fn lhs_all(a: &Analysis, kind: EstimatorKind) -> [f64; 4] {
    let r = &a.estimate(kind).unwrap().relations;
    Relation::ALL.map(|rel| r.lhs(rel))
}

fn ak_violation() -> Outcome {
    let ideal = experiment::simulate(&ScenarioConfig::reference()).map_err(|e| e.to_string())?;
    let r = &ideal.estimate(EstimatorKind::Optimal).unwrap().relations;
    let ideal_ok = (r.lhs_ak - 0.2737).abs() < 5e-4
        && (r.bound - FRAC_1_SQRT_2).abs() < 1e-9
        && !r.satisfied.ak
        && r.satisfied.hall
        && r.satisfied.ozawa
        && r.satisfied.new;

    let tol = Tolerances::STANDARD;
    let source = fixture_source();
    let file = table("180").map_err(|e| e.to_string())?;
    let measured = experiment::analyze(&file, None, &source, EstimatorChoice::Optimal, EstimatorKind::Simple, &tol)
        .map_err(|e| e.to_string())?;
    let m = &measured.estimate(EstimatorKind::Optimal).unwrap().relations;
    let summaries_ok = (measured.state.bound - 0.711).abs() < 1e-3
        && (measured.state.spread_x - 0.998).abs() < 1e-3
        && (measured.state.spread_y - 0.9998).abs() < 1e-3;
    let flags_ok = !m.satisfied.ak && m.satisfied.hall && m.satisfied.ozawa && m.satisfied.new;
    let order_ok = m.lhs_ozawa >= m.lhs_hall && m.lhs_hall >= m.lhs_new && m.lhs_new > m.lhs_ak;

    let mut cfg = ScenarioConfig::reference();
    cfg.source = source;
    cfg.x_estimator = EstimatorChoice::Optimal;
    let theory = experiment::simulate(&cfg).map_err(|e| e.to_string())?;
    let dev = lhs_all(&measured, EstimatorKind::Optimal)
        .iter()
        .zip(lhs_all(&theory, EstimatorKind::Optimal))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        ideal_ok && summaries_ok && flags_ok && order_ok && dev <= 0.05,
        format!(
            "ideal AK {:.4} < {:.5}; measured: AK {:.4} < c/2 {:.4}, new {:.4} <= hall {:.4} <= ozawa {:.4}; max |measured - theory| = {dev:.4}",
            r.lhs_ak, r.bound, m.lhs_ak, m.bound, m.lhs_new, m.lhs_hall, m.lhs_ozawa
        ),
    )
}

fn strength_ordering(summary: &VerifySummary) -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut ordered = true;
    let mut rows = 0;
    for source in [StateSource::Epr { gamma_deg: 22.5 }, fixture_source()] {
        for y_kind in [EstimatorKind::Simple, EstimatorKind::Optimal] {
            let mut cfg = ScenarioConfig::reference();
            cfg.source = source.clone();
            cfg.x_estimator = EstimatorChoice::Optimal;
            cfg.y_estimator = y_kind;
            for a in experiment::sweep(&cfg, &SWEEP).map_err(|e| e.to_string())? {
                let s = a.estimates[0].strength.unwrap();
                ordered &= s.new_le_hall && s.new_le_ozawa;
                if let Some(g) = s.gap {
                    worst_gap = worst_gap.max(g.residual.abs());
                    ordered &= g.holds;
                }
                rows += 1;
            }
        }
    }
    let (ok, line) = suite_line(summary, "strength")?;
    check(
        ordered && worst_gap < 1e-9 && ok,
        format!("{rows} sweep points ordered, max gap residual {worst_gap:.2e}; {line}"),
    )
}

fn optimal_estimator_values() -> Outcome {
    let w = BlochObservable::from_degrees(90.0, 180.0);
    let ideal = optimal_estimator(&epr_state(FRAC_PI_8), w).map_err(|e| e.to_string())?;
    let s45 = FRAC_PI_4.sin();
    let ideal_ok = (ideal.plus - s45).abs() < 1e-12 && (ideal.minus + s45).abs() < 1e-12;
    let fitted = optimal_estimator(&fixture_source().state(), w).map_err(|e| e.to_string())?;
    let fitted_ok = (fitted.plus - 0.630).abs() <= 0.02 && (fitted.minus + 0.643).abs() <= 0.02;
    check(
        ideal_ok && fitted_ok,
        format!(
            "fixture f(+1) = {:.4}, f(-1) = {:.4}; ideal f(±1) = {:+.15}, {:+.15}",
            fitted.plus, fitted.minus, ideal.plus, ideal.minus
        ),
    )
}

fn data_validation() -> Outcome {
    let mut sums = Vec::new();
    let mut ok = true;
    for phi in ["157p5", "180", "202p5", "225"] {
        match table(phi) {
            Ok(f) => {
                let s = f.distribution.total();
                ok &= (s - 1.0).abs() <= 0.01;
                sums.push(format!("{phi}: {s:.4}"));
            }
            Err(e) => {
                ok = false;
                sums.push(format!("{phi}: {e}"));
            }
        }
    }
    let rejected = match table("135") {
        Err(Error::Normalization { sum, .. }) => (sum - 1.438).abs() < 5e-4,
        _ => false,
    };
    check(ok && rejected, format!("accepted [{}]; 135 rejected: {rejected}", sums.join(", ")))
}

fn main() -> ExitCode {
    let summary = run_verification(&VerifyConfig {
        trials: 10_000,
        seed: 42,
    });
    let criteria: Vec<(&str, Outcome)> = vec![
        ("AC1 kappa reproduction", kappa_reproduction()),
        ("AC2 Y inaccuracy identity", y_inaccuracy_identity()),
        ("AC3 reconstruction vs oracle", oracle_equivalence(&summary)),
        ("AC4 dispersion identity", dispersion_identity(&summary)),
        ("AC5 universality and proof chain", universality(&summary)),
        ("AC6 Arthurs-Kelly violation", ak_violation()),
        ("AC7 strength ordering", strength_ordering(&summary)),
        ("AC8 optimal estimator values", optimal_estimator_values()),
        ("AC9 data validation", data_validation()),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
