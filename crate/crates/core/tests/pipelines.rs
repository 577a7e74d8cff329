use complementarity::dataio::{emit_analysis_csv, emit_json, parse_density_matrix, parse_distribution};
use complementarity::experiment::{self, EstimatorChoice, ScenarioConfig, StateSource};
use complementarity::scenario::{joint_distribution, slide_model};
use complementarity::{EstimatorKind, Outcome, SlideOutcome, Tolerances};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn fixture_source() -> StateSource {
    let file = parse_density_matrix(&fixture("tomographic_state.csv"), &Tolerances::STANDARD).unwrap();
    StateSource::Tomographic {
        name: "tomographic_state.csv".into(),
        state: file.state,
        reference_gamma_deg: Some(22.5),
    }
}

#[test]
fn fitted_state_predicts_the_measured_tables() {
    let source = fixture_source();
    let slide = slide_model(0.1244, 0.4645).unwrap();
    for phi in ["157p5", "180", "202p5", "225"] {
        let file = parse_distribution(&fixture(&format!("measured_phi{phi}.csv")), &Tolerances::STANDARD).unwrap();
        let measured = file.distribution.normalized();
        let predicted = joint_distribution(&source.state(), &slide, measured.w_observable()).unwrap();
        let mut worst: f64 = 0.0;
        for m in SlideOutcome::ALL {
            for y in Outcome::ALL {
                for w in Outcome::ALL {
                    worst = worst.max((measured.get(m, y, w) - predicted.get(m, y, w)).abs());
                }
            }
        }
        assert!(worst < 0.035, "phi {phi}: {worst}");
    }
}

#[test]
fn measured_tables_keep_the_relation_pattern() {
    let source = fixture_source();
    for phi in ["157p5", "180", "202p5", "225"] {
        let file = parse_distribution(&fixture(&format!("measured_phi{phi}.csv")), &Tolerances::STANDARD).unwrap();
        let a = experiment::analyze(
            &file,
            None,
            &source,
            EstimatorChoice::Both,
            EstimatorKind::Simple,
            &Tolerances::STANDARD,
        )
        .unwrap();
        for e in &a.estimates {
            let r = &e.relations;
            assert!(r.satisfied.hall && r.satisfied.ozawa && r.satisfied.new, "phi {phi}");
            assert!(r.lhs_new <= r.lhs_hall && r.lhs_new <= r.lhs_ozawa);
        }
        let simple = a.estimate(EstimatorKind::Simple).unwrap();
        let opt = a.estimate(EstimatorKind::Optimal).unwrap();
        assert!(opt.eps_x.value <= simple.eps_x.value + 1e-9, "phi {phi}");
        // The dispersion identity holds up to the noise of the table.
        assert!((opt.dispersion.root_lhs() - a.state.spread_x).abs() < 0.03, "phi {phi}");
    }
}

#[test]
fn analysis_ignores_the_outcome_labelling_of_the_file() {
    let text = fixture("measured_phi180.csv");
    // Swapping the meaning of m and the m labels together describes the same data.
    let swapped: String = text
        .lines()
        .map(|l| {
            if l == "# m_plus=transmitted" {
                "# m_plus=reflected".to_string()
            } else if let Some(rest) = l.strip_prefix("-1,") {
                format!("1,{rest}")
            } else if let Some(rest) = l.strip_prefix("1,") {
                format!("-1,{rest}")
            } else {
                l.to_string()
            }
        })
        .map(|l| l + "\n")
        .collect();
    let a = parse_distribution(&text, &Tolerances::STANDARD).unwrap();
    let b = parse_distribution(&swapped, &Tolerances::STANDARD).unwrap();
    assert_eq!(a.distribution, b.distribution);
}

#[test]
fn reports_are_deterministic() {
    let cfg = ScenarioConfig::reference();
    let first = emit_json(&experiment::simulate(&cfg).unwrap());
    let second = emit_json(&experiment::simulate(&cfg).unwrap());
    assert_eq!(first, second);
    assert!(first.contains("\"lhs_ak\"") && first.contains("\"satisfied\""));
    let phis = [135.0, 157.5, 180.0, 202.5, 225.0];
    let csv = emit_analysis_csv(&experiment::sweep(&cfg, &phis).unwrap());
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("phi_deg,theta_deg,bound,"));
    assert_eq!(csv, emit_analysis_csv(&experiment::sweep(&cfg, &phis).unwrap()));
}

#[test]
fn sweep_matches_the_ideal_curves() {
    let cfg = ScenarioConfig::reference();
    let rows = experiment::sweep(&cfg, &[135.0, 180.0, 225.0]).unwrap();
    for a in &rows {
        let opt = a.estimate(EstimatorKind::Optimal).unwrap();
        let simple = a.estimate(EstimatorKind::Simple).unwrap();
        // Optimal estimate: ε² + Δ_est² = ΔX² = 1 for the ideal source.
        assert!((opt.dispersion.root_lhs() - 1.0).abs() < 1e-9);
        // Simple estimate against W(90°, φ): ε² = 2 - 2 sin(2γ)|cos φ| with γ = 22.5°.
        let expected = (2.0 - 2.0 * std::f64::consts::FRAC_1_SQRT_2 * a.phi_deg.to_radians().cos().abs()).sqrt();
        assert!((simple.eps_x.value - expected).abs() < 1e-9, "{} {}", simple.eps_x.value, expected);
    }
}
