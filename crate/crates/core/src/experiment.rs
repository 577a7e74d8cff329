//! End-to-end pipelines: simulate a scenario, analyse a measured table, or
//! sweep the `W` angle.
//!
//! Simulated and measured tables go through the same [`analyze_table`]. The
//! state supplies the quantities that cannot be read off the table: `ΔX`,
//! `ΔY`, the bound `c/2` and the optimal estimators.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataio::DistributionFile;
use crate::error::{Error, Result};
use crate::estimate::{
    estimator_spread, estimator_spread_y, inaccuracy_x, inaccuracy_y_with, optimal_estimator, optimal_y_estimator,
    DispersionCheck, Estimator, EstimatorKind, Inaccuracy,
};
use crate::qcore::{commutator_bound, pauli, spread, tensor, BlochObservable, DensityMatrix, Pauli};
use crate::relations::{
    evaluate_md_relation, evaluate_relations, strength_comparison, MdReport, RelationInputs, RelationReport,
    ScenarioDescriptor, StrengthOrdering,
};
use crate::scenario::{epr_state, epr_vector, joint_distribution, slide_model, JointDistribution, Provenance, SemiweakSlide};
use crate::tolerance::Tolerances;

/// Which `X` estimators to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    Simple,
    Optimal,
    Both,
}

impl EstimatorChoice {
    pub fn kinds(self) -> &'static [EstimatorKind] {
        match self {
            EstimatorChoice::Simple => &[EstimatorKind::Simple],
            EstimatorChoice::Optimal => &[EstimatorKind::Optimal],
            EstimatorChoice::Both => &[EstimatorKind::Simple, EstimatorKind::Optimal],
        }
    }
}

/// Where the two-qubit state comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    /// `cos γ |HV⟩ - sin γ |VH⟩`.
    Epr { gamma_deg: f64 },
    /// A state read from a file. `reference_gamma_deg` is the source angle
    /// the state is compared with, if known.
    Tomographic {
        name: String,
        state: DensityMatrix,
        reference_gamma_deg: Option<f64>,
    },
}

impl StateSource {
    pub fn state(&self) -> DensityMatrix {
        match self {
            StateSource::Epr { gamma_deg } => epr_state(gamma_deg.to_radians()),
            StateSource::Tomographic { state, .. } => state.clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateSource::Epr { .. } => "epr".to_string(),
            StateSource::Tomographic { name, .. } => name.clone(),
        }
    }

    pub fn gamma_deg(&self) -> Option<f64> {
        match self {
            StateSource::Epr { gamma_deg } => Some(*gamma_deg),
            StateSource::Tomographic { reference_gamma_deg, .. } => *reference_gamma_deg,
        }
    }
}

/// Everything needed to simulate one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub source: StateSource,
    pub r_h: f64,
    pub r_v: f64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub x_estimator: EstimatorChoice,
    /// `Simple` reports the `Y` outcome itself; `Optimal` uses the
    /// conditional mean of `Y` given the outcome.
    pub y_estimator: EstimatorKind,
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    /// The ideal source and the probe used throughout the docs.
    pub fn reference() -> Self {
        ScenarioConfig {
            source: StateSource::Epr { gamma_deg: 22.5 },
            r_h: 0.1244,
            r_v: 0.4645,
            theta_deg: 90.0,
            phi_deg: 180.0,
            x_estimator: EstimatorChoice::Both,
            y_estimator: EstimatorKind::Simple,
            tolerances: Tolerances::STANDARD,
        }
    }

    pub fn with_phi(&self, phi_deg: f64) -> Self {
        ScenarioConfig {
            phi_deg,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlideSummary {
    pub r_h: f64,
    pub r_v: f64,
    pub kappa: f64,
    pub xi_reflected: f64,
    pub xi_transmitted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateSummary {
    /// `c/2 = |⟨[X, Y]⟩|/2`.
    pub bound: f64,
    pub spread_x: f64,
    pub spread_y: f64,
    pub min_eigenvalue: f64,
    /// Overlap with the ideal source state, when a reference angle is known.
    pub fidelity: Option<f64>,
}

/// Results for one `X` estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub x_estimator: Estimator,
    pub y_estimator: Estimator,
    pub eps_x: Inaccuracy,
    pub eps_y: Inaccuracy,
    pub spread_x_est: f64,
    pub spread_y_est: f64,
    pub dispersion: DispersionCheck,
    pub relations: RelationReport,
    /// Present for the optimal `X` estimator.
    pub strength: Option<StrengthOrdering>,
    /// Present for simulated tables.
    pub measurement_disturbance: Option<MdReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub source: String,
    pub gamma_deg: Option<f64>,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub provenance: Provenance,
    /// Sum of the table as given, before normalisation.
    pub distribution_sum: f64,
    pub slide: SlideSummary,
    pub state: StateSummary,
    pub estimates: Vec<EstimateSummary>,
}

impl Analysis {
    pub fn estimate(&self, kind: EstimatorKind) -> Option<&EstimateSummary> {
        self.estimates.iter().find(|e| e.x_estimator.kind == kind)
    }
}

/// Common analysis of a table `p(m, y, w)` given the state it came from.
pub fn analyze_table(
    dist: &JointDistribution,
    slide: &SemiweakSlide,
    source: &StateSource,
    x_estimator: EstimatorChoice,
    y_kind: EstimatorKind,
    tol: &Tolerances,
) -> Result<Analysis> {
    let rho = source.state();
    let w = dist.w_observable();
    let (theta_deg, phi_deg) = (w.theta.to_degrees(), w.phi.to_degrees());
    let distribution_sum = dist.total();
    let table = dist.normalized();
    let provenance = dist.provenance();

    let id = pauli(Pauli::I);
    let x = tensor(&pauli(Pauli::X), &id)?;
    let y = tensor(&pauli(Pauli::Y), &id)?;
    let c = commutator_bound(&x, &y, &rho)?;
    let spread_x = spread(&x, &rho)?;
    let spread_y = spread(&y, &rho)?;
    let (xi_reflected, xi_transmitted) = slide.contextual_values()?;
    let fidelity = source
        .gamma_deg()
        .map(|g| rho.fidelity_with_pure(&epr_vector(g.to_radians())))
        .transpose()?;

    let y_est = match y_kind {
        EstimatorKind::Optimal => optimal_y_estimator(&rho, slide)?,
        _ => Estimator::simple(),
    };
    let eps_y = inaccuracy_y_with(&table, slide, &y_est, tol)?;
    let spread_y_est = estimator_spread_y(&table, &y_est)?;

    let mut estimates = Vec::new();
    for &kind in x_estimator.kinds() {
        let x_est = match kind {
            EstimatorKind::Optimal => optimal_estimator(&rho, w)?,
            _ => Estimator::simple(),
        };
        let eps_x = inaccuracy_x(&table, slide, &x_est, tol)?;
        let spread_x_est = estimator_spread(&table, &x_est)?;
        let mut dispersion = DispersionCheck::from_terms(
            eps_x.raw_squared,
            spread_x_est * spread_x_est,
            spread_x * spread_x,
            kind,
            tol.oracle_agreement,
        );
        if provenance == Provenance::Measured {
            // Counting noise breaks the exact identity; report terms only.
            dispersion.holds = None;
        }
        let descriptor = ScenarioDescriptor {
            source: source.label(),
            gamma_deg: source.gamma_deg(),
            r_h: slide.r_h(),
            r_v: slide.r_v(),
            theta_deg,
            phi_deg,
            x_estimator: kind,
            y_estimator: y_est.kind,
            provenance,
        };
        let relations = evaluate_relations(RelationInputs {
            eps_a: eps_x.value,
            eps_b: eps_y.value,
            spread_a: spread_x,
            spread_b: spread_y,
            spread_a_est: spread_x_est,
            spread_b_est: spread_y_est,
            c,
        })?
        .with_scenario(descriptor);
        let strength = match kind {
            EstimatorKind::Optimal => Some(strength_comparison(&relations, kind, y_est.kind)?),
            _ => None,
        };
        let measurement_disturbance = match provenance {
            Provenance::Simulated => Some(evaluate_md_relation(&rho, slide, w, &x_est)?),
            Provenance::Measured => None,
        };
        estimates.push(EstimateSummary {
            x_estimator: x_est,
            y_estimator: y_est,
            eps_x,
            eps_y,
            spread_x_est,
            spread_y_est,
            dispersion,
            relations,
            strength,
            measurement_disturbance,
        });
    }

    Ok(Analysis {
        source: source.label(),
        gamma_deg: source.gamma_deg(),
        theta_deg,
        phi_deg,
        provenance,
        distribution_sum,
        slide: SlideSummary {
            r_h: slide.r_h(),
            r_v: slide.r_v(),
            kappa: slide.kappa(),
            xi_reflected,
            xi_transmitted,
        },
        state: StateSummary {
            bound: c / 2.0,
            spread_x,
            spread_y,
            min_eigenvalue: rho.min_eigenvalue(),
            fidelity,
        },
        estimates,
    })
}

/// Predicts the table for a scenario and analyses it.
pub fn simulate(config: &ScenarioConfig) -> Result<Analysis> {
    let slide = slide_model(config.r_h, config.r_v)?;
    let w = BlochObservable::from_degrees(config.theta_deg, config.phi_deg);
    let dist = joint_distribution(&config.source.state(), &slide, w)?;
    analyze_table(&dist, &slide, &config.source, config.x_estimator, config.y_estimator, &config.tolerances)
}

/// Analyses a measured table. Probe reflectivities come from the file's
/// metadata unless `slide` overrides them.
pub fn analyze(
    file: &DistributionFile,
    slide: Option<(f64, f64)>,
    source: &StateSource,
    x_estimator: EstimatorChoice,
    y_kind: EstimatorKind,
    tol: &Tolerances,
) -> Result<Analysis> {
    let (r_h, r_v) = match slide {
        Some(pair) => pair,
        None => (
            file.metadata.r_h.ok_or(Error::MissingMetadata("r_h"))?,
            file.metadata.r_v.ok_or(Error::MissingMetadata("r_v"))?,
        ),
    };
    let slide = slide_model(r_h, r_v)?;
    analyze_table(&file.distribution, &slide, source, x_estimator, y_kind, tol)
}

/// Simulates the scenario at each `φ`, in parallel; results keep the input
/// order.
pub fn sweep(config: &ScenarioConfig, phis_deg: &[f64]) -> Result<Vec<Analysis>> {
    phis_deg
        .par_iter()
        .map(|&phi| simulate(&config.with_phi(phi)))
        .collect()
}
