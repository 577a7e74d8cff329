//! Complementarity relations for joint estimates of two observables.
//!
//! All four relations share the bound `c/2` with `c = |⟨[A, B]⟩|` and differ
//! in their left hand sides:
//!
//! ```text
//! Arthurs–Kelly  εA εB
//! Hall           εA εB + εA ΔB_est + ΔA_est εB
//! Ozawa          εA εB + εA ΔB     + ΔA     εB
//! mixed spread   εA (ΔB_est + ΔB)/2 + εB (ΔA_est + ΔA)/2
//! ```
//!
//! The first only holds for globally unbiased estimates; the other three are
//! universal. Evaluation takes scalar summaries so simulated and measured
//! data go through the same code.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{estimator_spread, inaccuracy_x, EstimatorKind, Estimator};
use crate::qcore::{
    commutator_bound, expectation, pauli, spread, tensor, trace_with, BlochObservable, ComplexMatrix,
    DensityMatrix, HermitianOperator, Pauli,
};
use crate::scenario::{disturbed_observable, joint_distribution, Provenance, SemiweakSlide};
use crate::tolerance::Tolerances;

/// Scalar summaries feeding the relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationInputs {
    pub eps_a: f64,
    pub eps_b: f64,
    pub spread_a: f64,
    pub spread_b: f64,
    pub spread_a_est: f64,
    pub spread_b_est: f64,
    /// `|⟨[A, B]⟩|`.
    pub c: f64,
}

impl RelationInputs {
    /// The same inputs with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        RelationInputs {
            eps_a: self.eps_b,
            eps_b: self.eps_a,
            spread_a: self.spread_b,
            spread_b: self.spread_a,
            spread_a_est: self.spread_b_est,
            spread_b_est: self.spread_a_est,
            c: self.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    ArthursKelly,
    Hall,
    Ozawa,
    New,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::ArthursKelly, Relation::Hall, Relation::Ozawa, Relation::New];

    pub fn name(self) -> &'static str {
        match self {
            Relation::ArthursKelly => "ak",
            Relation::Hall => "hall",
            Relation::Ozawa => "ozawa",
            Relation::New => "new",
        }
    }

    /// Whether the relation holds for every joint measurement.
    pub fn is_universal(self) -> bool {
        self != Relation::ArthursKelly
    }
}

/// `true` where the left hand side reaches the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelationFlags {
    pub ak: bool,
    pub hall: bool,
    pub ozawa: bool,
    pub new: bool,
}

/// Where a report's numbers came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDescriptor {
    /// `epr` for the ideal source, otherwise the state file's name.
    pub source: String,
    pub gamma_deg: Option<f64>,
    pub r_h: f64,
    pub r_v: f64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub x_estimator: EstimatorKind,
    pub y_estimator: EstimatorKind,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub lhs_ak: f64,
    pub lhs_hall: f64,
    pub lhs_ozawa: f64,
    pub lhs_new: f64,
    /// `c/2`.
    pub bound: f64,
    pub inputs: RelationInputs,
    pub satisfied: RelationFlags,
    pub scenario: Option<ScenarioDescriptor>,
}

impl RelationReport {
    pub fn lhs(&self, relation: Relation) -> f64 {
        match relation {
            Relation::ArthursKelly => self.lhs_ak,
            Relation::Hall => self.lhs_hall,
            Relation::Ozawa => self.lhs_ozawa,
            Relation::New => self.lhs_new,
        }
    }

    /// `lhs - bound`; negative means violated.
    pub fn margin(&self, relation: Relation) -> f64 {
        self.lhs(relation) - self.bound
    }

    pub fn is_satisfied(&self, relation: Relation) -> bool {
        match relation {
            Relation::ArthursKelly => self.satisfied.ak,
            Relation::Hall => self.satisfied.hall,
            Relation::Ozawa => self.satisfied.ozawa,
            Relation::New => self.satisfied.new,
        }
    }

    pub fn with_scenario(mut self, scenario: ScenarioDescriptor) -> Self {
        self.scenario = Some(scenario);
        self
    }
}

/// Evaluates all four left hand sides against `c/2`.
pub fn evaluate_relations(inputs: RelationInputs) -> Result<RelationReport> {
    let RelationInputs {
        eps_a,
        eps_b,
        spread_a,
        spread_b,
        spread_a_est,
        spread_b_est,
        c,
    } = inputs;
    for (name, value) in [
        ("eps_a", eps_a),
        ("eps_b", eps_b),
        ("spread_a", spread_a),
        ("spread_b", spread_b),
        ("spread_a_est", spread_a_est),
        ("spread_b_est", spread_b_est),
        ("c", c),
    ] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeInput { name, value });
        }
    }
    let lhs_ak = eps_a * eps_b;
    let lhs_hall = lhs_ak + eps_a * spread_b_est + spread_a_est * eps_b;
    let lhs_ozawa = lhs_ak + eps_a * spread_b + spread_a * eps_b;
    let lhs_new = 0.5 * eps_a * (spread_b_est + spread_b) + 0.5 * eps_b * (spread_a_est + spread_a);
    let bound = 0.5 * c;
    let ok = |lhs: f64| lhs - bound >= -Tolerances::STANDARD.relation_margin;
    Ok(RelationReport {
        lhs_ak,
        lhs_hall,
        lhs_ozawa,
        lhs_new,
        bound,
        inputs,
        satisfied: RelationFlags {
            ak: ok(lhs_ak),
            hall: ok(lhs_hall),
            ozawa: ok(lhs_ozawa),
            new: ok(lhs_new),
        },
        scenario: None,
    })
}

/// `h(x) = ½[√(1 - x²) - (1 - x)]`, which is nonnegative on `[0, 1]` and
/// vanishes at both ends.
pub fn h(x: f64) -> f64 {
    0.5 * ((1.0 - x * x).max(0.0).sqrt() - (1.0 - x))
}

/// Comparison of the mixed-spread relation with Hall's and Ozawa's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrengthOrdering {
    pub new_le_hall: bool,
    pub new_le_ozawa: bool,
    /// Present when both estimates are optimal, where the gap to Hall's
    /// relation has a closed form.
    pub gap: Option<GapCheck>,
}

impl StrengthOrdering {
    pub fn holds(&self) -> bool {
        self.new_le_hall && self.new_le_ozawa && self.gap.is_none_or(|g| g.holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCheck {
    /// `lhs_hall - lhs_new`.
    pub actual: f64,
    /// `εA ΔB h(β) + ΔA εB h(α)` with `α = εA/ΔA`, `β = εB/ΔB`.
    pub predicted: f64,
    pub residual: f64,
    pub holds: bool,
}

/// Checks that the mixed-spread relation is at least as strong as Hall's and
/// Ozawa's. The ordering is only claimed for an optimal `A` estimate, so any
/// other kind is rejected. When the `B` estimate is optimal too, the gap to
/// Hall's relation is compared with its closed form.
pub fn strength_comparison(
    report: &RelationReport,
    a_kind: EstimatorKind,
    b_kind: EstimatorKind,
) -> Result<StrengthOrdering> {
    if a_kind != EstimatorKind::Optimal {
        return Err(Error::NotApplicable("A"));
    }
    let tol = Tolerances::STANDARD.oracle_agreement;
    let i = &report.inputs;
    let gap = (b_kind == EstimatorKind::Optimal && i.spread_a > 0.0 && i.spread_b > 0.0).then(|| {
        let alpha = i.eps_a / i.spread_a;
        let beta = i.eps_b / i.spread_b;
        let predicted = i.eps_a * i.spread_b * h(beta) + i.spread_a * i.eps_b * h(alpha);
        let actual = report.lhs_hall - report.lhs_new;
        GapCheck {
            actual,
            predicted,
            residual: actual - predicted,
            holds: (actual - predicted).abs() <= tol,
        }
    });
    Ok(StrengthOrdering {
        new_le_hall: report.lhs_new <= report.lhs_hall + tol,
        new_le_ozawa: report.lhs_new <= report.lhs_ozawa + tol,
        gap,
    })
}

/// Every intermediate value in the derivation of the mixed-spread relation
/// from the commutator identity
/// `2[A, B] = [A - A_est, B + B_est] + [A + A_est, B - B_est]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    /// `|⟨[A, B]⟩|`.
    pub c: f64,
    /// Largest entry of the identity's two sides' difference.
    pub identity_residual: f64,
    /// `|⟨[A-A_est, B]⟩|, |⟨[A-A_est, B_est]⟩|, |⟨[A, B-B_est]⟩|, |⟨[A_est, B-B_est]⟩|`.
    pub terms: [f64; 4],
    /// `2 ΔR ΔS` for each term `[R, S]`.
    pub schwarz: [f64; 4],
    /// The Schwarz bounds with `Δ(A - A_est)` relaxed to `εA` and so on:
    /// `2εA ΔB, 2εA ΔB_est, 2ΔA εB, 2ΔA_est εB`.
    pub relaxed: [f64; 4],
    pub inputs: RelationInputs,
    pub lhs_new: f64,
    pub identity_holds: bool,
    pub triangle_holds: bool,
    pub schwarz_holds: bool,
    pub relaxation_holds: bool,
    pub bound_holds: bool,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.triangle_holds && self.schwarz_holds && self.relaxation_holds && self.bound_holds
    }
}

/// Evaluates each link of the derivation numerically. All operators must act
/// on the space of `rho`, and the estimates must commute.
pub fn verify_eq4_chain(
    a_est: &HermitianOperator,
    b_est: &HermitianOperator,
    a: &HermitianOperator,
    b: &HermitianOperator,
    rho: &DensityMatrix,
) -> Result<ChainReport> {
    let dim = rho.dim();
    for op in [a_est, b_est, a, b] {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch(op.dim(), dim));
        }
    }
    let zero = ComplexMatrix::zeros(dim);
    let joint = a_est.commutator(b_est)?.max_abs_diff(&zero);
    if joint > Tolerances::STANDARD.equality {
        return Err(Error::NonCommutingEstimators(joint));
    }
    let tol = Tolerances::STANDARD.oracle_agreement;

    let da = a.sub(a_est)?;
    let db = b.sub(b_est)?;
    let lhs = a.commutator(b)?.scale(2.0.into());
    let rhs = &da.commutator(&b.add(b_est)?)? + &a.add(a_est)?.commutator(&db)?;
    let identity_residual = lhs.max_abs_diff(&rhs);
    let scale = 1.0 + lhs.max_abs_diff(&zero);

    let eps = |d: &HermitianOperator| -> Result<f64> { Ok(expectation(&d.square(), rho)?.max(0.0).sqrt()) };
    let eps_a = eps(&da)?;
    let eps_b = eps(&db)?;
    let spread_a = spread(a, rho)?;
    let spread_b = spread(b, rho)?;
    let spread_a_est = spread(a_est, rho)?;
    let spread_b_est = spread(b_est, rho)?;
    let spread_da = spread(&da, rho)?;
    let spread_db = spread(&db, rho)?;

    let pairs: [(&HermitianOperator, &HermitianOperator); 4] = [(&da, b), (&da, b_est), (a, &db), (a_est, &db)];
    let mut terms = [0.0; 4];
    for (t, (r, s)) in terms.iter_mut().zip(pairs) {
        *t = trace_with(&r.commutator(s)?, rho)?.norm();
    }
    let schwarz = [
        2.0 * spread_da * spread_b,
        2.0 * spread_da * spread_b_est,
        2.0 * spread_a * spread_db,
        2.0 * spread_a_est * spread_db,
    ];
    let relaxed = [
        2.0 * eps_a * spread_b,
        2.0 * eps_a * spread_b_est,
        2.0 * spread_a * eps_b,
        2.0 * spread_a_est * eps_b,
    ];
    let c = commutator_bound(a, b, rho)?;
    let inputs = RelationInputs {
        eps_a,
        eps_b,
        spread_a,
        spread_b,
        spread_a_est,
        spread_b_est,
        c,
    };
    let lhs_new = evaluate_relations(inputs)?.lhs_new;
    Ok(ChainReport {
        c,
        identity_residual,
        terms,
        schwarz,
        relaxed,
        inputs,
        lhs_new,
        identity_holds: identity_residual <= 1e-12 * scale,
        triangle_holds: 2.0 * c <= terms.iter().sum::<f64>() + tol,
        schwarz_holds: terms.iter().zip(&schwarz).all(|(t, s)| *t <= s + tol),
        relaxation_holds: schwarz.iter().zip(&relaxed).all(|(s, r)| *s <= r + tol),
        bound_holds: lhs_new >= 0.5 * c - tol,
    })
}

/// Measurement–disturbance form: the `B` estimate is replaced by the
/// disturbed observable `B' = Σ_m M_m B M_m` and its inaccuracy by the
/// disturbance `η(B) = ⟨(B' - B)²⟩^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MdReport {
    pub eps_a: f64,
    pub eta_b: f64,
    pub spread_a: f64,
    pub spread_a_est: f64,
    pub spread_b: f64,
    pub spread_b_disturbed: f64,
    /// `εA (ΔB + ΔB')/2 + η(B) (ΔA_est + ΔA)/2`.
    pub lhs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Evaluates the measurement–disturbance relation for `A = X`, `B = Y` on
/// the first qubit, with `A` estimated from `W` by `est`.
pub fn evaluate_md_relation(
    rho: &DensityMatrix,
    slide: &SemiweakSlide,
    w: BlochObservable,
    est: &Estimator,
) -> Result<MdReport> {
    let id = pauli(Pauli::I);
    let a = tensor(&pauli(Pauli::X), &id)?;
    let y = pauli(Pauli::Y);
    let b = tensor(&y, &id)?;
    let b_disturbed = tensor(&disturbed_observable(slide, &y)?, &id)?;

    let dist = joint_distribution(rho, slide, w)?;
    let eps_a = inaccuracy_x(&dist, slide, est, &Tolerances::STANDARD)?.value;
    let spread_a_est = estimator_spread(&dist, est)?;
    let eta_b = expectation(&b_disturbed.sub(&b)?.square(), rho)?.max(0.0).sqrt();
    let spread_a = spread(&a, rho)?;
    let spread_b = spread(&b, rho)?;
    let spread_b_disturbed = spread(&b_disturbed, rho)?;
    let lhs = 0.5 * eps_a * (spread_b + spread_b_disturbed) + 0.5 * eta_b * (spread_a_est + spread_a);
    let bound = 0.5 * commutator_bound(&a, &b, rho)?;
    Ok(MdReport {
        eps_a,
        eta_b,
        spread_a,
        spread_a_est,
        spread_b,
        spread_b_disturbed,
        lhs,
        bound,
        satisfied: lhs - bound >= -Tolerances::STANDARD.relation_margin,
    })
}
