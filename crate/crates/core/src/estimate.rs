//! Estimators and the reconstruction of their inaccuracies from probe
//! statistics.
//!
//! An estimate of `X` on the first qubit is a function `f` of the `W`
//! outcome on the second. Its inaccuracy `ε(X_est) = ⟨(X⊗𝟙 - 𝟙⊗f(W))²⟩^{1/2}`
//! involves non-commuting operators, but it equals a mean square deviation
//! under the Margenau–Hill quasiprobability `p_MH(x, w)`, and that
//! quasiprobability is a linear image of the measured table `p(m, y, w)`
//! weighted by the probe's contextual values:
//!
//! ```text
//! p_MH(x, w) = Σ_{m,y} ½(1 + x ξ_m) p(m, y, w)
//! ε(X_est)²  = Σ_{x,w} [x - f(w)]² p_MH(x, w)
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{
    expectation, pauli, spread, std_from_moments, tensor, BlochObservable, DensityMatrix,
    HermitianOperator, Pauli,
};
use crate::scenario::{effective_povm, joint_distribution, JointDistribution, Outcome, SemiweakSlide, SlideOutcome};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Simple,
    Optimal,
    Custom,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Simple => "simple",
            EstimatorKind::Optimal => "optimal",
            EstimatorKind::Custom => "custom",
        }
    }
}

/// A function from a binary outcome to an estimated value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimator {
    pub plus: f64,
    pub minus: f64,
    pub kind: EstimatorKind,
}

impl Estimator {
    /// Reports the outcome itself: `f(±1) = ±1`.
    pub fn simple() -> Self {
        Estimator {
            plus: 1.0,
            minus: -1.0,
            kind: EstimatorKind::Simple,
        }
    }

    pub fn custom(plus: f64, minus: f64) -> Result<Self> {
        for v in [plus, minus] {
            if !v.is_finite() {
                return Err(Error::NonFiniteEstimator(v));
            }
        }
        Ok(Estimator {
            plus,
            minus,
            kind: EstimatorKind::Custom,
        })
    }

    pub fn value(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Plus => self.plus,
            Outcome::Minus => self.minus,
        }
    }

    /// `f(G) = f(+1) G₊ + f(-1) G₋` for a binary observable.
    pub fn as_operator(&self, projector_plus: &HermitianOperator, projector_minus: &HermitianOperator) -> Result<HermitianOperator> {
        projector_plus
            .scale(self.plus)
            .add(&projector_minus.scale(self.minus))
    }
}

/// Optimal estimate of `X` on qubit 1 from `W` on qubit 2, the conditional
/// mean `f(w) = ⟨X⊗(𝟙 + wW)⟩ / ⟨𝟙⊗(𝟙 + wW)⟩`.
pub fn optimal_estimator(rho: &DensityMatrix, w: BlochObservable) -> Result<Estimator> {
    let x = pauli(Pauli::X);
    let id = pauli(Pauli::I);
    let w_op = w.as_operator();
    let branch = |outcome: Outcome| -> Result<f64> {
        let weight = id.add(&w_op.scale(outcome.sign()))?;
        let num = expectation(&tensor(&x, &weight)?, rho)?;
        let den = expectation(&tensor(&id, &weight)?, rho)?;
        if den <= Tolerances::STANDARD.outcome_probability {
            return Err(Error::UndefinedEstimate {
                outcome: outcome.label(),
                probability: den / 2.0,
            });
        }
        Ok(num / den)
    };
    Ok(Estimator {
        plus: branch(Outcome::Plus)?,
        minus: branch(Outcome::Minus)?,
        kind: EstimatorKind::Optimal,
    })
}

/// Optimal `Y` estimate from the outcome of the probe-then-`Y` measurement:
/// `g(y) = Re⟨Y Υ_y⟩ / ⟨Υ_y⟩` with `Υ_y` the effective effects.
pub fn optimal_y_estimator(rho: &DensityMatrix, slide: &SemiweakSlide) -> Result<Estimator> {
    let y = pauli(Pauli::Y);
    let id = pauli(Pauli::I);
    let (up, um) = effective_povm(slide);
    let branch = |effect: &HermitianOperator, outcome: Outcome| -> Result<f64> {
        let num = expectation(&tensor(&y.jordan_product(effect)?, &id)?, rho)?;
        let den = expectation(&tensor(effect, &id)?, rho)?;
        if den <= Tolerances::STANDARD.outcome_probability {
            return Err(Error::UndefinedEstimate {
                outcome: outcome.label(),
                probability: den,
            });
        }
        Ok(num / den)
    };
    Ok(Estimator {
        plus: branch(&up, Outcome::Plus)?,
        minus: branch(&um, Outcome::Minus)?,
        kind: EstimatorKind::Optimal,
    })
}

/// Quasiprobability table over two binary observables. Entries may be
/// negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiDistribution {
    pub k_values: Vec<f64>,
    pub l_values: Vec<f64>,
    /// `entries[k][l]`.
    pub entries: Vec<Vec<f64>>,
}

impl QuasiDistribution {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k][l]
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }

    pub fn marginal_k(&self, k: usize) -> f64 {
        self.entries[k].iter().sum()
    }

    pub fn marginal_l(&self, l: usize) -> f64 {
        self.entries.iter().map(|row| row[l]).sum()
    }

    /// `Σ_{k,l} (κ_k - λ_l)² p(k, l)`.
    pub fn mean_square_deviation(&self) -> f64 {
        self.mean_square_deviation_with(&self.l_values)
    }

    /// Same, with the second observable's outcome values replaced.
    pub fn mean_square_deviation_with(&self, l_values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, kv) in self.k_values.iter().enumerate() {
            for (l, lv) in l_values.iter().enumerate() {
                acc += (kv - lv).powi(2) * self.entries[k][l];
            }
        }
        acc
    }
}

/// Margenau–Hill table `p_MH(x, w)` reconstructed from `p(m, y, w)`.
/// Rows are `x = +1, -1`; columns `w = +1, -1`.
pub fn mh_from_counts(dist: &JointDistribution, slide: &SemiweakSlide) -> Result<QuasiDistribution> {
    let mut entries = vec![vec![0.0; 2]; 2];
    for (xi_idx, x) in Outcome::ALL.iter().enumerate() {
        for (wi_idx, w) in Outcome::ALL.iter().enumerate() {
            let mut acc = 0.0;
            for m in SlideOutcome::ALL {
                let alpha = 0.5 * (1.0 + x.sign() * slide.contextual_value(m)?);
                acc += alpha * dist.marginal_mw(m, *w);
            }
            entries[xi_idx][wi_idx] = acc;
        }
    }
    Ok(QuasiDistribution {
        k_values: vec![1.0, -1.0],
        l_values: vec![1.0, -1.0],
        entries,
    })
}

/// A reconstructed root-mean-square inaccuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inaccuracy {
    /// `ε`, after clamping.
    pub value: f64,
    /// The reconstructed `ε²` before clamping.
    pub raw_squared: f64,
    /// True when a slightly negative `ε²` was clamped to zero.
    pub clamped: bool,
}

impl Inaccuracy {
    fn from_squared(raw_squared: f64, tol: &Tolerances) -> Result<Self> {
        if raw_squared < -tol.epsilon_sq_floor {
            return Err(Error::InconsistentData(raw_squared));
        }
        Ok(Inaccuracy {
            value: raw_squared.max(0.0).sqrt(),
            raw_squared,
            clamped: raw_squared < 0.0,
        })
    }
}

/// `ε(X_est)² = ½ Σ_{x,m,w} [x - f(w)]² (1 + x ξ_m) p(m, w)`, where
/// `p(m, w)` is the table with `y` summed out.
pub fn inaccuracy_x(
    dist: &JointDistribution,
    slide: &SemiweakSlide,
    est: &Estimator,
    tol: &Tolerances,
) -> Result<Inaccuracy> {
    let mut acc = 0.0;
    for m in SlideOutcome::ALL {
        let xi = slide.contextual_value(m)?;
        for w in Outcome::ALL {
            let p_mw = dist.marginal_mw(m, w);
            let f = est.value(w);
            for x in Outcome::ALL {
                let x = x.sign();
                acc += (x - f).powi(2) * (1.0 + x * xi) * p_mw;
            }
        }
    }
    Inaccuracy::from_squared(0.5 * acc, tol)
}

/// Margenau–Hill table of `Y` against the probe-then-`Y` outcome `y'`,
/// `p_MH(y, y') = [κ/2 + (1-κ) δ_{yy'}] ⟨Y_y⟩`. Rows are `y`, columns `y'`.
pub fn y_channel_mh(slide: &SemiweakSlide, mean_y: f64) -> QuasiDistribution {
    let k = slide.kappa();
    let mut entries = vec![vec![0.0; 2]; 2];
    for (i, y) in Outcome::ALL.iter().enumerate() {
        let p_y = 0.5 * (1.0 + y.sign() * mean_y);
        for (j, y2) in Outcome::ALL.iter().enumerate() {
            let kernel = k / 2.0 + if y == y2 { 1.0 - k } else { 0.0 };
            entries[i][j] = kernel * p_y;
        }
    }
    QuasiDistribution {
        k_values: vec![1.0, -1.0],
        l_values: vec![1.0, -1.0],
        entries,
    }
}

/// Inaccuracy of `Y_est = y'` (outcome values `±1`): `ε(Y_est) = √(2κ)`
/// for every input state.
pub fn inaccuracy_y(slide: &SemiweakSlide) -> f64 {
    // State independence: evaluate the row kernel for each y separately.
    let sq = Outcome::ALL
        .iter()
        .map(|y| {
            let row = y_channel_mh(slide, y.sign());
            row.mean_square_deviation()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    debug_assert!((sq - 2.0 * slide.kappa()).abs() < 1e-12);
    sq.max(0.0).sqrt()
}

/// Inaccuracy of an arbitrary `Y` estimate `g(y')`. `⟨Y⟩` is recovered from
/// the `y` marginal of the table, `p(y') = ½[1 + y'(1-κ)⟨Y⟩]`, so this needs
/// `κ < 1`.
pub fn inaccuracy_y_with(
    dist: &JointDistribution,
    slide: &SemiweakSlide,
    est: &Estimator,
    tol: &Tolerances,
) -> Result<Inaccuracy> {
    let k = slide.kappa();
    if 1.0 - k <= tol.outcome_probability {
        return Err(Error::DegenerateSlide(slide.r_h()));
    }
    let total = dist.total();
    let mean_out = (dist.marginal_y(Outcome::Plus) - dist.marginal_y(Outcome::Minus)) / total;
    let mean_y = mean_out / (1.0 - k);
    let mh = y_channel_mh(slide, mean_y);
    let sq = mh.mean_square_deviation_with(&[est.plus, est.minus]);
    Inaccuracy::from_squared(sq, tol)
}

fn spread_over(p_plus: f64, p_minus: f64, est: &Estimator) -> Result<f64> {
    let total = p_plus + p_minus;
    let (a, b) = (p_plus / total, p_minus / total);
    let mean = a * est.plus + b * est.minus;
    let second = a * est.plus.powi(2) + b * est.minus.powi(2);
    std_from_moments(mean, second)
}

/// `Δ f(W)` under the `w` marginal of the table.
pub fn estimator_spread(dist: &JointDistribution, est: &Estimator) -> Result<f64> {
    spread_over(dist.marginal_w(Outcome::Plus), dist.marginal_w(Outcome::Minus), est)
}

/// `Δ g(Y)` under the `y` marginal of the table.
pub fn estimator_spread_y(dist: &JointDistribution, est: &Estimator) -> Result<f64> {
    spread_over(dist.marginal_y(Outcome::Plus), dist.marginal_y(Outcome::Minus), est)
}

/// The three terms of `ε² + Δ_est² = ΔX²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionCheck {
    pub epsilon_sq: f64,
    pub spread_est_sq: f64,
    pub spread_sq: f64,
    /// `ε² + Δ_est² - ΔX²`.
    pub residual: f64,
    /// `Some(..)` only for optimal estimators, where the identity is exact.
    pub holds: Option<bool>,
}

impl DispersionCheck {
    pub fn from_terms(epsilon_sq: f64, spread_est_sq: f64, spread_sq: f64, kind: EstimatorKind, tol: f64) -> Self {
        let residual = epsilon_sq + spread_est_sq - spread_sq;
        DispersionCheck {
            epsilon_sq,
            spread_est_sq,
            spread_sq,
            residual,
            holds: (kind == EstimatorKind::Optimal).then_some(residual.abs() <= tol),
        }
    }

    /// `√(ε² + Δ_est²)`, to be compared with `ΔX`.
    pub fn root_lhs(&self) -> f64 {
        (self.epsilon_sq + self.spread_est_sq).max(0.0).sqrt()
    }
}

/// Evaluates the inaccuracy–dispersion terms on the simulated table for
/// `(ρ, slide, W)`.
pub fn dispersion_check(
    rho: &DensityMatrix,
    slide: &SemiweakSlide,
    w: BlochObservable,
    est: &Estimator,
) -> Result<DispersionCheck> {
    let tol = Tolerances::STANDARD;
    let dist = joint_distribution(rho, slide, w)?;
    let eps = inaccuracy_x(&dist, slide, est, &tol)?;
    let d_est = estimator_spread(&dist, est)?;
    let dx = spread(&tensor(&pauli(Pauli::X), &pauli(Pauli::I))?, rho)?;
    Ok(DispersionCheck::from_terms(
        eps.raw_squared,
        d_est * d_est,
        dx * dx,
        est.kind,
        tol.oracle_agreement,
    ))
}
