//! The simulated experiment: an entangled source, a semiweak probe of `X`
//! on the first qubit, a subsequent `Y` measurement on the first qubit and a
//! `W` measurement on the second.
//!
//! The probe is a polarisation-dependent beam splitter characterised only by
//! its reflection probabilities `r_H` and `r_V`, already rotated into the `X`
//! basis. Its measurement operators are
//!
//! ```text
//! M_r = √r_H X₊ + √r_V X₋,    M_t = √t_H X₊ + √t_V X₋,    t = 1 - r
//! ```
//!
//! with `X± = (𝟙 ± X)/2`, so `M_r² + M_t² = 𝟙`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{
    eigenprojector, expectation, pauli, BlochObservable, DensityMatrix, HermitianOperator, Pauli,
    C64,
};
use crate::tolerance::Tolerances;

/// Binary outcome `±1` of a projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn label(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_label(label: i64) -> Option<Outcome> {
        match label {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// Outcome of the semiweak probe. In CSV files the reflected outcome is
/// written `m = +1` unless the file declares otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlideOutcome {
    Reflected,
    Transmitted,
}

impl SlideOutcome {
    pub const ALL: [SlideOutcome; 2] = [SlideOutcome::Reflected, SlideOutcome::Transmitted];

    pub(crate) fn index(self) -> usize {
        match self {
            SlideOutcome::Reflected => 0,
            SlideOutcome::Transmitted => 1,
        }
    }
}

/// The semiweak probe 𝒳.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiweakSlide {
    r_h: f64,
    r_v: f64,
    m_r: HermitianOperator,
    m_t: HermitianOperator,
    kappa: f64,
    contextual: Option<(f64, f64)>,
}

impl SemiweakSlide {
    /// Builds the measurement operators without requiring the contextual
    /// values to exist, so the polarisation-independent case `r_H = r_V` is
    /// representable.
    pub fn measurement_only(r_h: f64, r_v: f64) -> Result<Self> {
        for (name, value) in [("r_H", r_h), ("r_V", r_v)] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        let (t_h, t_v) = (1.0 - r_h, 1.0 - r_v);
        let x = pauli(Pauli::X);
        let x_plus = eigenprojector(&x, 1.0);
        let x_minus = eigenprojector(&x, -1.0);
        let op = |h: f64, v: f64| {
            x_plus
                .scale(h.sqrt())
                .add(&x_minus.scale(v.sqrt()))
                .expect("2x2 operands")
        };
        let kappa = 1.0 - (r_h * r_v).sqrt() - (t_h * t_v).sqrt();
        let contextual = if (r_h - r_v).abs() > 1e-12 {
            let d = r_h - r_v;
            Some(((2.0 - r_h - r_v) / d, -(r_h + r_v) / d))
        } else {
            None
        };
        Ok(SemiweakSlide {
            r_h,
            r_v,
            m_r: op(r_h, r_v),
            m_t: op(t_h, t_v),
            kappa,
            contextual,
        })
    }

    pub fn r_h(&self) -> f64 {
        self.r_h
    }

    pub fn r_v(&self) -> f64 {
        self.r_v
    }

    pub fn t_h(&self) -> f64 {
        1.0 - self.r_h
    }

    pub fn t_v(&self) -> f64 {
        1.0 - self.r_v
    }

    /// Measurement strength `κ = 1 - √(r_H r_V) - √(t_H t_V)` in `[0, 1]`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn measurement_operator(&self, m: SlideOutcome) -> &HermitianOperator {
        match m {
            SlideOutcome::Reflected => &self.m_r,
            SlideOutcome::Transmitted => &self.m_t,
        }
    }

    /// `(ξ_r, ξ_t)`, satisfying `ξ_r p(r) + ξ_t p(t) = ⟨X⟩` for every state.
    pub fn contextual_values(&self) -> Result<(f64, f64)> {
        self.contextual.ok_or(Error::DegenerateSlide(self.r_h))
    }

    pub fn contextual_value(&self, m: SlideOutcome) -> Result<f64> {
        let (xi_r, xi_t) = self.contextual_values()?;
        Ok(match m {
            SlideOutcome::Reflected => xi_r,
            SlideOutcome::Transmitted => xi_t,
        })
    }
}

/// Probe with given reflectivities; fails in the weak limit `r_H = r_V`
/// where the contextual values diverge.
pub fn slide_model(r_h: f64, r_v: f64) -> Result<SemiweakSlide> {
    let slide = SemiweakSlide::measurement_only(r_h, r_v)?;
    slide.contextual_values()?;
    Ok(slide)
}

/// State vector of `cos γ |HV⟩ - sin γ |VH⟩`.
pub fn epr_vector(gamma: f64) -> DVector<C64> {
    DVector::from_column_slice(&[
        C64::new(0.0, 0.0),
        C64::new(gamma.cos(), 0.0),
        C64::new(-gamma.sin(), 0.0),
        C64::new(0.0, 0.0),
    ])
}

/// Density matrix of the source state for entanglement angle `gamma`.
pub fn epr_state(gamma: f64) -> DensityMatrix {
    DensityMatrix::from_pure(&epr_vector(gamma)).expect("unit vector")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Simulated,
    Measured,
}

/// Joint probability table `p(m, y, w)` over the probe outcome `m`, the `Y`
/// outcome `y` and the `W` outcome `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    entries: [[[f64; 2]; 2]; 2],
    w_observable: BlochObservable,
    provenance: Provenance,
}

impl JointDistribution {
    /// Builds a validated table. `entries` is indexed
    /// `[m as SlideOutcome][y as Outcome][w as Outcome]`; use
    /// [`JointDistribution::from_fn`] to avoid depending on the layout.
    pub fn from_fn(
        w_observable: BlochObservable,
        provenance: Provenance,
        tol: &Tolerances,
        mut f: impl FnMut(SlideOutcome, Outcome, Outcome) -> f64,
    ) -> Result<Self> {
        let mut entries = [[[0.0; 2]; 2]; 2];
        for m in SlideOutcome::ALL {
            for y in Outcome::ALL {
                for w in Outcome::ALL {
                    let p = f(m, y, w);
                    if !p.is_finite() || p < -tol.negative_probability {
                        return Err(Error::InvalidProbability {
                            name: "p(m, y, w)",
                            value: p,
                        });
                    }
                    entries[m.index()][y.index()][w.index()] = p;
                }
            }
        }
        let dist = JointDistribution {
            entries,
            w_observable,
            provenance,
        };
        let sum = dist.total();
        let tolerance = match provenance {
            Provenance::Simulated => tol.simulated_sum,
            Provenance::Measured => tol.measured_sum,
        };
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::Normalization { sum, tolerance });
        }
        Ok(dist)
    }

    pub fn get(&self, m: SlideOutcome, y: Outcome, w: Outcome) -> f64 {
        self.entries[m.index()][y.index()][w.index()]
    }

    pub fn w_observable(&self) -> BlochObservable {
        self.w_observable
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().flatten().sum()
    }

    /// Rescales entries so they sum to exactly one.
    pub fn normalized(&self) -> Self {
        let total = self.total();
        let mut out = self.clone();
        out.entries
            .iter_mut()
            .flatten()
            .flatten()
            .for_each(|p| *p /= total);
        out
    }

    pub fn marginal_m(&self, m: SlideOutcome) -> f64 {
        self.entries[m.index()].iter().flatten().sum()
    }

    pub fn marginal_y(&self, y: Outcome) -> f64 {
        SlideOutcome::ALL
            .iter()
            .flat_map(|m| Outcome::ALL.map(|w| self.get(*m, y, w)))
            .sum()
    }

    pub fn marginal_w(&self, w: Outcome) -> f64 {
        SlideOutcome::ALL
            .iter()
            .flat_map(|m| Outcome::ALL.map(|y| self.get(*m, y, w)))
            .sum()
    }

    /// `p(m, w) = Σ_y p(m, y, w)`.
    pub fn marginal_mw(&self, m: SlideOutcome, w: Outcome) -> f64 {
        Outcome::ALL.iter().map(|y| self.get(m, *y, w)).sum()
    }
}

/// Predicted table `p(m, y, w) = ⟨(M_m Y_y M_m) ⊗ W_w⟩_ρ`.
pub fn joint_distribution(
    rho: &DensityMatrix,
    slide: &SemiweakSlide,
    w: BlochObservable,
) -> Result<JointDistribution> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    let y = pauli(Pauli::Y);
    let mut table = [[[0.0; 2]; 2]; 2];
    for m in SlideOutcome::ALL {
        let mm = slide.measurement_operator(m);
        for yo in Outcome::ALL {
            let effect = eigenprojector(&y, yo.sign()).sandwich(mm)?;
            for wo in Outcome::ALL {
                let op = effect.kron(&w.projector(wo.sign()));
                table[m.index()][yo.index()][wo.index()] = expectation(&op, rho)?;
            }
        }
    }
    // Exact normalisation: the operators sum to the identity, so the total
    // differs from one only by rounding.
    let total: f64 = table.iter().flatten().flatten().sum();
    JointDistribution::from_fn(w, Provenance::Simulated, &Tolerances::STANDARD, |m, y, wo| {
        table[m.index()][y.index()][wo.index()] / total
    })
}

/// Effects `(Υ₊, Υ₋)` of the `Y` measurement preceded by the probe,
/// `Υ_± = Σ_m M_m Y_± M_m`.
pub fn effective_povm(slide: &SemiweakSlide) -> (HermitianOperator, HermitianOperator) {
    let y = pauli(Pauli::Y);
    let effect = |sign: f64| {
        let proj = eigenprojector(&y, sign);
        SlideOutcome::ALL
            .iter()
            .map(|m| proj.sandwich(slide.measurement_operator(*m)).expect("2x2"))
            .fold(HermitianOperator::zeros(2), |acc, t| acc.add(&t).expect("2x2"))
    };
    (effect(1.0), effect(-1.0))
}

/// Heisenberg-picture image `B' = M_r B M_r + M_t B M_t` of a qubit
/// observable under the probe.
pub fn disturbed_observable(
    slide: &SemiweakSlide,
    b: &HermitianOperator,
) -> Result<HermitianOperator> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch(b.dim(), 2));
    }
    SlideOutcome::ALL
        .iter()
        .map(|m| b.sandwich(slide.measurement_operator(*m)))
        .try_fold(HermitianOperator::zeros(2), |acc, t| acc.add(&t?))
}
