//! Numerical tolerance profiles.
//!
//! Every threshold used when validating operators, states and measured data
//! lives here, so a run can be tightened or loosened in one place.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max `|A - A†|` entry for an operator to count as Hermitian.
    pub hermitian: f64,
    /// Most negative eigenvalue accepted for a simulated state.
    pub positivity: f64,
    /// Generic equality tolerance for matrices and traces.
    pub equality: f64,
    /// Variance below `-variance` is treated as corruption rather than rounding.
    pub variance: f64,
    /// Most negative eigenvalue accepted for a tomographic state.
    pub measured_eigen_floor: f64,
    /// Hermiticity tolerance for tomographic states.
    pub measured_hermitian: f64,
    /// Trace tolerance for tomographic states.
    pub measured_trace: f64,
    /// Normalisation tolerance for measured joint distributions.
    pub measured_sum: f64,
    /// Normalisation tolerance for simulated joint distributions.
    pub simulated_sum: f64,
    /// Most negative probability accepted in a joint distribution.
    pub negative_probability: f64,
    /// Most negative reconstructed squared inaccuracy that is clamped to zero.
    pub epsilon_sq_floor: f64,
    /// Smallest outcome probability for which a conditional estimate is defined.
    pub outcome_probability: f64,
    /// Slack allowed when checking a relation's left hand side against its bound.
    pub relation_margin: f64,
    /// Agreement required between reconstructed and directly computed values.
    pub oracle_agreement: f64,
}

impl Tolerances {
    pub const STANDARD: Tolerances = Tolerances {
        hermitian: 1e-12,
        positivity: 1e-10,
        equality: 1e-10,
        variance: 1e-12,
        measured_eigen_floor: 1e-3,
        measured_hermitian: 1e-6,
        measured_trace: 1e-3,
        measured_sum: 0.01,
        simulated_sum: 1e-10,
        negative_probability: 1e-9,
        epsilon_sq_floor: 1e-9,
        outcome_probability: 1e-12,
        relation_margin: 1e-9,
        oracle_agreement: 1e-9,
    };

    /// Looser data-quality thresholds for noisy laboratory inputs. Simulation
    /// checks keep their standard values.
    pub const LENIENT: Tolerances = Tolerances {
        measured_eigen_floor: 1e-2,
        measured_hermitian: 1e-4,
        measured_trace: 1e-2,
        measured_sum: 0.02,
        epsilon_sq_floor: 1e-3,
        ..Tolerances::STANDARD
    };

    pub const PROFILES: [&'static str; 2] = ["standard", "lenient"];

    pub fn from_profile(name: &str) -> Result<Tolerances> {
        match name {
            "standard" => Ok(Tolerances::STANDARD),
            "lenient" => Ok(Tolerances::LENIENT),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::STANDARD
    }
}
