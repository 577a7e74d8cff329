//! Seeded random scenario generators for the property suites.
//!
//! Every trial gets its own ChaCha stream derived from `(seed, trial)`, so a
//! suite gives identical results whatever order trials are evaluated in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::estimate::Estimator;
use crate::qcore::{BlochObservable, ComplexMatrix, DensityMatrix, HermitianOperator, C64};
use crate::scenario::{slide_model, SemiweakSlide};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Hilbert–Schmidt random state `G G† / Tr(G G†)` with Ginibre `G`.
pub fn hilbert_schmidt_state(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian_complex(rng)).expect("valid dim");
    let gg = &g * &g.adjoint();
    let trace = gg.trace().re;
    let rho = HermitianOperator::hermitian_part(&gg.scale(C64::new(1.0 / trace, 0.0)));
    DensityMatrix::new(rho.matrix().clone()).expect("positive by construction")
}

/// Random Hermitian operator with Gaussian entries.
pub fn hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian_complex(rng)).expect("valid dim");
    HermitianOperator::hermitian_part(&g)
}

/// Uniformly random direction on the Bloch sphere.
pub fn bloch(rng: &mut impl Rng) -> BlochObservable {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    BlochObservable::new((1.0 - 2.0 * u).acos(), 2.0 * std::f64::consts::PI * v)
}

/// Slide with independent uniform reflectivities and `|r_H - r_V| ≥ min_gap`.
pub fn slide(rng: &mut impl Rng, min_gap: f64) -> SemiweakSlide {
    loop {
        let r_h: f64 = rng.random();
        let r_v: f64 = rng.random();
        if (r_h - r_v).abs() >= min_gap {
            return slide_model(r_h, r_v).expect("non-degenerate");
        }
    }
}

pub fn estimator(rng: &mut impl Rng, scale: f64) -> Estimator {
    let a: f64 = rng.random_range(-scale..scale);
    let b: f64 = rng.random_range(-scale..scale);
    Estimator::custom(a, b).expect("finite")
}

/// Random qubit effect `0 ≤ E ≤ 𝟙`.
pub fn qubit_effect(rng: &mut impl Rng) -> HermitianOperator {
    let h = hermitian(rng, 2);
    let a: f64 = rng.random();
    let b: f64 = rng.random();
    // Rotate diag(a, b) into the eigenbasis of a random Hermitian matrix.
    let eig = h.matrix().inner().clone().symmetric_eigen();
    let v = ComplexMatrix::new(eig.eigenvectors).expect("2x2");
    let d = HermitianOperator::diagonal(&[a, b]).expect("2x2");
    HermitianOperator::hermitian_part(&(&(&v * d.matrix()) * &v.adjoint()))
}
