//! Brute-force ground truth.
//!
//! Everything here is computed from operators on the full Hilbert space,
//! including an ancilla qubit when a generalised measurement has to be
//! represented by a projective one. Only [`crate::qcore`] primitives are
//! shared with the reconstruction code in [`crate::scenario`] and
//! [`crate::estimate`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimate::QuasiDistribution;
use crate::qcore::{expectation, ComplexMatrix, DensityMatrix, HermitianOperator, C64};

/// A state on `n` qubits together with named operators on the same space.
/// Qubit 0 is the leftmost tensor factor.
#[derive(Debug, Clone)]
pub struct DilatedSystem {
    qubits: usize,
    state: DensityMatrix,
    registry: BTreeMap<String, HermitianOperator>,
}

impl DilatedSystem {
    pub fn new(state: DensityMatrix) -> Self {
        let qubits = state.dim().trailing_zeros() as usize;
        DilatedSystem {
            qubits,
            state,
            registry: BTreeMap::new(),
        }
    }

    /// `ρ ⊗ |0⟩⟨0|`; the ancilla becomes the last qubit.
    pub fn with_ancilla(state: &DensityMatrix) -> Result<Self> {
        let ground = DensityMatrix::new(HermitianOperator::diagonal(&[1.0, 0.0])?.matrix().clone())?;
        Ok(DilatedSystem::new(state.kron(&ground)?))
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Lifts an operator on the listed qubits (in order, first = most
    /// significant) to the full space.
    pub fn embed(&self, op: &HermitianOperator, targets: &[usize]) -> Result<HermitianOperator> {
        embed(op, targets, self.qubits)
    }

    pub fn register(&mut self, name: &str, op: HermitianOperator) -> Result<()> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(op.dim(), self.dim()));
        }
        self.registry.insert(name.to_string(), op);
        Ok(())
    }

    pub fn register_local(&mut self, name: &str, op: &HermitianOperator, targets: &[usize]) -> Result<()> {
        let full = self.embed(op, targets)?;
        self.register(name, full)
    }

    pub fn get(&self, name: &str) -> Result<&HermitianOperator> {
        self.registry
            .get(name)
            .ok_or_else(|| Error::UnknownOperator(name.to_string()))
    }

    /// Largest entry of the commutator of two registered operators.
    pub fn commutator_norm(&self, a: &str, b: &str) -> Result<f64> {
        let comm = self.get(a)?.commutator(self.get(b)?)?;
        Ok(comm.max_abs_diff(&ComplexMatrix::zeros(self.dim())))
    }

    /// Projective observable on `(system, ancilla)` that reproduces the
    /// statistics of the binary effects `{E, 𝟙 - E}` on `system`, with
    /// outcome values `values = (g₊, g₋)`, when the ancilla starts in `|0⟩`.
    /// The ancilla must be the last qubit.
    pub fn naimark_observable(
        &self,
        effect_plus: &HermitianOperator,
        system: usize,
        values: (f64, f64),
    ) -> Result<HermitianOperator> {
        let local = naimark_local(effect_plus, values)?;
        self.embed(&local, &[system, self.qubits - 1])
    }
}

/// `op` on `targets` tensored with identities on the remaining qubits.
pub fn embed(op: &HermitianOperator, targets: &[usize], qubits: usize) -> Result<HermitianOperator> {
    let k = targets.len();
    if op.dim() != 1 << k {
        return Err(Error::DimensionMismatch(op.dim(), 1 << k));
    }
    if let Some(&bad) = targets.iter().find(|&&t| t >= qubits) {
        return Err(Error::DimensionMismatch(1 << (bad + 1), 1 << qubits));
    }
    let dim = 1 << qubits;
    let bit = |index: usize, q: usize| (index >> (qubits - 1 - q)) & 1;
    let sub = |index: usize| targets.iter().fold(0, |acc, &t| (acc << 1) | bit(index, t));
    let mask: usize = targets.iter().map(|&t| 1 << (qubits - 1 - t)).sum();
    let m = ComplexMatrix::from_fn(dim, |r, c| {
        if r & !mask != c & !mask {
            C64::new(0.0, 0.0)
        } else {
            op.matrix().get(sub(r), sub(c))
        }
    })?;
    HermitianOperator::new(m)
}

/// Naimark dilation of a binary qubit POVM onto qubit ⊗ ancilla:
/// `U† (𝟙 ⊗ diag(g₊, g₋)) U` with `U` any unitary extending
/// `|φ⟩|0⟩ ↦ √E|φ⟩|0⟩ + √(𝟙-E)|φ⟩|1⟩`.
fn naimark_local(effect_plus: &HermitianOperator, values: (f64, f64)) -> Result<HermitianOperator> {
    if effect_plus.dim() != 2 {
        return Err(Error::DimensionMismatch(effect_plus.dim(), 2));
    }
    let root_plus = effect_plus.sqrt_psd();
    let root_minus = HermitianOperator::identity(2).sub(effect_plus)?.sqrt_psd();
    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(4);
    for j in 0..2 {
        let mut col = DVector::zeros(4);
        for i in 0..2 {
            col[2 * i] = root_plus.matrix().get(i, j);
            col[2 * i + 1] = root_minus.matrix().get(i, j);
        }
        columns.push(col);
    }
    // Complete to an orthonormal basis.
    for e in 0..4 {
        if columns.len() == 4 {
            break;
        }
        let mut v: DVector<C64> = DVector::zeros(4);
        v[e] = C64::new(1.0, 0.0);
        for c in &columns {
            let overlap = c.dotc(&v);
            v -= c * overlap;
        }
        let n = v.norm();
        if n > 1e-6 {
            columns.push(v / C64::new(n, 0.0));
        }
    }
    // Column 2j is the image of |j⟩|0⟩; the completion fills columns 2j+1.
    let order = [columns[0].clone(), columns[2].clone(), columns[1].clone(), columns[3].clone()];
    let u = DMatrix::from_columns(&order);
    let readout = DMatrix::from_diagonal(&DVector::from_column_slice(&[
        C64::new(values.0, 0.0),
        C64::new(values.1, 0.0),
        C64::new(values.0, 0.0),
        C64::new(values.1, 0.0),
    ]));
    let m = ComplexMatrix::new(u.adjoint() * readout * &u)?;
    Ok(HermitianOperator::hermitian_part(&m))
}

/// `ε = ⟨(E - T)²⟩^{1/2}` for registered target `T` and estimator `E`.
pub fn direct_inaccuracy(sys: &DilatedSystem, target: &str, estimator: &str) -> Result<f64> {
    let diff = sys.get(estimator)?.sub(sys.get(target)?)?;
    let msd = expectation(&diff.square(), sys.state())?;
    Ok(msd.max(0.0).sqrt())
}

/// `p_MH(k, l) = ⟨K_k L_l + L_l K_k⟩ / 2` for two registered families of
/// effects, each given as `(outcome value, operator name)`.
pub fn direct_margenau_hill(
    sys: &DilatedSystem,
    k_family: &[(f64, &str)],
    l_family: &[(f64, &str)],
) -> Result<QuasiDistribution> {
    for family in [k_family, l_family] {
        let total = family
            .iter()
            .try_fold(HermitianOperator::zeros(sys.dim()), |acc, (_, name)| acc.add(sys.get(name)?))?;
        let defect = total.matrix().max_abs_diff(&ComplexMatrix::identity(sys.dim()));
        if defect > 1e-12 {
            return Err(Error::IncompleteFamily(defect));
        }
    }
    let mut entries = vec![vec![0.0; l_family.len()]; k_family.len()];
    for (i, (_, kn)) in k_family.iter().enumerate() {
        for (j, (_, ln)) in l_family.iter().enumerate() {
            let sym = sys.get(kn)?.jordan_product(sys.get(ln)?)?;
            entries[i][j] = expectation(&sym, sys.state())?;
        }
    }
    Ok(QuasiDistribution {
        k_values: k_family.iter().map(|(v, _)| *v).collect(),
        l_values: l_family.iter().map(|(v, _)| *v).collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{eigenprojector, pauli, BlochObservable, Pauli};
    use crate::scenario::{effective_povm, epr_state, slide_model};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    fn ideal_system() -> DilatedSystem {
        DilatedSystem::new(epr_state(FRAC_PI_8))
    }

    #[test]
    fn embed_matches_kronecker_products() {
        let x = pauli(Pauli::X);
        let y = pauli(Pauli::Y);
        let id = pauli(Pauli::I);
        let sys = DilatedSystem::with_ancilla(&epr_state(0.3)).unwrap();
        let a = sys.embed(&x, &[1]).unwrap();
        assert!(a.approx_eq(&id.kron(&x).kron(&id), 0.0));
        let b = sys.embed(&x.kron(&y), &[0, 2]).unwrap();
        assert!(b.approx_eq(&x.kron(&id).kron(&y), 0.0));
        // Reversed target order swaps the factors.
        let c = sys.embed(&x.kron(&y), &[2, 0]).unwrap();
        assert!(c.approx_eq(&y.kron(&id).kron(&x), 0.0));
    }

    #[test]
    fn embedded_operators_on_different_qubits_commute() {
        let sys = DilatedSystem::with_ancilla(&epr_state(0.3)).unwrap();
        let mut r = crate::random::rng(5, 0);
        for _ in 0..20 {
            let a = sys.embed(&crate::random::hermitian(&mut r, 2), &[0]).unwrap();
            let b = sys.embed(&crate::random::hermitian(&mut r, 4), &[1, 2]).unwrap();
            let comm = a.commutator(&b).unwrap();
            assert!(comm.max_abs_diff(&ComplexMatrix::zeros(8)) < 1e-12);
        }
    }

    #[test]
    fn perfect_estimate_has_zero_inaccuracy() {
        let mut sys = ideal_system();
        sys.register_local("X", &pauli(Pauli::X), &[0]).unwrap();
        sys.register_local("X_est", &pauli(Pauli::X), &[0]).unwrap();
        assert_eq!(direct_inaccuracy(&sys, "X", "X_est").unwrap(), 0.0);
        assert!(matches!(
            direct_inaccuracy(&sys, "X", "nope"),
            Err(Error::UnknownOperator(_))
        ));
    }

    #[test]
    fn ideal_epr_x_inaccuracy() {
        let mut sys = ideal_system();
        let w = BlochObservable::from_degrees(90.0, 180.0).as_operator();
        sys.register_local("X", &pauli(Pauli::X), &[0]).unwrap();
        sys.register_local("X_est", &w.scale(FRAC_1_SQRT_2), &[1]).unwrap();
        let e = direct_inaccuracy(&sys, "X", "X_est").unwrap();
        assert!((e - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn dilated_y_estimator_inaccuracy_is_root_two_kappa() {
        let slide = slide_model(0.1244, 0.4645).unwrap();
        let (up, _) = effective_povm(&slide);
        let mut sys = DilatedSystem::with_ancilla(&epr_state(FRAC_PI_8)).unwrap();
        let y_est = sys.naimark_observable(&up, 0, (1.0, -1.0)).unwrap();
        sys.register("Y_est", y_est).unwrap();
        sys.register_local("Y", &pauli(Pauli::Y), &[0]).unwrap();
        let e = direct_inaccuracy(&sys, "Y", "Y_est").unwrap();
        assert!((e - (2.0 * slide.kappa()).sqrt()).abs() < 1e-12);
        assert!((e - 0.38695).abs() < 1e-4);
    }

    #[test]
    fn naimark_observable_reproduces_povm_statistics() {
        let mut r = crate::random::rng(11, 0);
        for _ in 0..20 {
            let rho = crate::random::hilbert_schmidt_state(&mut r, 4);
            let effect = crate::random::qubit_effect(&mut r);
            let sys = DilatedSystem::with_ancilla(&rho).unwrap();
            let obs = sys.naimark_observable(&effect, 0, (1.0, 0.0)).unwrap();
            // With values (1, 0) the observable is the projector for outcome +.
            assert!(obs.square().approx_eq(&obs, 1e-12));
            let p_direct = expectation(&effect.kron(&pauli(Pauli::I)), &rho).unwrap();
            let p_dilated = expectation(&obs, sys.state()).unwrap();
            assert!((p_direct - p_dilated).abs() < 1e-12);
        }
    }

    #[test]
    fn margenau_hill_of_x_and_y_on_h() {
        let h = DensityMatrix::new(HermitianOperator::diagonal(&[1.0, 0.0]).unwrap().matrix().clone()).unwrap();
        let mut sys = DilatedSystem::new(h);
        for (name, p, s) in [("X+", Pauli::X, 1.0), ("X-", Pauli::X, -1.0), ("Y+", Pauli::Y, 1.0), ("Y-", Pauli::Y, -1.0)] {
            sys.register(name, eigenprojector(&pauli(p), s)).unwrap();
        }
        let q = direct_margenau_hill(&sys, &[(1.0, "X+"), (-1.0, "X-")], &[(1.0, "Y+"), (-1.0, "Y-")]).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert!((q.get(k, l) - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn margenau_hill_of_commuting_families_is_a_probability() {
        let mut r = crate::random::rng(12, 0);
        let rho = crate::random::hilbert_schmidt_state(&mut r, 4);
        let mut sys = DilatedSystem::new(rho);
        let w = crate::random::bloch(&mut r);
        for (name, s) in [("A+", 1.0), ("A-", -1.0)] {
            sys.register_local(name, &eigenprojector(&pauli(Pauli::X), s), &[0]).unwrap();
        }
        for (name, s) in [("W+", 1.0), ("W-", -1.0)] {
            sys.register_local(name, &w.projector(s), &[1]).unwrap();
        }
        let q = direct_margenau_hill(&sys, &[(1.0, "A+"), (-1.0, "A-")], &[(1.0, "W+"), (-1.0, "W-")]).unwrap();
        assert!(q.entries.iter().flatten().all(|p| *p >= 0.0));
        assert!((q.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_family_is_rejected() {
        let mut sys = ideal_system();
        sys.register_local("X+", &eigenprojector(&pauli(Pauli::X), 1.0), &[0]).unwrap();
        let err = direct_margenau_hill(&sys, &[(1.0, "X+")], &[(1.0, "X+")]).unwrap_err();
        assert!(matches!(err, Error::IncompleteFamily(_)));
    }

    #[test]
    fn y_channel_table_from_effects() {
        let slide = slide_model(0.1244, 0.4645).unwrap();
        let (up, um) = effective_povm(&slide);
        let mut r = crate::random::rng(13, 0);
        let rho = crate::random::hilbert_schmidt_state(&mut r, 4);
        let mut sys = DilatedSystem::new(rho.clone());
        sys.register_local("Y+", &eigenprojector(&pauli(Pauli::Y), 1.0), &[0]).unwrap();
        sys.register_local("Y-", &eigenprojector(&pauli(Pauli::Y), -1.0), &[0]).unwrap();
        sys.register_local("U+", &up, &[0]).unwrap();
        sys.register_local("U-", &um, &[0]).unwrap();
        let q = direct_margenau_hill(&sys, &[(1.0, "Y+"), (-1.0, "Y-")], &[(1.0, "U+"), (-1.0, "U-")]).unwrap();
        let k = slide.kappa();
        for (i, ys) in [1.0, -1.0].iter().enumerate() {
            let p_y = expectation(sys.get(if i == 0 { "Y+" } else { "Y-" }).unwrap(), &rho).unwrap();
            for (j, ys2) in [1.0, -1.0].iter().enumerate() {
                let kernel = k / 2.0 + if ys == ys2 { 1.0 - k } else { 0.0 };
                assert!((q.get(i, j) - kernel * p_y).abs() < 1e-12);
            }
        }
        assert!((q.mean_square_deviation() - 2.0 * k).abs() < 1e-12);
    }
}
