//! Complex linear algebra and quantum primitives on two-, four- and
//! eight-dimensional Hilbert spaces.
//!
//! Conventions used throughout the crate:
//!
//! * The single-qubit basis is `{|H⟩, |V⟩}`, the eigenbasis of `Z` with
//!   `Z|H⟩ = |H⟩` and `Z|V⟩ = -|V⟩`. Diagonal/anti-diagonal polarisation are
//!   the `±1` eigenstates of `X`, right/left circular those of `Y`.
//! * Multi-qubit operators are Kronecker products with qubit 1 (the system
//!   whose `X` and `Y` are estimated) as the left factor, so basis index
//!   `2·q1 + q2` enumerates `HH, HV, VH, VV`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix of dimension 2, 4 or 8.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows != cols || !matches!(rows, 2 | 4 | 8) {
            return Err(Error::BadShape { rows, cols });
        }
        Ok(ComplexMatrix(inner))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    /// Row-major construction; `entries.len()` must be a valid `dim²`.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::BadShape {
                rows: dim,
                cols: entries.len() / dim.max(1),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn outer(v: &DVector<C64>) -> Result<Self> {
        Self::new(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        ComplexMatrix(&self.0 * factor)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Result<Self> {
        Self::new(self.0.kronecker(&other.0))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(ComplexMatrix(&self.0 * &other.0 - &other.0 * &self.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    fn check_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in matrix sum");
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in matrix difference");
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in matrix product");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Hermitian operator: observable, projector, effect or measurement operator.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::STANDARD.hermitian)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(HermitianOperator(matrix))
    }

    /// `(M + M†)/2`, Hermitian by construction.
    pub fn hermitian_part(matrix: &ComplexMatrix) -> Self {
        HermitianOperator((matrix + &matrix.adjoint()).scale(C64::new(0.5, 0.0)))
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let m = ComplexMatrix::from_fn(dim, |r, c| {
            if r == c {
                C64::new(values[r], 0.0)
            } else {
                ZERO
            }
        })?;
        Ok(HermitianOperator(m))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator(ComplexMatrix::zeros(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator(self.0.scale(C64::new(factor, 0.0)))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.0.check_dim(&other.0)?;
        Ok(HermitianOperator(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.0.check_dim(&other.0)?;
        Ok(HermitianOperator(&self.0 - &other.0))
    }

    /// `A²`.
    pub fn square(&self) -> Self {
        HermitianOperator(&self.0 * &self.0)
    }

    /// `B A B`, Hermitian whenever both factors are.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Result<Self> {
        self.0.check_dim(&outer.0)?;
        Ok(HermitianOperator::hermitian_part(
            &(&(&outer.0 * &self.0) * &outer.0),
        ))
    }

    /// `(AB + BA)/2`.
    pub fn jordan_product(&self, other: &HermitianOperator) -> Result<Self> {
        self.0.check_dim(&other.0)?;
        Ok(HermitianOperator::hermitian_part(&(&self.0 * &other.0)))
    }

    pub fn product(&self, other: &HermitianOperator) -> Result<ComplexMatrix> {
        self.0.check_dim(&other.0)?;
        Ok(&self.0 * &other.0)
    }

    pub fn commutator(&self, other: &HermitianOperator) -> Result<ComplexMatrix> {
        self.0.commutator(&other.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.0 .0.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Applies `f` to the spectrum: `Σ f(λ_k) |k⟩⟨k|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = self.0 .0.clone().symmetric_eigen();
        let mapped = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&l| C64::new(f(l), 0.0)),
        );
        let v = &eig.eigenvectors;
        let m = v * DMatrix::from_diagonal(&mapped) * v.adjoint();
        HermitianOperator::hermitian_part(&ComplexMatrix(m))
    }

    /// Principal square root of a positive semidefinite operator.
    pub fn sqrt_psd(&self) -> Self {
        self.map_spectrum(|l| l.max(0.0).sqrt())
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        HermitianOperator(ComplexMatrix(self.0 .0.kronecker(&other.0 .0)))
    }

    pub fn approx_eq(&self, other: &HermitianOperator, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Validates a simulated state against the standard tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let t = Tolerances::STANDARD;
        Self::validate(matrix, t.hermitian, t.equality, t.positivity)
    }

    /// Validates a reconstructed (tomographic) state. The matrix is
    /// symmetrised and renormalised; eigenvalues down to
    /// `-tol.measured_eigen_floor` are accepted and reported through
    /// [`DensityMatrix::min_eigenvalue`].
    pub fn from_measured(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol.measured_hermitian {
            return Err(Error::NotHermitian(defect));
        }
        let herm = HermitianOperator::hermitian_part(&matrix).0;
        let trace = herm.trace().re;
        if (trace - 1.0).abs() > tol.measured_trace {
            return Err(Error::InvalidTrace(trace));
        }
        let normalised = herm.scale(C64::new(1.0 / trace, 0.0));
        Self::validate(normalised, tol.hermitian, tol.equality, tol.measured_eigen_floor)
    }

    fn validate(matrix: ComplexMatrix, herm_tol: f64, trace_tol: f64, floor: f64) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > herm_tol {
            return Err(Error::NotHermitian(defect));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > trace_tol || trace.im.abs() > trace_tol {
            return Err(Error::InvalidTrace(trace.re));
        }
        let min_eigenvalue = HermitianOperator(matrix.clone())
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eigenvalue < -floor {
            return Err(Error::NotPositive(min_eigenvalue));
        }
        Ok(DensityMatrix {
            matrix,
            min_eigenvalue,
        })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) state vector.
    pub fn from_pure(state: &DVector<C64>) -> Result<Self> {
        let norm = state.norm();
        let normalised = state / C64::new(norm, 0.0);
        Self::new(ComplexMatrix::outer(&normalised)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
            min_eigenvalue: 1.0 / dim as f64,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Smallest eigenvalue found at validation time.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// True when validation accepted a negative eigenvalue below the
    /// simulated-state positivity tolerance.
    pub fn is_floored(&self) -> bool {
        self.min_eigenvalue < -Tolerances::STANDARD.positivity
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<Self> {
        let matrix = self.matrix.kron(&other.matrix)?;
        let min_eigenvalue = HermitianOperator(matrix.clone())
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        Ok(DensityMatrix {
            matrix,
            min_eigenvalue,
        })
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalised pure target.
    pub fn fidelity_with_pure(&self, target: &DVector<C64>) -> Result<f64> {
        if target.len() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), target.len()));
        }
        let t = target / C64::new(target.norm(), 0.0);
        Ok((t.adjoint() * self.matrix.inner() * &t)[(0, 0)].re)
    }
}

/// Single-qubit Pauli operators (and the identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

pub fn pauli(which: Pauli) -> HermitianOperator {
    let entries = match which {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    HermitianOperator(ComplexMatrix(DMatrix::from_row_slice(2, 2, &entries)))
}

/// Projector `(𝟙 ± G)/2` onto the `±1` eigenspace of an involutory observable.
pub fn eigenprojector(observable: &HermitianOperator, sign: f64) -> HermitianOperator {
    HermitianOperator::identity(observable.dim())
        .add(&observable.scale(sign))
        .expect("same dimension")
        .scale(0.5)
}

/// Kronecker product of two single-qubit operators, qubit `a` on the left.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch(a.dim(), 2));
    }
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch(b.dim(), 2));
    }
    Ok(a.kron(b))
}

/// `Tr[ρ M]` for an arbitrary matrix, keeping the imaginary part.
pub fn trace_with(matrix: &ComplexMatrix, rho: &DensityMatrix) -> Result<C64> {
    if matrix.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(matrix.dim(), rho.dim()));
    }
    Ok((rho.matrix.inner() * matrix.inner()).trace())
}

/// `⟨A⟩ = Tr[ρ A]`.
pub fn expectation(op: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    let value = trace_with(op.matrix(), rho)?;
    if value.im.abs() > Tolerances::STANDARD.equality {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}

/// `ΔG = (⟨G²⟩ - ⟨G⟩²)^{1/2}`.
pub fn spread(op: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    let mean = expectation(op, rho)?;
    let second = expectation(&op.square(), rho)?;
    std_from_moments(mean, second)
}

/// Standard deviation from first and second moments, clamping rounding noise.
pub(crate) fn std_from_moments(mean: f64, second: f64) -> Result<f64> {
    let variance = second - mean * mean;
    if variance < -Tolerances::STANDARD.variance {
        return Err(Error::NegativeVariance(variance));
    }
    Ok(variance.max(0.0).sqrt())
}

/// `c = |⟨[A, B]⟩|`; complementarity bounds are `c/2`.
pub fn commutator_bound(
    a: &HermitianOperator,
    b: &HermitianOperator,
    rho: &DensityMatrix,
) -> Result<f64> {
    let comm = a.commutator(b)?;
    Ok(trace_with(&comm, rho)?.norm())
}

/// Binary qubit observable `sinθ cosφ X + sinθ sinφ Y + cosθ Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochObservable {
    pub theta: f64,
    pub phi: f64,
}

impl BlochObservable {
    pub fn new(theta: f64, phi: f64) -> Self {
        BlochObservable { theta, phi }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        BlochObservable::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn as_operator(&self) -> HermitianOperator {
        let [nx, ny, nz] = self.bloch_vector();
        pauli(Pauli::X)
            .scale(nx)
            .add(&pauli(Pauli::Y).scale(ny))
            .and_then(|m| m.add(&pauli(Pauli::Z).scale(nz)))
            .expect("2x2 operands")
    }

    /// Projector onto outcome `w = sign`.
    pub fn projector(&self, sign: f64) -> HermitianOperator {
        eigenprojector(&self.as_operator(), sign)
    }
}
