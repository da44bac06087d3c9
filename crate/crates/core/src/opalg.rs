//! Finite-dimensional Hermitian operator algebra.
//!
//! Everything downstream works with `d x d` complex Hermitian matrices:
//! states, measurement effects, frame elements, and dual elements alike.
//! This module provides validated constructors for those carriers, the
//! Hilbert-Schmidt inner product, a fixed orthonormal Hermitian basis with
//! real vectorization, positive-cone projection, and seeded random sampling
//! of states and rank-1 projective measurements.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::tol;

/// A validated `d x d` complex Hermitian matrix, `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates that `entries` is square with `d >= 2` and Hermitian
    /// within an absolute entrywise tolerance.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        let mut max_asymmetry = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let delta = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                max_asymmetry = max_asymmetry.max(delta);
            }
        }
        if max_asymmetry > tol::HERM {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self { dim, entries })
    }

    /// Builds the Hermitian part `(m + m^dagger)/2` of an arbitrary square
    /// matrix. Used internally where floating-point round-off would
    /// otherwise accumulate asymmetry.
    pub fn hermitian_part(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let sym = (&m + m.adjoint()).scale(0.5);
        Self::new(sym)
    }

    /// The identity operator on dimension `d`.
    pub fn identity(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    /// The zero operator on dimension `d`.
    pub fn zero(d: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(d, d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Trace, which is real for Hermitian input.
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Entrywise scaling by a real factor, which preserves Hermiticity.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.scale(c),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Full eigendecomposition; eigenvalues are real and unsorted, with
    /// eigenvectors in matching columns.
    pub fn eigh(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        let eig = SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, 10_000)
            .ok_or(Error::EigensolverFailure)?;
        Ok((eig.eigenvalues, eig.eigenvectors))
    }

    /// Eigenvalues sorted in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _) = self.eigh()?;
        let mut v: Vec<f64> = vals.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        Ok(v)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Number of eigenvalues exceeding `rel_tol` times the largest
    /// absolute eigenvalue.
    pub fn rank(&self, rel_tol: f64) -> Result<usize> {
        let vals = self.eigenvalues()?;
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let cut = rel_tol * scale.max(1e-300);
        Ok(vals.iter().filter(|v| v.abs() > cut).count())
    }
}

/// Elementwise sums panic on dimension mismatch, mirroring the convention
/// of the underlying matrix library; validated entry points check
/// dimensions before arithmetic begins.
impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        HermitianOperator {
            dim: self.dim,
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        HermitianOperator {
            dim: self.dim,
            entries: &self.entries - &rhs.entries,
        }
    }
}

/// Sums a nonempty list of same-dimension operators.
pub fn sum_operators(ops: &[HermitianOperator]) -> Result<HermitianOperator> {
    let first = ops.first().ok_or_else(|| Error::ConfigInvalid {
        reason: "cannot sum an empty operator list".into(),
    })?;
    let mut acc = first.clone();
    for op in &ops[1..] {
        if op.dim() != acc.dim() {
            return Err(Error::DimensionMismatch {
                expected: acc.dim(),
                found: op.dim(),
            });
        }
        acc = &acc + op;
    }
    Ok(acc)
}

/// A positive unit-trace Hermitian operator: a quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol::ALG {
            return Err(Error::TraceMismatch {
                trace,
                expected: 1.0,
            });
        }
        let min_eigenvalue = op.min_eigenvalue()?;
        if min_eigenvalue < -tol::POS {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { op })
    }

    /// Projector onto the ray through `ket`, which is normalized first.
    pub fn pure(ket: &DVector<Complex64>) -> Result<Self> {
        let norm = ket.norm();
        if norm < 1e-12 {
            return Err(Error::ConfigInvalid {
                reason: "pure state requires a nonzero ket".into(),
            });
        }
        let unit = ket.unscale(norm);
        let proj = &unit * unit.adjoint();
        Self::new(HermitianOperator::hermitian_part(proj)?)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::new(HermitianOperator::identity(d)?.scaled(1.0 / d as f64))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }
}

/// A Hermitian operator with spectrum inside `[0, 1]`: a measurement effect.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    op: HermitianOperator,
}

impl Effect {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let eigs = op.eigenvalues()?;
        let min_eigenvalue = eigs[0];
        let max_eigenvalue = eigs[eigs.len() - 1];
        if min_eigenvalue < -tol::POS || max_eigenvalue > 1.0 + tol::POS {
            return Err(Error::EffectOutOfRange {
                min_eigenvalue,
                max_eigenvalue,
            });
        }
        Ok(Self { op })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(HermitianOperator::identity(d)?)
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::new(HermitianOperator::zero(d)?)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// A nonempty list of effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    outcomes: Vec<Effect>,
}

impl Povm {
    pub fn new(outcomes: Vec<Effect>) -> Result<Self> {
        let first = outcomes.first().ok_or(Error::EmptyPovm)?;
        let d = first.dim();
        for e in &outcomes {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
        }
        let ops: Vec<HermitianOperator> = outcomes.iter().map(|e| e.op().clone()).collect();
        let total = sum_operators(&ops)?;
        let defect = &total - &HermitianOperator::identity(d)?;
        let residual = defect.max_abs_entry();
        if residual > tol::ALG {
            return Err(Error::SumMismatch { residual });
        }
        Ok(Self { outcomes })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(d: usize) -> Result<Self> {
        Self::new(vec![Effect::identity(d)?])
    }

    /// Projectors onto the standard basis vectors.
    pub fn computational(d: usize) -> Result<Self> {
        let mut outcomes = Vec::with_capacity(d);
        for k in 0..d {
            let mut m = DMatrix::zeros(d, d);
            m[(k, k)] = Complex64::new(1.0, 0.0);
            outcomes.push(Effect::new(HermitianOperator::new(m)?)?);
        }
        Self::new(outcomes)
    }

    /// Projectors onto the discrete Fourier basis. At `d = 2` these are
    /// the projectors onto `|+>` and `|->`.
    pub fn fourier(d: usize) -> Result<Self> {
        let scale = 1.0 / (d as f64).sqrt();
        let mut outcomes = Vec::with_capacity(d);
        for k in 0..d {
            let ket = DVector::from_fn(d, |u, _| {
                let phase = 2.0 * std::f64::consts::PI * (k * u) as f64 / d as f64;
                Complex64::from_polar(scale, phase)
            });
            let proj = &ket * ket.adjoint();
            outcomes.push(Effect::new(HermitianOperator::hermitian_part(proj)?)?);
        }
        Self::new(outcomes)
    }

    pub fn outcomes(&self) -> &[Effect] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].dim()
    }
}

/// An ordered orthonormal basis of `d^2` Hermitian operators, with the
/// normalized identity in position zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HermBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl HermBasis {
    /// Validates pairwise Hilbert-Schmidt orthonormality and that the
    /// leading element is `I/sqrt(d)`.
    pub fn new(dim: usize, elements: Vec<HermitianOperator>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim });
        }
        if elements.len() != dim * dim {
            return Err(Error::LengthMismatch {
                left: elements.len(),
                right: dim * dim,
            });
        }
        let mut max_deviation = 0.0f64;
        for (i, a) in elements.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            for (j, b) in elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (hs_inner(a, b)? - target).abs();
                max_deviation = max_deviation.max(dev);
            }
        }
        if max_deviation > tol::ALG {
            return Err(Error::BasisNotOrthonormal { max_deviation });
        }
        let scaled_identity = HermitianOperator::identity(dim)?.scaled(1.0 / (dim as f64).sqrt());
        let lead_defect = (&elements[0] - &scaled_identity).max_abs_entry();
        if lead_defect > tol::ALG {
            return Err(Error::BasisNotOrthonormal {
                max_deviation: lead_defect,
            });
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Nonnegative mixture weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    weights: Vec<f64>,
}

impl MixtureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadWeights {
                reason: "weight list is empty".into(),
            });
        }
        for (i, w) in weights.iter().enumerate() {
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::BadWeights {
                    reason: format!("weight {i} is {w}, need nonnegative"),
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol::ALG {
            return Err(Error::BadWeights {
                reason: format!("weights sum to {sum:.12}, need 1"),
            });
        }
        Ok(Self { weights })
    }

    /// Uniform weights over `n` components.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n.max(1)])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// The Pauli X operator on a qubit.
pub fn pauli_x() -> HermitianOperator {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    HermitianOperator::new(m).expect("Pauli X is Hermitian")
}

/// The Pauli Y operator on a qubit.
pub fn pauli_y() -> HermitianOperator {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    HermitianOperator::new(m).expect("Pauli Y is Hermitian")
}

/// The Pauli Z operator on a qubit.
pub fn pauli_z() -> HermitianOperator {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ],
    );
    HermitianOperator::new(m).expect("Pauli Z is Hermitian")
}

/// Qubit state with the given Bloch vector, `(I + x X + y Y + z Z)/2`.
/// Vectors of length greater than one fail the positivity check.
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityOperator> {
    let mut m = HermitianOperator::identity(2)?;
    m = &m + &pauli_x().scaled(x);
    m = &m + &pauli_y().scaled(y);
    m = &m + &pauli_z().scaled(z);
    DensityOperator::new(m.scaled(0.5))
}

/// Hilbert-Schmidt inner product `Tr[a b]` including its residual
/// imaginary part, which is bounded by round-off for Hermitian inputs.
pub fn hs_inner_full(a: &HermitianOperator, b: &HermitianOperator) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.matrix()[(i, j)] * b.matrix()[(j, i)];
        }
    }
    Ok(acc)
}

/// Hilbert-Schmidt inner product `Tr[a b]`, real for Hermitian inputs.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(hs_inner_full(a, b)?.re)
}

/// The generalized Gell-Mann orthonormal basis for dimension `d`, in a
/// fixed order: `I/sqrt(d)` first, then symmetric off-diagonal elements
/// `(E_jk + E_kj)/sqrt(2)` for `j < k` in lexicographic order, then the
/// antisymmetric counterparts `(-i E_jk + i E_kj)/sqrt(2)`, then the
/// diagonal elements `(sum_{m<l} E_mm - l E_ll)/sqrt(l(l+1))` for
/// `l = 1..d-1`.
pub fn herm_basis(d: usize) -> Result<HermBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    let mut elements = Vec::with_capacity(d * d);
    let root_d = (d as f64).sqrt();
    elements.push(HermitianOperator::identity(d)?.scaled(1.0 / root_d));
    let inv_root2 = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = DMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(inv_root2, 0.0);
            m[(k, j)] = Complex64::new(inv_root2, 0.0);
            elements.push(HermitianOperator::new(m)?);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = DMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(0.0, -inv_root2);
            m[(k, j)] = Complex64::new(0.0, inv_root2);
            elements.push(HermitianOperator::new(m)?);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        elements.push(HermitianOperator::new(m)?);
    }
    HermBasis::new(d, elements)
}

/// Coordinates of `a` in the given basis: component `i` is
/// `hs_inner(basis[i], a)`.
pub fn vectorize(a: &HermitianOperator, basis: &HermBasis) -> Result<DVector<f64>> {
    if a.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: a.dim(),
        });
    }
    let mut v = DVector::zeros(basis.len());
    for (i, b) in basis.elements().iter().enumerate() {
        v[i] = hs_inner(b, a)?;
    }
    Ok(v)
}

/// Inverse of [`vectorize`]: rebuilds the operator from its coordinates.
pub fn devectorize(v: &DVector<f64>, basis: &HermBasis) -> Result<HermitianOperator> {
    if v.len() != basis.len() {
        return Err(Error::LengthMismatch {
            left: v.len(),
            right: basis.len(),
        });
    }
    let d = basis.dim();
    let mut m = DMatrix::zeros(d, d);
    for (i, b) in basis.elements().iter().enumerate() {
        m += b.matrix().scale(v[i]);
    }
    HermitianOperator::hermitian_part(m)
}

/// Hilbert-Schmidt-nearest positive semidefinite operator: clips negative
/// eigenvalues to zero and reassembles.
pub fn project_positive(a: &HermitianOperator) -> Result<HermitianOperator> {
    let (vals, vecs) = a.eigh()?;
    let d = a.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        let lam = vals[i].max(0.0);
        if lam > 0.0 {
            let col = vecs.column(i);
            m += (&col * col.adjoint()).scale(lam);
        }
    }
    HermitianOperator::hermitian_part(m)
}

/// A `d x d` matrix of independent standard complex Gaussian entries.
fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Random density operator `G G^dagger / Tr[G G^dagger]` for a Gaussian
/// matrix `G`, drawn from the given generator.
pub fn random_state_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityOperator> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    let g = gaussian_matrix(d, rng);
    let gram = &g * g.adjoint();
    let trace = gram.trace().re;
    DensityOperator::new(HermitianOperator::hermitian_part(gram)?.scaled(1.0 / trace))
}

/// Seeded variant of [`random_state_with_rng`]; the same seed always
/// yields the same state.
pub fn random_state(d: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with_rng(d, &mut rng)
}

/// Random Hermitian operator `(G + G^dagger)/2` for a Gaussian `G`.
pub fn random_hermitian_with_rng<R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> Result<HermitianOperator> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    HermitianOperator::hermitian_part(gaussian_matrix(d, rng))
}

/// Seeded variant of [`random_hermitian_with_rng`].
pub fn random_hermitian(d: usize, seed: u64) -> Result<HermitianOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hermitian_with_rng(d, &mut rng)
}

/// Random rank-1 projective measurement: projectors onto the orthonormal
/// columns of the unitary QR factor of a Gaussian matrix.
pub fn random_rank1_pvm_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Povm> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    let g = gaussian_matrix(d, rng);
    let q = g.qr().q();
    let mut outcomes = Vec::with_capacity(d);
    for k in 0..d {
        let col = q.column(k);
        let proj = &col * col.adjoint();
        outcomes.push(Effect::new(HermitianOperator::hermitian_part(proj)?)?);
    }
    Povm::new(outcomes)
}

/// Seeded variant of [`random_rank1_pvm_with_rng`].
pub fn random_rank1_pvm(d: usize, seed: u64) -> Result<Povm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_rank1_pvm_with_rng(d, &mut rng)
}
