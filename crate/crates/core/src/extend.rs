//! Convex-linear extension of sampled functionals and recovery of their
//! representing operators.
//!
//! Given values of an unknown functional on a family of Hermitian
//! operators that spans operator space, any target operator can be
//! decomposed over the samples and the functional extended linearly. When
//! the sampled values really are linear, every decomposition yields the
//! same extension; the spread across decompositions quantifies failures.
//! The representing operator `B` with `f(A) = Tr[A B]` is recovered by a
//! least-squares solve in the same coordinates.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::opalg::{devectorize, herm_basis, hs_inner, vectorize, HermitianOperator};
use crate::tol;

/// Sampled functional values `f(R_k)` on a family of Hermitian operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSample {
    operators: Vec<HermitianOperator>,
    values: Vec<f64>,
}

impl ConvexSample {
    pub fn new(operators: Vec<HermitianOperator>, values: Vec<f64>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::ConfigInvalid {
                reason: "sample set is empty".into(),
            });
        }
        if operators.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: operators.len(),
                right: values.len(),
            });
        }
        let dim = operators[0].dim();
        for op in &operators {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::ConfigInvalid {
                reason: format!("sampled value {bad} is not finite"),
            });
        }
        Ok(Self { operators, values })
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

/// The Hermitian operator representing a linear functional through the
/// Hilbert-Schmidt inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctionalOperator {
    b: HermitianOperator,
}

impl LinearFunctionalOperator {
    pub fn new(b: HermitianOperator) -> Self {
        Self { b }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.b
    }

    /// Evaluates the functional: `f(a) = Tr[a B]`.
    pub fn evaluate(&self, a: &HermitianOperator) -> Result<f64> {
        hs_inner(a, &self.b)
    }
}

/// Sample operators in basis coordinates, with the eigendecomposition of
/// their Gram matrix shared by every solve.
struct SampleCoords {
    columns: DMatrix<f64>,
    values: DVector<f64>,
    gram_eigvals: DVector<f64>,
    gram_eigvecs: DMatrix<f64>,
    rank: usize,
    cut: f64,
}

impl SampleCoords {
    fn build(samples: &ConvexSample) -> Result<Self> {
        let d = samples.dim();
        let basis = herm_basis(d)?;
        let n = basis.len();
        let k = samples.len();
        let mut columns = DMatrix::zeros(n, k);
        for (j, op) in samples.operators().iter().enumerate() {
            columns.set_column(j, &vectorize(op, &basis)?);
        }
        let gram = columns.transpose() * &columns;
        let eig = SymmetricEigen::try_new(gram, f64::EPSILON, 10_000)
            .ok_or(Error::EigensolverFailure)?;
        let largest = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let cut = tol::RANK_REL * largest.max(1e-300);
        let rank = eig.eigenvalues.iter().filter(|&&v| v > cut).count();
        Ok(Self {
            columns,
            values: DVector::from_column_slice(samples.values()),
            gram_eigvals: eig.eigenvalues,
            gram_eigvecs: eig.eigenvectors,
            rank,
            cut,
        })
    }

    fn require_span(&self, needed: usize) -> Result<()> {
        if self.rank < needed {
            return Err(Error::RankDeficientSamples {
                rank: self.rank,
                needed,
            });
        }
        Ok(())
    }

    /// Applies the Gram pseudoinverse, dropping null modes.
    fn gram_pinv(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut coords = self.gram_eigvecs.transpose() * v;
        for i in 0..coords.len() {
            if self.gram_eigvals[i] > self.cut {
                coords[i] /= self.gram_eigvals[i];
            } else {
                coords[i] = 0.0;
            }
        }
        &self.gram_eigvecs * coords
    }

    /// Minimum-norm coefficients solving `sum_k c_k v(R_k) = target`.
    fn decompose(&self, target: &DVector<f64>) -> Result<DVector<f64>> {
        let c = self.gram_pinv(&(self.columns.transpose() * target));
        let residual = (&self.columns * &c - target)
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        if residual > tol::ALG {
            return Err(Error::RankDeficientSamples {
                rank: self.rank,
                needed: target.len(),
            });
        }
        Ok(c)
    }

    /// Least-squares coordinates of the representing operator, with the
    /// worst-case misfit to the sampled values.
    fn functional_coords(&self) -> (DVector<f64>, f64) {
        let b = &self.columns * self.gram_pinv(&self.values);
        let misfit = (self.columns.transpose() * &b - &self.values)
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        (b, misfit)
    }

    /// Orthonormal basis of the null space of the coefficient map.
    fn null_basis(&self) -> Vec<DVector<f64>> {
        let mut basis = Vec::new();
        for i in 0..self.gram_eigvals.len() {
            if self.gram_eigvals[i] <= self.cut {
                basis.push(self.gram_eigvecs.column(i).into_owned());
            }
        }
        basis
    }
}

/// Extends the sampled functional linearly and evaluates it on `a`: finds
/// coefficients with `a = sum_k c_k R_k` and returns `sum_k c_k f(R_k)`.
/// The samples must span operator space and be consistent with some
/// linear functional.
pub fn extend_convex_linear(samples: &ConvexSample, a: &HermitianOperator) -> Result<f64> {
    let d = samples.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.dim(),
        });
    }
    let coords = SampleCoords::build(samples)?;
    coords.require_span(d * d)?;
    let (_, misfit) = coords.functional_coords();
    if misfit > tol::FIT {
        return Err(Error::InconsistentSamples { residual: misfit });
    }
    let basis = herm_basis(d)?;
    let c = coords.decompose(&vectorize(a, &basis)?)?;
    Ok(c.dot(&coords.values))
}

/// Measures how much the extended value of `a` can vary across different
/// decompositions of `a` over the samples. The first decomposition is the
/// minimum-norm one; the rest perturb it along the null space of the
/// coefficient map with uniform coefficients in `[-1, 1]`. Consistent
/// samples give zero spread up to round-off; corrupted values show up as
/// a large spread.
pub fn uniqueness_check(
    samples: &ConvexSample,
    a: &HermitianOperator,
    n_decompositions: usize,
    seed: u64,
) -> Result<f64> {
    let d = samples.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.dim(),
        });
    }
    if n_decompositions == 0 {
        return Err(Error::ConfigInvalid {
            reason: "need at least one decomposition".into(),
        });
    }
    if samples.len() <= d * d {
        return Err(Error::ConfigInvalid {
            reason: format!(
                "uniqueness check needs more than {} samples, got {}",
                d * d,
                samples.len()
            ),
        });
    }
    let coords = SampleCoords::build(samples)?;
    coords.require_span(d * d)?;
    let basis = herm_basis(d)?;
    let c0 = coords.decompose(&vectorize(a, &basis)?)?;
    let null = coords.null_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n_decompositions {
        let mut c = c0.clone();
        if i > 0 {
            for z in &null {
                let eta: f64 = rng.random_range(-1.0..=1.0);
                c += z.scale(eta);
            }
        }
        let value = c.dot(&coords.values);
        lo = lo.min(value);
        hi = hi.max(value);
    }
    Ok(hi - lo)
}

/// Recovers the Hermitian operator `B` with `f(R_k) = Tr[R_k B]` for all
/// samples, in least squares. Thereafter `f(a) = Tr[a B]` evaluates the
/// functional anywhere.
pub fn riesz_operator(samples: &ConvexSample) -> Result<LinearFunctionalOperator> {
    let d = samples.dim();
    let coords = SampleCoords::build(samples)?;
    coords.require_span(d * d)?;
    let (b, misfit) = coords.functional_coords();
    if misfit > tol::FIT {
        return Err(Error::InconsistentSamples { residual: misfit });
    }
    let basis = herm_basis(d)?;
    Ok(LinearFunctionalOperator::new(devectorize(&b, &basis)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{pauli_x, pauli_y, pauli_z, random_hermitian, HermitianOperator};
    use approx::assert_abs_diff_eq;

    fn sic_projectors() -> Vec<HermitianOperator> {
        let frame = crate::frames::sic_qubit_frame().unwrap();
        frame.ops().iter().map(|f| f.scaled(2.0)).collect()
    }

    #[test]
    fn trace_functional_extends_from_sic_projectors() {
        let projectors = sic_projectors();
        let samples = ConvexSample::new(projectors, vec![1.0; 4]).unwrap();
        for seed in 0..10 {
            let a = random_hermitian(2, seed).unwrap();
            let value = extend_convex_linear(&samples, &a).unwrap();
            assert_abs_diff_eq!(value, a.trace(), epsilon = 1e-10);
        }
    }

    #[test]
    fn sampled_operator_returns_its_own_value() {
        let projectors = sic_projectors();
        let a = projectors[2].clone();
        let samples = ConvexSample::new(projectors, vec![1.0; 4]).unwrap();
        assert_abs_diff_eq!(
            extend_convex_linear(&samples, &a).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn diagonal_samples_cannot_reach_pauli_x() {
        let e00 = crate::frames::diagonal_frame(2).unwrap().0.op(0).clone();
        let e11 = crate::frames::diagonal_frame(2).unwrap().0.op(1).clone();
        let samples = ConvexSample::new(vec![e00, e11], vec![0.3, 0.7]).unwrap();
        assert!(matches!(
            extend_convex_linear(&samples, &pauli_x()),
            Err(Error::RankDeficientSamples { rank: 2, needed: 4 })
        ));
    }

    fn overcomplete_linear_samples(b0: &HermitianOperator) -> ConvexSample {
        let mut ops = sic_projectors();
        ops.push(pauli_x());
        ops.push((&pauli_y() + &pauli_z()).scaled(0.5));
        let values = ops.iter().map(|r| hs_inner(r, b0).unwrap()).collect();
        ConvexSample::new(ops, values).unwrap()
    }

    #[test]
    fn consistent_samples_have_negligible_spread() {
        let b0 = random_hermitian(2, 42).unwrap();
        let samples = overcomplete_linear_samples(&b0);
        let a = random_hermitian(2, 43).unwrap();
        let spread = uniqueness_check(&samples, &a, 10, 5).unwrap();
        assert!(spread < 1e-10, "spread {spread}");
    }

    #[test]
    fn corrupted_sample_value_breaks_uniqueness() {
        let b0 = random_hermitian(2, 42).unwrap();
        let clean = overcomplete_linear_samples(&b0);
        let mut values = clean.values().to_vec();
        values[1] += 0.1;
        let corrupted = ConvexSample::new(clean.operators().to_vec(), values).unwrap();
        let a = random_hermitian(2, 43).unwrap();
        let spread = uniqueness_check(&corrupted, &a, 10, 5).unwrap();
        assert!(spread > 0.01, "spread {spread}");
    }

    #[test]
    fn single_decomposition_has_zero_spread() {
        let b0 = random_hermitian(2, 42).unwrap();
        let samples = overcomplete_linear_samples(&b0);
        let a = random_hermitian(2, 43).unwrap();
        assert_eq!(uniqueness_check(&samples, &a, 1, 5).unwrap(), 0.0);
    }

    #[test]
    fn uniqueness_check_requires_overcompleteness() {
        let samples = ConvexSample::new(sic_projectors(), vec![1.0; 4]).unwrap();
        let a = random_hermitian(2, 1).unwrap();
        assert!(matches!(
            uniqueness_check(&samples, &a, 10, 5),
            Err(Error::ConfigInvalid { .. })
        ));
    }

    #[test]
    fn riesz_recovers_pauli_z_from_pauli_samples() {
        let basis = crate::opalg::herm_basis(2).unwrap();
        let ops: Vec<HermitianOperator> = basis.elements().to_vec();
        let values = ops
            .iter()
            .map(|r| hs_inner(r, &pauli_z()).unwrap())
            .collect();
        let samples = ConvexSample::new(ops, values).unwrap();
        let b = riesz_operator(&samples).unwrap();
        assert!((b.op() - &pauli_z()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn riesz_recovers_scaled_identity_from_sic_samples() {
        let projectors = sic_projectors();
        let values = projectors.iter().map(|p| p.trace() / 2.0).collect();
        let samples = ConvexSample::new(projectors, values).unwrap();
        let b = riesz_operator(&samples).unwrap();
        let expected = HermitianOperator::identity(2).unwrap().scaled(0.5);
        assert!((b.op() - &expected).max_abs_entry() < 1e-10);
    }

    #[test]
    fn riesz_of_zero_functional_is_zero_operator() {
        let samples = ConvexSample::new(sic_projectors(), vec![0.0; 4]).unwrap();
        let b = riesz_operator(&samples).unwrap();
        assert!(b.op().max_abs_entry() < 1e-12);
    }

    #[test]
    fn inconsistent_values_are_rejected() {
        let b0 = random_hermitian(2, 9).unwrap();
        let clean = overcomplete_linear_samples(&b0);
        let mut values = clean.values().to_vec();
        values[0] += 0.5;
        let corrupted = ConvexSample::new(clean.operators().to_vec(), values).unwrap();
        assert!(matches!(
            riesz_operator(&corrupted),
            Err(Error::InconsistentSamples { .. })
        ));
        let a = random_hermitian(2, 10).unwrap();
        assert!(matches!(
            extend_convex_linear(&corrupted, &a),
            Err(Error::InconsistentSamples { .. })
        ));
    }

    #[test]
    fn riesz_agrees_with_direct_extension() {
        let b0 = random_hermitian(2, 17).unwrap();
        let samples = overcomplete_linear_samples(&b0);
        let b = riesz_operator(&samples).unwrap();
        for seed in 0..20 {
            let a = random_hermitian(2, 1000 + seed).unwrap();
            let via_extension = extend_convex_linear(&samples, &a).unwrap();
            let via_operator = b.evaluate(&a).unwrap();
            assert_abs_diff_eq!(via_extension, via_operator, epsilon = 1e-8);
        }
    }
}
