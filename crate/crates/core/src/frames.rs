//! Ontic spaces, operator frames, dual frames, the frame operator, and
//! canonical dual construction, plus built-in frame families.
//!
//! A frame `{F(lambda)}` is a finite family of Hermitian operators summing
//! to the identity; a dual family `{sigma(lambda)}` consists of unit-trace
//! Hermitian operators. The two are exact duals when
//! `sum_lambda |sigma_lambda>><<F_lambda| = I` on operator space, which is
//! precisely the condition for the induced quasiprobability representation
//! to reproduce the Born rule.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::opalg::{
    herm_basis, pauli_x, pauli_y, pauli_z, sum_operators, vectorize, HermBasis, HermitianOperator,
};
use crate::tol;

/// A finite set of ontic states, identified by unique opaque labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnticSpace {
    labels: Vec<String>,
}

impl OnticSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() || labels.iter().any(|l| l.is_empty()) {
            return Err(Error::BadOnticSpace);
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::BadOnticSpace);
            }
        }
        Ok(Self { labels })
    }

    /// Labels `"0"` through `"n-1"`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    /// Labels `"(q,p)"` on a `d x d` grid, `q`-major.
    pub fn phase_grid(d: usize) -> Result<Self> {
        let mut labels = Vec::with_capacity(d * d);
        for q in 0..d {
            for p in 0..d {
                labels.push(format!("({q},{p})"));
            }
        }
        Self::new(labels)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
}

fn check_same_space(a: &OnticSpace, b: &OnticSpace) -> Result<()> {
    if a != b {
        return Err(Error::OnticSpaceMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    Ok(())
}

fn check_op_family(space: &OnticSpace, ops: &[HermitianOperator]) -> Result<usize> {
    if ops.len() != space.size() {
        return Err(Error::LengthMismatch {
            left: ops.len(),
            right: space.size(),
        });
    }
    let dim = ops[0].dim();
    for op in ops {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
    }
    Ok(dim)
}

/// An operator frame: one Hermitian operator per ontic state, summing to
/// the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    space: OnticSpace,
    ops: Vec<HermitianOperator>,
    dim: usize,
}

impl Frame {
    pub fn new(space: OnticSpace, ops: Vec<HermitianOperator>) -> Result<Self> {
        let dim = check_op_family(&space, &ops)?;
        let total = sum_operators(&ops)?;
        let defect = &total - &HermitianOperator::identity(dim)?;
        let residual = defect.max_abs_entry();
        if residual > tol::ALG {
            return Err(Error::SumMismatch { residual });
        }
        Ok(Self { space, ops, dim })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &HermitianOperator {
        &self.ops[i]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// A dual family: one unit-trace Hermitian operator per ontic state.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFrame {
    space: OnticSpace,
    ops: Vec<HermitianOperator>,
    dim: usize,
}

impl DualFrame {
    pub fn new(space: OnticSpace, ops: Vec<HermitianOperator>) -> Result<Self> {
        let dim = check_op_family(&space, &ops)?;
        for (i, op) in ops.iter().enumerate() {
            let trace = op.trace();
            if (trace - 1.0).abs() > tol::ALG {
                return Err(Error::DualTraceViolation {
                    label: space.label(i).to_string(),
                    trace,
                });
            }
        }
        Ok(Self { space, ops, dim })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &HermitianOperator {
        &self.ops[i]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// The Gram operator `S = sum_lambda v_lambda v_lambda^T` of a frame in
/// orthonormal Hermitian-basis coordinates, kept with its spectral data.
#[derive(Debug, Clone)]
pub struct FrameOperator {
    matrix: DMatrix<f64>,
    rank: usize,
    sorted_eigenvalues: Vec<f64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
    rank_cut: f64,
}

impl FrameOperator {
    fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let sym = (&matrix + matrix.transpose()).scale(0.5);
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
            .ok_or(Error::EigensolverFailure)?;
        let mut sorted_eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        sorted_eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let largest = sorted_eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let smallest = sorted_eigenvalues.first().copied().unwrap_or(0.0);
        if smallest < -tol::POS * largest.max(1.0) {
            return Err(Error::NotPositive {
                min_eigenvalue: smallest,
            });
        }
        let rank_cut = tol::RANK_REL * largest;
        let rank = eig.eigenvalues.iter().filter(|&&v| v > rank_cut).count();
        Ok(Self {
            matrix,
            rank,
            sorted_eigenvalues,
            eigvals: eig.eigenvalues,
            eigvecs: eig.eigenvectors,
            rank_cut,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.sorted_eigenvalues
    }

    /// Applies the pseudoinverse of `S`, dropping modes below the rank
    /// cutoff.
    fn apply_pinv(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut coords = self.eigvecs.transpose() * v;
        for i in 0..coords.len() {
            if self.eigvals[i] > self.rank_cut {
                coords[i] /= self.eigvals[i];
            } else {
                coords[i] = 0.0;
            }
        }
        &self.eigvecs * coords
    }
}

/// Frame operator in the standard Hermitian basis for the frame's
/// dimension, together with its numerical rank.
pub fn frame_operator(f: &Frame) -> Result<FrameOperator> {
    let basis = herm_basis(f.dim())?;
    frame_operator_in(f, &basis)
}

/// Frame operator in caller-supplied coordinates; the spectrum is
/// independent of the basis choice.
pub fn frame_operator_in(f: &Frame, basis: &HermBasis) -> Result<FrameOperator> {
    if basis.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: basis.dim(),
        });
    }
    let n = basis.len();
    let mut s = DMatrix::zeros(n, n);
    for op in f.ops() {
        let v = vectorize(op, basis)?;
        s += &v * v.transpose();
    }
    FrameOperator::from_matrix(s)
}

/// Canonical dual elements `sigma_lambda = devectorize(S^{-1} v_lambda)`
/// without the unit-trace validation of [`DualFrame`]. The frame must be
/// informationally complete.
pub fn canonical_dual_ops(f: &Frame) -> Result<Vec<HermitianOperator>> {
    let basis = herm_basis(f.dim())?;
    let s = frame_operator_in(f, &basis)?;
    let needed = f.dim() * f.dim();
    if s.rank() < needed {
        return Err(Error::RankDeficientFrame {
            rank: s.rank(),
            needed,
        });
    }
    let mut duals = Vec::with_capacity(f.len());
    for op in f.ops() {
        let v = vectorize(op, &basis)?;
        let w = s.apply_pinv(&v);
        duals.push(crate::opalg::devectorize(&w, &basis)?);
    }
    Ok(duals)
}

/// Canonical dual frame of an informationally complete frame, validated
/// for exact duality and unit traces.
pub fn canonical_dual(f: &Frame) -> Result<DualFrame> {
    let ops = canonical_dual_ops(f)?;
    for (i, op) in ops.iter().enumerate() {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol::ALG {
            return Err(Error::DualTraceViolation {
                label: f.space().label(i).to_string(),
                trace,
            });
        }
    }
    let dual = DualFrame::new(f.space().clone(), ops)?;
    let residual = verify_duality(f, &dual)?;
    if residual > tol::DUAL {
        return Err(Error::SumMismatch { residual });
    }
    Ok(dual)
}

/// Duality defect of raw operator families in the given coordinates:
/// the maximum absolute entry of
/// `sum_lambda v(sigma_lambda) v(F_lambda)^T - I`.
pub fn duality_residual_ops(
    f_ops: &[HermitianOperator],
    g_ops: &[HermitianOperator],
    basis: &HermBasis,
) -> Result<f64> {
    if f_ops.len() != g_ops.len() {
        return Err(Error::LengthMismatch {
            left: f_ops.len(),
            right: g_ops.len(),
        });
    }
    let n = basis.len();
    let mut m = DMatrix::<f64>::identity(n, n).scale(-1.0);
    for (f, g) in f_ops.iter().zip(g_ops.iter()) {
        let vf = vectorize(f, basis)?;
        let vg = vectorize(g, basis)?;
        m += &vg * vf.transpose();
    }
    Ok(m.iter().map(|x| x.abs()).fold(0.0, f64::max))
}

/// Duality defect of a frame and a candidate dual: zero exactly when the
/// pair reproduces the Born rule for every state and effect.
pub fn verify_duality(f: &Frame, g: &DualFrame) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    check_same_space(f.space(), g.space())?;
    let basis = herm_basis(f.dim())?;
    duality_residual_ops(f.ops(), g.ops(), &basis)
}

fn is_odd_prime(d: usize) -> bool {
    if d < 3 || d % 2 == 0 {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

fn qubit_phase_point(q: usize, p: usize) -> HermitianOperator {
    let sz = if q % 2 == 0 { 1.0 } else { -1.0 };
    let sx = if p % 2 == 0 { 1.0 } else { -1.0 };
    let sy = if (q + p) % 2 == 0 { 1.0 } else { -1.0 };
    let mut a = HermitianOperator::identity(2).expect("dimension 2 is valid");
    a = &a + &pauli_z().scaled(sz);
    a = &a + &pauli_x().scaled(sx);
    a = &a + &pauli_y().scaled(sy);
    a.scaled(0.5)
}

fn odd_prime_phase_points(d: usize) -> Result<Vec<HermitianOperator>> {
    let mut parity = DMatrix::<Complex64>::zeros(d, d);
    for u in 0..d {
        parity[((d - u) % d, u)] = Complex64::new(1.0, 0.0);
    }
    let mut shift = DMatrix::<Complex64>::zeros(d, d);
    for u in 0..d {
        shift[((u + 1) % d, u)] = Complex64::new(1.0, 0.0);
    }
    let clock = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / d as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut points = Vec::with_capacity(d * d);
    let mut x_pow = DMatrix::<Complex64>::identity(d, d);
    for _q in 0..d {
        let mut t = x_pow.clone();
        for _p in 0..d {
            let a = &t * &parity * t.adjoint();
            points.push(HermitianOperator::hermitian_part(a)?);
            t *= &clock;
        }
        x_pow *= &shift;
    }
    Ok(points)
}

/// Discrete Wigner frame and dual on a `d x d` phase grid, for `d = 2`
/// or `d` an odd prime. Phase-point operators `A(q,p)` give
/// `F(lambda) = A(lambda)/d` and `sigma(lambda) = A(lambda)`; the
/// translation convention is `X^q Z^p` applied to the parity operator,
/// with `X` the cyclic shift and `Z` the clock matrix. Exact duality of
/// the returned pair is the convention-independent check.
pub fn wootters_frame(d: usize) -> Result<(Frame, DualFrame)> {
    let points = if d == 2 {
        let mut pts = Vec::with_capacity(4);
        for q in 0..2 {
            for p in 0..2 {
                pts.push(qubit_phase_point(q, p));
            }
        }
        pts
    } else if is_odd_prime(d) {
        odd_prime_phase_points(d)?
    } else {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "discrete Wigner construction needs d = 2 or an odd prime".into(),
        });
    };
    let space = OnticSpace::phase_grid(d)?;
    let f_ops: Vec<HermitianOperator> = points.iter().map(|a| a.scaled(1.0 / d as f64)).collect();
    let frame = Frame::new(space.clone(), f_ops)?;
    let dual = DualFrame::new(space, points)?;
    Ok((frame, dual))
}

/// Positive informationally complete qubit frame built from the
/// tetrahedral projectors: `F_k = Pi_k / 2` with Bloch vectors
/// `(1,1,1)/sqrt(3)`, `(1,-1,-1)/sqrt(3)`, `(-1,1,-1)/sqrt(3)`,
/// `(-1,-1,1)/sqrt(3)`.
pub fn sic_qubit_frame() -> Result<Frame> {
    let s = 1.0 / 3.0f64.sqrt();
    let dirs = [
        (s, s, s),
        (s, -s, -s),
        (-s, s, -s),
        (-s, -s, s),
    ];
    let mut ops = Vec::with_capacity(4);
    for (x, y, z) in dirs {
        let mut proj = HermitianOperator::identity(2)?;
        proj = &proj + &pauli_x().scaled(x);
        proj = &proj + &pauli_y().scaled(y);
        proj = &proj + &pauli_z().scaled(z);
        ops.push(proj.scaled(0.25));
    }
    Frame::new(OnticSpace::indexed(4)?, ops)
}

/// Rank-deficient classical pair: `F(lambda) = sigma(lambda) =
/// |lambda><lambda|` in the computational basis. Both families are
/// positive; duality holds only on the diagonal operator subspace.
pub fn diagonal_frame(d: usize) -> Result<(Frame, DualFrame)> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    let mut ops = Vec::with_capacity(d);
    for k in 0..d {
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        ops.push(HermitianOperator::new(m)?);
    }
    let space = OnticSpace::indexed(d)?;
    let frame = Frame::new(space.clone(), ops.clone())?;
    let dual = DualFrame::new(space, ops)?;
    Ok((frame, dual))
}

/// Random frame of `n` positive operators: draws Wishart-type positive
/// operators `W_lambda` and symmetrically renormalizes by
/// `T^{-1/2} W_lambda T^{-1/2}` with `T = sum W_lambda`, so the family
/// sums to the identity while staying positive.
pub fn random_positive_frame_with_rng<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<Frame> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    if n == 0 {
        return Err(Error::ConfigInvalid {
            reason: "frame needs at least one element".into(),
        });
    }
    let mut wisharts = Vec::with_capacity(n);
    for _ in 0..n {
        let rho = crate::opalg::random_state_with_rng(d, rng)?;
        wisharts.push(rho.into_op());
    }
    let total = sum_operators(&wisharts)?;
    let inv_root = invsqrt_psd(&total)?;
    let mut ops = Vec::with_capacity(n);
    for w in &wisharts {
        let m = inv_root.matrix() * w.matrix() * inv_root.matrix();
        ops.push(HermitianOperator::hermitian_part(m)?);
    }
    Frame::new(OnticSpace::indexed(n)?, ops)
}

/// Seeded variant of [`random_positive_frame_with_rng`].
pub fn random_positive_frame(d: usize, n: usize, seed: u64) -> Result<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_positive_frame_with_rng(d, n, &mut rng)
}

/// Inverse square root of a positive definite operator, with eigenvalues
/// floored at `1e-12` to keep the inversion finite.
pub(crate) fn invsqrt_psd(a: &HermitianOperator) -> Result<HermitianOperator> {
    let (vals, vecs) = a.eigh()?;
    let d = a.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        let lam = vals[i].max(1e-12);
        let col = vecs.column(i);
        m += (&col * col.adjoint()).scale(1.0 / lam.sqrt());
    }
    HermitianOperator::hermitian_part(m)
}
