//! Executable forms of the no-go results: positivity audits, the rank-1
//! proportionality contradiction, the two-basis witness search, the
//! frame/dual trichotomy, and a numerical search for simultaneously
//! positive exact-dual pairs.
//!
//! The central fact being exercised: an operator frame and a dual family
//! can never be simultaneously positive and exactly dual. Every function
//! here either verifies an instance of that trichotomy or hunts for a
//! counterexample and fails to find one.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{
    canonical_dual_ops, random_positive_frame_with_rng, verify_duality, DualFrame, Frame,
    OnticSpace,
};
use crate::opalg::{
    devectorize, herm_basis, hs_inner, project_positive, sum_operators, vectorize, Effect,
    HermBasis, HermitianOperator, Povm,
};
use crate::repr::represent_povm;
use crate::tol;

/// Minimum eigenvalues over a frame/dual pair, with the labels of every
/// element that dips below the positivity tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityAudit {
    pub min_frame_eigenvalue: f64,
    pub min_dual_eigenvalue: f64,
    pub offending_frame_labels: Vec<String>,
    pub offending_dual_labels: Vec<String>,
}

impl PositivityAudit {
    pub fn frame_positive(&self) -> bool {
        self.min_frame_eigenvalue >= -tol::POS
    }

    pub fn dual_positive(&self) -> bool {
        self.min_dual_eigenvalue >= -tol::POS
    }
}

/// An ontic state at which the frame element fails to be proportional to
/// a supported outcome of each of two measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContradictionWitness {
    pub label: String,
    pub effect_a_index: usize,
    pub effect_b_index: usize,
    pub proportionality_residual_a: f64,
    pub proportionality_residual_b: f64,
}

/// The premise of the two-basis argument that failed to hold. Reporting
/// one of these is a successful outcome: the premises can never all hold
/// at once, and this names the one that gave way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PremiseFailure {
    FrameNotPositive { min_eigenvalue: f64 },
    DualNotPositive { min_eigenvalue: f64 },
    DualityViolated { residual: f64 },
}

impl std::fmt::Display for PremiseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::FrameNotPositive { min_eigenvalue } => {
                write!(f, "frame not positive (min eigenvalue {min_eigenvalue:.6})")
            }
            Self::DualNotPositive { min_eigenvalue } => {
                write!(f, "dual not positive (min eigenvalue {min_eigenvalue:.6})")
            }
            Self::DualityViolated { residual } => {
                write!(f, "duality violated (residual {residual:.6})")
            }
        }
    }
}

/// Result of the two-basis contradiction search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TwoBasisOutcome {
    Witness(ContradictionWitness),
    PremiseFailure(PremiseFailure),
}

/// Tolerances for support membership, proportionality, and the premise
/// audit of the two-basis search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// A response value above this counts as support membership.
    pub support_tol: f64,
    /// A proportionality residual above this counts as a failure.
    pub witness_tol: f64,
    /// Maximum duality residual accepted by the premise audit.
    pub duality_tol: f64,
    /// Most negative eigenvalue accepted by the premise audit.
    pub positivity_tol: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            support_tol: tol::SUPPORT,
            witness_tol: tol::WITNESS,
            duality_tol: tol::DUAL,
            positivity_tol: tol::POS,
        }
    }
}

/// Three-way verdict on a frame/dual pair: positivity of each family and
/// exactness of the duality. The trichotomy holds when at least one of
/// the three is violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyAudit {
    pub min_frame_eigenvalue: f64,
    pub min_dual_eigenvalue: f64,
    pub duality_residual: f64,
    pub frame_positive: bool,
    pub dual_positive: bool,
    pub duality_holds: bool,
}

impl TrichotomyAudit {
    /// True when at least one clause is violated, as the no-go theorem
    /// requires of every pair.
    pub fn holds(&self) -> bool {
        !(self.frame_positive && self.dual_positive && self.duality_holds)
    }

    /// Names of the violated clauses.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.frame_positive {
            v.push("frame not positive");
        }
        if !self.dual_positive {
            v.push("dual not positive");
        }
        if !self.duality_holds {
            v.push("duality violated");
        }
        v
    }
}

/// Search configuration for the negativity minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub step: f64,
    pub penalty: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            iterations: 2000,
            step: 1e-2,
            penalty: 100.0,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::ConfigInvalid {
                reason: "restarts must be at least 1".into(),
            });
        }
        if self.iterations == 0 {
            return Err(Error::ConfigInvalid {
                reason: "iterations must be at least 1".into(),
            });
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::ConfigInvalid {
                reason: format!("step must be positive and finite, got {}", self.step),
            });
        }
        if !(self.penalty > 0.0 && self.penalty.is_finite()) {
            return Err(Error::ConfigInvalid {
                reason: format!("penalty must be positive and finite, got {}", self.penalty),
            });
        }
        Ok(())
    }
}

/// Scalars recorded at one optimizer iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationPoint {
    pub objective: f64,
    pub total_negativity: f64,
    pub duality_residual: f64,
}

/// A single optimization run from a fixed starting pair.
#[derive(Debug, Clone)]
pub struct OptimizerRun {
    pub frame_ops: Vec<HermitianOperator>,
    pub dual_ops: Vec<HermitianOperator>,
    pub objective: f64,
    pub total_negativity: f64,
    pub duality_residual: f64,
    pub iterations: usize,
    /// One point per iterate, starting with the unmodified initial pair.
    pub trace: Vec<IterationPoint>,
}

/// Final scalars of one restart of the negativity minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartPoint {
    pub total_negativity: f64,
    pub duality_residual: f64,
}

/// Outcome of the multi-restart search for a positive exact-dual pair.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_total_negativity: f64,
    pub duality_residual: f64,
    pub iterations: usize,
    pub frame: Frame,
    pub dual_ops: Vec<HermitianOperator>,
    pub restart_trace: Vec<RestartPoint>,
}

impl SearchResult {
    /// Recomputes total negativity and duality residual from the stored
    /// pair; the stored scalars must match.
    pub fn recompute_scalars(&self) -> Result<(f64, f64)> {
        let neg = total_negativity_ops(self.frame.ops())? + total_negativity_ops(&self.dual_ops)?;
        let basis = herm_basis(self.frame.dim())?;
        let residual =
            crate::frames::duality_residual_ops(self.frame.ops(), &self.dual_ops, &basis)?;
        Ok((neg, residual))
    }
}

/// Sum over a family of the absolute values of all negative eigenvalues.
pub fn total_negativity_ops(ops: &[HermitianOperator]) -> Result<f64> {
    let mut acc = 0.0;
    for op in ops {
        for e in op.eigenvalues()? {
            acc += (-e).max(0.0);
        }
    }
    Ok(acc)
}

/// Minimum eigenvalues over both families of a pair, with offending
/// labels listed per family.
pub fn positivity_audit(f: &Frame, g: &DualFrame) -> Result<PositivityAudit> {
    if f.space() != g.space() {
        return Err(Error::OnticSpaceMismatch {
            left: f.space().size(),
            right: g.space().size(),
        });
    }
    let mut min_frame = f64::INFINITY;
    let mut min_dual = f64::INFINITY;
    let mut bad_frame = Vec::new();
    let mut bad_dual = Vec::new();
    for (i, op) in f.ops().iter().enumerate() {
        let e = op.min_eigenvalue()?;
        min_frame = min_frame.min(e);
        if e < -tol::POS {
            bad_frame.push(f.space().label(i).to_string());
        }
    }
    for (i, op) in g.ops().iter().enumerate() {
        let e = op.min_eigenvalue()?;
        min_dual = min_dual.min(e);
        if e < -tol::POS {
            bad_dual.push(g.space().label(i).to_string());
        }
    }
    Ok(PositivityAudit {
        min_frame_eigenvalue: min_frame,
        min_dual_eigenvalue: min_dual,
        offending_frame_labels: bad_frame,
        offending_dual_labels: bad_dual,
    })
}

/// Frobenius distance from `x` to the ray `{t e : t >= 0}`.
pub fn proportionality_residual(x: &HermitianOperator, e: &HermitianOperator) -> Result<f64> {
    if x.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: x.dim(),
        });
    }
    let ee = hs_inner(e, e)?;
    let t = if ee > 1e-300 {
        (hs_inner(x, e)? / ee).max(0.0)
    } else {
        0.0
    };
    Ok((x - &e.scaled(t)).frobenius_norm())
}

/// Validates that `terms` is a positive decomposition of the rank-1
/// effect `e` and returns the distance of each term from the ray through
/// `e`. A genuine positive decomposition of a rank-1 operator can only
/// consist of multiples of that operator, so all residuals must vanish
/// up to tolerance.
pub fn rank1_trivial_decomposition_check(
    e: &Effect,
    terms: &[HermitianOperator],
) -> Result<Vec<f64>> {
    let rank = e.op().rank(tol::RANK_REL)?;
    if rank != 1 {
        return Err(Error::NotRankOne { rank });
    }
    for (index, term) in terms.iter().enumerate() {
        if term.dim() != e.dim() {
            return Err(Error::DimensionMismatch {
                expected: e.dim(),
                found: term.dim(),
            });
        }
        let min_eigenvalue = term.min_eigenvalue()?;
        if min_eigenvalue < -tol::POS {
            return Err(Error::TermsNotPositive {
                index,
                min_eigenvalue,
            });
        }
    }
    let total = sum_operators(terms)?;
    let residual = (&total - e.op()).max_abs_entry();
    if residual > tol::ALG {
        return Err(Error::SumMismatch { residual });
    }
    terms
        .iter()
        .map(|term| proportionality_residual(term, e.op()))
        .collect()
}

fn check_rank1_pvm(pvm: &Povm) -> Result<()> {
    for e in pvm.outcomes() {
        let rank = e.op().rank(tol::RANK_REL)?;
        if rank != 1 {
            return Err(Error::NotRankOne { rank });
        }
    }
    Ok(())
}

/// Runs the two-measurement contradiction argument. First audits the
/// premises (frame positivity, dual positivity, exact duality); if one
/// fails, that failure is returned as the outcome. If all premises hold,
/// searches for an ontic state supported by an outcome of each
/// measurement whose frame element fails proportionality to both
/// supporting outcomes at once. The premises would force the frame
/// element onto the ray of every supporting outcome, and two rank-1
/// measurements sharing no outcome direction leave no ray available, so
/// the premises and a missing witness cannot coexist.
pub fn two_basis_contradiction(
    f: &Frame,
    g: &DualFrame,
    pvm_a: &Povm,
    pvm_b: &Povm,
    config: &WitnessConfig,
) -> Result<TwoBasisOutcome> {
    if pvm_a.dim() != f.dim() || pvm_b.dim() != f.dim() || g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: pvm_a.dim().min(pvm_b.dim()).min(g.dim()),
        });
    }
    check_rank1_pvm(pvm_a)?;
    check_rank1_pvm(pvm_b)?;
    for (k, ea) in pvm_a.outcomes().iter().enumerate() {
        for (j, eb) in pvm_b.outcomes().iter().enumerate() {
            if proportionality_residual(eb.op(), ea.op())? < config.witness_tol {
                return Err(Error::BasesShareElement {
                    index_a: k,
                    index_b: j,
                });
            }
        }
    }

    let mut min_frame = f64::INFINITY;
    for op in f.ops() {
        min_frame = min_frame.min(op.min_eigenvalue()?);
    }
    if min_frame < -config.positivity_tol {
        return Ok(TwoBasisOutcome::PremiseFailure(
            PremiseFailure::FrameNotPositive {
                min_eigenvalue: min_frame,
            },
        ));
    }
    let mut min_dual = f64::INFINITY;
    for op in g.ops() {
        min_dual = min_dual.min(op.min_eigenvalue()?);
    }
    if min_dual < -config.positivity_tol {
        return Ok(TwoBasisOutcome::PremiseFailure(
            PremiseFailure::DualNotPositive {
                min_eigenvalue: min_dual,
            },
        ));
    }
    let residual = verify_duality(f, g)?;
    if residual > config.duality_tol {
        return Ok(TwoBasisOutcome::PremiseFailure(
            PremiseFailure::DualityViolated { residual },
        ));
    }

    let xi_a = represent_povm(pvm_a, g)?;
    let xi_b = represent_povm(pvm_b, g)?;
    for lam in 0..f.len() {
        let supp_a: Vec<usize> = (0..pvm_a.len())
            .filter(|&k| xi_a.row(k)[lam] > config.support_tol)
            .collect();
        let supp_b: Vec<usize> = (0..pvm_b.len())
            .filter(|&j| xi_b.row(j)[lam] > config.support_tol)
            .collect();
        if supp_a.is_empty() || supp_b.is_empty() {
            continue;
        }
        let mut best: Option<(f64, usize, usize, f64, f64)> = None;
        for &k in &supp_a {
            let ra = proportionality_residual(f.op(lam), pvm_a.outcomes()[k].op())?;
            for &j in &supp_b {
                let rb = proportionality_residual(f.op(lam), pvm_b.outcomes()[j].op())?;
                let margin = ra.min(rb);
                if best.is_none() || margin > best.as_ref().unwrap().0 {
                    best = Some((margin, k, j, ra, rb));
                }
            }
        }
        let (margin, k, j, ra, rb) = best.expect("supports are nonempty");
        if margin > config.witness_tol {
            return Ok(TwoBasisOutcome::Witness(ContradictionWitness {
                label: f.space().label(lam).to_string(),
                effect_a_index: k,
                effect_b_index: j,
                proportionality_residual_a: ra,
                proportionality_residual_b: rb,
            }));
        }
    }
    Err(Error::NoWitnessFound)
}

/// Audits one frame/dual pair of raw operator families against the three
/// clauses of the trichotomy.
pub fn trichotomy_audit(
    f_ops: &[HermitianOperator],
    g_ops: &[HermitianOperator],
) -> Result<TrichotomyAudit> {
    if f_ops.is_empty() || f_ops.len() != g_ops.len() {
        return Err(Error::LengthMismatch {
            left: f_ops.len(),
            right: g_ops.len(),
        });
    }
    let d = f_ops[0].dim();
    let basis = herm_basis(d)?;
    let mut min_frame = f64::INFINITY;
    for op in f_ops {
        min_frame = min_frame.min(op.min_eigenvalue()?);
    }
    let mut min_dual = f64::INFINITY;
    for op in g_ops {
        min_dual = min_dual.min(op.min_eigenvalue()?);
    }
    let duality_residual = crate::frames::duality_residual_ops(f_ops, g_ops, &basis)?;
    Ok(TrichotomyAudit {
        min_frame_eigenvalue: min_frame,
        min_dual_eigenvalue: min_dual,
        duality_residual,
        frame_positive: min_frame >= -tol::POS,
        dual_positive: min_dual >= -tol::POS,
        duality_holds: duality_residual <= tol::DUAL,
    })
}

/// The duality defect matrix `sum_lambda v(sigma) v(F)^T - I`.
fn duality_defect(
    f_ops: &[HermitianOperator],
    g_ops: &[HermitianOperator],
    basis: &HermBasis,
) -> Result<DMatrix<f64>> {
    let n = basis.len();
    let mut m = DMatrix::<f64>::identity(n, n).scale(-1.0);
    for (f, g) in f_ops.iter().zip(g_ops.iter()) {
        let vf = vectorize(f, basis)?;
        let vg = vectorize(g, basis)?;
        m += &vg * vf.transpose();
    }
    Ok(m)
}

/// Projector onto the span of the negative eigenvectors.
fn negative_part_projector(x: &HermitianOperator) -> Result<HermitianOperator> {
    let (vals, vecs) = x.eigh()?;
    let d = x.dim();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        if vals[i] < 0.0 {
            let col = vecs.column(i);
            m += &col * col.adjoint();
        }
    }
    HermitianOperator::hermitian_part(m)
}

fn evaluate_pair(
    f_ops: &[HermitianOperator],
    g_ops: &[HermitianOperator],
    basis: &HermBasis,
    penalty: f64,
) -> Result<IterationPoint> {
    let defect = duality_defect(f_ops, g_ops, basis)?;
    let neg = total_negativity_ops(f_ops)? + total_negativity_ops(g_ops)?;
    let fro2: f64 = defect.iter().map(|x| x * x).sum();
    let maxabs = defect.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(IterationPoint {
        objective: neg + penalty * fro2,
        total_negativity: neg,
        duality_residual: maxabs,
    })
}

/// One alternating projected-gradient run from the given starting pair.
/// Each iteration takes a penalty-gradient step on the dual family and
/// projects it onto the positive cone, then does the same for the frame
/// and restores the identity-sum constraint by symmetric renormalization.
/// The returned pair is the recorded iterate with the lowest objective,
/// which may be the unmodified starting pair. Only `iterations`, `step`,
/// and `penalty` of the configuration are used here; restarts are driven
/// by [`negativity_minimizer`].
pub fn optimize_from(
    start: &Frame,
    dual_start: &[HermitianOperator],
    config: &OptimizerConfig,
) -> Result<OptimizerRun> {
    config.validate()?;
    if dual_start.len() != start.len() {
        return Err(Error::LengthMismatch {
            left: dual_start.len(),
            right: start.len(),
        });
    }
    for op in dual_start {
        if op.dim() != start.dim() {
            return Err(Error::DimensionMismatch {
                expected: start.dim(),
                found: op.dim(),
            });
        }
    }
    let basis = herm_basis(start.dim())?;
    let mut f_ops = start.ops().to_vec();
    let mut g_ops = dual_start.to_vec();
    let first = evaluate_pair(&f_ops, &g_ops, &basis, config.penalty)?;
    let mut best_point = first;
    let mut best_pair = (f_ops.clone(), g_ops.clone());
    let mut trace = Vec::with_capacity(config.iterations + 1);
    trace.push(first);
    for _ in 0..config.iterations {
        let defect = duality_defect(&f_ops, &g_ops, &basis)?;
        let vf: Vec<_> = f_ops
            .iter()
            .map(|op| vectorize(op, &basis))
            .collect::<Result<_>>()?;
        for lam in 0..g_ops.len() {
            let grad_coords = (&defect * &vf[lam]).scale(2.0 * config.penalty);
            let grad_pen = devectorize(&grad_coords, &basis)?;
            let ascent = negative_part_projector(&g_ops[lam])?;
            let stepped = &(&g_ops[lam] - &grad_pen.scaled(config.step))
                + &ascent.scaled(config.step);
            g_ops[lam] = project_positive(&stepped)?;
        }
        let defect = duality_defect(&f_ops, &g_ops, &basis)?;
        let vg: Vec<_> = g_ops
            .iter()
            .map(|op| vectorize(op, &basis))
            .collect::<Result<_>>()?;
        for lam in 0..f_ops.len() {
            let grad_coords = (defect.transpose() * &vg[lam]).scale(2.0 * config.penalty);
            let grad_pen = devectorize(&grad_coords, &basis)?;
            let ascent = negative_part_projector(&f_ops[lam])?;
            let stepped = &(&f_ops[lam] - &grad_pen.scaled(config.step))
                + &ascent.scaled(config.step);
            f_ops[lam] = project_positive(&stepped)?;
        }
        let total = sum_operators(&f_ops)?;
        let renorm = crate::frames::invsqrt_psd(&total)?;
        for op in f_ops.iter_mut() {
            let m = renorm.matrix() * op.matrix() * renorm.matrix();
            *op = HermitianOperator::hermitian_part(m)?;
        }
        let point = evaluate_pair(&f_ops, &g_ops, &basis, config.penalty)?;
        if point.objective < best_point.objective {
            best_point = point;
            best_pair = (f_ops.clone(), g_ops.clone());
        }
        trace.push(point);
    }
    Ok(OptimizerRun {
        frame_ops: best_pair.0,
        dual_ops: best_pair.1,
        objective: best_point.objective,
        total_negativity: best_point.total_negativity,
        duality_residual: best_point.duality_residual,
        iterations: config.iterations,
        trace,
    })
}

/// Multi-restart search for a frame/dual pair that is simultaneously
/// positive and exactly dual. Each restart starts from a fresh random
/// positive frame with its canonical dual (or a copy of the frame when
/// no canonical dual exists) and minimizes total negativity plus a
/// quadratic duality penalty. The trichotomy predicts that no restart
/// can drive both the negativity and the duality residual to zero, and
/// the recorded traces show it.
pub fn negativity_minimizer(
    d: usize,
    n_ontic: usize,
    config: &OptimizerConfig,
) -> Result<SearchResult> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d });
    }
    if n_ontic < d * d {
        return Err(Error::ConfigInvalid {
            reason: format!("n_ontic = {n_ontic} is below the informational minimum {}", d * d),
        });
    }
    config.validate()?;
    let mut best_run: Option<OptimizerRun> = None;
    let mut restart_trace = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(r as u64);
        let f0 = random_positive_frame_with_rng(d, n_ontic, &mut rng)?;
        let g0 = canonical_dual_ops(&f0).unwrap_or_else(|_| f0.ops().to_vec());
        let run = optimize_from(&f0, &g0, config)?;
        restart_trace.push(RestartPoint {
            total_negativity: run.total_negativity,
            duality_residual: run.duality_residual,
        });
        let better = match &best_run {
            None => true,
            Some(b) => run.objective < b.objective,
        };
        if better {
            best_run = Some(run);
        }
    }
    let best = best_run.expect("at least one restart ran");
    let frame = Frame::new(OnticSpace::indexed(n_ontic)?, best.frame_ops)?;
    Ok(SearchResult {
        best_total_negativity: best.total_negativity,
        duality_residual: best.duality_residual,
        iterations: best.iterations,
        frame,
        dual_ops: best.dual_ops,
        restart_trace,
    })
}
