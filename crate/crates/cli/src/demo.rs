//! Seven-stage demonstration run by `qframe demo`.
//!
//! Each stage prints one pass/fail line. The first failing stage aborts
//! the run with exit code 4.

use qframe_core::extend::{riesz_operator, uniqueness_check, ConvexSample};
use qframe_core::frames::{
    canonical_dual, diagonal_frame, sic_qubit_frame, wootters_frame, DualFrame, Frame,
};
use qframe_core::nogo::{positivity_audit, trichotomy_audit};
use qframe_core::opalg::{
    bloch_state, herm_basis, hs_inner, pauli_x, pauli_y, pauli_z, random_hermitian,
    random_rank1_pvm, random_state, sum_operators, DensityOperator, Effect, HermitianOperator,
    MixtureWeights, Povm,
};
use qframe_core::repr::{
    classical_fragment_check, effect_mixture_check, negativity, represent_effect, represent_state,
    state_mixture_check,
};

use crate::CliError;

type StageResult = Result<String, String>;

fn core<T>(r: qframe_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub(crate) fn run(tol: f64, seed: u64) -> Result<(), CliError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::validation(format!(
            "tolerance must be a positive finite number, got {tol}"
        )));
    }
    println!("demo: tolerance {tol:.1e}, seed {seed}");
    let stages: [(&str, fn(f64, u64) -> StageResult); 7] = [
        ("classical fragment", stage_classical),
        ("negative weights", stage_negative_weights),
        ("positive frame with negative dual", stage_positive_frame),
        ("mixture linearity", stage_mixtures),
        ("decomposition uniqueness", stage_uniqueness),
        ("functional recovery", stage_recovery),
        ("trichotomy", stage_trichotomy),
    ];
    let total = stages.len();
    for (i, (name, stage)) in stages.iter().enumerate() {
        match stage(tol, seed) {
            Ok(detail) => println!("[{}/{total}] {name}: pass ({detail})", i + 1),
            Err(msg) => {
                println!("[{}/{total}] {name}: FAIL ({msg})", i + 1);
                return Err(CliError::assertion(format!("demo stage '{name}' failed")));
            }
        }
    }
    println!("demo: all {total} stages passed");
    Ok(())
}

/// Diagonal states measured in diagonal bases reproduce the classical
/// probability calculus with no negativity anywhere.
fn stage_classical(_tol: f64, _seed: u64) -> StageResult {
    for d in [2usize, 3, 4] {
        let comp = core(Povm::computational(d))?;
        let mut states = Vec::with_capacity(d + 1);
        for outcome in comp.outcomes() {
            states.push(core(DensityOperator::new(outcome.op().clone()))?);
        }
        let scaled: Vec<HermitianOperator> = comp
            .outcomes()
            .iter()
            .map(|e| e.op().scaled(1.0 / d as f64))
            .collect();
        states.push(core(DensityOperator::new(core(sum_operators(&scaled))?))?);
        let trivial = core(Povm::new(vec![core(Effect::identity(d))?]))?;
        let povms = vec![comp, trivial];
        let report = core(classical_fragment_check(d, &states, &povms))?;
        if !report.pass {
            return Err(format!("d={d}: {}", report.failures.join("; ")));
        }
    }
    Ok("diagonal states and measurements at d=2,3,4 stay classical".into())
}

/// A pure state pointing away from all three Pauli axes picks up a
/// negative phase-point weight of (1 - sqrt(3))/4.
fn stage_negative_weights(tol: f64, _seed: u64) -> StageResult {
    let (f, _) = core(wootters_frame(2))?;
    let s = -1.0 / 3f64.sqrt();
    let rho = core(bloch_state(s, s, s))?;
    let mu = core(represent_state(&rho, &f))?;
    let report = core(negativity(mu.values(), mu.space()))?;
    let expected_min = (1.0 - 3f64.sqrt()) / 4.0;
    let expected_total = (3f64.sqrt() - 1.0) / 4.0;
    if (report.min_value - expected_min).abs() > tol {
        return Err(format!(
            "min weight {:.12} differs from {expected_min:.12}",
            report.min_value
        ));
    }
    if (report.total_negativity - expected_total).abs() > tol {
        return Err(format!(
            "total negativity {:.12} differs from {expected_total:.12}",
            report.total_negativity
        ));
    }
    Ok(format!(
        "min weight {:.6} at {}, total negativity {:.6}",
        report.min_value, report.argmin_label, report.total_negativity
    ))
}

/// The tetrahedral frame is elementwise positive, so the negativity moves
/// into its dual: basis-state response functions leave [0, 1].
fn stage_positive_frame(tol: f64, _seed: u64) -> StageResult {
    let f = core(sic_qubit_frame())?;
    let g = core(canonical_dual(&f))?;
    let audit = core(positivity_audit(&f, &g))?;
    if !audit.frame_positive() {
        return Err(format!(
            "frame eigenvalue {:.3e} is negative",
            audit.min_frame_eigenvalue
        ));
    }
    if (audit.min_dual_eigenvalue + 1.0).abs() > tol {
        return Err(format!(
            "min dual eigenvalue {:.12} is not -1",
            audit.min_dual_eigenvalue
        ));
    }
    let e0 = core(Povm::computational(2))?.outcomes()[0].clone();
    let xi = core(represent_effect(&e0, &g))?;
    let hi = 0.5 + 3f64.sqrt() / 2.0;
    let lo = 0.5 - 3f64.sqrt() / 2.0;
    for (k, want) in [hi, lo, lo, hi].iter().enumerate() {
        if (xi[k] - want).abs() > tol {
            return Err(format!(
                "response {k} is {:.12} but {want:.12} was expected",
                xi[k]
            ));
        }
    }
    let report = core(negativity(&xi, f.space()))?;
    if report.in_unit_interval {
        return Err("basis-state responses unexpectedly fit in [0, 1]".into());
    }
    Ok(format!(
        "frame stays positive, dual dips to {:.3}, responses reach {:.6}",
        audit.min_dual_eigenvalue, report.min_value
    ))
}

/// Representations respect convex mixtures of states and of effects, and
/// distinct ensembles of the same mixed state get the same distribution.
fn stage_mixtures(tol: f64, seed: u64) -> StageResult {
    let (f, g) = core(wootters_frame(2))?;
    let base = seed.wrapping_mul(10_000);
    let mut max_dev = 0f64;
    for i in 0..20u64 {
        let s1 = core(random_state(2, base.wrapping_add(100 + i)))?;
        let s2 = core(random_state(2, base.wrapping_add(200 + i)))?;
        let alpha = (i as f64 + 0.5) / 20.0;
        let w = core(MixtureWeights::new(vec![alpha, 1.0 - alpha]))?;
        max_dev = max_dev.max(core(state_mixture_check(&[s1, s2], &w, &f))?);
    }
    for i in 0..20u64 {
        let pvm = core(random_rank1_pvm(2, base.wrapping_add(300 + i)))?;
        let effects = pvm.outcomes().to_vec();
        let alpha = (i as f64 + 0.5) / 20.0;
        let w = core(MixtureWeights::new(vec![alpha, 1.0 - alpha]))?;
        max_dev = max_dev.max(core(effect_mixture_check(&effects, &w, &g))?);
    }
    if max_dev > tol {
        return Err(format!("a mixture residual reached {max_dev:.3e}"));
    }
    let mu_of_equal_mixture = |povm: &Povm| -> Result<Vec<f64>, String> {
        let mut acc = vec![0.0; f.ops().len()];
        for outcome in povm.outcomes() {
            let rho = core(DensityOperator::new(outcome.op().clone()))?;
            let mu = core(represent_state(&rho, &f))?;
            for (a, v) in acc.iter_mut().zip(mu.values().iter()) {
                *a += 0.5 * v;
            }
        }
        Ok(acc)
    };
    let mz = mu_of_equal_mixture(&core(Povm::computational(2))?)?;
    let mx = mu_of_equal_mixture(&core(Povm::fourier(2))?)?;
    let ens_dev = mz
        .iter()
        .zip(mx.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0f64, f64::max);
    if ens_dev > tol {
        return Err(format!(
            "two ensembles of the maximally mixed state disagree by {ens_dev:.3e}"
        ));
    }
    Ok(format!(
        "max residual {max_dev:.1e} over 40 random mixtures; equal-weight ensembles agree to {ens_dev:.1e}"
    ))
}

/// Consistent overcomplete samples extend to a unique value; corrupting
/// one sampled value makes the extension decomposition-dependent.
fn stage_uniqueness(tol: f64, seed: u64) -> StageResult {
    let base = seed.wrapping_mul(10_000);
    let f = core(sic_qubit_frame())?;
    let mut ops: Vec<HermitianOperator> = f.ops().iter().map(|op| op.scaled(2.0)).collect();
    ops.push(pauli_x());
    ops.push(core(sum_operators(&[pauli_y(), pauli_z()]))?.scaled(0.5));
    let rho = core(random_state(2, base.wrapping_add(400)))?;
    let values = ops
        .iter()
        .map(|op| core(hs_inner(op, rho.op())))
        .collect::<Result<Vec<_>, String>>()?;
    let samples = core(ConvexSample::new(ops.clone(), values.clone()))?;
    let target = core(random_hermitian(2, base.wrapping_add(401)))?;
    let spread = core(uniqueness_check(&samples, &target, 10, base.wrapping_add(402)))?;
    if spread > tol {
        return Err(format!(
            "consistent samples gave spread {spread:.3e} above {tol:.1e}"
        ));
    }
    let mut corrupted_values = values;
    corrupted_values[2] += 0.1;
    let corrupted = core(ConvexSample::new(ops, corrupted_values))?;
    let corrupted_spread =
        core(uniqueness_check(&corrupted, &target, 10, base.wrapping_add(403)))?;
    if corrupted_spread < 1e-2 {
        return Err(format!(
            "corrupted samples gave spread {corrupted_spread:.3e} below 1e-2"
        ));
    }
    Ok(format!(
        "consistent spread {spread:.1e}, corrupted spread {corrupted_spread:.3}"
    ))
}

/// Sampled values of a linear functional pin down its representing
/// operator: a Pauli functional, the half-trace, and every frame element
/// from state samples alone.
fn stage_recovery(tol: f64, seed: u64) -> StageResult {
    let base = seed.wrapping_mul(10_000);
    let basis = core(herm_basis(2))?;
    let sz = pauli_z();
    let basis_ops = basis.elements().to_vec();
    let basis_values = basis_ops
        .iter()
        .map(|el| core(hs_inner(el, &sz)))
        .collect::<Result<Vec<_>, String>>()?;
    let fz = core(riesz_operator(&core(ConvexSample::new(
        basis_ops,
        basis_values,
    ))?))?;
    let err_z = (fz.op() - &sz).max_abs_entry();
    if err_z > tol {
        return Err(format!("z-functional recovery missed by {err_z:.3e}"));
    }
    let f = core(sic_qubit_frame())?;
    let projectors: Vec<HermitianOperator> = f.ops().iter().map(|op| op.scaled(2.0)).collect();
    let ft = core(riesz_operator(&core(ConvexSample::new(
        projectors,
        vec![0.5; 4],
    ))?))?;
    let half_identity = core(HermitianOperator::identity(2))?.scaled(0.5);
    let err_t = (ft.op() - &half_identity).max_abs_entry();
    if err_t > tol {
        return Err(format!("half-trace recovery missed by {err_t:.3e}"));
    }
    let mut worst = 0f64;
    for (d, n_states, offset) in [(2usize, 8u64, 500u64), (3, 12, 600)] {
        let (wf, _) = core(wootters_frame(d))?;
        let states = (0..n_states)
            .map(|s| core(random_state(d, base.wrapping_add(offset + s))))
            .collect::<Result<Vec<_>, String>>()?;
        for lam in 0..wf.ops().len() {
            let target = wf.op(lam);
            let ops: Vec<HermitianOperator> = states.iter().map(|r| r.op().clone()).collect();
            let values = states
                .iter()
                .map(|r| core(hs_inner(r.op(), target)))
                .collect::<Result<Vec<_>, String>>()?;
            let recovered = core(riesz_operator(&core(ConvexSample::new(ops, values))?))?;
            worst = worst.max((recovered.op() - target).max_abs_entry());
        }
    }
    if worst > tol {
        return Err(format!(
            "frame element recovery error {worst:.3e} exceeds {tol:.1e}"
        ));
    }
    Ok(format!(
        "z functional within {err_z:.1e}, half-trace within {err_t:.1e}, frame elements at d=2,3 within {worst:.1e}"
    ))
}

/// Every built-in pair violates one of the three clauses: frame
/// positivity (a), dual positivity (b), or exact duality (c).
fn stage_trichotomy(_tol: f64, _seed: u64) -> StageResult {
    let mut pairs: Vec<(String, Frame, DualFrame)> = Vec::new();
    for d in [2usize, 3, 5] {
        let (f, g) = core(wootters_frame(d))?;
        pairs.push((format!("wootters d={d}"), f, g));
    }
    let sic = core(sic_qubit_frame())?;
    let sic_dual = core(canonical_dual(&sic))?;
    pairs.push(("sic d=2".into(), sic, sic_dual));
    for d in [2usize, 3] {
        let (f, g) = core(diagonal_frame(d))?;
        pairs.push((format!("diagonal d={d}"), f, g));
    }
    let mut parts = Vec::with_capacity(pairs.len());
    for (name, f, g) in &pairs {
        let audit = core(trichotomy_audit(f.ops(), g.ops()))?;
        if !audit.holds() {
            return Err(format!(
                "{name} satisfies positivity and duality simultaneously"
            ));
        }
        let mut letters = String::new();
        if !audit.frame_positive {
            letters.push_str("(a)");
        }
        if !audit.dual_positive {
            letters.push_str("(b)");
        }
        if !audit.duality_holds {
            letters.push_str("(c)");
        }
        parts.push(format!("{name} {letters}"));
    }
    Ok(format!(
        "every pair violates a clause: {}",
        parts.join(", ")
    ))
}
