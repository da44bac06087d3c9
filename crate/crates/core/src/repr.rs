//! Quasiprobability representations of states and measurements, Born-rule
//! verification, negativity quantification, and convex-linearity checks.
//!
//! A state maps to `mu(lambda) = Tr[rho F(lambda)]` and an effect to
//! `xi(lambda) = Tr[sigma(lambda) E]`. Whenever the frame and dual are
//! exact duals, `sum_lambda mu(lambda) xi(lambda)` equals the Born
//! probability `Tr[rho E]`; the functions here compute those objects and
//! measure every way they can fail to look classical.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{diagonal_frame, DualFrame, Frame, OnticSpace};
use crate::opalg::{hs_inner, DensityOperator, Effect, MixtureWeights, Povm};
use crate::tol;

/// A real-valued distribution over an ontic space, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    space: OnticSpace,
    values: DVector<f64>,
}

impl QuasiDistribution {
    pub fn new(space: OnticSpace, values: DVector<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: space.size(),
            });
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol::ALG {
            return Err(Error::TraceMismatch {
                trace: sum,
                expected: 1.0,
            });
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }
}

/// One real-valued response function per measurement outcome; at every
/// ontic state the outcome responses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFunctions {
    space: OnticSpace,
    rows: Vec<DVector<f64>>,
}

impl ResponseFunctions {
    pub fn new(space: OnticSpace, rows: Vec<DVector<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyPovm);
        }
        for row in &rows {
            if row.len() != space.size() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: space.size(),
                });
            }
        }
        for lam in 0..space.size() {
            let sum: f64 = rows.iter().map(|r| r[lam]).sum();
            if (sum - 1.0).abs() > tol::ALG {
                return Err(Error::SumMismatch {
                    residual: (sum - 1.0).abs(),
                });
            }
        }
        Ok(Self { space, rows })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn rows(&self) -> &[DVector<f64>] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &DVector<f64> {
        &self.rows[k]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Summary of how far a value vector is from a probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    /// Sum of the absolute values of all negative entries.
    #[serde(rename = "total")]
    pub total_negativity: f64,
    /// Smallest entry.
    #[serde(rename = "min")]
    pub min_value: f64,
    /// Label of the ontic state attaining the minimum.
    #[serde(rename = "argmin")]
    pub argmin_label: String,
    /// Whether every entry lies in `[0, 1]` up to tolerance.
    pub in_unit_interval: bool,
}

/// Outcome of a classical-fragment audit over diagonal states and
/// measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentReport {
    pub pass: bool,
    pub n_states: usize,
    pub n_povms: usize,
    /// Human-readable descriptions of every violated check.
    pub failures: Vec<String>,
}

/// The distribution `mu(lambda) = Tr[rho F(lambda)]`.
pub fn represent_state(rho: &DensityOperator, f: &Frame) -> Result<QuasiDistribution> {
    if rho.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: rho.dim(),
        });
    }
    let values = DVector::from_iterator(
        f.len(),
        f.ops()
            .iter()
            .map(|op| hs_inner(rho.op(), op).expect("dimensions already checked")),
    );
    QuasiDistribution::new(f.space().clone(), values)
}

/// The response function `xi(lambda) = Tr[sigma(lambda) E]`.
pub fn represent_effect(e: &Effect, g: &DualFrame) -> Result<DVector<f64>> {
    if e.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: e.dim(),
        });
    }
    Ok(DVector::from_iterator(
        g.len(),
        g.ops()
            .iter()
            .map(|op| hs_inner(op, e.op()).expect("dimensions already checked")),
    ))
}

/// Response functions for every outcome of a measurement; their sum over
/// outcomes is verified to be the unit function.
pub fn represent_povm(m: &Povm, g: &DualFrame) -> Result<ResponseFunctions> {
    let rows = m
        .outcomes()
        .iter()
        .map(|e| represent_effect(e, g))
        .collect::<Result<Vec<_>>>()?;
    ResponseFunctions::new(g.space().clone(), rows)
}

/// Per-outcome deviation between `sum_lambda mu(lambda) xi_k(lambda)` and
/// the Born probability `Tr[rho E_k]`.
pub fn born_check(
    rho: &DensityOperator,
    m: &Povm,
    f: &Frame,
    g: &DualFrame,
) -> Result<Vec<f64>> {
    if f.space() != g.space() {
        return Err(Error::OnticSpaceMismatch {
            left: f.space().size(),
            right: g.space().size(),
        });
    }
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.dim(),
        });
    }
    let mu = represent_state(rho, f)?;
    let xi = represent_povm(m, g)?;
    let mut residuals = Vec::with_capacity(m.len());
    for (e, row) in m.outcomes().iter().zip(xi.rows().iter()) {
        let modeled: f64 = mu.values().iter().zip(row.iter()).map(|(a, b)| a * b).sum();
        let born = hs_inner(rho.op(), e.op())?;
        residuals.push((modeled - born).abs());
    }
    Ok(residuals)
}

/// Negativity summary of a value vector over the given ontic space.
pub fn negativity(values: &DVector<f64>, space: &OnticSpace) -> Result<NegativityReport> {
    if values.len() != space.size() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: space.size(),
        });
    }
    let total_negativity: f64 = values.iter().map(|v| (-v).max(0.0)).sum();
    let mut min_value = f64::INFINITY;
    let mut argmin = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < min_value {
            min_value = *v;
            argmin = i;
        }
    }
    let in_unit_interval = values
        .iter()
        .all(|v| *v >= -tol::ALG && *v <= 1.0 + tol::ALG);
    Ok(NegativityReport {
        total_negativity,
        min_value,
        argmin_label: space.label(argmin).to_string(),
        in_unit_interval,
    })
}

fn mix_states(states: &[DensityOperator], w: &MixtureWeights) -> Result<DensityOperator> {
    if states.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: states.len(),
            right: w.len(),
        });
    }
    let d = states[0].dim();
    let mut acc = crate::opalg::HermitianOperator::zero(d)?;
    for (rho, wj) in states.iter().zip(w.weights()) {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        acc = &acc + &rho.op().scaled(*wj);
    }
    DensityOperator::new(acc)
}

/// Deviation from convex-linearity in the state argument: the largest
/// entrywise difference between representing the mixture and mixing the
/// representations.
pub fn state_mixture_check(
    states: &[DensityOperator],
    w: &MixtureWeights,
    f: &Frame,
) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::BadWeights {
            reason: "mixture needs at least one state".into(),
        });
    }
    let mixed = mix_states(states, w)?;
    let mu_mixed = represent_state(&mixed, f)?;
    let mut combo = DVector::zeros(f.len());
    for (rho, wj) in states.iter().zip(w.weights()) {
        combo += represent_state(rho, f)?.values().scale(*wj);
    }
    Ok((mu_mixed.values() - combo)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max))
}

/// Deviation from convex-linearity in the effect argument, mirroring
/// [`state_mixture_check`].
pub fn effect_mixture_check(effects: &[Effect], w: &MixtureWeights, g: &DualFrame) -> Result<f64> {
    if effects.is_empty() {
        return Err(Error::BadWeights {
            reason: "mixture needs at least one effect".into(),
        });
    }
    if effects.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: effects.len(),
            right: w.len(),
        });
    }
    let d = effects[0].dim();
    let mut acc = crate::opalg::HermitianOperator::zero(d)?;
    for (e, wj) in effects.iter().zip(w.weights()) {
        if e.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: e.dim(),
            });
        }
        acc = &acc + &e.op().scaled(*wj);
    }
    let mixed = Effect::new(acc)?;
    let xi_mixed = represent_effect(&mixed, g)?;
    let mut combo = DVector::zeros(g.len());
    for (e, wj) in effects.iter().zip(w.weights()) {
        combo += represent_effect(e, g)?.scale(*wj);
    }
    Ok((xi_mixed - combo).iter().map(|x| x.abs()).fold(0.0, f64::max))
}

fn check_diagonal(op: &crate::opalg::HermitianOperator, item: &str) -> Result<()> {
    let d = op.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j && op.matrix()[(i, j)].norm() > tol::ALG {
                return Err(Error::NotDiagonal {
                    item: item.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Represents diagonal states and diagonal measurements in the diagonal
/// frame and audits them for nonnegativity, unit-interval responses, and
/// exact Born statistics. Passing means this sub-theory admits a fully
/// classical probabilistic description.
pub fn classical_fragment_check(
    d: usize,
    states: &[DensityOperator],
    povms: &[Povm],
) -> Result<FragmentReport> {
    for (i, rho) in states.iter().enumerate() {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        check_diagonal(rho.op(), &format!("state {i}"))?;
    }
    for (i, m) in povms.iter().enumerate() {
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        for (k, e) in m.outcomes().iter().enumerate() {
            check_diagonal(e.op(), &format!("povm {i} outcome {k}"))?;
        }
    }
    let (frame, dual) = diagonal_frame(d)?;
    let mut failures = Vec::new();
    for (i, rho) in states.iter().enumerate() {
        let mu = represent_state(rho, &frame)?;
        if mu.values().iter().any(|v| *v < -tol::ALG) {
            failures.push(format!("state {i} has a negative quasiprobability"));
        }
    }
    for (i, m) in povms.iter().enumerate() {
        let xi = represent_povm(m, &dual)?;
        for (k, row) in xi.rows().iter().enumerate() {
            if row.iter().any(|v| *v < -tol::ALG || *v > 1.0 + tol::ALG) {
                failures.push(format!("povm {i} outcome {k} leaves the unit interval"));
            }
        }
    }
    for (i, rho) in states.iter().enumerate() {
        for (j, m) in povms.iter().enumerate() {
            let residuals = born_check(rho, m, &frame, &dual)?;
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            if worst > tol::BORN {
                failures.push(format!(
                    "state {i} with povm {j} misses the Born rule by {worst:.3e}"
                ));
            }
        }
    }
    Ok(FragmentReport {
        pass: failures.is_empty(),
        n_states: states.len(),
        n_povms: povms.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{canonical_dual, sic_qubit_frame, wootters_frame};
    use crate::opalg::{
        bloch_state, random_rank1_pvm, random_state, Effect, HermitianOperator, Povm,
    };
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn diag_op(entries: &[f64]) -> HermitianOperator {
        let d = entries.len();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(*x, 0.0);
        }
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn wootters_distribution_of_ground_state() {
        let (frame, _) = wootters_frame(2).unwrap();
        let rho = bloch_state(0.0, 0.0, 1.0).unwrap();
        let mu = represent_state(&rho, &frame).unwrap();
        let expected = [0.5, 0.5, 0.0, 0.0];
        for (v, e) in mu.values().iter().zip(expected.iter()) {
            assert_abs_diff_eq!(v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_state_is_uniform_in_wootters() {
        let (frame, _) = wootters_frame(2).unwrap();
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let mu = represent_state(&rho, &frame).unwrap();
        for v in mu.values().iter() {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn antipodal_bloch_state_goes_negative() {
        let (frame, _) = wootters_frame(2).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        let rho = bloch_state(-s, -s, -s).unwrap();
        let mu = represent_state(&rho, &frame).unwrap();
        let expected_min = (1.0 - 3.0f64.sqrt()) / 4.0;
        assert_abs_diff_eq!(mu.values()[0], expected_min, epsilon = 1e-12);
        let report = negativity(mu.values(), mu.space()).unwrap();
        assert_abs_diff_eq!(report.min_value, expected_min, epsilon = 1e-10);
        assert_abs_diff_eq!(report.total_negativity, -expected_min, epsilon = 1e-10);
        assert_eq!(report.argmin_label, "(0,0)");
    }

    #[test]
    fn identity_effect_has_unit_response() {
        let (_, dual) = wootters_frame(3).unwrap();
        let xi = represent_effect(&Effect::identity(3).unwrap(), &dual).unwrap();
        for v in xi.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-10);
        }
        let zero = represent_effect(&Effect::zero(3).unwrap(), &dual).unwrap();
        for v in zero.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sic_dual_response_leaves_unit_interval() {
        let frame = sic_qubit_frame().unwrap();
        let dual = canonical_dual(&frame).unwrap();
        let e = Effect::new(bloch_state(0.0, 0.0, 1.0).unwrap().into_op()).unwrap();
        let xi = represent_effect(&e, &dual).unwrap();
        let hi = 0.5 + 3.0f64.sqrt() / 2.0;
        let lo = 0.5 - 3.0f64.sqrt() / 2.0;
        let expected = [hi, lo, lo, hi];
        for (v, want) in xi.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(v, want, epsilon = 1e-10);
        }
        let report = negativity(&xi, dual.space()).unwrap();
        assert!(!report.in_unit_interval);
        assert_abs_diff_eq!(
            report.total_negativity,
            3.0f64.sqrt() - 1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn diagonal_dual_gives_classical_response() {
        let (_, dual) = crate::frames::diagonal_frame(2).unwrap();
        let e = Effect::new(diag_op(&[1.0, 0.0])).unwrap();
        let xi = represent_effect(&e, &dual).unwrap();
        assert_abs_diff_eq!(xi[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(xi[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn povm_rows_sum_to_unit_function() {
        let (_, dual) = wootters_frame(2).unwrap();
        let xi = represent_povm(&Povm::computational(2).unwrap(), &dual).unwrap();
        for lam in 0..2 * 2 {
            let sum: f64 = xi.rows().iter().map(|r| r[lam]).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
        }
        let trivial = represent_povm(&Povm::trivial(2).unwrap(), &dual).unwrap();
        assert_eq!(trivial.len(), 1);
        for v in trivial.row(0).iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn sic_povm_in_its_own_dual_is_the_identity_table() {
        let frame = sic_qubit_frame().unwrap();
        let dual = canonical_dual(&frame).unwrap();
        let outcomes: Vec<Effect> = frame
            .ops()
            .iter()
            .map(|f| Effect::new(f.clone()).unwrap())
            .collect();
        let povm = Povm::new(outcomes).unwrap();
        let xi = represent_povm(&povm, &dual).unwrap();
        for (k, row) in xi.rows().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(*v, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn born_rule_holds_for_exact_dual_pairs() {
        let frame = sic_qubit_frame().unwrap();
        let dual = canonical_dual(&frame).unwrap();
        let rho = bloch_state(0.0, 0.0, 1.0).unwrap();
        let pvm = Povm::computational(2).unwrap();
        let residuals = born_check(&rho, &pvm, &frame, &dual).unwrap();
        for r in residuals {
            assert!(r < 1e-12);
        }
        let (wf, wd) = wootters_frame(2).unwrap();
        for seed in 0..20 {
            let rho = random_state(2, seed).unwrap();
            let pvm = random_rank1_pvm(2, seed + 1000).unwrap();
            let residuals = born_check(&rho, &pvm, &wf, &wd).unwrap();
            for r in residuals {
                assert!(r < 1e-10);
            }
        }
    }

    #[test]
    fn trivial_povm_born_residual_is_zero() {
        let (wf, wd) = wootters_frame(2).unwrap();
        for seed in 0..5 {
            let rho = random_state(2, seed).unwrap();
            let residuals = born_check(&rho, &Povm::trivial(2).unwrap(), &wf, &wd).unwrap();
            assert!(residuals[0] < 1e-10);
        }
    }

    #[test]
    fn negativity_of_probability_vector_is_zero() {
        let space = OnticSpace::indexed(4).unwrap();
        let v = DVector::from_vec(vec![0.5, 0.5, 0.0, 0.0]);
        let report = negativity(&v, &space).unwrap();
        assert_eq!(report.total_negativity, 0.0);
        assert_eq!(report.min_value, 0.0);
        assert!(report.in_unit_interval);
    }

    #[test]
    fn two_ensembles_of_the_same_state_share_a_distribution() {
        let (frame, _) = wootters_frame(2).unwrap();
        let z = [
            bloch_state(0.0, 0.0, 1.0).unwrap(),
            bloch_state(0.0, 0.0, -1.0).unwrap(),
        ];
        let x = [
            bloch_state(1.0, 0.0, 0.0).unwrap(),
            bloch_state(-1.0, 0.0, 0.0).unwrap(),
        ];
        let w = MixtureWeights::uniform(2).unwrap();
        assert!(state_mixture_check(&z, &w, &frame).unwrap() < 1e-12);
        assert!(state_mixture_check(&x, &w, &frame).unwrap() < 1e-12);
        let mixed_z = mix_states(&z, &w).unwrap();
        let mixed_x = mix_states(&x, &w).unwrap();
        let mu_z = represent_state(&mixed_z, &frame).unwrap();
        let mu_x = represent_state(&mixed_x, &frame).unwrap();
        assert!((mu_z.values() - mu_x.values())
            .iter()
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn singleton_mixture_is_exact() {
        let (frame, _) = wootters_frame(2).unwrap();
        let states = [random_state(2, 7).unwrap()];
        let w = MixtureWeights::new(vec![1.0]).unwrap();
        assert!(state_mixture_check(&states, &w, &frame).unwrap() < 1e-14);
    }

    #[test]
    fn random_mixtures_are_convex_linear() {
        let frame = sic_qubit_frame().unwrap();
        let (_, wd) = wootters_frame(2).unwrap();
        for seed in 0..10 {
            let states = [
                random_state(2, 3 * seed).unwrap(),
                random_state(2, 3 * seed + 1).unwrap(),
                random_state(2, 3 * seed + 2).unwrap(),
            ];
            let w = MixtureWeights::new(vec![0.2, 0.3, 0.5]).unwrap();
            assert!(state_mixture_check(&states, &w, &frame).unwrap() < 1e-10);
            let effects = [
                Effect::new(random_state(2, 100 + seed).unwrap().into_op().scaled(0.9)).unwrap(),
                Effect::zero(2).unwrap(),
                Effect::identity(2).unwrap(),
            ];
            assert!(effect_mixture_check(&effects, &w, &wd).unwrap() < 1e-10);
        }
    }

    #[test]
    fn half_identity_effect_mixtures_agree() {
        let (_, dual) = wootters_frame(2).unwrap();
        let w = MixtureWeights::uniform(2).unwrap();
        let a = [Effect::zero(2).unwrap(), Effect::identity(2).unwrap()];
        let b = [
            Effect::new(diag_op(&[1.0, 0.0])).unwrap(),
            Effect::new(diag_op(&[0.0, 1.0])).unwrap(),
        ];
        assert!(effect_mixture_check(&a, &w, &dual).unwrap() < 1e-12);
        assert!(effect_mixture_check(&b, &w, &dual).unwrap() < 1e-12);
        let xi_a = represent_effect(
            &Effect::new(HermitianOperator::identity(2).unwrap().scaled(0.5)).unwrap(),
            &dual,
        )
        .unwrap();
        for v in xi_a.iter() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn classical_fragment_passes_for_diagonal_families() {
        let states = [DensityOperator::new(diag_op(&[0.3, 0.7])).unwrap()];
        let povm = Povm::new(vec![
            Effect::new(diag_op(&[1.0, 0.0])).unwrap(),
            Effect::new(diag_op(&[0.0, 1.0])).unwrap(),
        ])
        .unwrap();
        let report = classical_fragment_check(2, &states, &[povm]).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);

        let qutrit_states = [
            DensityOperator::new(diag_op(&[0.2, 0.3, 0.5])).unwrap(),
            DensityOperator::new(diag_op(&[1.0, 0.0, 0.0])).unwrap(),
        ];
        let qutrit_povm = Povm::new(vec![
            Effect::new(diag_op(&[0.5, 0.25, 0.0])).unwrap(),
            Effect::new(diag_op(&[0.5, 0.75, 1.0])).unwrap(),
        ])
        .unwrap();
        let report = classical_fragment_check(3, &qutrit_states, &[qutrit_povm]).unwrap();
        assert!(report.pass, "failures: {:?}", report.failures);
    }

    #[test]
    fn classical_fragment_rejects_offdiagonal_input() {
        let plus = bloch_state(1.0, 0.0, 0.0).unwrap();
        let err = classical_fragment_check(2, &[plus], &[]);
        assert!(matches!(err, Err(Error::NotDiagonal { .. })));
    }
}
