//! A decomposition built from `N` alone.
//!
//! Work in the frame of `d` orthogonal pure states `ρ_j` from the quantum
//! domain. Each effect splits as `N_i = N̂_i + Ñ_i` with
//! `N̂_i = Σ_j Tr(ρ_j N_i) ρ_j`. A traceless `N̄_i` is chosen with
//! `S_i = N̂_i + N̄_i ≥ 0`, and `f_i` is the rank-one correction of the
//! identity sending `N̄_i` to `Ñ_i` while fixing everything orthogonal to the
//! off-diagonal part of `N̄_i`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::forward::{construct_povm, implementation_domain};
use super::{Decomposition, ImplementationDomain, PostSelectedPovm, Term};
use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::measurement::Measurement;
use crate::supermap::{Subspace, SuperMap};

const PURITY_TOL: f64 = 1e-9;
const ORTHOGONALITY_TOL: f64 = 1e-9;
const DIAGONAL_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-12;
const BISECTION_STEPS: usize = 16;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DomainConditions {
    /// The states are pairwise orthogonal and all lie in the quantum domain.
    pub orthogonal_states: bool,
    /// Some ball around `𝟙/d` lies in the quantum domain.
    pub ball: bool,
    /// Radius of that ball (HS norm), capped so it stays among the states.
    pub eps_max: f64,
}

impl DomainConditions {
    pub fn hold(&self) -> bool {
        self.orthogonal_states && self.ball
    }
}

fn check_frame(n: &Measurement, pure_states: &[DensityMatrix]) -> Result<()> {
    let d = n.dim();
    if pure_states.len() != d {
        return Err(Error::InvalidInput(format!(
            "expected {d} pure states, got {}",
            pure_states.len()
        )));
    }
    for (j, rho) in pure_states.iter().enumerate() {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        let purity = rho.purity();
        if (purity - 1.0).abs() > PURITY_TOL {
            return Err(Error::NotDensity(format!("state {j} is not pure (purity {purity})")));
        }
    }
    Ok(())
}

pub fn check_domain_conditions(
    n: &Measurement,
    pure_states: &[DensityMatrix],
) -> Result<DomainConditions> {
    check_frame(n, pure_states)?;
    let d = n.dim();
    let mut orthogonal_states = true;
    for a in 0..d {
        for b in (a + 1)..d {
            let overlap = pure_states[a].matrix().hs_inner(pure_states[b].matrix())?;
            orthogonal_states &= overlap.abs() <= ORTHOGONALITY_TOL;
        }
        orthogonal_states &= n.in_quantum_domain(&pure_states[a], DIAGONAL_TOL)?;
    }

    let mut eps_max = f64::INFINITY;
    for effect in n.effects() {
        let t = effect.trace() / d as f64;
        let traceless = (effect - &HermitianMatrix::identity(d).scale(t)).hs_norm();
        let eps = if traceless <= ZERO_TOL {
            if t >= 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            t.max(0.0) / traceless
        };
        eps_max = eps_max.min(eps);
    }
    if d >= 2 {
        eps_max = eps_max.min(1.0 / ((d * (d - 1)) as f64).sqrt());
    }
    Ok(DomainConditions {
        orthogonal_states,
        ball: eps_max > ZERO_TOL,
        eps_max,
    })
}

/// How the positive part `S_i` of one effect was completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CompletionRule {
    /// `Ñ_i = 0`: `f_i = id`, `S_i = N̂_i`.
    Identity,
    /// `N̄_i = δ·Ñ_i/‖Ñ_i‖`, with `δ` as large as positivity allows up to the
    /// smallest positive diagonal entry.
    Direction,
    /// `N̄_i = t𝟙 − N̂_i + δ·Ñ_i/‖Ñ_i‖` with `t = Tr N_i / d`, so that
    /// `S_i = t𝟙 + δ·Ñ_i/‖Ñ_i‖`. Used when the direction rule finds no
    /// positive `δ`.
    Recentred,
}

#[derive(Clone, Debug, Serialize)]
pub struct Completion {
    pub label: String,
    pub rule: CompletionRule,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CostBoundedImplementation {
    pub decomposition: Decomposition,
    pub domain: ImplementationDomain,
    pub postselected: PostSelectedPovm,
    pub conditions: DomainConditions,
    /// `d + dim J₂`, an upper bound on the basis cost of `N`.
    pub dim_prime_upper: usize,
    /// `d² + d − 2·dim_prime_upper`.
    pub dim_bound: i64,
    pub dim_bound_ok: bool,
    pub acc_bound_ok: bool,
    pub completions: Vec<Completion>,
}

/// Frame-diagonal weights `Tr(ρ_j N)`, rejecting negative or all-zero
/// diagonals.
fn diagonal(label: &str, effect: &HermitianMatrix, frame: &[DensityMatrix]) -> Result<Vec<f64>> {
    let q = frame
        .iter()
        .map(|rho| rho.matrix().hs_inner(effect))
        .collect::<Result<Vec<f64>>>()?;
    if let Some((j, v)) = q.iter().enumerate().find(|(_, v)| **v < -DIAGONAL_TOL) {
        return Err(Error::DiagonalCondition {
            label: label.to_string(),
            detail: format!("diagonal entry {j} is {v:.3e}"),
        });
    }
    if q.iter().all(|v| *v <= ZERO_TOL) && effect.hs_norm() > ZERO_TOL {
        return Err(Error::DiagonalCondition {
            label: label.to_string(),
            detail: "the diagonal vanishes but the effect does not".into(),
        });
    }
    Ok(q)
}

/// `(N̂, Ñ)` for the frame weights `q`.
fn split(
    effect: &HermitianMatrix,
    q: &[f64],
    frame: &[DensityMatrix],
) -> (HermitianMatrix, HermitianMatrix) {
    let n_hat = q
        .iter()
        .zip(frame)
        .fold(HermitianMatrix::zeros(effect.dim()), |acc, (qj, rho)| {
            &acc + &rho.matrix().scale(*qj)
        });
    let n_tilde = effect - &n_hat;
    (n_hat, n_tilde)
}

/// `d + dim span{Ñ_i}` in the frame of `pure_states`: the number of frame
/// projectors plus off-diagonal directions needed to write every effect.
pub fn dim_prime_upper(n: &Measurement, pure_states: &[DensityMatrix]) -> Result<usize> {
    check_frame(n, pure_states)?;
    let mut tildes = Vec::with_capacity(n.len());
    for effect in n.effects() {
        let q = pure_states
            .iter()
            .map(|rho| rho.matrix().hs_inner(effect))
            .collect::<Result<Vec<f64>>>()?;
        tildes.push(split(effect, &q, pure_states).1);
    }
    Ok(n.dim() + Subspace::from_spanning(n.dim(), &tildes)?.dimension())
}

/// Largest `δ ∈ (0, δ_max]` with `n_hat + δ·v ≥ 0`, if any.
fn direction_delta(n_hat: &HermitianMatrix, v: &HermitianMatrix, q: &[f64]) -> Option<f64> {
    let delta_max = q.iter().copied().filter(|x| *x > ZERO_TOL).fold(f64::INFINITY, f64::min);
    if !delta_max.is_finite() {
        return None;
    }
    let psd = |delta: f64| (n_hat + &v.scale(delta)).min_eigenvalue() >= -ZERO_TOL;
    if psd(delta_max) {
        return Some(delta_max);
    }
    let (mut lo, mut hi) = (0.0, delta_max);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then_some(lo)
}

/// `x ↦ x + w·⟨b, x⟩/‖b‖²`.
fn rank_one_map(d: usize, b: &HermitianMatrix, w: &HermitianMatrix) -> Result<SuperMap> {
    let bc = b.to_coords();
    let wc = w.to_coords();
    let n = d * d;
    let action = DMatrix::<f64>::identity(n, n) + (&wc * bc.transpose()) / bc.norm_squared();
    SuperMap::from_action(d, action)
}

/// Builds the decomposition, runs the forward construction on it and checks
/// both cost bounds.
pub fn cost_bounded_pipeline(
    n: &Measurement,
    pure_states: &[DensityMatrix],
) -> Result<CostBoundedImplementation> {
    let conditions = check_domain_conditions(n, pure_states)?;
    if !conditions.hold() {
        return Err(Error::DomainConditionsNotMet(format!(
            "orthogonal pure states in the domain: {}, ball radius {:.3e}",
            conditions.orthogonal_states, conditions.eps_max
        )));
    }
    let d = n.dim();
    let mut parts = Vec::with_capacity(n.len());
    for o in n.outcomes() {
        let q = diagonal(&o.label, &o.effect, pure_states)?;
        let (n_hat, n_tilde) = split(&o.effect, &q, pure_states);
        parts.push((o.label.clone(), q, n_hat, n_tilde));
    }
    let j2 = Subspace::from_spanning(d, &parts.iter().map(|p| p.3.clone()).collect::<Vec<_>>())?;

    let mut terms = Vec::with_capacity(parts.len());
    let mut completions = Vec::with_capacity(parts.len());
    for (label, q, n_hat, n_tilde) in parts {
        let norm = n_tilde.hs_norm();
        if norm <= ZERO_TOL {
            terms.push((label.clone(), vec![Term::new(SuperMap::identity(d), n_hat)]));
            completions.push(Completion {
                label,
                rule: CompletionRule::Identity,
                delta: 0.0,
            });
            continue;
        }
        let v = n_tilde.scale(1.0 / norm);
        let (rule, delta, n_bar) = match direction_delta(&n_hat, &v, &q) {
            Some(delta) => (CompletionRule::Direction, delta, v.scale(delta)),
            None => {
                let t = n_hat.trace() / d as f64;
                if t <= ZERO_TOL {
                    return Err(Error::CompletionInfeasible { label });
                }
                let delta = t / v.min_eigenvalue().abs();
                let n_bar = &(&HermitianMatrix::identity(d).scale(t) - &n_hat) + &v.scale(delta);
                (CompletionRule::Recentred, delta, n_bar)
            }
        };
        let b = j2.project(&n_bar)?;
        if b.hs_norm() <= ZERO_TOL {
            return Err(Error::CompletionInfeasible { label });
        }
        let f = rank_one_map(d, &b, &(&n_tilde - &n_bar))?;
        let s = &n_hat + &n_bar;
        terms.push((label.clone(), vec![Term::new(f, s)]));
        completions.push(Completion { label, rule, delta });
    }

    let decomposition = Decomposition::new(d, terms)?;
    let postselected = construct_povm(&decomposition)?;
    let domain = implementation_domain(&decomposition)?;
    let dim_prime_upper = d + j2.dimension();
    let dim_bound = (d * d + d) as i64 - 2 * dim_prime_upper as i64;
    let dim_bound_ok = domain.dimension() as i64 >= dim_bound;
    let acc_bound_ok = postselected.acceptance() >= 1.0 / d as f64 - ZERO_TOL;
    Ok(CostBoundedImplementation {
        decomposition,
        domain,
        postselected,
        conditions,
        dim_prime_upper,
        dim_bound,
        dim_bound_ok,
        acc_bound_ok,
        completions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::forward::{verify_implementation, VerifyConfig};
    use crate::pt_example::PartialTransposeExample;
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_example_conditions() {
        let ex = PartialTransposeExample::new();
        let cond = check_domain_conditions(&ex.npovm(), &PartialTransposeExample::computational_basis())
            .unwrap();
        assert!(cond.orthogonal_states && cond.ball);
        assert_abs_diff_eq!(cond.eps_max, 1.0 / 12f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn trivial_and_zero_trace_conditions() {
        let id = Measurement::from_pairs([("0", HermitianMatrix::identity(3))]).unwrap();
        let basis: Vec<_> = (0..3)
            .map(|j| DensityMatrix::new(HermitianMatrix::basis_projector(3, j)).unwrap())
            .collect();
        let cond = check_domain_conditions(&id, &basis).unwrap();
        assert!(cond.hold());
        assert_abs_diff_eq!(cond.eps_max, 1.0 / 6f64.sqrt(), epsilon = 1e-15);

        let z = HermitianMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let m = Measurement::from_pairs([("a", z.clone()), ("b", &HermitianMatrix::identity(2) - &z)])
            .unwrap();
        let basis: Vec<_> = (0..2)
            .map(|j| DensityMatrix::new(HermitianMatrix::basis_projector(2, j)).unwrap())
            .collect();
        let cond = check_domain_conditions(&m, &basis).unwrap();
        assert!(!cond.ball);
        assert!(!cond.orthogonal_states);
    }

    #[test]
    fn wrong_frame_is_rejected() {
        let ex = PartialTransposeExample::new();
        let three = &PartialTransposeExample::computational_basis()[..3];
        assert!(matches!(check_domain_conditions(&ex.npovm(), three), Err(Error::InvalidInput(_))));
        let mut mixed = PartialTransposeExample::computational_basis();
        mixed[0] = DensityMatrix::maximally_mixed(4);
        assert!(matches!(check_domain_conditions(&ex.npovm(), &mixed), Err(Error::NotDensity(_))));
    }

    #[test]
    fn worked_example_pipeline() {
        let ex = PartialTransposeExample::new();
        let out = cost_bounded_pipeline(&ex.npovm(), &PartialTransposeExample::computational_basis())
            .unwrap();
        assert_eq!(out.completions[0].rule, CompletionRule::Recentred);
        assert_eq!(out.completions[1].rule, CompletionRule::Direction);
        assert_abs_diff_eq!(out.completions[1].delta, 1.0, epsilon = 1e-15);
        assert_eq!(out.dim_prime_upper, 5);
        assert!(out.dim_bound_ok && out.acc_bound_ok);
        for label in ["0", "1"] {
            let got = out.decomposition.effect(label).unwrap();
            assert!(got.max_abs_diff(ex.npovm().effect(label).unwrap()) < 1e-12);
        }
        let report = verify_implementation(&ex.npovm(), &out.postselected, &out.domain, &VerifyConfig::default())
            .unwrap();
        assert!(report.max_ratio_error < 1e-9);
        assert!(report.acceptance_spread < 1e-10);
    }

    #[test]
    fn diagonal_npovm_idles() {
        let m = Measurement::from_pairs([
            ("a", HermitianMatrix::from_real(2, &[0.7, 0.0, 0.0, 0.2]).unwrap()),
            ("b", HermitianMatrix::from_real(2, &[0.3, 0.0, 0.0, 0.8]).unwrap()),
        ])
        .unwrap();
        let basis: Vec<_> = (0..2)
            .map(|j| DensityMatrix::new(HermitianMatrix::basis_projector(2, j)).unwrap())
            .collect();
        let out = cost_bounded_pipeline(&m, &basis).unwrap();
        assert!(out.completions.iter().all(|c| c.rule == CompletionRule::Identity));
        assert_eq!(out.domain.dimension(), 4);
        assert_abs_diff_eq!(out.postselected.c, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_witnesses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..6 {
            let (m, frame) = random::pt_witness_npovm(&mut rng, i % 2 == 1);
            let out = cost_bounded_pipeline(&m, &frame).unwrap();
            assert!(out.dim_bound_ok && out.acc_bound_ok);
            let cfg = VerifyConfig {
                samples: 50,
                ..VerifyConfig::default()
            };
            let report = verify_implementation(&m, &out.postselected, &out.domain, &cfg).unwrap();
            assert!(report.max_ratio_error < 1e-9, "{}", report.max_ratio_error);
        }
    }
}
