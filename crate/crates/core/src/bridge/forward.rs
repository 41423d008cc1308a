//! Decomposition → post-selected POVM, its domain, and verification.

use serde::Serialize;

use super::{fresh_reject_label, Decomposition, ImplementationDomain, PostSelectedPovm};
use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianMatrix, PSD_TOL};
use crate::measurement::{sample_domain_states, Measurement, MeasurementClass, Outcome, DEFAULT_JITTER};
use crate::supermap::{common_fixed_subspace_with_cutoff, Subspace, FIXED_CUTOFF};

const TP_TOL: f64 = 1e-12;
/// Below this accepted mass a sampled state counts as fully rejected.
const ACCEPT_FLOOR: f64 = 1e-12;
/// Outcome probabilities closer than this do not separate two states.
const SEPARATION_TOL: f64 = 1e-12;

/// `M_i = (1/c) Σ_k S_i^(k)` and `M_reject = 𝟙 − (1/c) Σ_i Σ_k S_i^(k)` with
/// `c` the largest eigenvalue of `Σ_i Σ_k S_i^(k)`.
pub fn construct_povm(dec: &Decomposition) -> Result<PostSelectedPovm> {
    let d = dec.dim();
    let total = dec.total_positive_part();
    let eigenvalues = total.eigenvalues();
    let c = *eigenvalues.last().expect("dim ≥ 1");
    if c <= 1e-12 {
        return Err(Error::DegenerateDecomposition { c });
    }
    let max_eig_multiplicity = eigenvalues.iter().filter(|&&x| x >= c - 1e-9 * c).count();
    let mut outcomes = Vec::with_capacity(dec.terms().len() + 1);
    for label in dec.labels() {
        outcomes.push(Outcome::new(label, dec.positive_part(label)?.scale(1.0 / c)));
    }
    let reject_label = fresh_reject_label(dec.labels());
    outcomes.push(Outcome::new(
        reject_label.clone(),
        &HermitianMatrix::identity(d) - &total.scale(1.0 / c),
    ));
    let povm = Measurement::new(outcomes)?;
    if let MeasurementClass::NPovm {
        label,
        min_eigenvalue,
        ..
    } = povm.classify(PSD_TOL)
    {
        return Err(Error::NotPovm {
            label,
            min_eigenvalue,
        });
    }
    Ok(PostSelectedPovm {
        povm,
        reject_label,
        c,
        max_eig_multiplicity,
    })
}

/// Common fixed space of the adjoints of every map in the decomposition.
pub fn implementation_domain(dec: &Decomposition) -> Result<ImplementationDomain> {
    implementation_domain_with_cutoff(dec, FIXED_CUTOFF)
}

pub fn implementation_domain_with_cutoff(
    dec: &Decomposition,
    rel_cutoff: f64,
) -> Result<ImplementationDomain> {
    let subspace = common_fixed_subspace_with_cutoff(dec.dim(), dec.maps(), rel_cutoff)?;
    ImplementationDomain::new(subspace, rel_cutoff)
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub jitter: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 200,
            seed: 42,
            jitter: DEFAULT_JITTER,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplementationReport {
    /// `max |Tr ρN_i − Tr ρM_i / Σ_{j∈I} Tr ρM_j|` over samples and outcomes.
    pub max_ratio_error: f64,
    /// `max − min` of the accepted mass `Σ_{j∈I} Tr ρM_j` over samples.
    pub acceptance_spread: f64,
    /// Mean accepted mass.
    pub acceptance: f64,
    pub samples_used: usize,
    /// Every pair of distinct sampled states is told apart by some `N_i`.
    pub informativeness: bool,
}

/// Checks the post-selection identity on states sampled from `dom`.
pub fn verify_implementation(
    n: &Measurement,
    ps: &PostSelectedPovm,
    dom: &ImplementationDomain,
    cfg: &VerifyConfig,
) -> Result<ImplementationReport> {
    verify_ratio_identity(n, &ps.povm, &ps.reject_label, &dom.subspace, cfg)
}

/// As [`verify_implementation`] for an arbitrary POVM, reject label and
/// subspace.
pub fn verify_ratio_identity(
    n: &Measurement,
    povm: &Measurement,
    reject_label: &str,
    subspace: &Subspace,
    cfg: &VerifyConfig,
) -> Result<ImplementationReport> {
    for dim in [povm.dim(), subspace.ambient_dim()] {
        if dim != n.dim() {
            return Err(Error::DimensionMismatch {
                expected: n.dim(),
                found: dim,
            });
        }
    }
    if povm.index_of(reject_label).is_none() {
        return Err(Error::UnknownLabel(reject_label.to_string()));
    }
    let kept: Vec<&str> = povm.labels().filter(|l| *l != reject_label).collect();
    let mut n_labels: Vec<&str> = n.labels().collect();
    let mut sorted_kept = kept.clone();
    n_labels.sort_unstable();
    sorted_kept.sort_unstable();
    if n_labels != sorted_kept {
        return Err(Error::LabelMismatch(format!(
            "N-POVM has {n_labels:?}, POVM keeps {sorted_kept:?}"
        )));
    }
    let sample = sample_domain_states(subspace, cfg.samples, cfg.seed, cfg.jitter)?;
    verify_on_states(n, povm, reject_label, &sample.states)
}

/// The post-selection identity evaluated on explicit states.
pub fn verify_on_states(
    n: &Measurement,
    povm: &Measurement,
    reject_label: &str,
    states: &[DensityMatrix],
) -> Result<ImplementationReport> {
    let m_index: Vec<usize> = n
        .labels()
        .map(|l| povm.index_of(l).ok_or_else(|| Error::UnknownLabel(l.to_string())))
        .collect::<Result<_>>()?;
    if m_index.iter().any(|&j| povm.outcomes()[j].label == reject_label) {
        return Err(Error::LabelMismatch(format!(
            "reject label {reject_label:?} is also an N-POVM outcome"
        )));
    }
    let mut max_ratio_error: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut mass_sum = 0.0;
    let mut n_probs = Vec::with_capacity(states.len());
    for rho in states {
        let pn = n.expectations(rho.matrix())?;
        let pm = povm.expectations(rho.matrix())?;
        let accepted: f64 = m_index.iter().map(|&j| pm[j]).sum();
        if accepted <= ACCEPT_FLOOR {
            return Err(Error::AllOutcomesRejected {
                accepted_mass: accepted,
            });
        }
        for (i, &j) in m_index.iter().enumerate() {
            max_ratio_error = max_ratio_error.max((pn[i] - pm[j] / accepted).abs());
        }
        lo = lo.min(accepted);
        hi = hi.max(accepted);
        mass_sum += accepted;
        n_probs.push(pn);
    }
    let count = states.len();
    Ok(ImplementationReport {
        max_ratio_error,
        acceptance_spread: if count > 0 { hi - lo } else { 0.0 },
        acceptance: if count > 0 { mass_sum / count as f64 } else { f64::NAN },
        samples_used: count,
        informativeness: informative(states, &n_probs),
    })
}

fn informative(states: &[DensityMatrix], probs: &[Vec<f64>]) -> bool {
    for a in 0..states.len() {
        for b in (a + 1)..states.len() {
            if states[a].matrix().max_abs_diff(states[b].matrix()) <= SEPARATION_TOL {
                continue;
            }
            let separated = probs[a]
                .iter()
                .zip(&probs[b])
                .any(|(x, y)| (x - y).abs() > SEPARATION_TOL);
            if !separated {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AcceptanceBound {
    /// `1/c`.
    pub acceptance: f64,
    /// `1/d`.
    pub bound: f64,
    pub trace_preserving: bool,
    /// Vacuously true when some map is not trace preserving.
    pub satisfied: bool,
}

/// The lower bound `1/c ≥ 1/d`, which holds when every map preserves trace.
pub fn acceptance_bound_check(dec: &Decomposition, ps: &PostSelectedPovm) -> AcceptanceBound {
    let acceptance = ps.acceptance();
    let bound = 1.0 / dec.dim() as f64;
    let trace_preserving = dec.all_trace_preserving(TP_TOL);
    AcceptanceBound {
        acceptance,
        bound,
        trace_preserving,
        satisfied: !trace_preserving || acceptance >= bound - 1e-12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::Term;
    use crate::pt_example::PartialTransposeExample;
    use crate::random;
    use crate::supermap::SuperMap;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_example_construction() {
        let ex = PartialTransposeExample::new();
        let ps = construct_povm(&ex.decomposition()).unwrap();
        assert_abs_diff_eq!(ps.c, 2.0, epsilon = 1e-12);
        let m = &ps.povm;
        assert!(m.effect("0").unwrap().max_abs_diff(&ex.m0) < 1e-12);
        assert!(m.effect("1").unwrap().max_abs_diff(&ex.m1) < 1e-12);
        assert!(m.effect(&ps.reject_label).unwrap().max_abs_diff(&ex.m2) < 1e-12);
        assert_eq!(ps.kept_labels().collect::<Vec<_>>(), vec!["0", "1"]);
    }

    #[test]
    fn worked_example_domain_and_verification() {
        let ex = PartialTransposeExample::new();
        let dec = ex.decomposition();
        let dom = implementation_domain(&dec).unwrap();
        assert_eq!(dom.dimension(), 12);
        assert!(dom.contains_maximally_mixed);
        for rho in [&ex.rho0, &ex.rho1] {
            assert!(dom.subspace.contains(rho.matrix(), 1e-12).unwrap());
        }
        let ps = construct_povm(&dec).unwrap();
        let report = verify_implementation(&ex.npovm(), &ps, &dom, &VerifyConfig::default()).unwrap();
        assert!(report.max_ratio_error < 1e-9);
        assert!(report.acceptance_spread < 1e-10);
        assert_abs_diff_eq!(report.acceptance, 0.5, epsilon = 1e-12);

        let bound = acceptance_bound_check(&dec, &ps);
        assert!(bound.trace_preserving && bound.satisfied);
        assert_abs_diff_eq!(bound.acceptance, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(bound.bound, 0.25);
    }

    #[test]
    fn swapped_pairing_is_detected() {
        let ex = PartialTransposeExample::new();
        let swapped = Measurement::from_pairs([
            ("0", ex.m1.clone()),
            ("1", ex.m0.clone()),
            ("2", ex.m2.clone()),
        ])
        .unwrap();
        // Oracle: on ρ0 the N-POVM gives (1, 0) while the swapped POVM keeps
        // (0, 1/2), so the post-selected ratio is off by exactly 1.
        let r = verify_on_states(&ex.npovm(), &swapped, "2", &[ex.rho0.clone(), ex.rho1.clone()])
            .unwrap();
        assert_abs_diff_eq!(r.max_ratio_error, 1.0, epsilon = 1e-12);
        let dom = implementation_domain(&ex.decomposition()).unwrap();
        let sampled =
            verify_ratio_identity(&ex.npovm(), &swapped, "2", &dom.subspace, &VerifyConfig::default())
                .unwrap();
        assert!(sampled.max_ratio_error > 1e-3);
    }

    #[test]
    fn povm_implements_itself() {
        let dec = Decomposition::new(
            2,
            [
                ("a", vec![Term::new(SuperMap::identity(2), HermitianMatrix::basis_projector(2, 0))]),
                ("b", vec![Term::new(SuperMap::identity(2), HermitianMatrix::basis_projector(2, 1))]),
            ],
        )
        .unwrap();
        let ps = construct_povm(&dec).unwrap();
        assert_abs_diff_eq!(ps.c, 1.0, epsilon = 1e-12);
        assert!(ps.reject_effect().hs_norm() < 1e-12);
        let dom = implementation_domain(&dec).unwrap();
        assert_eq!(dom.dimension(), 4);
        let n = dec.induced_measurement().unwrap();
        let r = verify_implementation(&n, &ps, &dom, &VerifyConfig::default()).unwrap();
        assert!(r.max_ratio_error < 1e-14);
        assert_abs_diff_eq!(r.acceptance, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn z_conjugation_domain_is_diagonal() {
        let z = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            crate::C64::new(1.0, 0.0),
            crate::C64::new(-1.0, 0.0),
        ]));
        let f = SuperMap::unitary_conjugation(z).unwrap();
        let dec = Decomposition::new(
            2,
            [("0", vec![Term::new(f, HermitianMatrix::identity(2))])],
        )
        .unwrap();
        assert_eq!(implementation_domain(&dec).unwrap().dimension(), 2);
    }

    #[test]
    fn scaling_map_makes_the_bound_vacuous() {
        let s = 0.1;
        let dec = Decomposition::new(
            2,
            [("0", vec![Term::new(SuperMap::scaling(2, s), HermitianMatrix::identity(2).scale(1.0 / s))])],
        )
        .unwrap();
        let ps = construct_povm(&dec).unwrap();
        let b = acceptance_bound_check(&dec, &ps);
        assert!(!b.trace_preserving);
        assert!(b.acceptance < b.bound);
        assert!(b.satisfied);
    }

    #[test]
    fn random_decompositions_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=4 {
            for _ in 0..3 {
                let dec = random::random_decomposition(d, &mut rng);
                let ps = construct_povm(&dec).unwrap();
                let dom = implementation_domain(&dec).unwrap();
                let n = dec.induced_measurement().unwrap();
                let cfg = VerifyConfig { samples: 50, ..VerifyConfig::default() };
                let r = verify_implementation(&n, &ps, &dom, &cfg).unwrap();
                assert!(r.max_ratio_error < 1e-9, "error {}", r.max_ratio_error);
                assert!(r.acceptance_spread < 1e-10);
            }
        }
    }
}
